#!/usr/bin/env python3
"""Regenerate the bundled illuminant and camera CSVs under data/.

A and the D-series are computed from the CIE closed forms (Planck law for A,
daylight basis S0/S1/S2 for D). The F-series, LED-series and the three camera
sensitivity sets are parametric approximations: sums of Gaussian bands and
sampled emission lines chosen to reproduce each family's spectral shape. They
are stand-ins; replace them with measured tables when available (the loaders
only require the CSV layout documented in data/PROVENANCE.md).
"""

import math
import os
import sys

WAVELENGTHS = list(range(400, 701, 10))

# CIE daylight basis functions, 400-700 nm at 10 nm.
S0 = [94.8, 104.8, 105.9, 96.8, 113.9, 125.6, 125.5, 121.3, 121.3, 113.5, 113.1,
      110.8, 106.5, 108.8, 105.3, 104.4, 100.0, 96.0, 95.1, 89.1, 90.5, 90.3,
      88.4, 84.0, 85.1, 81.9, 82.6, 84.9, 81.3, 71.9, 74.3]
S1 = [43.4, 46.3, 43.9, 37.1, 36.7, 35.9, 32.6, 27.9, 24.3, 20.1, 16.2, 13.2,
      8.6, 6.1, 4.2, 1.9, 0.0, -1.6, -3.5, -3.5, -5.8, -7.2, -8.6, -9.5, -10.9,
      -10.7, -12.0, -14.0, -13.6, -12.0, -13.3]
S2 = [-1.1, -0.5, -0.7, -1.2, -2.6, -2.9, -2.8, -2.6, -2.6, -1.8, -1.5, -1.3,
      -1.2, -1.0, -0.5, -0.3, 0.0, 0.2, 0.5, 2.1, 3.2, 4.1, 4.7, 5.1, 6.7, 7.3,
      8.6, 9.8, 10.2, 8.3, 9.6]


def illuminant_a():
    c2 = 1.435e7
    return [100.0 * (560.0 / w) ** 5 * (math.exp(c2 / (2848 * 560)) - 1)
            / (math.exp(c2 / (2848 * w)) - 1) for w in WAVELENGTHS]


def daylight(cct):
    t = float(cct)
    if t <= 7000:
        x = -4.6070e9 / t**3 + 2.9678e6 / t**2 + 0.09911e3 / t + 0.244063
    else:
        x = -2.0064e9 / t**3 + 1.9018e6 / t**2 + 0.24748e3 / t + 0.237040
    y = -3.000 * x * x + 2.870 * x - 0.275
    m = 0.0241 + 0.2562 * x - 0.7341 * y
    m1 = round((-1.3515 - 1.7703 * x + 5.9114 * y) / m, 3)
    m2 = round((0.0300 - 31.4424 * x + 30.0717 * y) / m, 3)
    return [s0 + m1 * s1 + m2 * s2 for s0, s1, s2 in zip(S0, S1, S2)]


def gauss(center, sigma, amp=1.0):
    return [amp * math.exp(-0.5 * ((w - center) / sigma) ** 2) for w in WAVELENGTHS]


def line(center, amp):
    # Emission line deposited on the two neighbouring samples (10 nm bins).
    out = [0.0] * len(WAVELENGTHS)
    pos = (center - WAVELENGTHS[0]) / 10.0
    lo = int(math.floor(pos))
    frac = pos - lo
    if 0 <= lo < len(out):
        out[lo] += amp * (1 - frac)
    if 0 <= lo + 1 < len(out):
        out[lo + 1] += amp * frac
    return out


def add(*parts):
    return [sum(v) for v in zip(*parts)]


MERCURY = [(404.7, 0.35), (435.8, 0.9), (546.1, 1.1), (578.0, 0.4)]


def fluorescent(bands, hg_scale=1.0):
    parts = [gauss(c, s, a) for c, s, a in bands]
    parts += [line(c, a * hg_scale) for c, a in MERCURY]
    return add(*parts)


def led(bands):
    return add(*[gauss(c, s, a) for c, s, a in bands])


def normalize_560(values):
    v560 = values[WAVELENGTHS.index(560)]
    return [100.0 * v / v560 for v in values]


def illuminants():
    out = [("A", illuminant_a())]
    for name, cct in [("D50", 5003), ("D55", 5503), ("D60", 6003),
                      ("D65", 6504), ("D75", 7504), ("D93", 9305)]:
        out.append((name, daylight(cct)))
    fl = {
        "F1": [(470, 40, 1.00), (580, 45, 0.80)],
        "F2": [(470, 40, 0.60), (585, 45, 1.00)],
        "F3": [(470, 40, 0.45), (590, 45, 1.00)],
        "F4": [(470, 40, 0.35), (595, 45, 1.00)],
        "F5": [(475, 35, 1.00), (575, 40, 0.75)],
        "F6": [(475, 35, 0.55), (580, 40, 1.00)],
        "F7": [(460, 45, 1.00), (560, 55, 0.90), (640, 35, 0.50)],
        "F8": [(460, 45, 0.75), (565, 55, 1.00), (640, 35, 0.60)],
        "F9": [(460, 45, 0.55), (570, 55, 1.00), (640, 35, 0.70)],
        "F10": [(450, 10, 0.60), (545, 8, 1.00), (610, 8, 0.90)],
        "F11": [(450, 10, 0.35), (545, 8, 1.00), (610, 8, 1.10)],
        "F12": [(450, 10, 0.20), (545, 8, 0.80), (610, 8, 1.20)],
    }
    for name, bands in fl.items():
        out.append((name, fluorescent(bands, 0.5 if name in ("F10", "F11", "F12") else 1.0)))
    leds = {
        "LED-B1": [(455, 10, 0.35), (600, 55, 1.00)],
        "LED-B2": [(455, 10, 0.45), (590, 55, 1.00)],
        "LED-B3": [(455, 10, 0.75), (570, 55, 1.00)],
        "LED-B4": [(455, 10, 1.00), (560, 55, 1.00)],
        "LED-B5": [(455, 10, 1.40), (550, 50, 1.00)],
        "LED-BH1": [(455, 10, 0.40), (560, 45, 0.80), (625, 15, 0.70)],
        "LED-RGB1": [(455, 10, 0.40), (530, 15, 0.55), (620, 10, 1.00)],
        "LED-V1": [(410, 8, 0.50), (530, 30, 0.40), (620, 40, 1.00)],
        "LED-V2": [(410, 8, 0.90), (520, 35, 0.70), (610, 40, 0.90)],
    }
    for name, bands in leds.items():
        out.append((name, led(bands)))
    return [(n, normalize_560(v)) for n, v in out]


CAMERAS = {
    "canon300d": [(600, 30, 0.05, 450), (535, 35, 0.0, 0), (460, 25, 0.0, 0)],
    "nikond90": [(605, 28, 0.04, 440), (530, 38, 0.0, 0), (455, 25, 0.0, 0)],
    "sonynex5n": [(595, 32, 0.06, 455), (525, 40, 0.0, 0), (465, 28, 0.0, 0)],
}


def cameras():
    out = []
    for name, channels in CAMERAS.items():
        rows = []
        for center, sigma, leak, leak_center in channels:
            ch = gauss(center, sigma)
            if leak > 0:
                ch = add(ch, gauss(leak_center, 20, leak))
            rows.append(ch)
        peak = max(max(r) for r in rows)
        out.append((name, [[v / peak for v in r] for r in rows]))
    return out


def main(root):
    ill_dir = os.path.join(root, "illuminants")
    cam_dir = os.path.join(root, "cameras")
    os.makedirs(ill_dir, exist_ok=True)
    os.makedirs(cam_dir, exist_ok=True)
    manifest = []
    for name, values in illuminants():
        assert min(values) >= 0, name
        fname = name + ".csv"
        with open(os.path.join(ill_dir, fname), "w") as f:
            f.write("wavelength_nm,value\n")
            for w, v in zip(WAVELENGTHS, values):
                f.write(f"{w},{v:.6f}\n")
        manifest.append(f"{fname} {name}")
    with open(os.path.join(ill_dir, "manifest.txt"), "w") as f:
        f.write("# relative_csv_path name\n")
        f.write("\n".join(manifest) + "\n")
    for name, rows in cameras():
        with open(os.path.join(cam_dir, name + ".csv"), "w") as f:
            f.write("wavelength_nm,value,value2,value3\n")
            for i, w in enumerate(WAVELENGTHS):
                f.write(f"{w},{rows[0][i]:.6f},{rows[1][i]:.6f},{rows[2][i]:.6f}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data"))
