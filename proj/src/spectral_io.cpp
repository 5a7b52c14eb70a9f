#include "rscc/spectral_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "binary_io.hpp"

namespace rscc {

namespace {

constexpr std::string_view kCubeMagic = "SCUB1";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::runtime_error(where + ": cannot parse number \"" + s + "\"");
  }
  return v;
}

}  // namespace

void write_scube(std::ostream& os, const SpectralImage& image) {
  detail::ByteWriter w(os);
  w.raw(kCubeMagic);
  w.u32(static_cast<std::uint32_t>(image.width()));
  w.u32(static_cast<std::uint32_t>(image.height()));
  w.u32(static_cast<std::uint32_t>(image.bands()));
  w.f64(image.axis().start_nm);
  w.f64(image.axis().step_nm);
  for (int b = 0; b < image.bands(); ++b) {
    for (int p = 0; p < image.pixel_count(); ++p) w.f32(static_cast<float>(image.pixel(p)[b]));
  }
  for (auto m : image.mask()) w.u8(m ? 1 : 0);
}

void write_scube(const std::filesystem::path& path, const SpectralImage& image) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_scube(os, image);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

SpectralImage read_scube(std::istream& is, const std::string& source) {
  detail::ByteReader r(is, source);
  r.expect_magic(kCubeMagic);
  const auto width = r.u32();
  const auto height = r.u32();
  const auto bands = r.u32();
  const double start = r.f64();
  const double step = r.f64();
  if (bands == 0 || width > (1u << 16) || height > (1u << 16) || bands > 4096) r.fail("implausible cube header");
  SpectralImage img(static_cast<int>(width), static_cast<int>(height),
                    SpectralAxis(start, step, static_cast<int>(bands)));
  for (int b = 0; b < img.bands(); ++b) {
    for (int p = 0; p < img.pixel_count(); ++p) {
      const float v = r.f32();
      if (!std::isfinite(v) || v < 0.0f) r.fail("negative or non-finite sample at band " + std::to_string(b));
      img.pixel(p)[b] = v;
    }
  }
  for (int p = 0; p < img.pixel_count(); ++p) {
    const auto m = r.u8();
    if (m > 1) r.fail("mask byte must be 0 or 1");
    img.set_valid(p, m == 1);
  }
  r.expect_eof();
  return img;
}

SpectralImage read_scube(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_scube(is, path.string());
}

SpectralTable read_spectral_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  const std::string src = path.string();
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(src + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "wavelength_nm") {
    throw std::runtime_error(src + ": header must be wavelength_nm,value[,...]");
  }
  SpectralTable t;
  t.columns.assign(header.begin() + 1, header.end());
  t.values.resize(t.columns.size());
  std::vector<double> wl;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    const std::string where = src + " row " + std::to_string(row);
    if (cells.size() != header.size()) throw std::runtime_error(where + ": expected " + std::to_string(header.size()) + " columns");
    const double w = parse_double(cells[0], where);
    if (!wl.empty() && w <= wl.back()) throw std::runtime_error(where + ": wavelengths must be strictly increasing");
    wl.push_back(w);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const double v = parse_double(cells[c], where);
      if (v < 0.0) throw std::runtime_error(where + ": negative value " + cells[c]);
      t.values[c - 1].push_back(v);
    }
  }
  if (wl.empty()) throw std::runtime_error(src + ": no data rows");
  const double step = wl.size() > 1 ? wl[1] - wl[0] : 1.0;
  for (std::size_t i = 1; i < wl.size(); ++i) {
    if (std::abs((wl[i] - wl[i - 1]) - step) > 1e-9 * std::max(1.0, step)) {
      throw std::runtime_error(src + ": wavelengths are not uniformly spaced");
    }
  }
  t.axis = SpectralAxis(wl.front(), step, static_cast<int>(wl.size()));
  return t;
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
  auto t = read_spectral_csv(path);
  if (t.columns.size() != 1) throw std::runtime_error(path.string() + ": expected a single value column");
  return Spectrum(t.axis, Eigen::Map<const Eigen::VectorXd>(t.values[0].data(), static_cast<Eigen::Index>(t.values[0].size())));
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "wavelength_nm,value\n";
  char buf[64];
  for (int i = 0; i < s.axis.count; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.axis.wavelength(i), s.values[i]);
    os << buf;
  }
}

SensitivityFunctions read_sensitivity_csv(const std::filesystem::path& path, std::string camera_name) {
  auto t = read_spectral_csv(path);
  if (t.columns.size() != 3) throw std::runtime_error(path.string() + ": sensitivity file needs 3 value columns");
  Eigen::MatrixXd s(3, t.axis.count);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < t.axis.count; ++i) s(c, i) = t.values[c][i];
  }
  if (camera_name.empty()) camera_name = path.stem().string();
  return SensitivityFunctions(t.axis, std::move(s), std::move(camera_name));
}

}  // namespace rscc
