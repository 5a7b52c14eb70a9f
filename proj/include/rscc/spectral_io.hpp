#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rscc/spectral.hpp"

namespace rscc {

// .scube layout (little-endian):
//   "SCUB1" | u32 width | u32 height | u32 bands | f64 start_nm | f64 step_nm
//   | float32 samples, plane-sequential [band][row][col]
//   | u8 mask [row][col] (0 = masked, 1 = valid)
// Samples are stored as float32; values are narrowed on write.

void write_scube(std::ostream& os, const SpectralImage& image);
void write_scube(const std::filesystem::path& path, const SpectralImage& image);
SpectralImage read_scube(std::istream& is, const std::string& source = "<stream>");
SpectralImage read_scube(const std::filesystem::path& path);

/// One parsed CSV table: wavelength column plus one or more value columns.
struct SpectralTable {
  SpectralAxis axis;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // values[column][row]
};

/// Header must start with `wavelength_nm`; wavelengths strictly increasing and
/// uniformly spaced. Negative values are rejected with the offending row.
SpectralTable read_spectral_csv(const std::filesystem::path& path);

Spectrum read_spectrum_csv(const std::filesystem::path& path);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);

SensitivityFunctions read_sensitivity_csv(const std::filesystem::path& path, std::string camera_name = {});

}  // namespace rscc
