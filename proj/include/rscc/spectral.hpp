#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rscc {

/// Pixels whose L1 norm falls below this are skipped by every pixel-level stage.
inline constexpr double kZeroNormEpsilon = 1e-12;

/// Uniform wavelength sampling shared by spectra, images and sensitivities.
struct SpectralAxis {
  double start_nm = 400.0;
  double step_nm = 10.0;
  int count = 31;

  SpectralAxis() = default;
  SpectralAxis(double start, double step, int n);

  double wavelength(int i) const { return start_nm + step_nm * i; }
  std::string describe() const;

  friend bool operator==(const SpectralAxis&, const SpectralAxis&) = default;
};

/// Throws std::invalid_argument naming both axes when they differ.
void require_same_axis(const SpectralAxis& a, const SpectralAxis& b, const char* what);

struct Spectrum {
  SpectralAxis axis;
  Eigen::VectorXd values;

  Spectrum() = default;
  Spectrum(SpectralAxis ax, Eigen::VectorXd v);
};

/// H x W x d cube stored pixel-major (all bands of a pixel are contiguous)
/// with a validity mask; mask == 0 pixels are ignored everywhere.
class SpectralImage {
 public:
  SpectralImage() = default;
  SpectralImage(int width, int height, SpectralAxis axis);

  int width() const { return width_; }
  int height() const { return height_; }
  int bands() const { return axis_.count; }
  int pixel_count() const { return width_ * height_; }
  const SpectralAxis& axis() const { return axis_; }

  std::span<double> pixel(int index) {
    return {data_.data() + static_cast<std::size_t>(index) * bands(),
            static_cast<std::size_t>(bands())};
  }
  std::span<const double> pixel(int index) const {
    return {data_.data() + static_cast<std::size_t>(index) * bands(),
            static_cast<std::size_t>(bands())};
  }
  std::span<double> pixel(int x, int y) { return pixel(y * width_ + x); }
  std::span<const double> pixel(int x, int y) const { return pixel(y * width_ + x); }

  bool valid(int index) const { return mask_[index] != 0; }
  void set_valid(int index, bool v) { mask_[index] = v ? 1 : 0; }
  int valid_count() const;

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  std::vector<std::uint8_t>& mask() { return mask_; }

 private:
  int width_ = 0;
  int height_ = 0;
  SpectralAxis axis_;
  std::vector<double> data_;
  std::vector<std::uint8_t> mask_;
};

/// Camera spectral sensitivities: 3 x d, one row per channel (R, G, B).
struct SensitivityFunctions {
  SpectralAxis axis;
  Eigen::MatrixXd rows;
  std::string camera_name;

  SensitivityFunctions() = default;
  SensitivityFunctions(SpectralAxis ax, Eigen::MatrixXd s, std::string name);
};

/// Three-channel sensor image, pixel-major, mask copied from the radiance.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;
  std::vector<std::uint8_t> mask;
};

SpectralImage relight(const SpectralImage& reflectance, const Spectrum& illuminant);

RgbImage sensor_project(const SpectralImage& radiance, const SensitivityFunctions& sens);

/// c = p / |p|_1, or nullopt when |p|_1 < kZeroNormEpsilon.
std::optional<Eigen::VectorXd> l1_chromaticity(std::span<const double> p);

/// Box average over factor x factor blocks, counting only valid pixels.
SpectralImage downsample(const SpectralImage& image, int factor);

/// sigma = mu / 10^(snr_db / 20).
double noise_sigma(double mean_signal, double snr_db);

/// Mean over every band of every valid pixel.
double mean_radiance(const SpectralImage& image);

/// Additive Gaussian noise at the given SNR, clipped at zero. snr_db = +inf
/// returns the input unchanged.
SpectralImage add_noise(const SpectralImage& radiance, double snr_db, std::uint64_t seed);

}  // namespace rscc
