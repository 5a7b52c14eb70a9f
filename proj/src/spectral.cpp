#include "rscc/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rscc/random.hpp"

namespace rscc {

SpectralAxis::SpectralAxis(double start, double step, int n) : start_nm(start), step_nm(step), count(n) {
  if (!(step > 0.0) || n < 1) {
    throw std::invalid_argument("spectral axis needs step > 0 and count >= 1, got " + describe());
  }
}

std::string SpectralAxis::describe() const {
  std::ostringstream os;
  os << "[" << start_nm << " nm + " << step_nm << " nm x " << count << "]";
  return os.str();
}

void require_same_axis(const SpectralAxis& a, const SpectralAxis& b, const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) + ": spectral axis mismatch " + a.describe() + " vs " +
                                b.describe());
  }
}

Spectrum::Spectrum(SpectralAxis ax, Eigen::VectorXd v) : axis(ax), values(std::move(v)) {
  if (values.size() != axis.count) {
    throw std::invalid_argument("spectrum length " + std::to_string(values.size()) + " does not match axis " +
                                axis.describe());
  }
}

SpectralImage::SpectralImage(int width, int height, SpectralAxis axis)
    : width_(width), height_(height), axis_(axis) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image size");
  data_.assign(static_cast<std::size_t>(width) * height * axis.count, 0.0);
  mask_.assign(static_cast<std::size_t>(width) * height, 1);
}

int SpectralImage::valid_count() const {
  int n = 0;
  for (auto m : mask_) n += m != 0;
  return n;
}

SensitivityFunctions::SensitivityFunctions(SpectralAxis ax, Eigen::MatrixXd s, std::string name)
    : axis(ax), rows(std::move(s)), camera_name(std::move(name)) {
  if (rows.rows() != 3 || rows.cols() != axis.count) {
    throw std::invalid_argument("sensitivity matrix must be 3 x " + std::to_string(axis.count));
  }
  if ((rows.array() < 0.0).any()) throw std::invalid_argument("sensitivity entries must be non-negative");
  for (int r = 0; r < 3; ++r) {
    if (rows.row(r).maxCoeff() <= 0.0) {
      throw std::invalid_argument("sensitivity channel " + std::to_string(r) + " is identically zero");
    }
  }
}

SpectralImage relight(const SpectralImage& reflectance, const Spectrum& illuminant) {
  require_same_axis(reflectance.axis(), illuminant.axis, "relight");
  if ((illuminant.values.array() < 0.0).any()) throw std::invalid_argument("relight: negative illuminant value");
  SpectralImage out = reflectance;
  const int d = reflectance.bands();
  auto& data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= illuminant.values[static_cast<int>(i % d)];
  return out;
}

RgbImage sensor_project(const SpectralImage& radiance, const SensitivityFunctions& sens) {
  require_same_axis(radiance.axis(), sens.axis, "sensor_project");
  RgbImage out;
  out.width = radiance.width();
  out.height = radiance.height();
  out.mask = radiance.mask();
  out.data.assign(static_cast<std::size_t>(radiance.pixel_count()) * 3, 0.0);
  const double dl = radiance.axis().step_nm;
  const int d = radiance.bands();
  for (int p = 0; p < radiance.pixel_count(); ++p) {
    if (!radiance.valid(p)) continue;
    auto px = radiance.pixel(p);
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i) acc += sens.rows(c, i) * px[i];
      out.data[static_cast<std::size_t>(p) * 3 + c] = acc * dl;
    }
  }
  return out;
}

std::optional<Eigen::VectorXd> l1_chromaticity(std::span<const double> p) {
  double norm = 0.0;
  for (double v : p) norm += std::abs(v);
  if (!(norm >= kZeroNormEpsilon)) return std::nullopt;
  Eigen::VectorXd c(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) c[static_cast<Eigen::Index>(i)] = p[i] / norm;
  return c;
}

SpectralImage downsample(const SpectralImage& image, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  if (image.width() % factor != 0 || image.height() % factor != 0) {
    throw std::invalid_argument("downsample factor " + std::to_string(factor) + " does not divide image size " +
                                std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
  if (factor == 1) return image;
  const int w = image.width() / factor;
  const int h = image.height() / factor;
  const int d = image.bands();
  SpectralImage out(w, h, image.axis());
  std::vector<double> acc(d);
  for (int by = 0; by < h; ++by) {
    for (int bx = 0; bx < w; ++bx) {
      std::fill(acc.begin(), acc.end(), 0.0);
      int n = 0;
      for (int y = by * factor; y < (by + 1) * factor; ++y) {
        for (int x = bx * factor; x < (bx + 1) * factor; ++x) {
          const int idx = y * image.width() + x;
          if (!image.valid(idx)) continue;
          auto px = image.pixel(idx);
          for (int i = 0; i < d; ++i) acc[i] += px[i];
          ++n;
        }
      }
      const int oidx = by * w + bx;
      out.set_valid(oidx, n > 0);
      if (n == 0) continue;
      auto opx = out.pixel(oidx);
      for (int i = 0; i < d; ++i) opx[i] = acc[i] / n;
    }
  }
  return out;
}

double noise_sigma(double mean_signal, double snr_db) { return mean_signal / std::pow(10.0, snr_db / 20.0); }

double mean_radiance(const SpectralImage& image) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int p = 0; p < image.pixel_count(); ++p) {
    if (!image.valid(p)) continue;
    for (double v : image.pixel(p)) sum += v;
    n += static_cast<std::size_t>(image.bands());
  }
  if (n == 0) throw std::invalid_argument("mean radiance undefined: image has no valid pixels");
  return sum / static_cast<double>(n);
}

SpectralImage add_noise(const SpectralImage& radiance, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw std::invalid_argument("add_noise: SNR must not be NaN");
  const double mu = mean_radiance(radiance);
  if (snr_db == std::numeric_limits<double>::infinity()) return radiance;
  const double sigma = noise_sigma(mu, snr_db);
  SpectralImage out = radiance;
  Rng rng(seed);
  for (int p = 0; p < out.pixel_count(); ++p) {
    if (!out.valid(p)) continue;
    for (double& v : out.pixel(p)) v = std::max(0.0, v + sigma * rng.normal());
  }
  return out;
}

}  // namespace rscc
