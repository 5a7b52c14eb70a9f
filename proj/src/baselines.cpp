#include "rscc/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace rscc {

GrayWorldEstimate spectral_gray_world(const SpectralImage& radiance, const IlluminantSet& candidates) {
  if (candidates.empty()) throw std::invalid_argument("spectral_gray_world: no candidates");
  require_same_axis(radiance.axis(), candidates.axis(), "spectral_gray_world");
  const int d = radiance.bands();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  std::size_t n = 0;
  for (int p = 0; p < radiance.pixel_count(); ++p) {
    if (!radiance.valid(p)) continue;
    auto px = radiance.pixel(p);
    double norm = 0.0;
    for (double v : px) norm += std::abs(v);
    if (norm < kZeroNormEpsilon) continue;
    for (int i = 0; i < d; ++i) sum[i] += px[i];
    ++n;
  }
  if (n == 0) throw std::invalid_argument("spectral_gray_world: image has no valid pixels");

  GrayWorldEstimate est;
  est.mean_spectrum = sum / static_cast<double>(n);
  est.mean_spectrum.normalize();
  est.cosines.resize(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& e = candidates[c].spd.values;
    est.cosines[c] = est.mean_spectrum.dot(e) / e.norm();
    if (est.cosines[c] > est.cosines[est.index]) est.index = c;
  }
  est.name = candidates[est.index].name;
  return est;
}

}  // namespace rscc
