#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rscc/illuminants.hpp"
#include "rscc/spectral.hpp"

namespace rscc {

struct GrayWorldEstimate {
  std::size_t index = 0;
  std::string name;
  Eigen::VectorXd mean_spectrum;  // L2-normalised
  std::vector<double> cosines;    // per candidate
};

/// Spectral Gray World: the L2-normalised mean radiance over valid non-zero
/// pixels, snapped to the candidate with the highest cosine similarity
/// (lowest index on ties).
GrayWorldEstimate spectral_gray_world(const SpectralImage& radiance, const IlluminantSet& candidates);

}  // namespace rscc
