#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rscc/histogram.hpp"
#include "rscc/illuminants.hpp"
#include "rscc/projection.hpp"
#include "rscc/spectral.hpp"

namespace rscc {

enum class ScoreMode { log_correlation, dot };

std::string_view to_string(ScoreMode mode);
ScoreMode parse_score_mode(std::string_view name);

/// Feature of one radiance pixel, or nullopt for a zero pixel.
/// RGB: project through the sensitivities, then L1-normalise the triple.
/// Spectral kinds: L1-normalise the spectrum, then project.
std::optional<Eigen::VectorXd> pixel_feature(const Projection& proj, std::span<const double> radiance);

/// Calls fn(z) for every valid, non-zero pixel of reflectance relit by spd,
/// without materialising the radiance image.
template <class Fn>
void for_each_relit_feature(const SpectralImage& reflectance, const Eigen::VectorXd& spd, const Projection& proj,
                            Fn&& fn) {
  std::vector<double> buf(static_cast<std::size_t>(reflectance.bands()));
  for (int p = 0; p < reflectance.pixel_count(); ++p) {
    if (!reflectance.valid(p)) continue;
    auto px = reflectance.pixel(p);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = spd[static_cast<Eigen::Index>(i)] * px[i];
    if (auto z = pixel_feature(proj, buf)) fn(*z);
  }
}

/// Smoothed probability grid of one candidate illuminant, stored as the
/// sorted list of occupied cells; every other cell has the model's
/// background probability.
struct CandidateGrid {
  std::string name;
  std::vector<std::uint64_t> cells;
  std::vector<double> probability;
};

class CorrelationModel {
 public:
  BinSpec spec;
  double smoothing = 1e-9;
  std::uint64_t projection_hash = 0;
  std::vector<CandidateGrid> grids;

  std::size_t candidate_count() const { return grids.size(); }
  std::vector<std::string> candidate_names() const;

  /// Probability of an unoccupied cell: eps / (1 + eps * B^d').
  double background() const;
  double probability(std::size_t candidate, std::uint64_t cell) const;
  /// Sum over all B^d' cells (occupied plus background mass).
  double total_probability(std::size_t candidate) const;
};

struct BuildOptions {
  int bins = 30;
  double smoothing = 1e-9;
  int threads = 1;
  std::uint64_t dense_limit = HistogramGrid::kDefaultDenseLimit;
};

/// Counts of one candidate: every training reflectance image relit by spd.
HistogramGrid accumulate_counts(const std::vector<SpectralImage>& reflectances, const Eigen::VectorXd& spd,
                                const Projection& proj, const BinSpec& spec,
                                std::uint64_t dense_limit = HistogramGrid::kDefaultDenseLimit);

/// Bounds from the projected training features across all candidates.
BinSpec calibrate_model_bins(const std::vector<SpectralImage>& reflectances, const IlluminantSet& candidates,
                             const Projection& proj, int bins);

/// Builds one smoothed, normalised grid per candidate. Probabilities are
/// (n_c / N + eps) / (1 + eps * B^d').
CorrelationModel build_model(const std::vector<SpectralImage>& reflectances, const IlluminantSet& candidates,
                             const Projection& proj, const BuildOptions& opts);

/// Test-image histogram with the model's bounds and bin count.
HistogramGrid test_histogram(const CorrelationModel& model, const Projection& proj, const SpectralImage& radiance);

std::vector<double> score(const CorrelationModel& model, const Projection& proj, const SpectralImage& radiance,
                          ScoreMode mode = ScoreMode::log_correlation);

struct Classification {
  std::size_t index = 0;
  std::string name;
  std::vector<double> scores;
};

/// Argmax of score(); ties go to the lowest candidate index.
Classification classify(const CorrelationModel& model, const Projection& proj, const SpectralImage& radiance,
                        ScoreMode mode = ScoreMode::log_correlation);

// .cbcm layout (little-endian):
//   "CBCM1" | u32 d' | u32 B | u32 candidates | d' x (f64 lo, f64 hi)
//   | f64 smoothing | u64 projection hash
//   | per candidate: u32 name length | name | u64 cells | cells x (u64 index, f64 probability)
void write_model(std::ostream& os, const CorrelationModel& model);
void write_model(const std::filesystem::path& path, const CorrelationModel& model);
CorrelationModel read_model(std::istream& is, const std::string& source = "<stream>");
CorrelationModel read_model(const std::filesystem::path& path);

}  // namespace rscc
