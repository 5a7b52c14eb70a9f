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

#include "rscc/cbc.hpp"
#include "rscc/dataset.hpp"
#include "rscc/illuminants.hpp"
#include "rscc/projection.hpp"
#include "rscc/spectral.hpp"

namespace rscc {

/// Angle between two spectra in degrees. Computed as
/// 2 atan2(|a^ - b^|, |a^ + b^|), which equals arccos of the normalised dot
/// product but stays exact for (anti)parallel inputs.
double angular_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

struct ErrorSummary {
  double mean = 0.0;
  double median = 0.0;
  double trimean = 0.0;
  double best25 = 0.0;   // mean of the lowest ceil(n/4)
  double worst25 = 0.0;  // mean of the highest ceil(n/4)
  std::size_t n = 0;
};

/// Linear-interpolation quantile of an ascending-sorted sample
/// (position q * (n - 1)).
double quantile_sorted(std::span<const double> sorted, double q);

/// Throws on an empty list. The mean sums in the given order.
ErrorSummary summarize(std::span<const double> errors);

enum class Method { rgb, rand, pca, ill_pca, nnmf, lda, sgw };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// One experimental sweep. Paths are absolute or relative to the working
/// directory; parse_grid_config resolves them against the config file.
struct GridConfig {
  std::vector<Method> methods;
  std::vector<int> bins{5, 10, 20, 30};
  std::vector<int> dims{1, 2, 3, 4, 5};
  std::vector<std::uint64_t> seeds{42, 43, 44};
  std::vector<std::filesystem::path> cameras;
  std::filesystem::path dataset;
  std::filesystem::path illuminants;
  std::optional<std::filesystem::path> projection_set;
  int kmeans_k = 10;
  std::uint64_t kmeans_seed = 0;
  bool ill_pca_full_set = false;
  int fit_downsample = 8;
  int lda_downsample = 16;
  int model_downsample = 4;
  ScoreMode score_mode = ScoreMode::log_correlation;
  double smoothing = 1e-9;
  std::uint64_t nnmf_seed = 0;
  int nnmf_max_iter = 400;
  double nnmf_tol = 1e-5;
  double lda_shrinkage = 1e-6;
  bool test_on_train = false;  // evaluate on the training scenes (self-consistency)
  int threads = 1;
  std::filesystem::path output_dir = "results";

  // noise protocol
  Method noise_method = Method::ill_pca;
  int noise_dprime = 4;
  int noise_bins = 20;
  std::vector<double> noise_levels{50, 40, 30, 20, 10};
  std::uint64_t noise_seed = 0;
  std::string noise_variant;  // camera name or seed for RGB / RAND

  /// Throws std::invalid_argument describing the first inconsistency.
  void validate() const;
};

GridConfig parse_grid_config(const std::filesystem::path& path);
GridConfig parse_grid_config(std::istream& is, const std::filesystem::path& base_dir);

/// Scenes, illuminant sets and cameras for a sweep.
struct ExperimentData {
  std::vector<Scene> train;
  std::vector<Scene> test;
  IlluminantSet full;
  IlluminantSet projection;
  std::vector<SensitivityFunctions> cameras;
};

ExperimentData load_experiment(const GridConfig& config);

/// Rows of the training matrix: chromaticities of every valid non-zero pixel
/// of every image relit by each illuminant; labels are illuminant indices.
TrainingMatrix training_matrix(const std::vector<SpectralImage>& reflectances, const IlluminantSet& illuminants);

struct RawError {
  std::string scene;
  std::string truth;
  std::string estimate;
  double error = 0.0;
};

struct ReportRow {
  Method method = Method::pca;
  int d_prime = 0;  // 0 = not applicable (SGW)
  int bins = 0;     // 0 = not applicable (SGW)
  std::string variant = "-";
  std::optional<double> noise_db;  // nullopt = clean
  ErrorSummary summary;
  std::vector<RawError> raw;  // empty for aggregated rows
};

struct EvalReport {
  std::vector<ReportRow> rows;
};

/// Fitted projection for a (method, d', variant) cell of the grid. The
/// variant names the camera (RGB) or the seed (RAND) and is ignored
/// otherwise.
Projection fit_method(const GridConfig& config, const ExperimentData& data, Method method, int d_prime,
                      const std::string& variant);

/// Classifies every (test scene, candidate) pair. Test radiance is the
/// reflectance relit by the L1-normalised candidate SPD; when noise_db is
/// set, Gaussian noise from stream_seed(noise_seed, scene, candidate) is
/// added first.
std::vector<RawError> evaluate_pairs(const CorrelationModel& model, const Projection& proj,
                                     const std::vector<SpectralImage>& test_images,
                                     const std::vector<std::string>& scene_names, const IlluminantSet& candidates,
                                     ScoreMode mode, std::optional<double> noise_db, std::uint64_t noise_seed,
                                     int threads);

/// Progress lines go to `log` when given.
EvalReport run_grid(const GridConfig& config, const ExperimentData& data, std::ostream* log = nullptr);
/// Pinned (noise_method, noise_dprime, noise_bins, noise_variant): a clean
/// row followed by one row per noise level.
EvalReport run_noise(const GridConfig& config, const ExperimentData& data, std::ostream* log = nullptr);

/// Report CSV: method,d_prime,B,variant,noise_db,mean,median,trimean,best25,worst25,n
void write_report_csv(std::ostream& os, const EvalReport& report);
/// Raw sidecar: method,d_prime,B,variant,noise_db,scene,illuminant,estimate,error
void write_raw_errors_csv(std::ostream& os, const EvalReport& report);
/// Writes <stem>.csv and <stem>_raw.csv into dir.
void write_report(const std::filesystem::path& dir, const std::string& stem, const EvalReport& report);

}  // namespace rscc
