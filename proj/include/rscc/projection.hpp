#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rscc/illuminants.hpp"
#include "rscc/spectral.hpp"

namespace rscc {

enum class ProjectionKind : std::uint8_t { rgb = 0, rand = 1, pca = 2, ill_pca = 3, nnmf = 4, lda = 5 };

std::string_view to_string(ProjectionKind kind);
/// Accepts rgb, rand, pca, ill_pca (or ill-pca), nnmf, lda; case-insensitive.
ProjectionKind parse_projection_kind(std::string_view name);

/// A fitted spectral reduction d -> d'. `basis` is stored d' x d for every
/// kind (rows are components): S for RGB/RAND, U^T for PCA/Ill-PCA, W^T for
/// LDA and V for NNMF.
struct Projection {
  ProjectionKind kind = ProjectionKind::pca;
  int input_dim = 0;
  int output_dim = 0;
  std::optional<Eigen::VectorXd> mean;
  Eigen::MatrixXd basis;
  std::string metadata = "{}";  // JSON object: seed, training description, ...
};

/// Pixel chromaticities (rows) with optional per-row class labels.
struct TrainingMatrix {
  Eigen::MatrixXd rows;
  std::vector<int> labels;

  int class_count() const;
};

/// z for one input vector; NNMF solves the non-negative least-squares encoding.
Eigen::VectorXd apply(const Projection& proj, const Eigen::VectorXd& c);

Projection fit_rgb(const SensitivityFunctions& sens);

/// Entries i.i.d. uniform on [-1, 1].
Projection fit_rand(int input_dim, int output_dim, std::uint64_t seed);

/// Top-d' eigenvectors of the 1/(N-1) sample covariance.
Projection fit_pca(const TrainingMatrix& x, int output_dim);

/// PCA over the L1-normalised SPDs of `illuminants`.
Projection fit_ill_pca(const IlluminantSet& illuminants, int output_dim);

struct NnmfOptions {
  std::uint64_t seed = 0;
  int max_iter = 400;
  double tol = 1e-5;  // relative loss decrease that stops the iteration
};

struct NnmfResult {
  Projection projection;
  Eigen::MatrixXd coefficients;      // U, N x d'
  std::vector<double> loss_history;  // ||X - UV||_F^2 at init and after every update
};

/// Lee-Seung multiplicative updates for X ~= U V under Frobenius loss.
NnmfResult fit_nnmf_detailed(const TrainingMatrix& x, int output_dim, const NnmfOptions& opts = {});
Projection fit_nnmf(const TrainingMatrix& x, int output_dim, const NnmfOptions& opts = {});

struct LdaOptions {
  // within-class ridge: gamma = shrinkage * trace(S_w) / d
  double shrinkage = 1e-6;
};

struct LdaResult {
  Projection projection;
  Eigen::VectorXd eigenvalues;  // all generalized eigenvalues, descending
};

LdaResult fit_lda_detailed(const TrainingMatrix& x, int output_dim, const LdaOptions& opts = {});
Projection fit_lda(const TrainingMatrix& x, int output_dim, const LdaOptions& opts = {});

/// Scatter matrices used by LDA (unnormalised sums).
struct ScatterMatrices {
  Eigen::MatrixXd within;
  Eigen::MatrixXd between;
};
ScatterMatrices scatter_matrices(const TrainingMatrix& x);

// .proj layout (little-endian):
//   "PROJ1" | u8 kind | u32 d | u32 d' | u8 has_mean | [f64 x d mean]
//   | f64 x (d' * d) basis, row-major | u32 metadata length | metadata UTF-8 JSON
void write_projection(std::ostream& os, const Projection& proj);
void write_projection(const std::filesystem::path& path, const Projection& proj);
Projection read_projection(std::istream& is, const std::string& source = "<stream>");
Projection read_projection(const std::filesystem::path& path);

/// FNV-1a 64 over the serialised bytes; models reference projections by it.
std::uint64_t content_hash(const Projection& proj);

}  // namespace rscc
