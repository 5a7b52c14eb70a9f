#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rscc/spectral.hpp"

namespace rscc {

struct Illuminant {
  std::string name;
  Spectrum spd;
};

enum class IlluminantRole { full, projection };

class IlluminantSet {
 public:
  IlluminantSet() = default;
  IlluminantSet(std::vector<Illuminant> members, IlluminantRole role);

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const Illuminant& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Illuminant>& members() const { return members_; }
  IlluminantRole role() const { return role_; }
  const SpectralAxis& axis() const;

  /// Index of the member called `name`, or -1.
  int find(const std::string& name) const;
  const Illuminant& at(const std::string& name) const;

  /// Members named in `names`, in that order; unknown names throw.
  IlluminantSet subset(const std::vector<std::string>& names, IlluminantRole role) const;

  std::vector<std::string> names() const;

 private:
  std::vector<Illuminant> members_;
  IlluminantRole role_ = IlluminantRole::full;
};

/// Manifest: one `relative/path.csv name` per line; '#' starts a comment.
/// Paths resolve against the manifest's directory.
IlluminantSet load_illuminants(const std::filesystem::path& manifest);

/// Reads a projection-set file (one illuminant name per line).
std::vector<std::string> read_name_list(const std::filesystem::path& path);
void write_name_list(const std::filesystem::path& path, const std::vector<std::string>& names);

struct KMeansResult {
  std::vector<int> assignments;
  std::vector<Eigen::VectorXd> centroids;
  std::vector<double> wcss_history;  // after each Lloyd iteration
  int iterations = 0;
  bool converged = false;

  double wcss() const { return wcss_history.empty() ? 0.0 : wcss_history.back(); }
};

/// Lloyd's algorithm with k-means++ seeding. Ties in assignment go to the
/// lowest centroid index; an emptied cluster keeps its previous centroid.
KMeansResult kmeans(const std::vector<Eigen::VectorXd>& points, int k, std::uint64_t seed, int max_iter = 300);

/// Clusters the L1-normalised SPDs and returns, per cluster (in cluster
/// order), the member closest to the centroid. Ties go to the lower manifest
/// index.
IlluminantSet select_projection_set(const IlluminantSet& full, int k, std::uint64_t seed, int max_iter = 300);

/// L1-normalised SPDs of the set as rows of an N x d matrix.
Eigen::MatrixXd chromaticity_matrix(const IlluminantSet& set);

}  // namespace rscc
