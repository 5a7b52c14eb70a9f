#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rscc {

/// Uniform binning of a d'-dimensional box into B^d' cells.
struct BinSpec {
  int dims = 1;
  int bins = 1;
  std::vector<double> lo;
  std::vector<double> hi;

  BinSpec() = default;
  BinSpec(int bins, std::vector<double> lo, std::vector<double> hi);

  std::uint64_t cell_count() const;

  friend bool operator==(const BinSpec&, const BinSpec&) = default;
};

/// Running per-dimension min/max over projected training samples.
class BoundsAccumulator {
 public:
  explicit BoundsAccumulator(int dims);
  void add(const Eigen::VectorXd& z);
  void merge(const BoundsAccumulator& other);
  std::size_t samples() const { return samples_; }
  int dims() const { return static_cast<int>(min_.size()); }

  /// Min/max widened by 0.1% of the range; a constant dimension becomes
  /// [c - 5e-7, c + 5e-7]. Throws when nothing was added.
  std::pair<std::vector<double>, std::vector<double>> bounds() const;

 private:
  std::vector<double> min_;
  std::vector<double> max_;
  std::size_t samples_ = 0;
};

/// Convenience over BoundsAccumulator for an explicit sample list.
std::pair<std::vector<double>, std::vector<double>> calibrate_bounds(const std::vector<Eigen::VectorXd>& samples);

/// Row-major flat cell index; each coordinate is floor(B (z - lo) / (hi - lo))
/// clamped to [0, B - 1].
std::uint64_t bin_index(const Eigen::VectorXd& z, const BinSpec& spec);

/// Integer cell counts, dense for small grids and hashed otherwise.
class HistogramGrid {
 public:
  static constexpr std::uint64_t kDefaultDenseLimit = 1ULL << 16;

  explicit HistogramGrid(BinSpec spec, std::uint64_t dense_limit = kDefaultDenseLimit);

  const BinSpec& spec() const { return spec_; }
  bool is_dense() const { return !dense_.empty(); }

  void add(const Eigen::VectorXd& z) { add_index(bin_index(z, spec_)); }
  void add_index(std::uint64_t cell, std::uint64_t n = 1);
  void merge(const HistogramGrid& other);

  std::uint64_t count(std::uint64_t cell) const;
  std::uint64_t total() const { return total_; }

  /// Occupied cells sorted by index.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> occupied() const;

 private:
  BinSpec spec_;
  std::vector<std::uint64_t> dense_;
  std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
  std::uint64_t total_ = 0;
};

}  // namespace rscc
