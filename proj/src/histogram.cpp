#include "rscc/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rscc {

BinSpec::BinSpec(int b, std::vector<double> l, std::vector<double> h)
    : dims(static_cast<int>(l.size())), bins(b), lo(std::move(l)), hi(std::move(h)) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin per dimension");
  if (dims < 1 || hi.size() != lo.size()) throw std::invalid_argument("histogram bounds have inconsistent dimensions");
  for (int j = 0; j < dims; ++j) {
    if (!(lo[j] < hi[j])) throw std::invalid_argument("histogram bound lo >= hi in dimension " + std::to_string(j));
  }
  double cells = 1.0;
  for (int j = 0; j < dims; ++j) cells *= bins;
  if (cells > 9.0e18) throw std::invalid_argument("histogram has too many cells for a 64-bit index");
}

std::uint64_t BinSpec::cell_count() const {
  std::uint64_t n = 1;
  for (int j = 0; j < dims; ++j) n *= static_cast<std::uint64_t>(bins);
  return n;
}

BoundsAccumulator::BoundsAccumulator(int dims)
    : min_(dims, std::numeric_limits<double>::infinity()), max_(dims, -std::numeric_limits<double>::infinity()) {}

void BoundsAccumulator::add(const Eigen::VectorXd& z) {
  if (z.size() != dims()) throw std::invalid_argument("bounds: sample dimension mismatch");
  for (int j = 0; j < dims(); ++j) {
    min_[j] = std::min(min_[j], z[j]);
    max_[j] = std::max(max_[j], z[j]);
  }
  ++samples_;
}

void BoundsAccumulator::merge(const BoundsAccumulator& other) {
  if (other.dims() != dims()) throw std::invalid_argument("bounds: dimension mismatch in merge");
  for (int j = 0; j < dims(); ++j) {
    min_[j] = std::min(min_[j], other.min_[j]);
    max_[j] = std::max(max_[j], other.max_[j]);
  }
  samples_ += other.samples_;
}

std::pair<std::vector<double>, std::vector<double>> BoundsAccumulator::bounds() const {
  if (samples_ == 0) throw std::invalid_argument("cannot calibrate histogram bounds from zero samples");
  std::vector<double> lo(min_), hi(max_);
  for (int j = 0; j < dims(); ++j) {
    const double width = hi[j] - lo[j];
    if (width <= 0.0) {
      lo[j] -= 5e-7;
      hi[j] += 5e-7;
    } else {
      lo[j] -= 1e-3 * width;
      hi[j] += 1e-3 * width;
    }
  }
  return {lo, hi};
}

std::pair<std::vector<double>, std::vector<double>> calibrate_bounds(const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) throw std::invalid_argument("cannot calibrate histogram bounds from zero samples");
  BoundsAccumulator acc(static_cast<int>(samples.front().size()));
  for (const auto& z : samples) acc.add(z);
  return acc.bounds();
}

std::uint64_t bin_index(const Eigen::VectorXd& z, const BinSpec& spec) {
  if (z.size() != spec.dims) throw std::invalid_argument("bin_index: dimension mismatch");
  std::uint64_t flat = 0;
  for (int j = 0; j < spec.dims; ++j) {
    const double t = spec.bins * (z[j] - spec.lo[j]) / (spec.hi[j] - spec.lo[j]);
    long long idx = 0;
    if (t >= spec.bins) {
      idx = spec.bins - 1;
    } else if (t > 0.0) {
      idx = std::min<long long>(static_cast<long long>(std::floor(t)), spec.bins - 1);
    }
    flat = flat * static_cast<std::uint64_t>(spec.bins) + static_cast<std::uint64_t>(idx);
  }
  return flat;
}

HistogramGrid::HistogramGrid(BinSpec spec, std::uint64_t dense_limit) : spec_(std::move(spec)) {
  if (spec_.cell_count() <= dense_limit) dense_.assign(spec_.cell_count(), 0);
}

void HistogramGrid::add_index(std::uint64_t cell, std::uint64_t n) {
  if (cell >= spec_.cell_count()) throw std::out_of_range("histogram cell index out of range");
  if (is_dense()) {
    dense_[cell] += n;
  } else {
    sparse_[cell] += n;
  }
  total_ += n;
}

void HistogramGrid::merge(const HistogramGrid& other) {
  if (!(other.spec_ == spec_)) throw std::invalid_argument("cannot merge histograms with different binning");
  for (auto [cell, n] : other.occupied()) add_index(cell, n);
}

std::uint64_t HistogramGrid::count(std::uint64_t cell) const {
  if (is_dense()) return cell < dense_.size() ? dense_[cell] : 0;
  auto it = sparse_.find(cell);
  return it == sparse_.end() ? 0 : it->second;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> HistogramGrid::occupied() const {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  if (is_dense()) {
    for (std::uint64_t i = 0; i < dense_.size(); ++i) {
      if (dense_[i] != 0) out.emplace_back(i, dense_[i]);
    }
  } else {
    out.assign(sparse_.begin(), sparse_.end());
    std::sort(out.begin(), out.end());
  }
  return out;
}

}  // namespace rscc
