#include "rscc/illuminants.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rscc/random.hpp"
#include "rscc/spectral_io.hpp"

namespace rscc {

IlluminantSet::IlluminantSet(std::vector<Illuminant> members, IlluminantRole role)
    : members_(std::move(members)), role_(role) {
  std::set<std::string> seen;
  for (const auto& m : members_) {
    if (!seen.insert(m.name).second) throw std::invalid_argument("duplicate illuminant name: " + m.name);
    if ((m.spd.values.array() < 0.0).any()) throw std::invalid_argument("illuminant " + m.name + " has negative values");
    if (m.spd.values.maxCoeff() <= 0.0) throw std::invalid_argument("illuminant " + m.name + " is all zero");
    require_same_axis(members_.front().spd.axis, m.spd.axis, ("illuminant " + m.name).c_str());
  }
}

const SpectralAxis& IlluminantSet::axis() const {
  if (members_.empty()) throw std::logic_error("empty illuminant set has no axis");
  return members_.front().spd.axis;
}

int IlluminantSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const Illuminant& IlluminantSet::at(const std::string& name) const {
  const int i = find(name);
  if (i < 0) throw std::invalid_argument("unknown illuminant: " + name);
  return members_[i];
}

IlluminantSet IlluminantSet::subset(const std::vector<std::string>& names, IlluminantRole role) const {
  std::vector<Illuminant> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(at(n));
  return IlluminantSet(std::move(out), role);
}

std::vector<std::string> IlluminantSet::names() const {
  std::vector<std::string> out;
  for (const auto& m : members_) out.push_back(m.name);
  return out;
}

IlluminantSet load_illuminants(const std::filesystem::path& manifest) {
  std::ifstream is(manifest);
  if (!is) throw std::runtime_error("cannot open illuminant manifest " + manifest.string());
  const auto base = manifest.parent_path();
  std::vector<Illuminant> members;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string rel, name, extra;
    if (!(ss >> rel)) continue;
    if (!(ss >> name) || (ss >> extra)) {
      throw std::runtime_error(manifest.string() + " line " + std::to_string(lineno) + ": expected `path name`");
    }
    members.push_back({name, read_spectrum_csv(base / rel)});
  }
  if (members.empty()) throw std::runtime_error(manifest.string() + ": no illuminants listed");
  return IlluminantSet(std::move(members), IlluminantRole::full);
}

std::vector<std::string> read_name_list(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(is, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string name;
    if (ss >> name) names.push_back(name);
  }
  return names;
}

void write_name_list(const std::filesystem::path& path, const std::vector<std::string>& names) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& n : names) os << n << '\n';
}

namespace {

double sq_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).squaredNorm(); }

int nearest(const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq_dist(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans(const std::vector<Eigen::VectorXd>& points, int k, std::uint64_t seed, int max_iter) {
  if (points.empty()) throw std::invalid_argument("kmeans: empty input");
  if (k <= 0) throw std::invalid_argument("kmeans: k must be positive");
  const std::size_t n = points.size();
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("kmeans: k exceeds number of points");
  for (const auto& p : points) {
    if (p.size() != points.front().size()) throw std::invalid_argument("kmeans: points differ in dimension");
  }

  // k-means++ seeding
  Rng rng(seed);
  std::vector<Eigen::VectorXd> centroids;
  std::vector<bool> chosen(n, false);
  std::size_t first = rng.below(n);
  centroids.push_back(points[first]);
  chosen[first] = true;
  std::vector<double> d2(n);
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, sq_dist(points[i], c));
      d2[i] = chosen[i] ? 0.0 : best;
      total += d2[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (!chosen[i]) pick = i;
      }
    }
    centroids.push_back(points[pick]);
    chosen[pick] = true;
  }

  KMeansResult res;
  res.assignments.assign(n, -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int a = nearest(points[i], centroids);
      changed |= a != res.assignments[i];
      res.assignments[i] = a;
    }
    std::vector<Eigen::VectorXd> sums(k, Eigen::VectorXd::Zero(points.front().size()));
    std::vector<int> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[res.assignments[i]] += points[i];
      ++counts[res.assignments[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centroids[c] = sums[c] / counts[c];
    }
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) wcss += sq_dist(points[i], centroids[res.assignments[i]]);
    res.wcss_history.push_back(wcss);
    res.iterations = it + 1;
    if (!changed && it > 0) {
      res.converged = true;
      break;
    }
  }
  res.centroids = std::move(centroids);
  return res;
}

Eigen::MatrixXd chromaticity_matrix(const IlluminantSet& set) {
  const int d = set.axis().count;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(set.size()), d);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& v = set[i].spd.values;
    auto c = l1_chromaticity(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
    if (!c) throw std::invalid_argument("illuminant " + set[i].name + " has zero norm");
    x.row(static_cast<Eigen::Index>(i)) = c->transpose();
  }
  return x;
}

IlluminantSet select_projection_set(const IlluminantSet& full, int k, std::uint64_t seed, int max_iter) {
  const Eigen::MatrixXd x = chromaticity_matrix(full);
  std::vector<Eigen::VectorXd> points;
  for (Eigen::Index i = 0; i < x.rows(); ++i) points.emplace_back(x.row(i).transpose());
  const auto km = kmeans(points, k, seed, max_iter);

  std::vector<bool> taken(points.size(), false);
  std::vector<std::string> names;
  for (int c = 0; c < k; ++c) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (km.assignments[i] != c) continue;
      const double d = sq_dist(points[i], km.centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) {
      // empty cluster: nearest member not already representing another cluster
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (taken[i]) continue;
        const double d = sq_dist(points[i], km.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(i);
        }
      }
    }
    taken[best] = true;
    names.push_back(full[best].name);
  }
  return full.subset(names, IlluminantRole::projection);
}

}  // namespace rscc
