#include "rscc/projection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "binary_io.hpp"
#include "rscc/linalg.hpp"
#include "rscc/random.hpp"

namespace rscc {

namespace {

constexpr std::string_view kProjMagic = "PROJ1";

std::string metadata_json(nlohmann::json j) { return j.dump(); }

void require_positive_dim(int output_dim) {
  if (output_dim < 1) throw std::invalid_argument("output dimension must be >= 1");
}

Projection pca_from_rows(const Eigen::MatrixXd& rows, int output_dim, ProjectionKind kind, nlohmann::json meta) {
  require_positive_dim(output_dim);
  const auto n = rows.rows();
  const auto d = rows.cols();
  if (output_dim > d) throw std::invalid_argument("PCA: output dimension exceeds input dimension");
  if (n < std::max<Eigen::Index>(2, output_dim)) {
    throw std::invalid_argument("PCA: need at least max(2, d') samples, got " + std::to_string(n));
  }
  const Eigen::VectorXd mu = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - mu.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  auto eig = symmetric_eig(cov);
  // relative to the raw second moment so that round-off in a constant
  // data set does not pass for variance
  const double second_moment = (rows.transpose() * rows).trace() / static_cast<double>(n);
  const double floor = 1e-12 * std::max(second_moment, std::numeric_limits<double>::min());
  int positive = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) positive += eig.values[i] > floor;
  if (positive < output_dim) {
    throw std::invalid_argument("PCA: covariance has " + std::to_string(positive) +
                                " positive eigenvalues, fewer than d' = " + std::to_string(output_dim));
  }
  Eigen::MatrixXd u = eig.vectors.leftCols(output_dim);
  canonicalize_signs(u);
  Projection p;
  p.kind = kind;
  p.input_dim = static_cast<int>(d);
  p.output_dim = output_dim;
  p.mean = mu;
  p.basis = u.transpose();
  meta["samples"] = n;
  std::vector<double> explained(eig.values.data(), eig.values.data() + output_dim);
  meta["eigenvalues"] = explained;
  p.metadata = metadata_json(std::move(meta));
  return p;
}

}  // namespace

std::string_view to_string(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::rgb: return "rgb";
    case ProjectionKind::rand: return "rand";
    case ProjectionKind::pca: return "pca";
    case ProjectionKind::ill_pca: return "ill_pca";
    case ProjectionKind::nnmf: return "nnmf";
    case ProjectionKind::lda: return "lda";
  }
  return "?";
}

ProjectionKind parse_projection_kind(std::string_view name) {
  std::string s(name);
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "rgb") return ProjectionKind::rgb;
  if (s == "rand") return ProjectionKind::rand;
  if (s == "pca") return ProjectionKind::pca;
  if (s == "ill_pca" || s == "illpca") return ProjectionKind::ill_pca;
  if (s == "nnmf" || s == "nmf") return ProjectionKind::nnmf;
  if (s == "lda") return ProjectionKind::lda;
  throw std::invalid_argument("unknown projection method: " + std::string(name));
}

int TrainingMatrix::class_count() const {
  std::vector<int> l = labels;
  std::sort(l.begin(), l.end());
  return static_cast<int>(std::unique(l.begin(), l.end()) - l.begin());
}

Eigen::VectorXd apply(const Projection& proj, const Eigen::VectorXd& c) {
  if (c.size() != proj.input_dim) {
    throw std::invalid_argument("projection expects " + std::to_string(proj.input_dim) + " inputs, got " +
                                std::to_string(c.size()));
  }
  switch (proj.kind) {
    case ProjectionKind::pca:
    case ProjectionKind::ill_pca:
      return proj.basis * (c - *proj.mean);
    case ProjectionKind::nnmf:
      return nnls(proj.basis, c);
    case ProjectionKind::rgb:
    case ProjectionKind::rand:
    case ProjectionKind::lda:
      return proj.basis * c;
  }
  throw std::logic_error("unhandled projection kind");
}

Projection fit_rgb(const SensitivityFunctions& sens) {
  Projection p;
  p.kind = ProjectionKind::rgb;
  p.input_dim = sens.axis.count;
  p.output_dim = 3;
  p.basis = sens.rows;
  p.metadata = metadata_json({{"kind", "rgb"}, {"camera", sens.camera_name}});
  return p;
}

Projection fit_rand(int input_dim, int output_dim, std::uint64_t seed) {
  require_positive_dim(output_dim);
  if (input_dim < 1) throw std::invalid_argument("RAND: input dimension must be >= 1");
  Rng rng(seed);
  Projection p;
  p.kind = ProjectionKind::rand;
  p.input_dim = input_dim;
  p.output_dim = output_dim;
  p.basis.resize(output_dim, input_dim);
  for (int r = 0; r < output_dim; ++r) {
    for (int c = 0; c < input_dim; ++c) p.basis(r, c) = rng.uniform(-1.0, 1.0);
  }
  p.metadata = metadata_json({{"kind", "rand"}, {"seed", seed}});
  return p;
}

Projection fit_pca(const TrainingMatrix& x, int output_dim) {
  return pca_from_rows(x.rows, output_dim, ProjectionKind::pca, {{"kind", "pca"}});
}

Projection fit_ill_pca(const IlluminantSet& illuminants, int output_dim) {
  if (illuminants.size() < static_cast<std::size_t>(output_dim)) {
    throw std::invalid_argument("Ill-PCA: fewer illuminants than output dimensions");
  }
  return pca_from_rows(chromaticity_matrix(illuminants), output_dim, ProjectionKind::ill_pca,
                       {{"kind", "ill_pca"}, {"illuminants", illuminants.names()}});
}

NnmfResult fit_nnmf_detailed(const TrainingMatrix& x, int output_dim, const NnmfOptions& opts) {
  require_positive_dim(output_dim);
  const Eigen::MatrixXd& X = x.rows;
  if (X.size() == 0) throw std::invalid_argument("NNMF: empty training matrix");
  if ((X.array() < 0.0).any()) throw std::invalid_argument("NNMF: training matrix has negative entries");
  const double mean = X.mean();
  if (!(mean > 0.0)) throw std::invalid_argument("NNMF: training matrix is all zero");

  const auto n = X.rows();
  const auto d = X.cols();
  Rng rng(opts.seed);
  const double scale = std::sqrt(mean / output_dim);
  Eigen::MatrixXd u(n, output_dim);
  Eigen::MatrixXd v(output_dim, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < output_dim; ++j) u(i, j) = scale * rng.uniform();
  for (int i = 0; i < output_dim; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i, j) = scale * rng.uniform();

  constexpr double tiny = std::numeric_limits<double>::min();
  auto loss = [&] { return (X - u * v).squaredNorm(); };

  NnmfResult res;
  res.loss_history.push_back(loss());
  int iterations = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const Eigen::MatrixXd ut_x = u.transpose() * X;
    const Eigen::MatrixXd ut_u_v = (u.transpose() * u) * v;
    v = v.cwiseProduct(ut_x.cwiseQuotient(ut_u_v.cwiseMax(tiny)));
    const Eigen::MatrixXd x_vt = X * v.transpose();
    const Eigen::MatrixXd u_v_vt = u * (v * v.transpose());
    u = u.cwiseProduct(x_vt.cwiseQuotient(u_v_vt.cwiseMax(tiny)));
    const double prev = res.loss_history.back();
    const double cur = loss();
    res.loss_history.push_back(cur);
    iterations = it + 1;
    if (cur == 0.0 || (prev > 0.0 && (prev - cur) / prev < opts.tol)) break;
  }

  Projection p;
  p.kind = ProjectionKind::nnmf;
  p.input_dim = static_cast<int>(d);
  p.output_dim = output_dim;
  p.basis = std::move(v);
  p.metadata = metadata_json({{"kind", "nnmf"},
                              {"seed", opts.seed},
                              {"samples", n},
                              {"iterations", iterations},
                              {"final_loss", res.loss_history.back()}});
  res.projection = std::move(p);
  res.coefficients = std::move(u);
  return res;
}

Projection fit_nnmf(const TrainingMatrix& x, int output_dim, const NnmfOptions& opts) {
  return fit_nnmf_detailed(x, output_dim, opts).projection;
}

ScatterMatrices scatter_matrices(const TrainingMatrix& x) {
  if (x.labels.size() != static_cast<std::size_t>(x.rows.rows())) {
    throw std::invalid_argument("LDA: every training row needs a label");
  }
  const auto d = x.rows.cols();
  std::map<int, std::pair<Eigen::VectorXd, int>> stats;
  for (Eigen::Index i = 0; i < x.rows.rows(); ++i) {
    auto [it, inserted] = stats.try_emplace(x.labels[i], Eigen::VectorXd::Zero(d), 0);
    it->second.first += x.rows.row(i).transpose();
    ++it->second.second;
  }
  const Eigen::VectorXd mu = x.rows.colwise().mean().transpose();
  std::map<int, Eigen::VectorXd> class_means;
  ScatterMatrices s{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
  for (auto& [label, st] : stats) {
    Eigen::VectorXd m = st.first / st.second;
    const Eigen::VectorXd diff = m - mu;
    s.between.noalias() += st.second * diff * diff.transpose();
    class_means.emplace(label, std::move(m));
  }
  Eigen::MatrixXd centered(x.rows.rows(), d);
  for (Eigen::Index i = 0; i < x.rows.rows(); ++i) {
    centered.row(i) = x.rows.row(i) - class_means.at(x.labels[i]).transpose();
  }
  s.within = centered.transpose() * centered;
  return s;
}

LdaResult fit_lda_detailed(const TrainingMatrix& x, int output_dim, const LdaOptions& opts) {
  require_positive_dim(output_dim);
  const int classes = x.class_count();
  if (classes < 2) throw std::invalid_argument("LDA: need at least 2 classes");
  if (output_dim > classes - 1) {
    throw std::invalid_argument("LDA: d' = " + std::to_string(output_dim) + " exceeds classes - 1 = " +
                                std::to_string(classes - 1));
  }
  const auto d = x.rows.cols();
  auto s = scatter_matrices(x);
  const double gamma = opts.shrinkage * s.within.trace() / static_cast<double>(d);
  Eigen::MatrixXd reg = s.within;
  reg.diagonal().array() += gamma;
  auto eig = generalized_symmetric_eig(s.between, reg);

  Eigen::MatrixXd w = eig.vectors.leftCols(output_dim);
  for (Eigen::Index j = 0; j < w.cols(); ++j) w.col(j).normalize();
  canonicalize_signs(w);

  LdaResult res;
  res.eigenvalues = eig.values;
  Projection& p = res.projection;
  p.kind = ProjectionKind::lda;
  p.input_dim = static_cast<int>(d);
  p.output_dim = output_dim;
  p.basis = w.transpose();
  std::vector<double> ev(eig.values.data(), eig.values.data() + output_dim);
  p.metadata = metadata_json({{"kind", "lda"},
                              {"classes", classes},
                              {"samples", x.rows.rows()},
                              {"gamma", gamma},
                              {"eigenvalues", ev}});
  return res;
}

Projection fit_lda(const TrainingMatrix& x, int output_dim, const LdaOptions& opts) {
  return fit_lda_detailed(x, output_dim, opts).projection;
}

void write_projection(std::ostream& os, const Projection& proj) {
  if (proj.basis.rows() != proj.output_dim || proj.basis.cols() != proj.input_dim) {
    throw std::invalid_argument("projection basis shape does not match its dimensions");
  }
  detail::ByteWriter w(os);
  w.raw(kProjMagic);
  w.u8(static_cast<std::uint8_t>(proj.kind));
  w.u32(static_cast<std::uint32_t>(proj.input_dim));
  w.u32(static_cast<std::uint32_t>(proj.output_dim));
  w.u8(proj.mean ? 1 : 0);
  if (proj.mean) {
    for (Eigen::Index i = 0; i < proj.mean->size(); ++i) w.f64((*proj.mean)[i]);
  }
  for (int r = 0; r < proj.output_dim; ++r)
    for (int c = 0; c < proj.input_dim; ++c) w.f64(proj.basis(r, c));
  w.u32(static_cast<std::uint32_t>(proj.metadata.size()));
  w.raw(proj.metadata);
}

void write_projection(const std::filesystem::path& path, const Projection& proj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_projection(os, proj);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Projection read_projection(std::istream& is, const std::string& source) {
  detail::ByteReader r(is, source);
  r.expect_magic(kProjMagic);
  Projection p;
  const auto kind = r.u8();
  if (kind > static_cast<std::uint8_t>(ProjectionKind::lda)) r.fail("unknown projection kind byte");
  p.kind = static_cast<ProjectionKind>(kind);
  p.input_dim = static_cast<int>(r.u32());
  p.output_dim = static_cast<int>(r.u32());
  if (p.input_dim < 1 || p.output_dim < 1 || p.input_dim > 4096 || p.output_dim > 4096) r.fail("bad dimensions");
  const auto has_mean = r.u8();
  if (has_mean > 1) r.fail("bad mean flag");
  if (has_mean) {
    Eigen::VectorXd mu(p.input_dim);
    for (int i = 0; i < p.input_dim; ++i) mu[i] = r.f64();
    p.mean = std::move(mu);
  }
  p.basis.resize(p.output_dim, p.input_dim);
  for (int row = 0; row < p.output_dim; ++row)
    for (int c = 0; c < p.input_dim; ++c) p.basis(row, c) = r.f64();
  const auto len = r.u32();
  p.metadata = r.raw(len);
  r.expect_eof();
  if ((p.kind == ProjectionKind::pca || p.kind == ProjectionKind::ill_pca) && !p.mean) {
    r.fail("PCA projection without mean");
  }
  return p;
}

Projection read_projection(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_projection(is, path.string());
}

std::uint64_t content_hash(const Projection& proj) {
  std::ostringstream os;
  write_projection(os, proj);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rscc
