#include "rscc/cbc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "binary_io.hpp"
#include "rscc/parallel.hpp"

namespace rscc {

namespace {

constexpr std::string_view kModelMagic = "CBCM1";

void require_matching_projection(const CorrelationModel& model, const Projection& proj) {
  if (content_hash(proj) != model.projection_hash) {
    throw std::invalid_argument("projection does not match the one the correlation model was built with");
  }
}

}  // namespace

std::string_view to_string(ScoreMode mode) { return mode == ScoreMode::dot ? "dot" : "log"; }

ScoreMode parse_score_mode(std::string_view name) {
  if (name == "log" || name == "log_correlation") return ScoreMode::log_correlation;
  if (name == "dot") return ScoreMode::dot;
  throw std::invalid_argument("unknown score mode: " + std::string(name));
}

std::optional<Eigen::VectorXd> pixel_feature(const Projection& proj, std::span<const double> radiance) {
  if (static_cast<int>(radiance.size()) != proj.input_dim) {
    throw std::invalid_argument("pixel has " + std::to_string(radiance.size()) + " bands, projection expects " +
                                std::to_string(proj.input_dim));
  }
  if (proj.kind == ProjectionKind::rgb) {
    const Eigen::Map<const Eigen::VectorXd> p(radiance.data(), static_cast<Eigen::Index>(radiance.size()));
    const Eigen::VectorXd rgb = proj.basis * p;
    const double norm = rgb.cwiseAbs().sum();
    if (!(norm >= kZeroNormEpsilon)) return std::nullopt;
    return Eigen::VectorXd(rgb / norm);
  }
  auto c = l1_chromaticity(radiance);
  if (!c) return std::nullopt;
  return apply(proj, *c);
}

std::vector<std::string> CorrelationModel::candidate_names() const {
  std::vector<std::string> out;
  for (const auto& g : grids) out.push_back(g.name);
  return out;
}

double CorrelationModel::background() const {
  return smoothing / (1.0 + smoothing * static_cast<double>(spec.cell_count()));
}

double CorrelationModel::probability(std::size_t candidate, std::uint64_t cell) const {
  const auto& g = grids.at(candidate);
  auto it = std::lower_bound(g.cells.begin(), g.cells.end(), cell);
  if (it != g.cells.end() && *it == cell) return g.probability[static_cast<std::size_t>(it - g.cells.begin())];
  return background();
}

double CorrelationModel::total_probability(std::size_t candidate) const {
  const auto& g = grids.at(candidate);
  double sum = 0.0;
  for (double p : g.probability) sum += p;
  return sum + static_cast<double>(spec.cell_count() - g.cells.size()) * background();
}

HistogramGrid accumulate_counts(const std::vector<SpectralImage>& reflectances, const Eigen::VectorXd& spd,
                                const Projection& proj, const BinSpec& spec, std::uint64_t dense_limit) {
  HistogramGrid grid(spec, dense_limit);
  for (const auto& img : reflectances) {
    if (img.bands() != spd.size()) throw std::invalid_argument("training image and illuminant differ in band count");
    for_each_relit_feature(img, spd, proj, [&](const Eigen::VectorXd& z) { grid.add(z); });
  }
  return grid;
}

BinSpec calibrate_model_bins(const std::vector<SpectralImage>& reflectances, const IlluminantSet& candidates,
                             const Projection& proj, int bins) {
  BoundsAccumulator acc(proj.output_dim);
  for (const auto& ill : candidates.members()) {
    for (const auto& img : reflectances) {
      require_same_axis(img.axis(), ill.spd.axis, "build_model");
      for_each_relit_feature(img, ill.spd.values, proj, [&](const Eigen::VectorXd& z) { acc.add(z); });
    }
  }
  auto [lo, hi] = acc.bounds();
  return BinSpec(bins, std::move(lo), std::move(hi));
}

CorrelationModel build_model(const std::vector<SpectralImage>& reflectances, const IlluminantSet& candidates,
                             const Projection& proj, const BuildOptions& opts) {
  if (candidates.empty()) throw std::invalid_argument("build_model: no candidate illuminants");
  if (reflectances.empty()) throw std::invalid_argument("build_model: no training images");
  if (!(opts.smoothing > 0.0)) throw std::invalid_argument("build_model: smoothing must be positive");

  CorrelationModel model;
  model.spec = calibrate_model_bins(reflectances, candidates, proj, opts.bins);
  model.smoothing = opts.smoothing;
  model.projection_hash = content_hash(proj);
  model.grids.resize(candidates.size());
  const double k = static_cast<double>(model.spec.cell_count());

  parallel_for(candidates.size(), opts.threads, [&](std::size_t c) {
    const auto& ill = candidates[c];
    auto counts = accumulate_counts(reflectances, ill.spd.values, proj, model.spec, opts.dense_limit);
    if (counts.total() == 0) throw std::runtime_error("build_model: candidate " + ill.name + " has an empty histogram");
    CandidateGrid g;
    g.name = ill.name;
    const double n = static_cast<double>(counts.total());
    for (auto [cell, cnt] : counts.occupied()) {
      g.cells.push_back(cell);
      g.probability.push_back((static_cast<double>(cnt) / n + opts.smoothing) / (1.0 + opts.smoothing * k));
    }
    model.grids[c] = std::move(g);
  });
  return model;
}

HistogramGrid test_histogram(const CorrelationModel& model, const Projection& proj, const SpectralImage& radiance) {
  HistogramGrid grid(model.spec, 0);
  for (int p = 0; p < radiance.pixel_count(); ++p) {
    if (!radiance.valid(p)) continue;
    if (auto z = pixel_feature(proj, radiance.pixel(p))) grid.add(*z);
  }
  return grid;
}

std::vector<double> score(const CorrelationModel& model, const Projection& proj, const SpectralImage& radiance,
                          ScoreMode mode) {
  require_matching_projection(model, proj);
  const auto hist = test_histogram(model, proj, radiance);
  if (hist.total() == 0) throw std::invalid_argument("score: test image has no valid non-zero pixels");
  const auto cells = hist.occupied();
  const double n = static_cast<double>(hist.total());
  std::vector<double> scores(model.candidate_count(), 0.0);
  for (std::size_t c = 0; c < model.candidate_count(); ++c) {
    double s = 0.0;
    for (auto [cell, cnt] : cells) {
      const double h = static_cast<double>(cnt) / n;
      const double p = model.probability(c, cell);
      s += mode == ScoreMode::log_correlation ? h * std::log(p) : h * p;
    }
    scores[c] = s;
  }
  return scores;
}

Classification classify(const CorrelationModel& model, const Projection& proj, const SpectralImage& radiance,
                        ScoreMode mode) {
  Classification out;
  out.scores = score(model, proj, radiance, mode);
  for (std::size_t c = 1; c < out.scores.size(); ++c) {
    if (out.scores[c] > out.scores[out.index]) out.index = c;
  }
  out.name = model.grids[out.index].name;
  return out;
}

void write_model(std::ostream& os, const CorrelationModel& model) {
  detail::ByteWriter w(os);
  w.raw(kModelMagic);
  w.u32(static_cast<std::uint32_t>(model.spec.dims));
  w.u32(static_cast<std::uint32_t>(model.spec.bins));
  w.u32(static_cast<std::uint32_t>(model.grids.size()));
  for (int j = 0; j < model.spec.dims; ++j) {
    w.f64(model.spec.lo[j]);
    w.f64(model.spec.hi[j]);
  }
  w.f64(model.smoothing);
  w.u64(model.projection_hash);
  for (const auto& g : model.grids) {
    w.u32(static_cast<std::uint32_t>(g.name.size()));
    w.raw(g.name);
    w.u64(g.cells.size());
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
      w.u64(g.cells[i]);
      w.f64(g.probability[i]);
    }
  }
}

void write_model(const std::filesystem::path& path, const CorrelationModel& model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_model(os, model);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

CorrelationModel read_model(std::istream& is, const std::string& source) {
  detail::ByteReader r(is, source);
  r.expect_magic(kModelMagic);
  const auto dims = r.u32();
  const auto bins = r.u32();
  const auto candidates = r.u32();
  if (dims == 0 || dims > 64 || bins == 0 || candidates > 1u << 20) r.fail("implausible model header");
  std::vector<double> lo(dims), hi(dims);
  for (std::uint32_t j = 0; j < dims; ++j) {
    lo[j] = r.f64();
    hi[j] = r.f64();
  }
  CorrelationModel m;
  m.spec = BinSpec(static_cast<int>(bins), std::move(lo), std::move(hi));
  m.smoothing = r.f64();
  m.projection_hash = r.u64();
  const auto cell_count = m.spec.cell_count();
  for (std::uint32_t c = 0; c < candidates; ++c) {
    CandidateGrid g;
    g.name = r.raw(r.u32());
    const auto n = r.u64();
    if (n > cell_count) r.fail("candidate " + g.name + " lists more cells than the grid has");
    g.cells.reserve(n);
    g.probability.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto cell = r.u64();
      if (cell >= cell_count || (!g.cells.empty() && cell <= g.cells.back())) r.fail("cell list not sorted or out of range");
      g.cells.push_back(cell);
      g.probability.push_back(r.f64());
    }
    m.grids.push_back(std::move(g));
  }
  r.expect_eof();
  return m;
}

CorrelationModel read_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_model(is, path.string());
}

}  // namespace rscc
