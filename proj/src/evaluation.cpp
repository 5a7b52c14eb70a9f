#include "rscc/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "rscc/baselines.hpp"
#include "rscc/parallel.hpp"
#include "rscc/random.hpp"
#include "rscc/spectral_io.hpp"

namespace rscc {

double angular_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size()) throw std::invalid_argument("angular_error: dimension mismatch");
  const double na = estimate.norm();
  const double nb = truth.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw std::invalid_argument("angular_error: zero vector");
  if (!std::isfinite(na) || !std::isfinite(nb)) throw std::invalid_argument("angular_error: non-finite input");
  const Eigen::VectorXd a = estimate / na;
  const Eigen::VectorXd b = truth / nb;
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm()) * 180.0 / std::numbers::pi;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ErrorSummary summarize(std::span<const double> errors) {
  if (errors.empty()) throw std::invalid_argument("summarize: empty error list");
  ErrorSummary s;
  s.n = errors.size();
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean = sum / static_cast<double>(s.n);

  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  const double q3 = quantile_sorted(sorted, 0.75);
  s.trimean = (q1 + 2.0 * s.median + q3) / 4.0;

  const std::size_t quarter = (s.n + 3) / 4;
  double best = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < quarter; ++i) {
    best += sorted[i];
    worst += sorted[s.n - 1 - i];
  }
  s.best25 = best / static_cast<double>(quarter);
  s.worst25 = worst / static_cast<double>(quarter);
  return s;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::rgb: return "rgb";
    case Method::rand: return "rand";
    case Method::pca: return "pca";
    case Method::ill_pca: return "ill_pca";
    case Method::nnmf: return "nnmf";
    case Method::lda: return "lda";
    case Method::sgw: return "sgw";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string s(name);
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "sgw") return Method::sgw;
  try {
    return static_cast<Method>(parse_projection_kind(s));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
  }
}

namespace {

bool contains(const std::vector<Method>& v, Method m) { return std::find(v.begin(), v.end(), m) != v.end(); }

}  // namespace

void GridConfig::validate() const {
  if (methods.empty()) throw std::invalid_argument("no methods selected");
  const bool projected = std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::sgw; });
  if (projected && bins.empty()) throw std::invalid_argument("bins list is empty");
  if (projected && dims.empty()) throw std::invalid_argument("dims list is empty");
  for (int b : bins) if (b < 1) throw std::invalid_argument("bins must be >= 1");
  for (int d : dims) if (d < 1) throw std::invalid_argument("dims must be >= 1");
  if (contains(methods, Method::rgb)) {
    if (std::find(dims.begin(), dims.end(), 3) == dims.end()) {
      throw std::invalid_argument("method rgb is fixed to d'=3 but dims does not contain 3");
    }
    if (cameras.empty()) throw std::invalid_argument("method rgb needs at least one camera");
  }
  if (contains(methods, Method::rand) && seeds.empty()) throw std::invalid_argument("method rand needs seeds");
  if (dataset.empty()) throw std::invalid_argument("dataset manifest not set");
  if (illuminants.empty()) throw std::invalid_argument("illuminant manifest not set");
  if (kmeans_k < 1) throw std::invalid_argument("kmeans_k must be >= 1");
  if (fit_downsample < 1 || lda_downsample < 1 || model_downsample < 1) {
    throw std::invalid_argument("downsample factors must be >= 1");
  }
  if (!(smoothing > 0.0)) throw std::invalid_argument("smoothing must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (noise_method == Method::rgb && noise_dprime != 3) {
    throw std::invalid_argument("noise_method rgb is fixed to noise_dprime=3");
  }
  if (noise_dprime < 1 || noise_bins < 1) throw std::invalid_argument("noise_dprime and noise_bins must be >= 1");
  for (double s : noise_levels) if (std::isnan(s)) throw std::invalid_argument("noise level is NaN");
}

ExperimentData load_experiment(const GridConfig& config) {
  config.validate();
  ExperimentData data;
  const auto manifest = read_dataset_manifest(config.dataset);
  if (manifest.train.empty()) throw std::runtime_error("dataset manifest lists no training scenes");
  if (!config.test_on_train) {
    if (manifest.test.empty()) throw std::runtime_error("dataset manifest lists no test scenes");
    std::set<std::filesystem::path> train;
    for (const auto& p : manifest.train) train.insert(p.lexically_normal());
    for (const auto& p : manifest.test) {
      if (train.count(p.lexically_normal())) {
        throw std::runtime_error("scene " + p.string() + " is in both the training and the test split");
      }
    }
  }
  data.train = load_scenes(manifest.train);
  data.test = config.test_on_train ? data.train : load_scenes(manifest.test);

  data.full = load_illuminants(config.illuminants);
  if (config.projection_set) {
    data.projection = data.full.subset(read_name_list(*config.projection_set), IlluminantRole::projection);
  } else {
    data.projection = select_projection_set(data.full, std::min<int>(config.kmeans_k, static_cast<int>(data.full.size())),
                                            config.kmeans_seed);
  }
  for (const auto& cam : config.cameras) data.cameras.push_back(read_sensitivity_csv(cam, cam.stem().string()));
  for (const auto& s : data.train) require_same_axis(s.reflectance.axis(), data.full.axis(), s.name.c_str());
  for (const auto& s : data.test) require_same_axis(s.reflectance.axis(), data.full.axis(), s.name.c_str());
  return data;
}

TrainingMatrix training_matrix(const std::vector<SpectralImage>& reflectances, const IlluminantSet& illuminants) {
  if (illuminants.empty()) throw std::invalid_argument("training_matrix: no illuminants");
  const int d = illuminants.axis().count;
  std::vector<double> flat;
  std::vector<int> labels;
  std::vector<double> buf(static_cast<std::size_t>(d));
  for (std::size_t c = 0; c < illuminants.size(); ++c) {
    const auto& spd = illuminants[c].spd.values;
    for (const auto& img : reflectances) {
      require_same_axis(img.axis(), illuminants.axis(), "training_matrix");
      for (int p = 0; p < img.pixel_count(); ++p) {
        if (!img.valid(p)) continue;
        auto px = img.pixel(p);
        for (int i = 0; i < d; ++i) buf[i] = spd[i] * px[i];
        auto chroma = l1_chromaticity(buf);
        if (!chroma) continue;
        flat.insert(flat.end(), chroma->data(), chroma->data() + d);
        labels.push_back(static_cast<int>(c));
      }
    }
  }
  TrainingMatrix x;
  x.rows = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), static_cast<Eigen::Index>(labels.size()), d);
  x.labels = std::move(labels);
  return x;
}

namespace {

std::vector<SpectralImage> downsampled(const std::vector<Scene>& scenes, int factor) {
  std::vector<SpectralImage> out;
  out.reserve(scenes.size());
  for (const auto& s : scenes) out.push_back(downsample(s.reflectance, factor));
  return out;
}

/// Downsampled images and lazily built training matrices shared by all
/// cells of a sweep.
class FitContext {
 public:
  FitContext(const GridConfig& config, const ExperimentData& data) : config_(config), data_(data) {}

  const TrainingMatrix& pixels() {
    if (!pixels_) pixels_ = training_matrix(downsampled(data_.train, config_.fit_downsample), data_.projection);
    return *pixels_;
  }
  const TrainingMatrix& lda_pixels() {
    if (!lda_pixels_) lda_pixels_ = training_matrix(downsampled(data_.train, config_.lda_downsample), data_.projection);
    return *lda_pixels_;
  }

  Projection fit(Method method, int d_prime, const std::string& variant) {
    switch (method) {
      case Method::rgb: {
        for (const auto& cam : data_.cameras) {
          if (cam.camera_name == variant) return fit_rgb(cam);
        }
        throw std::invalid_argument("unknown camera '" + variant + "'");
      }
      case Method::rand: {
        std::uint64_t seed = 0;
        try {
          std::size_t used = 0;
          seed = std::stoull(variant, &used);
          if (used != variant.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
          throw std::invalid_argument("rand variant must be a seed, got '" + variant + "'");
        }
        return fit_rand(data_.full.axis().count, d_prime, seed);
      }
      case Method::pca: return fit_pca(pixels(), d_prime);
      case Method::ill_pca: return fit_ill_pca(config_.ill_pca_full_set ? data_.full : data_.projection, d_prime);
      case Method::nnmf: {
        NnmfOptions o;
        o.seed = config_.nnmf_seed;
        o.max_iter = config_.nnmf_max_iter;
        o.tol = config_.nnmf_tol;
        return fit_nnmf(pixels(), d_prime, o);
      }
      case Method::lda: return fit_lda(lda_pixels(), d_prime, LdaOptions{config_.lda_shrinkage});
      case Method::sgw: break;
    }
    throw std::logic_error("SGW has no projection");
  }

 private:
  const GridConfig& config_;
  const ExperimentData& data_;
  std::optional<TrainingMatrix> pixels_;
  std::optional<TrainingMatrix> lda_pixels_;
};

std::vector<std::string> variants_of(const GridConfig& config, const ExperimentData& data, Method m) {
  std::vector<std::string> out;
  if (m == Method::rgb) {
    for (const auto& cam : data.cameras) out.push_back(cam.camera_name);
  } else if (m == Method::rand) {
    for (auto s : config.seeds) out.push_back(std::to_string(s));
  } else {
    out.push_back("-");
  }
  return out;
}

std::vector<std::string> scene_names(const std::vector<Scene>& scenes) {
  std::vector<std::string> out;
  for (const auto& s : scenes) out.push_back(s.name);
  return out;
}

Spectrum l1_normalised(const Spectrum& spd) { return Spectrum(spd.axis, spd.values / spd.values.lpNorm<1>()); }

SpectralImage test_radiance(const SpectralImage& reflectance, const IlluminantSet& candidates, std::size_t scene,
                            std::size_t c, std::optional<double> noise_db, std::uint64_t noise_seed) {
  auto radiance = relight(reflectance, l1_normalised(candidates[c].spd));
  if (noise_db) radiance = add_noise(radiance, *noise_db, stream_seed(noise_seed, scene, c));
  return radiance;
}

std::vector<RawError> evaluate_sgw(const std::vector<SpectralImage>& test_images,
                                   const std::vector<std::string>& names, const IlluminantSet& candidates,
                                   std::optional<double> noise_db, std::uint64_t noise_seed, int threads) {
  const std::size_t k = candidates.size();
  std::vector<RawError> out(test_images.size() * k);
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const std::size_t s = i / k, c = i % k;
    const auto est = spectral_gray_world(test_radiance(test_images[s], candidates, s, c, noise_db, noise_seed), candidates);
    out[i] = {names[s], candidates[c].name, est.name,
              angular_error(candidates[est.index].spd.values, candidates[c].spd.values)};
  });
  return out;
}

ErrorSummary summary_of(const std::vector<RawError>& raw) {
  std::vector<double> e;
  e.reserve(raw.size());
  for (const auto& r : raw) e.push_back(r.error);
  return summarize(e);
}

/// Statistic-wise mean over the variant rows (the "mean" row of RGB / RAND).
ErrorSummary average_summaries(const std::vector<ErrorSummary>& parts) {
  ErrorSummary s;
  const double n = static_cast<double>(parts.size());
  for (const auto& p : parts) {
    s.mean += p.mean;
    s.median += p.median;
    s.trimean += p.trimean;
    s.best25 += p.best25;
    s.worst25 += p.worst25;
  }
  s.mean /= n;
  s.median /= n;
  s.trimean /= n;
  s.best25 /= n;
  s.worst25 /= n;
  s.n = parts.front().n;
  return s;
}

void sort_rows(std::vector<ReportRow>& rows) {
  auto key = [](const ReportRow& r) {
    // clean first, then decreasing SNR
    const double noise = r.noise_db ? -*r.noise_db : -std::numeric_limits<double>::infinity();
    const bool aggregated = r.variant == "mean";
    return std::make_tuple(static_cast<int>(r.method), r.d_prime, r.bins, aggregated, r.variant, noise);
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const ReportRow& a, const ReportRow& b) { return key(a) < key(b); });
}

void log_line(std::ostream* log, const std::string& s) {
  if (log) *log << s << std::endl;
}

std::string describe_cell(Method m, int d, int b, const std::string& variant) {
  std::string s(to_string(m));
  s += " d'=" + std::to_string(d) + " B=" + std::to_string(b);
  if (variant != "-") s += " variant=" + variant;
  return s;
}

}  // namespace

Projection fit_method(const GridConfig& config, const ExperimentData& data, Method method, int d_prime,
                      const std::string& variant) {
  FitContext ctx(config, data);
  return ctx.fit(method, d_prime, variant);
}

std::vector<RawError> evaluate_pairs(const CorrelationModel& model, const Projection& proj,
                                     const std::vector<SpectralImage>& test_images,
                                     const std::vector<std::string>& names, const IlluminantSet& candidates,
                                     ScoreMode mode, std::optional<double> noise_db, std::uint64_t noise_seed,
                                     int threads) {
  if (test_images.size() != names.size()) throw std::invalid_argument("evaluate_pairs: names/images size mismatch");
  if (model.candidate_count() != candidates.size()) {
    throw std::invalid_argument("evaluate_pairs: model and candidate set differ in size");
  }
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (model.grids[c].name != candidates[c].name) {
      throw std::invalid_argument("evaluate_pairs: model candidate '" + model.grids[c].name + "' does not match '" +
                                  candidates[c].name + "'");
    }
  }
  const std::size_t k = candidates.size();
  std::vector<RawError> out(test_images.size() * k);
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const std::size_t s = i / k, c = i % k;
    const auto radiance = test_radiance(test_images[s], candidates, s, c, noise_db, noise_seed);
    const auto cls = classify(model, proj, radiance, mode);
    out[i] = {names[s], candidates[c].name, cls.name,
              angular_error(candidates[cls.index].spd.values, candidates[c].spd.values)};
  });
  return out;
}

EvalReport run_grid(const GridConfig& config, const ExperimentData& data, std::ostream* log) {
  config.validate();
  FitContext ctx(config, data);
  const auto model_images = downsampled(data.train, config.model_downsample);
  const auto test_images = downsampled(data.test, config.model_downsample);
  const auto names = scene_names(data.test);

  EvalReport report;
  for (Method m : config.methods) {
    if (m == Method::sgw) {
      log_line(log, "sgw");
      ReportRow row;
      row.method = m;
      row.raw = evaluate_sgw(test_images, names, data.full, std::nullopt, 0, config.threads);
      row.summary = summary_of(row.raw);
      report.rows.push_back(std::move(row));
      continue;
    }
    const auto variants = variants_of(config, data, m);
    for (int d : config.dims) {
      if (m == Method::rgb && d != 3) continue;
      std::map<int, std::vector<ErrorSummary>> per_bins;
      for (const auto& variant : variants) {
        const Projection proj = ctx.fit(m, d, variant);
        for (int b : config.bins) {
          log_line(log, describe_cell(m, d, b, variant));
          BuildOptions bo;
          bo.bins = b;
          bo.smoothing = config.smoothing;
          bo.threads = config.threads;
          const auto model = build_model(model_images, data.full, proj, bo);
          ReportRow row;
          row.method = m;
          row.d_prime = d;
          row.bins = b;
          row.variant = variant;
          row.raw = evaluate_pairs(model, proj, test_images, names, data.full, config.score_mode, std::nullopt, 0,
                                   config.threads);
          row.summary = summary_of(row.raw);
          per_bins[b].push_back(row.summary);
          report.rows.push_back(std::move(row));
        }
      }
      if (m == Method::rgb || m == Method::rand) {
        for (const auto& [b, parts] : per_bins) {
          ReportRow row;
          row.method = m;
          row.d_prime = d;
          row.bins = b;
          row.variant = "mean";
          row.summary = average_summaries(parts);
          report.rows.push_back(std::move(row));
        }
      }
    }
  }
  sort_rows(report.rows);
  return report;
}

EvalReport run_noise(const GridConfig& config, const ExperimentData& data, std::ostream* log) {
  config.validate();
  const Method m = config.noise_method;
  const auto test_images = downsampled(data.test, config.model_downsample);
  const auto names = scene_names(data.test);

  std::vector<std::optional<double>> levels{std::nullopt};
  for (double s : config.noise_levels) levels.emplace_back(s);

  EvalReport report;
  if (m == Method::sgw) {
    for (const auto& level : levels) {
      ReportRow row;
      row.method = m;
      row.noise_db = level;
      row.raw = evaluate_sgw(test_images, names, data.full, level, config.noise_seed, config.threads);
      row.summary = summary_of(row.raw);
      report.rows.push_back(std::move(row));
    }
    sort_rows(report.rows);
    return report;
  }

  std::string variant = config.noise_variant;
  if (variant.empty()) variant = variants_of(config, data, m).at(0);
  if (m != Method::rgb && m != Method::rand) variant = "-";
  FitContext ctx(config, data);
  const Projection proj = ctx.fit(m, config.noise_dprime, variant);
  BuildOptions bo;
  bo.bins = config.noise_bins;
  bo.smoothing = config.smoothing;
  bo.threads = config.threads;
  const auto model = build_model(downsampled(data.train, config.model_downsample), data.full, proj, bo);

  for (const auto& level : levels) {
    char snr[32] = "clean";
    if (level) std::snprintf(snr, sizeof snr, "%gdB", *level);
    log_line(log, describe_cell(m, config.noise_dprime, config.noise_bins, variant) + " noise=" + snr);
    ReportRow row;
    row.method = m;
    row.d_prime = config.noise_dprime;
    row.bins = config.noise_bins;
    row.variant = variant;
    row.noise_db = level;
    row.raw = evaluate_pairs(model, proj, test_images, names, data.full, config.score_mode, level, config.noise_seed,
                             config.threads);
    row.summary = summary_of(row.raw);
    report.rows.push_back(std::move(row));
  }
  sort_rows(report.rows);
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string row_key(const ReportRow& r) {
  std::string s(to_string(r.method));
  s += ',';
  s += r.d_prime > 0 ? std::to_string(r.d_prime) : "-";
  s += ',';
  s += r.bins > 0 ? std::to_string(r.bins) : "-";
  s += ',' + r.variant + ',';
  s += r.noise_db ? fmt(*r.noise_db) : "-";
  return s;
}

}  // namespace

void write_report_csv(std::ostream& os, const EvalReport& report) {
  os << "method,d_prime,B,variant,noise_db,mean,median,trimean,best25,worst25,n\n";
  for (const auto& r : report.rows) {
    const auto& s = r.summary;
    os << row_key(r) << ',' << fmt(s.mean) << ',' << fmt(s.median) << ',' << fmt(s.trimean) << ',' << fmt(s.best25)
       << ',' << fmt(s.worst25) << ',' << s.n << '\n';
  }
}

void write_raw_errors_csv(std::ostream& os, const EvalReport& report) {
  os << "method,d_prime,B,variant,noise_db,scene,illuminant,estimate,error\n";
  for (const auto& r : report.rows) {
    const auto key = row_key(r);
    for (const auto& e : r.raw) {
      os << key << ',' << e.scene << ',' << e.truth << ',' << e.estimate << ',' << fmt(e.error) << '\n';
    }
  }
}

void write_report(const std::filesystem::path& dir, const std::string& stem, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::filesystem::path& p, auto&& fn) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
    fn(os, report);
    if (!os) throw std::runtime_error("write failed: " + p.string());
  };
  write(dir / (stem + ".csv"), write_report_csv);
  write(dir / (stem + "_raw.csv"), write_raw_errors_csv);
}

}  // namespace rscc
