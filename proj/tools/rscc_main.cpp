// rscc command-line tool: synthesis, fitting, model building and evaluation.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rscc/cbc.hpp"
#include "rscc/dataset.hpp"
#include "rscc/evaluation.hpp"
#include "rscc/illuminants.hpp"
#include "rscc/projection.hpp"
#include "rscc/spectral_io.hpp"

namespace fs = std::filesystem;
using namespace rscc;

namespace {

struct DataFlags {
  fs::path dataset;
  fs::path illuminants;
  fs::path projection_set;
  int k = 10;
  std::uint64_t kmeans_seed = 0;
};

void add_data_flags(CLI::App* cmd, DataFlags& f, bool need_dataset) {
  auto* opt = cmd->add_option("--dataset", f.dataset, "dataset manifest (train|test lines)");
  if (need_dataset) opt->required();
  cmd->add_option("--illuminants", f.illuminants, "illuminant manifest")->required();
  cmd->add_option("--projection-set", f.projection_set, "projection-set name list (default: k-means selection)");
  cmd->add_option("--k", f.k, "k-means clusters when selecting the projection set")->capture_default_str();
  cmd->add_option("--kmeans-seed", f.kmeans_seed, "k-means seed")->capture_default_str();
}

ExperimentData load_training(const DataFlags& f) {
  ExperimentData data;
  data.full = load_illuminants(f.illuminants);
  if (!f.projection_set.empty()) {
    data.projection = data.full.subset(read_name_list(f.projection_set), IlluminantRole::projection);
  } else {
    data.projection = select_projection_set(data.full, std::min<int>(f.k, static_cast<int>(data.full.size())),
                                            f.kmeans_seed);
  }
  if (!f.dataset.empty()) {
    const auto manifest = read_dataset_manifest(f.dataset);
    if (manifest.train.empty()) throw std::runtime_error("dataset manifest lists no training scenes");
    data.train = load_scenes(manifest.train);
  }
  return data;
}

void print_report(const EvalReport& report) {
  std::printf("%-8s %3s %3s %-10s %6s %9s %9s %9s %9s %9s %6s\n", "method", "d'", "B", "variant", "noise", "mean",
              "median", "trimean", "best25", "worst25", "n");
  for (const auto& r : report.rows) {
    const std::string d = r.d_prime > 0 ? std::to_string(r.d_prime) : "-";
    const std::string b = r.bins > 0 ? std::to_string(r.bins) : "-";
    const std::string noise = r.noise_db ? std::to_string(static_cast<int>(*r.noise_db)) + "dB" : "clean";
    const auto& s = r.summary;
    std::printf("%-8s %3s %3s %-10s %6s %9.4f %9.4f %9.4f %9.4f %9.4f %6zu\n", std::string(to_string(r.method)).c_str(),
                d.c_str(), b.c_str(), r.variant.c_str(), noise.c_str(), s.mean, s.median, s.trimean, s.best25,
                s.worst25, s.n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral color-by-correlation illuminant estimation"};
  app.require_subcommand(1);

  // synth
  SynthOptions synth;
  fs::path synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic reflectance dataset");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--scenes", synth.scenes, "number of scenes")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "master seed")->capture_default_str();
  synth_cmd->add_option("--width", synth.base.width)->capture_default_str();
  synth_cmd->add_option("--height", synth.base.height)->capture_default_str();
  synth_cmd->add_option("--basis", synth.base.basis_count, "basis spectra per scene")->capture_default_str();
  synth_cmd->add_option("--patches", synth.base.patch_count, "regions per scene")->capture_default_str();
  synth_cmd->add_option("--mask-fraction", synth.base.mask_fraction)->capture_default_str();
  synth_cmd->add_option("--test-every", synth.test_every, "every n-th scene goes to the test split (1 = none)")
      ->capture_default_str();

  // select-projection-set
  fs::path sel_ill, sel_out;
  int sel_k = 10;
  std::uint64_t sel_seed = 0;
  auto* sel_cmd = app.add_subcommand("select-projection-set", "pick representative illuminants by k-means");
  sel_cmd->add_option("--illuminants", sel_ill, "illuminant manifest")->required();
  sel_cmd->add_option("--k", sel_k)->capture_default_str();
  sel_cmd->add_option("--seed", sel_seed)->capture_default_str();
  sel_cmd->add_option("--out", sel_out, "name list to write (default: stdout)");

  // fit
  DataFlags fit_data;
  std::string fit_method_name;
  int fit_dprime = 3;
  std::uint64_t fit_seed = 42;
  std::optional<int> fit_downsample;
  fs::path fit_camera, fit_out;
  bool fit_full_set = false;
  GridConfig fit_cfg;
  auto* fit_cmd = app.add_subcommand("fit", "fit a spectral projection");
  fit_cmd->add_option("--method", fit_method_name, "rgb|rand|pca|ill_pca|nnmf|lda")->required();
  fit_cmd->add_option("--dprime", fit_dprime, "output dimensionality")->capture_default_str();
  fit_cmd->add_option("--seed", fit_seed, "RAND / NNMF seed")->capture_default_str();
  fit_cmd->add_option("--downsample", fit_downsample, "training downsample factor (default 8, LDA 16)");
  fit_cmd->add_option("--camera", fit_camera, "sensitivity CSV (rgb)");
  fit_cmd->add_flag("--full-set", fit_full_set, "Ill-PCA over the full illuminant set");
  fit_cmd->add_option("--nnmf-max-iter", fit_cfg.nnmf_max_iter)->capture_default_str();
  fit_cmd->add_option("--nnmf-tol", fit_cfg.nnmf_tol)->capture_default_str();
  fit_cmd->add_option("--lda-shrinkage", fit_cfg.lda_shrinkage)->capture_default_str();
  fit_cmd->add_option("--out", fit_out, "projection file")->required();
  add_data_flags(fit_cmd, fit_data, false);

  // build-model
  DataFlags bm_data;
  fs::path bm_proj, bm_out;
  BuildOptions bm_opts;
  int bm_downsample = 4;
  auto* bm_cmd = app.add_subcommand("build-model", "build a color-by-correlation model");
  bm_cmd->add_option("--projection", bm_proj, "projection file")->required();
  bm_cmd->add_option("--bins", bm_opts.bins, "bins per dimension")->capture_default_str();
  bm_cmd->add_option("--smoothing", bm_opts.smoothing)->capture_default_str();
  bm_cmd->add_option("--threads", bm_opts.threads)->capture_default_str();
  bm_cmd->add_option("--downsample", bm_downsample)->capture_default_str();
  bm_cmd->add_option("--out", bm_out, "model file")->required();
  add_data_flags(bm_cmd, bm_data, true);

  // classify
  fs::path cl_model, cl_proj, cl_image, cl_ill;
  std::string cl_relight, cl_truth, cl_score = "log";
  int cl_downsample = 1;
  auto* cl_cmd = app.add_subcommand("classify", "estimate the illuminant of one image");
  cl_cmd->add_option("--model", cl_model)->required();
  cl_cmd->add_option("--projection", cl_proj)->required();
  cl_cmd->add_option("--image", cl_image, "radiance .scube (reflectance with --relight)")->required();
  cl_cmd->add_option("--illuminants", cl_ill, "illuminant manifest (for --relight / --truth)");
  cl_cmd->add_option("--relight", cl_relight, "treat the image as reflectance lit by this illuminant");
  cl_cmd->add_option("--truth", cl_truth, "true illuminant name (defaults to --relight)");
  cl_cmd->add_option("--score", cl_score, "log|dot")->capture_default_str();
  cl_cmd->add_option("--downsample", cl_downsample)->capture_default_str();

  // grid / noise
  fs::path grid_cfg_path, grid_out;
  int grid_threads = 0;
  auto* grid_cmd = app.add_subcommand("grid", "run an experimental sweep from a config file");
  grid_cmd->add_option("--config", grid_cfg_path)->required();
  grid_cmd->add_option("--out", grid_out, "output directory (overrides output_dir)");
  grid_cmd->add_option("--threads", grid_threads, "worker threads (overrides threads)");
  fs::path noise_cfg_path, noise_out;
  int noise_threads = 0;
  auto* noise_cmd = app.add_subcommand("noise", "run the noise protocol from a config file");
  noise_cmd->add_option("--config", noise_cfg_path)->required();
  noise_cmd->add_option("--out", noise_out, "output directory (overrides output_dir)");
  noise_cmd->add_option("--threads", noise_threads, "worker threads (overrides threads)");

  // export-pca-coords
  fs::path ex_ill, ex_proj, ex_set, ex_out;
  int ex_dprime = 2;
  auto* ex_cmd = app.add_subcommand("export-pca-coords", "illuminant coordinates on leading components");
  ex_cmd->add_option("--illuminants", ex_ill)->required();
  ex_cmd->add_option("--projection", ex_proj, "projection file (default: Ill-PCA over all illuminants)");
  ex_cmd->add_option("--dprime", ex_dprime, "components when fitting")->capture_default_str();
  ex_cmd->add_option("--projection-set", ex_set, "name list; adds a membership column");
  ex_cmd->add_option("--out", ex_out, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth_cmd) {
      const auto manifest = synth_dataset(synth, synth_out);
      std::cout << "wrote " << synth.scenes << " scenes; manifest " << manifest.string() << "\n";
    } else if (*sel_cmd) {
      const auto full = load_illuminants(sel_ill);
      const auto names = select_projection_set(full, sel_k, sel_seed).names();
      if (sel_out.empty()) {
        for (const auto& n : names) std::cout << n << "\n";
      } else {
        write_name_list(sel_out, names);
      }
    } else if (*fit_cmd) {
      const Method m = parse_method(fit_method_name);
      if (m == Method::sgw) throw std::invalid_argument("sgw has no projection to fit");
      if (m == Method::rgb && fit_dprime != 3) {
        throw std::invalid_argument("method rgb is fixed to d'=3 (got --dprime " + std::to_string(fit_dprime) + ")");
      }
      if (fit_dprime < 1) throw std::invalid_argument("--dprime must be >= 1");
      const bool needs_pixels = m == Method::pca || m == Method::nnmf || m == Method::lda;
      if (needs_pixels && fit_data.dataset.empty()) throw std::invalid_argument("--dataset is required for this method");
      ExperimentData data = load_training(fit_data);
      fit_cfg.ill_pca_full_set = fit_full_set;
      fit_cfg.nnmf_seed = fit_seed;
      if (fit_downsample) fit_cfg.fit_downsample = fit_cfg.lda_downsample = *fit_downsample;
      std::string variant = "-";
      if (m == Method::rgb) {
        if (fit_camera.empty()) throw std::invalid_argument("--camera is required for rgb");
        data.cameras.push_back(read_sensitivity_csv(fit_camera, fit_camera.stem().string()));
        variant = data.cameras.back().camera_name;
      } else if (m == Method::rand) {
        variant = std::to_string(fit_seed);
      }
      const auto proj = fit_method(fit_cfg, data, m, fit_dprime, variant);
      write_projection(fit_out, proj);
      std::printf("%s d'=%d -> %s (hash %016llx)\n", std::string(to_string(m)).c_str(), fit_dprime,
                  fit_out.string().c_str(), static_cast<unsigned long long>(content_hash(proj)));
    } else if (*bm_cmd) {
      const auto proj = read_projection(bm_proj);
      const auto data = load_training(bm_data);
      std::vector<SpectralImage> images;
      for (const auto& s : data.train) images.push_back(downsample(s.reflectance, bm_downsample));
      const auto model = build_model(images, data.full, proj, bm_opts);
      write_model(bm_out, model);
      std::printf("model: %zu candidates, B=%d, d'=%d -> %s\n", model.candidate_count(), bm_opts.bins,
                  proj.output_dim, bm_out.string().c_str());
    } else if (*cl_cmd) {
      const auto model = read_model(cl_model);
      const auto proj = read_projection(cl_proj);
      const ScoreMode mode = parse_score_mode(cl_score);
      if (cl_truth.empty()) cl_truth = cl_relight;
      std::optional<IlluminantSet> ills;
      if (!cl_relight.empty() || !cl_truth.empty()) {
        if (cl_ill.empty()) throw std::invalid_argument("--illuminants is required with --relight / --truth");
        ills = load_illuminants(cl_ill);
      }
      auto image = downsample(read_scube(cl_image), cl_downsample);
      if (!cl_relight.empty()) {
        const auto& spd = ills->at(cl_relight).spd;
        image = relight(image, Spectrum(spd.axis, spd.values / spd.values.lpNorm<1>()));
      }
      const auto cls = classify(model, proj, image, mode);
      std::printf("estimate: %s\n", cls.name.c_str());
      const auto names = model.candidate_names();
      for (std::size_t i = 0; i < names.size(); ++i) std::printf("  %-10s %.10g\n", names[i].c_str(), cls.scores[i]);
      if (!cl_truth.empty()) {
        const double err = angular_error(ills->at(cls.name).spd.values, ills->at(cl_truth).spd.values);
        std::printf("truth: %s\nangular_error_deg: %.6f\n", cl_truth.c_str(), err);
      }
    } else if (*grid_cmd || *noise_cmd) {
      const bool grid = grid_cmd->parsed();
      auto cfg = parse_grid_config(grid ? grid_cfg_path : noise_cfg_path);
      const auto& out = grid ? grid_out : noise_out;
      const int threads = grid ? grid_threads : noise_threads;
      if (!out.empty()) cfg.output_dir = out;
      if (threads > 0) cfg.threads = threads;
      if (!grid && cfg.methods.empty()) cfg.methods = {cfg.noise_method};
      const auto data = load_experiment(cfg);
      const auto report = grid ? run_grid(cfg, data, &std::cerr) : run_noise(cfg, data, &std::cerr);
      const std::string stem = grid ? "report" : "noise_report";
      write_report(cfg.output_dir, stem, report);
      print_report(report);
      std::cout << "wrote " << (cfg.output_dir / (stem + ".csv")).string() << "\n";
    } else if (*ex_cmd) {
      const auto full = load_illuminants(ex_ill);
      const auto proj = ex_proj.empty() ? fit_ill_pca(full, ex_dprime) : read_projection(ex_proj);
      if (proj.kind == ProjectionKind::rgb) throw std::invalid_argument("export-pca-coords needs a spectral projection");
      std::vector<std::string> members;
      if (!ex_set.empty()) members = read_name_list(ex_set);
      std::ofstream file;
      if (!ex_out.empty()) {
        file.open(ex_out);
        if (!file) throw std::runtime_error("cannot open " + ex_out.string());
      }
      std::ostream& os = ex_out.empty() ? std::cout : file;
      os << "name";
      if (!ex_set.empty()) os << ",in_projection_set";
      for (int j = 0; j < proj.output_dim; ++j) os << ",c" << (j + 1);
      os << "\n";
      const auto chroma = chromaticity_matrix(full);
      for (std::size_t i = 0; i < full.size(); ++i) {
        const Eigen::VectorXd z = apply(proj, chroma.row(static_cast<Eigen::Index>(i)).transpose());
        os << full[i].name;
        if (!ex_set.empty()) {
          os << "," << (std::find(members.begin(), members.end(), full[i].name) != members.end() ? 1 : 0);
        }
        char buf[32];
        for (int j = 0; j < z.size(); ++j) {
          std::snprintf(buf, sizeof buf, "%.17g", z[j]);
          os << "," << buf;
        }
        os << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
