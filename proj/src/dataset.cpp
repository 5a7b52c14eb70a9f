#include "rscc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rscc/random.hpp"
#include "rscc/spectral_io.hpp"

namespace rscc {

SpectralImage synth_scene(const SceneRecipe& r, const SpectralAxis& axis) {
  if (r.width < 1 || r.height < 1) throw std::invalid_argument("scene size must be positive");
  if (r.basis_count < 1 || r.patch_count < 1) throw std::invalid_argument("basis_count and patch_count must be >= 1");
  if (!(r.mask_fraction >= 0.0 && r.mask_fraction < 1.0)) throw std::invalid_argument("mask_fraction must be in [0, 1)");

  Rng rng(r.seed);
  const int d = axis.count;
  const double span = axis.wavelength(d - 1) - axis.start_nm;
  std::vector<Eigen::VectorXd> basis;
  for (int k = 0; k < r.basis_count; ++k) {
    const double center = axis.start_nm - 0.1 * span + 1.2 * span * rng.uniform();
    const double sigma = 15.0 + 75.0 * rng.uniform();
    const double amp = 0.3 + 0.7 * rng.uniform();
    Eigen::VectorXd b(d);
    for (int i = 0; i < d; ++i) {
      const double t = (axis.wavelength(i) - center) / sigma;
      b[i] = amp * std::exp(-0.5 * t * t);
    }
    basis.push_back(std::move(b));
  }

  std::vector<Eigen::VectorXd> patches;
  std::vector<std::pair<double, double>> sites;
  for (int p = 0; p < r.patch_count; ++p) {
    Eigen::VectorXd refl = Eigen::VectorXd::Zero(d);
    double wsum = 0.0;
    std::vector<double> w(r.basis_count);
    for (auto& x : w) {
      x = -std::log(1.0 - rng.uniform());  // Dirichlet(1) via normalised exponentials
      wsum += x;
    }
    for (int k = 0; k < r.basis_count; ++k) refl += (w[k] / wsum) * basis[k];
    for (int i = 0; i < d; ++i) refl[i] = static_cast<float>(std::clamp(refl[i], 0.0, 1.0));
    patches.push_back(std::move(refl));
    sites.emplace_back(rng.uniform() * r.width, rng.uniform() * r.height);
  }

  SpectralImage img(r.width, r.height, axis);
  const int masked = static_cast<int>(std::lround(r.mask_fraction * img.pixel_count()));
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const int idx = y * r.width + x;
      auto px = img.pixel(idx);
      if (idx >= img.pixel_count() - masked) {
        std::fill(px.begin(), px.end(), 1.0);
        img.set_valid(idx, false);
        continue;
      }
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int p = 0; p < r.patch_count; ++p) {
        const double dx = x + 0.5 - sites[p].first;
        const double dy = y + 0.5 - sites[p].second;
        const double dist = dx * dx + dy * dy;
        if (dist < best_d) {
          best_d = dist;
          best = p;
        }
      }
      for (int i = 0; i < d; ++i) px[i] = patches[best][i];
    }
  }
  return img;
}

DatasetManifest read_dataset_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open dataset manifest " + path.string());
  DatasetManifest m;
  const auto base = path.parent_path();
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string split, rel, extra;
    if (!(ss >> split)) continue;
    if (!(ss >> rel) || (ss >> extra) || (split != "train" && split != "test")) {
      throw std::runtime_error(path.string() + " line " + std::to_string(lineno) + ": expected `train|test path`");
    }
    (split == "train" ? m.train : m.test).push_back(base / rel);
  }
  return m;
}

void write_dataset_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto base = path.parent_path();
  for (const auto& p : manifest.train) os << "train " << p.lexically_relative(base).generic_string() << '\n';
  for (const auto& p : manifest.test) os << "test " << p.lexically_relative(base).generic_string() << '\n';
}

std::vector<Scene> load_scenes(const std::vector<std::filesystem::path>& paths) {
  std::vector<Scene> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back({p.stem().string(), read_scube(p)});
  return out;
}

std::filesystem::path synth_dataset(const SynthOptions& opts, const std::filesystem::path& dir) {
  if (opts.scenes < 1) throw std::invalid_argument("synth: need at least one scene");
  if (opts.test_every < 1) throw std::invalid_argument("synth: test_every must be >= 1");
  std::filesystem::create_directories(dir);
  DatasetManifest m;
  for (int i = 0; i < opts.scenes; ++i) {
    SceneRecipe r = opts.base;
    r.seed = splitmix64(opts.seed + static_cast<std::uint64_t>(i));
    char name[32];
    std::snprintf(name, sizeof name, "scene_%03d.scube", i);
    const auto path = dir / name;
    write_scube(path, synth_scene(r));
    const bool is_test = opts.test_every > 1 && i % opts.test_every == opts.test_every - 1;
    (is_test ? m.test : m.train).push_back(path);
  }
  const auto manifest = dir / "dataset.txt";
  write_dataset_manifest(manifest, m);
  return manifest;
}

}  // namespace rscc
