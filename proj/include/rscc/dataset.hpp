#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rscc/spectral.hpp"

namespace rscc {

/// Recipe for one synthetic reflectance scene.
struct SceneRecipe {
  std::uint64_t seed = 0;
  int width = 64;
  int height = 64;
  int basis_count = 8;    // smooth Gaussian-bump basis spectra
  int patch_count = 24;   // Voronoi regions, one reflectance each
  double mask_fraction = 0.05;
};

/// Reflectance cube in [0, 1]. Region reflectances are random convex
/// combinations of the scene's basis spectra. The last
/// round(mask_fraction * W * H) pixels in raster order form a white
/// reference strip (reflectance 1) and are masked out. Samples are rounded
/// to float32 so the cube survives a .scube round trip unchanged.
SpectralImage synth_scene(const SceneRecipe& recipe, const SpectralAxis& axis = {});

struct Scene {
  std::string name;
  SpectralImage reflectance;
};

/// Dataset manifest: one `train|test relative/path.scube` per line.
struct DatasetManifest {
  std::vector<std::filesystem::path> train;
  std::vector<std::filesystem::path> test;
};

DatasetManifest read_dataset_manifest(const std::filesystem::path& path);
void write_dataset_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

std::vector<Scene> load_scenes(const std::vector<std::filesystem::path>& paths);

struct SynthOptions {
  int scenes = 30;
  std::uint64_t seed = 7;
  SceneRecipe base;   // seed field ignored; scene i uses splitmix64(seed + i)
  int test_every = 3;  // scene i is a test scene when i % test_every == test_every - 1; 1 = no test split
};

/// Writes scene_###.scube files plus dataset.txt into `dir` and returns the
/// manifest path.
std::filesystem::path synth_dataset(const SynthOptions& opts, const std::filesystem::path& dir);

}  // namespace rscc
