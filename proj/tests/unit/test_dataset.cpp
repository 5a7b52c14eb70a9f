#include <fstream>

#include <gtest/gtest.h>

#include "rscc/dataset.hpp"
#include "rscc/spectral_io.hpp"
#include "test_support.hpp"

using namespace rscc;

TEST(SynthScene, SinglePatchIsConstantCube) {
  SceneRecipe r;
  r.seed = 9;
  r.width = r.height = 12;
  r.patch_count = 1;
  r.mask_fraction = 0.0;
  const auto img = synth_scene(r);
  for (int p = 1; p < img.pixel_count(); ++p) {
    ASSERT_TRUE(img.valid(p));
    for (int i = 0; i < 31; ++i) ASSERT_EQ(img.pixel(p)[i], img.pixel(0)[i]);
  }
}

TEST(SynthScene, ReflectanceInUnitIntervalAndFloatExact) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SceneRecipe r;
    r.seed = seed;
    r.width = r.height = 20;
    const auto img = synth_scene(r);
    for (double v : img.data()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
      ASSERT_EQ(v, static_cast<double>(static_cast<float>(v)));
    }
  }
}

TEST(SynthScene, MaskFractionMasksExactCount) {
  SceneRecipe r;
  r.width = r.height = 10;
  r.mask_fraction = 0.25;
  const auto img = synth_scene(r);
  int masked = 0;
  for (int p = 0; p < img.pixel_count(); ++p) masked += !img.valid(p);
  EXPECT_EQ(masked, 25);
  for (int p = 75; p < 100; ++p) {
    EXPECT_FALSE(img.valid(p));
    EXPECT_EQ(img.pixel(p)[0], 1.0);
  }
}

TEST(SynthScene, SeedDeterminesScene) {
  SceneRecipe r;
  r.seed = 4;
  r.width = r.height = 16;
  EXPECT_EQ(synth_scene(r).data(), synth_scene(r).data());
  SceneRecipe other = r;
  other.seed = 5;
  EXPECT_NE(synth_scene(r).data(), synth_scene(other).data());
}

TEST(SynthScene, RejectsBadRecipes) {
  SceneRecipe r;
  r.width = 0;
  EXPECT_THROW(synth_scene(r), std::invalid_argument);
  r = {};
  r.patch_count = 0;
  EXPECT_THROW(synth_scene(r), std::invalid_argument);
  r = {};
  r.mask_fraction = 1.0;
  EXPECT_THROW(synth_scene(r), std::invalid_argument);
}

TEST(SynthDataset, SameSeedGivesIdenticalFiles) {
  test::ScratchDir dir;
  SynthOptions o;
  o.scenes = 6;
  o.base.width = o.base.height = 8;
  const auto m1 = synth_dataset(o, dir / "a");
  const auto m2 = synth_dataset(o, dir / "b");
  for (int i = 0; i < 6; ++i) {
    const std::string name = "scene_00" + std::to_string(i) + ".scube";
    EXPECT_EQ(test::slurp(dir / ("a/" + name)), test::slurp(dir / ("b/" + name)));
  }
  EXPECT_EQ(test::slurp(m1), test::slurp(m2));
  const auto manifest = read_dataset_manifest(m1);
  EXPECT_EQ(manifest.train.size(), 4u);
  ASSERT_EQ(manifest.test.size(), 2u);
  EXPECT_EQ(manifest.test[0].filename(), "scene_002.scube");
  EXPECT_EQ(manifest.test[1].filename(), "scene_005.scube");
}

TEST(SynthDataset, LoadedScenesMatchGenerator) {
  test::ScratchDir dir;
  SynthOptions o;
  o.scenes = 2;
  o.seed = 11;
  o.base.width = o.base.height = 8;
  o.test_every = 1;
  const auto m = read_dataset_manifest(synth_dataset(o, dir.path()));
  EXPECT_TRUE(m.test.empty());
  const auto scenes = load_scenes(m.train);
  ASSERT_EQ(scenes.size(), 2u);
  EXPECT_EQ(scenes[1].name, "scene_001");
  SceneRecipe r = o.base;
  r.seed = splitmix64(11 + 1);
  EXPECT_EQ(scenes[1].reflectance.data(), synth_scene(r).data());
}

TEST(DatasetManifest, RoundTripAndErrors) {
  test::ScratchDir dir;
  DatasetManifest m;
  m.train = {dir / "x/a.scube", dir / "b.scube"};
  m.test = {dir / "c.scube"};
  write_dataset_manifest(dir / "dataset.txt", m);
  const auto back = read_dataset_manifest(dir / "dataset.txt");
  ASSERT_EQ(back.train.size(), 2u);
  EXPECT_EQ(back.train[0].lexically_normal(), m.train[0].lexically_normal());
  EXPECT_EQ(back.test[0].lexically_normal(), m.test[0].lexically_normal());

  std::ofstream(dir / "bad.txt") << "# comment\nvalidate a.scube\n";
  try {
    read_dataset_manifest(dir / "bad.txt");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(read_dataset_manifest(dir / "missing.txt"), std::runtime_error);
}
