#include <gtest/gtest.h>

#include "rscc/baselines.hpp"
#include "rscc/evaluation.hpp"
#include "test_support.hpp"

using namespace rscc;

namespace {
IlluminantSet bundled() { return load_illuminants(test::kDataDir / "illuminants" / "manifest.txt"); }
}  // namespace

TEST(SpectralGrayWorld, WhiteSceneRecoversEveryCandidate) {
  const auto ills = bundled();
  const auto white = test::constant_image(8, 8, Eigen::VectorXd::Ones(31));
  for (std::size_t c = 0; c < ills.size(); ++c) {
    const auto est = spectral_gray_world(relight(white, ills[c].spd), ills);
    EXPECT_EQ(est.index, c) << ills[c].name;
    EXPECT_EQ(angular_error(ills[est.index].spd.values, ills[c].spd.values), 0.0);
  }
}

TEST(SpectralGrayWorld, MeanSpectrumIgnoresMaskedAndZeroPixels) {
  const auto ills = bundled();
  auto img = test::constant_image(4, 1, ills.at("F2").spd.values);
  for (auto& v : img.pixel(1)) v = 0.0;  // black pixel
  for (int i = 0; i < 31; ++i) img.pixel(2)[i] = 1000.0 * (i + 1);  // masked outlier
  img.set_valid(2, false);
  const auto est = spectral_gray_world(img, ills);
  EXPECT_EQ(est.name, "F2");
  EXPECT_NEAR(est.mean_spectrum.norm(), 1.0, 1e-12);
  const Eigen::VectorXd ref = ills.at("F2").spd.values.normalized();
  EXPECT_LT((est.mean_spectrum - ref).cwiseAbs().maxCoeff(), 1e-12);
  ASSERT_EQ(est.cosines.size(), ills.size());
  EXPECT_NEAR(est.cosines[ills.find("F2")], 1.0, 1e-12);
}

TEST(SpectralGrayWorld, TiesGoToLowestIndex) {
  std::vector<Illuminant> m{{"one", Spectrum(SpectralAxis{}, Eigen::VectorXd::Ones(31))},
                            {"two", Spectrum(SpectralAxis{}, 2.0 * Eigen::VectorXd::Ones(31))}};
  const IlluminantSet set(m, IlluminantRole::full);
  const auto est = spectral_gray_world(test::constant_image(2, 2, Eigen::VectorXd::Ones(31)), set);
  EXPECT_EQ(est.index, 0u);
}

TEST(SpectralGrayWorld, Errors) {
  const auto ills = bundled();
  SpectralImage dark(2, 2, SpectralAxis{});
  EXPECT_THROW(spectral_gray_world(dark, ills), std::invalid_argument);
  EXPECT_THROW(spectral_gray_world(test::constant_image(1, 1, Eigen::VectorXd::Ones(31)), IlluminantSet{}),
               std::invalid_argument);
}
