#include <cstring>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "rscc/spectral_io.hpp"
#include "test_support.hpp"

using namespace rscc;

namespace {

SpectralImage random_cube(std::uint64_t seed, int w, int h, SpectralAxis ax = {}) {
  Rng rng(seed);
  SpectralImage img(w, h, ax);
  for (auto& v : img.data()) v = static_cast<float>(rng.uniform());
  for (int p = 0; p < img.pixel_count(); ++p) img.set_valid(p, rng.uniform() > 0.2);
  return img;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p);
  os << s;
}

}  // namespace

TEST(Scube, RoundTripIsBitExact) {
  auto img = random_cube(3, 7, 5, SpectralAxis(380, 5, 9));
  std::stringstream ss;
  write_scube(ss, img);
  const std::string bytes = ss.str();
  auto back = read_scube(ss);
  EXPECT_EQ(back.width(), 7);
  EXPECT_EQ(back.height(), 5);
  EXPECT_EQ(back.axis(), img.axis());
  EXPECT_EQ(back.data(), img.data());
  EXPECT_EQ(back.mask(), img.mask());
  std::stringstream again;
  write_scube(again, back);
  EXPECT_EQ(again.str(), bytes);
}

TEST(Scube, HeaderLayout) {
  SpectralImage img(2, 3, SpectralAxis(400, 10, 4));
  std::stringstream ss;
  write_scube(ss, img);
  const std::string b = ss.str();
  EXPECT_EQ(b.substr(0, 5), "SCUB1");
  EXPECT_EQ(b.size(), 5u + 12 + 16 + 2 * 3 * 4 * 4 + 2 * 3);
  EXPECT_EQ(static_cast<unsigned char>(b[5]), 2u);  // little-endian width
  EXPECT_EQ(static_cast<unsigned char>(b[9]), 3u);
}

TEST(Scube, PlaneSequentialOrder) {
  SpectralImage img(2, 1, SpectralAxis(400, 10, 2));
  img.pixel(0)[0] = 1;
  img.pixel(0)[1] = 2;
  img.pixel(1)[0] = 3;
  img.pixel(1)[1] = 4;
  std::stringstream ss;
  write_scube(ss, img);
  const std::string b = ss.str();
  float f[4];
  std::memcpy(f, b.data() + 33, sizeof f);
  EXPECT_EQ(f[0], 1.0f);
  EXPECT_EQ(f[1], 3.0f);  // band 0 of pixel 1 precedes band 1 of pixel 0
  EXPECT_EQ(f[2], 2.0f);
  EXPECT_EQ(f[3], 4.0f);
}

TEST(Scube, RejectsCorruptInput) {
  auto img = random_cube(1, 3, 3);
  std::stringstream ss;
  write_scube(ss, img);
  std::string b = ss.str();

  std::istringstream bad_magic("SCUB2" + b.substr(5));
  EXPECT_THROW(read_scube(bad_magic), std::runtime_error);
  std::istringstream truncated(b.substr(0, b.size() - 3));
  EXPECT_THROW(read_scube(truncated), std::runtime_error);
  std::istringstream trailing(b + "x");
  EXPECT_THROW(read_scube(trailing), std::runtime_error);

  std::string bad_mask = b;
  bad_mask.back() = 7;
  std::istringstream bm(bad_mask);
  EXPECT_THROW(read_scube(bm), std::runtime_error);

  std::string negative = b;
  const float minus = -1.0f;
  std::memcpy(negative.data() + 33, &minus, 4);
  std::istringstream neg(negative);
  EXPECT_THROW(read_scube(neg), std::runtime_error);
}

TEST(SpectralCsv, ReadsBundledIlluminant) {
  auto s = read_spectrum_csv(test::kDataDir / "illuminants" / "D65.csv");
  EXPECT_EQ(s.axis, SpectralAxis{});
  EXPECT_NEAR(s.values[16], 100.0, 1e-9);  // normalised at 560 nm
  EXPECT_GT(s.values.minCoeff(), 0.0);
}

TEST(SpectralCsv, ReadsCameraSensitivities) {
  for (const char* cam : {"canon300d", "nikond90", "sonynex5n"}) {
    auto s = read_sensitivity_csv(test::kDataDir / "cameras" / (std::string(cam) + ".csv"), cam);
    EXPECT_EQ(s.rows.rows(), 3);
    EXPECT_EQ(s.rows.cols(), 31);
    EXPECT_NEAR(s.rows.maxCoeff(), 1.0, 1e-12);
    EXPECT_EQ(s.camera_name, cam);
  }
}

TEST(SpectralCsv, RoundTrip) {
  test::ScratchDir dir;
  Rng rng(4);
  Spectrum s(SpectralAxis{}, test::random_vector(rng, 31, 0.0, 10.0));
  write_spectrum_csv(dir / "s.csv", s);
  auto back = read_spectrum_csv(dir / "s.csv");
  EXPECT_EQ(back.axis, s.axis);
  EXPECT_EQ(back.values, s.values);
}

TEST(SpectralCsv, ErrorsNameTheProblem) {
  test::ScratchDir dir;
  write_text(dir / "neg.csv", "wavelength_nm,value\n400,1\n410,-2\n420,1\n");
  try {
    read_spectrum_csv(dir / "neg.csv");
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("-2"), std::string::npos) << e.what();
  }
  write_text(dir / "order.csv", "wavelength_nm,value\n400,1\n420,2\n410,1\n");
  EXPECT_THROW(read_spectrum_csv(dir / "order.csv"), std::runtime_error);
  write_text(dir / "gap.csv", "wavelength_nm,value\n400,1\n410,2\n430,1\n");
  EXPECT_THROW(read_spectrum_csv(dir / "gap.csv"), std::runtime_error);
  write_text(dir / "header.csv", "lambda,value\n400,1\n");
  EXPECT_THROW(read_spectrum_csv(dir / "header.csv"), std::runtime_error);
  write_text(dir / "cols.csv", "wavelength_nm,a,b\n400,1,2\n410,1\n");
  EXPECT_THROW(read_spectral_csv(dir / "cols.csv"), std::runtime_error);
  EXPECT_THROW(read_spectrum_csv(dir / "missing.csv"), std::runtime_error);
}
