#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "vesseltrace/preprocess.hpp"

using namespace vesseltrace;
namespace vt = vesseltrace::testing;

namespace {

GrayImage random_image(int w, int h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> d(0.0f, 1.0f);
  GrayImage img(w, h);
  for (auto& v : img.pixels()) v = d(rng);
  return img;
}

}  // namespace

TEST_CASE("disk structuring element") {
  const auto se = StructuringElement::disk(2);
  CHECK(se.offsets().size() == 13);
  CHECK(se.run_half_width(0) == 2);
  CHECK(se.run_half_width(-1) == 1);
  CHECK(se.run_half_width(2) == 0);
  CHECK(StructuringElement::disk(0).offsets().size() == 1);
  // r = 8: count lattice points by brute force.
  int n = 0;
  for (int y = -8; y <= 8; ++y)
    for (int x = -8; x <= 8; ++x) n += x * x + y * y <= 64;
  CHECK(StructuringElement::disk(8).offsets().size() == static_cast<std::size_t>(n));
}

TEST_CASE("green channel") {
  RGBImage img(2, 1);
  img(0, 0) = Rgb{10, 200, 30};
  const GrayImage g = green_channel(img);
  CHECK(g(0, 0) == doctest::Approx(200.0 / 255.0));
  CHECK(g(1, 0) == 0.0f);
}

TEST_CASE("derive_fov_mask") {
  SUBCASE("bright disk on black") {
    RGBImage img(41, 41);
    BinaryMask expect(41, 41, 0);
    for (int y = 0; y < 41; ++y)
      for (int x = 0; x < 41; ++x)
        if ((x - 20) * (x - 20) + (y - 20) * (y - 20) <= 225) {
          img(x, y) = Rgb{200, 120, 40};
          expect(x, y) = 1;
        }
    CHECK(derive_fov_mask(img, 0.1) == expect);
  }
  SUBCASE("threshold 0 on a nonblack image keeps the full frame") {
    RGBImage img(7, 5, Rgb{1, 0, 0});
    CHECK(count_true(derive_fov_mask(img, 0.0)) == 35);
  }
  SUBCASE("only the largest blob survives") {
    RGBImage img(60, 40);
    for (int y = 2; y < 7; ++y)
      for (int x = 2; x < 12; ++x) img(x, y) = Rgb{255, 255, 255};  // 50 px
    for (int y = 10; y < 30; ++y)
      for (int x = 30; x < 55; ++x) img(x, y) = Rgb{255, 255, 255};  // 500 px
    const BinaryMask fov = derive_fov_mask(img, 0.1);
    CHECK(count_true(fov) == 500);
    const auto comps = vt::flood_fill_components(fov, Connectivity::Eight);
    REQUIRE(comps.sizes.size() == 2);
    CHECK(fov(40, 20) == 1);
    CHECK(fov(5, 5) == 0);
  }
  SUBCASE("nothing above threshold") {
    CHECK_THROWS_AS(derive_fov_mask(RGBImage(4, 4), 0.1), Error);
  }
}

TEST_CASE("fake_pad") {
  SUBCASE("width 0 is the identity") {
    const GrayImage img = random_image(12, 9, 1);
    BinaryMask fov(12, 9, 0);
    fov(5, 4) = 1;
    const auto out = fake_pad(img, fov, 0);
    CHECK(out.image == img);
    CHECK(out.mask == fov);
  }
  SUBCASE("constant FOV extends with that constant") {
    GrayImage img(30, 30, 0.0f);
    BinaryMask fov(30, 30, 0);
    for (int y = 10; y < 20; ++y)
      for (int x = 8; x < 16; ++x) {
        fov(x, y) = 1;
        img(x, y) = 0.37f;
      }
    const auto out = fake_pad(img, fov, 4);
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (out.mask.pixels()[i]) CHECK(out.image.pixels()[i] == doctest::Approx(0.37f));
    }
    CHECK(out.mask(4, 10) == 1);
    CHECK(out.mask(3, 10) == 0);
  }
  SUBCASE("single pixel grows by its 8 neighbors") {
    GrayImage img(5, 5, 0.0f);
    BinaryMask fov(5, 5, 0);
    img(2, 2) = 1.0f;
    fov(2, 2) = 1;
    const auto out = fake_pad(img, fov, 1);
    CHECK(count_true(out.mask) == 9);
    for (int y = 1; y <= 3; ++y)
      for (int x = 1; x <= 3; ++x) CHECK(out.image(x, y) == 1.0f);
    CHECK(out.image(0, 0) == 0.0f);
  }
  SUBCASE("one round uses only the previous mask") {
    // Hand trace: FOV {(2,2)=0, (3,2)=1}.
    GrayImage img(6, 5, 0.0f);
    BinaryMask fov(6, 5, 0);
    fov(2, 2) = fov(3, 2) = 1;
    img(3, 2) = 1.0f;
    const auto out = fake_pad(img, fov, 1);
    CHECK(out.image(1, 2) == 0.0f);
    CHECK(out.image(2, 1) == 0.5f);
    CHECK(out.image(3, 1) == 0.5f);
    CHECK(out.image(4, 2) == 1.0f);
    CHECK(out.image(4, 1) == 1.0f);
    CHECK(count_true(out.mask) == 12);
  }
  SUBCASE("original FOV pixels are untouched") {
    const GrayImage img = random_image(40, 40, 2);
    BinaryMask fov(40, 40, 0);
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 40; ++x) fov(x, y) = (x - 20) * (x - 20) + (y - 20) * (y - 20) < 100;
    const auto out = fake_pad(img, fov, 6);
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (fov.pixels()[i]) CHECK(out.image.pixels()[i] == img.pixels()[i]);
      if (fov.pixels()[i]) CHECK(out.mask.pixels()[i] == 1);
    }
  }
}

TEST_CASE("grayscale morphology matches brute-force window oracle") {
  for (int radius : {0, 1, 3, 8}) {
    for (auto [w, h] : {std::pair{31, 23}, std::pair{5, 40}, std::pair{9, 9}}) {
      CAPTURE(radius);
      CAPTURE(w);
      const GrayImage img = random_image(w, h, static_cast<std::uint32_t>(radius * 100 + w));
      const auto se = StructuringElement::disk(radius);
      CHECK(gray_erode(img, se) == vt::brute_erode(img, radius));
      CHECK(gray_dilate(img, se) == vt::brute_dilate(img, radius));
      CHECK(gray_open(img, se) == vt::brute_dilate(vt::brute_erode(img, radius), radius));
    }
  }
}

TEST_CASE("morphology examples") {
  const auto se1 = StructuringElement::disk(1);
  const GrayImage flat(12, 8, 0.6f);
  CHECK(gray_erode(flat, se1) == flat);
  CHECK(gray_dilate(flat, se1) == flat);
  CHECK(gray_open(flat, se1) == flat);
  for (float v : vt::values(white_top_hat(flat, StructuringElement::disk(3)))) CHECK(v == 0.0f);

  GrayImage dot(9, 9, 0.0f);
  dot(4, 4) = 1.0f;
  for (float v : vt::values(gray_open(dot, se1))) CHECK(v == 0.0f);
  for (int r : {1, 2, 5}) CHECK(white_top_hat(dot, StructuringElement::disk(r)) == dot);
}

TEST_CASE("opening is anti-extensive and idempotent, top-hat nonnegative") {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const GrayImage img = random_image(24, 20, 500 + seed);
    const auto se = StructuringElement::disk(1 + static_cast<int>(seed % 4));
    const GrayImage opened = gray_open(img, se);
    const GrayImage th = white_top_hat(img, se);
    for (std::size_t i = 0; i < img.size(); ++i) {
      CHECK(opened.pixels()[i] <= img.pixels()[i]);
      CHECK(th.pixels()[i] >= 0.0f);
    }
    CHECK(gray_open(opened, se) == opened);
  }
}

TEST_CASE("erosion/dilation duality under inversion") {
  const GrayImage img = random_image(17, 15, 77);
  const auto se = StructuringElement::disk(3);
  const GrayImage lhs = gray_dilate(invert(img), se);
  const GrayImage rhs = invert(gray_erode(img, se));
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(lhs.pixels()[i] == doctest::Approx(rhs.pixels()[i]));
}

TEST_CASE("CLAHE") {
  PreprocessConfig cfg;
  SUBCASE("constant image is unchanged") {
    const GrayImage img(64, 48, 0.3f);
    CHECK(clahe(img, cfg) == img);
  }
  SUBCASE("two levels, one tile, no clipping map to their CDF values") {
    cfg.clahe_tiles_x = cfg.clahe_tiles_y = 1;
    cfg.clahe_clip = 1e9;
    GrayImage img(10, 10);
    for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = i % 2 ? 0.75f : 0.25f;
    const GrayImage out = clahe(img, cfg);
    for (std::size_t i = 0; i < img.size(); ++i) {
      CHECK(out.pixels()[i] == doctest::Approx(i % 2 ? 1.0 : 0.5));
    }
  }
  SUBCASE("one tile without clipping is global histogram equalization") {
    cfg.clahe_tiles_x = cfg.clahe_tiles_y = 1;
    cfg.clahe_clip = 1e9;
    const GrayImage img = random_image(33, 21, 8);
    const GrayImage out = clahe(img, cfg);
    // Oracle: fraction of pixels in the same or a lower bin.
    auto bin = [&](float v) { return std::min(255, static_cast<int>(v * 256.0f)); };
    for (std::size_t i = 0; i < img.size(); ++i) {
      std::size_t below = 0;
      for (float u : img.pixels()) below += bin(u) <= bin(img.pixels()[i]);
      CHECK(out.pixels()[i] == doctest::Approx(static_cast<double>(below) / img.size()).epsilon(1e-5));
    }
  }
  SUBCASE("output stays in [0, 1] and is monotone within a tile") {
    cfg.clahe_tiles_x = 4;
    cfg.clahe_tiles_y = 3;
    const GrayImage img = random_image(80, 60, 12);
    const GrayImage out = clahe(img, cfg);
    for (float v : out.pixels()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
    cfg.clahe_tiles_x = cfg.clahe_tiles_y = 1;
    cfg.clahe_clip = 1.5;
    const GrayImage one = clahe(img, cfg);
    for (std::size_t i = 1; i < img.size(); ++i) {
      if (img.pixels()[i] > img.pixels()[0]) CHECK(one.pixels()[i] >= one.pixels()[0]);
    }
  }
}

TEST_CASE("config validation") {
  PreprocessConfig ok;
  CHECK_NOTHROW(ok.validate());
  auto broken = [](auto mutate) {
    PreprocessConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(broken([](auto& c) { c.tophat_radius = -1; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.pad_width = -2; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.clahe_tiles_x = 0; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.clahe_clip = 0.5; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.clahe_bins = 1; }).validate(), Error);
}

TEST_CASE("preprocess pipeline") {
  SUBCASE("vessels come out brighter than background") {
    const auto f = vt::make_synthetic_fundus(21, {.width = 160, .height = 160, .strokes = 8});
    const auto pre = preprocess_pipeline(f.image, f.fov, PreprocessConfig{});
    double sv = 0, sb = 0;
    std::size_t nv = 0, nb = 0;
    for (std::size_t i = 0; i < f.fov.size(); ++i) {
      if (!f.fov.pixels()[i]) continue;
      (f.vessels.pixels()[i] ? sv : sb) += pre.image.pixels()[i];
      (f.vessels.pixels()[i] ? nv : nb) += 1;
    }
    REQUIRE(nv > 0);
    CHECK(sv / nv > sb / nb + 0.1);
    for (float v : pre.image.pixels()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
    // Extended FOV contains the original one.
    for (std::size_t i = 0; i < f.fov.size(); ++i)
      if (f.fov.pixels()[i]) CHECK(pre.fov.pixels()[i]);
  }
  SUBCASE("all-black input with full-frame FOV gives zeros") {
    const auto pre = preprocess_pipeline(RGBImage(32, 24), BinaryMask(32, 24, 1), PreprocessConfig{});
    for (float v : pre.image.pixels()) CHECK(v == 0.0f);
  }
  SUBCASE("constant image is a fixed point of every stage") {
    const RGBImage img(40, 40, Rgb{90, 140, 20});
    const auto pre = preprocess_pipeline(img, BinaryMask(40, 40, 1), PreprocessConfig{});
    for (float v : pre.stages.padded.pixels()) CHECK(v == pre.stages.inverted(0, 0));
    for (float v : pre.stages.tophat.pixels()) CHECK(v == 0.0f);
    for (float v : pre.stages.clahe.pixels()) CHECK(v == 0.0f);
    for (float v : pre.image.pixels()) CHECK(v == 0.0f);
  }
  SUBCASE("disabled top-hat passes the padded image through") {
    const auto f = vt::make_synthetic_fundus(3, {.width = 64, .height = 64, .strokes = 3});
    PreprocessConfig cfg;
    cfg.tophat_enabled = false;
    const auto pre = preprocess_pipeline(f.image, f.fov, cfg);
    CHECK(pre.stages.tophat == pre.stages.padded);
  }
  SUBCASE("deterministic") {
    const auto f = vt::make_synthetic_fundus(4, {.width = 80, .height = 80, .strokes = 4});
    const auto a = preprocess_pipeline(f.image, f.fov, PreprocessConfig{});
    const auto b = preprocess_pipeline(f.image, f.fov, PreprocessConfig{});
    CHECK(a.image == b.image);
    CHECK(a.fov == b.fov);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(preprocess_pipeline(RGBImage(8, 8), BinaryMask(8, 7, 1), PreprocessConfig{}), Error);
  }
}
