#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "detaudit/geometry.hpp"

using namespace detaudit;

namespace {

const ImageDims k10x10{10, 10};

BoundingBox random_box(std::mt19937_64& rng, double extent) {
  std::uniform_real_distribution<double> u(0.0, extent);
  double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  if (a > b) std::swap(a, b);
  if (c > d) std::swap(c, d);
  return {a, c, b + 1e-3, d + 1e-3};
}

}  // namespace

TEST_CASE("iou examples") {
  CHECK(iou({0, 0, 2, 2}, {0, 0, 2, 2}) == 1.0);
  CHECK(iou({0, 0, 1, 1}, {5, 5, 6, 6}) == 0.0);
  CHECK(iou({0, 0, 2, 2}, {1, 1, 3, 3}) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  // Touching edges share no area.
  CHECK(iou({0, 0, 1, 1}, {1, 0, 2, 1}) == 0.0);
}

TEST_CASE("corner_vector divides by image size") {
  CHECK(corner_vector({0, 0, 10, 10}, k10x10) == CornerVector{0, 0, 1, 1});
  CHECK(corner_vector({0, 0, 2, 2}, k10x10) == CornerVector{0, 0, 0.2, 0.2});
  const auto c = corner_vector({1, 1, 3, 3}, k10x10);
  CHECK(c[0] == doctest::Approx(0.1));
  CHECK(c[3] == doctest::Approx(0.3));
  const auto clipped = corner_vector({-5, 0, 20, 10}, k10x10);
  CHECK(clipped[0] == 0.0);
  CHECK(clipped[2] == 1.0);
}

TEST_CASE("gaussian kernel uses the unsquared norm") {
  CHECK(gaussian_kernel({1, 2, 3, 4}, {1, 2, 3, 4}, k10x10, 0.1) == 1.0);
  // ||delta|| = sqrt(4 * 0.01) = 0.2
  CHECK(gaussian_kernel({0, 0, 2, 2}, {1, 1, 3, 3}, k10x10, 0.1) ==
        doctest::Approx(0.13533528323661273).epsilon(1e-14));
  const double far = gaussian_kernel({0, 0, 1, 1}, {9, 9, 10, 10}, k10x10, 0.1);
  CHECK(far > 0.0);
  CHECK(far < 1e-5);
}

TEST_CASE("similarity examples") {
  const SimilarityParams p;
  CHECK(similarity({0, 0, 2, 2}, {0, 0, 2, 2}, k10x10, p) == 1.0);
  CHECK(similarity({0, 0, 2, 2}, {0, 0, 2, 2}, k10x10, {0.37, 0.2}) == 1.0);
  CHECK(similarity({0, 0, 2, 2}, {1, 1, 3, 3}, k10x10, p) ==
        doctest::Approx(0.14210495689508984).epsilon(1e-14));
  const BoundingBox a{0, 0, 1, 1}, b{5, 5, 6, 6};
  CHECK(similarity(a, b, k10x10, p) == doctest::Approx(0.1 * gaussian_kernel(a, b, k10x10, 0.1)));
  CHECK(similarity(a, b, k10x10, p) > 0.0);
}

TEST_CASE("box validity") {
  CHECK(BoundingBox{0, 0, 1, 1}.is_valid());
  CHECK_FALSE(BoundingBox{0, 0, 0, 1}.is_valid());
  CHECK_FALSE(BoundingBox{2, 0, 1, 1}.is_valid());
  CHECK_FALSE(BoundingBox{0, 0, std::nan(""), 1}.is_valid());
  CHECK(BoundingBox::from_xywh(10, 10, 20, 20) == BoundingBox{10, 10, 30, 30});
  CHECK(clip_to_image({-2, 3, 12, 8}, k10x10) == BoundingBox{0, 3, 10, 8});
  CHECK_FALSE(clip_to_image({11, 0, 12, 1}, k10x10).is_valid());
}

TEST_CASE("property: symmetry and ranges on random boxes") {
  std::mt19937_64 rng(7);
  const ImageDims dims{64, 48};
  const SimilarityParams p;
  for (int i = 0; i < 2000; ++i) {
    const BoundingBox a = random_box(rng, 40.0);
    const BoundingBox b = random_box(rng, 40.0);
    const double o = iou(a, b);
    const double k = gaussian_kernel(a, b, dims, p.sigma);
    const double s = similarity(a, b, dims, p);
    REQUIRE(o == iou(b, a));
    REQUIRE(k == gaussian_kernel(b, a, dims, p.sigma));
    REQUIRE(s == similarity(b, a, dims, p));
    REQUIRE(o >= 0.0);
    REQUIRE(o <= 1.0);
    REQUIRE(k > 0.0);
    REQUIRE(k <= 1.0);
    REQUIRE(s > 0.0);
    REQUIRE(s <= 1.0);
    REQUIRE(similarity(a, a, dims, p) == 1.0);
  }
}

TEST_CASE("property: similarity is Lipschitz in one corner") {
  std::mt19937_64 rng(11);
  const ImageDims dims{100, 100};
  const SimilarityParams p;
  for (int i = 0; i < 500; ++i) {
    const BoundingBox a = random_box(rng, 80.0);
    const BoundingBox b = random_box(rng, 80.0);
    for (const double eps : {1e-3, 1e-5}) {
      BoundingBox moved = a;
      moved.x2 += eps;
      const double delta = std::abs(similarity(moved, b, dims, p) - similarity(a, b, dims, p));
      // Bounded difference quotient: the change is O(eps).
      REQUIRE(delta / eps < 100.0);
    }
  }
}

TEST_CASE("property: zero-IoU pairs with different corners do not tie") {
  std::mt19937_64 rng(3);
  const ImageDims dims{100, 100};
  const SimilarityParams p;
  int compared = 0;
  for (int i = 0; i < 500; ++i) {
    const BoundingBox a = random_box(rng, 40.0);
    BoundingBox b1 = random_box(rng, 40.0), b2 = random_box(rng, 40.0);
    b1.x1 += 55; b1.x2 += 55;
    b2.y1 += 55; b2.y2 += 55;
    REQUIRE(iou(a, b1) == 0.0);
    REQUIRE(iou(a, b2) == 0.0);
    const auto d1 = corner_vector(b1, dims), d2 = corner_vector(b2, dims), ca = corner_vector(a, dims);
    double n1 = 0, n2 = 0;
    for (int j = 0; j < 4; ++j) {
      n1 += (d1[j] - ca[j]) * (d1[j] - ca[j]);
      n2 += (d2[j] - ca[j]) * (d2[j] - ca[j]);
    }
    if (n1 == n2) continue;
    ++compared;
    CHECK(similarity(a, b1, dims, p) != similarity(a, b2, dims, p));
  }
  CHECK(compared > 400);
}

TEST_CASE("oracle: iou and similarity against pixel counting") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coord(0, 49);
  const ImageDims dims{50, 50};
  const SimilarityParams p;
  for (int i = 0; i < 300; ++i) {
    auto draw = [&] {
      int a = coord(rng), b = coord(rng), c = coord(rng), d = coord(rng);
      if (a > b) std::swap(a, b);
      if (c > d) std::swap(c, d);
      return oracle::IntBox{a, c, b + 1, d + 1};
    };
    const oracle::IntBox ia = draw(), ib = draw();
    const BoundingBox a{double(ia.x1), double(ia.y1), double(ia.x2), double(ia.y2)};
    const BoundingBox b{double(ib.x1), double(ib.y1), double(ib.x2), double(ib.y2)};
    const double expected_iou = oracle::pixel_iou(ia, ib);
    REQUIRE(std::abs(iou(a, b) - expected_iou) < 1e-9);
    const double expected_sim = p.alpha * oracle::kernel(ia, ib, 50, 50, p.sigma) + (1 - p.alpha) * expected_iou;
    REQUIRE(std::abs(similarity(a, b, dims, p) - expected_sim) < 1e-9);
  }
}
