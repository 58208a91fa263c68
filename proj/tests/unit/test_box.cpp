#include <gtest/gtest.h>

#include "detcal/box.hpp"
#include "detcal/error.hpp"
#include "detcal/rng.hpp"
#include "support.hpp"

namespace detcal {
namespace {

TEST(Iou, IdenticalBoxesGiveOne) { EXPECT_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0); }

TEST(Iou, DisjointBoxesGiveExactlyZero) { EXPECT_EQ(iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0); }

TEST(Iou, TouchingBoxesGiveExactlyZero) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {0, 10, 10, 10}), 0.0);
}

TEST(Iou, HalfShiftedBoxes) { EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0); }

TEST(Iou, ContainedBox) { EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {2, 2, 5, 5}), 25.0 / 100.0); }

TEST(Iou, RejectsInvalidBoxes) {
  EXPECT_THROW(iou({0, 0, 0, 10}, {0, 0, 10, 10}), DomainError);
  EXPECT_THROW(iou({0, 0, 10, 10}, {0, 0, 10, -1}), DomainError);
  EXPECT_THROW(iou({0, 0, 10, 10}, {0, std::numeric_limits<double>::infinity(), 10, 1}), DomainError);
  EXPECT_THROW(iou({std::numeric_limits<double>::quiet_NaN(), 0, 10, 10}, {0, 0, 10, 10}), DomainError);
}

TEST(Iou, PropertiesOnRandomPairs) {
  auto rs = rng::stream(7, rng::Tag::Trial, {1});
  for (int trial = 0; trial < 5000; ++trial) {
    const auto boxes = test::clustered_boxes(rs, 2, 12.0);
    const auto& a = boxes[0];
    const auto& b = boxes[1];
    const double v = iou(a, b);
    EXPECT_EQ(v, iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(iou(a, a), 1.0);

    const double tx = rs.uniform(-50, 50), ty = rs.uniform(-50, 50);
    const BoundingBox at{a.x + tx, a.y + ty, a.w, a.h}, bt{b.x + tx, b.y + ty, b.w, b.h};
    EXPECT_NEAR(iou(at, bt), v, 1e-12);

    const double k = rs.uniform(0.1, 10.0);
    const BoundingBox as{a.x * k, a.y * k, a.w * k, a.h * k}, bs{b.x * k, b.y * k, b.w * k, b.h * k};
    EXPECT_NEAR(iou(as, bs), v, 1e-9);
  }
}

TEST(Box, Accessors) {
  const BoundingBox b{1, 2, 3, 4};
  EXPECT_EQ(b.right(), 4);
  EXPECT_EQ(b.bottom(), 6);
  EXPECT_EQ(b.area(), 12);
  EXPECT_TRUE(b.valid());
  EXPECT_FALSE((BoundingBox{0, 0, 1, 0}).valid());
}

}  // namespace
}  // namespace detcal
