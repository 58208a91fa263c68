#include <gtest/gtest.h>

#include <algorithm>

#include "detcal/error.hpp"
#include "detcal/types.hpp"
#include "support.hpp"

namespace detcal {
namespace {

using test::det;

TEST(DetectionSet, ValidatesScoresBoxesAndImages) {
  auto s = test::detection_set("m", test::images({"a"}), {det("a", {0, 0, 5, 5}, 0.5)});
  EXPECT_NO_THROW(s.validate());

  auto bad = s;
  bad.detections[0].score = 1.5;
  try {
    bad.validate();
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_STREQ(e.what(), "score out of (0,1] at detections[0].score");
  }
  bad = s;
  bad.detections[0].score = 0.0;
  EXPECT_THROW(bad.validate(), InputError);
  bad = s;
  bad.detections[0].box.w = 0;
  EXPECT_THROW(bad.validate(), InputError);
  bad = s;
  bad.detections[0].image_id = "zzz";
  EXPECT_THROW(bad.validate(), InputError);
  bad = s;
  bad.images.push_back(bad.images[0]);
  EXPECT_THROW(bad.validate(), InputError);
  bad = s;
  bad.detections[0].model_id = "other";
  EXPECT_THROW(bad.validate(), InputError);
  bad = s;
  bad.training_kind = TrainingKind::RaterSpecific;
  EXPECT_THROW(bad.validate(), InputError);
}

TEST(AnnotationSet, GroundTruthKeepsEmptyImages) {
  const auto a = test::annotation_set("r", test::images({"x", "y"}), {{"y", {1, 1, 2, 2}, Provenance::Added}});
  a.validate();
  const auto gt = ground_truth(a);
  ASSERT_EQ(gt.size(), 2u);
  EXPECT_TRUE(gt.at("x").empty());
  EXPECT_EQ(gt.at("y").size(), 1u);
}

TEST(Provenance, ParsesAndPrints) {
  for (auto p : {Provenance::Retained, Provenance::Added, Provenance::Unknown}) {
    EXPECT_EQ(parse_provenance(to_string(p)), p);
  }
  EXPECT_THROW(parse_provenance("guessed"), InputError);
  EXPECT_EQ(parse_training_kind("label_sampling"), TrainingKind::LabelSampling);
  EXPECT_EQ(parse_training_kind("rater_specific"), TrainingKind::RaterSpecific);
}

TEST(Canonical, OrdersByImageScoreBoxModel) {
  std::vector<Detection> d{det("b", {0, 0, 1, 1}, 0.5, "m"), det("a", {1, 0, 1, 1}, 0.5, "m"),
                           det("a", {0, 0, 1, 1}, 0.5, "n"), det("a", {0, 0, 1, 1}, 0.5, "m"),
                           det("a", {0, 0, 1, 1}, 0.9, "m")};
  sort_canonical(d);
  EXPECT_EQ(d[0].score, 0.9);
  EXPECT_EQ(d[1].model_id, "m");
  EXPECT_EQ(d[2].model_id, "n");
  EXPECT_EQ(d[3].box.x, 1);
  EXPECT_EQ(d[4].image_id, "b");
}

}  // namespace
}  // namespace detcal
