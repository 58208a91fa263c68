#include <gtest/gtest.h>

#include <filesystem>
#include <functional>

#include "detcal/error.hpp"
#include "detcal/io.hpp"
#include "support.hpp"

namespace detcal {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("detcal_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "<no error>";
}

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(io::format_number(0.1), "0.1");
  EXPECT_EQ(io::format_number(1.0), "1");
  EXPECT_EQ(io::format_number(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(io::format_number(-2.5e-7), "-2.5e-07");
}

TEST(DetectionFile, RoundTrip) {
  auto set = test::detection_set("m", test::images({"a", "b"}),
                                 {test::det("b", {1.25, 2, 3, 4}, 0.1 + 0.2), test::det("a", {0, 0, 1e-3, 7}, 1.0)});
  set.training_kind = TrainingKind::RaterSpecific;
  set.rater_id = "r1";
  const auto text = io::write_detections(set);
  EXPECT_EQ(io::parse_detections(text), set);
  EXPECT_EQ(io::write_detections(io::parse_detections(text)), text);
}

TEST(DetectionFile, MinimalFileIsEmpty) {
  const auto set = io::parse_detections(R"({"schema_version":"1.0","model_id":"m","images":[],"detections":[]})");
  EXPECT_EQ(set.model_id, "m");
  EXPECT_TRUE(set.detections.empty());
  EXPECT_FALSE(set.training_kind.has_value());
}

TEST(DetectionFile, ErrorsNameThePath) {
  const std::string head = R"({"schema_version":"1.0","model_id":"m","images":[{"id":"a","width":10,"height":10}],)";
  EXPECT_EQ(message_of([&] {
              io::parse_detections(head + R"("detections":[{"image_id":"a","bbox":[0,0,1,1],"score":0.5},
                {"image_id":"a","bbox":[0,0,1,1],"score":1.5}]})");
            }),
            "score out of (0,1] at detections[1].score");
  EXPECT_NE(message_of([&] {
              io::parse_detections(head + R"("detections":[{"image_id":"a","bbox":[0,0,1,1],"score":0.5,"x":1}]})");
            }).find("unknown field at detections[0].x"),
            std::string::npos);
  EXPECT_NE(message_of([&] { io::parse_detections(head + R"("detections":[{"image_id":"a","score":0.5}]})"); })
                .find("missing field at detections[0].bbox"),
            std::string::npos);
  EXPECT_NE(message_of([&] {
              io::parse_detections(R"({"schema_version":"1.0","model_id":"m","images":[{"id":"a","width":10,"height":10},
                {"id":"a","width":10,"height":10}],"detections":[]})");
            }).find("duplicate"),
            std::string::npos);
  EXPECT_NE(message_of([&] { io::parse_detections(head + R"("detections":[{"image_id":"z","bbox":[0,0,1,1],"score":0.5}]})"); })
                .find("detections[0]"),
            std::string::npos);
  EXPECT_NE(message_of([&] { io::parse_detections(head + R"("detections":[{"image_id":"a","bbox":[0,0,0,1],"score":0.5}]})"); })
                .find("detections[0].bbox"),
            std::string::npos);
  EXPECT_NE(message_of([&] { io::parse_detections(R"({"schema_version":"2.0","model_id":"m","images":[],"detections":[]})"); })
                .find("schema_version"),
            std::string::npos);
  EXPECT_THROW(io::parse_detections("{not json"), InputError);
}

TEST(AnnotationFile, ProvenanceIsOptional) {
  const auto set = io::parse_annotations(R"({"schema_version":"1.0","rater_id":"r",
    "images":[{"id":"a","width":10,"height":10}],
    "annotations":[{"image_id":"a","bbox":[0,0,1,1]},{"image_id":"a","bbox":[2,2,1,1],"provenance":"added"}]})");
  ASSERT_EQ(set.annotations.size(), 2u);
  EXPECT_EQ(set.annotations[0].provenance, Provenance::Unknown);
  EXPECT_EQ(set.annotations[1].provenance, Provenance::Added);
  EXPECT_EQ(io::parse_annotations(io::write_annotations(set)), set);
  EXPECT_NE(message_of([] {
              io::parse_annotations(R"({"schema_version":"1.0","rater_id":"r","images":[{"id":"a","width":10,"height":10}],
                "annotations":[{"image_id":"a","bbox":[0,0,1,1],"provenance":"maybe"}]})");
            }).find("annotations[0].provenance"),
            std::string::npos);
}

TEST(Leaderboard, RoundTrip) {
  Leaderboard b;
  b.entries = {{"ls-000", TrainingKind::LabelSampling, std::nullopt, 0.4},
               {"rs1-000", TrainingKind::RaterSpecific, "rater1", 0.45}};
  EXPECT_EQ(io::parse_leaderboard(io::write_leaderboard(b)), b);
}

TEST(SimConfigFile, RoundTripAndDefaults) {
  sim::SimConfig cfg;
  cfg.seed = 7;
  cfg.rater2.tau = 0.5;
  cfg.calibration_ious = {0.5};
  const auto back = io::parse_sim_config(io::write_sim_config(cfg));
  EXPECT_EQ(io::write_sim_config(back), io::write_sim_config(cfg));
  const auto minimal = io::parse_sim_config(R"({"schema_version":1,"seed":5})");
  EXPECT_EQ(minimal.seed, 5u);
  EXPECT_EQ(minimal.n_images, sim::SimConfig{}.n_images);
  EXPECT_THROW(io::parse_sim_config(R"({"seed":5})"), InputError);
  EXPECT_NE(message_of([] { io::parse_sim_config(R"({"schema_version":1,"detector_params":{"gama":0.5}})"); })
                .find("detector_params.gama"),
            std::string::npos);
}

TEST(SimConfigFile, ShippedDefaultMatchesBuiltIn) {
  const auto cfg = io::load_sim_config(fs::path(DETCAL_SOURCE_DIR) / "configs" / "default.json");
  EXPECT_EQ(io::write_sim_config(cfg), io::write_sim_config(sim::SimConfig{}));
}

TEST(Csv, FixedHeaders) {
  EXPECT_STREQ(io::kReliabilityHeader, "bin_lo,bin_hi,count,mean_conf,precision,gap");
  EXPECT_STREQ(io::kAgreementHeader, "iou_threshold,mean_f1,std_f1");
  EXPECT_STREQ(io::kSweepHeader, "strategy,size,metric,mean,std,ci_lo,ci_hi");
  EXPECT_EQ(io::agreement_csv({}), "iou_threshold,mean_f1,std_f1\n");
  EXPECT_EQ(io::sweep_csv({}), "strategy,size,metric,mean,std,ci_lo,ci_hi\n");

  AgreementCurve curve;
  curve.points = {{0.5, 0.625, 0.125}};
  EXPECT_EQ(io::agreement_csv(curve), "iou_threshold,mean_f1,std_f1\n0.5,0.625,0.125\n");
}

TEST(Csv, DefaultLseReliabilityMatchesGolden) {
  const auto golden = io::read_file(fs::path(DETCAL_SOURCE_DIR) / "tests" / "golden" / "reliability_lse_default.csv");
  const std::vector<std::size_t> sizes{2, 4, 8, 12, 16, 20};
  const auto report = run_experiment(sim::SimConfig{}, sizes);
  EXPECT_EQ(io::reliability_csv(report.reliability_lse), golden);
}

TEST(Files, MissingFileNamesThePath) {
  const auto msg = message_of([] { io::load_detections("/nonexistent/dets.json"); });
  EXPECT_NE(msg.find("/nonexistent/dets.json"), std::string::npos);
}

TEST(Files, SimulatedDatasetRoundTripsByteForByte) {
  auto cfg = sim::SimConfig{};
  cfg.n_images = 30;
  cfg.n_validation = 5;
  cfg.n_test = 5;
  cfg.n_label_sampling = 3;
  cfg.n_rater_specific = 2;
  const auto dir = scratch_dir("roundtrip");
  io::write_dataset(sim::simulate_dataset(cfg), dir);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    const auto text = io::read_file(entry.path());
    const auto name = entry.path().filename().string();
    const auto parent = entry.path().parent_path().filename().string();
    std::string again;
    if (name == "config.json") {
      again = io::write_sim_config(io::parse_sim_config(text));
    } else if (name == "leaderboard.json") {
      again = io::write_leaderboard(io::parse_leaderboard(text));
    } else if (parent == "annotations") {
      again = io::write_annotations(io::parse_annotations(text));
    } else {
      again = io::write_detections(io::parse_detections(text));
    }
    EXPECT_EQ(again, text) << entry.path();
    ++files;
  }
  EXPECT_EQ(files, 1u + 3u + 2u * 7u + 1u);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace detcal
