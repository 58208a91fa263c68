#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "detcal/box.hpp"
#include "detcal/ensembling.hpp"
#include "detcal/exec.hpp"
#include "detcal/types.hpp"

namespace detcal::sim {

inline constexpr int kConfigSchemaVersion = 1;

struct RaterParams {
  std::string id;
  double tau = 0.3;             // ambiguity threshold in (0, 1)
  double label_noise = 0.0;     // std of the Gaussian added to ambiguity before thresholding
  double box_jitter_std = 0.0;  // pixels, per box corner
};

struct DetectorParams {
  double miss_slope = 300.0;  // k in the logistic target probability
  double gamma = 0.2;         // confidence = target^gamma
  double fp_rate = 3.0;       // spurious boxes per image and model (Poisson mean)
  double fp_score_lo = 0.05;
  double fp_score_hi = 0.6;
  double box_jitter_std = 2.5;   // pixels, per box corner
  double model_noise_std = 0.002;  // std of the per-model threshold offset
  /// Correlation of the emission evidence (and box jitter) of one object
  /// across models. 0 makes models independent given the object.
  double evidence_correlation = 0.9;
};

struct SimConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 20240501;
  std::size_t n_images = 100;
  std::size_t n_validation = 15;  // images used for the leaderboard
  std::size_t n_test = 25;        // consensus-annotated images used for evaluation
  int image_width = 640;
  int image_height = 640;
  double objects_per_image_mean = 70.0;
  double size_log_mean = 3.33;
  double size_log_std = 0.3;
  double provenance_quantile = 0.5;  // objects with ambiguity >= this count as retained
  RaterParams rater1{"rater1", 0.15, 0.05, 3.2};
  RaterParams rater2{"rater2", 0.43, 0.05, 3.2};
  DetectorParams detector;
  std::size_t n_label_sampling = 30;
  std::size_t n_rater_specific = 15;  // per rater

  // Experiment settings.
  double lambda = 0.5;
  std::size_t calibration_bins = 10;
  double min_score = 0.05;
  std::vector<double> calibration_ious{0.5, 0.75};
  std::size_t bootstrap_resamples = 100;
  double confidence_level = 0.95;

  /// Throws DomainError naming the offending field.
  void validate() const;
};

struct SimObject {
  BoundingBox box;
  double ambiguity = 0.0;  // in [0, 1]; higher is clearer
  bool disputed = false;   // annotated by exactly one rater
};

struct SimScene {
  std::string image_id;
  ImageInfo info;
  std::vector<SimObject> objects;
};

std::string image_id_for(std::size_t index);

/// Objects only; disputed flags are filled in by simulate_dataset.
std::vector<SimScene> generate_scenes(const SimConfig& cfg, Exec exec = Exec::Parallel);

/// One rater's annotations of one scene. rater_index selects the stream.
std::vector<Annotation> simulate_rater(const SimConfig& cfg, const SimScene& scene, std::size_t scene_index,
                                       const RaterParams& rater, std::size_t rater_index);

/// Objects with ambiguity >= the mean of the two thresholds, boxes unjittered.
std::vector<Annotation> simulate_consensus(const SimConfig& cfg, const SimScene& scene);

enum class ModelKind { LabelSampling, Rater1, Rater2 };

struct ModelRef {
  ModelKind kind = ModelKind::LabelSampling;
  std::size_t index = 0;
};

std::string model_id_for(ModelRef ref);

/// Per-model threshold offset drawn from the model's own stream.
double model_offset(const SimConfig& cfg, ModelRef ref);

/// Latent probability that the model's training labels contain an object of
/// ambiguity a: logistic in a for rater-specific models, the even mixture of
/// both raters' curves for label-sampling models.
double target_probability(const SimConfig& cfg, ModelKind kind, double ambiguity, double offset);

std::vector<Detection> simulate_detector(const SimConfig& cfg, const SimScene& scene, std::size_t scene_index,
                                         ModelRef ref);

struct SimModel {
  ModelRef ref;
  DetectionSet validation;  // detections on the validation images
  DetectionSet test;        // detections on the test images
  double validation_map = 0.0;
};

struct SimDataset {
  SimConfig config;
  std::vector<SimScene> scenes;
  std::vector<std::size_t> validation_indices;
  std::vector<std::size_t> test_indices;
  AnnotationSet rater1;  // all images
  AnnotationSet rater2;  // all images
  AnnotationSet consensus;  // test images
  std::vector<SimModel> models;  // LS pool, then rater-1 pool, then rater-2 pool
  Leaderboard leaderboard;

  std::vector<DetectionSet> test_sets() const;
};

/// Images are split as [training | validation | test] in index order.
SimDataset simulate_dataset(const SimConfig& cfg, Exec exec = Exec::Parallel);

}  // namespace detcal::sim
