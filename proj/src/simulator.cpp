#include "detcal/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "detcal/error.hpp"
#include "detcal/matching.hpp"
#include "detcal/rng.hpp"

namespace detcal::sim {

namespace {

void require(bool ok, const std::string& field, const std::string& constraint) {
  if (!ok) throw DomainError("invalid config: " + field + " " + constraint);
}

void validate_rater(const RaterParams& r, const std::string& name) {
  require(!r.id.empty(), name + ".id", "must be non-empty");
  require(r.tau > 0.0 && r.tau < 1.0, name + ".tau", "must lie in (0,1)");
  require(r.label_noise >= 0.0 && std::isfinite(r.label_noise), name + ".label_noise", "must be >= 0");
  require(r.box_jitter_std >= 0.0 && std::isfinite(r.box_jitter_std), name + ".box_jitter_std", "must be >= 0");
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

constexpr double kMinBoxSide = 4.0;

/// Box from corner coordinates, clipped to the image and widened to at least
/// `min_side` pixels per axis while staying inside it.
BoundingBox box_from_corners(double x0, double y0, double x1, double y1, double width, double height,
                             double min_side) {
  auto axis = [min_side](double lo, double hi, double extent) {
    if (hi < lo) std::swap(lo, hi);
    lo = std::clamp(lo, 0.0, extent);
    hi = std::clamp(hi, 0.0, extent);
    if (hi - lo < min_side) {
      const double mid = std::clamp(0.5 * (lo + hi), 0.5 * min_side, extent - 0.5 * min_side);
      lo = mid - 0.5 * min_side;
      hi = mid + 0.5 * min_side;
    }
    return std::pair{lo, hi - lo};
  };
  const auto [x, w] = axis(x0, x1, width);
  const auto [y, h] = axis(y0, y1, height);
  return {x, y, w, h};
}

BoundingBox random_box(rng::Stream& rs, const SimConfig& cfg) {
  const double w_img = cfg.image_width;
  const double h_img = cfg.image_height;
  const double cx = rs.uniform(0.0, w_img);
  const double cy = rs.uniform(0.0, h_img);
  const double w = std::exp(rs.normal(cfg.size_log_mean, cfg.size_log_std));
  const double h = std::exp(rs.normal(cfg.size_log_mean, cfg.size_log_std));
  return box_from_corners(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h, w_img, h_img, kMinBoxSide);
}

BoundingBox jittered(const BoundingBox& b, const std::array<double, 4>& offsets, const SimConfig& cfg) {
  return box_from_corners(b.x + offsets[0], b.y + offsets[1], b.right() + offsets[2], b.bottom() + offsets[3],
                          cfg.image_width, cfg.image_height, 1.0);
}

/// Per-object evidence shared by all models on one scene: one emission
/// variate and four corner-jitter variates, all standard normal.
struct ObjectEvidence {
  double emission = 0.0;
  std::array<double, 4> jitter{};
};

std::vector<ObjectEvidence> scene_evidence(const SimConfig& cfg, std::size_t scene_index, std::size_t n_objects) {
  auto rs = rng::stream(cfg.seed, rng::Tag::Evidence, {scene_index});
  std::vector<ObjectEvidence> ev(n_objects);
  for (auto& e : ev) {
    e.emission = rs.normal();
    for (auto& j : e.jitter) j = rs.normal();
  }
  return ev;
}

std::uint64_t kind_code(ModelKind k) {
  switch (k) {
    case ModelKind::LabelSampling:
      return 0;
    case ModelKind::Rater1:
      return 1;
    case ModelKind::Rater2:
      return 2;
  }
  return 0;
}

/// Annotations of one rater plus, per object, whether it was annotated.
std::vector<Annotation> annotate(const SimConfig& cfg, const SimScene& scene, std::size_t scene_index,
                                 const RaterParams& rater, std::size_t rater_index, std::vector<bool>* marks) {
  auto rs = rng::stream(cfg.seed, rng::Tag::Rater, {rater_index, scene_index});
  std::vector<Annotation> out;
  if (marks) marks->assign(scene.objects.size(), false);
  for (std::size_t j = 0; j < scene.objects.size(); ++j) {
    const auto& obj = scene.objects[j];
    const double noise = rs.normal();
    std::array<double, 4> offsets{};
    for (auto& o : offsets) o = rater.box_jitter_std * rs.normal();
    if (obj.ambiguity + rater.label_noise * noise < rater.tau) continue;
    if (marks) (*marks)[j] = true;
    const auto prov = obj.ambiguity >= cfg.provenance_quantile ? Provenance::Retained : Provenance::Added;
    out.push_back({scene.image_id, jittered(obj.box, offsets, cfg), prov});
  }
  return out;
}

std::vector<ImageInfo> infos(const std::vector<SimScene>& scenes, std::span<const std::size_t> indices) {
  std::vector<ImageInfo> out;
  for (auto i : indices) out.push_back(scenes[i].info);
  return out;
}

}  // namespace

void SimConfig::validate() const {
  require(schema_version == kConfigSchemaVersion, "schema_version",
          "must be " + std::to_string(kConfigSchemaVersion));
  require(n_images >= 1 && n_images <= 999999, "n_images", "must lie in [1, 999999]");
  require(n_validation >= 1, "n_validation", "must be >= 1");
  require(n_test >= 1, "n_test", "must be >= 1");
  require(n_validation + n_test <= n_images, "n_validation + n_test", "must not exceed n_images");
  require(image_width >= 32 && image_height >= 32, "image_size", "must be at least 32x32 pixels");
  require(objects_per_image_mean >= 0.0 && std::isfinite(objects_per_image_mean), "objects_per_image_mean",
          "must be >= 0");
  require(std::isfinite(size_log_mean), "size_log_mean", "must be finite");
  require(size_log_std >= 0.0 && std::isfinite(size_log_std), "size_log_std", "must be >= 0");
  require(provenance_quantile >= 0.0 && provenance_quantile <= 1.0, "provenance_quantile", "must lie in [0,1]");
  validate_rater(rater1, "rater1");
  validate_rater(rater2, "rater2");
  require(rater1.id != rater2.id, "rater2.id", "must differ from rater1.id");
  const auto& d = detector;
  require(d.miss_slope > 0.0 && std::isfinite(d.miss_slope), "detector.miss_slope", "must be > 0");
  require(d.gamma > 0.0 && d.gamma <= 1.0, "detector.gamma", "must lie in (0,1]");
  require(d.fp_rate >= 0.0 && std::isfinite(d.fp_rate), "detector.fp_rate", "must be >= 0");
  require(d.fp_score_lo > 0.0 && d.fp_score_lo <= d.fp_score_hi && d.fp_score_hi <= 1.0,
          "detector.fp_score_lo/fp_score_hi", "must satisfy 0 < lo <= hi <= 1");
  require(d.box_jitter_std >= 0.0 && std::isfinite(d.box_jitter_std), "detector.box_jitter_std", "must be >= 0");
  require(d.model_noise_std >= 0.0 && std::isfinite(d.model_noise_std), "detector.model_noise_std",
          "must be >= 0");
  require(d.evidence_correlation >= 0.0 && d.evidence_correlation <= 1.0, "detector.evidence_correlation",
          "must lie in [0,1]");
  require(lambda > 0.0 && lambda <= 1.0, "lambda", "must lie in (0,1]");
  require(calibration_bins >= 1, "calibration_bins", "must be >= 1");
  require(min_score >= 0.0 && min_score < 1.0, "min_score", "must lie in [0,1)");
  require(!calibration_ious.empty(), "calibration_ious", "must be non-empty");
  for (double t : calibration_ious) require(t > 0.0 && t <= 1.0, "calibration_ious", "values must lie in (0,1]");
  require(bootstrap_resamples >= 1, "bootstrap_resamples", "must be >= 1");
  require(confidence_level > 0.0 && confidence_level < 1.0, "confidence_level", "must lie in (0,1)");
}

std::string image_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%06zu", index);
  return buf;
}

std::vector<SimScene> generate_scenes(const SimConfig& cfg, Exec exec) {
  cfg.validate();
  std::vector<SimScene> scenes(cfg.n_images);
  parallel_for(exec, cfg.n_images, [&](std::size_t i) {
    auto rs = rng::stream(cfg.seed, rng::Tag::Scene, {i});
    auto& scene = scenes[i];
    scene.image_id = image_id_for(i);
    scene.info = {scene.image_id, cfg.image_width, cfg.image_height};
    const auto n = rs.poisson(cfg.objects_per_image_mean);
    scene.objects.reserve(n);
    for (std::uint64_t j = 0; j < n; ++j) {
      SimObject obj;
      obj.box = random_box(rs, cfg);
      obj.ambiguity = rs.uniform();
      scene.objects.push_back(obj);
    }
  });
  return scenes;
}

std::vector<Annotation> simulate_rater(const SimConfig& cfg, const SimScene& scene, std::size_t scene_index,
                                       const RaterParams& rater, std::size_t rater_index) {
  return annotate(cfg, scene, scene_index, rater, rater_index, nullptr);
}

std::vector<Annotation> simulate_consensus(const SimConfig& cfg, const SimScene& scene) {
  const double tau = 0.5 * (cfg.rater1.tau + cfg.rater2.tau);
  std::vector<Annotation> out;
  for (const auto& obj : scene.objects) {
    if (obj.ambiguity < tau) continue;
    const auto prov = obj.ambiguity >= cfg.provenance_quantile ? Provenance::Retained : Provenance::Added;
    out.push_back({scene.image_id, obj.box, prov});
  }
  return out;
}

std::string model_id_for(ModelRef ref) {
  const char* prefix = ref.kind == ModelKind::LabelSampling ? "ls" : ref.kind == ModelKind::Rater1 ? "rs1" : "rs2";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%03zu", prefix, ref.index);
  return buf;
}

double model_offset(const SimConfig& cfg, ModelRef ref) {
  auto rs = rng::stream(cfg.seed, rng::Tag::Model, {kind_code(ref.kind), ref.index});
  return rs.normal(0.0, cfg.detector.model_noise_std);
}

double target_probability(const SimConfig& cfg, ModelKind kind, double ambiguity, double offset) {
  const double k = cfg.detector.miss_slope;
  const double p1 = logistic(k * (ambiguity - cfg.rater1.tau + offset));
  const double p2 = logistic(k * (ambiguity - cfg.rater2.tau + offset));
  switch (kind) {
    case ModelKind::Rater1:
      return p1;
    case ModelKind::Rater2:
      return p2;
    case ModelKind::LabelSampling:
      break;
  }
  return 0.5 * p1 + 0.5 * p2;
}

std::vector<Detection> simulate_detector(const SimConfig& cfg, const SimScene& scene, std::size_t scene_index,
                                         ModelRef ref) {
  const auto& d = cfg.detector;
  const double offset = model_offset(cfg, ref);
  const auto evidence = scene_evidence(cfg, scene_index, scene.objects.size());
  const double shared = std::sqrt(d.evidence_correlation);
  const double own = std::sqrt(1.0 - d.evidence_correlation);
  const std::string model_id = model_id_for(ref);

  auto rs = rng::stream(cfg.seed, rng::Tag::ModelImage, {kind_code(ref.kind), ref.index, scene_index});
  std::vector<Detection> out;
  for (std::size_t j = 0; j < scene.objects.size(); ++j) {
    const auto& obj = scene.objects[j];
    const auto& ev = evidence[j];
    const double u = rng::normal_cdf(shared * ev.emission + own * rs.normal());
    std::array<double, 4> offsets{};
    for (std::size_t c = 0; c < 4; ++c) {
      offsets[c] = d.box_jitter_std * (shared * ev.jitter[c] + own * rs.normal());
    }
    const double conf = std::pow(target_probability(cfg, ref.kind, obj.ambiguity, offset), d.gamma);
    if (!(u < conf)) continue;
    out.push_back({scene.image_id, jittered(obj.box, offsets, cfg), std::min(conf, 1.0), model_id});
  }
  const auto n_fp = rs.poisson(d.fp_rate);
  for (std::uint64_t f = 0; f < n_fp; ++f) {
    const double score = rs.uniform(d.fp_score_lo, d.fp_score_hi);
    out.push_back({scene.image_id, random_box(rs, cfg), score, model_id});
  }
  return out;
}

std::vector<DetectionSet> SimDataset::test_sets() const {
  std::vector<DetectionSet> out;
  out.reserve(models.size());
  for (const auto& m : models) out.push_back(m.test);
  return out;
}

SimDataset simulate_dataset(const SimConfig& cfg, Exec exec) {
  cfg.validate();
  SimDataset ds;
  ds.config = cfg;
  ds.scenes = generate_scenes(cfg, exec);
  const std::size_t n_train = cfg.n_images - cfg.n_validation - cfg.n_test;
  for (std::size_t i = 0; i < cfg.n_validation; ++i) ds.validation_indices.push_back(n_train + i);
  for (std::size_t i = 0; i < cfg.n_test; ++i) ds.test_indices.push_back(n_train + cfg.n_validation + i);

  const std::size_t n = ds.scenes.size();
  std::vector<std::vector<Annotation>> r1(n), r2(n);
  parallel_for(exec, n, [&](std::size_t i) {
    std::vector<bool> m1, m2;
    r1[i] = annotate(cfg, ds.scenes[i], i, cfg.rater1, 0, &m1);
    r2[i] = annotate(cfg, ds.scenes[i], i, cfg.rater2, 1, &m2);
    auto& objects = ds.scenes[i].objects;
    for (std::size_t j = 0; j < objects.size(); ++j) objects[j].disputed = m1[j] != m2[j];
  });
  ds.rater1.rater_id = cfg.rater1.id;
  ds.rater2.rater_id = cfg.rater2.id;
  for (std::size_t i = 0; i < n; ++i) {
    ds.rater1.images.push_back(ds.scenes[i].info);
    ds.rater2.images.push_back(ds.scenes[i].info);
    ds.rater1.annotations.insert(ds.rater1.annotations.end(), r1[i].begin(), r1[i].end());
    ds.rater2.annotations.insert(ds.rater2.annotations.end(), r2[i].begin(), r2[i].end());
  }
  ds.consensus.rater_id = "consensus";
  ds.consensus.images = infos(ds.scenes, ds.test_indices);
  for (auto i : ds.test_indices) {
    const auto rows = simulate_consensus(cfg, ds.scenes[i]);
    ds.consensus.annotations.insert(ds.consensus.annotations.end(), rows.begin(), rows.end());
  }

  std::vector<ModelRef> refs;
  for (std::size_t k = 0; k < cfg.n_label_sampling; ++k) refs.push_back({ModelKind::LabelSampling, k});
  for (std::size_t k = 0; k < cfg.n_rater_specific; ++k) refs.push_back({ModelKind::Rater1, k});
  for (std::size_t k = 0; k < cfg.n_rater_specific; ++k) refs.push_back({ModelKind::Rater2, k});

  std::vector<std::size_t> eval_indices = ds.validation_indices;
  eval_indices.insert(eval_indices.end(), ds.test_indices.begin(), ds.test_indices.end());
  const std::size_t n_eval = eval_indices.size();
  std::vector<std::vector<Detection>> cells(refs.size() * n_eval);
  parallel_for(exec, cells.size(), [&](std::size_t c) {
    const auto scene_index = eval_indices[c % n_eval];
    cells[c] = simulate_detector(cfg, ds.scenes[scene_index], scene_index, refs[c / n_eval]);
  });

  // Validation ground truth: each rater's own labels, and for label-sampling
  // models one rater drawn per image.
  GroundTruth gt_r1, gt_r2, gt_mixed;
  for (auto i : ds.validation_indices) {
    auto boxes = [](const std::vector<Annotation>& rows) {
      std::vector<BoundingBox> b;
      for (const auto& a : rows) b.push_back(a.box);
      return b;
    };
    const auto& id = ds.scenes[i].image_id;
    gt_r1[id] = boxes(r1[i]);
    gt_r2[id] = boxes(r2[i]);
    auto rs = rng::stream(cfg.seed, rng::Tag::ValidationDraw, {i});
    gt_mixed[id] = rs.below(2) == 0 ? gt_r1[id] : gt_r2[id];
  }

  ds.models.resize(refs.size());
  const auto val_infos = infos(ds.scenes, ds.validation_indices);
  const auto test_infos = infos(ds.scenes, ds.test_indices);
  parallel_for(exec, refs.size(), [&](std::size_t m) {
    auto& model = ds.models[m];
    model.ref = refs[m];
    const auto id = model_id_for(refs[m]);
    const auto kind =
        refs[m].kind == ModelKind::LabelSampling ? TrainingKind::LabelSampling : TrainingKind::RaterSpecific;
    std::optional<std::string> rater;
    if (refs[m].kind == ModelKind::Rater1) rater = cfg.rater1.id;
    if (refs[m].kind == ModelKind::Rater2) rater = cfg.rater2.id;
    for (auto* set : {&model.validation, &model.test}) {
      set->model_id = id;
      set->training_kind = kind;
      set->rater_id = rater;
    }
    model.validation.images = val_infos;
    model.test.images = test_infos;
    for (std::size_t e = 0; e < n_eval; ++e) {
      auto& target = e < cfg.n_validation ? model.validation.detections : model.test.detections;
      const auto& cell = cells[m * n_eval + e];
      target.insert(target.end(), cell.begin(), cell.end());
    }
    sort_canonical(model.validation.detections);
    sort_canonical(model.test.detections);
    const auto& gt = refs[m].kind == ModelKind::Rater1 ? gt_r1 : refs[m].kind == ModelKind::Rater2 ? gt_r2 : gt_mixed;
    model.validation_map = evaluate(model.validation.detections, gt, EvalOptions{}, Exec::Serial).map;
  });

  for (const auto& model : ds.models) {
    ds.leaderboard.entries.push_back(
        {model.test.model_id, *model.test.training_kind, model.test.rater_id, model.validation_map});
  }
  return ds;
}

}  // namespace detcal::sim
