#include "detcal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "detcal/error.hpp"

namespace detcal::io {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string element(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::string where(const std::string& path) { return path.empty() ? "top level" : path; }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

/// An object whose keys must come from a known list.
class Fields {
 public:
  Fields(const json& j, std::string path, std::initializer_list<std::string_view> known)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw InputError("expected an object at " + where(path_));
    for (const auto& [key, value] : j.items()) {
      bool ok = false;
      for (auto k : known) ok = ok || key == k;
      if (!ok) throw InputError("unknown field at " + child(path_, key));
    }
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  const json& at(std::string_view key) const {
    if (!has(key)) throw InputError("missing field at " + child(path_, key));
    return j_.at(std::string(key));
  }

  std::string path(std::string_view key) const { return child(path_, key); }

 private:
  const json& j_;
  std::string path_;
};

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw InputError("expected a string at " + path);
  return j.get<std::string>();
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw InputError("expected a number at " + path);
  return j.get<double>();
}

std::int64_t as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw InputError("expected an integer at " + path);
  return j.get<std::int64_t>();
}

std::uint64_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw InputError("expected a non-negative integer at " + path);
  return j.get<std::uint64_t>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw InputError("expected an array at " + path);
  return j;
}

void check_schema(const Fields& f) {
  const auto v = as_string(f.at("schema_version"), f.path("schema_version"));
  if (v != kSchemaVersion) {
    throw InputError("unsupported schema_version '" + v + "' (expected " + kSchemaVersion + ") at schema_version");
  }
}

BoundingBox parse_bbox(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) throw InputError("bbox must be [x,y,w,h] at " + path);
  BoundingBox b;
  b.x = as_number(j[0], element(path, 0));
  b.y = as_number(j[1], element(path, 1));
  b.w = as_number(j[2], element(path, 2));
  b.h = as_number(j[3], element(path, 3));
  return b;
}

ojson bbox_json(const BoundingBox& b) { return ojson::array({b.x, b.y, b.w, b.h}); }

std::vector<ImageInfo> parse_images(const json& j, const std::string& path) {
  std::vector<ImageInfo> out;
  const auto& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto at = element(path, i);
    const Fields f(arr[i], at, {"id", "width", "height"});
    ImageInfo info;
    info.id = as_string(f.at("id"), f.path("id"));
    const auto w = as_int(f.at("width"), f.path("width"));
    const auto h = as_int(f.at("height"), f.path("height"));
    if (w <= 0 || w > 1'000'000) throw InputError("width must be a positive pixel count at " + f.path("width"));
    if (h <= 0 || h > 1'000'000) throw InputError("height must be a positive pixel count at " + f.path("height"));
    info.width = static_cast<int>(w);
    info.height = static_cast<int>(h);
    out.push_back(std::move(info));
  }
  return out;
}

ojson images_json(const std::vector<ImageInfo>& images) {
  ojson arr = ojson::array();
  for (const auto& img : images) arr.push_back({{"id", img.id}, {"width", img.width}, {"height", img.height}});
  return arr;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

template <typename Fn>
auto rethrow_as_input(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid JSON value: ") + e.what());
  }
}

}  // namespace

DetectionSet parse_detections(const std::string& text) {
  return rethrow_as_input([&] {
    const auto j = parse_json(text);
    const Fields f(j, "", {"schema_version", "model_id", "training_kind", "rater_id", "images", "detections"});
    check_schema(f);
    DetectionSet set;
    set.model_id = as_string(f.at("model_id"), "model_id");
    if (f.has("training_kind")) {
      try {
        set.training_kind = parse_training_kind(as_string(f.at("training_kind"), "training_kind"));
      } catch (const InputError& e) {
        throw InputError(std::string(e.what()) + " at training_kind");
      }
    }
    if (f.has("rater_id")) set.rater_id = as_string(f.at("rater_id"), "rater_id");
    set.images = parse_images(f.at("images"), "images");
    const auto& arr = as_array(f.at("detections"), "detections");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Fields d(arr[i], element("detections", i), {"image_id", "bbox", "score"});
      Detection det;
      det.image_id = as_string(d.at("image_id"), d.path("image_id"));
      det.box = parse_bbox(d.at("bbox"), d.path("bbox"));
      det.score = as_number(d.at("score"), d.path("score"));
      det.model_id = set.model_id;
      set.detections.push_back(std::move(det));
    }
    set.validate();
    return set;
  });
}

std::string write_detections(const DetectionSet& set) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["model_id"] = set.model_id;
  if (set.training_kind) j["training_kind"] = std::string(to_string(*set.training_kind));
  if (set.rater_id) j["rater_id"] = *set.rater_id;
  j["images"] = images_json(set.images);
  ojson dets = ojson::array();
  for (const auto& d : set.detections) {
    dets.push_back({{"image_id", d.image_id}, {"bbox", bbox_json(d.box)}, {"score", d.score}});
  }
  j["detections"] = std::move(dets);
  return dump(j);
}

AnnotationSet parse_annotations(const std::string& text) {
  return rethrow_as_input([&] {
    const auto j = parse_json(text);
    const Fields f(j, "", {"schema_version", "rater_id", "images", "annotations"});
    check_schema(f);
    AnnotationSet set;
    set.rater_id = as_string(f.at("rater_id"), "rater_id");
    set.images = parse_images(f.at("images"), "images");
    const auto& arr = as_array(f.at("annotations"), "annotations");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Fields a(arr[i], element("annotations", i), {"image_id", "bbox", "provenance"});
      Annotation ann;
      ann.image_id = as_string(a.at("image_id"), a.path("image_id"));
      ann.box = parse_bbox(a.at("bbox"), a.path("bbox"));
      if (a.has("provenance")) {
        const auto p = as_string(a.at("provenance"), a.path("provenance"));
        if (p != "retained" && p != "added") {
          throw InputError("provenance must be 'retained' or 'added' at " + a.path("provenance"));
        }
        ann.provenance = parse_provenance(p);
      }
      set.annotations.push_back(std::move(ann));
    }
    set.validate();
    return set;
  });
}

std::string write_annotations(const AnnotationSet& set) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["rater_id"] = set.rater_id;
  j["images"] = images_json(set.images);
  ojson rows = ojson::array();
  for (const auto& a : set.annotations) {
    ojson row{{"image_id", a.image_id}, {"bbox", bbox_json(a.box)}};
    if (a.provenance != Provenance::Unknown) row["provenance"] = std::string(to_string(a.provenance));
    rows.push_back(std::move(row));
  }
  j["annotations"] = std::move(rows);
  return dump(j);
}

Leaderboard parse_leaderboard(const std::string& text) {
  return rethrow_as_input([&] {
    const auto j = parse_json(text);
    const Fields f(j, "", {"schema_version", "entries"});
    check_schema(f);
    Leaderboard board;
    const auto& arr = as_array(f.at("entries"), "entries");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Fields e(arr[i], element("entries", i), {"model_id", "training_kind", "rater_id", "validation_map"});
      LeaderboardEntry entry;
      entry.model_id = as_string(e.at("model_id"), e.path("model_id"));
      try {
        entry.training_kind = parse_training_kind(as_string(e.at("training_kind"), e.path("training_kind")));
      } catch (const InputError& err) {
        throw InputError(std::string(err.what()) + " at " + e.path("training_kind"));
      }
      if (e.has("rater_id")) entry.rater_id = as_string(e.at("rater_id"), e.path("rater_id"));
      entry.validation_map = as_number(e.at("validation_map"), e.path("validation_map"));
      board.entries.push_back(std::move(entry));
    }
    board.validate();
    return board;
  });
}

std::string write_leaderboard(const Leaderboard& board) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  ojson rows = ojson::array();
  for (const auto& e : board.entries) {
    ojson row{{"model_id", e.model_id}, {"training_kind", std::string(to_string(e.training_kind))}};
    if (e.rater_id) row["rater_id"] = *e.rater_id;
    row["validation_map"] = e.validation_map;
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return dump(j);
}

namespace {

void read_rater(const json& j, const std::string& path, sim::RaterParams& r) {
  const Fields f(j, path, {"id", "tau", "label_noise", "box_jitter_std"});
  if (f.has("id")) r.id = as_string(f.at("id"), f.path("id"));
  if (f.has("tau")) r.tau = as_number(f.at("tau"), f.path("tau"));
  if (f.has("label_noise")) r.label_noise = as_number(f.at("label_noise"), f.path("label_noise"));
  if (f.has("box_jitter_std")) r.box_jitter_std = as_number(f.at("box_jitter_std"), f.path("box_jitter_std"));
}

ojson rater_json(const sim::RaterParams& r) {
  return {{"id", r.id}, {"tau", r.tau}, {"label_noise", r.label_noise}, {"box_jitter_std", r.box_jitter_std}};
}

}  // namespace

sim::SimConfig parse_sim_config(const std::string& text) {
  auto cfg = rethrow_as_input([&] {
    const auto j = parse_json(text);
    const Fields f(j, "",
                   {"schema_version", "seed", "n_images", "n_validation", "n_test", "image_size",
                    "objects_per_image_mean", "size_log_mean", "size_log_std", "provenance_quantile", "rater_params",
                    "detector_params", "n_models_per_pool", "experiment"});
    sim::SimConfig cfg;
    cfg.schema_version = static_cast<int>(as_int(f.at("schema_version"), "schema_version"));
    if (f.has("seed")) cfg.seed = as_count(f.at("seed"), "seed");
    if (f.has("n_images")) cfg.n_images = as_count(f.at("n_images"), "n_images");
    if (f.has("n_validation")) cfg.n_validation = as_count(f.at("n_validation"), "n_validation");
    if (f.has("n_test")) cfg.n_test = as_count(f.at("n_test"), "n_test");
    if (f.has("image_size")) {
      const auto& s = f.at("image_size");
      if (!s.is_array() || s.size() != 2) throw InputError("image_size must be [width, height] at image_size");
      cfg.image_width = static_cast<int>(std::clamp<std::int64_t>(as_int(s[0], "image_size[0]"), -1, 1'000'000));
      cfg.image_height = static_cast<int>(std::clamp<std::int64_t>(as_int(s[1], "image_size[1]"), -1, 1'000'000));
    }
    auto number = [&](std::string_view key, double& dst) {
      if (f.has(key)) dst = as_number(f.at(key), f.path(key));
    };
    number("objects_per_image_mean", cfg.objects_per_image_mean);
    number("size_log_mean", cfg.size_log_mean);
    number("size_log_std", cfg.size_log_std);
    number("provenance_quantile", cfg.provenance_quantile);
    if (f.has("rater_params")) {
      const auto& arr = as_array(f.at("rater_params"), "rater_params");
      if (arr.size() != 2) throw InputError("exactly two raters required at rater_params");
      read_rater(arr[0], "rater_params[0]", cfg.rater1);
      read_rater(arr[1], "rater_params[1]", cfg.rater2);
    }
    if (f.has("detector_params")) {
      const Fields d(f.at("detector_params"), "detector_params",
                     {"miss_slope", "gamma", "fp_rate", "fp_score_lo", "fp_score_hi", "box_jitter_std",
                      "model_noise_std", "evidence_correlation"});
      auto dn = [&](std::string_view key, double& dst) {
        if (d.has(key)) dst = as_number(d.at(key), d.path(key));
      };
      auto& p = cfg.detector;
      dn("miss_slope", p.miss_slope);
      dn("gamma", p.gamma);
      dn("fp_rate", p.fp_rate);
      dn("fp_score_lo", p.fp_score_lo);
      dn("fp_score_hi", p.fp_score_hi);
      dn("box_jitter_std", p.box_jitter_std);
      dn("model_noise_std", p.model_noise_std);
      dn("evidence_correlation", p.evidence_correlation);
    }
    if (f.has("n_models_per_pool")) {
      const Fields p(f.at("n_models_per_pool"), "n_models_per_pool", {"label_sampling", "rater_specific"});
      if (p.has("label_sampling")) cfg.n_label_sampling = as_count(p.at("label_sampling"), p.path("label_sampling"));
      if (p.has("rater_specific")) cfg.n_rater_specific = as_count(p.at("rater_specific"), p.path("rater_specific"));
    }
    if (f.has("experiment")) {
      const Fields e(f.at("experiment"), "experiment",
                     {"lambda", "calibration_bins", "min_score", "calibration_ious", "bootstrap_resamples",
                      "confidence_level"});
      if (e.has("lambda")) cfg.lambda = as_number(e.at("lambda"), e.path("lambda"));
      if (e.has("calibration_bins")) cfg.calibration_bins = as_count(e.at("calibration_bins"), e.path("calibration_bins"));
      if (e.has("min_score")) cfg.min_score = as_number(e.at("min_score"), e.path("min_score"));
      if (e.has("calibration_ious")) {
        const auto& arr = as_array(e.at("calibration_ious"), e.path("calibration_ious"));
        cfg.calibration_ious.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
          cfg.calibration_ious.push_back(as_number(arr[i], element(e.path("calibration_ious"), i)));
        }
      }
      if (e.has("bootstrap_resamples")) {
        cfg.bootstrap_resamples = as_count(e.at("bootstrap_resamples"), e.path("bootstrap_resamples"));
      }
      if (e.has("confidence_level")) cfg.confidence_level = as_number(e.at("confidence_level"), e.path("confidence_level"));
    }
    return cfg;
  });
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  return cfg;
}

std::string write_sim_config(const sim::SimConfig& cfg) {
  ojson j;
  j["schema_version"] = cfg.schema_version;
  j["seed"] = cfg.seed;
  j["n_images"] = cfg.n_images;
  j["n_validation"] = cfg.n_validation;
  j["n_test"] = cfg.n_test;
  j["image_size"] = ojson::array({cfg.image_width, cfg.image_height});
  j["objects_per_image_mean"] = cfg.objects_per_image_mean;
  j["size_log_mean"] = cfg.size_log_mean;
  j["size_log_std"] = cfg.size_log_std;
  j["provenance_quantile"] = cfg.provenance_quantile;
  j["rater_params"] = ojson::array({rater_json(cfg.rater1), rater_json(cfg.rater2)});
  const auto& d = cfg.detector;
  j["detector_params"] = {{"miss_slope", d.miss_slope},
                          {"gamma", d.gamma},
                          {"fp_rate", d.fp_rate},
                          {"fp_score_lo", d.fp_score_lo},
                          {"fp_score_hi", d.fp_score_hi},
                          {"box_jitter_std", d.box_jitter_std},
                          {"model_noise_std", d.model_noise_std},
                          {"evidence_correlation", d.evidence_correlation}};
  j["n_models_per_pool"] = {{"label_sampling", cfg.n_label_sampling}, {"rater_specific", cfg.n_rater_specific}};
  j["experiment"] = {{"lambda", cfg.lambda},
                     {"calibration_bins", cfg.calibration_bins},
                     {"min_score", cfg.min_score},
                     {"calibration_ious", cfg.calibration_ious},
                     {"bootstrap_resamples", cfg.bootstrap_resamples},
                     {"confidence_level", cfg.confidence_level}};
  return dump(j);
}

std::string write_eval_summary(const EvalSummary& s) {
  ojson j;
  j["map"] = s.map;
  j["mar"] = s.mar;
  j["iou_grid"] = s.iou_grid;
  j["ap_at"] = s.ap_at;
  j["ar_at"] = s.ar_at;
  j["no_ground_truth"] = s.no_ground_truth;
  return dump(j);
}

namespace {

ojson bootstrap_json(const BootstrapResult& r) {
  return {{"metric", r.metric_name}, {"point_estimate", r.point_estimate},
          {"mean", r.mean},          {"std", r.std},
          {"ci_lo", r.ci_lo},        {"ci_hi", r.ci_hi},
          {"level", r.level},        {"ci_method", "percentile"},
          {"B", r.samples.size()},   {"seed", r.seed}};
}

ojson rater_stats_json(const RaterStats& s) {
  return {{"rater_id", s.rater_id},       {"n_images", s.n_images},   {"mean_retained", s.mean_retained},
          {"mean_added", s.mean_added},   {"mean_total", s.mean_total}, {"std_total", s.std_total}};
}

}  // namespace

std::string write_bootstrap_summary(const BootstrapResult& result) { return dump(bootstrap_json(result)); }

std::string write_experiment_summary(const ExperimentReport& report) {
  ojson j;
  j["config"] = ojson::parse(write_sim_config(report.config));
  j["sizes"] = report.sizes;
  j["metrics"] = report.metrics;
  const std::size_t n_metrics = report.metrics.size();
  ojson per_size = ojson::array();
  for (std::size_t s = 0; s < report.sizes.size(); ++s) {
    ojson row;
    row["size"] = report.sizes[s];
    ojson lse, rse, cmp;
    for (std::size_t k = 0; k < n_metrics; ++k) {
      const auto& l = report.sweep[(2 * s) * n_metrics + k].result;
      const auto& r = report.sweep[(2 * s + 1) * n_metrics + k].result;
      lse[report.metrics[k]] = bootstrap_json(l);
      rse[report.metrics[k]] = bootstrap_json(r);
      const auto& c = report.comparisons[s * n_metrics + k].lse_minus_rse;
      cmp[report.metrics[k]] = {{"mean_difference", c.mean_difference},
                                {"ci_lo", c.ci_lo},
                                {"ci_hi", c.ci_hi},
                                {"significant", c.significant}};
    }
    const auto& primary = report.comparisons[s * n_metrics].lse_minus_rse;
    row["lse_dece"] = report.sweep[(2 * s) * n_metrics].result.mean;
    row["rse_dece"] = report.sweep[(2 * s + 1) * n_metrics].result.mean;
    row["rse_dece_lower"] = primary.significant && primary.mean_difference > 0.0;
    row["lse"] = std::move(lse);
    row["rse"] = std::move(rse);
    row["lse_minus_rse"] = std::move(cmp);
    per_size.push_back(std::move(row));
  }
  j["per_size"] = std::move(per_size);
  j["rse_dece_lower_all"] = report.rse_dece_lower_all;
  j["max_abs_map_difference"] = report.max_abs_map_difference;
  j["raters"] = ojson::array({rater_stats_json(report.rater1_stats), rater_stats_json(report.rater2_stats)});
  for (const auto& p : report.agreement.points) {
    if (std::abs(p.iou_threshold - 0.5) < 1e-9) j["inter_rater_f1_at_0.5"] = p.mean_f1;
  }
  ojson singles = ojson::array();
  for (const auto& m : report.single_models) {
    ojson row{{"model_id", m.model_id}, {"training_kind", std::string(to_string(m.training_kind))}};
    if (m.rater_id) row["rater_id"] = *m.rater_id;
    row["validation_map"] = m.validation_map;
    row["test_map"] = m.test_map;
    row["test_dece"] = m.test_dece;
    singles.push_back(std::move(row));
  }
  j["single_models"] = std::move(singles);
  return dump(j);
}

namespace {

class Csv {
 public:
  explicit Csv(const char* header) { out_ << header << '\n'; }
  template <typename... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(std::string_view v) { return std::string(v); }
  std::ostringstream out_;
};

}  // namespace

std::string reliability_csv(const ReliabilityProfile& profile) {
  Csv csv(kReliabilityHeader);
  for (const auto& r : reliability_export(profile)) csv.row(r.bin_lo, r.bin_hi, r.count, r.mean_conf, r.precision, r.gap);
  return csv.str();
}

std::vector<ReliabilityRow> parse_reliability_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kReliabilityHeader) {
    throw InputError(std::string("reliability CSV must start with header '") + kReliabilityHeader + "'");
  }
  std::vector<ReliabilityRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    const auto at = " at line " + std::to_string(line_no);
    if (cells.size() != 6) throw InputError("expected 6 fields" + at);
    auto num = [&](const std::string& s) {
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw InputError("bad number '" + s + "'" + at);
      return v;
    };
    ReliabilityRow r;
    r.bin_lo = num(cells[0]);
    r.bin_hi = num(cells[1]);
    std::size_t count = 0;
    const auto res = std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), count);
    if (res.ec != std::errc{} || res.ptr != cells[2].data() + cells[2].size()) {
      throw InputError("bad count '" + cells[2] + "'" + at);
    }
    r.count = count;
    r.mean_conf = num(cells[3]);
    r.precision = num(cells[4]);
    r.gap = num(cells[5]);
    rows.push_back(r);
  }
  return rows;
}

std::string agreement_csv(const AgreementCurve& curve) {
  Csv csv(kAgreementHeader);
  for (const auto& p : curve.points) csv.row(p.iou_threshold, p.mean_f1, p.std_f1);
  return csv.str();
}

std::string rater_stats_csv(std::span<const RaterStats> stats) {
  Csv csv(kRaterStatsHeader);
  for (const auto& s : stats) csv.row(s.rater_id, s.mean_retained, s.mean_added, s.mean_total, s.std_total);
  return csv.str();
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  Csv csv(kSweepHeader);
  for (const auto& r : rows) {
    csv.row(to_string(r.strategy), r.size, r.result.metric_name, r.result.mean, r.result.std, r.result.ci_lo,
            r.result.ci_hi);
  }
  return csv.str();
}

std::string bootstrap_samples_csv(const BootstrapResult& result) {
  Csv csv(kBootstrapHeader);
  for (std::size_t i = 0; i < result.samples.size(); ++i) csv.row(i, result.samples[i]);
  return csv.str();
}

std::string comparison_csv(std::span<const SizeComparison> rows) {
  Csv csv(kComparisonHeader);
  for (const auto& r : rows) {
    const auto& c = r.lse_minus_rse;
    csv.row(r.size, c.metric_name, c.mean_difference, c.ci_lo, c.ci_hi, c.significant);
  }
  return csv.str();
}

std::string single_model_csv(std::span<const SingleModelRow> rows) {
  Csv csv(kSingleModelHeader);
  for (const auto& r : rows) {
    csv.row(r.model_id, to_string(r.training_kind), r.rater_id.value_or(""), r.validation_map, r.test_map,
            r.test_dece);
  }
  return csv.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write file '" + path.string() + "'");
  out << content;
  if (!out) throw InputError("failed writing file '" + path.string() + "'");
}

namespace {

template <typename Fn>
auto with_file(const std::filesystem::path& path, Fn&& fn) {
  const auto text = read_file(path);
  try {
    return fn(text);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace

DetectionSet load_detections(const std::filesystem::path& path) {
  return with_file(path, [](const std::string& t) { return parse_detections(t); });
}

AnnotationSet load_annotations(const std::filesystem::path& path) {
  return with_file(path, [](const std::string& t) { return parse_annotations(t); });
}

sim::SimConfig load_sim_config(const std::filesystem::path& path) {
  return with_file(path, [](const std::string& t) { return parse_sim_config(t); });
}

void write_dataset(const sim::SimDataset& data, const std::filesystem::path& out_dir) {
  write_file(out_dir / "config.json", write_sim_config(data.config));
  write_file(out_dir / "annotations" / (data.rater1.rater_id + ".json"), write_annotations(data.rater1));
  write_file(out_dir / "annotations" / (data.rater2.rater_id + ".json"), write_annotations(data.rater2));
  write_file(out_dir / "annotations" / "consensus.json", write_annotations(data.consensus));
  for (const auto& m : data.models) {
    write_file(out_dir / "detections" / "validation" / (m.validation.model_id + ".json"),
               write_detections(m.validation));
    write_file(out_dir / "detections" / "test" / (m.test.model_id + ".json"), write_detections(m.test));
  }
  write_file(out_dir / "leaderboard.json", write_leaderboard(data.leaderboard));
  Csv scenes("image_id,x,y,w,h,ambiguity,disputed");
  for (const auto& s : data.scenes) {
    for (const auto& o : s.objects) scenes.row(s.image_id, o.box.x, o.box.y, o.box.w, o.box.h, o.ambiguity, o.disputed);
  }
  write_file(out_dir / "scenes.csv", scenes.str());
}

}  // namespace detcal::io
