#include "detcal/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "detcal/error.hpp"
#include "detcal/matching.hpp"

namespace detcal {

namespace {

template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw DomainError(stage + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(stage + ": " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(stage + ": " + e.what());
  }
}

struct EnsembleMetrics {
  std::vector<BootstrapResult> results;  // parallel to report.metrics
  ReliabilityProfile primary_profile;
};

}  // namespace

std::string dece_metric_name(double iou) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dece@%g", iou);
  return buf;
}

ExperimentReport run_experiment(const sim::SimConfig& cfg, std::span<const std::size_t> sizes, Exec exec) {
  const auto data = in_stage("simulate", [&] { return sim::simulate_dataset(cfg, exec); });
  return run_experiment(data, sizes, exec);
}

ExperimentReport run_experiment(const sim::SimDataset& data, std::span<const std::size_t> sizes, Exec exec) {
  const auto& cfg = data.config;
  cfg.validate();
  if (sizes.empty()) throw DomainError("experiment needs at least one ensemble size");

  ExperimentReport report;
  report.config = cfg;
  report.sizes.assign(sizes.begin(), sizes.end());
  for (double t : cfg.calibration_ious) report.metrics.push_back(dece_metric_name(t));
  report.metrics.push_back(kMapMetric);

  const auto gts = ground_truth(data.consensus);
  const auto models = data.test_sets();
  const BootstrapOptions boot{cfg.bootstrap_resamples, cfg.seed, cfg.confidence_level};

  in_stage("rater statistics", [&] {
    report.rater1_stats = rater_stats(data.rater1);
    report.rater2_stats = rater_stats(data.rater2);
    report.agreement = agreement_curve(data.rater1, data.rater2, parse_iou_grid("0.05:0.05:0.95"), exec);
  });

  in_stage("single models", [&] {
    report.single_models.resize(data.models.size());
    CalibrationOptions copt{cfg.calibration_ious.front(), cfg.calibration_bins, cfg.min_score};
    parallel_for(exec, data.models.size(), [&](std::size_t m) {
      const auto& model = data.models[m];
      auto& row = report.single_models[m];
      row.model_id = model.test.model_id;
      row.training_kind = *model.test.training_kind;
      row.rater_id = model.test.rater_id;
      row.validation_map = model.validation_map;
      row.test_map = evaluate(model.test.detections, gts, EvalOptions{}, Exec::Serial).map;
      row.test_dece = d_ece(build_profile(model.test.detections, gts, copt, Exec::Serial));
    });
  });

  auto measure = [&](const DetectionSet& predicted, const std::string& name) {
    EnsembleMetrics out;
    const auto all = make_eval_dataset(predicted.detections, gts);
    const std::size_t n = all.size();
    for (std::size_t t = 0; t < cfg.calibration_ious.size(); ++t) {
      const CalibrationEvaluator ev(all, {cfg.calibration_ious[t], cfg.calibration_bins, cfg.min_score}, exec);
      if (t == 0) out.primary_profile = ev.profile();
      out.results.push_back(in_stage(name + " " + report.metrics[t], [&] {
        return bootstrap_metric(
            report.metrics[t], n, [&](std::span<const std::size_t> sel) { return d_ece(ev.profile(sel)); }, boot,
            exec);
      }));
    }
    const DetectionEvaluator ev(all, EvalOptions{}, exec);
    out.results.push_back(in_stage(name + " map", [&] {
      return bootstrap_metric(
          kMapMetric, n, [&](std::span<const std::size_t> sel) { return ev.summarize(sel).map; }, boot, exec);
    }));
    return out;
  };

  report.rse_dece_lower_all = true;
  for (std::size_t s : report.sizes) {
    std::vector<EnsembleMetrics> per_strategy;
    for (Strategy strategy : {Strategy::LSE, Strategy::RSE}) {
      const auto spec = in_stage("compose", [&] {
        return compose_ensemble(data.leaderboard, strategy, s, Aggregation::MeanByS, cfg.lambda);
      });
      report.ensembles.push_back(spec);
      const auto predicted = in_stage("ensemble " + spec.name(), [&] { return ensemble_predict(models, spec, exec); });
      per_strategy.push_back(in_stage("evaluate " + spec.name(), [&] { return measure(predicted, spec.name()); }));
      for (const auto& r : per_strategy.back().results) report.sweep.push_back({strategy, s, r});
    }
    for (std::size_t k = 0; k < report.metrics.size(); ++k) {
      const auto cmp = compare(per_strategy[0].results[k], per_strategy[1].results[k]);
      report.comparisons.push_back({s, cmp});
      if (k == 0 && !(cmp.significant && cmp.mean_difference > 0.0)) report.rse_dece_lower_all = false;
      if (report.metrics[k] == kMapMetric) {
        report.max_abs_map_difference = std::max(report.max_abs_map_difference, std::abs(cmp.mean_difference));
      }
    }
    if (s == *std::max_element(report.sizes.begin(), report.sizes.end())) {
      report.reliability_lse = per_strategy[0].primary_profile;
      report.reliability_rse = per_strategy[1].primary_profile;
    }
  }
  return report;
}

}  // namespace detcal
