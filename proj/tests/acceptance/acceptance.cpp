// Runs every acceptance criterion and prints one PASS/FAIL line for each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "detcal/agreement.hpp"
#include "detcal/bootstrap.hpp"
#include "detcal/calibration.hpp"
#include "detcal/ensembling.hpp"
#include "detcal/experiment.hpp"
#include "detcal/io.hpp"
#include "detcal/matching.hpp"
#include "detcal/simulator.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace {

using namespace detcal;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

const std::vector<std::size_t> kSizes{2, 4, 8, 12, 16, 20};

void criterion_1(Outcome& o) {
  using test::det;
  const std::vector<Detection> pair{det("i", {0, 0, 10, 10}, 0.8, "a"), det("i", {1, 1, 10, 10}, 0.6, "b")};
  const std::vector<Detection> single{det("i", {0, 0, 10, 10}, 0.9, "a")};
  const double two = aggregate_group(pair, 2).score;
  const double one = aggregate_group(single, 2).score;
  o.check(std::abs(two - 0.7) <= 1e-12, "S=2 {0.8,0.6} -> 0.7");
  o.check(std::abs(one - 0.45) <= 1e-12, "singleton 0.9 at S=2 -> 0.45");
  o.detail << "pair=" << io::format_number(two) << " singleton=" << io::format_number(one);
}

void criterion_2(Outcome& o) {
  ReliabilityProfile p;
  p.n_det = 100;
  p.bins = {{0.0, 0.5, 30, 12, 0.6, 0.4}, {0.5, 1.0, 70, 63, 0.95, 0.9}};
  const double two_bin = d_ece(p);
  o.check(std::abs(two_bin - 0.095) <= 1e-12, "two-bin example 0.095");

  auto rs = rng::stream(201, rng::Tag::Trial);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    GroundTruth gt{{"a", test::clustered_boxes(rs, 5)}};
    std::vector<Detection> dets;
    for (const auto& b : test::clustered_boxes(rs, 1 + rs.below(15))) {
      dets.push_back(test::det("a", b, rs.uniform(0.05, 1.0)));
    }
    const auto single = build_profile(dets, gt, {0.5, 1, 0.05});
    double conf = 0.0;
    for (const auto& d : dets) conf += d.score;
    const double prec = static_cast<double>(single.bins[0].matched) / static_cast<double>(single.n_det);
    worst = std::max(worst, std::abs(d_ece(single) - std::abs(prec - conf / static_cast<double>(dets.size()))));
  }
  o.check(worst <= 1e-12, "M=1 consistency");
  o.detail << "two_bin=" << io::format_number(two_bin) << " m1_max_err=" << worst;
}

void criterion_3(Outcome& o) {
  auto rs = rng::stream(301, rng::Tag::Trial);
  std::size_t clique = 0, partition = 0, conservation = 0, oracle = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const auto n_models = 1 + rs.below(3);
    const auto n = 1 + rs.below(6);
    std::vector<Detection> boxes;
    for (const auto& b : test::clustered_boxes(rs, n, 4.0)) {
      boxes.push_back(test::det("i", b, rs.uniform(0.05, 1.0), "m" + std::to_string(rs.below(n_models))));
    }
    std::map<std::string, std::vector<Detection>> by_model;
    for (const auto& d : boxes) by_model[d.model_id].push_back(d);
    std::vector<DetectionSet> sets;
    for (const auto& [id, rows] : by_model) sets.push_back(test::detection_set(id, test::images({"i"}), rows));
    const double lambda = rs.uniform(0.2, 0.8);
    const auto groups = group_boxes(sets, "i", lambda);

    bool clique_ok = true;
    std::vector<std::vector<std::size_t>> as_index;
    std::vector<int> seen(boxes.size(), 0);
    double out_sum = 0.0, in_sum = 0.0;
    for (const auto& g : groups) {
      std::vector<std::size_t> idx;
      for (std::size_t a = 0; a < g.members.size(); ++a) {
        for (std::size_t b = a + 1; b < g.members.size(); ++b) {
          clique_ok = clique_ok && g.members[a].model_id != g.members[b].model_id &&
                      iou(g.members[a].box, g.members[b].box) >= lambda;
        }
        const auto it = std::find(boxes.begin(), boxes.end(), g.members[a]);
        if (it != boxes.end()) {
          idx.push_back(static_cast<std::size_t>(it - boxes.begin()));
          ++seen[idx.back()];
        }
      }
      std::sort(idx.begin(), idx.end());
      as_index.push_back(idx);
      out_sum += g.agg_score * static_cast<double>(g.ensemble_size);
    }
    for (const auto& b : boxes) in_sum += b.score;
    std::sort(as_index.begin(), as_index.end());
    clique += clique_ok;
    partition += std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
    conservation += std::abs(out_sum - in_sum) <= 1e-12;
    oracle += test::valid_partitions(boxes, lambda).contains(as_index);
  }
  o.check(clique == trials, "pairwise clique");
  o.check(partition == trials, "partition");
  o.check(conservation == trials, "score conservation");
  o.check(oracle == trials, "brute-force validity");
  o.detail << "trials=" << trials << " clique=" << clique << " partition=" << partition
           << " conservation=" << conservation << " oracle=" << oracle;
}

void criterion_4(Outcome& o) {
  auto rs = rng::stream(401, rng::Tag::Trial);
  int checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    GroundTruth gt;
    std::vector<Detection> dets;
    const auto n_img = 1 + rs.below(3);
    for (std::uint64_t i = 0; i < n_img; ++i) gt["i" + std::to_string(i)] = test::clustered_boxes(rs, rs.below(6));
    const auto n = 1 + rs.below(20);
    for (std::uint64_t k = 0; k < n; ++k) {
      dets.push_back(test::det("i" + std::to_string(rs.below(n_img)), test::clustered_boxes(rs, 1)[0],
                               std::max(1e-3, rs.uniform())));
    }
    const std::size_t m = 1 + rs.below(12);
    const double t = 0.3 + 0.5 * rs.uniform();
    const auto p = build_profile(dets, gt, {t, m, 0.05});
    if (p.n_det == 0) continue;
    ++checked;
    worst = std::max(worst, std::abs(d_ece(p) - test::brute_force_dece(dets, gt, t, m, 0.05)));
  }
  o.check(worst <= 1e-12, "agreement within 1e-12");
  o.detail << "instances=500 with_detections=" << checked << " max_err=" << worst;
}

void criterion_5(Outcome& o) {
  const std::size_t n = 10, b = 1000;
  double distinct = 0.0;
  for (std::size_t it = 0; it < b; ++it) {
    const auto idx = bootstrap_resample(n, 42, it);
    distinct += static_cast<double>(std::set<std::size_t>(idx.begin(), idx.end()).size()) / static_cast<double>(n);
  }
  distinct /= static_cast<double>(b);
  o.check(std::abs(distinct - 0.651) <= 0.02, "distinct fraction 0.651 +- 0.02");

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(i * i) / 7.0;
  const MetricFn mean = [&](std::span<const std::size_t> sel) {
    double s = 0.0;
    for (auto i : sel) s += values[i];
    return s / static_cast<double>(sel.size());
  };
  const auto a = bootstrap_metric("mean", n, mean, {b, 42, 0.95}, Exec::Parallel);
  const auto c = bootstrap_metric("mean", n, mean, {b, 42, 0.95}, Exec::Serial);
  o.check(io::bootstrap_samples_csv(a) == io::bootstrap_samples_csv(c), "seed 42 samples byte-identical");
  o.check(io::write_bootstrap_summary(a) == io::write_bootstrap_summary(c), "seed 42 summary byte-identical");
  o.detail << "distinct_fraction=" << fmt(distinct) << " expected=" << fmt(1.0 - std::pow(0.9, 10));
}

void criterion_6(Outcome& o) {
  const sim::SimConfig cfg;
  const auto data = sim::simulate_dataset(cfg);
  const double r1 = rater_stats(data.rater1).mean_total;
  const double r2 = rater_stats(data.rater2).mean_total;
  const double ratio = r1 / r2;
  const std::vector<double> half{0.5};
  const double f1 = agreement_curve(data.rater1, data.rater2, half).points[0].mean_f1;
  const auto gt = ground_truth(data.consensus);
  std::map<sim::ModelKind, std::pair<double, double>> pools;
  double all = 0.0;
  for (const auto& m : data.models) {
    const double map = evaluate(m.test.detections, gt).map;
    pools[m.ref.kind].first += map;
    pools[m.ref.kind].second += 1.0;
    all += map;
  }
  all /= static_cast<double>(data.models.size());
  o.check(ratio >= 1.3 && ratio <= 1.7, "rater count ratio in [1.3, 1.7]");
  o.check(f1 >= 0.55 && f1 <= 0.70, "inter-rater F1@0.5 in [0.55, 0.70]");
  o.check(all >= 0.3 && all <= 0.7, "single-model mAP in [0.3, 0.7]");
  for (const auto& [kind, acc] : pools) {
    const double m = acc.first / acc.second;
    o.check(m >= 0.3 && m <= 0.7, "pool mean mAP in [0.3, 0.7]");
  }
  o.detail << "counts=" << fmt(r1, 2) << "/" << fmt(r2, 2) << " ratio=" << fmt(ratio, 3) << " f1@0.5=" << fmt(f1, 3)
           << " map(all)=" << fmt(all, 3) << " map(ls/rs1/rs2)="
           << fmt(pools[sim::ModelKind::LabelSampling].first / pools[sim::ModelKind::LabelSampling].second, 3) << "/"
           << fmt(pools[sim::ModelKind::Rater1].first / pools[sim::ModelKind::Rater1].second, 3) << "/"
           << fmt(pools[sim::ModelKind::Rater2].first / pools[sim::ModelKind::Rater2].second, 3);
}

const SweepRow& sweep_row(const ExperimentReport& r, std::size_t size_index, int strategy, std::size_t metric) {
  const std::size_t nm = r.metrics.size();
  return r.sweep[(2 * size_index + static_cast<std::size_t>(strategy)) * nm + metric];
}

void criterion_7(Outcome& o) {
  const auto cfg = io::load_sim_config(std::string(DETCAL_SOURCE_DIR) + "/configs/default.json");
  const auto r = run_experiment(cfg, kSizes);
  const std::size_t nm = r.metrics.size();
  const std::size_t map_k = nm - 1;
  double max_point_gap = 0.0;
  for (std::size_t i = 0; i < r.sizes.size(); ++i) {
    const auto& c = r.comparisons[i * nm].lse_minus_rse;
    const bool ok = c.significant && c.mean_difference > 0.0;
    o.check(ok, "RSE D-ECE lower at S=" + std::to_string(r.sizes[i]));
    const auto& lse = sweep_row(r, i, 0, 0).result;
    const auto& rse = sweep_row(r, i, 1, 0).result;
    o.detail << " S=" << r.sizes[i] << ":" << fmt(lse.point_estimate, 3) << "/" << fmt(rse.point_estimate, 3) << " d="
             << fmt(c.mean_difference, 3) << "[" << fmt(c.ci_lo, 3) << "," << fmt(c.ci_hi, 3) << "]";
    max_point_gap = std::max(max_point_gap, std::abs(sweep_row(r, i, 0, map_k).result.point_estimate -
                                                     sweep_row(r, i, 1, map_k).result.point_estimate));
  }
  o.check(r.rse_dece_lower_all, "rse_dece_lower_all");
  o.check(r.max_abs_map_difference <= 0.02, "bootstrap mAP difference <= 0.02");
  o.check(max_point_gap <= 0.02, "point mAP difference <= 0.02");
  o.detail << " max|dmAP| boot=" << fmt(r.max_abs_map_difference) << " point=" << fmt(max_point_gap);
}

void criterion_8(Outcome& o) {
  auto cfg = io::load_sim_config(std::string(DETCAL_SOURCE_DIR) + "/configs/default.json");
  const auto id = cfg.rater2.id;
  cfg.rater1.label_noise = 0.0;
  cfg.rater2 = cfg.rater1;
  cfg.rater2.id = id;
  const auto r = run_experiment(cfg, kSizes);
  const std::size_t nm = r.metrics.size();
  const double family_level = 1.0 - (1.0 - cfg.confidence_level) / static_cast<double>(r.sizes.size());
  std::size_t nominal_hits = 0;
  for (std::size_t i = 0; i < r.sizes.size(); ++i) {
    const auto& c = r.comparisons[i * nm].lse_minus_rse;
    nominal_hits += c.significant;
    auto lse = sweep_row(r, i, 0, 0).result;
    auto rse = sweep_row(r, i, 1, 0).result;
    lse.level = rse.level = family_level;
    const auto adjusted = compare(lse, rse);
    o.check(!adjusted.significant, "family-wise significant at S=" + std::to_string(r.sizes[i]));
    if (i + 1 == r.sizes.size()) o.check(!c.significant, "significant at largest size");
    o.detail << " S=" << r.sizes[i] << ":d=" << fmt(c.mean_difference, 3) << "[" << fmt(c.ci_lo, 3) << ","
             << fmt(c.ci_hi, 3) << "]" << (c.significant ? "*" : "");
  }
  o.detail << " nominal_significant=" << nominal_hits << "/" << r.sizes.size()
           << " family_level=" << fmt(family_level, 4);
}

void criterion_9(Outcome& o) {
  auto cfg = sim::SimConfig{};
  cfg.bootstrap_resamples = 30;
  const auto data = sim::simulate_dataset(cfg);
  const auto gt = ground_truth(data.consensus);

  bool identity = true;
  for (const auto& m : data.models) {
    EnsembleSpec spec{Strategy::LSE, 1, {m.test.model_id}};
    const std::vector<DetectionSet> one{m.test};
    const auto out = ensemble_predict(one, spec, Exec::Parallel, m.test.model_id);
    auto expected = m.test;
    sort_canonical(expected.detections);
    identity = identity && out.detections == expected.detections &&
               io::write_eval_summary(evaluate(out.detections, gt)) ==
                   io::write_eval_summary(evaluate(m.test.detections, gt));
  }
  o.check(identity, "S=1 identity for every simulated model");

  auto shuffled = data;
  auto rs = rng::stream(901, rng::Tag::Trial);
  for (auto& m : shuffled.models) {
    auto& d = m.test.detections;
    for (std::size_t i = d.size(); i > 1; --i) std::swap(d[i - 1], d[rs.below(i)]);
  }
  const std::vector<std::size_t> sizes{2, 8, 20};
  const auto base = run_experiment(data, sizes);
  const auto perm = run_experiment(shuffled, sizes);
  const bool same_report = io::write_experiment_summary(base) == io::write_experiment_summary(perm) &&
                           io::sweep_csv(base.sweep) == io::sweep_csv(perm.sweep) &&
                           io::comparison_csv(base.comparisons) == io::comparison_csv(perm.comparisons) &&
                           io::single_model_csv(base.single_models) == io::single_model_csv(perm.single_models) &&
                           io::reliability_csv(base.reliability_lse) == io::reliability_csv(perm.reliability_lse) &&
                           io::reliability_csv(base.reliability_rse) == io::reliability_csv(perm.reliability_rse);
  o.check(same_report, "shuffled detections give byte-identical metrics");

  auto sets = shuffled.test_sets();
  std::reverse(sets.begin(), sets.end());
  bool same_ensembles = true;
  for (std::size_t s : sizes) {
    for (auto strategy : {Strategy::LSE, Strategy::RSE}) {
      const auto spec = compose_ensemble(data.leaderboard, strategy, s);
      same_ensembles = same_ensembles && io::write_detections(ensemble_predict(data.test_sets(), spec)) ==
                                             io::write_detections(ensemble_predict(sets, spec));
    }
  }
  o.check(same_ensembles, "shuffled model order gives byte-identical ensembles");
  o.detail << "models=" << data.models.size() << " sizes=2,8,20";
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "ensemble score arithmetic", 1.0, criterion_1},
      {2, "D-ECE arithmetic", 1.0, criterion_2},
      {3, "grouping oracle", 30.0, criterion_3},
      {4, "D-ECE oracle", 10.0, criterion_4},
      {5, "bootstrap sanity", 10.0, criterion_5},
      {6, "simulator calibration brackets", 120.0, criterion_6},
      {7, "RSE calibrates better than LSE at every size", 600.0, criterion_7},
      {8, "null case without inter-rater signal", 300.0, criterion_8},
      {9, "S=1 identity and permutation invariance", 10.0, criterion_9},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) o.check(false, "runtime over " + fmt(c.budget_s, 0) + " s");
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %d (%s) %.2fs: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
