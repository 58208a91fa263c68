#include <cstdio>
#include <iostream>
#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "detcal/agreement.hpp"
#include "detcal/bootstrap.hpp"
#include "detcal/calibration.hpp"
#include "detcal/ensembling.hpp"
#include "detcal/error.hpp"
#include "detcal/experiment.hpp"
#include "detcal/io.hpp"
#include "detcal/matching.hpp"
#include "detcal/simulator.hpp"
#include "detcal/svg.hpp"

namespace fs = std::filesystem;
using namespace detcal;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

void fail(const char* kind, const std::string& msg) {
  std::string line = msg;
  for (auto& c : line) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "error[" << kind << "]: " << line << '\n';
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    io::write_file(out, content);
  }
}

Exec exec_mode(bool serial) { return serial ? Exec::Serial : Exec::Parallel; }

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size() || v == 0) throw DomainError("invalid ensemble size '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("no ensemble sizes given");
  return out;
}

struct Options {
  bool serial = false;

  std::vector<std::string> dets_many;
  std::string dets;
  std::string gt;
  std::string out;
  double lambda = 0.5;
  std::string mode = "mean_by_S";
  std::string model_id = "ensemble";

  std::string iou_grid = "0.5:0.05:0.95";
  double min_score = 0.0;

  double iou = 0.5;
  std::size_t bins = 10;
  double cal_min_score = 0.05;
  std::string out_csv;
  std::string out_svg;

  std::string ann_a;
  std::string ann_b;
  std::string agree_grid = "0.05:0.05:0.95";
  std::string out_stats;

  std::string metric = "map";
  std::size_t resamples = 100;
  std::uint64_t seed = 0;
  double level = 0.95;
  std::string samples_csv;

  std::string config;
  std::string out_dir;
  std::string sizes = "2,4,8,12,16,20";
};

int run_ensemble(const Options& o) {
  std::vector<DetectionSet> sets;
  std::set<std::string> ids;
  EnsembleSpec spec;
  for (const auto& f : o.dets_many) {
    sets.push_back(io::load_detections(f));
    if (!ids.insert(sets.back().model_id).second) {
      throw InputError("model id '" + sets.back().model_id + "' appears in more than one input (" + f + ")");
    }
    spec.member_ids.push_back(sets.back().model_id);
  }
  spec.size = sets.size();
  spec.aggregation = parse_aggregation(o.mode);
  spec.lambda = o.lambda;
  const auto merged = ensemble_predict(sets, spec, exec_mode(o.serial), o.model_id);
  emit(o.out, io::write_detections(merged));
  return kOk;
}

int run_eval(const Options& o) {
  const auto dets = io::load_detections(o.dets);
  const auto gts = ground_truth(io::load_annotations(o.gt));
  EvalOptions opt;
  opt.iou_grid = parse_iou_grid(o.iou_grid);
  const auto data = make_eval_dataset(dets.detections, gts, o.min_score);
  emit(o.out, io::write_eval_summary(evaluate(data, opt, exec_mode(o.serial))));
  return kOk;
}

int run_calibrate(const Options& o) {
  const auto dets = io::load_detections(o.dets);
  const auto gts = ground_truth(io::load_annotations(o.gt));
  const CalibrationOptions opt{o.iou, o.bins, o.cal_min_score};
  const auto profile = build_profile(dets.detections, gts, opt, exec_mode(o.serial));
  const double value = d_ece(profile);
  if (!o.out_csv.empty()) io::write_file(o.out_csv, io::reliability_csv(profile));
  if (!o.out_svg.empty()) {
    io::write_file(o.out_svg, svg::reliability_diagram(profile, dets.model_id + " D-ECE " + io::format_number(value)));
  }
  std::cout << "d_ece=" << io::format_number(value) << " n_det=" << profile.n_det << '\n';
  return kOk;
}

int run_agree(const Options& o) {
  const auto a = io::load_annotations(o.ann_a);
  const auto b = io::load_annotations(o.ann_b);
  const auto curve = agreement_curve(a, b, parse_iou_grid(o.agree_grid), exec_mode(o.serial));
  const std::vector<RaterStats> stats{rater_stats(a), rater_stats(b)};
  emit(o.out_csv, io::agreement_csv(curve));
  if (!o.out_stats.empty()) io::write_file(o.out_stats, io::rater_stats_csv(stats));
  if (!o.out_svg.empty()) io::write_file(o.out_svg, svg::agreement_plot(curve, a.rater_id + " vs " + b.rater_id));
  return kOk;
}

int run_bootstrap(const Options& o) {
  const auto dets = io::load_detections(o.dets);
  const auto gts = ground_truth(io::load_annotations(o.gt));
  const auto exec = exec_mode(o.serial);
  const BootstrapOptions boot{o.resamples, o.seed, o.level};
  BootstrapResult result;
  if (o.metric == "map") {
    EvalOptions opt;
    opt.iou_grid = parse_iou_grid(o.iou_grid);
    const auto data = make_eval_dataset(dets.detections, gts, o.min_score);
    const DetectionEvaluator ev(data, opt, exec);
    result = bootstrap_metric(
        "map", data.size(), [&](std::span<const std::size_t> sel) { return ev.summarize(sel).map; }, boot, exec);
  } else {
    const auto data = make_eval_dataset(dets.detections, gts);
    const CalibrationEvaluator ev(data, {o.iou, o.bins, o.cal_min_score}, exec);
    result = bootstrap_metric(
        dece_metric_name(o.iou), data.size(), [&](std::span<const std::size_t> sel) { return d_ece(ev.profile(sel)); },
        boot, exec);
  }
  emit(o.out, io::write_bootstrap_summary(result));
  if (!o.samples_csv.empty()) io::write_file(o.samples_csv, io::bootstrap_samples_csv(result));
  return kOk;
}

int run_simulate(const Options& o) {
  const auto cfg = io::load_sim_config(o.config);
  const auto data = sim::simulate_dataset(cfg, exec_mode(o.serial));
  io::write_dataset(data, o.out_dir);
  return kOk;
}

int run_experiment_cmd(const Options& o) {
  const auto cfg = io::load_sim_config(o.config);
  const auto sizes = parse_sizes(o.sizes);
  const auto report = run_experiment(cfg, sizes, exec_mode(o.serial));
  const fs::path dir = o.out_dir;
  io::write_file(dir / "summary.json", io::write_experiment_summary(report));
  io::write_file(dir / "sweep.csv", io::sweep_csv(report.sweep));
  io::write_file(dir / "comparisons.csv", io::comparison_csv(report.comparisons));
  io::write_file(dir / "single_models.csv", io::single_model_csv(report.single_models));
  io::write_file(dir / "agreement.csv", io::agreement_csv(report.agreement));
  const std::vector<RaterStats> stats{report.rater1_stats, report.rater2_stats};
  io::write_file(dir / "rater_stats.csv", io::rater_stats_csv(stats));
  io::write_file(dir / "reliability_lse.csv", io::reliability_csv(report.reliability_lse));
  io::write_file(dir / "reliability_rse.csv", io::reliability_csv(report.reliability_rse));
  const auto largest = std::to_string(*std::max_element(sizes.begin(), sizes.end()));
  io::write_file(dir / "reliability_lse.svg", svg::reliability_diagram(report.reliability_lse, "LSE-" + largest));
  io::write_file(dir / "reliability_rse.svg", svg::reliability_diagram(report.reliability_rse, "RSE-" + largest));
  io::write_file(dir / "agreement.svg", svg::agreement_plot(report.agreement, "inter-rater agreement"));
  for (const auto& metric : report.metrics) {
    std::string file = "sweep_" + metric + ".svg";
    for (auto& c : file) {
      if (c == '@') c = '_';
    }
    io::write_file(dir / file, svg::sweep_plot(report.sweep, metric, metric + " by ensemble size"));
  }
  std::cout << "rse_dece_lower_all=" << (report.rse_dece_lower_all ? "true" : "false")
            << " max_abs_map_difference=" << io::format_number(report.max_abs_map_difference) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detector ensembling, calibration and rater-agreement toolkit"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--serial", o.serial, "Run every kernel single-threaded");

  auto* ens = app.add_subcommand("ensemble", "Merge detection files into one ensemble");
  ens->add_option("--dets", o.dets_many, "Detection files, one per model")->required();
  ens->add_option("--lambda", o.lambda, "IoU threshold for grouping")->check(CLI::Range(0.0, 1.0));
  ens->add_option("--mode", o.mode, "Aggregation")->check(CLI::IsMember({"mean_by_S", "max"}));
  ens->add_option("--model-id", o.model_id, "Model id of the output");
  ens->add_option("--out", o.out, "Output detection file")->required();

  auto* ev = app.add_subcommand("eval", "mAP and mAR of detections against ground truth");
  ev->add_option("--dets", o.dets, "Detection file")->required();
  ev->add_option("--gt", o.gt, "Annotation file")->required();
  ev->add_option("--iou-grid", o.iou_grid, "lo:step:hi or comma list");
  ev->add_option("--min-score", o.min_score, "Drop detections scoring below")->check(CLI::Range(0.0, 1.0));
  ev->add_option("--out", o.out, "Output JSON (default stdout)");

  auto* cal = app.add_subcommand("calibrate", "Reliability profile and D-ECE");
  cal->add_option("--dets", o.dets, "Detection file")->required();
  cal->add_option("--gt", o.gt, "Annotation file")->required();
  cal->add_option("--iou", o.iou, "Matching IoU threshold")->check(CLI::Range(0.0, 1.0));
  cal->add_option("--bins", o.bins, "Number of confidence bins")->check(CLI::PositiveNumber);
  cal->add_option("--min-score", o.cal_min_score, "Lower edge of the first bin")->check(CLI::Range(0.0, 1.0));
  cal->add_option("--out-csv", o.out_csv, "Reliability table");
  cal->add_option("--out-svg", o.out_svg, "Reliability diagram");

  auto* agr = app.add_subcommand("agree", "Inter-rater agreement curve and rater statistics");
  agr->add_option("--ann-a", o.ann_a, "First annotation file")->required();
  agr->add_option("--ann-b", o.ann_b, "Second annotation file")->required();
  agr->add_option("--iou-grid", o.agree_grid, "lo:step:hi or comma list");
  agr->add_option("--out-csv", o.out_csv, "Agreement CSV (default stdout)");
  agr->add_option("--out-stats", o.out_stats, "Rater statistics CSV");
  agr->add_option("--out-svg", o.out_svg, "Agreement plot");

  auto* bs = app.add_subcommand("bootstrap", "Bootstrap distribution of a metric over images");
  bs->add_option("--dets", o.dets, "Detection file")->required();
  bs->add_option("--gt", o.gt, "Annotation file")->required();
  bs->add_option("--metric", o.metric, "map or dece")->check(CLI::IsMember({"map", "dece"}));
  bs->add_option("--B", o.resamples, "Number of resamples")->check(CLI::PositiveNumber);
  bs->add_option("--seed", o.seed, "Random seed")->required();
  bs->add_option("--level", o.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  bs->add_option("--iou", o.iou, "IoU threshold (dece)")->check(CLI::Range(0.0, 1.0));
  bs->add_option("--bins", o.bins, "Number of confidence bins (dece)")->check(CLI::PositiveNumber);
  bs->add_option("--iou-grid", o.iou_grid, "IoU grid (map)");
  bs->add_option("--out", o.out, "Summary JSON (default stdout)");
  bs->add_option("--samples-csv", o.samples_csv, "Per-iteration values");

  auto* simc = app.add_subcommand("simulate", "Write a simulated dataset");
  simc->add_option("--config", o.config, "Simulator config")->required();
  simc->add_option("--out-dir", o.out_dir, "Output directory")->required();

  auto* exp = app.add_subcommand("experiment", "LSE vs RSE sweep on simulated data");
  exp->add_option("--config", o.config, "Simulator config")->required();
  exp->add_option("--sizes", o.sizes, "Comma-separated ensemble sizes");
  exp->add_option("--out-dir", o.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("usage", e.what());
    return kUsage;
  }

  try {
    if (*ens) return run_ensemble(o);
    if (*ev) return run_eval(o);
    if (*cal) return run_calibrate(o);
    if (*agr) return run_agree(o);
    if (*bs) return run_bootstrap(o);
    if (*simc) return run_simulate(o);
    if (*exp) return run_experiment_cmd(o);
  } catch (const InputError& e) {
    fail("input", e.what());
    return kInput;
  } catch (const DomainError& e) {
    fail("domain", e.what());
    return kInput;
  } catch (const InvariantError& e) {
    fail("invariant", e.what());
    return kInternal;
  } catch (const std::exception& e) {
    fail("internal", e.what());
    return kInternal;
  }
  return kInternal;
}
