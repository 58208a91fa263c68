#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "detcal/agreement.hpp"
#include "detcal/bootstrap.hpp"
#include "detcal/calibration.hpp"
#include "detcal/ensembling.hpp"
#include "detcal/simulator.hpp"

namespace detcal {

/// Bootstrap summary of one metric for one ensemble.
struct SweepRow {
  Strategy strategy = Strategy::LSE;
  std::size_t size = 0;
  BootstrapResult result;
};

/// Paired LSE - RSE comparison at one ensemble size.
struct SizeComparison {
  std::size_t size = 0;
  Comparison lse_minus_rse;
};

struct SingleModelRow {
  std::string model_id;
  TrainingKind training_kind = TrainingKind::LabelSampling;
  std::optional<std::string> rater_id;
  double validation_map = 0.0;
  double test_map = 0.0;
  double test_dece = 0.0;  // at the first calibration IoU
};

struct ExperimentReport {
  sim::SimConfig config;
  std::vector<std::size_t> sizes;
  std::vector<std::string> metrics;  // "dece@0.5", ..., "map"
  std::vector<EnsembleSpec> ensembles;
  std::vector<SweepRow> sweep;               // size-major, then strategy, then metric
  std::vector<SizeComparison> comparisons;   // size-major, then metric
  std::vector<SingleModelRow> single_models;
  RaterStats rater1_stats;
  RaterStats rater2_stats;
  AgreementCurve agreement;
  ReliabilityProfile reliability_lse;  // largest size, first calibration IoU
  ReliabilityProfile reliability_rse;

  bool rse_dece_lower_all = false;        // primary D-ECE, every size, significant
  double max_abs_map_difference = 0.0;    // bootstrap mean differences
};

std::string dece_metric_name(double iou);
inline constexpr const char* kMapMetric = "map";

ExperimentReport run_experiment(const sim::SimConfig& cfg, std::span<const std::size_t> sizes,
                                Exec exec = Exec::Parallel);

/// Same pipeline on an already simulated dataset.
ExperimentReport run_experiment(const sim::SimDataset& data, std::span<const std::size_t> sizes,
                                Exec exec = Exec::Parallel);

}  // namespace detcal
