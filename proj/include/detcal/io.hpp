#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "detcal/agreement.hpp"
#include "detcal/bootstrap.hpp"
#include "detcal/calibration.hpp"
#include "detcal/ensembling.hpp"
#include "detcal/experiment.hpp"
#include "detcal/matching.hpp"
#include "detcal/simulator.hpp"
#include "detcal/types.hpp"

namespace detcal::io {

inline constexpr const char* kSchemaVersion = "1.0";

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

// Structured files. Parsers reject unknown fields and report the JSON path of
// the offending value in an InputError.
DetectionSet parse_detections(const std::string& text);
std::string write_detections(const DetectionSet& set);
AnnotationSet parse_annotations(const std::string& text);
std::string write_annotations(const AnnotationSet& set);
Leaderboard parse_leaderboard(const std::string& text);
std::string write_leaderboard(const Leaderboard& board);
/// Missing fields keep their defaults; schema_version is required.
sim::SimConfig parse_sim_config(const std::string& text);
std::string write_sim_config(const sim::SimConfig& cfg);

std::string write_eval_summary(const EvalSummary& summary);
std::string write_bootstrap_summary(const BootstrapResult& result);
std::string write_experiment_summary(const ExperimentReport& report);

// CSV tables with fixed headers.
inline constexpr const char* kReliabilityHeader = "bin_lo,bin_hi,count,mean_conf,precision,gap";
inline constexpr const char* kAgreementHeader = "iou_threshold,mean_f1,std_f1";
inline constexpr const char* kRaterStatsHeader = "rater_id,mean_retained,mean_added,mean_total,std_total";
inline constexpr const char* kSweepHeader = "strategy,size,metric,mean,std,ci_lo,ci_hi";
inline constexpr const char* kBootstrapHeader = "iteration,value";
inline constexpr const char* kComparisonHeader = "size,metric,mean_difference,ci_lo,ci_hi,significant";
inline constexpr const char* kSingleModelHeader =
    "model_id,training_kind,rater_id,validation_map,test_map,test_dece";

std::string reliability_csv(const ReliabilityProfile& profile);
std::vector<ReliabilityRow> parse_reliability_csv(const std::string& text);
std::string agreement_csv(const AgreementCurve& curve);
std::string rater_stats_csv(std::span<const RaterStats> stats);
std::string sweep_csv(std::span<const SweepRow> rows);
std::string bootstrap_samples_csv(const BootstrapResult& result);
std::string comparison_csv(std::span<const SizeComparison> rows);
std::string single_model_csv(std::span<const SingleModelRow> rows);

// Files. Failures are InputErrors naming the path.
std::string read_file(const std::filesystem::path& path);
/// Creates missing parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

DetectionSet load_detections(const std::filesystem::path& path);
AnnotationSet load_annotations(const std::filesystem::path& path);
sim::SimConfig load_sim_config(const std::filesystem::path& path);

/// Writes the simulated dataset: config, rater and consensus annotations,
/// per-model validation and test detections and the leaderboard.
void write_dataset(const sim::SimDataset& data, const std::filesystem::path& out_dir);

}  // namespace detcal::io
