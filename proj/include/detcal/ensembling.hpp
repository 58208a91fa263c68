#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "detcal/exec.hpp"
#include "detcal/types.hpp"

namespace detcal {

enum class Aggregation {
  MeanByS,        // scores summed and divided by the ensemble size S
  MaxConfidence,  // score and box of the most confident member
};

enum class Strategy {
  LSE,  // top-S label-sampling models
  RSE,  // top S/2 rater-specific models of each rater
};

std::string_view to_string(Aggregation a);
std::string_view to_string(Strategy s);
Aggregation parse_aggregation(std::string_view s);
Strategy parse_strategy(std::string_view s);

/// Cross-model cluster of mutually overlapping boxes, at most one per model.
struct DetectionGroup {
  std::vector<Detection> members;  // in construction order (score descending)
  BoundingBox agg_box;
  double agg_score = 0.0;
  std::size_t ensemble_size = 0;

  std::size_t support() const { return members.size(); }
};

struct Aggregate {
  double score = 0.0;
  BoundingBox box;
};

/// MeanByS: score = (sum of member scores) / S, box = plain mean of member
/// coordinates over the members. A model missing from the group thus counts
/// as a zero score. MaxConfidence: copy of the most confident member.
Aggregate aggregate_group(std::span<const Detection> members, std::size_t ensemble_size,
                          Aggregation mode = Aggregation::MeanByS);

/// Partitions all boxes predicted on `image_id` by the given models. Boxes
/// are visited by descending score (ties: model id, then input position). A
/// box joins an existing group only if its model is not yet in the group and
/// its IoU with every member is >= lambda; among several such groups it picks
/// the highest mean IoU to the members (ties: earliest group). Otherwise it
/// starts a new group.
std::vector<DetectionGroup> group_boxes(std::span<const DetectionSet> per_model, std::string_view image_id,
                                        double lambda, Aggregation mode = Aggregation::MeanByS);

struct LeaderboardEntry {
  std::string model_id;
  TrainingKind training_kind = TrainingKind::LabelSampling;
  std::optional<std::string> rater_id;  // present iff rater-specific
  double validation_map = 0.0;

  friend bool operator==(const LeaderboardEntry&, const LeaderboardEntry&) = default;
};

struct Leaderboard {
  std::vector<LeaderboardEntry> entries;

  void validate() const;
  friend bool operator==(const Leaderboard&, const Leaderboard&) = default;
};

struct EnsembleSpec {
  Strategy strategy = Strategy::LSE;
  std::size_t size = 0;
  std::vector<std::string> member_ids;
  Aggregation aggregation = Aggregation::MeanByS;
  double lambda = 0.5;

  /// "LSE-4", "RSE-20", ...
  std::string name() const;
};

/// Picks ensemble members by validation mAP (ties: model id). Throws
/// DomainError stating the shortfall when the board cannot supply them, and
/// for an odd RSE size.
EnsembleSpec compose_ensemble(const Leaderboard& board, Strategy strategy, std::size_t size,
                              Aggregation aggregation = Aggregation::MeanByS, double lambda = 0.5);

/// Groups and aggregates the members' detections image by image. The result
/// carries one detection per group, in canonical order, with model id
/// `output_id` (defaults to spec.name()). `models` may hold extra sets; a
/// member without a set is an InputError naming it.
DetectionSet ensemble_predict(std::span<const DetectionSet> models, const EnsembleSpec& spec,
                              Exec exec = Exec::Parallel, std::string output_id = {});

}  // namespace detcal
