#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "detcal/box.hpp"
#include "detcal/exec.hpp"
#include "detcal/types.hpp"

namespace detcal {

struct MatchPair {
  std::size_t det = 0;  // index into the first list (detections or boxes_a)
  std::size_t gt = 0;   // index into the second list (ground truth or boxes_b)
  double iou = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

/// One-to-one assignment between two box lists at an IoU threshold.
struct MatchResult {
  std::vector<bool> matched;  // per entry of the first list
  std::vector<bool> covered;  // per entry of the second list
  std::vector<MatchPair> pairs;
  double threshold = 0.5;

  std::size_t true_positives() const { return pairs.size(); }
};

struct ScoredBox {
  BoundingBox box;
  double score = 0.0;
};

/// Detection-to-ground-truth matching. Detections are visited by descending
/// score (ties by input order); each takes the unmatched ground-truth box with
/// the highest IoU >= threshold, ties to the lowest index. All detections
/// must share one image id.
MatchResult match_greedy(std::span<const Detection> dets, std::span<const BoundingBox> gts,
                         double threshold);
MatchResult match_greedy(std::span<const ScoredBox> dets, std::span<const BoundingBox> gts,
                         double threshold);

/// Rater-vs-rater matching that treats both lists alike. All cross pairs with
/// IoU >= threshold are visited by descending IoU and accepted when both
/// boxes are still free. Equal IoUs are ordered by the unordered pair of box
/// coordinates, then by index pair, so swapping the lists transposes the
/// result.
MatchResult match_symmetric(std::span<const BoundingBox> boxes_a, std::span<const BoundingBox> boxes_b,
                            double threshold);

/// 2 tp / (n_a + n_b); 1.0 when both lists are empty.
double f1_score(const MatchResult& match, std::size_t n_a, std::size_t n_b);

/// Detections and ground truth of one image, prepared for evaluation: boxes
/// validated and detections in canonical order (score descending, then box),
/// so results never depend on input order.
struct EvalImage {
  std::string image_id;
  std::vector<ScoredBox> dets;
  std::vector<BoundingBox> gts;
};

/// Images sorted by id. The image universe is the ground truth's key set.
using EvalDataset = std::vector<EvalImage>;

/// Groups detections by image. Detections scoring below min_score are
/// dropped. A detection on an image absent from the ground truth is an
/// InputError.
EvalDataset make_eval_dataset(std::span<const Detection> dets, const GroundTruth& gts,
                              double min_score = 0.0);

/// COCO-style IoU grid 0.50:0.05:0.95.
std::vector<double> default_iou_grid();
/// Parses "lo:step:hi" (inclusive) or a comma list. Throws DomainError.
std::vector<double> parse_iou_grid(const std::string& text);
/// Non-empty, strictly increasing, values in (0, 1]. Throws DomainError.
void require_valid_grid(std::span<const double> grid);

struct ApResult {
  double ap = 0.0;
  bool no_ground_truth = false;  // AP is defined as 0 in that case
};

/// 101-point interpolated AP of detections pooled across images.
ApResult average_precision(const EvalDataset& data, double threshold);
ApResult average_precision(std::span<const Detection> dets, const GroundTruth& gts, double threshold);

/// Pooled (score, is_true_positive) list to interpolated AP. Ties in score
/// keep the given order.
double interpolated_ap(std::span<const std::pair<double, bool>> ranked, std::size_t n_gt);

struct EvalSummary {
  double map = 0.0;
  double mar = 0.0;
  std::vector<double> iou_grid;
  std::vector<double> ap_at;  // parallel to iou_grid
  std::vector<double> ar_at;  // parallel to iou_grid
  bool no_ground_truth = false;
};

struct EvalOptions {
  std::vector<double> iou_grid = default_iou_grid();
  std::size_t max_dets_per_image = 100;  // AR only
};

/// Matches every image once per IoU threshold, then answers AP/AR queries for
/// any multiset of images (bootstrap resamples) without re-matching.
class DetectionEvaluator {
 public:
  DetectionEvaluator(const EvalDataset& data, EvalOptions options, Exec exec = Exec::Parallel);

  std::size_t image_count() const { return images_.size(); }
  const EvalOptions& options() const { return options_; }

  /// Summary over all images.
  EvalSummary summarize() const;
  /// Summary over a multiset of image indices; repeated indices count with
  /// multiplicity.
  EvalSummary summarize(std::span<const std::size_t> selection) const;

 private:
  struct Prepared {
    std::vector<double> scores;                   // canonical order
    std::vector<std::vector<std::uint8_t>> tp;    // [threshold][detection]
    std::vector<std::size_t> recalled_top;        // [threshold] matches among top max_dets
    std::size_t n_gt = 0;
  };

  EvalOptions options_;
  std::vector<Prepared> images_;
};

EvalSummary evaluate(const EvalDataset& data, const EvalOptions& options = {}, Exec exec = Exec::Parallel);
EvalSummary evaluate(std::span<const Detection> dets, const GroundTruth& gts,
                     const EvalOptions& options = {}, Exec exec = Exec::Parallel);

}  // namespace detcal
