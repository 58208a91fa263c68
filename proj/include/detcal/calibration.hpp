#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "detcal/exec.hpp"
#include "detcal/matching.hpp"

namespace detcal {

struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::size_t matched = 0;
  double mean_conf = 0.0;  // bin midpoint when empty (display only)
  double precision = 0.0;  // 0 when empty
};

/// Confidence-binned detection precision. Bins split [min_score, 1] into
/// equal-width intervals; a score on an inner edge belongs to the upper bin
/// and a score of 1 to the last bin.
struct ReliabilityProfile {
  std::vector<ReliabilityBin> bins;
  std::size_t n_det = 0;
  double iou_threshold = 0.5;
  double min_score = 0.05;
};

struct CalibrationOptions {
  double iou_threshold = 0.5;
  std::size_t bins = 10;
  double min_score = 0.05;

  void validate() const;
};

/// Bin edges min_score = e_0 < e_1 < ... < e_M = 1.
std::vector<double> bin_edges(std::size_t m_bins, double min_score);
/// Index of the bin holding `score` (which must be >= edges.front()).
std::size_t bin_index(double score, std::span<const double> edges);

ReliabilityProfile build_profile(const EvalDataset& data, const CalibrationOptions& options,
                                 Exec exec = Exec::Parallel);
ReliabilityProfile build_profile(std::span<const Detection> dets, const GroundTruth& gts,
                                 const CalibrationOptions& options, Exec exec = Exec::Parallel);

/// Detection expected calibration error: the detection-weighted mean over
/// non-empty bins of |precision - mean confidence|. Throws DomainError when
/// the profile holds no detections.
double d_ece(const ReliabilityProfile& profile);

struct ReliabilityRow {
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  std::size_t count = 0;
  double mean_conf = 0.0;
  double precision = 0.0;
  double gap = 0.0;  // mean_conf - precision
};

std::vector<ReliabilityRow> reliability_export(const ReliabilityProfile& profile);
/// Rebuilds a profile from exported rows (matched counts are recovered from
/// precision * count).
ReliabilityProfile profile_from_rows(std::span<const ReliabilityRow> rows, double iou_threshold,
                                     double min_score);

/// Matches every image once, then builds profiles for any multiset of images.
class CalibrationEvaluator {
 public:
  CalibrationEvaluator(const EvalDataset& data, CalibrationOptions options, Exec exec = Exec::Parallel);

  std::size_t image_count() const { return images_.size(); }
  ReliabilityProfile profile() const;
  ReliabilityProfile profile(std::span<const std::size_t> selection) const;

 private:
  struct Prepared {
    std::vector<double> scores;
    std::vector<std::uint8_t> matched;
  };
  CalibrationOptions options_;
  std::vector<double> edges_;
  std::vector<Prepared> images_;
};

}  // namespace detcal
