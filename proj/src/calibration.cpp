#include "detcal/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detcal/error.hpp"
#include "detcal/stats.hpp"

namespace detcal {

void CalibrationOptions::validate() const {
  if (bins == 0) throw DomainError("number of calibration bins must be at least 1");
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw DomainError("IoU threshold must lie in (0,1]");
  if (!(min_score >= 0.0 && min_score < 1.0)) throw DomainError("min_score must lie in [0,1)");
}

std::vector<double> bin_edges(std::size_t m_bins, double min_score) {
  if (m_bins == 0) throw DomainError("number of calibration bins must be at least 1");
  std::vector<double> edges(m_bins + 1);
  const double width = (1.0 - min_score) / static_cast<double>(m_bins);
  for (std::size_t i = 0; i < m_bins; ++i) edges[i] = min_score + static_cast<double>(i) * width;
  edges[m_bins] = 1.0;
  return edges;
}

std::size_t bin_index(double score, std::span<const double> edges) {
  const std::size_t m = edges.size() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), score);
  const auto idx = static_cast<std::size_t>(it - edges.begin());
  if (idx == 0) throw DomainError("score below the lowest calibration bin");
  return std::min(idx - 1, m - 1);
}

namespace {

ReliabilityProfile accumulate(const std::vector<double>& edges, const CalibrationOptions& options,
                              const auto& for_each_detection) {
  const std::size_t m = edges.size() - 1;
  std::vector<stats::CompensatedSum> conf(m);
  ReliabilityProfile profile;
  profile.iou_threshold = options.iou_threshold;
  profile.min_score = options.min_score;
  profile.bins.resize(m);
  for_each_detection([&](double score, bool matched) {
    const std::size_t idx = bin_index(score, edges);
    auto& bin = profile.bins[idx];
    ++bin.count;
    if (matched) ++bin.matched;
    conf[idx].add(score);
    ++profile.n_det;
  });
  for (std::size_t i = 0; i < m; ++i) {
    auto& bin = profile.bins[i];
    bin.lo = edges[i];
    bin.hi = edges[i + 1];
    if (bin.count == 0) {
      bin.mean_conf = 0.5 * (bin.lo + bin.hi);
      bin.precision = 0.0;
    } else {
      const double n = static_cast<double>(bin.count);
      bin.mean_conf = std::clamp(conf[i].value() / n, bin.lo, bin.hi);
      bin.precision = static_cast<double>(bin.matched) / n;
    }
  }
  return profile;
}

}  // namespace

CalibrationEvaluator::CalibrationEvaluator(const EvalDataset& data, CalibrationOptions options, Exec exec)
    : options_(options), images_(data.size()) {
  options_.validate();
  edges_ = bin_edges(options_.bins, options_.min_score);
  parallel_for(exec, data.size(), [&](std::size_t i) {
    const auto& img = data[i];
    std::vector<ScoredBox> kept;
    for (const auto& d : img.dets) {
      if (d.score >= options_.min_score) kept.push_back(d);
    }
    const auto match = match_greedy(std::span<const ScoredBox>(kept), img.gts, options_.iou_threshold);
    auto& prep = images_[i];
    for (std::size_t d = 0; d < kept.size(); ++d) {
      prep.scores.push_back(kept[d].score);
      prep.matched.push_back(match.matched[d] ? 1 : 0);
    }
  });
}

ReliabilityProfile CalibrationEvaluator::profile() const {
  std::vector<std::size_t> all(images_.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return profile(all);
}

ReliabilityProfile CalibrationEvaluator::profile(std::span<const std::size_t> selection) const {
  std::vector<std::size_t> chosen(selection.begin(), selection.end());
  std::sort(chosen.begin(), chosen.end());
  for (const std::size_t i : chosen) {
    if (i >= images_.size()) throw DomainError("image index out of range in calibration selection");
  }
  return accumulate(edges_, options_, [&](auto&& visit) {
    for (const std::size_t i : chosen) {
      const auto& prep = images_[i];
      for (std::size_t d = 0; d < prep.scores.size(); ++d) visit(prep.scores[d], prep.matched[d] != 0);
    }
  });
}

ReliabilityProfile build_profile(const EvalDataset& data, const CalibrationOptions& options, Exec exec) {
  return CalibrationEvaluator(data, options, exec).profile();
}

ReliabilityProfile build_profile(std::span<const Detection> dets, const GroundTruth& gts,
                                 const CalibrationOptions& options, Exec exec) {
  options.validate();
  return build_profile(make_eval_dataset(dets, gts), options, exec);
}

double d_ece(const ReliabilityProfile& profile) {
  if (profile.n_det == 0) throw DomainError("no detections to calibrate");
  stats::CompensatedSum total;
  const double n = static_cast<double>(profile.n_det);
  for (const auto& bin : profile.bins) {
    if (bin.count == 0) continue;
    total.add(static_cast<double>(bin.count) / n * std::abs(bin.precision - bin.mean_conf));
  }
  return std::clamp(total.value(), 0.0, 1.0);
}

std::vector<ReliabilityRow> reliability_export(const ReliabilityProfile& profile) {
  std::vector<ReliabilityRow> rows;
  rows.reserve(profile.bins.size());
  for (const auto& bin : profile.bins) {
    rows.push_back({bin.lo, bin.hi, bin.count, bin.mean_conf, bin.precision, bin.mean_conf - bin.precision});
  }
  return rows;
}

ReliabilityProfile profile_from_rows(std::span<const ReliabilityRow> rows, double iou_threshold,
                                     double min_score) {
  ReliabilityProfile profile;
  profile.iou_threshold = iou_threshold;
  profile.min_score = min_score;
  for (const auto& row : rows) {
    ReliabilityBin bin;
    bin.lo = row.bin_lo;
    bin.hi = row.bin_hi;
    bin.count = row.count;
    bin.mean_conf = row.mean_conf;
    bin.precision = row.precision;
    bin.matched = static_cast<std::size_t>(std::llround(row.precision * static_cast<double>(row.count)));
    profile.n_det += row.count;
    profile.bins.push_back(bin);
  }
  return profile;
}

}  // namespace detcal
