#include "detcal/matching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "detcal/error.hpp"
#include "detcal/stats.hpp"

namespace detcal {

namespace {

void require_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw DomainError("IoU threshold must lie in (0,1], got " + std::to_string(threshold));
  }
}

}  // namespace

MatchResult match_greedy(std::span<const ScoredBox> dets, std::span<const BoundingBox> gts,
                         double threshold) {
  require_threshold(threshold);
  for (const auto& d : dets) require_valid(d.box, "detection box");
  for (const auto& g : gts) require_valid(g, "ground-truth box");

  MatchResult result;
  result.threshold = threshold;
  result.matched.assign(dets.size(), false);
  result.covered.assign(gts.size(), false);

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  for (const std::size_t d : order) {
    std::size_t best = gts.size();
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (result.covered[g]) continue;
      const double v = iou_unchecked(dets[d].box, gts[g]);
      if (v >= threshold && v > best_iou) {
        best = g;
        best_iou = v;
      }
    }
    if (best < gts.size()) {
      result.matched[d] = true;
      result.covered[best] = true;
      result.pairs.push_back({d, best, best_iou});
    }
  }
  return result;
}

MatchResult match_greedy(std::span<const Detection> dets, std::span<const BoundingBox> gts,
                         double threshold) {
  std::vector<ScoredBox> boxes;
  boxes.reserve(dets.size());
  for (const auto& d : dets) {
    if (d.image_id != dets.front().image_id) {
      throw DomainError("match_greedy: detections span several images ('" + dets.front().image_id +
                        "' and '" + d.image_id + "')");
    }
    boxes.push_back({d.box, d.score});
  }
  return match_greedy(std::span<const ScoredBox>(boxes), gts, threshold);
}

MatchResult match_symmetric(std::span<const BoundingBox> boxes_a, std::span<const BoundingBox> boxes_b,
                            double threshold) {
  require_threshold(threshold);
  for (const auto& b : boxes_a) require_valid(b, "first list box");
  for (const auto& b : boxes_b) require_valid(b, "second list box");

  struct Candidate {
    std::size_t i;
    std::size_t j;
    double iou;
    BoundingBox lo;
    BoundingBox hi;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < boxes_a.size(); ++i) {
    for (std::size_t j = 0; j < boxes_b.size(); ++j) {
      const double v = iou_unchecked(boxes_a[i], boxes_b[j]);
      if (v >= threshold) {
        const auto& [lo, hi] = std::minmax(boxes_a[i], boxes_b[j]);
        candidates.push_back({i, j, v, lo, hi});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.iou != y.iou) return x.iou > y.iou;
    if (x.lo != y.lo) return x.lo < y.lo;
    if (x.hi != y.hi) return x.hi < y.hi;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });

  MatchResult result;
  result.threshold = threshold;
  result.matched.assign(boxes_a.size(), false);
  result.covered.assign(boxes_b.size(), false);
  for (const auto& c : candidates) {
    if (result.matched[c.i] || result.covered[c.j]) continue;
    result.matched[c.i] = true;
    result.covered[c.j] = true;
    result.pairs.push_back({c.i, c.j, c.iou});
  }
  return result;
}

double f1_score(const MatchResult& match, std::size_t n_a, std::size_t n_b) {
  if (n_a == 0 && n_b == 0) return 1.0;
  if (match.pairs.size() > std::min(n_a, n_b)) {
    throw DomainError("f1_score: more matched pairs than boxes");
  }
  return 2.0 * static_cast<double>(match.pairs.size()) / static_cast<double>(n_a + n_b);
}

EvalDataset make_eval_dataset(std::span<const Detection> dets, const GroundTruth& gts, double min_score) {
  EvalDataset data;
  data.reserve(gts.size());
  std::map<std::string_view, std::size_t> index;
  for (const auto& [id, boxes] : gts) {
    for (const auto& b : boxes) require_valid(b, "ground-truth box on image '" + id + "'");
    index.emplace(id, data.size());
    data.push_back({id, {}, boxes});
  }
  for (const auto& d : dets) {
    const auto it = index.find(d.image_id);
    if (it == index.end()) {
      throw InputError("detection on image '" + d.image_id + "' which has no ground-truth entry");
    }
    if (!(d.score > 0.0 && d.score <= 1.0)) {
      throw DomainError("detection score out of (0,1] on image '" + d.image_id + "'");
    }
    require_valid(d.box, "detection box on image '" + d.image_id + "'");
    if (d.score < min_score) continue;
    data[it->second].dets.push_back({d.box, d.score});
  }
  for (auto& img : data) {
    std::stable_sort(img.dets.begin(), img.dets.end(), [](const ScoredBox& a, const ScoredBox& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.box < b.box;
    });
  }
  return data;
}

std::vector<double> default_iou_grid() {
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back((50.0 + 5.0 * k) / 100.0);
  return grid;
}

void require_valid_grid(std::span<const double> grid) {
  if (grid.empty()) throw DomainError("IoU grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= 1.0)) throw DomainError("IoU grid values must lie in (0,1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("IoU grid must be strictly increasing");
  }
}

std::vector<double> parse_iou_grid(const std::string& text) {
  std::vector<double> grid;
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw DomainError("bad number '" + s + "' in IoU grid '" + text + "'");
    }
    if (used != s.size()) throw DomainError("bad number '" + s + "' in IoU grid '" + text + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw DomainError("IoU grid range must be lo:step:hi, got '" + text + "'");
    const double lo = to_double(parts[0]);
    const double step = to_double(parts[1]);
    const double hi = to_double(parts[2]);
    if (!(step > 0.0)) throw DomainError("IoU grid step must be positive");
    // Values are rebuilt from integer counts and rounded to 1e-9 so that
    // 0.5:0.05:0.95 yields exactly the literals 0.5, 0.55, ...
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long k = 0; k <= n; ++k) {
      grid.push_back(std::round((lo + static_cast<double>(k) * step) * 1e9) / 1e9);
    }
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) grid.push_back(to_double(part));
  }
  require_valid_grid(grid);
  return grid;
}

double interpolated_ap(std::span<const std::pair<double, bool>> ranked, std::size_t n_gt) {
  if (n_gt == 0 || ranked.empty()) return 0.0;
  const std::size_t n = ranked.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ranked[i].second) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n - 1; i > 0; --i) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  stats::CompensatedSum total;
  for (int k = 0; k <= 100; ++k) {
    const double r = static_cast<double>(k) / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) total.add(precision[static_cast<std::size_t>(it - recall.begin())]);
  }
  return total.value() / 101.0;
}

DetectionEvaluator::DetectionEvaluator(const EvalDataset& data, EvalOptions options, Exec exec)
    : options_(std::move(options)), images_(data.size()) {
  require_valid_grid(options_.iou_grid);
  parallel_for(exec, data.size(), [&](std::size_t i) {
    const auto& img = data[i];
    auto& prep = images_[i];
    prep.n_gt = img.gts.size();
    prep.scores.reserve(img.dets.size());
    for (const auto& d : img.dets) prep.scores.push_back(d.score);
    for (const double t : options_.iou_grid) {
      const auto match = match_greedy(std::span<const ScoredBox>(img.dets), img.gts, t);
      std::vector<std::uint8_t> flags(img.dets.size());
      std::size_t recalled = 0;
      for (std::size_t d = 0; d < flags.size(); ++d) {
        flags[d] = match.matched[d] ? 1 : 0;
        if (d < options_.max_dets_per_image && flags[d]) ++recalled;
      }
      prep.tp.push_back(std::move(flags));
      prep.recalled_top.push_back(recalled);
    }
  });
}

EvalSummary DetectionEvaluator::summarize() const {
  std::vector<std::size_t> all(images_.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return summarize(all);
}

EvalSummary DetectionEvaluator::summarize(std::span<const std::size_t> selection) const {
  std::vector<std::size_t> chosen(selection.begin(), selection.end());
  std::sort(chosen.begin(), chosen.end());
  std::size_t n_gt = 0;
  struct Ref {
    double score;
    std::size_t image;
    std::size_t det;
  };
  std::vector<Ref> pooled;
  for (const std::size_t i : chosen) {
    if (i >= images_.size()) throw DomainError("image index out of range in evaluation selection");
    n_gt += images_[i].n_gt;
    for (std::size_t d = 0; d < images_[i].scores.size(); ++d) pooled.push_back({images_[i].scores[d], i, d});
  }
  std::stable_sort(pooled.begin(), pooled.end(), [](const Ref& a, const Ref& b) { return a.score > b.score; });

  EvalSummary summary;
  summary.iou_grid = options_.iou_grid;
  summary.no_ground_truth = n_gt == 0;
  std::vector<std::pair<double, bool>> ranked(pooled.size());
  for (std::size_t t = 0; t < options_.iou_grid.size(); ++t) {
    for (std::size_t k = 0; k < pooled.size(); ++k) {
      ranked[k] = {pooled[k].score, images_[pooled[k].image].tp[t][pooled[k].det] != 0};
    }
    summary.ap_at.push_back(interpolated_ap(ranked, n_gt));
    std::size_t recalled = 0;
    for (const std::size_t i : chosen) recalled += images_[i].recalled_top[t];
    summary.ar_at.push_back(n_gt == 0 ? 0.0 : static_cast<double>(recalled) / static_cast<double>(n_gt));
  }
  summary.map = stats::mean(summary.ap_at);
  summary.mar = stats::mean(summary.ar_at);
  return summary;
}

ApResult average_precision(const EvalDataset& data, double threshold) {
  require_threshold(threshold);
  EvalOptions options;
  options.iou_grid = {threshold};
  const auto summary = DetectionEvaluator(data, options, Exec::Serial).summarize();
  return {summary.ap_at.front(), summary.no_ground_truth};
}

ApResult average_precision(std::span<const Detection> dets, const GroundTruth& gts, double threshold) {
  return average_precision(make_eval_dataset(dets, gts), threshold);
}

EvalSummary evaluate(const EvalDataset& data, const EvalOptions& options, Exec exec) {
  return DetectionEvaluator(data, options, exec).summarize();
}

EvalSummary evaluate(std::span<const Detection> dets, const GroundTruth& gts, const EvalOptions& options,
                     Exec exec) {
  return evaluate(make_eval_dataset(dets, gts), options, exec);
}

}  // namespace detcal
