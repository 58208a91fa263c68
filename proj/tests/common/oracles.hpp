#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "detcal/box.hpp"
#include "detcal/types.hpp"

namespace detcal::test {

// Reference D-ECE: one pass over detections per bin, no profile structure.
inline double brute_force_dece(const std::vector<Detection>& dets, const GroundTruth& gt, double t, std::size_t m,
                               double min_score) {
  std::vector<std::pair<double, bool>> scored;
  for (const auto& [id, boxes] : gt) {
    std::vector<Detection> mine;
    for (const auto& d : dets) {
      if (d.image_id == id && d.score >= min_score) mine.push_back(d);
    }
    std::stable_sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    std::vector<bool> taken(boxes.size(), false);
    for (const auto& d : mine) {
      long best = -1;
      double best_iou = -1.0;
      for (std::size_t j = 0; j < boxes.size(); ++j) {
        const double v = iou(d.box, boxes[j]);
        if (!taken[j] && v >= t && v > best_iou) {
          best = static_cast<long>(j);
          best_iou = v;
        }
      }
      if (best >= 0) taken[static_cast<std::size_t>(best)] = true;
      scored.emplace_back(d.score, best >= 0);
    }
  }
  const double width = (1.0 - min_score) / static_cast<double>(m);
  double total = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    const double lo = min_score + width * static_cast<double>(b);
    const double hi = b + 1 == m ? 1.0 : min_score + width * static_cast<double>(b + 1);
    double n = 0, hits = 0, conf = 0;
    for (const auto& [s, ok] : scored) {
      const bool inside = s >= lo && (s < hi || (b + 1 == m && s <= 1.0));
      if (!inside) continue;
      n += 1;
      hits += ok;
      conf += s;
    }
    if (n > 0) total += n / static_cast<double>(scored.size()) * std::abs(hits / n - conf / n);
  }
  return total;
}

inline bool valid_partition(const std::vector<std::vector<std::size_t>>& groups, const std::vector<Detection>& boxes,
                     double lambda) {
  for (const auto& g : groups) {
    for (std::size_t x = 0; x < g.size(); ++x) {
      for (std::size_t y = x + 1; y < g.size(); ++y) {
        const auto& p = boxes[g[x]];
        const auto& q = boxes[g[y]];
        if (p.model_id == q.model_id || iou(p.box, q.box) < lambda) return false;
      }
    }
  }
  return true;
}

// Every set partition of the boxes that satisfies the model and clique rules,
// as sorted lists of sorted groups.
inline std::set<std::vector<std::vector<std::size_t>>> valid_partitions(const std::vector<Detection>& boxes, double lambda) {
  std::set<std::vector<std::vector<std::size_t>>> out;
  std::vector<std::vector<std::size_t>> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == boxes.size()) {
      if (!valid_partition(cur, boxes, lambda)) return;
      auto canon = cur;
      for (auto& g : canon) std::sort(g.begin(), g.end());
      std::sort(canon.begin(), canon.end());
      out.insert(canon);
      return;
    }
    for (std::size_t g = 0; g < cur.size(); ++g) {
      cur[g].push_back(i);
      rec(i + 1);
      cur[g].pop_back();
    }
    cur.push_back({i});
    rec(i + 1);
    cur.pop_back();
  };
  rec(0);
  return out;
}

}  // namespace detcal::test
