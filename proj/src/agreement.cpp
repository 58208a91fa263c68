#include "detcal/agreement.hpp"

#include <map>

#include "detcal/error.hpp"
#include "detcal/matching.hpp"
#include "detcal/stats.hpp"

namespace detcal {

RaterStats rater_stats(const AnnotationSet& annotations) {
  if (annotations.images.empty()) throw DomainError("rater '" + annotations.rater_id + "' covers no images");
  const auto gt = ground_truth(annotations);
  struct Counts {
    double retained = 0, added = 0, unknown = 0;
  };
  std::map<std::string_view, Counts> per_image;
  for (const auto& [id, boxes] : gt) per_image[id];
  for (const auto& a : annotations.annotations) {
    auto& c = per_image.at(a.image_id);
    switch (a.provenance) {
      case Provenance::Retained:
        c.retained += 1;
        break;
      case Provenance::Added:
        c.added += 1;
        break;
      case Provenance::Unknown:
        c.unknown += 1;
        break;
    }
  }
  std::vector<double> retained, added, unknown, total;
  for (const auto& [id, c] : per_image) {
    retained.push_back(c.retained);
    added.push_back(c.added);
    unknown.push_back(c.unknown);
    total.push_back(c.retained + c.added + c.unknown);
  }
  RaterStats s;
  s.rater_id = annotations.rater_id;
  s.n_images = per_image.size();
  s.mean_retained = stats::mean(retained);
  s.mean_added = stats::mean(added);
  s.mean_unknown = stats::mean(unknown);
  s.mean_total = stats::mean(total);
  s.std_total = stats::stddev(total);
  return s;
}

namespace {

void require_same_universe(const GroundTruth& a, const GroundTruth& b) {
  std::vector<std::string> only_a, only_b;
  for (const auto& [id, boxes] : a) {
    if (!b.contains(id)) only_a.push_back(id);
  }
  for (const auto& [id, boxes] : b) {
    if (!a.contains(id)) only_b.push_back(id);
  }
  if (only_a.empty() && only_b.empty()) return;
  std::string msg = "annotation sets cover different images;";
  auto list = [&](const char* label, const std::vector<std::string>& ids) {
    if (ids.empty()) return;
    msg += std::string(" only in ") + label + ":";
    for (std::size_t i = 0; i < ids.size() && i < 10; ++i) msg += " " + ids[i];
    if (ids.size() > 10) msg += " ... (" + std::to_string(ids.size()) + " total)";
  };
  list("first", only_a);
  list("second", only_b);
  throw DomainError(msg);
}

}  // namespace

std::vector<double> per_image_f1(const AnnotationSet& a, const AnnotationSet& b, double threshold) {
  const auto ga = ground_truth(a);
  const auto gb = ground_truth(b);
  require_same_universe(ga, gb);
  std::vector<double> out;
  for (const auto& [id, boxes_a] : ga) {
    const auto& boxes_b = gb.at(id);
    const auto match = match_symmetric(boxes_a, boxes_b, threshold);
    out.push_back(f1_score(match, boxes_a.size(), boxes_b.size()));
  }
  return out;
}

AgreementCurve agreement_curve(const AnnotationSet& a, const AnnotationSet& b, std::span<const double> iou_grid,
                               Exec exec) {
  require_valid_grid(iou_grid);
  const auto ga = ground_truth(a);
  const auto gb = ground_truth(b);
  require_same_universe(ga, gb);

  std::vector<const std::vector<BoundingBox>*> side_a, side_b;
  for (const auto& [id, boxes] : ga) {
    side_a.push_back(&boxes);
    side_b.push_back(&gb.at(id));
  }
  // f1[t][image]
  std::vector<std::vector<double>> f1(iou_grid.size(), std::vector<double>(side_a.size()));
  parallel_for(exec, side_a.size(), [&](std::size_t i) {
    for (std::size_t t = 0; t < iou_grid.size(); ++t) {
      const auto match = match_symmetric(*side_a[i], *side_b[i], iou_grid[t]);
      f1[t][i] = f1_score(match, side_a[i]->size(), side_b[i]->size());
    }
  });
  AgreementCurve curve;
  for (std::size_t t = 0; t < iou_grid.size(); ++t) {
    curve.points.push_back({iou_grid[t], stats::mean(f1[t]), stats::stddev(f1[t])});
  }
  return curve;
}

}  // namespace detcal
