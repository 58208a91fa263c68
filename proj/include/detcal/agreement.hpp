#pragma once

#include <span>
#include <string>
#include <vector>

#include "detcal/exec.hpp"
#include "detcal/types.hpp"

namespace detcal {

/// Per-image annotation counts of one rater, averaged over its image universe.
struct RaterStats {
  std::string rater_id;
  std::size_t n_images = 0;
  double mean_retained = 0.0;
  double mean_added = 0.0;
  double mean_unknown = 0.0;
  double mean_total = 0.0;
  double std_total = 0.0;  // sample standard deviation across images
};

RaterStats rater_stats(const AnnotationSet& annotations);

struct AgreementPoint {
  double iou_threshold = 0.0;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
};

struct AgreementCurve {
  std::vector<AgreementPoint> points;
};

/// Per-image F1 between two raters (symmetric matching) at one threshold, in
/// image-id order. Images both raters left empty score 1.
std::vector<double> per_image_f1(const AnnotationSet& a, const AnnotationSet& b, double threshold);

/// Mean and standard deviation over images of the per-image F1 at each
/// threshold. Both sets must list the same images.
AgreementCurve agreement_curve(const AnnotationSet& a, const AnnotationSet& b, std::span<const double> iou_grid,
                               Exec exec = Exec::Parallel);

}  // namespace detcal
