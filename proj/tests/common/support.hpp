#pragma once

#include <string>
#include <vector>

#include "detcal/rng.hpp"
#include "detcal/types.hpp"

namespace detcal::test {

inline Detection det(const std::string& image, BoundingBox box, double score, const std::string& model = "m") {
  return {image, box, score, model};
}

inline std::vector<ImageInfo> images(std::initializer_list<std::string> ids) {
  std::vector<ImageInfo> out;
  for (const auto& id : ids) out.push_back({id, 100, 100});
  return out;
}

inline DetectionSet detection_set(const std::string& model, std::vector<ImageInfo> imgs, std::vector<Detection> dets) {
  DetectionSet s;
  s.model_id = model;
  s.images = std::move(imgs);
  for (auto& d : dets) d.model_id = model;
  s.detections = std::move(dets);
  return s;
}

inline AnnotationSet annotation_set(const std::string& rater, std::vector<ImageInfo> imgs,
                                    std::vector<Annotation> rows) {
  AnnotationSet s;
  s.rater_id = rater;
  s.images = std::move(imgs);
  s.annotations = std::move(rows);
  return s;
}

/// Boxes scattered around a few centres so that overlaps of every degree occur.
inline std::vector<BoundingBox> clustered_boxes(rng::Stream& rs, std::size_t n, double spread = 6.0) {
  std::vector<BoundingBox> out;
  const double cx[3] = {20.0, 45.0, 70.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cx[rs.below(3)];
    out.push_back({c + rs.uniform(-spread, spread), c + rs.uniform(-spread, spread), rs.uniform(8.0, 20.0),
                   rs.uniform(8.0, 20.0)});
  }
  return out;
}

}  // namespace detcal::test
