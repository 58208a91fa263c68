#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "detcal/box.hpp"

namespace detcal {

enum class Provenance { Retained, Added, Unknown };
enum class TrainingKind { LabelSampling, RaterSpecific };

std::string_view to_string(Provenance p);
std::string_view to_string(TrainingKind k);
Provenance parse_provenance(std::string_view s);
TrainingKind parse_training_kind(std::string_view s);

struct ImageInfo {
  std::string id;
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

/// A scored box predicted by one model on one image. Score lies in (0, 1].
struct Detection {
  std::string image_id;
  BoundingBox box;
  double score = 0.0;
  std::string model_id;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// All detections of one model, plus the images it was run on.
struct DetectionSet {
  std::string model_id;
  std::optional<TrainingKind> training_kind;
  std::optional<std::string> rater_id;
  std::vector<ImageInfo> images;
  std::vector<Detection> detections;

  /// Throws InputError on the first violated invariant: unique image ids,
  /// detections on listed images only, matching model ids, valid boxes and
  /// scores in (0, 1].
  void validate() const;

  friend bool operator==(const DetectionSet&, const DetectionSet&) = default;
};

struct Annotation {
  std::string image_id;
  BoundingBox box;
  Provenance provenance = Provenance::Unknown;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// One rater's (or a consensus) ground-truth boxes.
struct AnnotationSet {
  std::string rater_id;
  std::vector<ImageInfo> images;
  std::vector<Annotation> annotations;

  void validate() const;

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

/// Ground-truth boxes keyed by image id. Images without boxes are present
/// with an empty list, so the key set is the image universe.
using GroundTruth = std::map<std::string, std::vector<BoundingBox>>;

GroundTruth ground_truth(const AnnotationSet& annotations);

/// Canonical detection order: image id, then score descending, then box,
/// then model id. Ensemble output follows it.
bool canonical_less(const Detection& a, const Detection& b);
void sort_canonical(std::vector<Detection>& dets);

}  // namespace detcal
