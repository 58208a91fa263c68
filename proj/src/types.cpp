#include "detcal/types.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "detcal/error.hpp"

namespace detcal {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Retained:
      return "retained";
    case Provenance::Added:
      return "added";
    case Provenance::Unknown:
      return "unknown";
  }
  return "unknown";
}

std::string_view to_string(TrainingKind k) {
  return k == TrainingKind::LabelSampling ? "label_sampling" : "rater_specific";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "retained") return Provenance::Retained;
  if (s == "added") return Provenance::Added;
  if (s == "unknown") return Provenance::Unknown;
  throw InputError("unknown provenance '" + std::string(s) + "'");
}

TrainingKind parse_training_kind(std::string_view s) {
  if (s == "label_sampling") return TrainingKind::LabelSampling;
  if (s == "rater_specific") return TrainingKind::RaterSpecific;
  throw InputError("unknown training_kind '" + std::string(s) + "'");
}

namespace {

std::set<std::string_view> image_universe(const std::vector<ImageInfo>& images) {
  std::set<std::string_view> ids;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& img = images[i];
    if (img.id.empty()) {
      throw InputError("empty image id at images[" + std::to_string(i) + "].id");
    }
    if (img.width <= 0 || img.height <= 0) {
      throw InputError("image size must be positive at images[" + std::to_string(i) + "]");
    }
    if (!ids.insert(img.id).second) {
      throw InputError("duplicate image id '" + img.id + "' at images[" + std::to_string(i) + "]");
    }
  }
  return ids;
}

}  // namespace

void DetectionSet::validate() const {
  const auto ids = image_universe(images);
  for (std::size_t k = 0; k < detections.size(); ++k) {
    const auto& d = detections[k];
    const auto at = "detections[" + std::to_string(k) + "]";
    if (!ids.contains(d.image_id)) {
      throw InputError("unknown image id '" + d.image_id + "' at " + at + ".image_id");
    }
    if (!d.box.valid()) throw InputError("invalid bbox (need w>0, h>0, finite) at " + at + ".bbox");
    if (!(d.score > 0.0 && d.score <= 1.0)) {
      throw InputError("score out of (0,1] at " + at + ".score");
    }
    if (d.model_id != model_id) {
      throw InputError("model id '" + d.model_id + "' differs from set model id '" + model_id +
                       "' at " + at);
    }
  }
  if (training_kind == TrainingKind::RaterSpecific && !rater_id) {
    throw InputError("rater_specific detection set requires rater_id");
  }
}

void AnnotationSet::validate() const {
  const auto ids = image_universe(images);
  for (std::size_t k = 0; k < annotations.size(); ++k) {
    const auto& a = annotations[k];
    const auto at = "annotations[" + std::to_string(k) + "]";
    if (!ids.contains(a.image_id)) {
      throw InputError("unknown image id '" + a.image_id + "' at " + at + ".image_id");
    }
    if (!a.box.valid()) throw InputError("invalid bbox (need w>0, h>0, finite) at " + at + ".bbox");
  }
}

GroundTruth ground_truth(const AnnotationSet& annotations) {
  GroundTruth gt;
  for (const auto& img : annotations.images) gt[img.id];
  for (const auto& a : annotations.annotations) gt[a.image_id].push_back(a.box);
  return gt;
}

bool canonical_less(const Detection& a, const Detection& b) {
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.score != b.score) return a.score > b.score;
  if (a.box != b.box) return a.box < b.box;
  return a.model_id < b.model_id;
}

void sort_canonical(std::vector<Detection>& dets) {
  std::stable_sort(dets.begin(), dets.end(), canonical_less);
}

}  // namespace detcal
