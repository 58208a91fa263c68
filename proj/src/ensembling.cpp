#include "detcal/ensembling.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "detcal/error.hpp"
#include "detcal/stats.hpp"

namespace detcal {

std::string_view to_string(Aggregation a) {
  return a == Aggregation::MeanByS ? "mean_by_S" : "max_confidence";
}

std::string_view to_string(Strategy s) { return s == Strategy::LSE ? "LSE" : "RSE"; }

Aggregation parse_aggregation(std::string_view s) {
  if (s == "mean_by_S" || s == "mean") return Aggregation::MeanByS;
  if (s == "max_confidence" || s == "max") return Aggregation::MaxConfidence;
  throw DomainError("unknown aggregation mode '" + std::string(s) + "'");
}

Strategy parse_strategy(std::string_view s) {
  if (s == "LSE" || s == "lse") return Strategy::LSE;
  if (s == "RSE" || s == "rse") return Strategy::RSE;
  throw DomainError("unknown ensemble strategy '" + std::string(s) + "'");
}

Aggregate aggregate_group(std::span<const Detection> members, std::size_t ensemble_size, Aggregation mode) {
  if (members.empty()) throw DomainError("cannot aggregate an empty group");
  if (ensemble_size < members.size()) {
    throw DomainError("group has more members than the ensemble size");
  }
  if (mode == Aggregation::MaxConfidence) {
    const auto best = std::max_element(members.begin(), members.end(), [](const Detection& a, const Detection& b) {
      return a.score < b.score;
    });
    return {best->score, best->box};
  }
  stats::CompensatedSum score, x, y, w, h;
  for (const auto& m : members) {
    score.add(m.score);
    x.add(m.box.x);
    y.add(m.box.y);
    w.add(m.box.w);
    h.add(m.box.h);
  }
  const double n = static_cast<double>(members.size());
  return {score.value() / static_cast<double>(ensemble_size),
          BoundingBox{x.value() / n, y.value() / n, w.value() / n, h.value() / n}};
}

namespace {

struct Candidate {
  const Detection* det;
  std::size_t model;     // position of the model in the ensemble
  std::size_t position;  // input position within that model's image detections
};

/// `per_model[m]` lists model m's detections on one image in input order;
/// `model_ids[m]` its id.
std::vector<DetectionGroup> group_image(const std::vector<std::vector<const Detection*>>& per_model,
                                        const std::vector<std::string>& model_ids, double lambda,
                                        Aggregation mode) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("grouping threshold lambda must lie in (0,1]");
  const std::size_t ensemble_size = per_model.size();
  if (ensemble_size == 0) throw DomainError("grouping needs at least one model");

  std::vector<Candidate> order;
  for (std::size_t m = 0; m < per_model.size(); ++m) {
    for (std::size_t p = 0; p < per_model[m].size(); ++p) {
      require_valid(per_model[m][p]->box, "detection box");
      order.push_back({per_model[m][p], m, p});
    }
  }
  std::sort(order.begin(), order.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.det->score != b.det->score) return a.det->score > b.det->score;
    if (a.model != b.model) return model_ids[a.model] < model_ids[b.model];
    return a.position < b.position;
  });

  struct Building {
    std::vector<const Detection*> members;
    std::vector<std::size_t> models;
  };
  std::vector<Building> groups;
  for (const auto& c : order) {
    std::size_t best = groups.size();
    double best_mean = -1.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& group = groups[g];
      if (std::find(group.models.begin(), group.models.end(), c.model) != group.models.end()) continue;
      double total = 0.0;
      bool admissible = true;
      for (const Detection* member : group.members) {
        const double v = iou_unchecked(member->box, c.det->box);
        if (v < lambda) {
          admissible = false;
          break;
        }
        total += v;
      }
      if (!admissible) continue;
      const double mean = total / static_cast<double>(group.members.size());
      if (mean > best_mean) {
        best_mean = mean;
        best = g;
      }
    }
    if (best == groups.size()) groups.emplace_back();
    groups[best].members.push_back(c.det);
    groups[best].models.push_back(c.model);
  }

  std::vector<DetectionGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    DetectionGroup group;
    group.ensemble_size = ensemble_size;
    for (const Detection* d : g.members) group.members.push_back(*d);
    const auto agg = aggregate_group(group.members, ensemble_size, mode);
    group.agg_box = agg.box;
    group.agg_score = agg.score;
    out.push_back(std::move(group));
  }
  return out;
}

void require_distinct_models(std::span<const DetectionSet> per_model) {
  std::set<std::string_view> seen;
  for (const auto& set : per_model) {
    if (!seen.insert(set.model_id).second) {
      throw DomainError("model '" + set.model_id + "' appears twice in the ensemble");
    }
  }
}

}  // namespace

std::vector<DetectionGroup> group_boxes(std::span<const DetectionSet> per_model, std::string_view image_id,
                                        double lambda, Aggregation mode) {
  require_distinct_models(per_model);
  std::vector<std::vector<const Detection*>> dets(per_model.size());
  std::vector<std::string> ids;
  for (std::size_t m = 0; m < per_model.size(); ++m) {
    ids.push_back(per_model[m].model_id);
    for (const auto& d : per_model[m].detections) {
      if (d.image_id == image_id) dets[m].push_back(&d);
    }
  }
  return group_image(dets, ids, lambda, mode);
}

void Leaderboard::validate() const {
  std::set<std::string_view> ids;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto at = "entries[" + std::to_string(i) + "]";
    if (e.model_id.empty()) throw InputError("empty model_id at " + at);
    if (!ids.insert(e.model_id).second) throw InputError("duplicate model_id '" + e.model_id + "' at " + at);
    if ((e.training_kind == TrainingKind::RaterSpecific) != e.rater_id.has_value()) {
      throw InputError("rater_id must be present exactly for rater_specific models at " + at);
    }
    if (!(e.validation_map >= 0.0 && e.validation_map <= 1.0)) {
      throw InputError("validation_map out of [0,1] at " + at + ".validation_map");
    }
  }
}

std::string EnsembleSpec::name() const { return std::string(to_string(strategy)) + "-" + std::to_string(size); }

namespace {

std::vector<const LeaderboardEntry*> ranked(const Leaderboard& board, auto&& keep) {
  std::vector<const LeaderboardEntry*> out;
  for (const auto& e : board.entries) {
    if (keep(e)) out.push_back(&e);
  }
  std::sort(out.begin(), out.end(), [](const LeaderboardEntry* a, const LeaderboardEntry* b) {
    if (a->validation_map != b->validation_map) return a->validation_map > b->validation_map;
    return a->model_id < b->model_id;
  });
  return out;
}

}  // namespace

EnsembleSpec compose_ensemble(const Leaderboard& board, Strategy strategy, std::size_t size,
                              Aggregation aggregation, double lambda) {
  board.validate();
  if (size == 0) throw DomainError("ensemble size must be at least 1");
  EnsembleSpec spec{strategy, size, {}, aggregation, lambda};
  if (strategy == Strategy::LSE) {
    const auto pool = ranked(board, [](const LeaderboardEntry& e) {
      return e.training_kind == TrainingKind::LabelSampling;
    });
    if (pool.size() < size) {
      throw DomainError("LSE of size " + std::to_string(size) + " needs " + std::to_string(size) +
                        " label_sampling models, board has " + std::to_string(pool.size()) + " (short by " +
                        std::to_string(size - pool.size()) + ")");
    }
    for (std::size_t i = 0; i < size; ++i) spec.member_ids.push_back(pool[i]->model_id);
    return spec;
  }

  if (size % 2 != 0) throw DomainError("RSE size must be even, got " + std::to_string(size));
  std::set<std::string> raters;
  for (const auto& e : board.entries) {
    if (e.training_kind == TrainingKind::RaterSpecific) raters.insert(*e.rater_id);
  }
  if (raters.size() != 2) {
    throw DomainError("RSE needs rater_specific models from exactly two raters, board has " +
                      std::to_string(raters.size()));
  }
  const std::size_t per_rater = size / 2;
  for (const auto& rater : raters) {
    const auto pool = ranked(board, [&](const LeaderboardEntry& e) {
      return e.training_kind == TrainingKind::RaterSpecific && e.rater_id == rater;
    });
    if (pool.size() < per_rater) {
      throw DomainError("RSE of size " + std::to_string(size) + " needs " + std::to_string(per_rater) +
                        " rater_specific models for rater '" + rater + "', board has " +
                        std::to_string(pool.size()) + " (short by " + std::to_string(per_rater - pool.size()) +
                        ")");
    }
    for (std::size_t i = 0; i < per_rater; ++i) spec.member_ids.push_back(pool[i]->model_id);
  }
  return spec;
}

DetectionSet ensemble_predict(std::span<const DetectionSet> models, const EnsembleSpec& spec, Exec exec,
                              std::string output_id) {
  if (spec.member_ids.size() != spec.size) {
    throw DomainError("ensemble spec lists " + std::to_string(spec.member_ids.size()) + " members for size " +
                      std::to_string(spec.size));
  }
  std::vector<const DetectionSet*> members;
  for (const auto& id : spec.member_ids) {
    const auto it = std::find_if(models.begin(), models.end(), [&](const DetectionSet& s) { return s.model_id == id; });
    if (it == models.end()) throw InputError("missing detections for ensemble member model '" + id + "'");
    it->validate();
    members.push_back(&*it);
  }
  {
    std::set<std::string_view> seen;
    for (const auto* m : members) {
      if (!seen.insert(m->model_id).second) throw DomainError("model '" + m->model_id + "' listed twice");
    }
  }

  DetectionSet out;
  out.model_id = output_id.empty() ? spec.name() : std::move(output_id);
  std::map<std::string, ImageInfo> universe;
  for (const auto* m : members) {
    for (const auto& img : m->images) universe.emplace(img.id, img);
  }
  for (const auto& [id, img] : universe) out.images.push_back(img);

  std::vector<std::string> ids;
  std::vector<std::map<std::string_view, std::vector<const Detection*>>> by_image(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    ids.push_back(members[m]->model_id);
    for (const auto& d : members[m]->detections) by_image[m][d.image_id].push_back(&d);
  }

  std::vector<std::vector<Detection>> per_image(out.images.size());
  parallel_for(exec, out.images.size(), [&](std::size_t i) {
    const std::string& image_id = out.images[i].id;
    std::vector<std::vector<const Detection*>> dets(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
      const auto it = by_image[m].find(image_id);
      if (it != by_image[m].end()) dets[m] = it->second;
    }
    for (const auto& g : group_image(dets, ids, spec.lambda, spec.aggregation)) {
      per_image[i].push_back({image_id, g.agg_box, g.agg_score, out.model_id});
    }
  });
  for (auto& dets : per_image) {
    for (auto& d : dets) out.detections.push_back(std::move(d));
  }
  sort_canonical(out.detections);
  return out;
}

}  // namespace detcal
