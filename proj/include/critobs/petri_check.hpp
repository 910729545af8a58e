#pragma once

// Critical observability of labeled Petri nets with a finite or co-finite set
// of critical markings, semi-decided by exploring the twin net.
//
// The twin net reaches [Ma Mb] iff it reaches [Mb Ma], so flagging markings
// with a critical first half and a non-critical second half is complete; a
// two-sided test would only duplicate work.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "critobs/error.hpp"
#include "critobs/petri.hpp"
#include "critobs/verdict.hpp"

namespace critobs {

/// Finite: C is the list. CoFinite: C is every reachable marking not in the
/// list. Membership is only meaningful for reachable markings.
class CriticalMarkingSet {
 public:
  enum class Mode { Finite, CoFinite };

  CriticalMarkingSet(Mode mode, std::vector<Marking> markings)
      : mode_(mode), markings_(std::move(markings)) {
    std::sort(markings_.begin(), markings_.end());
    if (std::adjacent_find(markings_.begin(), markings_.end()) != markings_.end()) {
      throw ValidationError("critical marking list contains a duplicate");
    }
  }

  [[nodiscard]] Mode mode() const { return mode_; }
  [[nodiscard]] const std::vector<Marking>& markings() const { return markings_; }

  [[nodiscard]] bool member(const Marking& m) const {
    bool listed = std::binary_search(markings_.begin(), markings_.end(), m);
    return mode_ == Mode::Finite ? listed : !listed;
  }

  void validate(const PetriNet& net) const {
    for (const auto& m : markings_) require_dimension(net, m);
  }

 private:
  Mode mode_;
  std::vector<Marking> markings_;
};

inline bool member(const Marking& m, const CriticalMarkingSet& c) { return c.member(m); }

using PetriWitness = Witness<TransitionId, Marking, LabelId>;

struct PetriVerdict : Verdict<PetriWitness> {
  bool exhaustive = false;
  ExploreLimits limits;
  LimitHit limit_hit = LimitHit::None;
  bool unbounded_evidence = false;
};

inline PetriVerdict check_petri(const LabeledPetriNet& g, const CriticalMarkingSet& c,
                                const ExploreLimits& limits = {}, bool detect_unbounded = false) {
  c.validate(g.net());
  const TwinNet tw = twin_net(g);
  const std::size_t np = g.net().num_places();

  Marking left(np);
  Marking right(np);
  auto hit = [&](const Marking& m) {
    std::copy(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(np), left.begin());
    std::copy(m.begin() + static_cast<std::ptrdiff_t>(np), m.end(), right.begin());
    return c.member(left) && !c.member(right);
  };
  ExploreOptions options;
  options.record_edges = false;
  options.detect_unbounded = detect_unbounded;
  Exploration ex = explore(tw.net, tw.initial, limits, hit, options);

  PetriVerdict verdict;
  verdict.limits = limits;
  verdict.limit_hit = ex.limit_hit;
  verdict.unbounded_evidence = ex.unbounded_evidence;
  verdict.stats.explored = ex.markings.size();
  verdict.stats.peak_frontier = ex.peak_frontier;
  for (auto d : ex.depth) verdict.stats.depth = std::max<std::uint64_t>(verdict.stats.depth, d);

  if (ex.stopped_at) {
    PetriWitness w;
    for (std::uint32_t k : ex.path_to(*ex.stopped_at)) {
      const auto& [first, second] = tw.origin[k];
      if (first) w.run1.push_back(*first);
      if (second) w.run2.push_back(*second);
    }
    w.observation = g.observe(w.run1);
    const Marking& end = ex.markings[*ex.stopped_at];
    w.end1 = tw.first(end);
    w.end2 = tw.second(end);
    verdict.outcome = Outcome::NotCriticallyObservable;
    verdict.witness = std::move(w);
  } else if (ex.exhaustive) {
    verdict.outcome = Outcome::CriticallyObservable;
    verdict.exhaustive = true;
  } else {
    verdict.outcome = Outcome::Unknown;
  }
  return verdict;
}

inline std::optional<std::string> witness_error(const LabeledPetriNet& g, const CriticalMarkingSet& c,
                                                const PetriWitness& w) {
  const PetriNet& net = g.net();
  auto replay_run = [&](const std::vector<TransitionId>& run, const char* name,
                        const Marking& end) -> std::optional<std::string> {
    Marking m = g.initial();
    for (std::size_t k = 0; k < run.size(); ++k) {
      const std::string where = std::string(name) + " step " + std::to_string(k);
      if (run[k] >= net.num_transitions()) return where + " names no transition";
      if (!is_enabled(net, m, run[k])) return where + " fires a disabled transition";
      m = fire(net, m, run[k]);
    }
    if (m != end) return std::string(name) + " does not end in the claimed marking";
    if (g.observe(run) != w.observation) return std::string(name) + " does not project onto the observation";
    return std::nullopt;
  };
  if (w.end1.size() != net.num_places() || w.end2.size() != net.num_places()) {
    return "end marking has the wrong dimension";
  }
  if (auto err = replay_run(w.run1, "run1", w.end1)) return err;
  if (auto err = replay_run(w.run2, "run2", w.end2)) return err;
  if (!c.member(w.end1)) return "end1 is not critical";
  if (c.member(w.end2)) return "end2 is critical";
  return std::nullopt;
}

}  // namespace critobs
