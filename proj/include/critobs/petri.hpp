#pragma once

// Labeled Petri nets: firing semantics, the label-synchronized twin net, and
// bounded explicit-state exploration of the reachability graph.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "critobs/error.hpp"

namespace critobs {

using Token = std::uint64_t;
using Marking = std::vector<Token>;
using PlaceId = std::uint32_t;
using TransitionId = std::uint32_t;
using LabelId = std::uint32_t;

/// Arc weights of a net, indexed [place][transition].
using ArcMatrix = std::vector<std::vector<Token>>;

/// Place/transition net N = (P, T, Pre, Post).
class PetriNet {
 public:
  PetriNet(std::vector<std::string> places, std::vector<std::string> transitions, ArcMatrix pre,
           ArcMatrix post)
      : places_(std::move(places)), transitions_(std::move(transitions)) {
    if (places_.empty() && transitions_.empty()) {
      throw ValidationError("Petri net has neither places nor transitions");
    }
    auto register_name = [&](const std::string& name, bool is_place, std::uint32_t id) {
      if (!names_.emplace(name, std::make_pair(is_place, id)).second) {
        throw ValidationError("Petri net: name '" + name + "' used twice");
      }
    };
    for (PlaceId p = 0; p < places_.size(); ++p) register_name(places_[p], true, p);
    for (TransitionId t = 0; t < transitions_.size(); ++t) register_name(transitions_[t], false, t);

    auto check_dims = [&](const ArcMatrix& m, const char* which) {
      if (m.size() != places_.size()) {
        throw ValidationError(std::string(which) + " has " + std::to_string(m.size()) + " rows, expected " +
                              std::to_string(places_.size()));
      }
      for (const auto& row : m) {
        if (row.size() != transitions_.size()) {
          throw ValidationError(std::string(which) + " row has " + std::to_string(row.size()) +
                                " columns, expected " + std::to_string(transitions_.size()));
        }
      }
    };
    check_dims(pre, "pre");
    check_dims(post, "post");

    arcs_.resize(transitions_.size());
    for (TransitionId t = 0; t < transitions_.size(); ++t) {
      for (PlaceId p = 0; p < places_.size(); ++p) {
        if (pre[p][t] != 0 || post[p][t] != 0) arcs_[t].push_back({p, pre[p][t], post[p][t]});
      }
    }
  }

  struct Arc {
    PlaceId place;
    Token pre;
    Token post;
  };

  [[nodiscard]] std::size_t num_places() const { return places_.size(); }
  [[nodiscard]] std::size_t num_transitions() const { return transitions_.size(); }
  [[nodiscard]] const std::string& place_name(PlaceId p) const { return places_.at(p); }
  [[nodiscard]] const std::string& transition_name(TransitionId t) const { return transitions_.at(t); }
  [[nodiscard]] const std::vector<std::string>& place_names() const { return places_; }
  [[nodiscard]] const std::vector<std::string>& transition_names() const { return transitions_; }

  /// Places touched by `t` with their Pre/Post weights, ascending by place.
  [[nodiscard]] std::span<const Arc> arcs(TransitionId t) const { return arcs_.at(t); }

  [[nodiscard]] Token pre(PlaceId p, TransitionId t) const {
    for (const auto& a : arcs(t))
      if (a.place == p) return a.pre;
    return 0;
  }
  [[nodiscard]] Token post(PlaceId p, TransitionId t) const {
    for (const auto& a : arcs(t))
      if (a.place == p) return a.post;
    return 0;
  }

  [[nodiscard]] ArcMatrix pre_matrix() const { return matrix(true); }
  [[nodiscard]] ArcMatrix post_matrix() const { return matrix(false); }

  [[nodiscard]] std::optional<TransitionId> find_transition(std::string_view name) const {
    auto it = names_.find(std::string(name));
    if (it == names_.end() || it->second.first) return std::nullopt;
    return it->second.second;
  }
  TransitionId transition_id(std::string_view name) const {
    if (auto t = find_transition(name)) return *t;
    throw ValidationError("unknown transition '" + std::string(name) + "'");
  }
  [[nodiscard]] std::optional<PlaceId> find_place(std::string_view name) const {
    auto it = names_.find(std::string(name));
    if (it == names_.end() || !it->second.first) return std::nullopt;
    return it->second.second;
  }

 private:
  ArcMatrix matrix(bool want_pre) const {
    ArcMatrix m(places_.size(), std::vector<Token>(transitions_.size(), 0));
    for (TransitionId t = 0; t < transitions_.size(); ++t)
      for (const auto& a : arcs_[t]) m[a.place][t] = want_pre ? a.pre : a.post;
    return m;
  }

  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::unordered_map<std::string, std::pair<bool, std::uint32_t>> names_;
  std::vector<std::vector<Arc>> arcs_;
};

inline void require_dimension(const PetriNet& net, const Marking& m) {
  if (m.size() != net.num_places()) {
    throw ValidationError("marking has " + std::to_string(m.size()) + " entries, net has " +
                          std::to_string(net.num_places()) + " places");
  }
}

inline bool is_enabled(const PetriNet& net, const Marking& m, TransitionId t) {
  for (const auto& a : net.arcs(t))
    if (m[a.place] < a.pre) return false;
  return true;
}

/// Transitions enabled in `m`, in declared order.
inline std::vector<TransitionId> enabled(const PetriNet& net, const Marking& m) {
  require_dimension(net, m);
  std::vector<TransitionId> out;
  for (TransitionId t = 0; t < net.num_transitions(); ++t)
    if (is_enabled(net, m, t)) out.push_back(t);
  return out;
}

inline Marking fire(const PetriNet& net, const Marking& m, TransitionId t) {
  require_dimension(net, m);
  if (t >= net.num_transitions()) throw ValidationError("transition id out of range");
  if (!is_enabled(net, m, t)) {
    throw ContractError("transition '" + net.transition_name(t) + "' is not enabled");
  }
  Marking out = m;
  for (const auto& a : net.arcs(t)) out[a.place] = out[a.place] - a.pre + a.post;
  return out;
}

/// Petri net system with a labeling T -> Sigma u {epsilon}.
class LabeledPetriNet {
 public:
  LabeledPetriNet(PetriNet net, Marking initial, std::vector<std::string> alphabet,
                  std::vector<std::optional<LabelId>> labels)
      : net_(std::move(net)),
        initial_(std::move(initial)),
        alphabet_(std::move(alphabet)),
        labels_(std::move(labels)) {
    require_dimension(net_, initial_);
    if (labels_.size() != net_.num_transitions()) {
      throw ValidationError("labeling covers " + std::to_string(labels_.size()) + " of " +
                            std::to_string(net_.num_transitions()) + " transitions");
    }
    for (const auto& l : labels_) {
      if (l && *l >= alphabet_.size()) throw ValidationError("transition label outside the alphabet");
    }
    std::unordered_set<std::string> distinct(alphabet_.begin(), alphabet_.end());
    if (distinct.size() != alphabet_.size()) throw ValidationError("duplicate label in alphabet");
  }

  [[nodiscard]] const PetriNet& net() const { return net_; }
  [[nodiscard]] const Marking& initial() const { return initial_; }
  [[nodiscard]] const std::vector<std::string>& alphabet() const { return alphabet_; }
  [[nodiscard]] std::optional<LabelId> label(TransitionId t) const { return labels_.at(t); }
  [[nodiscard]] const std::vector<std::optional<LabelId>>& labels() const { return labels_; }
  [[nodiscard]] bool observable(TransitionId t) const { return labels_.at(t).has_value(); }

  std::optional<LabelId> find_label(std::string_view name) const {
    auto it = std::find(alphabet_.begin(), alphabet_.end(), name);
    if (it == alphabet_.end()) return std::nullopt;
    return static_cast<LabelId>(it - alphabet_.begin());
  }

  /// Observable labels of a firing sequence.
  [[nodiscard]] std::vector<LabelId> observe(std::span<const TransitionId> run) const {
    std::vector<LabelId> out;
    for (TransitionId t : run)
      if (auto l = labels_.at(t)) out.push_back(*l);
    return out;
  }

 private:
  PetriNet net_;
  Marking initial_;
  std::vector<std::string> alphabet_;
  std::vector<std::optional<LabelId>> labels_;
};

/// Identity labeling: each transition is its own label.
inline LabeledPetriNet identity_labeled(PetriNet net, Marking initial) {
  std::vector<std::string> alphabet = net.transition_names();
  std::vector<std::optional<LabelId>> labels;
  for (LabelId t = 0; t < alphabet.size(); ++t) labels.emplace_back(t);
  return LabeledPetriNet(std::move(net), std::move(initial), std::move(alphabet), std::move(labels));
}

inline constexpr std::string_view kLambda = "λ";

/// Label-based synchronization of a net with a place-disjoint copy of itself.
/// Places [0, n) belong to the original, [n, 2n) to the copy.
struct TwinNet {
  PetriNet net;
  Marking initial;
  // Source transitions (first, second) behind each twin transition; nullopt
  // stands for the empty move.
  std::vector<std::pair<std::optional<TransitionId>, std::optional<TransitionId>>> origin;
  std::size_t source_places = 0;

  [[nodiscard]] Marking first(const Marking& m) const {
    return Marking(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(source_places));
  }
  [[nodiscard]] Marking second(const Marking& m) const {
    return Marking(m.begin() + static_cast<std::ptrdiff_t>(source_places), m.end());
  }
};

inline TwinNet twin_net(const LabeledPetriNet& g) {
  const PetriNet& n = g.net();
  const std::size_t np = n.num_places();
  const std::size_t nt = n.num_transitions();

  std::unordered_set<std::string> taken(n.place_names().begin(), n.place_names().end());
  taken.insert(n.transition_names().begin(), n.transition_names().end());
  std::vector<std::string> places = n.place_names();
  for (PlaceId p = 0; p < np; ++p) {
    std::string copy = n.place_name(p) + "'";
    while (taken.contains(copy)) copy += "'";
    taken.insert(copy);
    places.push_back(std::move(copy));
  }

  std::vector<std::pair<std::optional<TransitionId>, std::optional<TransitionId>>> origin;
  std::vector<std::string> names;
  for (TransitionId t1 = 0; t1 < nt; ++t1) {
    if (!g.label(t1)) {
      names.push_back(n.transition_name(t1) + "|" + std::string(kLambda));
      origin.emplace_back(t1, std::nullopt);
      continue;
    }
    for (TransitionId t2 = 0; t2 < nt; ++t2) {
      if (g.label(t2) == g.label(t1)) {
        names.push_back(n.transition_name(t1) + "|" + n.transition_name(t2));
        origin.emplace_back(t1, t2);
      }
    }
  }
  for (TransitionId t = 0; t < nt; ++t) {
    if (!g.label(t)) {
      names.push_back(std::string(kLambda) + "|" + n.transition_name(t));
      origin.emplace_back(std::nullopt, t);
    }
  }

  ArcMatrix pre(2 * np, std::vector<Token>(names.size(), 0));
  ArcMatrix post = pre;
  for (std::size_t k = 0; k < origin.size(); ++k) {
    const auto& [first, second] = origin[k];
    if (first)
      for (const auto& a : n.arcs(*first)) {
        pre[a.place][k] = a.pre;
        post[a.place][k] = a.post;
      }
    if (second)
      for (const auto& a : n.arcs(*second)) {
        pre[np + a.place][k] = a.pre;
        post[np + a.place][k] = a.post;
      }
  }
  Marking initial = g.initial();
  initial.insert(initial.end(), g.initial().begin(), g.initial().end());
  return TwinNet{PetriNet(std::move(places), std::move(names), std::move(pre), std::move(post)),
                 std::move(initial), std::move(origin), np};
}

struct ExploreLimits {
  std::size_t max_markings = 1'000'000;
  std::size_t max_depth = 10'000;
  Token max_tokens = 1'000'000;
};

enum class LimitHit { None, Markings, Depth, Tokens };

struct ExploreOptions {
  bool record_edges = true;
  // Flag markings that strictly cover an ancestor on their BFS path.
  bool detect_unbounded = false;
};

struct ExploreEdge {
  std::uint32_t from;
  TransitionId transition;
  std::uint32_t to;
};

/// Reachability graph fragment. Marking 0 is the initial marking; `parent`
/// holds BFS tree edges for replaying a firing sequence to any marking.
struct Exploration {
  std::vector<Marking> markings;
  std::vector<std::pair<std::uint32_t, TransitionId>> parent;  // root: (self, 0)
  std::vector<std::uint32_t> depth;
  std::vector<ExploreEdge> edges;
  bool exhaustive = false;
  LimitHit limit_hit = LimitHit::None;
  bool unbounded_evidence = false;
  std::optional<std::uint32_t> stopped_at;  // marking the stop predicate accepted
  std::uint64_t peak_frontier = 0;

  /// Firing sequence from the initial marking to marking `id`.
  [[nodiscard]] std::vector<TransitionId> path_to(std::uint32_t id) const {
    std::vector<TransitionId> run;
    while (parent[id].first != id) {
      run.push_back(parent[id].second);
      id = parent[id].first;
    }
    std::reverse(run.begin(), run.end());
    return run;
  }
};

namespace detail {

/// Markings stored contiguously, deduplicated through an index hash set.
class MarkingStore {
 public:
  explicit MarkingStore(std::size_t width)
      : width_(width), index_(64, Hash{this}, Equal{this}) {}

  [[nodiscard]] std::optional<std::uint32_t> find(const Marking& m) const {
    scratch_ = &m;
    auto it = index_.find(kScratch);
    if (it == index_.end()) return std::nullopt;
    return *it;
  }

  /// Returns (id, inserted).
  std::pair<std::uint32_t, bool> insert(const Marking& m) {
    if (auto known = find(m)) return {*known, false};
    const auto id = static_cast<std::uint32_t>(count_);
    data_.insert(data_.end(), m.begin(), m.end());
    ++count_;
    index_.insert(id);
    return {id, true};
  }

  [[nodiscard]] std::span<const Token> get(std::uint32_t id) const {
    return {data_.data() + static_cast<std::size_t>(id) * width_, width_};
  }
  [[nodiscard]] std::size_t size() const { return count_; }

 private:
  static constexpr std::uint32_t kScratch = std::numeric_limits<std::uint32_t>::max();

  std::span<const Token> view(std::uint32_t id) const {
    if (id == kScratch) return {scratch_->data(), width_};
    return get(id);
  }

  struct Hash {
    const MarkingStore* store;
    std::size_t operator()(std::uint32_t id) const noexcept {
      std::size_t h = 0xcbf29ce484222325ull;
      for (Token v : store->view(id)) h = (h ^ v) * 0x100000001b3ull;
      return h;
    }
  };
  struct Equal {
    const MarkingStore* store;
    bool operator()(std::uint32_t a, std::uint32_t b) const noexcept {
      auto x = store->view(a);
      auto y = store->view(b);
      return std::equal(x.begin(), x.end(), y.begin(), y.end());
    }
  };

  std::size_t width_;
  std::size_t count_ = 0;
  std::vector<Token> data_;
  mutable const Marking* scratch_ = nullptr;
  std::unordered_set<std::uint32_t, Hash, Equal> index_;
};

}  // namespace detail

/// Breadth-first exploration of the markings reachable from `m0`.
/// Transitions are tried in declared order. `stop(marking)` is evaluated on
/// every newly discovered marking (the initial one included); exploration
/// halts on the first marking it accepts. `exhaustive` is true iff the
/// frontier emptied without any limit being hit.
template <typename Stop>
Exploration explore(const PetriNet& net, const Marking& m0, const ExploreLimits& limits,
                    Stop&& stop, ExploreOptions options = {}) {
  require_dimension(net, m0);
  if (limits.max_markings == 0) throw ValidationError("explore: max_markings must be positive");
  Exploration result;
  detail::MarkingStore store(m0.size());
  std::vector<std::pair<std::uint32_t, TransitionId>> parent;
  std::vector<std::uint32_t> depth;

  auto finish = [&](bool exhaustive) {
    result.exhaustive = exhaustive;
    result.markings.reserve(store.size());
    for (std::uint32_t id = 0; id < store.size(); ++id) {
      auto m = store.get(id);
      result.markings.emplace_back(m.begin(), m.end());
    }
    result.parent = std::move(parent);
    result.depth = std::move(depth);
    return std::move(result);
  };

  for (Token v : m0) {
    if (v > limits.max_tokens) {
      result.limit_hit = LimitHit::Tokens;
      store.insert(m0);
      parent.emplace_back(0, 0);
      depth.push_back(0);
      return finish(false);
    }
  }
  store.insert(m0);
  parent.emplace_back(0, 0);
  depth.push_back(0);
  if (stop(m0)) {
    result.stopped_at = 0;
    return finish(false);
  }

  auto covers_ancestor = [&](const Marking& m, std::uint32_t from) {
    for (std::uint32_t at = from;; at = parent[at].first) {
      auto old = store.get(at);
      bool geq = true;
      bool strict = false;
      for (std::size_t p = 0; p < m.size() && geq; ++p) {
        geq = m[p] >= old[p];
        strict = strict || m[p] > old[p];
      }
      if (geq && strict) return true;
      if (parent[at].first == at) return false;
    }
  };

  bool truncated = false;
  std::vector<std::uint32_t> frontier{0};
  std::vector<std::uint32_t> next;
  Marking current;
  Marking successor;
  while (!frontier.empty()) {
    result.peak_frontier = std::max<std::uint64_t>(result.peak_frontier, frontier.size());
    next.clear();
    for (std::uint32_t id : frontier) {
      auto view = store.get(id);
      current.assign(view.begin(), view.end());
      for (TransitionId t = 0; t < net.num_transitions(); ++t) {
        if (!is_enabled(net, current, t)) continue;
        if (depth[id] >= limits.max_depth) {
          truncated = true;
          result.limit_hit = LimitHit::Depth;
          break;
        }
        successor = current;
        bool too_many = false;
        for (const auto& a : net.arcs(t)) {
          successor[a.place] = successor[a.place] - a.pre + a.post;
          too_many = too_many || successor[a.place] > limits.max_tokens;
        }
        if (too_many) {
          truncated = true;
          result.limit_hit = LimitHit::Tokens;
          continue;
        }
        if (store.size() >= limits.max_markings) {
          // Only a genuinely new marking breaks the cap.
          if (auto known = store.find(successor)) {
            if (options.record_edges) result.edges.push_back({id, t, *known});
            continue;
          }
          result.limit_hit = LimitHit::Markings;
          return finish(false);
        }
        auto [sid, inserted] = store.insert(successor);
        if (options.record_edges) result.edges.push_back({id, t, sid});
        if (!inserted) continue;
        parent.emplace_back(id, t);
        depth.push_back(depth[id] + 1);
        if (options.detect_unbounded && !result.unbounded_evidence && covers_ancestor(successor, id)) {
          result.unbounded_evidence = true;
        }
        if (stop(successor)) {
          result.stopped_at = sid;
          return finish(false);
        }
        next.push_back(sid);
      }
    }
    frontier.swap(next);
  }
  return finish(!truncated);
}

inline Exploration explore(const PetriNet& net, const Marking& m0, const ExploreLimits& limits,
                           ExploreOptions options = {}) {
  return explore(net, m0, limits, [](const Marking&) { return false; }, options);
}

}  // namespace critobs
