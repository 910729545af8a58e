#pragma once

// Products of automata: the classical parallel composition, the twin
// composition that pairs runs with equal observations, and the observer.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "critobs/automaton.hpp"
#include "critobs/error.hpp"

namespace critobs {

using StateTuple = std::vector<StateId>;

struct StateTupleHash {
  std::size_t operator()(const StateTuple& t) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (StateId q : t) {
      h ^= q + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Union of component alphabets with a per-component translation table.
/// Events shared by several components must agree on observability.
struct SharedAlphabet {
  EventAlphabet alphabet;
  // local[i][e] is component i's id for global event e, if i owns e.
  std::vector<std::vector<std::optional<EventId>>> local;
};

inline SharedAlphabet merge_alphabets(std::span<const Nfa* const> components) {
  std::vector<std::string> names;
  std::vector<bool> observable;
  std::unordered_map<std::string, EventId> index;
  for (const Nfa* g : components) {
    const auto& a = g->alphabet();
    for (EventId e = 0; e < a.size(); ++e) {
      auto [it, inserted] = index.emplace(a.name(e), static_cast<EventId>(names.size()));
      if (inserted) {
        names.push_back(a.name(e));
        observable.push_back(a.observable(e));
      } else if (observable[it->second] != a.observable(e)) {
        throw ValidationError("event '" + a.name(e) +
                              "' is observable in one component and unobservable in another");
      }
    }
  }
  SharedAlphabet out{EventAlphabet(names, observable), {}};
  for (const Nfa* g : components) {
    std::vector<std::optional<EventId>> map(names.size());
    for (EventId e = 0; e < names.size(); ++e) map[e] = g->alphabet().find(names[e]);
    out.local.push_back(std::move(map));
  }
  return out;
}

/// Calls `visit(next_tuple)` for every successor of `tuple` under global
/// event `e` in the synchronous product: owners of `e` move together, the
/// others stay put. Successors are produced in lexicographic order.
template <typename Visit>
void for_each_product_successor(std::span<const Nfa* const> components, const SharedAlphabet& shared,
                                const StateTuple& tuple, EventId e, Visit&& visit) {
  const std::size_t n = components.size();
  std::vector<std::span<const StateId>> choices(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (auto local = shared.local[i][e]) {
      choices[i] = components[i]->successors(tuple[i], *local);
      if (choices[i].empty()) return;
    } else {
      choices[i] = std::span<const StateId>(&tuple[i], 1);
    }
  }
  StateTuple next(n);
  std::vector<std::size_t> pos(n, 0);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) next[i] = choices[i][pos[i]];
    visit(next);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++pos[i] < choices[i].size()) break;
      pos[i] = 0;
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

inline std::string tuple_name(std::span<const Nfa* const> components, const StateTuple& t) {
  std::string name = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) name += ',';
    name += components[i]->state_name(t[i]);
  }
  return name + ")";
}

/// Accessible part of the parallel composition of several automata, with the
/// component tuple behind every composed state.
struct ComposedAutomaton {
  Nfa automaton;
  std::vector<StateTuple> tuples;
};

inline ComposedAutomaton compose(std::span<const Nfa* const> components,
                                 std::size_t max_states = std::numeric_limits<std::size_t>::max()) {
  if (components.empty()) throw ValidationError("composition needs at least one component");
  SharedAlphabet shared = merge_alphabets(components);
  const std::size_t n = components.size();

  std::vector<StateTuple> tuples;
  std::unordered_map<StateTuple, StateId, StateTupleHash> index;
  auto intern = [&](const StateTuple& t) -> StateId {
    auto [it, inserted] = index.emplace(t, static_cast<StateId>(tuples.size()));
    if (inserted) {
      if (tuples.size() >= max_states) {
        throw ResourceError("composition exceeds the cap of " + std::to_string(max_states) +
                            " states");
      }
      tuples.push_back(t);
    }
    return it->second;
  };

  // Initial tuples in lexicographic order.
  std::vector<StateId> initial;
  {
    StateTuple t(n);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == n) {
        initial.push_back(intern(t));
        return;
      }
      for (StateId q : components[i]->initial()) {
        t[i] = q;
        rec(i + 1);
      }
    };
    rec(0);
  }

  std::vector<Transition> transitions;
  for (std::size_t head = 0; head < tuples.size(); ++head) {
    const StateTuple current = tuples[head];
    for (EventId e = 0; e < shared.alphabet.size(); ++e) {
      for_each_product_successor(components, shared, current, e, [&](const StateTuple& next) {
        transitions.push_back({static_cast<StateId>(head), e, intern(next)});
      });
    }
  }

  std::vector<std::string> names;
  std::vector<StateId> marked;
  names.reserve(tuples.size());
  for (StateId s = 0; s < tuples.size(); ++s) {
    names.push_back(tuple_name(components, tuples[s]));
    bool all_marked = true;
    for (std::size_t i = 0; i < n; ++i) all_marked = all_marked && components[i]->marked().contains(tuples[s][i]);
    if (all_marked) marked.push_back(s);
  }
  return {Nfa(std::move(names), shared.alphabet, std::move(transitions), StateSet(std::move(initial)),
              StateSet(std::move(marked))),
          std::move(tuples)};
}

/// Classical parallel composition A || B (accessible part).
inline Nfa parallel_compose(const Nfa& a, const Nfa& b) {
  const Nfa* parts[] = {&a, &b};
  return compose(parts).automaton;
}

using StatePair = std::pair<StateId, StateId>;

/// How a twin move changes the pair: an observable event moves both
/// coordinates, an unobservable event moves exactly one.
enum class TwinMove : std::uint8_t { Both, First, Second };

/// Lazy successor function of the twin composition of `g` with itself.
class TwinView {
 public:
  explicit TwinView(const Nfa& g) : g_(&g) {}

  [[nodiscard]] const Nfa& source() const { return *g_; }

  /// Initial pairs I x I in lexicographic order.
  [[nodiscard]] std::vector<StatePair> initial() const {
    std::vector<StatePair> out;
    for (StateId x : g_->initial())
      for (StateId y : g_->initial()) out.emplace_back(x, y);
    return out;
  }

  /// Calls `visit(next_pair, event, move)` for every twin successor, events
  /// in id order.
  template <typename Visit>
  void for_each_successor(StatePair p, Visit&& visit) const {
    const auto& alphabet = g_->alphabet();
    for (EventId e = 0; e < alphabet.size(); ++e) {
      auto xs = g_->successors(p.first, e);
      auto ys = g_->successors(p.second, e);
      if (alphabet.observable(e)) {
        for (StateId x : xs)
          for (StateId y : ys) visit(StatePair{x, y}, e, TwinMove::Both);
      } else {
        for (StateId x : xs) visit(StatePair{x, p.second}, e, TwinMove::First);
        for (StateId y : ys) visit(StatePair{p.first, y}, e, TwinMove::Second);
      }
    }
  }

 private:
  const Nfa* g_;
};

/// Materialized twin composition: accessible pairs of `source` states.
struct TwinAutomaton {
  Nfa automaton;
  std::vector<StatePair> pairs;
};

inline TwinAutomaton twin(const Nfa& g) {
  TwinView view(g);
  const std::size_t n = g.num_states();
  std::vector<StateId> index(n * n, std::numeric_limits<StateId>::max());
  std::vector<StatePair> pairs;
  auto intern = [&](StatePair p) {
    StateId& slot = index[p.first * n + p.second];
    if (slot == std::numeric_limits<StateId>::max()) {
      slot = static_cast<StateId>(pairs.size());
      pairs.push_back(p);
    }
    return slot;
  };
  std::vector<StateId> initial;
  for (auto p : view.initial()) initial.push_back(intern(p));

  std::vector<Transition> transitions;
  for (std::size_t head = 0; head < pairs.size(); ++head) {
    const StatePair current = pairs[head];
    view.for_each_successor(current, [&](StatePair next, EventId e, TwinMove) {
      transitions.push_back({static_cast<StateId>(head), e, intern(next)});
    });
  }

  std::vector<std::string> names;
  std::vector<StateId> marked;
  for (StateId s = 0; s < pairs.size(); ++s) {
    auto [x, y] = pairs[s];
    names.push_back("(" + g.state_name(x) + "," + g.state_name(y) + ")");
    if (g.marked().contains(x) && g.marked().contains(y)) marked.push_back(s);
  }
  return {Nfa(std::move(names), g.alphabet(), std::move(transitions), StateSet(std::move(initial)),
              StateSet(std::move(marked))),
          std::move(pairs)};
}

/// Observer: the deterministic automaton over observable events whose states
/// are the sets of source states consistent with each observation.
struct ObserverAutomaton {
  Nfa automaton;
  std::vector<StateSet> subsets;
};

inline std::string subset_name(const Nfa& g, const StateSet& s) {
  std::string name = "{";
  bool first = true;
  for (StateId q : s) {
    if (!first) name += ',';
    name += g.state_name(q);
    first = false;
  }
  return name + "}";
}

inline ObserverAutomaton observer(const Nfa& g) {
  const auto& alphabet = g.alphabet();
  std::vector<EventId> observable = alphabet.observable_events();
  std::vector<std::string> obs_names;
  for (EventId e : observable) obs_names.push_back(alphabet.name(e));
  EventAlphabet obs_alphabet(obs_names, std::vector<bool>(obs_names.size(), true));

  std::vector<StateSet> subsets;
  std::map<StateSet, StateId> index;
  auto intern = [&](StateSet s) {
    auto [it, inserted] = index.emplace(s, static_cast<StateId>(subsets.size()));
    if (inserted) subsets.push_back(std::move(s));
    return it->second;
  };
  intern(unobservable_closure(g, g.initial()));

  std::vector<Transition> transitions;
  for (std::size_t head = 0; head < subsets.size(); ++head) {
    for (EventId k = 0; k < observable.size(); ++k) {
      StateSet next = step(g, subsets[head], observable[k]);
      if (next.empty()) continue;
      StateId target = intern(unobservable_closure(g, next));
      transitions.push_back({static_cast<StateId>(head), k, target});
    }
  }

  std::vector<std::string> names;
  std::vector<StateId> marked;
  for (StateId s = 0; s < subsets.size(); ++s) {
    names.push_back(subset_name(g, subsets[s]));
    for (StateId q : subsets[s]) {
      if (g.marked().contains(q)) {
        marked.push_back(s);
        break;
      }
    }
  }
  return {Nfa(std::move(names), std::move(obs_alphabet), std::move(transitions), StateSet{0},
              StateSet(std::move(marked))),
          std::move(subsets)};
}

}  // namespace critobs
