#pragma once

// Reference implementations used only by tests. They read models through the
// plain transition lists and recompute everything with std::set, sharing no
// search code with the library.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "critobs/automaton.hpp"
#include "critobs/network.hpp"
#include "critobs/petri.hpp"

namespace oracle {

using critobs::Nfa;
using IntSet = std::set<std::uint32_t>;

/// Automaton as adjacency lists over dense ids.
struct Plain {
  std::uint32_t states = 0;
  std::uint32_t events = 0;
  std::vector<bool> observable;
  std::map<std::pair<std::uint32_t, std::uint32_t>, IntSet> succ;
  IntSet initial;

  [[nodiscard]] IntSet next(const IntSet& s, std::uint32_t e) const {
    IntSet out;
    for (auto q : s) {
      auto it = succ.find({q, e});
      if (it != succ.end()) out.insert(it->second.begin(), it->second.end());
    }
    return out;
  }

  [[nodiscard]] IntSet closure(IntSet s) const {
    for (bool grew = true; grew;) {
      grew = false;
      for (std::uint32_t e = 0; e < events; ++e) {
        if (observable[e]) continue;
        for (auto q : next(s, e)) grew = s.insert(q).second || grew;
      }
    }
    return s;
  }
};

inline Plain plain(const Nfa& g) {
  Plain p;
  p.states = static_cast<std::uint32_t>(g.num_states());
  p.events = static_cast<std::uint32_t>(g.alphabet().size());
  for (std::uint32_t e = 0; e < p.events; ++e) p.observable.push_back(g.alphabet().observable(e));
  for (const auto& tr : g.transitions()) p.succ[{tr.from, tr.event}].insert(tr.to);
  p.initial.insert(g.initial().begin(), g.initial().end());
  return p;
}

/// Every subset of states consistent with some observation.
inline std::set<IntSet> observation_classes(const Plain& p) {
  std::set<IntSet> seen;
  std::queue<IntSet> work;
  IntSet start = p.closure(p.initial);
  seen.insert(start);
  work.push(start);
  while (!work.empty()) {
    IntSet s = work.front();
    work.pop();
    for (std::uint32_t e = 0; e < p.events; ++e) {
      if (!p.observable[e]) continue;
      IntSet t = p.closure(p.next(s, e));
      if (t.empty()) continue;
      if (seen.insert(t).second) work.push(t);
    }
  }
  return seen;
}

/// Definition-level verdict: every observation class lies inside C or
/// outside C.
inline bool critically_observable(const Plain& p, const std::function<bool(std::uint32_t)>& critical) {
  for (const auto& s : observation_classes(p)) {
    bool in = false;
    bool out = false;
    for (auto q : s) (critical(q) ? in : out) = true;
    if (in && out) return false;
  }
  return true;
}

inline bool critically_observable(const Nfa& g, const critobs::StateSet& c) {
  return critically_observable(plain(g), [&](std::uint32_t q) { return c.contains(q); });
}

/// delta(I, w) by direct relation lookup.
inline IntSet reach(const Plain& p, const critobs::Word& w) {
  IntSet s = p.initial;
  for (auto e : w) s = p.next(s, e);
  return s;
}

/// All words of length <= n (not only generated ones).
inline std::vector<critobs::Word> all_words(std::uint32_t events, std::size_t n) {
  std::vector<critobs::Word> out{{}};
  std::vector<critobs::Word> layer{{}};
  for (std::size_t len = 1; len <= n; ++len) {
    std::vector<critobs::Word> grown;
    for (const auto& w : layer)
      for (std::uint32_t e = 0; e < events; ++e) {
        grown.push_back(w);
        grown.back().push_back(e);
      }
    out.insert(out.end(), grown.begin(), grown.end());
    layer = std::move(grown);
  }
  return out;
}

/// Pairs (x, y) with x in delta(I, w1), y in delta(I, w2) and equal
/// projections, over words of length <= n.
inline std::set<std::pair<std::uint32_t, std::uint32_t>> twin_pairs_by_words(const Plain& p, std::size_t n) {
  std::map<critobs::Word, IntSet> by_observation;
  for (const auto& w : all_words(p.events, n)) {
    IntSet s = reach(p, w);
    if (s.empty()) continue;
    critobs::Word obs;
    for (auto e : w)
      if (p.observable[e]) obs.push_back(e);
    by_observation[obs].insert(s.begin(), s.end());
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& [obs, s] : by_observation)
    for (auto x : s)
      for (auto y : s) out.insert({x, y});
  return out;
}

/// Explicit synchronous product of a network, reachable part, as a Plain
/// automaton over the network alphabet. `tuples[i]` is the tuple of state i.
struct Product {
  Plain automaton;
  std::vector<std::vector<std::uint32_t>> tuples;
};

inline Product product(const critobs::Network& net) {
  const auto& alpha = net.alphabet();
  std::vector<Plain> parts;
  std::vector<std::map<std::uint32_t, std::uint32_t>> local(net.size());  // network event -> local event
  for (std::size_t i = 0; i < net.size(); ++i) {
    parts.push_back(plain(net.component(i)));
    const auto& la = net.component(i).alphabet();
    for (std::uint32_t e = 0; e < alpha.size(); ++e)
      if (auto l = la.find(alpha.name(e))) local[i][e] = *l;
  }
  Product out;
  out.automaton.events = static_cast<std::uint32_t>(alpha.size());
  for (std::uint32_t e = 0; e < alpha.size(); ++e) out.automaton.observable.push_back(alpha.observable(e));
  std::map<std::vector<std::uint32_t>, std::uint32_t> index;
  std::queue<std::vector<std::uint32_t>> work;
  auto intern = [&](const std::vector<std::uint32_t>& t) {
    auto [it, inserted] = index.emplace(t, static_cast<std::uint32_t>(out.tuples.size()));
    if (inserted) {
      out.tuples.push_back(t);
      work.push(t);
    }
    return it->second;
  };
  std::vector<std::vector<std::uint32_t>> starts{{}};
  for (const auto& part : parts) {
    std::vector<std::vector<std::uint32_t>> grown;
    for (const auto& s : starts)
      for (auto q : part.initial) {
        grown.push_back(s);
        grown.back().push_back(q);
      }
    starts = std::move(grown);
  }
  for (const auto& s : starts) out.automaton.initial.insert(intern(s));
  while (!work.empty()) {
    auto t = work.front();
    work.pop();
    const auto from = index.at(t);
    for (std::uint32_t e = 0; e < alpha.size(); ++e) {
      std::vector<std::vector<std::uint32_t>> options{{}};
      for (std::size_t i = 0; i < parts.size(); ++i) {
        std::vector<std::uint32_t> moves;
        auto l = local[i].find(e);
        if (l == local[i].end()) {
          moves.push_back(t[i]);
        } else {
          auto s = parts[i].next({t[i]}, l->second);
          moves.assign(s.begin(), s.end());
        }
        std::vector<std::vector<std::uint32_t>> grown;
        for (const auto& o : options)
          for (auto q : moves) {
            grown.push_back(o);
            grown.back().push_back(q);
          }
        options = std::move(grown);
      }
      for (const auto& next : options) out.automaton.succ[{from, e}].insert(intern(next));
    }
  }
  out.automaton.states = static_cast<std::uint32_t>(out.tuples.size());
  return out;
}

inline bool network_critically_observable(const critobs::Network& net, const critobs::TupleCriticalSet& c) {
  Product pr = product(net);
  return critically_observable(pr.automaton, [&](std::uint32_t q) { return c.contains(pr.tuples[q]); });
}

/// Naive unary scan: smallest l < bound where the product of the subsets
/// delta_i(I_i, a^l) contains a critical and a non-critical tuple.
inline std::optional<std::uint64_t> unary_scan(const critobs::Network& net, const critobs::TupleCriticalSet& c,
                                               std::uint64_t bound) {
  std::vector<Plain> parts;
  std::vector<IntSet> sets;
  for (const auto& g : net.components()) {
    parts.push_back(plain(g));
    sets.push_back(parts.back().initial);
  }
  for (std::uint64_t l = 0; l < bound; ++l) {
    std::vector<std::vector<std::uint32_t>> tuples{{}};
    for (const auto& s : sets) {
      std::vector<std::vector<std::uint32_t>> grown;
      for (const auto& t : tuples)
        for (auto q : s) {
          grown.push_back(t);
          grown.back().push_back(q);
        }
      tuples = std::move(grown);
    }
    bool in = false;
    bool out = false;
    for (const auto& t : tuples) (c.contains(t) ? in : out) = true;
    if (in && out) return l;
    for (std::size_t i = 0; i < parts.size(); ++i) sets[i] = parts[i].next(sets[i], 0);
  }
  return std::nullopt;
}

/// Smallest (tail, period) with S(tail + period) = S(tail), read off the
/// explicit sequence S(0..limit).
inline std::pair<std::uint64_t, std::uint64_t> tail_and_period(const Nfa& g, std::uint64_t limit) {
  Plain p = plain(g);
  std::vector<IntSet> seq{p.initial};
  for (std::uint64_t l = 1; l <= limit; ++l) seq.push_back(p.next(seq.back(), 0));
  for (std::uint64_t t = 0; t < seq.size(); ++t)
    for (std::uint64_t q = t + 1; q < seq.size(); ++q)
      if (seq[q] == seq[t]) return {t, q - t};
  return {0, 0};
}

/// Brute force for labeled nets with a finite reachability graph: build the
/// graph, then enumerate observation classes by subset construction.
inline std::optional<bool> petri_critically_observable(const critobs::LabeledPetriNet& g,
                                                       const std::function<bool(const critobs::Marking&)>& critical,
                                                       std::size_t max_markings = 100000) {
  using critobs::Marking;
  const auto& net = g.net();
  std::map<Marking, std::uint32_t> index;
  std::vector<Marking> markings;
  std::vector<std::vector<std::pair<std::optional<std::uint32_t>, std::uint32_t>>> edges;
  std::queue<std::uint32_t> work;
  auto intern = [&](const Marking& m) {
    auto [it, inserted] = index.emplace(m, static_cast<std::uint32_t>(markings.size()));
    if (inserted) {
      markings.push_back(m);
      edges.emplace_back();
      work.push(it->second);
    }
    return it->second;
  };
  intern(g.initial());
  while (!work.empty()) {
    if (markings.size() > max_markings) return std::nullopt;
    auto id = work.front();
    work.pop();
    for (critobs::TransitionId t = 0; t < net.num_transitions(); ++t) {
      Marking m = markings[id];
      bool ok = true;
      for (critobs::PlaceId p = 0; p < net.num_places(); ++p) ok = ok && m[p] >= net.pre(p, t);
      if (!ok) continue;
      for (critobs::PlaceId p = 0; p < net.num_places(); ++p) m[p] = m[p] - net.pre(p, t) + net.post(p, t);
      auto to = intern(m);
      edges[id].push_back({g.label(t), to});
    }
  }
  auto closure = [&](IntSet s) {
    for (bool grew = true; grew;) {
      grew = false;
      for (auto x : IntSet(s))
        for (const auto& [label, to] : edges[x])
          if (!label) grew = s.insert(to).second || grew;
    }
    return s;
  };
  std::set<IntSet> seen;
  std::queue<IntSet> classes;
  IntSet start = closure({0});
  seen.insert(start);
  classes.push(start);
  while (!classes.empty()) {
    IntSet s = classes.front();
    classes.pop();
    bool in = false;
    bool out = false;
    for (auto x : s) (critical(markings[x]) ? in : out) = true;
    if (in && out) return false;
    for (std::uint32_t l = 0; l < g.alphabet().size(); ++l) {
      IntSet t;
      for (auto x : s)
        for (const auto& [label, to] : edges[x])
          if (label && *label == l) t.insert(to);
      t = closure(t);
      if (!t.empty() && seen.insert(t).second) classes.push(t);
    }
  }
  return true;
}

/// Reachable markings by plain BFS; nullopt past `max_markings`.
inline std::optional<std::set<critobs::Marking>> petri_reachable_set(const critobs::PetriNet& net,
                                                                    const critobs::Marking& m0,
                                                                    std::size_t max_markings = 100000) {
  std::set<critobs::Marking> seen{m0};
  std::queue<critobs::Marking> work;
  work.push(m0);
  while (!work.empty()) {
    if (seen.size() > max_markings) return std::nullopt;
    auto m = work.front();
    work.pop();
    for (critobs::TransitionId t = 0; t < net.num_transitions(); ++t) {
      bool ok = true;
      for (critobs::PlaceId p = 0; p < net.num_places(); ++p) ok = ok && m[p] >= net.pre(p, t);
      if (!ok) continue;
      auto next = m;
      for (critobs::PlaceId p = 0; p < net.num_places(); ++p) next[p] = next[p] - net.pre(p, t) + net.post(p, t);
      if (seen.insert(next).second) work.push(next);
    }
  }
  return seen;
}

/// DAG reachability by repeated relaxation, independent of the library.
inline bool dag_path(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                     std::size_t s, std::size_t t) {
  std::vector<bool> reached(nodes, false);
  reached[s] = true;
  for (bool grew = true; grew;) {
    grew = false;
    for (auto [p, q] : edges)
      if (reached[p] && !reached[q]) reached[q] = grew = true;
  }
  return reached[t];
}

/// Nonempty intersection of marked languages, by product BFS over Plain
/// automata sharing the same event ids.
inline bool marked_intersection(const std::vector<Nfa>& automata) {
  std::vector<Plain> parts;
  std::vector<IntSet> marked;
  for (const auto& g : automata) {
    parts.push_back(plain(g));
    marked.emplace_back(g.marked().begin(), g.marked().end());
  }
  std::set<std::vector<std::uint32_t>> seen;
  std::queue<std::vector<std::uint32_t>> work;
  std::vector<std::vector<std::uint32_t>> starts{{}};
  for (const auto& part : parts) {
    std::vector<std::vector<std::uint32_t>> grown;
    for (const auto& s : starts)
      for (auto q : part.initial) {
        grown.push_back(s);
        grown.back().push_back(q);
      }
    starts = std::move(grown);
  }
  for (auto& s : starts)
    if (seen.insert(s).second) work.push(s);
  while (!work.empty()) {
    auto t = work.front();
    work.pop();
    bool all = true;
    for (std::size_t i = 0; i < t.size(); ++i) all = all && marked[i].count(t[i]);
    if (all) return true;
    for (std::uint32_t e = 0; e < parts.front().events; ++e) {
      std::vector<std::vector<std::uint32_t>> options{{}};
      for (std::size_t i = 0; i < parts.size(); ++i) {
        std::vector<std::vector<std::uint32_t>> grown;
        for (const auto& o : options)
          for (auto q : parts[i].next({t[i]}, e)) {
            grown.push_back(o);
            grown.back().push_back(q);
          }
        options = std::move(grown);
      }
      for (auto& n : options)
        if (seen.insert(n).second) work.push(n);
    }
  }
  return false;
}

}  // namespace oracle
