#pragma once

// Critical observability of networks of automata G1 || ... || Gn.
//
// check_network searches the twin of the composed system without building
// either product: a search state is a pair of component-state tuples.
// check_unary_network decides the single-observable-event case exactly from
// the eventually periodic subset sequences of the components.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "critobs/automaton.hpp"
#include "critobs/compose.hpp"
#include "critobs/error.hpp"
#include "critobs/nfa_check.hpp"
#include "critobs/verdict.hpp"

namespace critobs {

/// Ordered list of automata composed by synchronization on shared events.
class Network {
 public:
  explicit Network(std::vector<Nfa> components)
      : components_(std::make_shared<const std::vector<Nfa>>(std::move(components))) {
    if (components_->empty()) throw ValidationError("network: no components");
    for (const auto& g : *components_) parts_.push_back(&g);
    shared_ = merge_alphabets(parts_);
  }

  [[nodiscard]] std::size_t size() const { return components_->size(); }
  [[nodiscard]] const Nfa& component(std::size_t i) const { return components_->at(i); }
  [[nodiscard]] const std::vector<Nfa>& components() const { return *components_; }
  [[nodiscard]] std::span<const Nfa* const> parts() const { return parts_; }
  [[nodiscard]] const SharedAlphabet& shared() const { return shared_; }
  [[nodiscard]] const EventAlphabet& alphabet() const { return shared_.alphabet; }

  /// Initial tuples I1 x ... x In in lexicographic order.
  [[nodiscard]] std::vector<StateTuple> initial_tuples() const {
    std::vector<StateTuple> out{StateTuple{}};
    for (const auto& g : *components_) {
      std::vector<StateTuple> extended;
      for (const auto& prefix : out) {
        for (StateId q : g.initial()) {
          extended.push_back(prefix);
          extended.back().push_back(q);
        }
      }
      out = std::move(extended);
    }
    return out;
  }

  template <typename Visit>
  void for_each_successor(const StateTuple& t, EventId e, Visit&& visit) const {
    for_each_product_successor(parts_, shared_, t, e, std::forward<Visit>(visit));
  }

  [[nodiscard]] std::string tuple_name(const StateTuple& t) const {
    return critobs::tuple_name(parts_, t);
  }

 private:
  std::shared_ptr<const std::vector<Nfa>> components_;
  std::vector<const Nfa*> parts_;
  SharedAlphabet shared_;
};

/// Set of critical state tuples: an explicit list plus optional product terms.
/// A product term restricts some components to a state set and leaves the
/// others unconstrained; it is tested by membership, never enumerated.
class TupleCriticalSet {
 public:
  using ProductTerm = std::vector<std::optional<StateSet>>;

  explicit TupleCriticalSet(std::size_t arity, std::vector<StateTuple> tuples = {},
                            std::vector<ProductTerm> products = {})
      : arity_(arity), tuples_(std::move(tuples)), products_(std::move(products)) {
    for (const auto& t : tuples_) {
      if (t.size() != arity_) {
        throw ValidationError("critical tuple has arity " + std::to_string(t.size()) +
                              ", expected " + std::to_string(arity_));
      }
    }
    for (const auto& p : products_) {
      if (p.size() != arity_) throw ValidationError("critical product term has the wrong arity");
    }
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
  }

  [[nodiscard]] std::size_t arity() const { return arity_; }
  [[nodiscard]] const std::vector<StateTuple>& tuples() const { return tuples_; }
  [[nodiscard]] const std::vector<ProductTerm>& products() const { return products_; }

  [[nodiscard]] bool contains(const StateTuple& t) const {
    if (std::binary_search(tuples_.begin(), tuples_.end(), t)) return true;
    for (const auto& term : products_) {
      bool inside = true;
      for (std::size_t i = 0; i < arity_ && inside; ++i) inside = !term[i] || term[i]->contains(t[i]);
      if (inside) return true;
    }
    return false;
  }

  void validate(const Network& net) const {
    if (arity_ != net.size()) {
      throw ValidationError("critical set arity " + std::to_string(arity_) + " does not match " +
                            std::to_string(net.size()) + " components");
    }
    auto check = [&](std::size_t i, StateId q) {
      if (q >= net.component(i).num_states()) {
        throw ValidationError("critical set: state id " + std::to_string(q) +
                              " out of range for component " + std::to_string(i));
      }
    };
    for (const auto& t : tuples_)
      for (std::size_t i = 0; i < arity_; ++i) check(i, t[i]);
    for (const auto& term : products_)
      for (std::size_t i = 0; i < arity_; ++i)
        if (term[i])
          for (StateId q : *term[i]) check(i, q);
  }

 private:
  std::size_t arity_;
  std::vector<StateTuple> tuples_;
  std::vector<ProductTerm> products_;
};

struct NetworkStep {
  StateTuple from;
  EventId event;
  StateTuple to;

  friend bool operator==(const NetworkStep&, const NetworkStep&) = default;
};

using NetworkWitness = Witness<NetworkStep, StateTuple>;
using NetworkVerdict = Verdict<NetworkWitness>;

enum class NetworkSearch {
  BreadthFirst,
  // No global visited set; depth-bounded DFS with on-path cycle pruning,
  // deepened until no simple path is cut off. Exact, exponential time.
  IterativeDeepening,
};

namespace detail {

/// Interns tuples to dense ids and caches critical-set membership.
class TupleTable {
 public:
  TupleTable(const TupleCriticalSet& c) : critical_(&c) {}

  std::uint32_t intern(const StateTuple& t) {
    auto [it, inserted] = index_.emplace(t, static_cast<std::uint32_t>(tuples_.size()));
    if (inserted) {
      tuples_.push_back(t);
      critical_flags_.push_back(critical_->contains(t) ? 1 : 0);
    }
    return it->second;
  }
  const StateTuple& tuple(std::uint32_t id) const { return tuples_[id]; }
  bool critical(std::uint32_t id) const { return critical_flags_[id] != 0; }

 private:
  const TupleCriticalSet* critical_;
  std::unordered_map<StateTuple, std::uint32_t, StateTupleHash> index_;
  std::vector<StateTuple> tuples_;
  std::vector<char> critical_flags_;
};

struct TwinEdge {
  std::uint32_t first;
  std::uint32_t second;
  EventId event;
  TwinMove move;
};

/// Twin successors of the tuple pair (a, b), events in id order.
template <typename Visit>
void for_each_network_twin_successor(const Network& net, TupleTable& table, std::uint32_t a,
                                     std::uint32_t b, Visit&& visit) {
  const auto& alphabet = net.alphabet();
  std::vector<std::uint32_t> as;
  std::vector<std::uint32_t> bs;
  for (EventId e = 0; e < alphabet.size(); ++e) {
    as.clear();
    bs.clear();
    const StateTuple ta = table.tuple(a);
    const StateTuple tb = table.tuple(b);
    net.for_each_successor(ta, e, [&](const StateTuple& t) { as.push_back(table.intern(t)); });
    if (alphabet.observable(e)) {
      if (as.empty()) continue;
      net.for_each_successor(tb, e, [&](const StateTuple& t) { bs.push_back(table.intern(t)); });
      for (auto x : as)
        for (auto y : bs) visit(TwinEdge{x, y, e, TwinMove::Both});
    } else {
      net.for_each_successor(tb, e, [&](const StateTuple& t) { bs.push_back(table.intern(t)); });
      for (auto x : as) visit(TwinEdge{x, b, e, TwinMove::First});
      for (auto y : bs) visit(TwinEdge{a, y, e, TwinMove::Second});
    }
  }
}

inline NetworkWitness network_witness_from_path(const TupleTable& table, std::uint32_t start1,
                                                std::uint32_t start2,
                                                const std::vector<TwinEdge>& path) {
  NetworkWitness w;
  std::uint32_t a = start1;
  std::uint32_t b = start2;
  for (const auto& edge : path) {
    if (edge.move != TwinMove::Second) w.run1.push_back({table.tuple(a), edge.event, table.tuple(edge.first)});
    if (edge.move != TwinMove::First) w.run2.push_back({table.tuple(b), edge.event, table.tuple(edge.second)});
    if (edge.move == TwinMove::Both) w.observation.push_back(edge.event);
    a = edge.first;
    b = edge.second;
  }
  w.end1 = table.tuple(a);
  w.end2 = table.tuple(b);
  return w;
}

inline NetworkVerdict check_network_bfs(const Network& net, const TupleCriticalSet& c) {
  TupleTable table(c);
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  struct Node {
    std::uint32_t a;
    std::uint32_t b;
    std::uint32_t parent;
    EventId event;
    TwinMove move;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::uint64_t, std::uint32_t> seen;
  auto key = [](std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; };
  auto is_hit = [&](std::uint32_t a, std::uint32_t b) { return table.critical(a) && !table.critical(b); };

  NetworkVerdict verdict;
  auto finish = [&](std::uint32_t id) {
    std::vector<TwinEdge> path;
    std::uint32_t at = id;
    for (; nodes[at].parent != kNone; at = nodes[at].parent)
      path.push_back({nodes[at].a, nodes[at].b, nodes[at].event, nodes[at].move});
    std::reverse(path.begin(), path.end());
    verdict.outcome = Outcome::NotCriticallyObservable;
    verdict.witness = network_witness_from_path(table, nodes[at].a, nodes[at].b, path);
    verdict.stats.explored = nodes.size();
  };

  std::vector<std::uint32_t> initial;
  for (const auto& t : net.initial_tuples()) initial.push_back(table.intern(t));
  std::vector<std::uint32_t> frontier;
  for (auto a : initial) {
    for (auto b : initial) {
      if (!seen.emplace(key(a, b), static_cast<std::uint32_t>(nodes.size())).second) continue;
      nodes.push_back({a, b, kNone, 0, TwinMove::Both});
      frontier.push_back(static_cast<std::uint32_t>(nodes.size() - 1));
      if (is_hit(a, b)) {
        verdict.stats.peak_frontier = frontier.size();
        finish(frontier.back());
        return verdict;
      }
    }
  }

  auto pair_less = [&](std::uint32_t x, std::uint32_t y) {
    const auto& tx1 = table.tuple(nodes[x].a);
    const auto& ty1 = table.tuple(nodes[y].a);
    if (tx1 != ty1) return tx1 < ty1;
    return table.tuple(nodes[x].b) < table.tuple(nodes[y].b);
  };

  std::uint64_t depth = 0;
  std::vector<std::uint32_t> next;
  while (!frontier.empty()) {
    verdict.stats.peak_frontier = std::max<std::uint64_t>(verdict.stats.peak_frontier, frontier.size());
    verdict.stats.depth = depth;
    next.clear();
    std::optional<std::uint32_t> hit;
    for (std::uint32_t id : frontier) {
      const Node current = nodes[id];
      for_each_network_twin_successor(net, table, current.a, current.b, [&](const TwinEdge& edge) {
        if (hit) return;
        auto [it, inserted] = seen.emplace(key(edge.first, edge.second), static_cast<std::uint32_t>(nodes.size()));
        if (!inserted) return;
        nodes.push_back({edge.first, edge.second, id, edge.event, edge.move});
        next.push_back(it->second);
        if (is_hit(edge.first, edge.second)) hit = it->second;
      });
      if (hit) break;
    }
    if (hit) {
      verdict.stats.depth = depth + 1;
      finish(*hit);
      return verdict;
    }
    std::sort(next.begin(), next.end(), pair_less);
    frontier.swap(next);
    ++depth;
  }
  verdict.stats.explored = nodes.size();
  verdict.outcome = Outcome::CriticallyObservable;
  return verdict;
}

inline NetworkVerdict check_network_iddfs(const Network& net, const TupleCriticalSet& c) {
  TupleTable table(c);
  auto key = [](std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; };
  std::vector<std::uint32_t> initial;
  for (const auto& t : net.initial_tuples()) initial.push_back(table.intern(t));

  NetworkVerdict verdict;
  std::unordered_set<std::uint64_t> on_path;
  std::vector<TwinEdge> path;
  bool cut = false;
  std::uint64_t visits = 0;

  // Returns true once a hit is on the current path.
  auto dfs = [&](auto&& self, std::uint32_t a, std::uint32_t b, std::size_t remaining) -> bool {
    ++visits;
    if (table.critical(a) && !table.critical(b)) return true;
    if (remaining == 0) {
      bool has_fresh_successor = false;
      for_each_network_twin_successor(net, table, a, b, [&](const TwinEdge& e) {
        has_fresh_successor = has_fresh_successor || !on_path.contains(key(e.first, e.second));
      });
      cut = cut || has_fresh_successor;
      return false;
    }
    std::vector<TwinEdge> edges;
    for_each_network_twin_successor(net, table, a, b, [&](const TwinEdge& e) { edges.push_back(e); });
    for (const auto& e : edges) {
      const auto k = key(e.first, e.second);
      if (on_path.contains(k)) continue;
      on_path.insert(k);
      path.push_back(e);
      if (self(self, e.first, e.second, remaining - 1)) return true;
      path.pop_back();
      on_path.erase(k);
    }
    return false;
  };

  for (std::size_t bound = 0;; ++bound) {
    cut = false;
    for (auto a : initial) {
      for (auto b : initial) {
        on_path = {key(a, b)};
        path.clear();
        if (dfs(dfs, a, b, bound)) {
          verdict.outcome = Outcome::NotCriticallyObservable;
          verdict.witness = network_witness_from_path(table, a, b, path);
          verdict.stats.explored = visits;
          verdict.stats.depth = path.size();
          return verdict;
        }
      }
    }
    verdict.stats.depth = bound;
    if (!cut) break;
  }
  verdict.stats.explored = visits;
  verdict.outcome = Outcome::CriticallyObservable;
  return verdict;
}

}  // namespace detail

inline NetworkVerdict check_network(const Network& net, const TupleCriticalSet& c,
                                    NetworkSearch mode = NetworkSearch::BreadthFirst) {
  c.validate(net);
  return mode == NetworkSearch::BreadthFirst ? detail::check_network_bfs(net, c)
                                             : detail::check_network_iddfs(net, c);
}

/// Builds the composition explicitly and runs check_nfa on it.
inline NetworkVerdict materialize_and_check(const Network& net, const TupleCriticalSet& c,
                                            std::size_t max_states = 1'000'000) {
  c.validate(net);
  ComposedAutomaton composed = compose(net.parts(), max_states);
  std::vector<StateId> critical;
  for (StateId s = 0; s < composed.tuples.size(); ++s)
    if (c.contains(composed.tuples[s])) critical.push_back(s);
  NfaVerdict inner = check_nfa(composed.automaton, StateSet(std::move(critical)));

  NetworkVerdict verdict;
  verdict.outcome = inner.outcome;
  verdict.stats = inner.stats;
  if (inner.witness) {
    const auto& w = *inner.witness;
    NetworkWitness out;
    out.observation = w.observation;  // composed alphabet is the shared alphabet
    for (const auto& tr : w.run1) out.run1.push_back({composed.tuples[tr.from], tr.event, composed.tuples[tr.to]});
    for (const auto& tr : w.run2) out.run2.push_back({composed.tuples[tr.from], tr.event, composed.tuples[tr.to]});
    out.end1 = composed.tuples[w.end1];
    out.end2 = composed.tuples[w.end2];
    verdict.witness = std::move(out);
  }
  return verdict;
}

inline std::optional<std::string> witness_error(const Network& net, const TupleCriticalSet& c,
                                                const NetworkWitness& w) {
  const auto& alphabet = net.alphabet();
  auto valid_tuple = [&](const StateTuple& t) {
    if (t.size() != net.size()) return false;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= net.component(i).num_states()) return false;
    return true;
  };
  auto is_initial = [&](const StateTuple& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
      if (!net.component(i).initial().contains(t[i])) return false;
    return true;
  };
  auto replay_run = [&](const std::vector<NetworkStep>& run, const char* name,
                        const StateTuple& end) -> std::optional<std::string> {
    std::optional<StateTuple> at;
    Word labels;
    for (std::size_t k = 0; k < run.size(); ++k) {
      const auto& st = run[k];
      const std::string where = std::string(name) + " step " + std::to_string(k);
      if (!valid_tuple(st.from) || !valid_tuple(st.to)) return where + " has a malformed tuple";
      if (st.event >= alphabet.size()) return where + " has an unknown event";
      if (k == 0 ? !is_initial(st.from) : st.from != *at) return where + " does not continue the run";
      for (std::size_t i = 0; i < net.size(); ++i) {
        const auto local = net.shared().local[i][st.event];
        if (local ? !net.component(i).has_transition(st.from[i], *local, st.to[i])
                  : st.from[i] != st.to[i]) {
          return where + " is not a move of component " + std::to_string(i);
        }
      }
      labels.push_back(st.event);
      at = st.to;
    }
    if (!valid_tuple(end)) return std::string(name) + " end tuple is malformed";
    if (!at) {
      if (!is_initial(end)) return std::string(name) + " is empty but its end is not initial";
    } else if (*at != end) {
      return std::string(name) + " does not end in the claimed tuple";
    }
    if (project(labels, alphabet) != w.observation) {
      return std::string(name) + " does not project onto the observation";
    }
    return std::nullopt;
  };
  if (auto err = replay_run(w.run1, "run1", w.end1)) return err;
  if (auto err = replay_run(w.run2, "run2", w.end2)) return err;
  if (!c.contains(w.end1)) return "end1 is not critical";
  if (c.contains(w.end2)) return "end2 is critical";
  return std::nullopt;
}

/// S(l) = delta(I, a^l) for a unary automaton, stored up to the first repeat:
/// S(tail + period) = S(tail) with (tail, period) minimal.
struct SubsetSequence {
  std::vector<StateSet> prefix;  // S(0) .. S(tail + period - 1)
  std::uint64_t tail = 0;
  std::uint64_t period = 1;

  [[nodiscard]] const StateSet& at(std::uint64_t l) const {
    if (l < prefix.size()) return prefix[l];
    return prefix[tail + (l - tail) % period];
  }
};

inline SubsetSequence subset_sequence(const Nfa& g, EventId a) {
  SubsetSequence seq;
  std::map<StateSet, std::uint64_t> first_seen;
  StateSet current = g.initial();
  for (std::uint64_t l = 0;; ++l) {
    auto [it, inserted] = first_seen.emplace(current, l);
    if (!inserted) {
      seq.tail = it->second;
      seq.period = l - it->second;
      return seq;
    }
    seq.prefix.push_back(current);
    current = step(g, current, a);
  }
}

struct UnaryVerdict {
  NetworkVerdict verdict;
  std::optional<std::uint64_t> length;  // l with a^l exposing both sides of C
  std::vector<SubsetSequence> sequences;
  std::uint64_t scan_bound = 0;  // max tail + lcm of periods
};

inline std::uint64_t unary_scan_bound(const std::vector<SubsetSequence>& seqs) {
  unsigned __int128 period = 1;
  std::uint64_t tail = 0;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::string detail_text;
  for (const auto& s : seqs) {
    tail = std::max(tail, s.tail);
    detail_text += " (" + std::to_string(s.tail) + "," + std::to_string(s.period) + ")";
    period = period / std::gcd(static_cast<std::uint64_t>(period), s.period) * s.period;
    if (period > kMax) {
      throw ResourceError("unary scan bound overflows 64 bits; per-component (tail,period):" + detail_text);
    }
  }
  unsigned __int128 bound = period + tail;
  if (bound > kMax) throw ResourceError("unary scan bound overflows 64 bits;" + detail_text);
  return static_cast<std::uint64_t>(bound);
}

inline UnaryVerdict check_unary_network(const Network& net, const TupleCriticalSet& c,
                                        std::uint64_t max_scan = std::uint64_t{1} << 26) {
  c.validate(net);
  if (net.alphabet().size() != 1) {
    throw ValidationError("unary check needs every component over the same single event");
  }
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net.component(i).alphabet().size() != 1) {
      throw ValidationError("component " + std::to_string(i) + " is not unary");
    }
  }
  if (!net.alphabet().observable(0)) throw ValidationError("unary check needs an observable event");

  UnaryVerdict result;
  for (const auto& g : net.components()) result.sequences.push_back(subset_sequence(g, 0));
  result.scan_bound = unary_scan_bound(result.sequences);
  if (result.scan_bound > max_scan) {
    throw ResourceError("unary scan bound " + std::to_string(result.scan_bound) + " exceeds the cap of " +
                        std::to_string(max_scan));
  }

  const std::size_t n = net.size();
  std::vector<const StateSet*> sets(n);
  for (std::uint64_t l = 0; l < result.scan_bound; ++l) {
    bool empty = false;
    for (std::size_t i = 0; i < n; ++i) {
      sets[i] = &result.sequences[i].at(l);
      empty = empty || sets[i]->empty();
    }
    if (empty) continue;

    // A critical tuple inside the product.
    std::optional<StateTuple> inside;
    for (const auto& t : c.tuples()) {
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) ok = sets[i]->contains(t[i]);
      if (ok) {
        inside = t;
        break;
      }
    }
    for (std::size_t k = 0; !inside && k < c.products().size(); ++k) {
      StateTuple t(n);
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) {
        const auto& allowed = c.products()[k][i];
        auto it = std::find_if(sets[i]->begin(), sets[i]->end(),
                               [&](StateId q) { return !allowed || allowed->contains(q); });
        ok = it != sets[i]->end();
        if (ok) t[i] = *it;
      }
      if (ok) inside = t;
    }
    if (!inside) continue;

    // A non-critical tuple inside the product, in lexicographic order.
    std::optional<StateTuple> outside;
    std::vector<std::size_t> pos(n, 0);
    StateTuple t(n);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) t[i] = sets[i]->members()[pos[i]];
      if (!c.contains(t)) {
        outside = t;
        break;
      }
      std::size_t i = n;
      bool wrapped = true;
      while (i > 0) {
        --i;
        if (++pos[i] < sets[i]->size()) {
          wrapped = false;
          break;
        }
        pos[i] = 0;
      }
      if (wrapped) break;
    }
    if (!outside) continue;

    // Runs of length l to both tuples, traced backwards through S(k).
    auto trace = [&](const StateTuple& end) {
      std::vector<StateTuple> states(l + 1, StateTuple(n));
      states[l] = end;
      for (std::size_t i = 0; i < n; ++i) {
        const Nfa& g = net.component(i);
        for (std::uint64_t k = l; k > 0; --k) {
          const StateSet& before = result.sequences[i].at(k - 1);
          for (StateId q : before) {
            if (g.has_transition(q, 0, states[k][i])) {
              states[k - 1][i] = q;
              break;
            }
          }
        }
      }
      std::vector<NetworkStep> run;
      for (std::uint64_t k = 0; k < l; ++k) run.push_back({states[k], 0, states[k + 1]});
      return run;
    };
    NetworkWitness w;
    w.observation.assign(l, 0);
    w.run1 = trace(*inside);
    w.run2 = trace(*outside);
    w.end1 = *inside;
    w.end2 = *outside;
    result.length = l;
    result.verdict.outcome = Outcome::NotCriticallyObservable;
    result.verdict.witness = std::move(w);
    result.verdict.stats.explored = l + 1;
    return result;
  }
  result.verdict.outcome = Outcome::CriticallyObservable;
  result.verdict.stats.explored = result.scan_bound;
  return result;
}

}  // namespace critobs
