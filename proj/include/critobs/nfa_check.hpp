#pragma once

// Critical observability of a single automaton.
//
// G is not critically observable w.r.t. C iff the twin composition reaches a
// pair in C x (Q \ C). check_nfa searches the twin lazily; check_nfa_oracle
// evaluates the definition directly on observer states.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "critobs/automaton.hpp"
#include "critobs/compose.hpp"
#include "critobs/error.hpp"
#include "critobs/verdict.hpp"

namespace critobs {

using NfaWitness = Witness<Transition, StateId>;
using NfaVerdict = Verdict<NfaWitness>;

inline void require_state_subset(const Nfa& g, const StateSet& s, const char* what) {
  for (StateId q : s) {
    if (q >= g.num_states()) {
      throw ValidationError(std::string(what) + ": state id " + std::to_string(q) +
                            " is not a state of the automaton");
    }
  }
}

inline NfaVerdict check_nfa(const Nfa& g, const StateSet& critical) {
  require_state_subset(g, critical, "critical set");
  const std::size_t n = g.num_states();
  std::vector<char> in_c(n, 0);
  for (StateId q : critical) in_c[q] = 1;

  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  struct Node {
    StatePair pair;
    std::uint32_t parent;
    EventId event;
    TwinMove move;
  };
  std::vector<std::uint32_t> seen(n * n, kNone);
  std::vector<Node> nodes;
  TwinView view(g);
  NfaVerdict verdict;

  auto is_hit = [&](StatePair p) { return in_c[p.first] && !in_c[p.second]; };

  auto build_witness = [&](std::uint32_t id) {
    std::vector<std::uint32_t> path;
    for (std::uint32_t at = id; at != kNone; at = nodes[at].parent) path.push_back(at);
    std::reverse(path.begin(), path.end());
    NfaWitness w;
    for (std::size_t k = 1; k < path.size(); ++k) {
      const Node& prev = nodes[path[k - 1]];
      const Node& cur = nodes[path[k]];
      if (cur.move != TwinMove::Second) w.run1.push_back({prev.pair.first, cur.event, cur.pair.first});
      if (cur.move != TwinMove::First) w.run2.push_back({prev.pair.second, cur.event, cur.pair.second});
      if (cur.move == TwinMove::Both) w.observation.push_back(cur.event);
    }
    w.end1 = nodes[id].pair.first;
    w.end2 = nodes[id].pair.second;
    verdict.outcome = Outcome::NotCriticallyObservable;
    verdict.witness = std::move(w);
  };

  std::vector<std::uint32_t> frontier;
  for (StatePair p : view.initial()) {
    auto& slot = seen[p.first * n + p.second];
    if (slot != kNone) continue;
    slot = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back({p, kNone, 0, TwinMove::Both});
    frontier.push_back(slot);
    if (is_hit(p)) {
      verdict.stats.explored = nodes.size();
      verdict.stats.peak_frontier = frontier.size();
      build_witness(slot);
      return verdict;
    }
  }

  std::uint64_t depth = 0;
  std::vector<std::uint32_t> next;
  while (!frontier.empty()) {
    verdict.stats.peak_frontier = std::max<std::uint64_t>(verdict.stats.peak_frontier, frontier.size());
    verdict.stats.depth = depth;
    next.clear();
    std::optional<std::uint32_t> hit;
    for (std::uint32_t id : frontier) {
      view.for_each_successor(nodes[id].pair, [&](StatePair p, EventId e, TwinMove move) {
        if (hit) return;
        auto& slot = seen[p.first * n + p.second];
        if (slot != kNone) return;
        slot = static_cast<std::uint32_t>(nodes.size());
        nodes.push_back({p, id, e, move});
        next.push_back(slot);
        if (is_hit(p)) hit = slot;
      });
      if (hit) break;
    }
    if (hit) {
      verdict.stats.explored = nodes.size();
      verdict.stats.depth = depth + 1;
      build_witness(*hit);
      return verdict;
    }
    std::sort(next.begin(), next.end(),
              [&](std::uint32_t a, std::uint32_t b) { return nodes[a].pair < nodes[b].pair; });
    frontier.swap(next);
    ++depth;
  }
  verdict.stats.explored = nodes.size();
  verdict.outcome = Outcome::CriticallyObservable;
  return verdict;
}

/// Shortest run of `g` from an initial state to `target` whose projection is
/// `observation`.
inline std::optional<std::vector<Transition>> find_run_with_observation(const Nfa& g,
                                                                        const Word& observation,
                                                                        StateId target) {
  const std::size_t n = g.num_states();
  const std::size_t len = observation.size();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  constexpr std::uint32_t kRoot = kNone - 1;
  // Node (q, pos) encoded as pos * n + q.
  std::vector<std::uint32_t> parent((len + 1) * n, kNone);
  std::vector<EventId> via((len + 1) * n, 0);
  std::vector<std::uint32_t> queue;
  for (StateId q : g.initial()) {
    parent[q] = kRoot;
    queue.push_back(q);
  }
  const auto& alphabet = g.alphabet();
  const auto goal = static_cast<std::uint32_t>(len * n + target);
  for (std::size_t head = 0; head < queue.size() && parent[goal] == kNone; ++head) {
    const std::uint32_t node = queue[head];
    const std::size_t pos = node / n;
    const auto q = static_cast<StateId>(node % n);
    for (EventId e = 0; e < alphabet.size(); ++e) {
      std::size_t next_pos = pos;
      if (alphabet.observable(e)) {
        if (pos == len || observation[pos] != e) continue;
        next_pos = pos + 1;
      }
      for (StateId r : g.successors(q, e)) {
        const auto next = static_cast<std::uint32_t>(next_pos * n + r);
        if (parent[next] != kNone) continue;
        parent[next] = node;
        via[next] = e;
        queue.push_back(next);
      }
    }
  }
  if (parent[goal] == kNone) return std::nullopt;
  std::vector<Transition> run;
  for (std::uint32_t at = goal; parent[at] != kRoot; at = parent[at]) {
    run.push_back({static_cast<StateId>(parent[at] % n), via[at], static_cast<StateId>(at % n)});
  }
  std::reverse(run.begin(), run.end());
  return run;
}

/// Reference decision procedure: enumerates observer states and tests each
/// against C. Exponential in the worst case.
inline NfaVerdict check_nfa_oracle(const Nfa& g, const StateSet& critical) {
  require_state_subset(g, critical, "critical set");
  const std::size_t n = g.num_states();
  const std::size_t m = g.alphabet().size();
  const std::size_t words = (n + 63) / 64;
  using Bits = std::vector<std::uint64_t>;

  auto set_bit = [](Bits& b, StateId q) { b[q / 64] |= std::uint64_t{1} << (q % 64); };
  auto test_bit = [](const Bits& b, StateId q) { return (b[q / 64] >> (q % 64)) & 1u; };

  std::vector<Bits> succ(n * m, Bits(words, 0));
  for (StateId q = 0; q < n; ++q)
    for (EventId e = 0; e < m; ++e)
      for (StateId r : g.successors(q, e)) set_bit(succ[q * m + e], r);

  auto image = [&](const Bits& s, EventId e) {
    Bits out(words, 0);
    for (StateId q = 0; q < n; ++q)
      if (test_bit(s, q))
        for (std::size_t w = 0; w < words; ++w) out[w] |= succ[q * m + e][w];
    return out;
  };
  auto closure = [&](Bits s) {
    bool grew = true;
    while (grew) {
      grew = false;
      for (EventId e = 0; e < m; ++e) {
        if (g.alphabet().observable(e)) continue;
        Bits img = image(s, e);
        for (std::size_t w = 0; w < words; ++w) {
          std::uint64_t merged = s[w] | img[w];
          if (merged != s[w]) {
            s[w] = merged;
            grew = true;
          }
        }
      }
    }
    return s;
  };

  Bits crit(words, 0);
  for (StateId q : critical) set_bit(crit, q);

  struct Node {
    Bits subset;
    std::uint32_t parent;
    EventId event;
  };
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<Node> nodes;
  std::map<Bits, std::uint32_t> index;
  Bits start(words, 0);
  for (StateId q : g.initial()) set_bit(start, q);
  start = closure(std::move(start));
  index.emplace(start, 0);
  nodes.push_back({std::move(start), kNone, 0});

  NfaVerdict verdict;
  for (std::uint32_t head = 0; head < nodes.size(); ++head) {
    bool meets_c = false;
    bool meets_rest = false;
    for (std::size_t w = 0; w < words; ++w) {
      meets_c = meets_c || (nodes[head].subset[w] & crit[w]) != 0;
      meets_rest = meets_rest || (nodes[head].subset[w] & ~crit[w]) != 0;
    }
    if (meets_c && meets_rest) {
      Word observation;
      for (std::uint32_t at = head; nodes[at].parent != kNone; at = nodes[at].parent)
        observation.push_back(nodes[at].event);
      std::reverse(observation.begin(), observation.end());
      StateId x = 0;
      StateId y = 0;
      while (!(test_bit(nodes[head].subset, x) && critical.contains(x))) ++x;
      while (!(test_bit(nodes[head].subset, y) && !critical.contains(y))) ++y;
      NfaWitness w;
      w.observation = observation;
      w.run1 = *find_run_with_observation(g, observation, x);
      w.run2 = *find_run_with_observation(g, observation, y);
      w.end1 = x;
      w.end2 = y;
      verdict.outcome = Outcome::NotCriticallyObservable;
      verdict.witness = std::move(w);
      verdict.stats.explored = nodes.size();
      return verdict;
    }
    for (EventId e = 0; e < m; ++e) {
      if (!g.alphabet().observable(e)) continue;
      Bits next = image(nodes[head].subset, e);
      if (std::all_of(next.begin(), next.end(), [](std::uint64_t w) { return w == 0; })) continue;
      next = closure(std::move(next));
      auto [it, inserted] = index.emplace(next, static_cast<std::uint32_t>(nodes.size()));
      if (inserted) nodes.push_back({std::move(next), head, e});
    }
  }
  verdict.stats.explored = nodes.size();
  verdict.outcome = Outcome::CriticallyObservable;
  return verdict;
}

/// Why `w` fails to refute critical observability of `g` w.r.t. `critical`,
/// or nullopt if it is a valid witness.
inline std::optional<std::string> witness_error(const Nfa& g, const StateSet& critical,
                                                const NfaWitness& w) {
  auto replay_run = [&](const std::vector<Transition>& run, const char* name,
                        StateId end) -> std::optional<std::string> {
    std::optional<StateId> at;
    for (std::size_t k = 0; k < run.size(); ++k) {
      const Transition& tr = run[k];
      if (k == 0 ? !g.initial().contains(tr.from) : tr.from != *at) {
        return std::string(name) + " step " + std::to_string(k) + " does not continue the run";
      }
      if (!g.has_transition(tr.from, tr.event, tr.to)) {
        return std::string(name) + " step " + std::to_string(k) + " is not a transition";
      }
      at = tr.to;
    }
    if (!at) {
      if (!g.initial().contains(end)) return std::string(name) + " is empty but its end is not initial";
    } else if (*at != end) {
      return std::string(name) + " does not end in the claimed state";
    }
    Word labels;
    for (const auto& tr : run) labels.push_back(tr.event);
    if (project(labels, g.alphabet()) != w.observation) {
      return std::string(name) + " does not project onto the observation";
    }
    return std::nullopt;
  };
  if (w.end1 >= g.num_states() || w.end2 >= g.num_states()) return "end state out of range";
  if (auto err = replay_run(w.run1, "run1", w.end1)) return err;
  if (auto err = replay_run(w.run2, "run2", w.end2)) return err;
  if (!critical.contains(w.end1)) return "end1 is not critical";
  if (critical.contains(w.end2)) return "end2 is critical";
  return std::nullopt;
}

}  // namespace critobs
