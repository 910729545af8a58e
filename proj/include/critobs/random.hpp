#pragma once

// Seeded random instance generators. The same seed yields the same instance
// on every platform: only mt19937_64 output and integer arithmetic are used.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "critobs/automaton.hpp"
#include "critobs/petri.hpp"
#include "critobs/reductions.hpp"

namespace critobs::random {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t below(Rng& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }

// Probability given in per-mille to keep the stream portable.
inline bool chance(Rng& rng, unsigned per_mille) { return rng() % 1000 < per_mille; }

}  // namespace detail

struct EventSpec {
  std::string name;
  bool observable;
};

/// Each (p, e, q) is a transition with probability per_mille/1000. One
/// initial state, or more with `extra_initial_per_mille`.
inline Nfa random_nfa(Rng& rng, std::size_t states, const std::vector<EventSpec>& events, unsigned per_mille,
                      unsigned extra_initial_per_mille = 0, unsigned marked_per_mille = 500) {
  NfaBuilder b;
  for (std::size_t q = 0; q < states; ++q) b.add_state(std::to_string(q));
  for (const auto& e : events) b.add_event(e.name, e.observable);
  for (std::size_t p = 0; p < states; ++p)
    for (const auto& e : events)
      for (std::size_t q = 0; q < states; ++q)
        if (detail::chance(rng, per_mille)) b.transition(std::to_string(p), e.name, std::to_string(q));
  b.initial(std::to_string(detail::below(rng, states)));
  for (std::size_t q = 0; q < states; ++q) {
    if (detail::chance(rng, extra_initial_per_mille)) b.initial(std::to_string(q));
    if (detail::chance(rng, marked_per_mille)) b.marked(std::to_string(q));
  }
  return b.build();
}

inline StateSet random_state_subset(Rng& rng, std::size_t states, unsigned per_mille = 500) {
  std::vector<StateId> out;
  for (StateId q = 0; q < states; ++q)
    if (detail::chance(rng, per_mille)) out.push_back(q);
  return StateSet(std::move(out));
}

/// Edges only go from lower to higher node index, so the graph is acyclic.
inline Dag random_dag(Rng& rng, std::size_t nodes, unsigned per_mille) {
  Dag d;
  d.nodes = nodes;
  for (std::size_t p = 0; p < nodes; ++p)
    for (std::size_t q = p + 1; q < nodes; ++q)
      if (detail::chance(rng, per_mille)) d.edges.emplace_back(p, q);
  d.source = detail::below(rng, nodes);
  d.target = detail::below(rng, nodes);
  return d;
}

/// Total DFA over the observable alphabet {0, 1}, initial state q0.
inline Nfa random_total_dfa(Rng& rng, std::size_t states, unsigned marked_per_mille = 300) {
  NfaBuilder b;
  for (std::size_t q = 0; q < states; ++q) b.add_state("q" + std::to_string(q));
  b.add_event("0", true);
  b.add_event("1", true);
  for (std::size_t p = 0; p < states; ++p)
    for (const char* e : {"0", "1"}) b.transition("q" + std::to_string(p), e, "q" + std::to_string(detail::below(rng, states)));
  b.initial("q0");
  for (std::size_t q = 0; q < states; ++q)
    if (detail::chance(rng, marked_per_mille)) b.marked("q" + std::to_string(q));
  return b.build();
}

/// NFA over the single observable event `event`.
inline Nfa random_unary_nfa(Rng& rng, std::size_t states, unsigned per_mille, unsigned marked_per_mille = 300,
                            const std::string& event = "a") {
  NfaBuilder b;
  for (std::size_t q = 0; q < states; ++q) b.add_state("q" + std::to_string(q));
  b.add_event(event, true);
  for (std::size_t p = 0; p < states; ++p)
    for (std::size_t q = 0; q < states; ++q)
      if (detail::chance(rng, per_mille)) b.transition("q" + std::to_string(p), event, "q" + std::to_string(q));
  b.initial("q" + std::to_string(detail::below(rng, states)));
  for (std::size_t q = 0; q < states; ++q)
    if (detail::chance(rng, marked_per_mille)) b.marked("q" + std::to_string(q));
  return b.build();
}

struct RandomNet {
  PetriNet net;
  Marking initial;
};

/// Conservative net: every transition moves `weight` tokens from its input
/// places to its output places, so the total token count is invariant and
/// the reachability set is finite.
inline RandomNet random_conservative_net(Rng& rng, std::size_t places, std::size_t transitions, Token total_tokens,
                                         const std::string& transition_prefix = "t") {
  std::vector<std::string> pnames;
  std::vector<std::string> tnames;
  for (std::size_t p = 0; p < places; ++p) pnames.push_back("p" + std::to_string(p + 1));
  for (std::size_t t = 0; t < transitions; ++t) tnames.push_back(transition_prefix + std::to_string(t + 1));
  ArcMatrix pre(places, std::vector<Token>(transitions, 0));
  ArcMatrix post(places, std::vector<Token>(transitions, 0));
  for (std::size_t t = 0; t < transitions; ++t) {
    Token weight = 1 + detail::below(rng, 2);
    for (Token k = 0; k < weight; ++k) {
      ++pre[detail::below(rng, places)][t];
      ++post[detail::below(rng, places)][t];
    }
  }
  Marking m0(places, 0);
  for (Token k = 0; k < total_tokens; ++k) ++m0[detail::below(rng, places)];
  return {PetriNet(std::move(pnames), std::move(tnames), std::move(pre), std::move(post)), std::move(m0)};
}

/// Arbitrary small net with unit arcs; may be unbounded.
inline RandomNet random_net(Rng& rng, std::size_t places, std::size_t transitions, unsigned arc_per_mille,
                            Token max_initial = 1) {
  std::vector<std::string> pnames;
  std::vector<std::string> tnames;
  for (std::size_t p = 0; p < places; ++p) pnames.push_back("p" + std::to_string(p + 1));
  for (std::size_t t = 0; t < transitions; ++t) tnames.push_back("t" + std::to_string(t + 1));
  ArcMatrix pre(places, std::vector<Token>(transitions, 0));
  ArcMatrix post(places, std::vector<Token>(transitions, 0));
  for (std::size_t p = 0; p < places; ++p)
    for (std::size_t t = 0; t < transitions; ++t) {
      pre[p][t] = detail::chance(rng, arc_per_mille) ? 1 : 0;
      post[p][t] = detail::chance(rng, arc_per_mille) ? 1 : 0;
    }
  Marking m0(places, 0);
  for (auto& v : m0) v = detail::below(rng, max_initial + 1);
  return {PetriNet(std::move(pnames), std::move(tnames), std::move(pre), std::move(post)), std::move(m0)};
}

/// Rejection-samples random_net until every reachable marking is 0/1.
inline RandomNet random_safe_net(Rng& rng, std::size_t places, std::size_t transitions, unsigned arc_per_mille) {
  ExploreLimits limits;
  limits.max_markings = 1u << 12;
  limits.max_tokens = 1;
  for (;;) {
    RandomNet candidate = random_net(rng, places, transitions, arc_per_mille, 1);
    ExploreOptions options;
    options.record_edges = false;
    Exploration ex = explore(candidate.net, candidate.initial, limits, options);
    if (ex.exhaustive) return candidate;
  }
}

/// Labels drawn from `alphabet`, each transition unobservable with
/// probability epsilon_per_mille/1000.
inline LabeledPetriNet random_labeling(Rng& rng, const RandomNet& n, const std::vector<std::string>& alphabet,
                                       unsigned epsilon_per_mille) {
  std::vector<std::optional<LabelId>> labels;
  for (TransitionId t = 0; t < n.net.num_transitions(); ++t) {
    if (alphabet.empty() || detail::chance(rng, epsilon_per_mille)) {
      labels.emplace_back(std::nullopt);
    } else {
      labels.emplace_back(static_cast<LabelId>(detail::below(rng, alphabet.size())));
    }
  }
  return LabeledPetriNet(n.net, n.initial, alphabet, std::move(labels));
}

struct InclusionPair {
  RandomNet a;
  RandomNet b;
};

/// Two conservative nets on the same places. With `superset` B is A plus
/// extra transitions from the same initial marking, so R(A) is included in
/// R(B); otherwise B is drawn independently with the same token total.
inline InclusionPair random_inclusion_pair(Rng& rng, std::size_t places, std::size_t transitions, Token tokens,
                                           bool superset) {
  RandomNet a = random_conservative_net(rng, places, transitions, tokens, "a");
  if (!superset) return {a, random_conservative_net(rng, places, transitions, tokens, "b")};
  RandomNet extra = random_conservative_net(rng, places, 1 + detail::below(rng, 2), tokens, "b");
  std::vector<std::string> names = a.net.transition_names();
  for (const auto& n : extra.net.transition_names()) names.push_back(n);
  ArcMatrix pre = a.net.pre_matrix();
  ArcMatrix post = a.net.post_matrix();
  for (std::size_t p = 0; p < places; ++p) {
    for (TransitionId t = 0; t < extra.net.num_transitions(); ++t) {
      pre[p].push_back(extra.net.pre(p, t));
      post[p].push_back(extra.net.post(p, t));
    }
  }
  return {a, {PetriNet(a.net.place_names(), std::move(names), std::move(pre), std::move(post)), a.initial}};
}

/// Target for the reachability construction: a reachable marking of the
/// bounded net when `reachable`, otherwise a marking with a different token
/// total (never reachable in a conservative net) or a random one.
inline Marking random_target(Rng& rng, const RandomNet& n, bool reachable) {
  if (reachable) {
    auto all = reachable_markings(n.net, n.initial);
    return all[detail::below(rng, all.size())];
  }
  Marking m(n.initial.size(), 0);
  for (auto& v : m) v = detail::below(rng, 3);
  return m;
}

}  // namespace critobs::random
