#include <catch_amalgamated.hpp>

#include "critobs/network.hpp"
#include "critobs/random.hpp"
#include "critobs/reductions.hpp"
#include "oracles.hpp"

using namespace critobs;

namespace {

// a unobservable, b and c observable.
Nfa handshake_g1() {
  NfaBuilder b;
  b.add_event("a", false);
  b.add_event("b", true);
  b.transition("0", "a", "1").transition("1", "b", "2").initial("0");
  return b.build();
}

Nfa handshake_g2() {
  NfaBuilder b;
  b.add_event("c", true);
  b.add_event("a", false);
  b.transition("0", "c", "1").transition("1", "a", "2").initial("0");
  return b.build();
}

/// Component over a random nonempty subset of {a, b (observable), u, v (unobservable)}.
Nfa random_component(random::Rng& rng, std::size_t states, unsigned per_mille) {
  const std::vector<random::EventSpec> pool{{"a", true}, {"b", true}, {"u", false}, {"v", false}};
  std::vector<random::EventSpec> chosen;
  for (const auto& e : pool)
    if (rng() % 2) chosen.push_back(e);
  if (chosen.empty()) chosen.push_back(pool[rng() % pool.size()]);
  return random::random_nfa(rng, states, chosen, per_mille, 200);
}

TupleCriticalSet random_tuples(random::Rng& rng, const Network& net, std::size_t count) {
  std::vector<StateTuple> tuples;
  for (std::size_t k = 0; k < count; ++k) {
    StateTuple t;
    for (const auto& g : net.components()) t.push_back(static_cast<StateId>(rng() % g.num_states()));
    tuples.push_back(t);
  }
  std::vector<TupleCriticalSet::ProductTerm> products;
  if (rng() % 3 == 0) {
    TupleCriticalSet::ProductTerm term(net.size());
    term[rng() % net.size()] = StateSet{0};
    products.push_back(term);
  }
  return TupleCriticalSet(net.size(), tuples, products);
}

Nfa cycle(std::size_t n, std::vector<std::string> initial) {
  NfaBuilder b;
  b.add_event("a", true);
  for (std::size_t q = 0; q < n; ++q) b.transition(std::to_string(q), "a", std::to_string((q + 1) % n));
  for (const auto& q : initial) b.initial(q);
  return b.build();
}

}  // namespace

TEST_CASE("hidden handshake reaching the joint end state is observable") {
  Network net({handshake_g1(), handshake_g2()});
  TupleCriticalSet c(2, {{2, 2}});
  CHECK(check_network(net, c).outcome == Outcome::CriticallyObservable);
  CHECK(check_network(net, c, NetworkSearch::IterativeDeepening).outcome == Outcome::CriticallyObservable);
  CHECK(materialize_and_check(net, c).outcome == Outcome::CriticallyObservable);
}

TEST_CASE("hidden handshake with a product critical set is refuted after c") {
  Network net({handshake_g1(), handshake_g2()});
  TupleCriticalSet c(2, {}, {{StateSet{1}, std::nullopt}});
  NetworkVerdict v = check_network(net, c);
  CHECK(v.outcome == Outcome::NotCriticallyObservable);
  REQUIRE(v.witness);
  CHECK(event_names(v.witness->observation, net.alphabet()) == std::vector<std::string>{"c"});
  CHECK_FALSE(witness_error(net, c, *v.witness));
}

TEST_CASE("single component networks behave like the component") {
  random::Rng rng(41);
  for (int k = 0; k < 200; ++k) {
    Nfa g = random::random_nfa(rng, 5, {{"a", true}, {"u", false}}, 200, 250);
    StateSet cs = random::random_state_subset(rng, 5);
    std::vector<StateTuple> tuples;
    for (StateId q : cs) tuples.push_back({q});
    Network net({g});
    TupleCriticalSet c(1, tuples);
    CHECK(check_network(net, c).outcome == check_nfa(g, cs).outcome);
    CHECK(materialize_and_check(net, c).outcome == check_nfa(g, cs).outcome);
  }
}

TEST_CASE("empty critical set is observable") {
  random::Rng rng(42);
  for (int k = 0; k < 20; ++k) {
    Network net({random_component(rng, 3, 300), random_component(rng, 3, 300)});
    TupleCriticalSet c(2);
    CHECK(check_network(net, c).outcome == Outcome::CriticallyObservable);
    CHECK(materialize_and_check(net, c).outcome == Outcome::CriticallyObservable);
  }
}

TEST_CASE("lazy search agrees with explicit composition") {
  random::Rng rng(43);
  for (int k = 0; k < 400; ++k) {
    const std::size_t n = 1 + rng() % 4;
    std::vector<Nfa> parts;
    for (std::size_t i = 0; i < n; ++i) parts.push_back(random_component(rng, 1 + rng() % 4, 250));
    Network net(parts);
    TupleCriticalSet c = random_tuples(rng, net, 1 + rng() % 4);
    NetworkVerdict lazy = check_network(net, c);
    NetworkVerdict explicit_v = materialize_and_check(net, c);
    const bool expected = oracle::network_critically_observable(net, c);
    CHECK(lazy.outcome == explicit_v.outcome);
    CHECK((lazy.outcome == Outcome::CriticallyObservable) == expected);
    std::vector<const NetworkVerdict*> verdicts{&lazy, &explicit_v};
    // Iterative deepening enumerates simple paths; keep its products small.
    std::size_t tuples = 1;
    for (const auto& g : net.components()) tuples *= g.num_states();
    NetworkVerdict deep;
    if (tuples <= 8) {
      deep = check_network(net, c, NetworkSearch::IterativeDeepening);
      CHECK(deep.outcome == lazy.outcome);
      verdicts.push_back(&deep);
    }
    for (const auto* v : verdicts) {
      CHECK(v->witness.has_value() == (v->outcome == Outcome::NotCriticallyObservable));
      if (v->witness) CHECK_FALSE(witness_error(net, c, *v->witness));
    }
  }
}

TEST_CASE("network input validation") {
  NfaBuilder x;
  x.add_event("e", true);
  x.initial("p");
  NfaBuilder y;
  y.add_event("e", false);
  y.initial("q");
  CHECK_THROWS_AS(Network({x.build(), y.build()}), ValidationError);
  CHECK_THROWS_AS(Network(std::vector<Nfa>{}), ValidationError);

  Network net({handshake_g1(), handshake_g2()});
  CHECK_THROWS_AS(check_network(net, TupleCriticalSet(1, {{0}})), ValidationError);
  CHECK_THROWS_AS(check_network(net, TupleCriticalSet(2, {{0, 9}})), ValidationError);
  CHECK_THROWS_AS(TupleCriticalSet(2, {{0}}), ValidationError);
}

TEST_CASE("explicit composition respects its cap") {
  random::Rng rng(44);
  std::vector<Nfa> parts;
  for (int i = 0; i < 3; ++i) parts.push_back(random::random_nfa(rng, 4, {{"x" + std::to_string(i), true}}, 700));
  Network net(parts);
  CHECK_THROWS_AS(materialize_and_check(net, TupleCriticalSet(3), 5), ResourceError);
}

TEST_CASE("network witnesses with a tampered step are rejected") {
  Network net({handshake_g1(), handshake_g2()});
  TupleCriticalSet c(2, {}, {{StateSet{1}, std::nullopt}});
  NetworkWitness w = *check_network(net, c).witness;
  NetworkWitness swapped = w;
  std::swap(swapped.end1, swapped.end2);
  CHECK(witness_error(net, c, swapped));
  NetworkWitness extra = w;
  extra.observation.push_back(extra.observation.front());
  CHECK(witness_error(net, c, extra));
}

TEST_CASE("unary network with a single looping state") {
  NfaBuilder b;
  b.add_event("a", true);
  b.transition("q0", "a", "q0").initial("q0");
  Network net({b.build()});
  UnaryVerdict u = check_unary_network(net, TupleCriticalSet(1, {{0}}));
  CHECK(u.verdict.outcome == Outcome::CriticallyObservable);
  CHECK_FALSE(u.length);
  CHECK(u.sequences.at(0).tail == 0);
  CHECK(u.sequences.at(0).period == 1);
}

TEST_CASE("unary intersection accepted at length two is refuted at length three") {
  NfaBuilder b;
  b.add_event("a", true);
  b.transition("q0", "a", "q1").transition("q1", "a", "q2").initial("q0").marked("q2");
  Nfa a1 = b.build();
  NfaBuilder d;
  d.add_event("a", true);
  d.transition("q0", "a", "q1").transition("q1", "a", "q2").transition("q2", "a", "q2").initial("q0").marked("q2");
  Nfa a2 = d.build();
  NetworkInstance inst = gen_unary_intersection({a1, a2});
  UnaryVerdict u = check_unary_network(inst.network, inst.critical);
  CHECK(u.verdict.outcome == Outcome::NotCriticallyObservable);
  REQUIRE(u.length);
  CHECK(*u.length == 3);
  CHECK(oracle::unary_scan(inst.network, inst.critical, 64) == std::optional<std::uint64_t>(3));
  REQUIRE(u.verdict.witness);
  CHECK_FALSE(witness_error(inst.network, inst.critical, *u.verdict.witness));
}

TEST_CASE("unary scan bound combines tails and periods") {
  // Period 2 (two tokens on a 4-cycle) and period 3.
  Network net({cycle(4, {"0", "2"}), cycle(3, {"0"})});
  TupleCriticalSet c(2, {{1, 2}});
  UnaryVerdict u = check_unary_network(net, c);
  CHECK(u.sequences[0].period == 2);
  CHECK(u.sequences[1].period == 3);
  CHECK(u.scan_bound == 6);
  REQUIRE(u.length);
  CHECK(*u.length == 5);
  CHECK(oracle::unary_scan(net, c, 64) == u.length);
}

TEST_CASE("unary decision agrees with the naive scan and the twin search") {
  random::Rng rng(45);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 1 + rng() % 3;
    std::vector<Nfa> parts;
    std::uint64_t naive_bound = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t states = 1 + rng() % 4;
      parts.push_back(random::random_unary_nfa(rng, states, 300));
      naive_bound <<= states;
    }
    Network net(parts);
    TupleCriticalSet c = random_tuples(rng, net, 1 + rng() % 3);
    UnaryVerdict u = check_unary_network(net, c);
    auto naive = oracle::unary_scan(net, c, naive_bound);
    CHECK(u.length == naive);
    CHECK((u.verdict.outcome == Outcome::NotCriticallyObservable) == naive.has_value());
    CHECK(u.verdict.outcome == check_network(net, c).outcome);
    if (u.verdict.witness) CHECK_FALSE(witness_error(net, c, *u.verdict.witness));
    for (std::size_t i = 0; i < n; ++i) {
      auto [tail, period] = oracle::tail_and_period(net.component(i), 2 * naive_bound + 2);
      CHECK(u.sequences[i].tail == tail);
      CHECK(u.sequences[i].period == period);
    }
  }
}

TEST_CASE("unary decision rejects unsuitable networks") {
  NfaBuilder b;
  b.add_event("a", true);
  b.add_event("b", true);
  b.transition("0", "a", "0").initial("0");
  CHECK_THROWS_AS(check_unary_network(Network({b.build()}), TupleCriticalSet(1)), ValidationError);

  NfaBuilder u;
  u.add_event("a", false);
  u.transition("0", "a", "0").initial("0");
  CHECK_THROWS_AS(check_unary_network(Network({u.build()}), TupleCriticalSet(1)), ValidationError);

  NfaBuilder x;
  x.add_event("a", true);
  x.initial("0");
  NfaBuilder y;
  y.add_event("b", true);
  y.initial("0");
  CHECK_THROWS_AS(check_unary_network(Network({x.build(), y.build()}), TupleCriticalSet(2)), ValidationError);
}

TEST_CASE("unary scan bound beyond the cap is a resource error") {
  // Coprime cycle lengths 7 * 11 * 13 = 1001.
  Network net({cycle(7, {"0"}), cycle(11, {"0"}), cycle(13, {"0"})});
  CHECK_THROWS_AS(check_unary_network(net, TupleCriticalSet(3), 1000), ResourceError);
  CHECK(check_unary_network(net, TupleCriticalSet(3), 1001).scan_bound == 1001);
}

TEST_CASE("unary scan bound overflow names every component") {
  std::vector<SubsetSequence> seqs;
  for (std::uint64_t p : {4294967291ULL, 4294967279ULL, 4294967231ULL}) {
    SubsetSequence s;
    s.tail = 1;
    s.period = p;
    seqs.push_back(s);
  }
  try {
    unary_scan_bound(seqs);
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("(1,4294967291)") != std::string::npos);
  }
}
