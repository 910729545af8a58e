#include <catch_amalgamated.hpp>

#include "critobs/petri_check.hpp"
#include "critobs/random.hpp"
#include "critobs/reductions.hpp"
#include "oracles.hpp"

using namespace critobs;

namespace {

using Mode = CriticalMarkingSet::Mode;

PetriNet consume_one() { return PetriNet({"p"}, {"t"}, {{1}}, {{0}}); }

// Two processes competing for a lock; entering is observable, leaving is not.
LabeledPetriNet mutex() {
  // places: idle1 idle2 lock busy1 busy2; transitions: enter1 enter2 leave1 leave2
  PetriNet n({"idle1", "idle2", "lock", "busy1", "busy2"}, {"enter1", "enter2", "leave1", "leave2"},
             {{1, 0, 0, 0}, {0, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}},
             {{0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 1, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}});
  return LabeledPetriNet(n, {1, 1, 1, 0, 0}, {"enter"}, {LabelId{0}, LabelId{0}, std::nullopt, std::nullopt});
}

CriticalMarkingSet random_critical(random::Rng& rng, const std::set<Marking>& reachable, Mode mode) {
  std::vector<Marking> pick;
  for (const auto& m : reachable)
    if (rng() % 3 == 0) pick.push_back(m);
  return CriticalMarkingSet(mode, std::move(pick));
}

}  // namespace

TEST_CASE("finite and co-finite membership") {
  CriticalMarkingSet finite(Mode::Finite, {{1, 0}, {0, 1}});
  CriticalMarkingSet cofinite(Mode::CoFinite, {{1, 0}, {0, 1}});
  CHECK(member({1, 0}, finite));
  CHECK_FALSE(member({1, 1}, finite));
  CHECK_FALSE(member({1, 0}, cofinite));
  CHECK(member({1, 1}, cofinite));
  CHECK(member({7, 7}, cofinite));
  CHECK_THROWS_AS(CriticalMarkingSet(Mode::Finite, {{1}, {1}}), ValidationError);
}

TEST_CASE("critical markings must match the net dimension") {
  LabeledPetriNet g = identity_labeled(consume_one(), {1});
  CHECK_THROWS_AS(check_petri(g, CriticalMarkingSet(Mode::Finite, {{1, 0}})), ValidationError);
}

TEST_CASE("net without transitions") {
  LabeledPetriNet g(PetriNet({"p"}, {}, {{}}, {{}}), {2}, {}, {});
  PetriVerdict v = check_petri(g, CriticalMarkingSet(Mode::Finite, {{2}}));
  CHECK(v.outcome == Outcome::CriticallyObservable);
  CHECK(v.exhaustive);
  CHECK(v.stats.explored == 1);
}

TEST_CASE("token generator makes a reachable target visible") {
  PetriInstance inst = gen_reachability_petri(consume_one(), {2}, {1});
  PetriVerdict v = check_petri(inst.net, inst.critical);
  CHECK(v.outcome == Outcome::NotCriticallyObservable);
  REQUIRE(v.witness);
  CHECK(v.witness->end1 == Marking{1, 0});
  CHECK(v.witness->end2 == Marking{1, 1});
  CHECK_FALSE(witness_error(inst.net, inst.critical, *v.witness));
}

TEST_CASE("unreachable target leaves the verdict open") {
  PetriInstance inst = gen_reachability_petri(consume_one(), {2}, {3});
  ExploreLimits limits;
  limits.max_markings = 2000;
  PetriVerdict v = check_petri(inst.net, inst.critical, limits);
  CHECK(v.outcome == Outcome::Unknown);
  CHECK_FALSE(v.exhaustive);
  CHECK(v.limit_hit == LimitHit::Markings);
  CHECK_FALSE(v.witness);
}

TEST_CASE("unbounded evidence is reported but does not decide") {
  PetriInstance inst = gen_reachability_petri(consume_one(), {2}, {3});
  ExploreLimits limits;
  limits.max_markings = 500;
  PetriVerdict v = check_petri(inst.net, inst.critical, limits, true);
  CHECK(v.unbounded_evidence);
  CHECK(v.outcome == Outcome::Unknown);
}

TEST_CASE("mutual exclusion hides which process entered") {
  LabeledPetriNet g = mutex();
  CriticalMarkingSet busy1(Mode::Finite, {{0, 1, 0, 1, 0}});
  PetriVerdict v = check_petri(g, busy1);
  CHECK(v.outcome == Outcome::NotCriticallyObservable);
  REQUIRE(v.witness);
  CHECK(v.witness->observation == std::vector<LabelId>{0});
  CHECK_FALSE(witness_error(g, busy1, *v.witness));

  CriticalMarkingSet someone_busy(Mode::Finite, {{0, 1, 0, 1, 0}, {1, 0, 0, 0, 1}});
  CHECK(check_petri(g, someone_busy).outcome == Outcome::NotCriticallyObservable);
  CHECK(oracle::petri_critically_observable(g, [&](const Marking& m) { return someone_busy.member(m); }) ==
        false);
}

TEST_CASE("agreement with brute force on safe nets") {
  random::Rng rng(61);
  int decided = 0;
  for (int k = 0; k < 400; ++k) {
    random::RandomNet n = random::random_safe_net(rng, 1 + rng() % 4, 1 + rng() % 4, 350);
    LabeledPetriNet g = random::random_labeling(rng, n, {"x", "y"}, 350);
    auto reachable = oracle::petri_reachable_set(n.net, n.initial);
    REQUIRE(reachable);
    Mode mode = rng() % 2 ? Mode::Finite : Mode::CoFinite;
    CriticalMarkingSet c = random_critical(rng, *reachable, mode);
    PetriVerdict v = check_petri(g, c);
    auto expected = oracle::petri_critically_observable(g, [&](const Marking& m) { return c.member(m); });
    REQUIRE(expected);
    REQUIRE(v.outcome != Outcome::Unknown);
    CHECK((v.outcome == Outcome::CriticallyObservable) == *expected);
    if (v.witness) CHECK_FALSE(witness_error(g, c, *v.witness));
    ++decided;
  }
  CHECK(decided == 400);
}

TEST_CASE("agreement with brute force on conservative nets") {
  random::Rng rng(62);
  for (int k = 0; k < 200; ++k) {
    random::RandomNet n = random::random_conservative_net(rng, 1 + rng() % 3, 1 + rng() % 4, 1 + rng() % 3);
    LabeledPetriNet g = random::random_labeling(rng, n, {"x", "y"}, 300);
    auto reachable = oracle::petri_reachable_set(n.net, n.initial);
    REQUIRE(reachable);
    CriticalMarkingSet c = random_critical(rng, *reachable, rng() % 2 ? Mode::Finite : Mode::CoFinite);
    PetriVerdict v = check_petri(g, c);
    auto expected = oracle::petri_critically_observable(g, [&](const Marking& m) { return c.member(m); });
    REQUIRE(expected);
    CHECK((v.outcome == Outcome::CriticallyObservable) == *expected);
  }
}

TEST_CASE("finite list and its co-finite counterpart give the same verdict") {
  // On the reachable set, Finite L and CoFinite (R \ L) describe complements,
  // and critical observability is invariant under complementing C.
  random::Rng rng(63);
  for (int k = 0; k < 200; ++k) {
    random::RandomNet n = random::random_conservative_net(rng, 3, 3, 2);
    LabeledPetriNet g = random::random_labeling(rng, n, {"x"}, 400);
    auto reachable = oracle::petri_reachable_set(n.net, n.initial);
    REQUIRE(reachable);
    CriticalMarkingSet finite = random_critical(rng, *reachable, Mode::Finite);
    CriticalMarkingSet same(Mode::CoFinite, finite.markings());
    std::vector<Marking> rest;
    for (const auto& m : *reachable)
      if (!finite.member(m)) rest.push_back(m);
    CriticalMarkingSet complement(Mode::Finite, rest);
    const Outcome a = check_petri(g, finite).outcome;
    CHECK(a == check_petri(g, same).outcome);
    CHECK(a == check_petri(g, complement).outcome);
  }
}

TEST_CASE("an observable verdict only comes from an exhaustive search") {
  random::Rng rng(64);
  for (int k = 0; k < 200; ++k) {
    random::RandomNet n = random::random_net(rng, 3, 3, 350, 1);
    LabeledPetriNet g = random::random_labeling(rng, n, {"x"}, 400);
    CriticalMarkingSet c(Mode::Finite, {n.initial});
    ExploreLimits limits;
    limits.max_markings = 200;
    PetriVerdict v = check_petri(g, c, limits);
    if (v.outcome == Outcome::CriticallyObservable) CHECK(v.exhaustive);
    if (v.outcome == Outcome::Unknown) CHECK(v.limit_hit != LimitHit::None);
    if (v.outcome == Outcome::NotCriticallyObservable) CHECK(v.witness);
  }
}

TEST_CASE("witness validation rejects tampered witnesses") {
  LabeledPetriNet g = mutex();
  CriticalMarkingSet c(Mode::Finite, {{0, 1, 0, 1, 0}});
  PetriWitness w = *check_petri(g, c).witness;
  REQUIRE_FALSE(witness_error(g, c, w));

  PetriWitness swapped = w;
  std::swap(swapped.end1, swapped.end2);
  CHECK(witness_error(g, c, swapped));

  PetriWitness longer = w;
  longer.observation.push_back(0);
  CHECK(witness_error(g, c, longer));

  PetriWitness relabeled = w;
  relabeled.run1 = {2};  // leave1 is disabled initially
  CHECK(witness_error(g, c, relabeled));

  PetriWitness wrong_end = w;
  wrong_end.end2 = {1, 1, 1, 0, 0};
  CHECK(witness_error(g, c, wrong_end));

  PetriWitness short_marking = w;
  short_marking.end1.pop_back();
  CHECK(witness_error(g, c, short_marking));

  PetriWitness out_of_range = w;
  out_of_range.run2.push_back(99);
  CHECK(witness_error(g, c, out_of_range));
}

TEST_CASE("witnesses come from the shortest twin firing sequence") {
  random::Rng rng(65);
  for (int k = 0; k < 200; ++k) {
    random::RandomNet n = random::random_conservative_net(rng, 3, 3, 2);
    LabeledPetriNet g = random::random_labeling(rng, n, {"x"}, 400);
    auto reachable = oracle::petri_reachable_set(n.net, n.initial);
    CriticalMarkingSet c = random_critical(rng, *reachable, Mode::Finite);
    PetriVerdict v = check_petri(g, c);
    if (!v.witness) continue;
    // Length in twin firings: observable steps fire in pairs.
    const std::size_t moves = v.witness->run1.size() + v.witness->run2.size() - v.witness->observation.size();
    TwinNet tw = twin_net(g);
    Exploration ex = explore(tw.net, tw.initial, ExploreLimits{});
    std::size_t best = SIZE_MAX;
    for (std::uint32_t id = 0; id < ex.markings.size(); ++id) {
      if (c.member(tw.first(ex.markings[id])) && !c.member(tw.second(ex.markings[id])))
        best = std::min<std::size_t>(best, ex.depth[id]);
    }
    CHECK(moves == best);
  }
}
