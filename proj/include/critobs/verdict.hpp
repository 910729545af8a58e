#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "critobs/automaton.hpp"

namespace critobs {

enum class Outcome { CriticallyObservable, NotCriticallyObservable, Unknown };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::CriticallyObservable: return "critically-observable";
    case Outcome::NotCriticallyObservable: return "not-critically-observable";
    case Outcome::Unknown: return "unknown";
  }
  return "?";
}

/// Two runs with the same observation, the first ending in a critical
/// configuration and the second in a non-critical one.
///
/// `Step` is whatever one move of a run is (an automaton transition, a
/// network move, a Petri net transition id); `Config` is a state, a state
/// tuple or a marking.
template <typename Step, typename Config, typename Label = EventId>
struct Witness {
  std::vector<Label> observation;
  std::vector<Step> run1;
  std::vector<Step> run2;
  Config end1{};
  Config end2{};

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct SearchStats {
  std::uint64_t explored = 0;       // distinct search states visited
  std::uint64_t peak_frontier = 0;  // largest BFS layer
  std::uint64_t depth = 0;          // deepest BFS layer reached
};

template <typename W>
struct Verdict {
  Outcome outcome = Outcome::CriticallyObservable;
  std::optional<W> witness;
  SearchStats stats;
};

}  // namespace critobs
