#pragma once

// Finite automata with partial observation.
//
// Names of states and events are kept for I/O and witnesses; everything else
// works on dense integer ids. An Nfa is immutable once built.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "critobs/error.hpp"

namespace critobs {

using StateId = std::uint32_t;
using EventId = std::uint32_t;
using Word = std::vector<EventId>;

/// Sorted, duplicate-free set of state ids.
class StateSet {
 public:
  StateSet() = default;
  StateSet(std::initializer_list<StateId> ids) : members_(ids) { normalize(); }
  explicit StateSet(std::vector<StateId> ids) : members_(std::move(ids)) { normalize(); }

  [[nodiscard]] bool contains(StateId q) const {
    return std::binary_search(members_.begin(), members_.end(), q);
  }
  [[nodiscard]] bool empty() const { return members_.empty(); }
  [[nodiscard]] std::size_t size() const { return members_.size(); }
  [[nodiscard]] const std::vector<StateId>& members() const { return members_; }
  [[nodiscard]] auto begin() const { return members_.begin(); }
  [[nodiscard]] auto end() const { return members_.end(); }

  void insert(StateId q) {
    auto it = std::lower_bound(members_.begin(), members_.end(), q);
    if (it == members_.end() || *it != q) members_.insert(it, q);
  }

  friend bool operator==(const StateSet&, const StateSet&) = default;
  friend auto operator<=>(const StateSet& a, const StateSet& b) {
    return a.members_ <=> b.members_;
  }

 private:
  void normalize() {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  std::vector<StateId> members_;
};

/// Ordered event set partitioned into observable and unobservable events.
class EventAlphabet {
 public:
  EventAlphabet() = default;

  EventAlphabet(std::vector<std::string> names, std::vector<bool> observable)
      : names_(std::move(names)), observable_(std::move(observable)) {
    if (names_.size() != observable_.size()) {
      throw ValidationError("event alphabet: " + std::to_string(names_.size()) + " names but " +
                            std::to_string(observable_.size()) + " observability flags");
    }
    for (EventId e = 0; e < names_.size(); ++e) {
      if (!index_.emplace(names_[e], e).second) {
        throw ValidationError("event alphabet: duplicate event '" + names_[e] + "'");
      }
    }
  }

  [[nodiscard]] std::size_t size() const { return names_.size(); }
  [[nodiscard]] bool empty() const { return names_.empty(); }
  [[nodiscard]] const std::string& name(EventId e) const { return names_.at(e); }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
  [[nodiscard]] bool observable(EventId e) const { return observable_.at(e); }

  [[nodiscard]] std::optional<EventId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  EventId id(std::string_view name) const {
    if (auto e = find(name)) return *e;
    throw ValidationError("unknown event '" + std::string(name) + "'");
  }

  [[nodiscard]] std::vector<EventId> observable_events() const {
    std::vector<EventId> out;
    for (EventId e = 0; e < size(); ++e)
      if (observable_[e]) out.push_back(e);
    return out;
  }

 private:
  std::vector<std::string> names_;
  std::vector<bool> observable_;
  std::unordered_map<std::string, EventId> index_;
};

struct Transition {
  StateId from;
  EventId event;
  StateId to;

  friend bool operator==(const Transition&, const Transition&) = default;
  friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// Nondeterministic finite automaton (Q, Sigma, delta, I, F) with an
/// observable/unobservable event partition.
class Nfa {
 public:
  Nfa(std::vector<std::string> states, EventAlphabet alphabet,
      std::vector<Transition> transitions, StateSet initial, StateSet marked = {})
      : state_names_(std::move(states)),
        alphabet_(std::move(alphabet)),
        initial_(std::move(initial)),
        marked_(std::move(marked)) {
    for (StateId q = 0; q < state_names_.size(); ++q) {
      if (!state_index_.emplace(state_names_[q], q).second) {
        throw ValidationError("automaton: duplicate state '" + state_names_[q] + "'");
      }
    }
    if (initial_.empty()) throw ValidationError("automaton: initial state set is empty");
    check_subset(initial_, "initial");
    check_subset(marked_, "marked");

    const std::size_t n = state_names_.size();
    const std::size_t m = alphabet_.size();
    successors_.assign(n * m, {});
    for (const auto& tr : transitions) {
      if (tr.from >= n || tr.to >= n) {
        throw ValidationError("automaton: transition endpoint out of range");
      }
      if (tr.event >= m) throw ValidationError("automaton: transition event out of range");
      successors_[tr.from * m + tr.event].push_back(tr.to);
    }
    for (auto& targets : successors_) {
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    }
  }

  [[nodiscard]] std::size_t num_states() const { return state_names_.size(); }
  [[nodiscard]] const EventAlphabet& alphabet() const { return alphabet_; }
  [[nodiscard]] const StateSet& initial() const { return initial_; }
  [[nodiscard]] const StateSet& marked() const { return marked_; }
  [[nodiscard]] const std::string& state_name(StateId q) const { return state_names_.at(q); }
  [[nodiscard]] const std::vector<std::string>& state_names() const { return state_names_; }

  [[nodiscard]] std::optional<StateId> find_state(std::string_view name) const {
    auto it = state_index_.find(std::string(name));
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
  }

  StateId state_id(std::string_view name) const {
    if (auto q = find_state(name)) return *q;
    throw ValidationError("unknown state '" + std::string(name) + "'");
  }

  /// Targets of (q, e), sorted ascending.
  [[nodiscard]] std::span<const StateId> successors(StateId q, EventId e) const {
    return successors_[q * alphabet_.size() + e];
  }

  [[nodiscard]] bool has_transition(StateId from, EventId e, StateId to) const {
    if (from >= num_states() || to >= num_states() || e >= alphabet_.size()) return false;
    auto targets = successors(from, e);
    return std::binary_search(targets.begin(), targets.end(), to);
  }

  /// All transitions, ordered by (from, event, to).
  [[nodiscard]] std::vector<Transition> transitions() const {
    std::vector<Transition> out;
    for (StateId q = 0; q < num_states(); ++q)
      for (EventId e = 0; e < alphabet_.size(); ++e)
        for (StateId r : successors(q, e)) out.push_back({q, e, r});
    return out;
  }

  [[nodiscard]] std::size_t num_transitions() const {
    std::size_t count = 0;
    for (const auto& targets : successors_) count += targets.size();
    return count;
  }

 private:
  void check_subset(const StateSet& s, const char* what) const {
    for (StateId q : s) {
      if (q >= state_names_.size()) {
        throw ValidationError(std::string("automaton: ") + what + " state out of range");
      }
    }
  }

  std::vector<std::string> state_names_;
  std::unordered_map<std::string, StateId> state_index_;
  EventAlphabet alphabet_;
  std::vector<std::vector<StateId>> successors_;
  StateSet initial_;
  StateSet marked_;
};

/// Name-based incremental construction of an Nfa. States are created on first
/// mention, events must be declared first; duplicate transitions are
/// idempotent.
class NfaBuilder {
 public:
  StateId add_state(const std::string& name) {
    auto [it, inserted] = states_.emplace(name, static_cast<StateId>(state_names_.size()));
    if (inserted) state_names_.push_back(name);
    return it->second;
  }

  EventId add_event(const std::string& name, bool observable = true) {
    auto it = events_.find(name);
    if (it != events_.end()) {
      if (observable_[it->second] != observable) {
        throw ValidationError("event '" + name + "' declared both observable and unobservable");
      }
      return it->second;
    }
    auto id = static_cast<EventId>(event_names_.size());
    events_.emplace(name, id);
    event_names_.push_back(name);
    observable_.push_back(observable);
    return id;
  }

  NfaBuilder& transition(const std::string& from, const std::string& event, const std::string& to) {
    auto e = events_.find(event);
    if (e == events_.end()) throw ValidationError("unknown event '" + event + "'");
    transitions_.push_back({add_state(from), e->second, add_state(to)});
    return *this;
  }

  NfaBuilder& initial(const std::string& q) {
    initial_.push_back(add_state(q));
    return *this;
  }

  NfaBuilder& marked(const std::string& q) {
    marked_.push_back(add_state(q));
    return *this;
  }

  [[nodiscard]] Nfa build() const {
    return Nfa(state_names_, EventAlphabet(event_names_, observable_), transitions_,
               StateSet(initial_), StateSet(marked_));
  }

 private:
  std::unordered_map<std::string, StateId> states_;
  std::vector<std::string> state_names_;
  std::unordered_map<std::string, EventId> events_;
  std::vector<std::string> event_names_;
  std::vector<bool> observable_;
  std::vector<Transition> transitions_;
  std::vector<StateId> initial_;
  std::vector<StateId> marked_;
};

/// Erases unobservable events from `word`.
inline Word project(const Word& word, const EventAlphabet& alphabet) {
  Word out;
  out.reserve(word.size());
  for (EventId e : word) {
    if (e >= alphabet.size()) {
      throw ValidationError("projection: event id " + std::to_string(e) + " not in alphabet");
    }
    if (alphabet.observable(e)) out.push_back(e);
  }
  return out;
}

inline Word project(std::span<const std::string> word, const EventAlphabet& alphabet) {
  Word ids;
  ids.reserve(word.size());
  for (const auto& name : word) ids.push_back(alphabet.id(name));
  return project(ids, alphabet);
}

/// One-event successor of a state set.
inline StateSet step(const Nfa& g, const StateSet& s, EventId e) {
  if (e >= g.alphabet().size()) throw ValidationError("step: event id out of range");
  std::vector<StateId> out;
  for (StateId q : s) {
    if (q >= g.num_states()) throw ValidationError("step: state id out of range");
    auto targets = g.successors(q, e);
    out.insert(out.end(), targets.begin(), targets.end());
  }
  return StateSet(std::move(out));
}

inline StateSet step(const Nfa& g, const StateSet& s, const Word& w) {
  StateSet current = s;
  for (EventId e : w) current = step(g, current, e);
  return current;
}

/// States reachable from `s` by unobservable events only (including `s`).
inline StateSet unobservable_closure(const Nfa& g, const StateSet& s) {
  std::vector<char> seen(g.num_states(), 0);
  std::vector<StateId> stack(s.begin(), s.end());
  for (StateId q : stack) seen[q] = 1;
  const auto& alphabet = g.alphabet();
  while (!stack.empty()) {
    StateId q = stack.back();
    stack.pop_back();
    for (EventId e = 0; e < alphabet.size(); ++e) {
      if (alphabet.observable(e)) continue;
      for (StateId r : g.successors(q, e)) {
        if (!seen[r]) {
          seen[r] = 1;
          stack.push_back(r);
        }
      }
    }
  }
  std::vector<StateId> out;
  for (StateId q = 0; q < g.num_states(); ++q)
    if (seen[q]) out.push_back(q);
  return StateSet(std::move(out));
}

/// |I| = 1 and at most one target per (state, event).
inline bool is_deterministic(const Nfa& g) {
  if (g.initial().size() != 1) return false;
  for (StateId q = 0; q < g.num_states(); ++q)
    for (EventId e = 0; e < g.alphabet().size(); ++e)
      if (g.successors(q, e).size() > 1) return false;
  return true;
}

/// Deterministic with exactly one target per (state, event).
inline bool is_total_dfa(const Nfa& g) {
  if (g.initial().size() != 1) return false;
  for (StateId q = 0; q < g.num_states(); ++q)
    for (EventId e = 0; e < g.alphabet().size(); ++e)
      if (g.successors(q, e).size() != 1) return false;
  return true;
}

/// Every generated word of length at most `max_length`. The empty word is
/// always included since I is nonempty.
inline std::set<Word> bounded_language(const Nfa& g, std::size_t max_length) {
  std::set<Word> words;
  std::vector<std::pair<Word, StateSet>> layer{{Word{}, g.initial()}};
  words.insert(Word{});
  for (std::size_t len = 0; len < max_length && !layer.empty(); ++len) {
    std::vector<std::pair<Word, StateSet>> next;
    for (const auto& [word, states] : layer) {
      for (EventId e = 0; e < g.alphabet().size(); ++e) {
        StateSet reached = step(g, states, e);
        if (reached.empty()) continue;
        Word extended = word;
        extended.push_back(e);
        words.insert(extended);
        next.emplace_back(std::move(extended), std::move(reached));
      }
    }
    layer = std::move(next);
  }
  return words;
}

inline std::vector<std::string> event_names(const Word& w, const EventAlphabet& alphabet) {
  std::vector<std::string> out;
  out.reserve(w.size());
  for (EventId e : w) out.push_back(alphabet.name(e));
  return out;
}

}  // namespace critobs
