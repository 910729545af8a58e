#pragma once

// Instance generators for the hardness constructions, each paired with the
// independent property it is meant to encode:
//
//   gen_dag_nfa            critically observable  iff  t unreachable from s
//   gen_dfa_intersection   critically observable  iff  the marked languages are disjoint
//   gen_unary_intersection critically observable  iff  the marked languages are disjoint
//   gen_reachability_petri critically observable  iff  the target is unreachable
//   gen_marking_inclusion  critically observable  iff  R(A) is contained in R(B)
//
// The oracle functions below compute the right-hand sides without touching
// any observability checker.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "critobs/automaton.hpp"
#include "critobs/compose.hpp"
#include "critobs/error.hpp"
#include "critobs/network.hpp"
#include "critobs/petri.hpp"
#include "critobs/petri_check.hpp"

namespace critobs {

// ---------------------------------------------------------------------------
// DAG reachability

struct Dag {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t source = 0;
  std::size_t target = 0;

  void validate() const {
    if (source >= nodes || target >= nodes) throw ValidationError("DAG: source or target is not a node");
    std::vector<std::size_t> indegree(nodes, 0);
    std::vector<std::vector<std::size_t>> out(nodes);
    for (auto [p, q] : edges) {
      if (p >= nodes || q >= nodes) throw ValidationError("DAG: edge endpoint is not a node");
      out[p].push_back(q);
      ++indegree[q];
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < nodes; ++v)
      if (indegree[v] == 0) ready.push_back(v);
    std::size_t ordered = 0;
    while (!ready.empty()) {
      std::size_t v = ready.back();
      ready.pop_back();
      ++ordered;
      for (auto w : out[v])
        if (--indegree[w] == 0) ready.push_back(w);
    }
    if (ordered != nodes) throw ValidationError("DAG: graph has a cycle");
  }
};

inline bool dag_reachable(const Dag& d) {
  std::vector<std::vector<std::size_t>> out(d.nodes);
  for (auto [p, q] : d.edges) out[p].push_back(q);
  std::vector<char> seen(d.nodes, 0);
  std::vector<std::size_t> stack{d.source};
  seen[d.source] = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (v == d.target) return true;
    for (auto w : out[v])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return false;
}

enum class DagVariant {
  // Unary observable alphabet: edges become a-transitions, plus (t,a,t) and (t,a,r).
  UnaryNfa,
  // Deterministic: every edge gets a fresh observable event, (t,u,r) with u unobservable.
  Dfa,
};

struct NfaInstance {
  Nfa automaton;
  StateSet critical;
};

inline std::string dag_node_name(std::size_t v) { return "v" + std::to_string(v); }

inline NfaInstance gen_dag_nfa(const Dag& d, DagVariant variant = DagVariant::UnaryNfa) {
  d.validate();
  NfaBuilder b;
  for (std::size_t v = 0; v < d.nodes; ++v) b.add_state(dag_node_name(v));
  b.add_state("r");
  const std::string t = dag_node_name(d.target);
  if (variant == DagVariant::UnaryNfa) {
    b.add_event("a", true);
    for (auto [p, q] : d.edges) b.transition(dag_node_name(p), "a", dag_node_name(q));
    b.transition(t, "a", t);
    b.transition(t, "a", "r");
  } else {
    for (std::size_t k = 0; k < d.edges.size(); ++k) {
      const std::string e = "e" + std::to_string(k);
      b.add_event(e, true);
      b.transition(dag_node_name(d.edges[k].first), e, dag_node_name(d.edges[k].second));
    }
    b.add_event("u", false);
    b.transition(t, "u", "r");
  }
  b.initial(dag_node_name(d.source));
  for (std::size_t v = 0; v < d.nodes; ++v) b.marked(dag_node_name(v));
  b.marked("r");
  Nfa g = b.build();
  StateSet critical{g.state_id(t)};
  return {std::move(g), std::move(critical)};
}

// ---------------------------------------------------------------------------
// Language intersection over networks

struct NetworkInstance {
  Network network;
  TupleCriticalSet critical;
};

enum class IntersectionVariant {
  SharedObservableOne,  // (p, 1, s_i) for marked p
  UnobservableU,        // (p, u, s_i) for marked p, u unobservable
};

/// Copies `g` into a builder, keeping names and observability.
inline NfaBuilder builder_from(const Nfa& g) {
  NfaBuilder b;
  for (StateId q = 0; q < g.num_states(); ++q) b.add_state(g.state_name(q));
  for (EventId e = 0; e < g.alphabet().size(); ++e) b.add_event(g.alphabet().name(e), g.alphabet().observable(e));
  for (const auto& tr : g.transitions())
    b.transition(g.state_name(tr.from), g.alphabet().name(tr.event), g.state_name(tr.to));
  for (StateId q : g.initial()) b.initial(g.state_name(q));
  for (StateId q : g.marked()) b.marked(g.state_name(q));
  return b;
}

inline std::string fresh_state_name(const Nfa& g, const std::string& base) {
  std::string name = base;
  while (g.find_state(name)) name += "'";
  return name;
}

inline NetworkInstance gen_dfa_intersection(const std::vector<Nfa>& dfas, IntersectionVariant variant) {
  if (dfas.empty()) throw ValidationError("DFA intersection needs at least one automaton");
  std::vector<Nfa> components;
  StateTuple critical;
  for (std::size_t i = 0; i < dfas.size(); ++i) {
    const Nfa& a = dfas[i];
    const auto& alpha = a.alphabet();
    if (alpha.size() != 2 || !alpha.find("0") || !alpha.find("1") || !alpha.observable(alpha.id("0")) ||
        !alpha.observable(alpha.id("1"))) {
      throw ValidationError("DFA " + std::to_string(i) + " is not over the observable alphabet {0,1}");
    }
    if (!is_total_dfa(a)) throw ValidationError("DFA " + std::to_string(i) + " is not a total DFA");
    NfaBuilder b = builder_from(a);
    const std::string sink = fresh_state_name(a, "s" + std::to_string(i + 1));
    b.add_state(sink);
    std::string event = "1";
    if (variant == IntersectionVariant::UnobservableU) {
      event = "u";
      b.add_event("u", false);
    }
    for (StateId p : a.marked()) b.transition(a.state_name(p), event, sink);
    Nfa g = b.build();
    critical.push_back(g.state_id(sink));
    components.push_back(std::move(g));
  }
  Network net(std::move(components));
  TupleCriticalSet c(net.size(), {critical});
  return {std::move(net), std::move(c)};
}

/// Is the intersection of the marked languages nonempty? Explicit product
/// search over tuples of states, all components reading the same word.
inline bool marked_intersection_nonempty(const std::vector<Nfa>& automata) {
  if (automata.empty()) return false;
  const EventAlphabet& alpha = automata.front().alphabet();
  for (const auto& g : automata) {
    if (g.alphabet().names() != alpha.names()) {
      throw ValidationError("intersection oracle needs identical alphabets");
    }
  }
  std::set<StateTuple> seen;
  std::vector<StateTuple> stack;
  std::function<void(std::size_t, StateTuple&)> seed = [&](std::size_t i, StateTuple& t) {
    if (i == automata.size()) {
      if (seen.insert(t).second) stack.push_back(t);
      return;
    }
    for (StateId q : automata[i].initial()) {
      t.push_back(q);
      seed(i + 1, t);
      t.pop_back();
    }
  };
  StateTuple scratch;
  seed(0, scratch);
  while (!stack.empty()) {
    StateTuple t = stack.back();
    stack.pop_back();
    bool all_marked = true;
    for (std::size_t i = 0; i < t.size(); ++i) all_marked = all_marked && automata[i].marked().contains(t[i]);
    if (all_marked) return true;
    for (EventId e = 0; e < alpha.size(); ++e) {
      std::vector<StateTuple> layer{StateTuple{}};
      for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<StateTuple> grown;
        for (const auto& prefix : layer)
          for (StateId r : automata[i].successors(t[i], e)) {
            grown.push_back(prefix);
            grown.back().push_back(r);
          }
        layer = std::move(grown);
      }
      for (auto& next : layer)
        if (seen.insert(next).second) stack.push_back(std::move(next));
    }
  }
  return false;
}

inline NetworkInstance gen_unary_intersection(const std::vector<Nfa>& nfas) {
  if (nfas.empty()) throw ValidationError("unary intersection needs at least one automaton");
  const std::string event = nfas.front().alphabet().size() == 1 ? nfas.front().alphabet().name(0) : "";
  std::vector<Nfa> components;
  StateTuple critical;
  for (std::size_t i = 0; i < nfas.size(); ++i) {
    const Nfa& a = nfas[i];
    if (a.alphabet().size() != 1 || a.alphabet().name(0) != event || !a.alphabet().observable(0)) {
      throw ValidationError("automaton " + std::to_string(i) + " is not over the shared unary alphabet");
    }
    NfaBuilder b = builder_from(a);
    const std::string s = fresh_state_name(a, "s" + std::to_string(i + 1));
    const std::string t = fresh_state_name(a, "t" + std::to_string(i + 1));
    b.add_state(s);
    b.add_state(t);
    for (StateId p : a.marked()) {
      b.transition(a.state_name(p), event, s);
      b.transition(a.state_name(p), event, t);
    }
    Nfa g = b.build();
    critical.push_back(g.state_id(s));
    components.push_back(std::move(g));
  }
  Network net(std::move(components));
  TupleCriticalSet c(net.size(), {critical});
  return {std::move(net), std::move(c)};
}

// ---------------------------------------------------------------------------
// Petri net constructions

struct PetriInstance {
  LabeledPetriNet net;
  CriticalMarkingSet critical;
};

inline std::string fresh_net_name(const PetriNet& n, std::string base) {
  while (n.find_place(base) || n.find_transition(base)) base += "'";
  return base;
}

/// Adds an unobservable token generator t' -> p'. Every original transition
/// is labeled by its own name; C = {target x (0)}.
inline PetriInstance gen_reachability_petri(const PetriNet& n, const Marking& m0, const Marking& target) {
  require_dimension(n, m0);
  require_dimension(n, target);
  std::vector<std::string> places = n.place_names();
  std::vector<std::string> transitions = n.transition_names();
  places.push_back(fresh_net_name(n, "p'"));
  transitions.push_back(fresh_net_name(n, "t'"));
  ArcMatrix pre = n.pre_matrix();
  ArcMatrix post = n.post_matrix();
  for (auto& row : pre) row.push_back(0);
  for (auto& row : post) row.push_back(0);
  pre.push_back(std::vector<Token>(transitions.size(), 0));
  post.push_back(std::vector<Token>(transitions.size(), 0));
  post.back().back() = 1;

  std::vector<std::string> alphabet = n.transition_names();
  std::vector<std::optional<LabelId>> labels;
  for (LabelId t = 0; t < n.num_transitions(); ++t) labels.emplace_back(t);
  labels.emplace_back(std::nullopt);

  Marking initial = m0;
  initial.push_back(0);
  Marking critical = target;
  critical.push_back(0);
  return {LabeledPetriNet(PetriNet(std::move(places), std::move(transitions), std::move(pre), std::move(post)),
                          std::move(initial), std::move(alphabet), std::move(labels)),
          CriticalMarkingSet(CriticalMarkingSet::Mode::Finite, {std::move(critical)})};
}

/// Is `target` reachable from `m0`? nullopt when exploration hit a limit
/// before finding it.
inline std::optional<bool> petri_reachable(const PetriNet& n, const Marking& m0, const Marking& target,
                                           const ExploreLimits& limits = {}) {
  require_dimension(n, target);
  ExploreOptions options;
  options.record_edges = false;
  Exploration ex = explore(n, m0, limits, [&](const Marking& m) { return m == target; }, options);
  if (ex.stopped_at) return true;
  if (ex.exhaustive) return false;
  return std::nullopt;
}

/// Reachable markings of a bounded net; throws ResourceError if the limits
/// stop the exploration.
inline std::vector<Marking> reachable_markings(const PetriNet& n, const Marking& m0,
                                               const ExploreLimits& limits = {}) {
  ExploreOptions options;
  options.record_edges = false;
  Exploration ex = explore(n, m0, limits, options);
  if (!ex.exhaustive) throw ResourceError("reachability set is not finite within the exploration limits");
  return std::move(ex.markings);
}

/// Critical set of the marking-inclusion construction,
///   C = {0}^r x (0,0,1)  u  R(B) x (1,0,0)  u  R(B) x (0,1,0),
/// kept symbolic because R(B) is infinite in general.
struct MarkingInclusionCritical {
  std::size_t places = 0;  // r
  PetriNet b;
  Marking b_initial;

  /// Finite list form; requires B to be bounded within `limits`.
  [[nodiscard]] CriticalMarkingSet materialize(const ExploreLimits& limits = {}) const {
    std::vector<Marking> out;
    Marking start(places + 3, 0);
    start[places + 2] = 1;
    out.push_back(start);
    for (const auto& m : reachable_markings(b, b_initial, limits)) {
      for (std::size_t gate : {places, places + 1}) {
        Marking full = m;
        full.resize(places + 3, 0);
        full[gate] = 1;
        out.push_back(std::move(full));
      }
    }
    return CriticalMarkingSet(CriticalMarkingSet::Mode::Finite, std::move(out));
  }
};

struct MarkingInclusionInstance {
  LabeledPetriNet net;
  MarkingInclusionCritical critical;
};

/// Composes A and B over shared places p1..pr with three control places:
/// a token in p_{r+3} is moved by unobservable t1 into p_{r+1} (also loading
/// A's initial marking) or by unobservable t2 into p_{r+2} (loading B's).
/// Every A transition reads p_{r+1} through a consume-restore self-loop, every
/// B transition reads p_{r+2}, and p_{r+2} carries one self-loop per label of
/// A so that B's side can mimic any observation of A's side.
inline MarkingInclusionInstance gen_marking_inclusion(const LabeledPetriNet& a, const LabeledPetriNet& b) {
  const std::size_t r = a.net().num_places();
  if (b.net().num_places() != r) {
    throw ValidationError("marking inclusion: nets have " + std::to_string(r) + " and " +
                          std::to_string(b.net().num_places()) + " places");
  }
  const PetriNet& na = a.net();

  std::vector<std::string> places = na.place_names();
  std::unordered_set<std::string> taken(places.begin(), places.end());
  auto fresh = [&](std::string base) {
    while (taken.contains(base)) base += "'";
    taken.insert(base);
    return base;
  };
  places.push_back(fresh("p" + std::to_string(r + 1)));
  places.push_back(fresh("p" + std::to_string(r + 2)));
  places.push_back(fresh("p" + std::to_string(r + 3)));
  const PlaceId gate_a = static_cast<PlaceId>(r);
  const PlaceId gate_b = static_cast<PlaceId>(r + 1);
  const PlaceId start = static_cast<PlaceId>(r + 2);

  // Labels: union of both alphabets, A's first.
  std::vector<std::string> alphabet = a.alphabet();
  for (const auto& l : b.alphabet())
    if (std::find(alphabet.begin(), alphabet.end(), l) == alphabet.end()) alphabet.push_back(l);
  auto label_id = [&](const std::string& l) {
    return static_cast<LabelId>(std::find(alphabet.begin(), alphabet.end(), l) - alphabet.begin());
  };

  struct Column {
    std::string name;
    std::vector<Token> pre;
    std::vector<Token> post;
    std::optional<LabelId> label;
  };
  std::vector<Column> columns;
  auto blank = [&](std::string name, std::optional<LabelId> label) {
    return Column{fresh(std::move(name)), std::vector<Token>(r + 3, 0), std::vector<Token>(r + 3, 0), label};
  };

  Column t1 = blank("t1", std::nullopt);
  t1.pre[start] = 1;
  t1.post[gate_a] = 1;
  for (std::size_t p = 0; p < r; ++p) t1.post[p] = a.initial()[p];
  columns.push_back(std::move(t1));
  Column t2 = blank("t2", std::nullopt);
  t2.pre[start] = 1;
  t2.post[gate_b] = 1;
  for (std::size_t p = 0; p < r; ++p) t2.post[p] = b.initial()[p];
  columns.push_back(std::move(t2));

  auto copy_net = [&](const LabeledPetriNet& src, const std::string& prefix, PlaceId gate) {
    for (TransitionId t = 0; t < src.net().num_transitions(); ++t) {
      std::optional<LabelId> label;
      if (auto l = src.label(t)) label = label_id(src.alphabet()[*l]);
      Column col = blank(prefix + src.net().transition_name(t), label);
      for (const auto& arc : src.net().arcs(t)) {
        col.pre[arc.place] = arc.pre;
        col.post[arc.place] = arc.post;
      }
      col.pre[gate] = 1;
      col.post[gate] = 1;
      columns.push_back(std::move(col));
    }
  };
  copy_net(a, "A.", gate_a);
  copy_net(b, "B.", gate_b);
  for (std::size_t i = 0; i < a.alphabet().size(); ++i) {
    Column s = blank("s" + std::to_string(i + 1), label_id(a.alphabet()[i]));
    s.pre[gate_b] = 1;
    s.post[gate_b] = 1;
    columns.push_back(std::move(s));
  }

  std::vector<std::string> transitions;
  ArcMatrix pre(r + 3);
  ArcMatrix post(r + 3);
  std::vector<std::optional<LabelId>> labels;
  for (const auto& col : columns) {
    transitions.push_back(col.name);
    labels.push_back(col.label);
    for (std::size_t p = 0; p < r + 3; ++p) {
      pre[p].push_back(col.pre[p]);
      post[p].push_back(col.post[p]);
    }
  }
  Marking initial(r + 3, 0);
  initial[start] = 1;
  return {LabeledPetriNet(PetriNet(std::move(places), std::move(transitions), std::move(pre), std::move(post)),
                          std::move(initial), std::move(alphabet), std::move(labels)),
          MarkingInclusionCritical{r, b.net(), b.initial()}};
}

inline MarkingInclusionInstance gen_marking_inclusion(const PetriNet& a, const Marking& a0, const PetriNet& b,
                                                      const Marking& b0) {
  return gen_marking_inclusion(identity_labeled(a, a0), identity_labeled(b, b0));
}

/// R(A) subset of R(B), both explored exhaustively.
inline bool marking_inclusion_holds(const PetriNet& a, const Marking& a0, const PetriNet& b, const Marking& b0,
                                    const ExploreLimits& limits = {}) {
  auto ra = reachable_markings(a, a0, limits);
  auto rb = reachable_markings(b, b0, limits);
  std::set<Marking> in_b(rb.begin(), rb.end());
  return std::all_of(ra.begin(), ra.end(), [&](const Marking& m) { return in_b.contains(m); });
}

}  // namespace critobs
