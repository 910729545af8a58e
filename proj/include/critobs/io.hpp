#pragma once

// JSON encodings of models, critical sets and witnesses.
//
// Parse errors are ValidationErrors whose message starts with the JSON
// pointer of the offending value, e.g. "/transitions/3/2: unknown state 'x'".

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "critobs/automaton.hpp"
#include "critobs/error.hpp"
#include "critobs/network.hpp"
#include "critobs/nfa_check.hpp"
#include "critobs/petri.hpp"
#include "critobs/petri_check.hpp"

namespace critobs::io {

using Json = nlohmann::json;

namespace detail {

inline ValidationError at(const std::string& pointer, const std::string& message) {
  return ValidationError((pointer.empty() ? "/" : pointer) + ": " + message);
}

inline const Json& field(const Json& obj, const std::string& pointer, const char* key) {
  if (!obj.is_object()) throw at(pointer, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw at(pointer, std::string("missing field '") + key + "'");
  return *it;
}

inline const Json& array(const Json& j, const std::string& pointer) {
  if (!j.is_array()) throw at(pointer, "expected an array");
  return j;
}

inline std::string string(const Json& j, const std::string& pointer) {
  if (!j.is_string()) throw at(pointer, "expected a string");
  return j.get<std::string>();
}

inline Token natural(const Json& j, const std::string& pointer) {
  if (!j.is_number_integer()) throw at(pointer, "expected a non-negative integer");
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  auto v = j.get<std::int64_t>();
  if (v < 0) throw at(pointer, "expected a non-negative integer");
  return static_cast<Token>(v);
}

inline std::string ptr(const std::string& base, const std::string& key) { return base + "/" + key; }
inline std::string ptr(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

}  // namespace detail

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": byte " + std::to_string(e.byte) + ": malformed JSON");
  }
}

// ---------------------------------------------------------------------------
// Automata

inline Nfa automaton_from_json(const Json& j, const std::string& base = "") {
  using namespace detail;
  std::vector<std::string> states;
  const Json& js = array(field(j, base, "states"), ptr(base, "states"));
  for (std::size_t i = 0; i < js.size(); ++i) states.push_back(string(js[i], ptr(ptr(base, "states"), i)));

  std::vector<std::string> events;
  std::vector<bool> observable;
  const Json& je = array(field(j, base, "events"), ptr(base, "events"));
  if (je.empty()) throw at(ptr(base, "events"), "event list is empty");
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string p = ptr(ptr(base, "events"), i);
    events.push_back(string(field(je[i], p, "name"), ptr(p, "name")));
    const Json& obs = field(je[i], p, "observable");
    if (!obs.is_boolean()) throw at(ptr(p, "observable"), "expected a boolean");
    observable.push_back(obs.get<bool>());
  }

  std::unordered_map<std::string, StateId> state_index;
  for (StateId q = 0; q < states.size(); ++q) {
    if (!state_index.emplace(states[q], q).second) {
      throw at(ptr(ptr(base, "states"), q), "duplicate state '" + states[q] + "'");
    }
  }
  std::unordered_map<std::string, EventId> event_index;
  for (EventId e = 0; e < events.size(); ++e) {
    if (!event_index.emplace(events[e], e).second) {
      throw at(ptr(ptr(base, "events"), e), "duplicate event '" + events[e] + "'");
    }
  }
  auto state = [&](const Json& v, const std::string& p) {
    auto name = string(v, p);
    auto it = state_index.find(name);
    if (it == state_index.end()) throw at(p, "unknown state '" + name + "'");
    return it->second;
  };

  std::vector<Transition> transitions;
  const Json& jt = array(field(j, base, "transitions"), ptr(base, "transitions"));
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const std::string p = ptr(ptr(base, "transitions"), i);
    if (!jt[i].is_array() || jt[i].size() != 3) throw at(p, "expected [source, event, target]");
    auto ev = string(jt[i][1], ptr(p, 1));
    auto e = event_index.find(ev);
    if (e == event_index.end()) throw at(ptr(p, 1), "unknown event '" + ev + "'");
    transitions.push_back({state(jt[i][0], ptr(p, 0)), e->second, state(jt[i][2], ptr(p, 2))});
  }

  auto state_list = [&](const char* key, bool required) {
    std::vector<StateId> out;
    if (!required && !j.contains(key)) return out;
    const Json& arr = array(field(j, base, key), ptr(base, key));
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(state(arr[i], ptr(ptr(base, key), i)));
    return out;
  };
  auto initial = state_list("initial", true);
  if (initial.empty()) throw at(ptr(base, "initial"), "initial state list is empty");
  auto marked = state_list("marked", false);
  return Nfa(std::move(states), EventAlphabet(std::move(events), std::move(observable)),
             std::move(transitions), StateSet(std::move(initial)), StateSet(std::move(marked)));
}

inline Json to_json(const Nfa& g) {
  Json j;
  j["states"] = g.state_names();
  j["events"] = Json::array();
  for (EventId e = 0; e < g.alphabet().size(); ++e) {
    j["events"].push_back({{"name", g.alphabet().name(e)}, {"observable", g.alphabet().observable(e)}});
  }
  j["transitions"] = Json::array();
  for (const auto& tr : g.transitions()) {
    j["transitions"].push_back({g.state_name(tr.from), g.alphabet().name(tr.event), g.state_name(tr.to)});
  }
  j["initial"] = Json::array();
  for (StateId q : g.initial()) j["initial"].push_back(g.state_name(q));
  j["marked"] = Json::array();
  for (StateId q : g.marked()) j["marked"].push_back(g.state_name(q));
  return j;
}

/// { "states": [names] }
inline StateSet critical_states_from_json(const Json& j, const Nfa& g) {
  using namespace detail;
  const Json& arr = array(field(j, "", "states"), "/states");
  std::vector<StateId> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto name = string(arr[i], ptr("/states", i));
    auto q = g.find_state(name);
    if (!q) throw at(ptr("/states", i), "unknown state '" + name + "'");
    out.push_back(*q);
  }
  return StateSet(std::move(out));
}

inline Json critical_states_to_json(const StateSet& c, const Nfa& g) {
  Json arr = Json::array();
  for (StateId q : c) arr.push_back(g.state_name(q));
  return {{"states", arr}};
}

// ---------------------------------------------------------------------------
// Networks

/// { "components": [automaton object | path relative to `dir`] }
inline Network network_from_json(const Json& j, const std::filesystem::path& dir = {}) {
  using namespace detail;
  const Json& arr = array(field(j, "", "components"), "/components");
  if (arr.empty()) throw at("/components", "network has no components");
  std::vector<Nfa> components;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = ptr("/components", i);
    if (arr[i].is_string()) {
      auto file = dir / arr[i].get<std::string>();
      try {
        components.push_back(automaton_from_json(read_json_file(file)));
      } catch (const ValidationError& e) {
        throw at(p, file.string() + ": " + e.what());
      }
    } else {
      components.push_back(automaton_from_json(arr[i], p));
    }
  }
  try {
    return Network(std::move(components));
  } catch (const ValidationError& e) {
    throw at("/components", e.what());
  }
}

inline Json to_json(const Network& net) {
  Json arr = Json::array();
  for (const auto& g : net.components()) arr.push_back(to_json(g));
  return {{"components", arr}};
}

inline StateTuple tuple_from_json(const Json& j, const Network& net, const std::string& p) {
  using namespace detail;
  const Json& arr = array(j, p);
  if (arr.size() != net.size()) {
    throw at(p, "tuple has " + std::to_string(arr.size()) + " entries, network has " +
                    std::to_string(net.size()) + " components");
  }
  StateTuple t;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto name = string(arr[i], ptr(p, i));
    auto q = net.component(i).find_state(name);
    if (!q) throw at(ptr(p, i), "unknown state '" + name + "' of component " + std::to_string(i));
    t.push_back(*q);
  }
  return t;
}

inline Json tuple_to_json(const StateTuple& t, const Network& net) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < t.size(); ++i) arr.push_back(net.component(i).state_name(t[i]));
  return arr;
}

/// { "tuples": [[name, ...]], "product": [{ "<component index>": [names] }] }
inline TupleCriticalSet critical_tuples_from_json(const Json& j, const Network& net) {
  using namespace detail;
  if (!j.is_object()) throw at("/", "expected an object");
  std::vector<StateTuple> tuples;
  if (j.contains("tuples")) {
    const Json& arr = array(j["tuples"], "/tuples");
    for (std::size_t i = 0; i < arr.size(); ++i) tuples.push_back(tuple_from_json(arr[i], net, ptr("/tuples", i)));
  }
  std::vector<TupleCriticalSet::ProductTerm> products;
  if (j.contains("product")) {
    const Json& arr = array(j["product"], "/product");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string p = ptr("/product", k);
      if (!arr[k].is_object()) throw at(p, "expected an object mapping component index to states");
      TupleCriticalSet::ProductTerm term(net.size());
      for (const auto& [key, names] : arr[k].items()) {
        std::size_t idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoul(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw at(ptr(p, key), "component index is not a number");
        }
        if (idx >= net.size()) throw at(ptr(p, key), "component index out of range");
        std::vector<StateId> allowed;
        const Json& list = array(names, ptr(p, key));
        for (std::size_t i = 0; i < list.size(); ++i) {
          auto name = string(list[i], ptr(ptr(p, key), i));
          auto q = net.component(idx).find_state(name);
          if (!q) throw at(ptr(ptr(p, key), i), "unknown state '" + name + "'");
          allowed.push_back(*q);
        }
        term[idx] = StateSet(std::move(allowed));
      }
      products.push_back(std::move(term));
    }
  }
  return TupleCriticalSet(net.size(), std::move(tuples), std::move(products));
}

inline Json critical_tuples_to_json(const TupleCriticalSet& c, const Network& net) {
  Json j;
  j["tuples"] = Json::array();
  for (const auto& t : c.tuples()) j["tuples"].push_back(tuple_to_json(t, net));
  if (!c.products().empty()) {
    j["product"] = Json::array();
    for (const auto& term : c.products()) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < term.size(); ++i) {
        if (!term[i]) continue;
        Json names = Json::array();
        for (StateId q : *term[i]) names.push_back(net.component(i).state_name(q));
        obj[std::to_string(i)] = names;
      }
      j["product"].push_back(obj);
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// Petri nets

inline Marking marking_from_json(const Json& j, const std::string& p) {
  using namespace detail;
  const Json& arr = array(j, p);
  Marking m;
  for (std::size_t i = 0; i < arr.size(); ++i) m.push_back(natural(arr[i], ptr(p, i)));
  return m;
}

inline LabeledPetriNet petri_from_json(const Json& j) {
  using namespace detail;
  std::vector<std::string> places;
  const Json& jp = array(field(j, "", "places"), "/places");
  for (std::size_t i = 0; i < jp.size(); ++i) places.push_back(string(jp[i], ptr("/places", i)));

  std::vector<std::string> alphabet;
  if (j.contains("alphabet")) {
    const Json& ja = array(j["alphabet"], "/alphabet");
    for (std::size_t i = 0; i < ja.size(); ++i) alphabet.push_back(string(ja[i], ptr("/alphabet", i)));
  }
  auto label_of = [&](const std::string& l) -> std::optional<LabelId> {
    auto it = std::find(alphabet.begin(), alphabet.end(), l);
    if (it == alphabet.end()) return std::nullopt;
    return static_cast<LabelId>(it - alphabet.begin());
  };

  std::vector<std::string> transitions;
  std::vector<std::optional<LabelId>> labels;
  const Json& jt = array(field(j, "", "transitions"), "/transitions");
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const std::string p = ptr("/transitions", i);
    transitions.push_back(string(field(jt[i], p, "name"), ptr(p, "name")));
    const Json& label = field(jt[i], p, "label");
    if (label.is_null()) {
      labels.emplace_back(std::nullopt);
    } else {
      auto l = string(label, ptr(p, "label"));
      auto id = label_of(l);
      if (!id) throw at(ptr(p, "label"), "label '" + l + "' is not in the alphabet");
      labels.push_back(id);
    }
  }

  auto matrix = [&](const char* key) {
    const Json& rows = array(field(j, "", key), ptr("", key));
    if (rows.size() != places.size()) {
      throw at(ptr("", key), "has " + std::to_string(rows.size()) + " rows, expected one per place (" +
                                 std::to_string(places.size()) + ")");
    }
    ArcMatrix m;
    for (std::size_t p = 0; p < rows.size(); ++p) {
      const std::string rp = ptr(ptr("", key), p);
      const Json& row = array(rows[p], rp);
      if (row.size() != transitions.size()) {
        throw at(rp, "has " + std::to_string(row.size()) + " entries, expected one per transition (" +
                         std::to_string(transitions.size()) + ")");
      }
      std::vector<Token> values;
      for (std::size_t t = 0; t < row.size(); ++t) values.push_back(natural(row[t], ptr(rp, t)));
      m.push_back(std::move(values));
    }
    return m;
  };
  ArcMatrix pre = matrix("pre");
  ArcMatrix post = matrix("post");
  Marking initial = marking_from_json(field(j, "", "initial"), "/initial");
  if (initial.size() != places.size()) throw at("/initial", "marking length differs from the place count");
  try {
    return LabeledPetriNet(PetriNet(std::move(places), std::move(transitions), std::move(pre), std::move(post)),
                           std::move(initial), std::move(alphabet), std::move(labels));
  } catch (const ValidationError& e) {
    throw at("/", e.what());
  }
}

inline Json to_json(const LabeledPetriNet& g) {
  const PetriNet& n = g.net();
  Json j;
  j["places"] = n.place_names();
  j["transitions"] = Json::array();
  for (TransitionId t = 0; t < n.num_transitions(); ++t) {
    Json label = nullptr;
    if (auto l = g.label(t)) label = g.alphabet()[*l];
    j["transitions"].push_back({{"name", n.transition_name(t)}, {"label", label}});
  }
  j["pre"] = n.pre_matrix();
  j["post"] = n.post_matrix();
  j["initial"] = g.initial();
  j["alphabet"] = g.alphabet();
  return j;
}

/// { "mode": "finite" | "cofinite", "markings": [[int, ...]] }
inline CriticalMarkingSet critical_markings_from_json(const Json& j, const LabeledPetriNet& g) {
  using namespace detail;
  auto mode_text = string(field(j, "", "mode"), "/mode");
  CriticalMarkingSet::Mode mode;
  if (mode_text == "finite") {
    mode = CriticalMarkingSet::Mode::Finite;
  } else if (mode_text == "cofinite") {
    mode = CriticalMarkingSet::Mode::CoFinite;
  } else {
    throw at("/mode", "expected \"finite\" or \"cofinite\"");
  }
  const Json& arr = array(field(j, "", "markings"), "/markings");
  std::vector<Marking> markings;
  std::set<Marking> distinct;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Marking m = marking_from_json(arr[i], ptr("/markings", i));
    if (m.size() != g.net().num_places()) throw at(ptr("/markings", i), "marking length differs from the place count");
    if (!distinct.insert(m).second) throw at(ptr("/markings", i), "duplicate marking");
    markings.push_back(std::move(m));
  }
  return CriticalMarkingSet(mode, std::move(markings));
}

inline Json to_json(const CriticalMarkingSet& c) {
  return {{"mode", c.mode() == CriticalMarkingSet::Mode::Finite ? "finite" : "cofinite"},
          {"markings", c.markings()}};
}

// ---------------------------------------------------------------------------
// Witnesses: { "kind", "observation", "run1", "run2", "end1", "end2" }

inline Json witness_to_json(const NfaWitness& w, const Nfa& g) {
  auto run = [&](const std::vector<Transition>& steps) {
    Json arr = Json::array();
    for (const auto& tr : steps)
      arr.push_back({g.state_name(tr.from), g.alphabet().name(tr.event), g.state_name(tr.to)});
    return arr;
  };
  return {{"kind", "nfa"},
          {"observation", event_names(w.observation, g.alphabet())},
          {"run1", run(w.run1)},
          {"run2", run(w.run2)},
          {"end1", g.state_name(w.end1)},
          {"end2", g.state_name(w.end2)}};
}

inline NfaWitness nfa_witness_from_json(const Json& j, const Nfa& g) {
  using namespace detail;
  auto state = [&](const Json& v, const std::string& p) {
    auto name = string(v, p);
    auto q = g.find_state(name);
    if (!q) throw at(p, "unknown state '" + name + "'");
    return *q;
  };
  auto event = [&](const Json& v, const std::string& p) {
    auto name = string(v, p);
    auto e = g.alphabet().find(name);
    if (!e) throw at(p, "unknown event '" + name + "'");
    return *e;
  };
  NfaWitness w;
  const Json& obs = array(field(j, "", "observation"), "/observation");
  for (std::size_t i = 0; i < obs.size(); ++i) w.observation.push_back(event(obs[i], ptr("/observation", i)));
  for (const char* key : {"run1", "run2"}) {
    const Json& arr = array(field(j, "", key), ptr("", key));
    auto& run = std::string(key) == "run1" ? w.run1 : w.run2;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = ptr(ptr("", key), i);
      if (!arr[i].is_array() || arr[i].size() != 3) throw at(p, "expected [source, event, target]");
      run.push_back({state(arr[i][0], ptr(p, 0)), event(arr[i][1], ptr(p, 1)), state(arr[i][2], ptr(p, 2))});
    }
  }
  w.end1 = state(field(j, "", "end1"), "/end1");
  w.end2 = state(field(j, "", "end2"), "/end2");
  return w;
}

inline Json witness_to_json(const NetworkWitness& w, const Network& net) {
  auto run = [&](const std::vector<NetworkStep>& steps) {
    Json arr = Json::array();
    for (const auto& st : steps)
      arr.push_back({tuple_to_json(st.from, net), net.alphabet().name(st.event), tuple_to_json(st.to, net)});
    return arr;
  };
  return {{"kind", "network"},
          {"observation", event_names(w.observation, net.alphabet())},
          {"run1", run(w.run1)},
          {"run2", run(w.run2)},
          {"end1", tuple_to_json(w.end1, net)},
          {"end2", tuple_to_json(w.end2, net)}};
}

inline NetworkWitness network_witness_from_json(const Json& j, const Network& net) {
  using namespace detail;
  auto event = [&](const Json& v, const std::string& p) {
    auto name = string(v, p);
    auto e = net.alphabet().find(name);
    if (!e) throw at(p, "unknown event '" + name + "'");
    return *e;
  };
  NetworkWitness w;
  const Json& obs = array(field(j, "", "observation"), "/observation");
  for (std::size_t i = 0; i < obs.size(); ++i) w.observation.push_back(event(obs[i], ptr("/observation", i)));
  for (const char* key : {"run1", "run2"}) {
    const Json& arr = array(field(j, "", key), ptr("", key));
    auto& run = std::string(key) == "run1" ? w.run1 : w.run2;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = ptr(ptr("", key), i);
      if (!arr[i].is_array() || arr[i].size() != 3) throw at(p, "expected [source tuple, event, target tuple]");
      run.push_back({tuple_from_json(arr[i][0], net, ptr(p, 0)), event(arr[i][1], ptr(p, 1)),
                     tuple_from_json(arr[i][2], net, ptr(p, 2))});
    }
  }
  w.end1 = tuple_from_json(field(j, "", "end1"), net, "/end1");
  w.end2 = tuple_from_json(field(j, "", "end2"), net, "/end2");
  return w;
}

inline Json witness_to_json(const PetriWitness& w, const LabeledPetriNet& g) {
  auto run = [&](const std::vector<TransitionId>& steps) {
    Json arr = Json::array();
    for (TransitionId t : steps) arr.push_back(g.net().transition_name(t));
    return arr;
  };
  Json obs = Json::array();
  for (LabelId l : w.observation) obs.push_back(g.alphabet()[l]);
  return {{"kind", "petri"}, {"observation", obs}, {"run1", run(w.run1)},
          {"run2", run(w.run2)}, {"end1", w.end1},      {"end2", w.end2}};
}

inline PetriWitness petri_witness_from_json(const Json& j, const LabeledPetriNet& g) {
  using namespace detail;
  PetriWitness w;
  const Json& obs = array(field(j, "", "observation"), "/observation");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    auto name = string(obs[i], ptr("/observation", i));
    auto l = g.find_label(name);
    if (!l) throw at(ptr("/observation", i), "unknown label '" + name + "'");
    w.observation.push_back(*l);
  }
  for (const char* key : {"run1", "run2"}) {
    const Json& arr = array(field(j, "", key), ptr("", key));
    auto& run = std::string(key) == "run1" ? w.run1 : w.run2;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      auto name = string(arr[i], ptr(ptr("", key), i));
      auto t = g.net().find_transition(name);
      if (!t) throw at(ptr(ptr("", key), i), "unknown transition '" + name + "'");
      run.push_back(*t);
    }
  }
  w.end1 = marking_from_json(field(j, "", "end1"), "/end1");
  w.end2 = marking_from_json(field(j, "", "end2"), "/end2");
  return w;
}

}  // namespace critobs::io
