#pragma once

// Command-line front end. `run` parses arguments, performs one command and
// returns the process exit code; all output goes to the two given streams.
//
// Exit codes: 0 critically observable / witness valid, 1 not critically
// observable / witness invalid, 2 unknown, 64 usage, 65 malformed input,
// 66 unreadable input, 69 resource limit, 70 internal error, 73 output not
// writable.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "critobs/automaton.hpp"
#include "critobs/compose.hpp"
#include "critobs/error.hpp"
#include "critobs/io.hpp"
#include "critobs/network.hpp"
#include "critobs/nfa_check.hpp"
#include "critobs/petri.hpp"
#include "critobs/petri_check.hpp"
#include "critobs/random.hpp"
#include "critobs/reductions.hpp"

namespace critobs::cli {

using Json = nlohmann::json;

enum ExitCode : int {
  kObservable = 0,
  kNotObservable = 1,
  kUnknown = 2,
  kUsage = 64,
  kDataError = 65,
  kNoInput = 66,
  kUnavailable = 69,
  kSoftware = 70,
  kCantCreate = 73,
};

inline int exit_code(Outcome o) {
  switch (o) {
    case Outcome::CriticallyObservable: return kObservable;
    case Outcome::NotCriticallyObservable: return kNotObservable;
    case Outcome::Unknown: return kUnknown;
  }
  return kSoftware;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

struct NoInput : Error {
  using Error::Error;
};
struct CantCreate : Error {
  using Error::Error;
};

/// Raw file with its digest; `blank` when it holds only whitespace.
struct Input {
  std::string path;
  std::string text;
  std::string digest;
  bool blank = false;
  Json json;

  [[nodiscard]] Json describe() const { return {{"path", path}, {"fnv1a64", digest}}; }
};

inline Input load(const std::string& path, bool allow_blank = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NoInput(path + ": cannot open file");
  Input input;
  input.path = path;
  input.text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  input.digest = hex64(fnv1a64(input.text));
  input.blank = input.text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (input.blank && allow_blank) return input;
  try {
    input.json = Json::parse(input.text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": byte " + std::to_string(e.byte) + ": malformed JSON");
  }
  return input;
}

/// Runs `f`, prefixing any ValidationError with the file path.
template <typename F>
auto in_file(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CantCreate(path.string() + ": cannot write file");
  out << text;
  if (!out) throw CantCreate(path.string() + ": write failed");
}

inline Json stats_json(const SearchStats& s, double wall_ms) {
  return {{"explored", s.explored}, {"peak_frontier", s.peak_frontier}, {"depth", s.depth}, {"wall_time_ms", wall_ms}};
}

// Text rendering of a witness in its JSON form.
inline std::string render_item(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    std::string s = "(";
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? "," : "") + render_item(j[i]);
    return s + ")";
  }
  return j.dump();
}

inline std::string render_run(const Json& run) {
  if (run.empty()) return "(empty)";
  std::string s;
  if (run[0].is_array()) {
    s = render_item(run[0][0]);
    for (const auto& step : run) s += " -" + render_item(step[1]) + "-> " + render_item(step[2]);
    return s;
  }
  for (std::size_t i = 0; i < run.size(); ++i) s += (i ? " " : "") + render_item(run[i]);
  return s;
}

inline void print_text_report(std::ostream& out, const Json& report) {
  out << "verdict: " << report["verdict"].get<std::string>() << "\n";
  if (report.contains("witness") && !report["witness"].is_null()) {
    const Json& w = report["witness"];
    std::string obs;
    for (std::size_t i = 0; i < w["observation"].size(); ++i) obs += (i ? " " : "") + render_item(w["observation"][i]);
    out << "observation: " << (obs.empty() ? "(empty)" : obs) << "\n";
    out << "run1: " << render_run(w["run1"]) << "\n";
    out << "run2: " << render_run(w["run2"]) << "\n";
    out << "end1 (critical): " << render_item(w["end1"]) << "\n";
    out << "end2 (not critical): " << render_item(w["end2"]) << "\n";
  }
  if (report.contains("unary")) {
    const Json& u = report["unary"];
    out << "scan bound: " << u["scan_bound"].get<std::uint64_t>() << "\n";
    for (std::size_t i = 0; i < u["components"].size(); ++i) {
      out << "component " << i << ": tail " << u["components"][i]["tail"].get<std::uint64_t>() << ", period "
          << u["components"][i]["period"].get<std::uint64_t>() << "\n";
    }
  }
  if (report.contains("limit_hit")) {
    out << "exhaustive: " << (report["exhaustive"].get<bool>() ? "yes" : "no") << "\n";
    out << "limit hit: " << report["limit_hit"].get<std::string>() << "\n";
  }
  const Json& s = report["statistics"];
  out << "explored: " << s["explored"].get<std::uint64_t>() << "\n";
  out << "peak frontier: " << s["peak_frontier"].get<std::uint64_t>() << "\n";
  out << "depth: " << s["depth"].get<std::uint64_t>() << "\n";
  out << "wall time: " << s["wall_time_ms"].get<double>() << " ms\n";
}

inline std::string limit_name(LimitHit h) {
  switch (h) {
    case LimitHit::None: return "none";
    case LimitHit::Markings: return "markings";
    case LimitHit::Depth: return "depth";
    case LimitHit::Tokens: return "tokens";
  }
  return "none";
}

struct Options {
  std::string model;
  std::string critical;
  std::string witness;
  std::string witness_out;
  std::string out;
  std::string search = "bfs";
  std::string variant;
  bool oracle = false;
  bool unary = false;
  bool json = false;
  bool detect_unbounded = false;
  std::uint64_t seed = 1;
  std::size_t size = 0;
  std::uint64_t max_scan = std::uint64_t{1} << 26;
  ExploreLimits limits;
};

class Runner {
 public:
  Runner(const Options& opt, std::ostream& out) : opt_(opt), out_(out) {}

  int check_nfa() {
    Input model = load(opt_.model);
    Input critical = load(opt_.critical, true);
    Nfa g = in_file(model.path, [&] { return io::automaton_from_json(model.json); });
    StateSet c = critical.blank ? StateSet{}
                                : in_file(critical.path, [&] { return io::critical_states_from_json(critical.json, g); });
    auto start = clock::now();
    NfaVerdict v = opt_.oracle ? critobs::check_nfa_oracle(g, c) : critobs::check_nfa(g, c);
    double ms = elapsed(start);
    Json report = base_report("check nfa", v.outcome, v.stats, ms, model, critical);
    report["algorithm"] = opt_.oracle ? "observer" : "twin";
    report["witness"] = v.witness ? io::witness_to_json(*v.witness, g) : Json(nullptr);
    return finish(report, v.outcome);
  }

  int check_network() {
    if (opt_.unary && opt_.oracle) throw UsageError("--unary and --oracle are mutually exclusive");
    Input model = load(opt_.model);
    Input critical = load(opt_.critical, true);
    const auto dir = std::filesystem::path(model.path).parent_path();
    Network net = in_file(model.path, [&] { return io::network_from_json(model.json, dir); });
    TupleCriticalSet c = critical.blank ? TupleCriticalSet(net.size(), {})
                                        : in_file(critical.path, [&] {
                                            return io::critical_tuples_from_json(critical.json, net);
                                          });
    auto start = clock::now();
    Json report;
    Outcome outcome;
    if (opt_.unary) {
      UnaryVerdict u = check_unary_network(net, c, opt_.max_scan);
      double ms = elapsed(start);
      outcome = u.verdict.outcome;
      report = base_report("check network", outcome, u.verdict.stats, ms, model, critical);
      report["algorithm"] = "unary-scan";
      Json comps = Json::array();
      for (const auto& s : u.sequences) comps.push_back({{"tail", s.tail}, {"period", s.period}});
      report["unary"] = {{"scan_bound", u.scan_bound},
                         {"length", u.length ? Json(*u.length) : Json(nullptr)},
                         {"components", comps}};
      report["witness"] = u.verdict.witness ? io::witness_to_json(*u.verdict.witness, net) : Json(nullptr);
    } else {
      NetworkVerdict v;
      if (opt_.oracle) {
        v = materialize_and_check(net, c);
      } else {
        if (opt_.search != "bfs" && opt_.search != "iddfs") throw UsageError("--search must be bfs or iddfs");
        v = critobs::check_network(net, c, opt_.search == "bfs" ? NetworkSearch::BreadthFirst : NetworkSearch::IterativeDeepening);
      }
      double ms = elapsed(start);
      outcome = v.outcome;
      report = base_report("check network", outcome, v.stats, ms, model, critical);
      report["algorithm"] = opt_.oracle ? "materialized" : (opt_.search == "bfs" ? "twin-bfs" : "twin-iddfs");
      report["witness"] = v.witness ? io::witness_to_json(*v.witness, net) : Json(nullptr);
    }
    return finish(report, outcome);
  }

  int check_petri() {
    if (opt_.oracle || opt_.unary) throw UsageError("--oracle and --unary do not apply to petri nets");
    Input model = load(opt_.model);
    Input critical = load(opt_.critical, true);
    LabeledPetriNet g = in_file(model.path, [&] { return io::petri_from_json(model.json); });
    CriticalMarkingSet c = critical.blank ? CriticalMarkingSet(CriticalMarkingSet::Mode::Finite, {})
                                          : in_file(critical.path, [&] {
                                              return io::critical_markings_from_json(critical.json, g);
                                            });
    auto start = clock::now();
    PetriVerdict v = critobs::check_petri(g, c, opt_.limits, opt_.detect_unbounded);
    double ms = elapsed(start);
    Json report = base_report("check petri", v.outcome, v.stats, ms, model, critical);
    report["algorithm"] = "twin-net-bfs";
    report["limits"] = {{"max_markings", v.limits.max_markings},
                        {"max_depth", v.limits.max_depth},
                        {"max_tokens", v.limits.max_tokens}};
    report["exhaustive"] = v.exhaustive;
    report["limit_hit"] = limit_name(v.limit_hit);
    if (opt_.detect_unbounded) report["unbounded_evidence"] = v.unbounded_evidence;
    report["witness"] = v.witness ? io::witness_to_json(*v.witness, g) : Json(nullptr);
    return finish(report, v.outcome);
  }

  int observer_cmd() {
    Input model = load(opt_.model);
    Nfa g = in_file(model.path, [&] { return io::automaton_from_json(model.json); });
    ObserverAutomaton obs = observer(g);
    Json automaton = io::to_json(obs.automaton);
    if (!opt_.out.empty()) write_file(opt_.out, automaton.dump(2) + "\n");
    if (opt_.json) {
      out_ << automaton.dump(2) << "\n";
    } else {
      const Nfa& o = obs.automaton;
      out_ << "observer states: " << o.num_states() << "\n";
      out_ << "initial: " << o.state_name(*o.initial().begin()) << "\n";
      for (const auto& tr : o.transitions()) {
        out_ << o.state_name(tr.from) << " -" << o.alphabet().name(tr.event) << "-> " << o.state_name(tr.to) << "\n";
      }
    }
    return 0;
  }

  int replay() {
    Input model = load(opt_.model);
    Input critical = load(opt_.critical, true);
    Input witness = load(opt_.witness);
    Json w = witness.json;
    if (w.is_object() && w.contains("witness")) w = w["witness"];
    if (!w.is_object() || !w.contains("kind") || !w["kind"].is_string()) {
      throw ValidationError(witness.path + ": /kind: expected \"nfa\", \"network\" or \"petri\"");
    }
    const std::string kind = w["kind"].get<std::string>();
    std::optional<std::string> problem;
    auto interpret = [&](auto parse) {
      try {
        return parse();
      } catch (const ValidationError& e) {
        problem = std::string("witness does not match the model: ") + e.what();
        return decltype(parse())();
      }
    };
    if (kind == "nfa") {
      Nfa g = in_file(model.path, [&] { return io::automaton_from_json(model.json); });
      StateSet c = critical.blank ? StateSet{}
                                  : in_file(critical.path, [&] { return io::critical_states_from_json(critical.json, g); });
      auto parsed = interpret([&] { return std::optional<NfaWitness>(io::nfa_witness_from_json(w, g)); });
      if (parsed) problem = witness_error(g, c, *parsed);
    } else if (kind == "network") {
      const auto dir = std::filesystem::path(model.path).parent_path();
      Network net = in_file(model.path, [&] { return io::network_from_json(model.json, dir); });
      TupleCriticalSet c = critical.blank ? TupleCriticalSet(net.size(), {})
                                          : in_file(critical.path, [&] {
                                              return io::critical_tuples_from_json(critical.json, net);
                                            });
      auto parsed = interpret([&] { return std::optional<NetworkWitness>(io::network_witness_from_json(w, net)); });
      if (parsed) problem = witness_error(net, c, *parsed);
    } else if (kind == "petri") {
      LabeledPetriNet g = in_file(model.path, [&] { return io::petri_from_json(model.json); });
      CriticalMarkingSet c = critical.blank ? CriticalMarkingSet(CriticalMarkingSet::Mode::Finite, {})
                                            : in_file(critical.path, [&] {
                                                return io::critical_markings_from_json(critical.json, g);
                                              });
      auto parsed = interpret([&] { return std::optional<PetriWitness>(io::petri_witness_from_json(w, g)); });
      if (parsed) problem = witness_error(g, c, *parsed);
    } else {
      throw ValidationError(witness.path + ": /kind: unknown witness kind '" + kind + "'");
    }
    if (opt_.json) {
      Json report = {{"command", "replay"},
                     {"valid", !problem},
                     {"diagnostic", problem ? Json(*problem) : Json(nullptr)},
                     {"inputs", {{"model", model.describe()}, {"critical", critical.describe()},
                                 {"witness", witness.describe()}}}};
      out_ << report.dump(2) << "\n";
    } else if (problem) {
      out_ << "witness invalid: " << *problem << "\n";
    } else {
      out_ << "witness valid\n";
    }
    return problem ? kNotObservable : kObservable;
  }

  int generate(const std::string& kind) {
    namespace fs = std::filesystem;
    random::Rng rng(opt_.seed);
    Json manifest = {{"generator", kind}, {"seed", opt_.seed}, {"model", "model.json"}, {"critical", "critical.json"}};
    Json model;
    Json critical;
    Outcome expected;
    std::vector<Outcome> accepts;

    if (kind == "dag") {
      const std::size_t n = opt_.size ? opt_.size : 8;
      DagVariant variant = variant_is("dfa", {"unary", "dfa"}) ? DagVariant::Dfa : DagVariant::UnaryNfa;
      Dag d = random::random_dag(rng, n, 300);
      NfaInstance inst = gen_dag_nfa(d, variant);
      const bool reachable = dag_reachable(d);
      expected = reachable ? Outcome::NotCriticallyObservable : Outcome::CriticallyObservable;
      model = io::to_json(inst.automaton);
      critical = io::critical_states_to_json(inst.critical, inst.automaton);
      manifest["check"] = "nfa";
      manifest["size"] = n;
      manifest["variant"] = variant == DagVariant::Dfa ? "dfa" : "unary";
      manifest["oracle"] = {{"name", "dag-reachability"}, {"reachable", reachable}};
    } else if (kind == "dfa-intersection") {
      const std::size_t n = opt_.size ? opt_.size : 3;
      IntersectionVariant variant = variant_is("unobservable", {"shared", "unobservable"})
                                        ? IntersectionVariant::UnobservableU
                                        : IntersectionVariant::SharedObservableOne;
      std::vector<Nfa> dfas{random::random_total_dfa(rng, n), random::random_total_dfa(rng, n)};
      NetworkInstance inst = gen_dfa_intersection(dfas, variant);
      const bool nonempty = marked_intersection_nonempty(dfas);
      expected = nonempty ? Outcome::NotCriticallyObservable : Outcome::CriticallyObservable;
      model = io::to_json(inst.network);
      critical = io::critical_tuples_to_json(inst.critical, inst.network);
      manifest["check"] = "network";
      manifest["size"] = n;
      manifest["variant"] = variant == IntersectionVariant::UnobservableU ? "unobservable" : "shared";
      manifest["oracle"] = {{"name", "product-emptiness"}, {"intersection_nonempty", nonempty}};
    } else if (kind == "unary-intersection") {
      const std::size_t n = opt_.size ? opt_.size : 4;
      std::vector<Nfa> nfas{random::random_unary_nfa(rng, n, 250), random::random_unary_nfa(rng, n, 250)};
      NetworkInstance inst = gen_unary_intersection(nfas);
      const bool nonempty = marked_intersection_nonempty(nfas);
      expected = nonempty ? Outcome::NotCriticallyObservable : Outcome::CriticallyObservable;
      model = io::to_json(inst.network);
      critical = io::critical_tuples_to_json(inst.critical, inst.network);
      manifest["check"] = "network";
      manifest["size"] = n;
      manifest["oracle"] = {{"name", "product-emptiness"}, {"intersection_nonempty", nonempty}};
    } else if (kind == "petri-reach") {
      const std::size_t n = opt_.size ? opt_.size : 3;
      random::RandomNet base = random::random_conservative_net(rng, n, n, 2);
      Marking target = random::random_target(rng, base, rng() % 2 == 0);
      PetriInstance inst = gen_reachability_petri(base.net, base.initial, target);
      const bool reachable = *petri_reachable(base.net, base.initial, target);
      expected = reachable ? Outcome::NotCriticallyObservable : Outcome::CriticallyObservable;
      if (!reachable) accepts = {Outcome::CriticallyObservable, Outcome::Unknown};
      model = io::to_json(inst.net);
      critical = io::to_json(inst.critical);
      manifest["check"] = "petri";
      manifest["size"] = n;
      manifest["oracle"] = {{"name", "explicit-reachability"}, {"reachable", reachable}};
    } else if (kind == "marking-inclusion") {
      const std::size_t n = opt_.size ? opt_.size : 2;
      random::InclusionPair pair = random::random_inclusion_pair(rng, n, n, 2, rng() % 2 == 0);
      MarkingInclusionInstance inst = gen_marking_inclusion(pair.a.net, pair.a.initial, pair.b.net, pair.b.initial);
      const bool included = marking_inclusion_holds(pair.a.net, pair.a.initial, pair.b.net, pair.b.initial);
      expected = included ? Outcome::CriticallyObservable : Outcome::NotCriticallyObservable;
      model = io::to_json(inst.net);
      critical = io::to_json(inst.critical.materialize());
      manifest["check"] = "petri";
      manifest["size"] = n;
      manifest["oracle"] = {{"name", "marking-inclusion"}, {"included", included}};
    } else {
      throw UsageError("unknown generator '" + kind + "'");
    }
    if (accepts.empty()) accepts = {expected};
    manifest["expected"] = to_string(expected);
    manifest["accepts"] = Json::array();
    for (Outcome o : accepts) manifest["accepts"].push_back(to_string(o));

    fs::path dir(opt_.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CantCreate(dir.string() + ": " + ec.message());
    write_file(dir / "model.json", model.dump(2) + "\n");
    write_file(dir / "critical.json", critical.dump(2) + "\n");
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    if (opt_.json) {
      out_ << manifest.dump(2) << "\n";
    } else {
      out_ << "wrote " << (dir / "model.json").string() << ", " << (dir / "critical.json").string() << ", "
           << (dir / "manifest.json").string() << "\n";
      out_ << "expected verdict: " << to_string(expected) << "\n";
    }
    return 0;
  }

  struct UsageError : Error {
    using Error::Error;
  };

 private:
  using clock = std::chrono::steady_clock;

  static double elapsed(clock::time_point start) {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  }

  bool variant_is(const std::string& second, std::initializer_list<const char*> allowed) const {
    if (opt_.variant.empty()) return false;
    for (const char* a : allowed)
      if (opt_.variant == a) return opt_.variant == second;
    throw UsageError("unknown --variant '" + opt_.variant + "'");
  }

  Json base_report(const std::string& command, Outcome outcome, const SearchStats& stats, double ms,
                   const Input& model, const Input& critical) const {
    return {{"command", command},
            {"verdict", to_string(outcome)},
            {"statistics", stats_json(stats, ms)},
            {"inputs", {{"model", model.describe()}, {"critical", critical.describe()}}}};
  }

  int finish(const Json& report, Outcome outcome) {
    if (!opt_.witness_out.empty() && !report["witness"].is_null()) {
      write_file(opt_.witness_out, report["witness"].dump(2) + "\n");
    }
    if (opt_.json) {
      out_ << report.dump(2) << "\n";
    } else {
      print_text_report(out_, report);
    }
    return exit_code(outcome);
  }

  const Options& opt_;
  std::ostream& out_;
};

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app("Critical observability checker for automata, networks of automata and labeled Petri nets",
               "critobs");
  app.require_subcommand(1);

  auto add_check_common = [&](CLI::App* sub) {
    sub->add_option("--model", opt.model, "Model file (JSON)")->required();
    sub->add_option("--critical", opt.critical, "Critical-set file (JSON)")->required();
    sub->add_flag("--json", opt.json, "Emit the report as JSON");
    sub->add_option("--witness-out", opt.witness_out, "Write the witness (if any) to this file");
  };

  CLI::App* check = app.add_subcommand("check", "Decide critical observability");
  check->require_subcommand(1);
  CLI::App* check_nfa_cmd = check->add_subcommand("nfa", "Check a single automaton");
  add_check_common(check_nfa_cmd);
  check_nfa_cmd->add_flag("--oracle", opt.oracle, "Use the observer construction instead of the twin search");

  CLI::App* check_net_cmd = check->add_subcommand("network", "Check a network of automata");
  add_check_common(check_net_cmd);
  check_net_cmd->add_flag("--oracle", opt.oracle, "Compose the network explicitly, then check");
  check_net_cmd->add_flag("--unary", opt.unary, "Exact decision for networks over one observable event");
  check_net_cmd->add_option("--search", opt.search, "Twin search order: bfs or iddfs");
  check_net_cmd->add_option("--max-scan", opt.max_scan, "Largest unary scan bound attempted");

  CLI::App* check_petri_cmd = check->add_subcommand("petri", "Check a labeled Petri net");
  add_check_common(check_petri_cmd);
  check_petri_cmd->add_flag("--oracle", opt.oracle, "Not available for Petri nets");
  check_petri_cmd->add_flag("--unary", opt.unary, "Not available for Petri nets");
  check_petri_cmd->add_option("--max-markings", opt.limits.max_markings, "Twin markings explored at most");
  check_petri_cmd->add_option("--max-depth", opt.limits.max_depth, "Twin firing sequences explored up to this length");
  check_petri_cmd->add_option("--max-tokens", opt.limits.max_tokens, "Tokens per place at most");
  check_petri_cmd->add_flag("--detect-unbounded", opt.detect_unbounded,
                            "Report markings that strictly cover an ancestor");

  CLI::App* gen = app.add_subcommand("gen", "Generate a reduction instance with its expected verdict");
  gen->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> generators;
  for (const char* name : {"dag", "dfa-intersection", "unary-intersection", "petri-reach", "marking-inclusion"}) {
    CLI::App* g = gen->add_subcommand(name, std::string("Generate a ") + name + " instance");
    g->add_option("--seed", opt.seed, "Random seed");
    g->add_option("--out", opt.out, "Output directory")->required();
    g->add_option("--size", opt.size, "Instance size (states or places)");
    g->add_flag("--json", opt.json, "Print the manifest as JSON");
    if (std::string_view(name) == "dag") g->add_option("--variant", opt.variant, "unary or dfa");
    if (std::string_view(name) == "dfa-intersection") g->add_option("--variant", opt.variant, "shared or unobservable");
    generators.emplace_back(name, g);
  }

  CLI::App* observer_cmd = app.add_subcommand("observer", "Print the observer of an automaton");
  observer_cmd->add_option("--model", opt.model, "Automaton file (JSON)")->required();
  observer_cmd->add_flag("--json", opt.json, "Print the observer in the automaton JSON format");
  observer_cmd->add_option("--out", opt.out, "Also write the observer to this file");

  CLI::App* replay_cmd = app.add_subcommand("replay", "Validate a witness against a model");
  replay_cmd->add_option("--model", opt.model, "Model file (JSON)")->required();
  replay_cmd->add_option("--critical", opt.critical, "Critical-set file (JSON)")->required();
  replay_cmd->add_option("--witness", opt.witness, "Witness file or check report (JSON)")->required();
  replay_cmd->add_flag("--json", opt.json, "Emit the result as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "critobs: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  }

  Runner runner(opt, out);
  try {
    if (check_nfa_cmd->parsed()) return runner.check_nfa();
    if (check_net_cmd->parsed()) return runner.check_network();
    if (check_petri_cmd->parsed()) return runner.check_petri();
    for (const auto& [name, g] : generators)
      if (g->parsed()) return runner.generate(name);
    if (observer_cmd->parsed()) return runner.observer_cmd();
    if (replay_cmd->parsed()) return runner.replay();
  } catch (const Runner::UsageError& e) {
    err << "critobs: " << e.what() << "\n";
    return kUsage;
  } catch (const NoInput& e) {
    err << "critobs: " << e.what() << "\n";
    return kNoInput;
  } catch (const CantCreate& e) {
    err << "critobs: " << e.what() << "\n";
    return kCantCreate;
  } catch (const ValidationError& e) {
    err << "critobs: malformed input: " << e.what() << "\n";
    return kDataError;
  } catch (const ResourceError& e) {
    err << "critobs: resource limit: " << e.what() << "\n";
    return kUnavailable;
  } catch (const std::exception& e) {
    err << "critobs: internal error: " << e.what() << "\n";
    return kSoftware;
  }
  err << "critobs: no command given\n";
  return kUsage;
}

/// Arguments without the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"critobs"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace critobs::cli
