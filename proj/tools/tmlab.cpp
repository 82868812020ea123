#include <CLI11.hpp>

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tmlab/checkers.hpp"
#include "tmlab/listset.hpp"
#include "tmlab/metrics.hpp"
#include "tmlab/strongprog.hpp"
#include "tmlab/tm.hpp"

using namespace tmlab;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string> kTmProps = {"final-opacity", "opacity", "du-opacity", "strict-ser"};

Verdict check_tm(const History& h, const std::string& prop, size_t cap) {
  if (prop == "final-opacity") return final_state_opaque(h, cap);
  if (prop == "opacity") return opaque(h, cap);
  if (prop == "du-opacity") return du_opaque(h, cap);
  if (prop == "strict-ser") return strictly_serializable(h, cap);
  throw UsageError("unknown property " + prop);
}

const char* adjective(const std::string& prop) {
  if (prop == "final-opacity") return "final-state opaque";
  if (prop == "opacity") return "opaque";
  if (prop == "du-opacity") return "du-opaque";
  return "strictly serializable";
}

std::string format_schedule(const Execution& x) {
  std::ostringstream os;
  for (size_t i = 0; i < x.choices.size(); ++i) os << (i ? " " : "") << x.proc_names.at(x.choices[i]);
  return os.str();
}

std::string format_trace(const Execution& x) {
  std::ostringstream os;
  for (const auto& e : x.events) os << format_event(e, *x.layout) << "\n";
  return os.str();
}

struct Opts {
  std::string workload, tm = "lp", schedule, history, property, impl = "irm", mode = "fair";
  std::vector<std::string> checks;
  bool metrics = false, trace = false, all_interleavings = false;
  size_t max_events = 1000, cap = kDefaultTxnCap, ts = 8, fair_cap = 100000, procs = 2, max_states = 2000000;
  int entries = 2;
};

void validate_tm(const std::string& tm) {
  auto names = tm_names();
  if (std::find(names.begin(), names.end(), tm) == names.end()) throw UsageError("unknown TM " + tm);
}

void validate_checks(const std::vector<std::string>& checks) {
  for (const auto& c : checks)
    if (std::find(kTmProps.begin(), kTmProps.end(), c) == kTmProps.end()) throw UsageError("unknown property " + c);
}

int cmd_run(const Opts& o) {
  validate_tm(o.tm);
  validate_checks(o.checks);
  TmWorld tw = build_tm_world(parse_workload(slurp(o.workload)), make_tm(o.tm), o.ts);
  Execution x = o.schedule.empty() ? run_fair(tw.world, o.fair_cap)
                                   : run_schedule(tw.world, parse_schedule(slurp(o.schedule)));
  History h = tw.history(x);
  std::cout << "tm=" << o.tm << "\n"
            << "events=" << x.events.size() << "\n"
            << "complete=" << (x.incomplete ? 0 : 1) << "\n"
            << "[history]\n"
            << format_history(h);
  if (o.trace) std::cout << "[trace]\n" << format_trace(x);
  if (o.metrics) std::cout << "[metrics]\n" << format_report(measure(x));
  int rc = 0;
  for (const auto& c : o.checks) {
    Verdict v = check_tm(h, c, o.cap);
    std::cout << "[check]\n" << format_verdict(v, c);
    if (!v.holds) {
      rc = 1;
      std::cout << "[counterexample]\nschedule: " << format_schedule(x) << "\n" << format_history(h);
    }
  }
  return rc;
}

struct Range {
  int lo = INT_MAX, hi = INT_MIN;
  void add(int v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

int cmd_enumerate(const Opts& o) {
  validate_tm(o.tm);
  validate_checks(o.checks);
  TmWorld tw = build_tm_world(parse_workload(slurp(o.workload)), make_tm(o.tm), o.ts);
  std::map<std::string, Range> agg;
  size_t incomplete = 0;
  bool failed = false;
  std::string failure;
  auto cb = [&](const Execution& x) {
    if (x.incomplete) ++incomplete;
    MetricsReport r = measure(x);
    for (const auto& m : r.txns) {
      agg["raws"].add(m.raws);
      agg["awars"].add(m.awars);
      agg["stalls"].add(m.stalls);
      agg["steps"].add(m.steps);
      agg["distinct_metadata"].add(m.distinct_metadata);
    }
    History h = tw.history(x);
    for (const auto& c : o.checks) {
      Verdict v = check_tm(h, c, o.cap);
      if (v.holds) continue;
      failed = true;
      std::ostringstream os;
      os << "[counterexample]\n" << format_verdict(v, c) << "schedule: " << format_schedule(x) << "\n"
         << format_history(h);
      if (o.trace) os << "[trace]\n" << format_trace(x);
      failure = os.str();
      return false;
    }
    return true;
  };
  size_t n = o.all_interleavings ? enumerate_executions(tw.world, o.max_events, cb)
                                 : enumerate_traces(tw.world, o.max_events, cb);
  std::cout << n << " executions";
  if (!o.checks.empty() && !failed) {
    std::cout << ", all";
    for (size_t i = 0; i < o.checks.size(); ++i) std::cout << (i ? ", " : " ") << adjective(o.checks[i]);
  }
  std::cout << "\n";
  std::cout << "executions=" << n << "\n"
            << "incomplete=" << incomplete << "\n"
            << "reduction=" << (o.all_interleavings ? "none" : "sleep-sets") << "\n";
  for (const auto& [k, r] : agg) std::cout << k << ".min=" << r.lo << "\n" << k << ".max=" << r.hi << "\n";
  if (failed) std::cout << failure;
  return failed ? 1 : 0;
}

int cmd_check(const Opts& o) {
  std::string text = slurp(o.history);
  if (o.property == "set-lin" || o.property == "lsl") {
    ListHistory h = parse_list_history(text);
    Verdict v = o.property == "lsl" ? ls_linearizable(h) : linearizable_set(h.high);
    std::cout << format_verdict(v, o.property);
    return v.holds ? 0 : 1;
  }
  History h = parse_history(text);
  Verdict v = check_tm(h, o.property, o.cap);
  std::cout << format_verdict(v, o.property);
  if (v.refused) return 1;
  return v.holds ? 0 : 1;
}

int cmd_mutex(const Opts& o) {
  World w = build_mutex_world({o.procs, o.entries, true});
  if (o.mode == "fair") {
    Execution x = run_fair(w, o.fair_cap);
    int entries = 0, exits = 0;
    for (const auto& e : x.events)
      if (e.kind == EvKind::Respond && e.op.level == Level::Mutex) (e.op.kind == OpKind::Entry ? entries : exits)++;
    std::cout << "events=" << x.events.size() << "\nentries=" << entries << "\nexits=" << exits
              << "\ncomplete=" << (x.incomplete ? 0 : 1) << "\n";
    if (o.trace) std::cout << "[trace]\n" << format_trace(x);
    return x.incomplete ? 1 : 0;
  }
  if (o.mode != "enumerate") throw UsageError("mode must be enumerate or fair");
  bool violated = false, budget = false;
  size_t seen = 0;
  auto st = explore_states(w, o.max_events, [&](const World& s) {
    int in = 0;
    for (Pid p = 0; p < static_cast<Pid>(s.nprocs()); ++p) in += s.proc(p).state().var("cs") == 1;
    if (in > 1) violated = true;
    if (++seen >= o.max_states) budget = true;
    return !violated && !budget;
  });
  std::cout << "states=" << st.states << "\ntransitions=" << st.transitions
            << "\ndepth_limited=" << (st.depth_limited ? 1 : 0) << "\nbudget_exhausted=" << (budget ? 1 : 0)
            << "\nmutual_exclusion=" << (violated ? "FAIL" : "PASS") << "\n";
  return violated || budget ? 1 : 0;
}

int cmd_set(const Opts& o) {
  SetSchedule s = parse_set_schedule(slurp(o.schedule));
  AcceptResult a = schedule_accepts(o.impl, s);
  std::cout << "impl=" << o.impl << "\naccepted=" << (a.accepted ? 1 : 0) << "\n";
  if (!a.reason.empty()) std::cout << "reason=" << a.reason << "\n";
  std::cout << "observable=" << (is_observable(s) ? 1 : 0) << "\n[history]\n" << format_list_history(a.history);
  if (o.trace) std::cout << "[trace]\n" << format_trace(a.exec);
  int rc = 0;
  for (const auto& c : o.checks) {
    if (c != "lsl" && c != "set-lin") throw UsageError("set checks are lsl and set-lin");
    Verdict v = c == "lsl" ? ls_linearizable(a.history) : linearizable_set(a.history.high);
    std::cout << "[check]\n" << format_verdict(v, c);
    if (!v.holds) rc = 1;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* seed = std::getenv("TMLAB_SEED")) (void)seed;
  CLI::App app{"tmlab: transactional memory laboratory"};
  app.require_subcommand(1);
  Opts o;

  auto* run = app.add_subcommand("run", "run a workload under one schedule");
  run->add_option("--workload", o.workload, "workload file")->required();
  run->add_option("--tm", o.tm, "lp, lp-ss, strong, of-rw, of-weak, hytm1, hytm2");
  run->add_option("--schedule", o.schedule, "process schedule file (fair round-robin if omitted)");
  run->add_option("--ts", o.ts, "tracking-set capacity");
  run->add_option("--fair-cap", o.fair_cap, "step cap for the fair scheduler");
  run->add_flag("--metrics", o.metrics, "print the metrics report");
  run->add_flag("--trace", o.trace, "print the event log");
  run->add_option("--check", o.checks, "properties to check")->delimiter(',');
  run->add_option("--txn-cap", o.cap, "checker transaction bound");

  auto* en = app.add_subcommand("enumerate", "check every interleaving of a workload");
  en->add_option("--workload", o.workload, "workload file")->required();
  en->add_option("--tm", o.tm, "TM name");
  en->add_option("--max-events", o.max_events, "event bound per execution");
  en->add_option("--ts", o.ts, "tracking-set capacity");
  en->add_option("--check", o.checks, "properties to check")->delimiter(',');
  en->add_option("--txn-cap", o.cap, "checker transaction bound");
  en->add_flag("--all-interleavings", o.all_interleavings, "disable the sleep-set reduction");
  en->add_flag("--trace", o.trace, "print the event log of a counterexample");

  auto* ch = app.add_subcommand("check", "check a history file");
  ch->add_option("--history", o.history, "history file")->required();
  ch->add_option("--property", o.property, "final-opacity, opacity, du-opacity, strict-ser, set-lin, lsl")
      ->required()
      ->check(CLI::IsMember({"final-opacity", "opacity", "du-opacity", "strict-ser", "set-lin", "lsl"}));
  ch->add_option("--txn-cap", o.cap, "checker transaction bound");

  auto* mx = app.add_subcommand("mutex", "mutual exclusion from the strongly progressive TM");
  mx->add_option("--procs", o.procs, "number of processes");
  mx->add_option("--entries", o.entries, "entries per process");
  mx->add_option("--mode", o.mode, "enumerate or fair")->check(CLI::IsMember({"enumerate", "fair"}));
  mx->add_option("--max-events", o.max_events, "depth bound for enumerate");
  mx->add_option("--max-states", o.max_states, "state budget for enumerate");
  mx->add_option("--fair-cap", o.fair_cap, "step cap for fair");
  mx->add_flag("--trace", o.trace, "print the event log");

  auto* st = app.add_subcommand("set", "drive a list-based set along a schedule");
  st->add_option("--impl", o.impl, "seq, ih, irm, itm:<tm>");
  st->add_option("--schedule", o.schedule, "set schedule file")->required();
  st->add_option("--check", o.checks, "lsl, set-lin")->delimiter(',');
  st->add_flag("--trace", o.trace, "print the event log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*run) return cmd_run(o);
    if (*en) return cmd_enumerate(o);
    if (*ch) return cmd_check(o);
    if (*mx) return cmd_mutex(o);
    if (*st) return cmd_set(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
