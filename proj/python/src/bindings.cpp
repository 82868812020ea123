#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "tmlab/checkers.hpp"
#include "tmlab/listset.hpp"
#include "tmlab/metrics.hpp"
#include "tmlab/tm.hpp"

namespace py = pybind11;
using namespace tmlab;

namespace {

Verdict check_tm(const History& h, const std::string& prop, size_t cap) {
  if (prop == "final-opacity") return final_state_opaque(h, cap);
  if (prop == "opacity") return opaque(h, cap);
  if (prop == "du-opacity") return du_opaque(h, cap);
  if (prop == "strict-ser") return strictly_serializable(h, cap);
  throw std::invalid_argument("unknown property: " + prop);
}

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["holds"] = v.holds;
  d["refused"] = v.refused;
  d["order"] = v.order;
  d["note"] = v.note;
  return d;
}

py::dict check_history(const std::string& text, const std::string& prop, size_t cap) {
  if (prop == "set-lin" || prop == "lsl") {
    ListHistory h = parse_list_history(text);
    return verdict_dict(prop == "lsl" ? ls_linearizable(h) : linearizable_set(h.high));
  }
  return verdict_dict(check_tm(parse_history(text), prop, cap));
}

py::dict run(const std::string& workload, const std::string& tm, const std::string& schedule, size_t ts,
             size_t fair_cap) {
  TmWorld tw = build_tm_world(parse_workload(workload), make_tm(tm), ts);
  Execution x = schedule.empty() ? run_fair(tw.world, fair_cap) : run_schedule(tw.world, parse_schedule(schedule));
  History h = tw.history(x);
  py::dict d;
  d["history"] = format_history(h);
  d["events"] = x.events.size();
  d["incomplete"] = x.incomplete;
  d["metrics"] = format_report(measure(x));
  return d;
}

py::dict enumerate(const std::string& workload, const std::string& tm, size_t max_events, size_t ts,
                   const std::string& prop) {
  TmWorld tw = build_tm_world(parse_workload(workload), make_tm(tm), ts);
  size_t bad = 0, incomplete = 0;
  std::string first;
  size_t n = enumerate_traces(tw.world, max_events, [&](const Execution& x) {
    if (x.incomplete) {
      ++incomplete;
      return true;
    }
    History h = tw.history(x);
    if (!check_tm(h, prop, kDefaultTxnCap).holds) {
      if (bad++ == 0) first = format_history(h);
    }
    return true;
  });
  py::dict d;
  d["executions"] = n;
  d["incomplete"] = incomplete;
  d["violations"] = bad;
  d["counterexample"] = first;
  return d;
}

py::dict accepts(const std::string& impl, const std::string& schedule, bool strict) {
  AcceptResult a = schedule_accepts(impl, parse_set_schedule(schedule), strict);
  py::dict d;
  d["accepted"] = a.accepted;
  d["reason"] = a.reason;
  d["ls_linearizable"] = a.ls_linearizable;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tmlab, m) {
  py::register_exception<std::invalid_argument>(m, "FormatError", PyExc_ValueError);
  m.def("tm_names", &tm_names);
  m.def("check_history", &check_history, py::arg("text"), py::arg("property") = "du-opacity",
        py::arg("cap") = kDefaultTxnCap);
  m.def("run", &run, py::arg("workload"), py::arg("tm"), py::arg("schedule") = "", py::arg("ts") = 8,
        py::arg("fair_cap") = 100000);
  m.def("enumerate", &enumerate, py::arg("workload"), py::arg("tm"), py::arg("max_events") = 400,
        py::arg("ts") = 8, py::arg("property") = "du-opacity");
  m.def("schedule_accepts", &accepts, py::arg("impl"), py::arg("schedule"), py::arg("strict") = true);
  m.def("is_observable", [](const std::string& s) {
    std::string why;
    bool ok = is_observable(parse_set_schedule(s), &why);
    return py::make_tuple(ok, why);
  });
}
