#include "tmlab/metrics.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tmlab {

std::vector<Event> txn_events(const std::vector<Event>& log, TxnId txn) {
  std::vector<Event> out;
  for (const auto& e : log)
    if (e.txn == txn && (e.kind == EvKind::Prim || e.kind == EvKind::CacheCommit)) out.push_back(e);
  return out;
}

int count_raws(const std::vector<Event>& trace) {
  std::set<ObjId> open;
  int n = 0;
  for (const auto& e : trace) {
    if (!e.direct()) continue;
    if (e.prim.kind == PrimKind::Read) {
      bool other = std::any_of(open.begin(), open.end(), [&](ObjId o) { return o != e.obj; });
      if (other) {
        ++n;
        open.clear();
        continue;
      }
      open.erase(e.obj);
    } else if (e.prim.kind == PrimKind::Write) {
      open.insert(e.obj);
    } else {
      open.erase(e.obj);
    }
  }
  return n;
}

int count_awars(const std::vector<Event>& trace) {
  int n = 0;
  for (const auto& e : trace) {
    if (!e.direct()) continue;
    if (e.prim.kind == PrimKind::Fadd || (e.prim.kind == PrimKind::Cas && !e.trivial)) ++n;
  }
  return n;
}

int stalls_at(const std::vector<Event>& log, size_t idx) {
  const Event& e = log.at(idx);
  if (!e.direct()) return 0;
  std::set<Pid> seen;
  int m = 0;
  for (size_t i = idx; i-- > 0;) {
    const Event& f = log[i];
    if (!f.direct()) {
      if (f.kind == EvKind::Invoke || f.kind == EvKind::Respond) continue;
      break;
    }
    if (f.obj != e.obj || f.trivial || f.proc == e.proc || seen.count(f.proc)) break;
    seen.insert(f.proc);
    ++m;
  }
  return m;
}

int count_stalls(const std::vector<Event>& log, TxnId txn) {
  int n = 0;
  for (size_t i = 0; i < log.size(); ++i)
    if (log[i].txn == txn) n += stalls_at(log, i);
  return n;
}

std::vector<int> rmr_flags(const std::vector<Event>& log, const Layout& layout, RmrModel model) {
  std::vector<int> out(log.size(), 0);
  std::map<ObjId, std::set<Pid>> cached;
  for (size_t i = 0; i < log.size(); ++i) {
    const Event& e = log[i];
    if (!e.direct()) continue;
    if (model == RmrModel::Dsm) {
      Pid owner = layout.info(e.obj).owner;
      if (owner < 0) throw std::invalid_argument("no owner for base object " + layout.info(e.obj).name);
      out[i] = owner != e.proc;
      continue;
    }
    auto& holders = cached[e.obj];
    if (e.prim.kind == PrimKind::Read) {
      if (!holders.count(e.proc)) {
        out[i] = 1;
        holders.insert(e.proc);
      }
      continue;
    }
    out[i] = 1;
    if (!e.trivial) holders.clear();
    holders.insert(e.proc);
  }
  return out;
}

std::map<Pid, int> count_rmrs(const std::vector<Event>& log, const Layout& layout, RmrModel model) {
  auto flags = rmr_flags(log, layout, model);
  std::map<Pid, int> out;
  for (size_t i = 0; i < log.size(); ++i)
    if (log[i].direct()) out[log[i].proc] += flags[i];
  return out;
}

MetaCount count_metadata(const std::vector<Event>& log, const Layout& layout, TxnId txn) {
  MetaCount m;
  std::set<ObjId> objs;
  for (const auto& e : log) {
    if (e.txn != txn || e.kind != EvKind::Prim) continue;
    if (layout.info(e.obj).cls != ObjClass::Meta) continue;
    ++m.accesses;
    objs.insert(e.obj);
  }
  m.distinct = static_cast<int>(objs.size());
  return m;
}

MetricsReport measure(const Execution& x) {
  MetricsReport r;
  std::map<TxnId, Pid> txns;
  for (const auto& e : x.events)
    if (e.txn != kNoTxn && !txns.count(e.txn)) txns[e.txn] = e.proc;
  for (const auto& [id, proc] : txns) {
    TxnMetrics m;
    m.txn = id;
    m.proc = proc;
    auto tr = txn_events(x.events, id);
    m.raws = count_raws(tr);
    m.awars = count_awars(tr);
    m.stalls = count_stalls(x.events, id);
    m.steps = static_cast<int>(tr.size());
    auto meta = count_metadata(x.events, *x.layout, id);
    m.metadata_accesses = meta.accesses;
    m.distinct_metadata = meta.distinct;
    r.total.raws += m.raws;
    r.total.awars += m.awars;
    r.total.stalls += m.stalls;
    r.total.steps += m.steps;
    r.total.metadata_accesses += m.metadata_accesses;
    r.total.distinct_metadata += m.distinct_metadata;
    r.txns.push_back(m);
  }
  r.rmr_cc = count_rmrs(x.events, *x.layout, RmrModel::CcWriteThrough);
  try {
    r.rmr_dsm = count_rmrs(x.events, *x.layout, RmrModel::Dsm);
  } catch (const std::invalid_argument&) {
    r.rmr_dsm.clear();
  }
  return r;
}

std::string format_report(const MetricsReport& r) {
  std::ostringstream os;
  auto line = [&](const std::string& prefix, const TxnMetrics& m) {
    os << prefix << ".raws=" << m.raws << "\n"
       << prefix << ".awars=" << m.awars << "\n"
       << prefix << ".stalls=" << m.stalls << "\n"
       << prefix << ".steps=" << m.steps << "\n"
       << prefix << ".metadata_accesses=" << m.metadata_accesses << "\n"
       << prefix << ".distinct_metadata=" << m.distinct_metadata << "\n";
  };
  for (const auto& m : r.txns) line("txn.T" + std::to_string(m.txn), m);
  line("total", r.total);
  for (const auto& [p, n] : r.rmr_cc) os << "rmr.cc.p" << p << "=" << n << "\n";
  for (const auto& [p, n] : r.rmr_dsm) os << "rmr.dsm.p" << p << "=" << n << "\n";
  return os.str();
}

}  // namespace tmlab
