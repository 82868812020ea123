#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tmlab/checkers.hpp"
#include "tmlab/metrics.hpp"
#include "tmlab/substrate.hpp"
#include "tmlab/tm.hpp"
#include "tmlab/tmapi.hpp"

namespace tmlab::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus(const std::string& name) { return read_file(std::string(TMLAB_CORPUS) + "/" + name); }

inline TmWorld tm_world(const std::string& workload_text, const std::string& tm, size_t ts = 8) {
  return build_tm_world(parse_workload(workload_text), make_tm(tm), ts);
}

struct TopSteps {
  TxnId txn = kNoTxn;
  OpKind kind = OpKind::Read;
  int steps = 0;
  int awars = 0;
  Tok tok = Tok::Ok;
};

// Base-object events between each t-operation's invocation and response.
inline std::vector<TopSteps> top_steps(const std::vector<Event>& log) {
  std::vector<TopSteps> out;
  std::map<Pid, size_t> open;
  for (const auto& e : log) {
    if (e.kind == EvKind::Invoke && e.op.level == Level::Tm) {
      open[e.proc] = out.size();
      out.push_back({e.op.id, e.op.kind, 0, 0, Tok::Ok});
    } else if (e.kind == EvKind::Respond && e.op.level == Level::Tm) {
      out[open.at(e.proc)].tok = e.tok;
      open.erase(e.proc);
    } else if ((e.kind == EvKind::Prim || e.kind == EvKind::CacheCommit) && open.count(e.proc)) {
      auto& t = out[open[e.proc]];
      ++t.steps;
      if (e.direct() && (e.prim.kind == PrimKind::Fadd || (e.prim.kind == PrimKind::Cas && !e.trivial))) ++t.awars;
    }
  }
  return out;
}

inline std::map<TxnId, TxnStatus> statuses(const History& h) {
  std::map<TxnId, TxnStatus> out;
  for (const auto& t : analyze(h)) out[t.id] = t.status;
  return out;
}

// Every aborted transaction conflicts with some other transaction.
inline bool aborts_justified(const History& h) {
  auto ds = data_sets(h);
  auto cf = conflicts(h, ds);
  for (const auto& t : analyze(h)) {
    if (t.status != TxnStatus::Aborted) continue;
    bool found = false;
    for (const auto& [a, b] : cf)
      if (a == t.id || b == t.id) found = true;
    if (!found) return false;
  }
  return true;
}

// Transactions that contend on a base object access a common t-object.
inline bool strict_dap(const Execution& x, const History& h) {
  std::map<TxnId, std::map<ObjId, bool>> touched;
  for (const auto& e : x.events) {
    if (!e.direct() || e.txn == kNoTxn) continue;
    auto& m = touched[e.txn][e.obj];
    m = m || !e.trivial;
  }
  std::map<TxnId, std::set<int>> tobjs;
  for (const auto& [id, d] : data_sets(h)) {
    for (const auto& [o, v] : d.rset) tobjs[id].insert(o);
    for (const auto& [o, v] : d.wset) tobjs[id].insert(o);
  }
  for (const auto& t : analyze(h))
    for (const auto& op : t.ops)
      if (op.obj >= 0) tobjs[t.id].insert(op.obj);
  for (const auto& [a, ma] : touched)
    for (const auto& [b, mb] : touched) {
      if (a >= b) continue;
      bool contend = false;
      for (const auto& [o, nt] : ma) {
        auto it = mb.find(o);
        if (it != mb.end() && (nt || it->second)) contend = true;
      }
      if (!contend) continue;
      bool share = false;
      for (int o : tobjs[a])
        if (tobjs[b].count(o)) share = true;
      if (!share) return false;
    }
  return true;
}

// Arbitrary well-formed history: random interleaving, read values drawn from
// the initial value and every value written to the object.
inline History random_history(std::mt19937_64& rng, size_t max_txns = 5, size_t max_objs = 4) {
  auto pick = [&](size_t lo, size_t hi) { return std::uniform_int_distribution<size_t>(lo, hi)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  History h;
  size_t nobj = pick(1, max_objs);
  for (size_t i = 0; i < nobj; ++i) h.add_obj("O" + std::to_string(i), Value(0));
  size_t ntx = pick(1, max_txns);
  struct Plan {
    std::vector<TxnOp> ops;
    size_t next = 0;
    bool pending = false;
    bool over = false;
  };
  std::vector<Plan> plans(ntx);
  std::map<int, std::vector<Value>> written;
  for (size_t t = 0; t < ntx; ++t) {
    size_t n = pick(1, 3);
    for (size_t k = 0; k < n; ++k) {
      TxnOp op;
      op.obj = static_cast<int>(pick(0, nobj - 1));
      if (chance(0.5)) {
        op.kind = OpKind::Write;
        op.val = Value(static_cast<int64_t>((t + 1) * 10 + k + 1));
        written[op.obj].push_back(op.val);
      } else {
        op.kind = OpKind::Read;
      }
      plans[t].ops.push_back(op);
    }
    plans[t].ops.push_back({OpKind::TryC, -1, {}});
  }
  for (;;) {
    std::vector<size_t> live;
    for (size_t t = 0; t < ntx; ++t)
      if (!plans[t].over) live.push_back(t);
    if (live.empty() || chance(0.02)) break;
    size_t t = live[pick(0, live.size() - 1)];
    auto& pl = plans[t];
    const TxnOp& op = pl.ops[pl.next];
    TxnId id = static_cast<TxnId>(t + 1);
    HEvent e;
    e.txn = id;
    e.kind = op.kind;
    e.obj = op.obj;
    if (!pl.pending) {
      e.inv = true;
      if (op.kind == OpKind::Write) e.val = op.val;
      h.events.push_back(e);
      pl.pending = true;
      continue;
    }
    e.inv = false;
    pl.pending = false;
    bool abort = false;
    if (op.kind == OpKind::Read) {
      abort = chance(0.1);
      if (!abort) {
        std::vector<Value> cand{Value(0)};
        for (const auto& v : written[op.obj]) cand.push_back(v);
        e.tok = Tok::Val;
        e.val = cand[pick(0, cand.size() - 1)];
      }
    } else if (op.kind == OpKind::Write) {
      abort = chance(0.05);
      e.tok = Tok::Ok;
    } else {
      abort = chance(0.3);
      e.tok = Tok::Commit;
    }
    if (abort) {
      e.tok = Tok::Abort;
      e.val = Value();
      pl.over = true;
    }
    h.events.push_back(e);
    if (++pl.next == pl.ops.size()) pl.over = true;
  }
  return h;
}

// History of a random run of a random workload under one of the TMs, cut at a
// random point.
inline History tm_history(std::mt19937_64& rng, size_t max_txns = 5, size_t max_objs = 4) {
  auto pick = [&](size_t lo, size_t hi) { return std::uniform_int_distribution<size_t>(lo, hi)(rng); };
  auto names = tm_names();
  std::string tm = names[pick(0, names.size() - 1)];
  Workload w;
  size_t nobj = pick(1, max_objs);
  for (size_t i = 0; i < nobj; ++i) {
    w.objects.push_back("O" + std::to_string(i));
    w.init.push_back(Value(0));
  }
  size_t ntx = pick(1, max_txns);
  size_t nproc = pick(1, std::min<size_t>(ntx, 3));
  w.procs.resize(nproc);
  for (size_t p = 0; p < nproc; ++p) {
    w.procs[p].name = "p" + std::to_string(p + 1);
    w.procs[p].fast = pick(0, 1) == 1;
  }
  for (size_t t = 0; t < ntx; ++t) {
    TxnSpec ts;
    ts.id = static_cast<TxnId>(t + 1);
    size_t n = pick(1, 3);
    for (size_t k = 0; k < n; ++k) {
      TxnOp op;
      op.obj = static_cast<int>(pick(0, nobj - 1));
      op.kind = pick(0, 1) ? OpKind::Write : OpKind::Read;
      if (op.kind == OpKind::Write) op.val = Value(static_cast<int64_t>((t + 1) * 10 + k + 1));
      ts.ops.push_back(op);
    }
    ts.ops.push_back({OpKind::TryC, -1, {}});
    w.procs[t % nproc].txns.push_back(ts);
  }
  TmWorld tw = build_tm_world(w, make_tm(tm));
  World world = tw.world;
  size_t cut = pick(0, 1) ? pick(0, 400) : 100000;
  for (size_t s = 0; s < cut && !world.all_done(); ++s) {
    std::vector<Pid> live;
    for (Pid p = 0; p < static_cast<Pid>(world.nprocs()); ++p)
      if (!world.proc(p).done()) live.push_back(p);
    world.step(live[pick(0, live.size() - 1)]);
  }
  return tw.history(world.to_execution(!world.all_done()));
}

// Exhaustive maximum of pairwise non-overlapping RAW patterns.
inline int brute_raws(const std::vector<Event>& tr) {
  std::vector<std::pair<size_t, size_t>> pats;
  for (size_t i = 0; i < tr.size(); ++i) {
    if (!tr[i].direct() || tr[i].prim.kind != PrimKind::Write) continue;
    for (size_t j = i + 1; j < tr.size(); ++j) {
      if (!tr[j].direct()) continue;
      if (tr[j].obj == tr[i].obj) break;
      if (tr[j].prim.kind == PrimKind::Read) pats.push_back({i, j});
    }
  }
  std::function<int(size_t, long)> best = [&](size_t from, long after) {
    int m = 0;
    for (size_t k = from; k < pats.size(); ++k)
      if (static_cast<long>(pats[k].first) > after) m = std::max(m, 1 + best(k + 1, static_cast<long>(pats[k].second)));
    return m;
  };
  std::sort(pats.begin(), pats.end());
  return best(0, -1);
}

inline Event prim_event(Pid p, TxnId txn, ObjId obj, PrimKind k, bool trivial, bool cached = false) {
  Event e;
  e.proc = p;
  e.txn = txn;
  e.kind = EvKind::Prim;
  e.obj = obj;
  e.prim.kind = k;
  e.trivial = trivial;
  e.cached = cached;
  return e;
}

inline std::vector<Event> random_trace(std::mt19937_64& rng, size_t max_len = 20, int nobj = 4) {
  std::vector<Event> tr;
  size_t n = std::uniform_int_distribution<size_t>(0, max_len)(rng);
  for (size_t i = 0; i < n; ++i) {
    int k = std::uniform_int_distribution<int>(0, 9)(rng);
    PrimKind pk = k < 4 ? PrimKind::Read : k < 8 ? PrimKind::Write : k < 9 ? PrimKind::Cas : PrimKind::Fadd;
    ObjId o = std::uniform_int_distribution<int>(0, nobj - 1)(rng);
    bool trivial = pk == PrimKind::Read || (pk == PrimKind::Cas && (rng() & 1));
    tr.push_back(prim_event(0, 1, o, pk, trivial));
  }
  return tr;
}

struct Fixture {
  std::string name;
  std::vector<Event> log;
  std::map<TxnId, int> stalls;
  std::map<Pid, int> cc;
  std::map<Pid, int> dsm;
};

// Objects a, b, c homed at p0, p1, p2; process p runs transaction 10 + p.
inline Layout fixture_layout() {
  Layout l;
  l.add("a", Value(0), ObjClass::Meta, -1, 0);
  l.add("b", Value(0), ObjClass::Meta, -1, 1);
  l.add("c", Value(0), ObjClass::Meta, -1, 2);
  return l;
}

inline std::vector<Fixture> metric_fixtures() {
  const ObjId a = 0, b = 1, c = 2;
  auto R = [](Pid p, ObjId o) { return prim_event(p, 10 + p, o, PrimKind::Read, true); };
  auto W = [](Pid p, ObjId o) { return prim_event(p, 10 + p, o, PrimKind::Write, false); };
  auto F = [](Pid p, ObjId o) { return prim_event(p, 10 + p, o, PrimKind::Fadd, false); };
  auto failed_cas = [](Pid p, ObjId o) { return prim_event(p, 10 + p, o, PrimKind::Cas, true); };
  Event inv;
  inv.proc = 2;
  inv.txn = 12;
  inv.kind = EvKind::Invoke;
  Event cached = prim_event(2, 12, a, PrimKind::Read, true, true);
  std::vector<Fixture> fx;
  fx.push_back({"two writers then reader", {W(1, a), W(2, a), R(0, a)}, {{10, 2}, {11, 0}, {12, 1}},
                {{0, 1}, {1, 1}, {2, 1}}, {{0, 0}, {1, 1}, {2, 1}}});
  fx.push_back({"same writer twice", {W(1, a), W(1, a), R(0, a)}, {{10, 1}, {11, 0}},
                {{0, 1}, {1, 2}}, {{0, 0}, {1, 2}}});
  fx.push_back({"trivial read breaks run", {W(1, a), R(2, a), R(0, a)}, {{10, 0}, {11, 0}, {12, 1}},
                {{0, 1}, {1, 1}, {2, 1}}, {{0, 0}, {1, 1}, {2, 1}}});
  fx.push_back({"other object breaks run", {W(1, b), W(2, a), R(0, a)}, {{10, 1}, {11, 0}, {12, 0}},
                {{0, 1}, {1, 1}, {2, 1}}, {{0, 0}, {1, 0}, {2, 1}}});
  fx.push_back({"cached copies", {R(0, a), R(0, a), W(1, a), R(0, a), R(0, a)}, {{10, 1}, {11, 0}},
                {{0, 2}, {1, 1}}, {{0, 0}, {1, 1}}});
  fx.push_back({"failed cas", {failed_cas(1, a), R(0, a)}, {{10, 0}, {11, 0}}, {{0, 1}, {1, 1}},
                {{0, 0}, {1, 1}}});
  fx.push_back({"fetch-and-add chain", {F(1, a), F(2, a), F(1, a), F(0, a)}, {{10, 2}, {11, 1}, {12, 1}},
                {{0, 1}, {1, 2}, {2, 1}}, {{0, 0}, {1, 2}, {2, 1}}});
  fx.push_back({"invocation is transparent", {W(1, a), inv, R(0, a)}, {{10, 1}, {11, 0}}, {{0, 1}, {1, 1}},
                {{0, 0}, {1, 1}}});
  fx.push_back({"cached access breaks run", {W(1, a), cached, R(0, a)}, {{10, 0}, {11, 0}, {12, 0}},
                {{0, 1}, {1, 1}}, {{0, 0}, {1, 1}}});
  fx.push_back({"mixed objects", {W(0, b), R(1, b), W(2, c), R(1, c), R(1, b), R(0, b)},
                {{10, 0}, {11, 2}, {12, 0}}, {{0, 1}, {1, 2}, {2, 1}}, {{0, 2}, {1, 1}, {2, 0}}});
  return fx;
}

}  // namespace tmlab::testing
