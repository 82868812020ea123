#include "tmlab/strongprog.hpp"

#include <stdexcept>

namespace tmlab {

void Trylock::setup(Layout& layout, size_t nprocs, const std::vector<std::string>& objs, bool doorway) {
  nprocs_ = nprocs;
  doorway_ = doorway;
  r_.assign(nprocs, {});
  la_.clear();
  mc_.clear();
  for (size_t i = 0; i < nprocs; ++i) {
    Pid p = static_cast<Pid>(i);
    std::string s = std::to_string(i);
    la_.push_back(layout.add("LA_" + s, Value(0), ObjClass::Meta, -1, p));
    mc_.push_back(layout.add("MC_" + s, Value(kWhite), ObjClass::Meta, -1, p));
    for (const auto& o : objs) r_[i].push_back(layout.add("r_" + s + "_" + o, Value(0), ObjClass::Meta, -1, p));
  }
  color_ = layout.add("color", Value(kWhite), ObjClass::Meta, -1, 0);
}

bool Trylock::is_contended(Ctx& c, int x) const {
  for (size_t k = 0; k < nprocs_; ++k)
    if (static_cast<Pid>(k) != c.pid() && c.read(r_[k][x]) != Value(0)) return true;
  return false;
}

void Trylock::acquire(Ctx& c, const std::vector<int>& q) const {
  Pid i = c.pid();
  for (int x : q) c.write(r_[i][x], Value(1));
  int64_t ci = c.read(color_).as_int();
  c.write(mc_[i], Value(ci));
  int64_t mx = 0;
  for (size_t k = 0; k < nprocs_; ++k) {
    if (static_cast<Pid>(k) == i) continue;
    int64_t mck = c.read(mc_[k]).as_int();
    int64_t lak = c.read(la_[k]).as_int();
    if (mck == ci) mx = std::max(mx, lak);
  }
  int64_t la = mx + 1;
  c.write(la_[i], Value(la));
  c.spin_while([&] {
    for (int x : q) {
      for (size_t k = 0; k < nprocs_; ++k) {
        Pid kp = static_cast<Pid>(k);
        if (kp == i || c.read(r_[k][x]) == Value(0)) continue;
        int64_t lak = c.read(la_[k]).as_int();
        if (lak == 0) {
          if (doorway_) return true;
          continue;
        }
        int64_t mck = c.read(mc_[k]).as_int();
        if (mck == ci) {
          if (lak < la || (lak == la && kp < i)) return true;
        } else if (c.read(color_).as_int() == ci) {
          return true;
        }
      }
    }
    return false;
  });
}

void Trylock::release(Ctx& c, const std::vector<int>& q) const {
  Pid i = c.pid();
  for (int x : q) c.write(r_[i][x], Value(0));
  int64_t mc = c.read(mc_[i]).as_int();
  c.write(color_, Value(mc == kBlack ? kWhite : kBlack));
  c.write(la_[i], Value(0));
}

void StrongTm::setup(Layout& layout, const TmEnv& env) {
  v_.clear();
  for (size_t j = 0; j < env.tobjs.size(); ++j)
    v_.push_back(layout.add("v_" + env.tobjs[j], Value::tuple({env.init[j], Value(0)}), ObjClass::Data,
                            static_cast<int>(j), 0));
  lock_.setup(layout, env.nprocs, env.tobjs, doorway_);
}

bool StrongTm::is_abortable(Ctx& c, const TxnState& t) const {
  for (const auto& [x, seen] : t.rset)
    if (!t.wset.count(x) && lock_.is_contended(c, x)) return true;
  for (const auto& [x, seen] : t.rset)
    if (c.read(v_[x]) != seen) return true;
  return false;
}

std::optional<Value> StrongTm::read(Ctx& c, TxnState& t, int x) const {
  if (auto w = t.wset.find(x); w != t.wset.end()) return w->second;
  if (auto r = t.rset.find(x); r != t.rset.end()) return r->second.at(0);
  Value cur = c.read(v_[x]);
  t.rset[x] = cur;
  if (is_abortable(c, t)) return std::nullopt;
  return cur.at(0);
}

bool StrongTm::write(Ctx&, TxnState& t, int x, const Value& v) const {
  t.wset[x] = v;
  return true;
}

bool StrongTm::try_commit(Ctx& c, TxnState& t) const {
  if (t.wset.empty()) return true;
  std::vector<int> q;
  for (const auto& [x, nv] : t.wset) q.push_back(x);
  lock_.acquire(c, q);
  if (is_abortable(c, t)) {
    lock_.release(c, q);
    return false;
  }
  for (const auto& [x, nv] : t.wset) c.write(v_[x], Value::tuple({nv, Value(t.id)}));
  lock_.release(c, q);
  return true;
}

World build_trylock_world(const TrylockSpec& spec) {
  auto layout = std::make_shared<Layout>();
  auto lock = std::make_shared<Trylock>();
  std::vector<std::string> objs;
  for (size_t j = 0; j < spec.nobjs; ++j) objs.push_back("X" + std::to_string(j));
  lock->setup(*layout, spec.sets.size(), objs, spec.doorway);
  std::shared_ptr<const Trylock> cl = lock;
  std::vector<Process> procs;
  for (size_t p = 0; p < spec.sets.size(); ++p) {
    auto items = std::make_shared<std::vector<Process::Item>>();
    std::vector<int> q = spec.sets[p];
    for (int round = 0; round < spec.rounds; ++round) {
      TxnId id = static_cast<TxnId>((p + 1) * 1000 + round + 1);
      OpDesc entry{Level::Mutex, id, OpKind::Entry, -1, {}};
      OpDesc exit{Level::Mutex, id, OpKind::Exit, -1, {}};
      items->push_back([cl, q, id, entry](Ctx& c, PState& s) {
        c.set_txn(id);
        c.invoke(entry);
        cl->acquire(c, q);
        c.respond(entry, Tok::Ok);
        s.vars["holds"] = 1;
      });
      items->push_back([id, exit](Ctx& c, PState& s) {
        c.set_txn(id);
        c.invoke(exit);
        s.vars["holds"] = 0;
      });
      items->push_back([cl, q, id, exit](Ctx& c, PState&) {
        c.set_txn(id);
        cl->release(c, q);
        c.respond(exit, Tok::Ok);
      });
    }
    procs.emplace_back(static_cast<Pid>(p), "p" + std::to_string(p + 1), items);
  }
  return World(layout, std::move(procs));
}

World build_mutex_world(const MutexSpec& spec) {
  if (spec.nprocs < 1) throw std::invalid_argument("mutex needs a process");
  auto layout = std::make_shared<Layout>();
  auto tm = std::make_shared<StrongTm>(spec.doorway);
  TmEnv env;
  env.tobjs = {"X"};
  env.init = {Value()};
  env.nprocs = spec.nprocs;
  tm->setup(*layout, env);
  size_t n = spec.nprocs;
  std::vector<std::vector<ObjId>> done(n), succ(n), lk(n, std::vector<ObjId>(n, -1));
  for (size_t p = 0; p < n; ++p) {
    Pid pid = static_cast<Pid>(p);
    for (int f = 0; f < 2; ++f) {
      std::string tag = std::to_string(p) + "_" + std::to_string(f);
      done[p].push_back(layout->add("Done_" + tag, Value(false), ObjClass::Meta, -1, pid));
      succ[p].push_back(layout->add("Succ_" + tag, Value(), ObjClass::Meta, -1, pid));
    }
    for (size_t q = 0; q < n; ++q)
      lk[p][q] = layout->add("Lock_" + std::to_string(p) + "_" + std::to_string(q), Value(0), ObjClass::Meta,
                             -1, pid);
  }
  std::shared_ptr<const StrongTm> ctm = tm;
  std::vector<Process> procs;
  for (size_t p = 0; p < n; ++p) {
    auto items = std::make_shared<std::vector<Process::Item>>();
    for (int round = 0; round < spec.entries; ++round) {
      OpDesc entry{Level::Mutex, round, OpKind::Entry, -1, {}};
      OpDesc exit{Level::Mutex, round, OpKind::Exit, -1, {}};
      items->push_back([ctm, done, succ, lk, entry](Ctx& c, PState& s) {
        Pid i = c.pid();
        int64_t f = 1 - s.var("face");
        s.vars["face"] = f;
        c.invoke(entry);
        c.write(done[i][f], Value(false));
        c.write(succ[i][f], Value());
        Value prev;
        for (;;) {
          TxnState t;
          t.id = static_cast<TxnId>((i + 1) * 10000 + ++s.vars["attempts"]);
          t.live = true;
          if (!run_top(c, *ctm, t, {OpKind::Read, 0, {}}, &prev)) continue;
          if (!run_top(c, *ctm, t, {OpKind::Write, 0, Value::tuple({Value(i), Value(f)})})) continue;
          if (run_top(c, *ctm, t, {OpKind::TryC, -1, {}})) break;
        }
        c.set_txn(kNoTxn);
        if (!prev.is_nil()) {
          auto pp = static_cast<size_t>(prev.at(0).as_int());
          auto pf = static_cast<size_t>(prev.at(1).as_int());
          c.write(lk[i][pp], Value(1));
          c.write(succ[pp][pf], Value(i));
          if (c.read(done[pp][pf]) == Value(false))
            c.spin_while([&] { return c.read(lk[i][pp]) == Value(1); });
        }
        c.respond(entry, Tok::Ok);
        s.vars["cs"] = 1;
      });
      items->push_back([exit](Ctx& c, PState& s) {
        c.invoke(exit);
        s.vars["cs"] = 0;
      });
      items->push_back([done, succ, lk, exit](Ctx& c, PState& s) {
        Pid i = c.pid();
        int64_t f = s.var("face");
        c.write(done[i][f], Value(true));
        Value sc = c.read(succ[i][f]);
        if (!sc.is_nil()) c.write(lk[sc.as_int()][i], Value(0));
        c.respond(exit, Tok::Ok);
      });
    }
    procs.emplace_back(static_cast<Pid>(p), "p" + std::to_string(p + 1), items);
  }
  return World(layout, std::move(procs));
}

}  // namespace tmlab
