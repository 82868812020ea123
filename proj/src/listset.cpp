#include "tmlab/listset.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace tmlab {

int ElemTable::add(const std::string& name, Value v) {
  names.push_back(name);
  init.push_back(std::move(v));
  return static_cast<int>(names.size()) - 1;
}

ElemTable initial_elems(const std::set<int64_t>& initial) {
  ElemTable t;
  int first = initial.empty() ? 1 : 2;
  t.add("head", Value::tuple({Value(kNegInf), Value(first)}));
  t.add("tail", Value::tuple({Value(kPosInf), Value(1)}));
  int i = 0, n = static_cast<int>(initial.size());
  for (int64_t k : initial) {
    int next = i + 1 < n ? i + 3 : 1;
    t.add("X" + std::to_string(k), Value::tuple({Value(k), Value(next)}));
    ++i;
  }
  return t;
}

bool ll_apply(std::vector<Value>& elems, OpKind kind, int64_t v, int newelem, std::vector<Access>* trace) {
  auto rd = [&](int e) {
    if (trace) trace->push_back({false, e, elems.at(e), {}});
    return elems.at(e);
  };
  auto wr = [&](int e, Value nv, Value node) {
    if (trace) trace->push_back({true, e, nv, node});
    if (!node.is_nil()) elems.at(newelem) = node;
    elems.at(e) = std::move(nv);
  };
  int prev = 0;
  Value pv = rd(0);
  int curr = static_cast<int>(pv.at(1).as_int());
  Value cv = rd(curr);
  while (cv.at(0).as_int() < v) {
    prev = curr;
    pv = cv;
    curr = static_cast<int>(cv.at(1).as_int());
    cv = rd(curr);
  }
  bool found = cv.at(0).as_int() == v;
  switch (kind) {
    case OpKind::Contains:
      return found;
    case OpKind::Insert:
      if (found) return false;
      wr(prev, Value::tuple({pv.at(0), Value(newelem)}), Value::tuple({Value(v), Value(curr)}));
      return true;
    case OpKind::Remove:
      if (!found) return false;
      wr(prev, Value::tuple({pv.at(0), cv.at(1)}), {});
      return true;
    default:
      throw std::invalid_argument("not a set operation");
  }
}

struct ListImplState {
  OpKind kind = OpKind::Contains;
  int op = -1;
  TxnState txn;
  std::vector<std::pair<int, int64_t>> rbuf;
  std::vector<int> shared;
  bool head_held = false;
};

void ListImpl::begin(Ctx&, ListImplState&) const {}
bool ListImpl::end(Ctx&, ListImplState&) const { return true; }

namespace {

class SeqList : public ListImpl {
 public:
  std::string name() const override { return "seq"; }
  void setup(Layout& layout, const ElemTable& elems, size_t, size_t) override {
    for (size_t e = 0; e < elems.names.size(); ++e)
      val_.push_back(layout.add(elems.names[e], elems.init[e], ObjClass::Data, static_cast<int>(e)));
  }
  std::optional<Value> read(Ctx& c, ListImplState&, int elem) const override { return c.read(val_.at(elem)); }
  bool write(Ctx& c, ListImplState&, int elem, const Value& nv, const Value& node, int newelem) const override {
    if (newelem >= 0) c.write(val_.at(newelem), node);
    c.write(val_.at(elem), nv);
    return true;
  }
  ObjId value_obj(int elem) const override { return val_.at(elem); }

 private:
  std::vector<ObjId> val_;
};

// Lock word: 0 free, -1 exclusive, n > 0 held shared by n readers.
class HohList : public ListImpl {
 public:
  std::string name() const override { return "ih"; }
  void setup(Layout& layout, const ElemTable& elems, size_t, size_t) override {
    for (size_t e = 0; e < elems.names.size(); ++e) {
      val_.push_back(layout.add(elems.names[e], elems.init[e], ObjClass::Data, static_cast<int>(e)));
      lk_.push_back(layout.add("lock_" + elems.names[e], Value(0)));
    }
  }
  std::optional<Value> read(Ctx& c, ListImplState& s, int elem) const override {
    if (s.kind == OpKind::Contains) {
      lock_shared(c, elem);
      if (!s.shared.empty()) {
        c.fadd(lk_.at(s.shared.back()), -1);
        s.shared.pop_back();
      }
      s.shared.push_back(elem);
    } else if (elem == 0 && !s.head_held) {
      lock_excl(c, 0);
      s.head_held = true;
    }
    return c.read(val_.at(elem));
  }
  bool write(Ctx& c, ListImplState& s, int elem, const Value& nv, const Value& node, int newelem) const override {
    bool own = elem == 0 && s.head_held;
    if (!own) lock_excl(c, elem);
    if (newelem >= 0) c.write(val_.at(newelem), node);
    c.write(val_.at(elem), nv);
    if (!own) c.write(lk_.at(elem), Value(0));
    return true;
  }
  bool end(Ctx& c, ListImplState& s) const override {
    for (int e : s.shared) c.fadd(lk_.at(e), -1);
    s.shared.clear();
    if (s.head_held) c.write(lk_.at(0), Value(0));
    s.head_held = false;
    return true;
  }
  ObjId value_obj(int elem) const override { return val_.at(elem); }

 private:
  void lock_shared(Ctx& c, int elem) const {
    ObjId l = lk_.at(elem);
    c.spin_while([&] {
      int64_t n = c.read(l).as_int();
      return n < 0 || !c.cas(l, Value(n), Value(n + 1));
    });
  }
  void lock_excl(Ctx& c, int elem) const {
    ObjId l = lk_.at(elem);
    c.spin_while([&] { return !c.cas(l, Value(0), Value(-1)); });
  }

  std::vector<ObjId> val_, lk_;
};

class TmList : public ListImpl {
 public:
  explicit TmList(std::string tm) : tm_name_(std::move(tm)), tm_(make_tm(tm_name_)) {}
  std::string name() const override { return "itm:" + tm_name_; }
  void setup(Layout& layout, const ElemTable& elems, size_t nprocs, size_t nops) override {
    TmEnv env;
    env.tobjs = elems.names;
    env.init = elems.init;
    env.nprocs = nprocs;
    for (size_t i = 0; i < nops; ++i) env.txns.push_back(static_cast<TxnId>(i + 1));
    tm_->setup(layout, env);
  }
  std::optional<Value> read(Ctx& c, ListImplState& s, int elem) const override {
    if (!s.txn.live) return std::nullopt;
    auto v = tm_->read(c, s.txn, elem);
    if (!v) s.txn.live = false;
    return v;
  }
  bool write(Ctx& c, ListImplState& s, int elem, const Value& nv, const Value& node, int newelem) const override {
    if (!s.txn.live) return false;
    if ((newelem >= 0 && !tm_->write(c, s.txn, newelem, node)) || !tm_->write(c, s.txn, elem, nv)) {
      s.txn.live = false;
      return false;
    }
    return true;
  }
  bool end(Ctx& c, ListImplState& s) const override { return s.txn.live && tm_->try_commit(c, s.txn); }

 private:
  std::string tm_name_;
  std::shared_ptr<Tm> tm_;
};

// Per element: value, removal flag, and a versioned lock Tuple(ver, locked).
class RmList : public ListImpl {
 public:
  std::string name() const override { return "irm"; }
  void setup(Layout& layout, const ElemTable& elems, size_t, size_t) override {
    for (size_t e = 0; e < elems.names.size(); ++e) {
      const std::string& n = elems.names[e];
      tv_.push_back(layout.add(n, elems.init[e], ObjClass::Data, static_cast<int>(e)));
      rf_.push_back(layout.add("r_" + n, Value(false)));
      lk_.push_back(layout.add("L_" + n, lock(0, false)));
    }
  }
  std::optional<Value> read(Ctx& c, ListImplState& s, int elem) const override {
    Value l1 = c.read(lk_.at(elem));
    Value v = c.read(tv_.at(elem));
    Value r = c.read(rf_.at(elem));
    Value l2 = c.read(lk_.at(elem));
    int64_t ver = l1.at(0).as_int();
    if (ver != l2.at(0).as_int() || r.as_bool()) return std::nullopt;
    s.rbuf.emplace_back(elem, ver);
    if (s.rbuf.size() > 2) s.rbuf.erase(s.rbuf.begin());
    return v;
  }
  bool write(Ctx& c, ListImplState& s, int elem, const Value& nv, const Value& node, int newelem) const override {
    int64_t ver = version_of(s, elem);
    if (newelem >= 0) {
      c.write(tv_.at(newelem), node);
      if (!c.cas(lk_.at(elem), lock(ver, false), lock(ver, true))) return false;
      c.write(tv_.at(elem), nv);
      c.write(lk_.at(elem), lock(ver + 1, false));
      return true;
    }
    auto other = std::find_if(s.rbuf.begin(), s.rbuf.end(), [&](const auto& p) { return p.first != elem; });
    if (other == s.rbuf.end()) throw std::logic_error("remove without a successor in rbuf");
    int e2 = other->first;
    int64_t ver2 = other->second;
    if (!c.cas(lk_.at(elem), lock(ver, false), lock(ver, true))) return false;
    if (!c.cas(lk_.at(e2), lock(ver2, false), lock(ver2, true))) {
      c.write(lk_.at(elem), lock(ver, false));
      return false;
    }
    c.write(rf_.at(e2), Value(true));
    c.write(tv_.at(elem), nv);
    c.write(lk_.at(elem), lock(ver + 1, false));
    c.write(lk_.at(e2), lock(ver2 + 1, false));
    return true;
  }
  ObjId value_obj(int elem) const override { return tv_.at(elem); }

 private:
  static Value lock(int64_t ver, bool held) { return Value::tuple({Value(ver), Value(held)}); }
  static int64_t version_of(const ListImplState& s, int elem) {
    for (auto it = s.rbuf.rbegin(); it != s.rbuf.rend(); ++it)
      if (it->first == elem) return it->second;
    throw std::logic_error("write to an element not in rbuf");
  }

  std::vector<ObjId> tv_, rf_, lk_;
};

// One set operation: LL over the implementation's read/write hooks, with
// Access-level events around each hook and Set-level events around the whole.
void run_set_op(Ctx& c, const ListImpl& impl, int opid, OpKind kind, int64_t v, int newelem) {
  OpDesc d;
  d.level = Level::Set;
  d.id = opid;
  d.kind = kind;
  d.arg = Value(v);
  c.set_txn(opid + 1);
  c.invoke(d);
  ListImplState s;
  s.kind = kind;
  s.op = opid;
  s.txn.id = opid + 1;
  s.txn.live = true;
  impl.begin(c, s);
  auto access = [&](bool write, int elem, Value arg) {
    OpDesc a;
    a.level = Level::Access;
    a.id = opid;
    a.kind = write ? OpKind::Write : OpKind::Read;
    a.obj = elem;
    a.arg = std::move(arg);
    return a;
  };
  auto rd = [&](int elem) -> std::optional<Value> {
    OpDesc a = access(false, elem, {});
    c.invoke(a);
    auto r = impl.read(c, s, elem);
    if (!r) {
      c.respond(a, Tok::Bot);
      return std::nullopt;
    }
    c.respond(a, Tok::Val, *r);
    return r;
  };
  auto wr = [&](int elem, const Value& nv, const Value& node) {
    OpDesc a = access(true, elem, Value::tuple({nv, node}));
    c.invoke(a);
    bool ok = impl.write(c, s, elem, nv, node, node.is_nil() ? -1 : newelem);
    c.respond(a, ok ? Tok::Ok : Tok::Bot);
    return ok;
  };
  auto body = [&]() -> std::optional<bool> {
    int prev = 0;
    auto pv = rd(0);
    if (!pv) return std::nullopt;
    int curr = static_cast<int>(pv->at(1).as_int());
    auto cv = rd(curr);
    if (!cv) return std::nullopt;
    while (cv->at(0).as_int() < v) {
      prev = curr;
      pv = cv;
      curr = static_cast<int>(cv->at(1).as_int());
      cv = rd(curr);
      if (!cv) return std::nullopt;
    }
    bool found = cv->at(0).as_int() == v;
    if (kind == OpKind::Contains) return found;
    if (kind == OpKind::Insert) {
      if (found) return false;
      if (!wr(prev, Value::tuple({pv->at(0), Value(newelem)}), Value::tuple({Value(v), Value(curr)})))
        return std::nullopt;
      return true;
    }
    if (!found) return false;
    if (!wr(prev, Value::tuple({pv->at(0), cv->at(1)}), {})) return std::nullopt;
    return true;
  };
  auto res = body();
  if (res && !impl.end(c, s)) res.reset();
  if (res)
    c.respond(d, Tok::Val, Value(*res));
  else
    c.respond(d, Tok::Bot);
}

OpKind parse_kind(const std::string& s) {
  if (s == "insert") return OpKind::Insert;
  if (s == "remove") return OpKind::Remove;
  if (s == "contains") return OpKind::Contains;
  throw std::invalid_argument("bad set operation '" + s + "'");
}

std::string op_str(const SetOpDecl& o) {
  return o.label + "." + op_name(o.kind) + "(" + std::to_string(o.arg) + ")";
}

std::string point_str(const SetOpDecl& o, const SchedPoint& p) {
  return op_str(o) + "." + (p.write ? "W" : "R") + "(" + p.elem + ")";
}

}  // namespace

std::shared_ptr<ListImpl> make_list_impl(const std::string& name) {
  if (name == "seq") return std::make_shared<SeqList>();
  if (name == "ih") return std::make_shared<HohList>();
  if (name == "irm") return std::make_shared<RmList>();
  if (name.rfind("itm:", 0) == 0) return std::make_shared<TmList>(name.substr(4));
  if (name == "itm") return std::make_shared<TmList>("lp");
  throw std::invalid_argument("unknown list implementation '" + name + "'");
}

SetSchedule parse_set_schedule(const std::string& text) {
  SetSchedule s;
  std::istringstream in(text);
  std::string line, body;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "initial:" || first == "init:") {
      for (std::string t; ls >> t;) s.initial.insert(std::stoll(t));
    } else {
      body += " " + line;
    }
  }
  static const std::regex pt(R"(^\s*(\w+)\.(insert|remove|contains)\((-?\d+)\)\.(R|W)\(([^()\s]+)\)\s*$)");
  std::istringstream bs(body);
  for (std::string part; std::getline(bs, part, '<');) {
    if (part.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::smatch m;
    if (!std::regex_match(part, m, pt)) throw std::invalid_argument("bad schedule point '" + part + "'");
    SetOpDecl o{m[1], parse_kind(m[2]), std::stoll(m[3])};
    auto it = std::find_if(s.ops.begin(), s.ops.end(), [&](const SetOpDecl& x) { return x.label == o.label; });
    if (it == s.ops.end())
      s.ops.push_back(o);
    else if (it->kind != o.kind || it->arg != o.arg)
      throw std::invalid_argument("operation " + o.label + " declared twice");
    s.points.push_back({m[1], m[4] == "W", m[5]});
  }
  if (s.points.empty()) throw std::invalid_argument("empty schedule");
  for (int64_t k : s.initial)
    if (k <= kNegInf || k >= kPosInf) throw std::invalid_argument("key out of range");
  return s;
}

std::string format_set_schedule(const SetSchedule& s) {
  std::ostringstream out;
  out << "initial:";
  for (int64_t k : s.initial) out << ' ' << k;
  out << '\n';
  for (size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    auto it = std::find_if(s.ops.begin(), s.ops.end(), [&](const SetOpDecl& x) { return x.label == p.label; });
    if (it == s.ops.end()) throw std::invalid_argument("point of undeclared operation " + p.label);
    out << (i ? " < " : "") << point_str(*it, p);
  }
  out << '\n';
  return out.str();
}

SetWorld build_set_world(std::shared_ptr<ListImpl> impl, const std::set<int64_t>& initial,
                         const std::vector<std::vector<SetOpDecl>>& procs) {
  ElemTable elems = initial_elems(initial);
  std::set<std::string> used(elems.names.begin(), elems.names.end());
  struct Planned {
    OpKind kind;
    int64_t arg;
    int id;
    int node;
  };
  std::vector<std::vector<Planned>> plan(procs.size());
  int next_id = 0;
  for (size_t p = 0; p < procs.size(); ++p) {
    for (const auto& o : procs[p]) {
      int node = -1;
      if (o.kind == OpKind::Insert) {
        std::string name = "X" + std::to_string(o.arg);
        if (used.count(name)) name += "@" + o.label;
        used.insert(name);
        node = elems.add(name, {});
      }
      plan[p].push_back({o.kind, o.arg, next_id++, node});
    }
  }
  auto layout = std::make_shared<Layout>();
  impl->setup(*layout, elems, procs.size(), static_cast<size_t>(next_id));
  std::shared_ptr<const ListImpl> cimpl = impl;
  std::vector<Process> ps;
  for (size_t p = 0; p < procs.size(); ++p) {
    auto items = std::make_shared<std::vector<Process::Item>>();
    for (const auto& o : plan[p]) {
      items->push_back([cimpl, o](Ctx& c, PState&) { run_set_op(c, *cimpl, o.id, o.kind, o.arg, o.node); });
    }
    std::string name = procs[p].size() == 1 ? procs[p][0].label : "p" + std::to_string(p + 1);
    ps.emplace_back(static_cast<Pid>(p), name, items);
  }
  return SetWorld{World(layout, std::move(ps)), std::move(elems), impl, initial};
}

namespace {

constexpr size_t kPointBudget = 400;

struct Drive {
  AcceptResult res;
  std::vector<Value> final_elems;
};

Drive drive(const std::string& impl_name, const SetSchedule& s, bool strict) {
  std::vector<std::vector<SetOpDecl>> procs;
  for (const auto& o : s.ops) procs.push_back({o});
  SetWorld sw = build_set_world(make_list_impl(impl_name), s.initial, procs);
  World& w = sw.world;
  std::map<std::string, Pid> pid;
  std::map<std::string, size_t> last;
  for (size_t i = 0; i < s.ops.size(); ++i) pid[s.ops[i].label] = static_cast<Pid>(i);
  for (size_t i = 0; i < s.points.size(); ++i) {
    if (!pid.count(s.points[i].label)) throw std::invalid_argument("point of undeclared operation " + s.points[i].label);
    last[s.points[i].label] = i;
  }

  Drive out;
  auto finish = [&](std::string reason) {
    out.res.accepted = reason.empty();
    out.res.reason = std::move(reason);
    out.res.exec = w.to_execution(!w.all_done());
    out.res.history = list_history_of(out.res.exec, s.initial);
    out.res.ls_linearizable = ls_linearizable(out.res.history).holds;
    for (size_t e = 0; e < sw.elems.names.size(); ++e) {
      ObjId o = sw.impl->value_obj(static_cast<int>(e));
      out.final_elems.push_back(o >= 0 ? out.res.exec.final_mem.at(o) : sw.elems.init[e]);
    }
    return out;
  };
  auto is_set_bot = [](const Action& a) {
    return a.kind == EvKind::Respond && a.op.level == Level::Set && a.tok == Tok::Bot;
  };
  // Runs p to completion; returns a rejection reason or "".
  auto run_tail = [&](Pid p, const SetOpDecl& o) -> std::string {
    for (size_t n = 0; n < kPointBudget && !w.proc(p).done(); ++n) {
      const Action& a = w.proc(p).pending();
      if (strict && a.kind == EvKind::Invoke && a.op.level == Level::Access)
        return op_str(o) + " performs an access beyond the schedule";
      if (is_set_bot(a)) {
        w.step(p);
        return op_str(o) + " returned bot";
      }
      w.step(p);
    }
    return w.proc(p).done() ? "" : op_str(o) + " blocked";
  };

  for (size_t i = 0; i < s.points.size(); ++i) {
    const SchedPoint& pt = s.points[i];
    Pid p = pid.at(pt.label);
    const SetOpDecl& o = s.ops[p];
    bool reached = false;
    for (size_t n = 0; n < kPointBudget && !reached; ++n) {
      if (w.proc(p).done()) return finish(op_str(o) + " returned before " + point_str(o, pt));
      Action a = w.proc(p).pending();
      if (is_set_bot(a)) {
        w.step(p);
        return finish(op_str(o) + " returned bot");
      }
      if (a.kind == EvKind::Invoke && a.op.level == Level::Access) {
        bool wr = a.op.kind == OpKind::Write;
        const std::string& name = sw.elems.names.at(a.op.obj);
        if (wr != pt.write || name != pt.elem)
          return finish("expected " + point_str(o, pt) + ", got " + (wr ? "W(" : "R(") + name + ")");
        w.step(p);
        for (size_t m = 0; m < kPointBudget; ++m) {
          Action b = w.proc(p).pending();
          w.step(p);
          if (b.kind == EvKind::Respond && b.op.level == Level::Access) {
            if (b.tok == Tok::Bot) {
              while (!w.proc(p).done() && !is_set_bot(w.proc(p).pending())) w.step(p);
              if (!w.proc(p).done()) w.step(p);
              return finish(point_str(o, pt) + " returned bot");
            }
            reached = true;
            break;
          }
        }
        if (!reached) return finish(point_str(o, pt) + " blocked");
        break;
      }
      w.step(p);
    }
    if (!reached) return finish(point_str(o, pt) + " blocked");
    if (last.at(pt.label) == i) {
      auto r = run_tail(p, o);
      if (!r.empty()) return finish(r);
    }
  }
  for (size_t i = 0; i < s.ops.size(); ++i) {
    if (last.count(s.ops[i].label)) continue;
    auto r = run_tail(static_cast<Pid>(i), s.ops[i]);
    if (!r.empty()) return finish(r);
  }
  return finish("");
}

}  // namespace

AcceptResult schedule_accepts(const std::string& impl, const SetSchedule& s, bool strict) {
  return drive(impl, s, strict).res;
}

bool is_observable(const SetSchedule& s, std::string* why) {
  Drive d = drive("seq", s, false);
  if (!d.res.accepted) {
    if (why) *why = "not a schedule of the sequential list: " + d.res.reason;
    return false;
  }
  ListHistory h = d.res.history;
  std::set<int64_t> keys(s.initial);
  for (const auto& o : s.ops) keys.insert(o.arg);
  int id = static_cast<int>(s.ops.size());
  std::vector<Value> elems = d.final_elems;
  for (int64_t k : keys) {
    std::vector<Access> trace;
    bool r = ll_apply(elems, OpKind::Contains, k, -1, &trace);
    h.high.events.push_back({true, id, OpKind::Contains, k, false, false});
    h.high.events.push_back({false, id, OpKind::Contains, k, false, r});
    h.traces[id] = trace;
    ++id;
  }
  Verdict v = ls_linearizable(h);
  if (!v.holds && why) *why = v.note;
  return v.holds;
}

namespace {

// LL as an explicit state machine over a plain element array, one access
// per call; used to enumerate interleavings without a substrate.
struct LlRun {
  OpKind kind = OpKind::Contains;
  int64_t v = 0;
  int newelem = -1;
  int stage = 0;  // 0 read head, 1 traverse, 2 write, 3 done
  int prev = 0, curr = 0;
  Value pv;

  bool done() const { return stage == 3; }
  SchedPoint step(std::vector<Value>& mem) {
    SchedPoint pt;
    if (stage == 0) {
      pv = mem.at(0);
      curr = static_cast<int>(pv.at(1).as_int());
      pt.elem = "0";
      stage = 1;
      return pt;
    }
    if (stage == 1) {
      Value cv = mem.at(curr);
      pt.elem = std::to_string(curr);
      if (cv.at(0).as_int() < v) {
        prev = curr;
        pv = cv;
        curr = static_cast<int>(cv.at(1).as_int());
        return pt;
      }
      bool found = cv.at(0).as_int() == v;
      bool writes = (kind == OpKind::Insert && !found) || (kind == OpKind::Remove && found);
      if (writes && kind == OpKind::Remove) pv = Value::tuple({pv.at(0), cv.at(1)});
      if (writes && kind == OpKind::Insert) {
        mem.at(newelem) = Value::tuple({Value(v), Value(curr)});
        pv = Value::tuple({pv.at(0), Value(newelem)});
      }
      stage = writes ? 2 : 3;
      return pt;
    }
    pt.write = true;
    pt.elem = std::to_string(prev);
    mem.at(prev) = pv;
    stage = 3;
    return pt;
  }
};

void gen_interleavings(std::vector<LlRun>& runs, std::vector<Value>& mem, std::vector<SchedPoint>& points,
                       size_t max_points, const std::function<void(const std::vector<SchedPoint>&)>& emit) {
  bool all = true;
  for (const auto& r : runs) all = all && r.done();
  if (all) {
    emit(points);
    return;
  }
  if (points.size() >= max_points) return;
  for (size_t p = 0; p < runs.size(); ++p) {
    if (runs[p].done()) continue;
    LlRun saved = runs[p];
    std::vector<Value> mem2 = mem;
    SchedPoint pt = runs[p].step(mem2);
    pt.label = std::to_string(p);
    points.push_back(pt);
    gen_interleavings(runs, mem2, points, max_points, emit);
    points.pop_back();
    runs[p] = saved;
  }
}

void gen_multisets(const std::vector<SetOpDecl>& menu, size_t from, size_t k, std::vector<SetOpDecl>& cur,
                   const std::function<void(const std::vector<SetOpDecl>&)>& f) {
  if (cur.size() == k) {
    f(cur);
    return;
  }
  for (size_t i = from; i < menu.size(); ++i) {
    cur.push_back(menu[i]);
    gen_multisets(menu, i, k, cur, f);
    cur.pop_back();
  }
}

}  // namespace

std::vector<SetSchedule> generate_corpus(const CorpusSpec& spec) {
  std::vector<SetOpDecl> menu;
  for (OpKind k : {OpKind::Insert, OpKind::Remove, OpKind::Contains})
    for (int64_t v : spec.keys) menu.push_back({"", k, v});
  std::vector<SetSchedule> out;
  for (const auto& initial : spec.initial_sets) {
    for (size_t k = spec.min_ops; k <= spec.max_ops; ++k) {
      std::vector<SetOpDecl> cur;
      gen_multisets(menu, 0, k, cur, [&](const std::vector<SetOpDecl>& ms) {
        std::vector<SetOpDecl> ops = ms;
        std::vector<std::vector<SetOpDecl>> procs;
        for (size_t i = 0; i < ops.size(); ++i) {
          ops[i].label = "T" + std::to_string(i + 1);
          procs.push_back({ops[i]});
        }
        SetWorld sw = build_set_world(make_list_impl("seq"), initial, procs);
        std::vector<LlRun> runs;
        int next_node = static_cast<int>(initial.size()) + 2;
        for (const auto& o : ops) {
          LlRun r;
          r.kind = o.kind;
          r.v = o.arg;
          if (o.kind == OpKind::Insert) r.newelem = next_node++;
          runs.push_back(r);
        }
        std::vector<Value> mem = sw.elems.init;
        std::vector<SchedPoint> points;
        gen_interleavings(runs, mem, points, spec.max_points, [&](const std::vector<SchedPoint>& pts) {
          SetSchedule s{initial, ops, pts};
          for (auto& pt : s.points) {
            pt.label = ops[std::stoul(pt.label)].label;
            pt.elem = sw.elems.names.at(std::stoul(pt.elem));
          }
          out.push_back(std::move(s));
        });
      });
    }
  }
  return out;
}

}  // namespace tmlab
