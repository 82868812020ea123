#include "tmlab/tm.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "tmlab/hytm.hpp"
#include "tmlab/oftm.hpp"
#include "tmlab/progressive.hpp"
#include "tmlab/strongprog.hpp"

namespace tmlab {

int Workload::obj_index(const std::string& name) const {
  auto it = std::find(objects.begin(), objects.end(), name);
  return it == objects.end() ? -1 : static_cast<int>(it - objects.begin());
}

std::vector<TxnId> Workload::txn_ids() const {
  std::vector<TxnId> ids;
  for (const auto& p : procs)
    for (const auto& t : p.txns) ids.push_back(t.id);
  return ids;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

int64_t parse_int(const std::string& s) {
  size_t pos = 0;
  long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

OpKind parse_set_kind(const std::string& s) {
  if (s == "insert") return OpKind::Insert;
  if (s == "remove") return OpKind::Remove;
  if (s == "contains") return OpKind::Contains;
  throw std::invalid_argument("bad set operation '" + s + "'");
}

}  // namespace

Workload parse_workload(const std::string& text) {
  Workload w;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<TxnId> seen;
  auto obj_of = [&](const std::string& name) {
    int i = w.obj_index(name);
    if (i >= 0) return i;
    w.objects.push_back(name);
    w.init.push_back(Value(0));
    return static_cast<int>(w.objects.size()) - 1;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    try {
      if (tok[0] == "objects:") {
        for (size_t i = 1; i < tok.size(); ++i) obj_of(tok[i]);
      } else if (tok[0] == "init:" || tok[0] == "init") {
        for (size_t i = 1; i < tok.size(); ++i) {
          auto eq = tok[i].find('=');
          if (eq == std::string::npos) throw std::invalid_argument("expected X=v");
          int o = obj_of(tok[i].substr(0, eq));
          w.init[o] = Value(parse_int(tok[i].substr(eq + 1)));
        }
      } else if (tok[0] == "process") {
        if (tok.size() < 2) throw std::invalid_argument("process needs a name");
        ProcSpec p;
        std::string name = tok[1];
        std::string mode = tok.size() > 2 ? tok[2] : "";
        if (!name.empty() && name.back() == ':') name.pop_back();
        if (!mode.empty() && mode.back() == ':') mode.pop_back();
        if (mode == "fast")
          p.fast = true;
        else if (!mode.empty() && mode != "slow")
          throw std::invalid_argument("unknown process mode '" + mode + "'");
        if (tok.size() > 3) throw std::invalid_argument("trailing tokens after process");
        for (const auto& q : w.procs)
          if (q.name == name) throw std::invalid_argument("duplicate process " + name);
        p.name = name;
        w.procs.push_back(std::move(p));
      } else if (tok[0] == "txn") {
        if (w.procs.empty()) throw std::invalid_argument("txn outside a process");
        auto colon = line.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("txn needs ':'");
        auto head = split_ws(line.substr(0, colon));
        if (head.size() != 2 || head[1].size() < 2 || head[1][0] != 'T')
          throw std::invalid_argument("expected 'txn T<n>:'");
        TxnSpec t;
        t.id = static_cast<TxnId>(parse_int(head[1].substr(1)));
        if (t.id <= 0) throw std::invalid_argument("transaction ids start at 1");
        if (std::find(seen.begin(), seen.end(), t.id) != seen.end())
          throw std::invalid_argument("duplicate transaction " + head[1]);
        seen.push_back(t.id);
        std::string body = line.substr(colon + 1);
        std::istringstream bs(body);
        for (std::string part; std::getline(bs, part, ';');) {
          auto f = split_ws(part);
          if (f.empty()) continue;
          TxnOp op;
          if (f[0] == "R" && f.size() == 2) {
            op.kind = OpKind::Read;
            op.obj = obj_of(f[1]);
          } else if (f[0] == "W" && f.size() == 3) {
            op.kind = OpKind::Write;
            op.obj = obj_of(f[1]);
            op.val = Value(parse_int(f[2]));
          } else if (f[0] == "C" && f.size() == 1) {
            op.kind = OpKind::TryC;
          } else {
            throw std::invalid_argument("bad t-operation '" + part + "'");
          }
          if (!t.ops.empty() && t.ops.back().kind == OpKind::TryC)
            throw std::invalid_argument("t-operation after C");
          t.ops.push_back(op);
        }
        w.procs.back().txns.push_back(std::move(t));
      } else if (tok[0] == "set-op") {
        if (w.procs.empty()) throw std::invalid_argument("set-op outside a process");
        if (tok.size() != 3) throw std::invalid_argument("expected 'set-op <kind> <int>'");
        w.procs.back().set_ops.push_back({parse_set_kind(tok[1]), parse_int(tok[2])});
      } else {
        throw std::invalid_argument("unknown directive '" + tok[0] + "'");
      }
    } catch (const std::exception& ex) {
      throw std::invalid_argument("workload line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return w;
}

std::shared_ptr<Tm> make_tm(const std::string& name) {
  if (name == "lp") return std::make_shared<LpTm>(LpOptions{});
  if (name == "lp-ss") {
    LpOptions o;
    o.ss = true;
    return std::make_shared<LpTm>(o);
  }
  if (name == "strong") return std::make_shared<StrongTm>(true);
  if (name == "of-rw") return std::make_shared<OfTm>(false);
  if (name == "of-weak") return std::make_shared<OfTm>(true);
  if (name == "hytm1") return std::make_shared<HyTm>(false);
  if (name == "hytm2") return std::make_shared<HyTm>(true);
  throw std::invalid_argument("unknown TM '" + name + "'");
}

std::vector<std::string> tm_names() { return {"lp", "lp-ss", "strong", "of-rw", "of-weak", "hytm1", "hytm2"}; }

bool run_top(Ctx& c, const Tm& tm, TxnState& t, const TxnOp& op, Value* out) {
  OpDesc d;
  d.level = Level::Tm;
  d.id = t.id;
  d.kind = op.kind;
  d.obj = op.kind == OpKind::TryC ? -1 : op.obj;
  if (op.kind == OpKind::Write) d.arg = op.val;
  c.set_txn(t.id);
  c.invoke(d);
  switch (op.kind) {
    case OpKind::Read: {
      auto v = tm.read(c, t, op.obj);
      if (!v) break;
      c.respond(d, Tok::Val, *v);
      if (out) *out = *v;
      return true;
    }
    case OpKind::Write:
      if (!tm.write(c, t, op.obj, op.val)) break;
      c.respond(d, Tok::Ok);
      return true;
    case OpKind::TryC:
      if (!tm.try_commit(c, t)) break;
      c.respond(d, Tok::Commit);
      t.live = false;
      return true;
    default:
      throw std::logic_error("not a t-operation");
  }
  c.respond(d, Tok::Abort);
  t.live = false;
  return false;
}

TmWorld build_tm_world(const Workload& w, std::shared_ptr<Tm> tm, size_t ts) {
  auto layout = std::make_shared<Layout>();
  TmEnv env;
  env.tobjs = w.objects;
  env.init = w.init;
  env.nprocs = w.procs.size();
  env.txns = w.txn_ids();
  tm->setup(*layout, env);
  std::shared_ptr<const Tm> ctm = tm;
  std::vector<Process> procs;
  for (size_t p = 0; p < w.procs.size(); ++p) {
    const ProcSpec& ps = w.procs[p];
    auto items = std::make_shared<std::vector<Process::Item>>();
    for (const auto& txn : ps.txns) {
      for (size_t i = 0; i < txn.ops.size(); ++i) {
        TxnId id = txn.id;
        TxnOp op = txn.ops[i];
        bool first = i == 0, fast = ps.fast;
        items->push_back([ctm, id, op, first, fast](Ctx& c, PState& s) {
          if (first) {
            s.txn = TxnState{};
            s.txn.id = id;
            s.txn.live = true;
            s.txn.fast = fast;
          }
          if (!s.txn.live || s.txn.id != id) return;
          bool ok = run_top(c, *ctm, s.txn, op);
          if (!ok)
            ++s.vars["aborts"];
          else if (op.kind == OpKind::TryC)
            ++s.vars["commits"];
        });
      }
    }
    procs.emplace_back(static_cast<Pid>(p), ps.name, items);
  }
  return TmWorld{World(layout, std::move(procs), ts), tm, w.objects, w.init};
}

}  // namespace tmlab
