#include "tmlab/tmapi.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tmlab {

int History::obj_index(const std::string& name) const {
  auto it = std::find(objs.begin(), objs.end(), name);
  return it == objs.end() ? -1 : static_cast<int>(it - objs.begin());
}

int History::add_obj(const std::string& name, Value v) {
  int i = obj_index(name);
  if (i >= 0) {
    init[i] = std::move(v);
    return i;
  }
  objs.push_back(name);
  init.push_back(std::move(v));
  return static_cast<int>(objs.size()) - 1;
}

History History::prefix(size_t n) const {
  History p = *this;
  p.events.resize(std::min(n, events.size()));
  return p;
}

namespace {

Value parse_value(const std::string& s) {
  if (s == "true") return Value(true);
  if (s == "false") return Value(false);
  if (s == "nil") return Value();
  size_t pos = 0;
  long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad value '" + s + "'");
  return Value(static_cast<int64_t>(v));
}

TxnId parse_txn(const std::string& s) {
  if (s.size() < 2 || s[0] != 'T') throw std::invalid_argument("bad transaction name '" + s + "'");
  size_t pos = 0;
  int id = std::stoi(s.substr(1), &pos);
  if (pos != s.size() - 1 || id <= 0)
    throw std::invalid_argument("bad transaction name '" + s + "'");
  return id;
}

OpKind parse_kind(const std::string& s) {
  if (s == "read") return OpKind::Read;
  if (s == "write") return OpKind::Write;
  if (s == "tryC") return OpKind::TryC;
  throw std::invalid_argument("bad t-operation '" + s + "'");
}

}  // namespace

History parse_history(const std::string& text) {
  History h;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto obj_of = [&](const std::string& name) {
    int i = h.obj_index(name);
    return i >= 0 ? i : h.add_obj(name);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    try {
      if (tok[0] == "init" || tok[0] == "init:") {
        for (size_t i = 1; i < tok.size(); ++i) {
          auto eq = tok[i].find('=');
          if (eq == std::string::npos) throw std::invalid_argument("expected X=v");
          h.add_obj(tok[i].substr(0, eq), parse_value(tok[i].substr(eq + 1)));
        }
        continue;
      }
      if (tok[0] == "objects:") {
        for (size_t i = 1; i < tok.size(); ++i) obj_of(tok[i]);
        continue;
      }
      if (tok.size() < 3 || (tok[0] != "inv" && tok[0] != "res"))
        throw std::invalid_argument("expected inv/res line");
      HEvent e;
      e.inv = tok[0] == "inv";
      e.txn = parse_txn(tok[1]);
      e.kind = parse_kind(tok[2]);
      size_t next = 3;
      if (e.kind != OpKind::TryC) {
        if (tok.size() < 4) throw std::invalid_argument("missing t-object");
        e.obj = obj_of(tok[3]);
        next = 4;
      }
      if (e.inv) {
        if (e.kind == OpKind::Write) {
          if (tok.size() != 5) throw std::invalid_argument("write needs a value");
          e.val = parse_value(tok[4]);
        } else if (tok.size() != next) {
          throw std::invalid_argument("trailing tokens");
        }
      } else {
        if (tok.size() != next + 1) throw std::invalid_argument("response needs one value");
        const std::string& r = tok[next];
        if (r == "A") {
          e.tok = Tok::Abort;
        } else if (e.kind == OpKind::TryC) {
          if (r != "C") throw std::invalid_argument("tryC responds C or A");
          e.tok = Tok::Commit;
        } else if (e.kind == OpKind::Write) {
          if (r != "ok") throw std::invalid_argument("write responds ok or A");
          e.tok = Tok::Ok;
        } else {
          e.tok = Tok::Val;
          e.val = parse_value(r);
        }
      }
      h.events.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw std::invalid_argument("history line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return h;
}

std::string format_history(const History& h) {
  std::ostringstream os;
  if (!h.objs.empty()) {
    os << "init";
    for (size_t i = 0; i < h.objs.size(); ++i) os << " " << h.objs[i] << "=" << h.init[i].str();
    os << "\n";
  }
  for (const auto& e : h.events) {
    os << (e.inv ? "inv" : "res") << " T" << e.txn << " " << op_name(e.kind);
    if (e.kind != OpKind::TryC) os << " " << h.objs.at(e.obj);
    if (e.inv) {
      if (e.kind == OpKind::Write) os << " " << e.val.str();
    } else {
      switch (e.tok) {
        case Tok::Abort:
          os << " A";
          break;
        case Tok::Commit:
          os << " C";
          break;
        case Tok::Ok:
          os << " ok";
          break;
        default:
          os << " " << e.val.str();
      }
    }
    os << "\n";
  }
  return os.str();
}

std::vector<TxnInfo> analyze(const History& h) {
  std::map<TxnId, TxnInfo> m;
  for (int i = 0; i < static_cast<int>(h.events.size()); ++i) {
    const HEvent& e = h.events[i];
    TxnInfo& t = m[e.txn];
    t.id = e.txn;
    if (t.first < 0) t.first = i;
    t.last = i;
    auto where = [&] { return "event " + std::to_string(i) + " (T" + std::to_string(e.txn) + ")"; };
    if (e.inv) {
      if (!t.complete) throw std::invalid_argument(where() + ": invocation while an operation is pending");
      if (t.tcomplete) throw std::invalid_argument(where() + ": event after transaction completed");
      TOpRec op;
      op.kind = e.kind;
      op.obj = e.obj;
      op.arg = e.val;
      op.inv = i;
      t.ops.push_back(op);
      t.complete = false;
      if (e.kind == OpKind::TryC) t.tryc_inv = i;
    } else {
      if (t.complete || t.ops.empty()) throw std::invalid_argument(where() + ": response without invocation");
      TOpRec& op = t.ops.back();
      if (op.kind != e.kind || op.obj != e.obj)
        throw std::invalid_argument(where() + ": response does not match invocation");
      op.res = i;
      op.tok = e.tok;
      op.val = e.val;
      t.complete = true;
      if (e.tok == Tok::Abort || e.tok == Tok::Commit) t.tcomplete = true;
    }
  }
  std::vector<TxnInfo> out;
  for (auto& [id, t] : m) {
    if (t.tcomplete)
      t.status = t.ops.back().tok == Tok::Commit ? TxnStatus::Committed : TxnStatus::Aborted;
    else if (!t.complete && t.ops.back().kind == OpKind::TryC)
      t.status = TxnStatus::CommitPending;
    else
      t.status = TxnStatus::Live;
    out.push_back(std::move(t));
  }
  return out;
}

TxnPairs real_time_order(const History& h) {
  auto txns = analyze(h);
  TxnPairs r;
  for (const auto& a : txns)
    for (const auto& b : txns)
      if (a.id != b.id && a.tcomplete && a.last < b.first) r.insert({a.id, b.id});
  return r;
}

std::map<TxnId, DataSet> data_sets(const History& h) {
  std::map<TxnId, DataSet> ds;
  for (const auto& t : analyze(h)) {
    DataSet& d = ds[t.id];
    for (const auto& op : t.ops) {
      if (op.kind == OpKind::Read) d.rset[op.obj] = op.tok == Tok::Val ? op.val : Value();
      if (op.kind == OpKind::Write) d.wset[op.obj] = op.arg;
    }
  }
  return ds;
}

std::vector<History> completions(const History& h) {
  auto txns = analyze(h);
  std::vector<TxnId> pending;
  for (const auto& t : txns)
    if (t.status == TxnStatus::CommitPending) pending.push_back(t.id);
  std::vector<History> out;
  size_t n = size_t{1} << pending.size();
  for (size_t mask = 0; mask < n; ++mask) {
    History c = h;
    for (const auto& t : txns) {
      if (t.tcomplete) continue;
      if (t.status == TxnStatus::CommitPending) {
        size_t bit = std::find(pending.begin(), pending.end(), t.id) - pending.begin();
        bool commit = !((mask >> (pending.size() - 1 - bit)) & 1);
        c.events.push_back({false, t.id, OpKind::TryC, -1, {}, commit ? Tok::Commit : Tok::Abort});
        continue;
      }
      if (!t.complete) {
        const TOpRec& op = t.ops.back();
        c.events.push_back({false, t.id, op.kind, op.obj, {}, Tok::Abort});
        continue;
      }
      c.events.push_back({true, t.id, OpKind::TryC, -1, {}, Tok::Ok});
      c.events.push_back({false, t.id, OpKind::TryC, -1, {}, Tok::Abort});
    }
    out.push_back(std::move(c));
  }
  return out;
}

TxnPairs conflicts(const History& h, const std::map<TxnId, DataSet>& ds) {
  auto rt = real_time_order(h);
  TxnPairs out;
  for (const auto& [a, da] : ds) {
    for (const auto& [b, db] : ds) {
      if (a == b || rt.count({a, b}) || rt.count({b, a})) continue;
      bool hit = false;
      for (const auto& [x, v] : da.wset)
        if (db.wset.count(x) || db.rset.count(x)) hit = true;
      for (const auto& [x, v] : db.wset)
        if (da.rset.count(x)) hit = true;
      if (hit) out.insert({a, b});
    }
  }
  return out;
}

History history_of(const Execution& x, const std::vector<std::string>& objs,
                   const std::vector<Value>& init) {
  History h;
  h.objs = objs;
  h.init = init;
  for (const auto& e : x.events) {
    if (e.kind != EvKind::Invoke && e.kind != EvKind::Respond) continue;
    if (e.op.level != Level::Tm) continue;
    HEvent he;
    he.inv = e.kind == EvKind::Invoke;
    he.txn = e.op.id;
    he.kind = e.op.kind;
    he.obj = e.op.kind == OpKind::TryC ? -1 : e.op.obj;
    if (he.inv) {
      he.val = e.op.arg;
    } else {
      he.tok = e.tok;
      he.val = e.val;
    }
    h.events.push_back(std::move(he));
  }
  return h;
}

}  // namespace tmlab
