#include "tmlab/checkers.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace tmlab {

std::string format_verdict(const Verdict& v, const std::string& property) {
  std::ostringstream os;
  if (v.refused)
    os << "REFUSED " << property;
  else
    os << (v.holds ? "PASS " : "FAIL ") << property;
  os << "\n";
  if (v.holds) {
    os << "witness:";
    for (int t : v.order) os << " T" << t;
    os << "\n";
    if (!v.committed.empty()) {
      os << "completion:";
      for (const auto& [t, c] : v.committed) os << " T" << t << "=" << (c ? "C" : "A");
      os << "\n";
    }
  }
  if (!v.note.empty()) os << "note: " << v.note << "\n";
  return os.str();
}

namespace {

enum class Crit { Final, Du, Strict };

const char* mode_name(Crit m) {
  switch (m) {
    case Crit::Final:
      return "final-state opacity";
    case Crit::Du:
      return "du-opacity";
    default:
      return "strict serializability";
  }
}

// Value T's own latest write to obj among ops[0..upto), or nil if none.
bool own_write(const TxnInfo& t, size_t upto, int obj, Value* out) {
  bool found = false;
  for (size_t i = 0; i < upto; ++i)
    if (t.ops[i].kind == OpKind::Write && t.ops[i].obj == obj) {
      *out = t.ops[i].arg;
      found = true;
    }
  return found;
}

bool last_write(const TxnInfo& t, int obj, Value* out) { return own_write(t, t.ops.size(), obj, out); }

struct Search {
  const History& h;
  Crit mode;
  std::vector<TxnInfo> txns;
  std::vector<bool> committed;
  std::vector<bool> part;
  std::vector<std::vector<int>> preds;
  std::vector<int> order;
  long budget = 50'000'000;

  bool read_ok(int ti, size_t opi) {
    const TxnInfo& t = txns[ti];
    const TOpRec& op = t.ops[opi];
    Value expect;
    if (own_write(t, opi, op.obj, &expect)) return op.val == expect;
    // latest committed writer placed before t
    Value full = h.init.at(op.obj), local = h.init.at(op.obj);
    bool full_set = false, local_set = false;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const TxnInfo& w = txns[*it];
      if (!committed[*it]) continue;
      Value v;
      if (!last_write(w, op.obj, &v)) continue;
      if (!full_set) {
        full = v;
        full_set = true;
      }
      if (!local_set && w.tryc_inv >= 0 && w.tryc_inv < op.res) {
        local = v;
        local_set = true;
      }
      if (full_set && local_set) break;
    }
    if (op.val != full) return false;
    if (mode != Crit::Final && op.val != local) return false;
    return true;
  }

  bool place_ok(int ti) {
    const TxnInfo& t = txns[ti];
    for (size_t i = 0; i < t.ops.size(); ++i) {
      const TOpRec& op = t.ops[i];
      if (op.kind == OpKind::Read && op.res >= 0 && op.tok == Tok::Val && !read_ok(ti, i)) return false;
    }
    return true;
  }

  bool dfs(std::vector<bool>& placed, size_t remaining) {
    if (remaining == 0) return true;
    if (--budget < 0) throw std::runtime_error("search budget exhausted");
    for (size_t i = 0; i < txns.size(); ++i) {
      if (!part[i] || placed[i]) continue;
      bool ready = std::all_of(preds[i].begin(), preds[i].end(), [&](int p) { return placed[p]; });
      if (!ready || !place_ok(static_cast<int>(i))) continue;
      placed[i] = true;
      order.push_back(static_cast<int>(i));
      if (dfs(placed, remaining - 1)) return true;
      order.pop_back();
      placed[i] = false;
    }
    return false;
  }
};

Verdict run_search(const History& h, Crit mode, size_t cap) {
  Verdict v;
  Search s{h, mode, analyze(h)};
  if (s.txns.size() > cap) {
    v.refused = true;
    v.note = std::to_string(s.txns.size()) + " transactions exceed the search cap of " + std::to_string(cap);
    return v;
  }
  size_t n = s.txns.size();
  std::vector<int> pending;
  for (size_t i = 0; i < n; ++i)
    if (s.txns[i].status == TxnStatus::CommitPending) pending.push_back(static_cast<int>(i));
  size_t choices = size_t{1} << pending.size();
  for (size_t mask = 0; mask < choices; ++mask) {
    s.committed.assign(n, false);
    for (size_t i = 0; i < n; ++i) s.committed[i] = s.txns[i].status == TxnStatus::Committed;
    for (size_t b = 0; b < pending.size(); ++b)
      s.committed[pending[b]] = !((mask >> (pending.size() - 1 - b)) & 1);
    s.part.assign(n, true);
    if (mode == Crit::Strict)
      for (size_t i = 0; i < n; ++i) s.part[i] = s.committed[i];
    s.preds.assign(n, {});
    size_t count = 0;
    for (size_t i = 0; i < n; ++i) {
      if (!s.part[i]) continue;
      ++count;
      for (size_t j = 0; j < n; ++j)
        if (j != i && s.part[j] && s.txns[j].tcomplete && s.txns[j].last < s.txns[i].first)
          s.preds[i].push_back(static_cast<int>(j));
    }
    s.order.clear();
    std::vector<bool> placed(n, false);
    if (s.dfs(placed, count)) {
      v.holds = true;
      for (int i : s.order) v.order.push_back(s.txns[i].id);
      for (size_t i = 0; i < n; ++i) v.committed[s.txns[i].id] = s.committed[i];
      return v;
    }
  }
  v.note = std::string("no serialization satisfies ") + mode_name(mode);
  return v;
}

// Builds the t-sequential history described by a witness.
History witness_history(const History& h, const Verdict& v) {
  auto txns = analyze(h);
  History s;
  s.objs = h.objs;
  s.init = h.init;
  for (int id : v.order) {
    auto it = std::find_if(txns.begin(), txns.end(), [&](const TxnInfo& t) { return t.id == id; });
    if (it == txns.end()) throw std::logic_error("witness names unknown transaction");
    bool commit = v.committed.at(id);
    for (const auto& op : it->ops) {
      s.events.push_back({true, id, op.kind, op.obj, op.arg, Tok::Ok});
      if (op.res >= 0) {
        s.events.push_back({false, id, op.kind, op.obj, op.val, op.tok});
      } else if (op.kind == OpKind::TryC) {
        s.events.push_back({false, id, op.kind, -1, {}, commit ? Tok::Commit : Tok::Abort});
      } else {
        s.events.push_back({false, id, op.kind, op.obj, {}, Tok::Abort});
      }
    }
    if (!it->ops.empty() && it->complete && !it->tcomplete) {
      s.events.push_back({true, id, OpKind::TryC, -1, {}, Tok::Ok});
      s.events.push_back({false, id, OpKind::TryC, -1, {}, Tok::Abort});
    }
  }
  return s;
}

}  // namespace

bool is_legal(const History& s) {
  auto txns = analyze(s);
  for (const auto& t : txns) {
    if (!t.tcomplete) throw std::invalid_argument("is_legal needs a t-complete history");
    for (int i = t.first; i <= t.last; ++i)
      if (s.events[i].txn != t.id) throw std::invalid_argument("is_legal needs a t-sequential history");
  }
  std::sort(txns.begin(), txns.end(), [](const TxnInfo& a, const TxnInfo& b) { return a.first < b.first; });
  std::vector<Value> mem = s.init;
  for (const auto& t : txns) {
    std::map<int, Value> local;
    for (const auto& op : t.ops) {
      if (op.kind == OpKind::Write && op.tok != Tok::Abort) local[op.obj] = op.arg;
      if (op.kind == OpKind::Read && op.tok == Tok::Val) {
        auto it = local.find(op.obj);
        const Value& expect = it != local.end() ? it->second : mem.at(op.obj);
        if (op.val != expect) return false;
      }
    }
    if (t.status == TxnStatus::Committed)
      for (const auto& [x, v] : local) mem[x] = v;
  }
  return true;
}

Verdict final_state_opaque(const History& h, size_t cap) { return run_search(h, Crit::Final, cap); }
Verdict du_opaque(const History& h, size_t cap) { return run_search(h, Crit::Du, cap); }
Verdict strictly_serializable(const History& h, size_t cap) { return run_search(h, Crit::Strict, cap); }

Verdict opaque(const History& h, size_t cap) {
  for (size_t n = 0; n <= h.events.size(); ++n) {
    Verdict p = final_state_opaque(h.prefix(n), cap);
    if (p.refused) return p;
    if (!p.holds) {
      Verdict v;
      v.note = "prefix of " + std::to_string(n) + " events is not final-state opaque";
      return v;
    }
  }
  return final_state_opaque(h, cap);
}

bool witness_valid(const History& h, const Verdict& v, TmProperty p) {
  if (!v.holds) return false;
  auto txns = analyze(h);
  std::set<int> in_order(v.order.begin(), v.order.end());
  if (in_order.size() != v.order.size()) return false;
  for (const auto& t : txns) {
    bool commit = v.committed.count(t.id) && v.committed.at(t.id);
    if (t.status == TxnStatus::Committed && !commit) return false;
    if ((t.status == TxnStatus::Aborted || t.status == TxnStatus::Live) && commit) return false;
    bool expected = p != TmProperty::StrictSer || commit;
    if (expected != static_cast<bool>(in_order.count(t.id))) return false;
  }
  for (const auto& [a, b] : real_time_order(h)) {
    auto ia = std::find(v.order.begin(), v.order.end(), a);
    auto ib = std::find(v.order.begin(), v.order.end(), b);
    if (ia != v.order.end() && ib != v.order.end() && ia > ib) return false;
  }
  History s = witness_history(h, v);
  if (!is_legal(s)) return false;
  if (p == TmProperty::DuOpacity || p == TmProperty::StrictSer) {
    // For every read, rebuild S^{k,X}_H explicitly and replay it.
    std::map<int, int> tryc_inv;
    for (const auto& t : txns) tryc_inv[t.id] = t.tryc_inv;
    for (size_t pos = 0; pos < v.order.size(); ++pos) {
      int k = v.order[pos];
      const TxnInfo& tk = *std::find_if(txns.begin(), txns.end(), [&](const TxnInfo& t) { return t.id == k; });
      for (size_t oi = 0; oi < tk.ops.size(); ++oi) {
        const TOpRec& rd = tk.ops[oi];
        if (rd.kind != OpKind::Read || rd.res < 0 || rd.tok != Tok::Val) continue;
        Verdict sub;
        sub.holds = true;
        for (size_t q = 0; q < pos; ++q) {
          int m = v.order[q];
          if (tryc_inv[m] >= 0 && tryc_inv[m] < rd.res) {
            sub.order.push_back(m);
            sub.committed[m] = v.committed.at(m);
          }
        }
        History local = witness_history(h, sub);
        // the reading transaction truncated just after the read, then aborted
        for (size_t q = 0; q <= oi; ++q) {
          const TOpRec& op = tk.ops[q];
          local.events.push_back({true, k, op.kind, op.obj, op.arg, Tok::Ok});
          local.events.push_back({false, k, op.kind, op.obj, op.val, op.tok});
        }
        local.events.push_back({true, k, OpKind::TryC, -1, {}, Tok::Ok});
        local.events.push_back({false, k, OpKind::TryC, -1, {}, Tok::Abort});
        // Only the last read matters; earlier reads of k are legal in S already
        // and their own-write context is preserved.
        std::vector<Value> mem = local.init;
        bool ok = true;
        auto lt = analyze(local);
        std::sort(lt.begin(), lt.end(), [](const TxnInfo& a, const TxnInfo& b) { return a.first < b.first; });
        for (const auto& t : lt) {
          std::map<int, Value> w;
          for (size_t q = 0; q < t.ops.size(); ++q) {
            const auto& op = t.ops[q];
            if (op.kind == OpKind::Write && op.tok != Tok::Abort) w[op.obj] = op.arg;
            if (t.id == k && q == oi) {
              auto it = w.find(op.obj);
              ok = (it != w.end() ? it->second : mem.at(op.obj)) == op.val;
            }
          }
          if (t.status == TxnStatus::Committed)
            for (const auto& [x, val] : w) mem[x] = val;
        }
        if (!ok) return false;
      }
    }
  }
  return true;
}

// ---------------- sets ----------------

namespace {

struct SetOp {
  int id = 0;
  OpKind kind = OpKind::Contains;
  int64_t arg = 0;
  int inv = -1, res = -1;
  bool bot = false;
  bool result = false;
};

bool apply_set(std::set<int64_t>& q, OpKind k, int64_t v) {
  bool present = q.count(v) > 0;
  if (k == OpKind::Insert) {
    q.insert(v);
    return !present;
  }
  if (k == OpKind::Remove) {
    q.erase(v);
    return present;
  }
  return present;
}

}  // namespace

Verdict linearizable_set(const SetHistory& h) {
  std::map<int, SetOp> ops;
  for (int i = 0; i < static_cast<int>(h.events.size()); ++i) {
    const SetEvent& e = h.events[i];
    SetOp& op = ops[e.id];
    op.id = e.id;
    if (e.inv) {
      if (op.inv >= 0) throw std::invalid_argument("set operation invoked twice");
      op.kind = e.kind;
      op.arg = e.arg;
      op.inv = i;
    } else {
      if (op.inv < 0 || op.res >= 0) throw std::invalid_argument("unmatched set response");
      op.res = i;
      op.bot = e.bot;
      op.result = e.result;
    }
  }
  std::vector<SetOp> v;
  for (auto& [id, op] : ops)
    if (!op.bot) v.push_back(op);
  Verdict out;
  if (v.size() > 20) {
    out.refused = true;
    out.note = "too many set operations";
    return out;
  }
  size_t n = v.size();
  uint32_t need = 0;
  for (size_t i = 0; i < n; ++i)
    if (v[i].res >= 0) need |= 1u << i;
  std::unordered_set<std::string> failed;
  std::vector<int> order;
  std::function<bool(uint32_t, std::set<int64_t>&)> dfs = [&](uint32_t placed, std::set<int64_t>& q) {
    if ((placed & need) == need) return true;
    std::string key = std::to_string(placed) + ":";
    for (auto x : q) key += std::to_string(x) + ",";
    if (failed.count(key)) return false;
    for (size_t i = 0; i < n; ++i) {
      if (placed & (1u << i)) continue;
      bool ready = true;
      for (size_t j = 0; j < n && ready; ++j)
        if (j != i && !(placed & (1u << j)) && v[j].res >= 0 && v[j].res < v[i].inv) ready = false;
      if (!ready) continue;
      std::set<int64_t> q2 = q;
      bool r = apply_set(q2, v[i].kind, v[i].arg);
      if (v[i].res >= 0 && r != v[i].result) continue;
      order.push_back(v[i].id);
      if (dfs(placed | (1u << i), q2)) return true;
      order.pop_back();
    }
    failed.insert(key);
    return false;
  };
  std::set<int64_t> q = h.initial;
  if (dfs(0, q)) {
    out.holds = true;
    out.order = order;
  } else {
    out.note = "no linearization matches the set specification";
  }
  return out;
}

bool locally_serializable_list(const std::vector<Access>& trace, OpKind kind, int64_t param,
                               bool complete, bool result) {
  size_t i = 0;
  int expect_elem = 0;  // head
  int64_t last_key = kNegInf - 1;
  const Access* prev = nullptr;
  const Access* curr = nullptr;
  bool stopped = false;
  for (; i < trace.size() && !trace[i].write; ++i) {
    const Access& a = trace[i];
    if (stopped) return false;
    if (a.elem != expect_elem) return false;
    if (!a.val.is_tuple() || a.val.size() != 2) return false;
    int64_t key = a.val.at(0).as_int();
    if (key <= last_key) return false;
    if (i == 0 && key != kNegInf) return false;
    last_key = key;
    prev = curr;
    curr = &a;
    if (key >= param && i > 0) {
      stopped = true;
      continue;
    }
    if (key >= kPosInf) return false;
    expect_elem = static_cast<int>(a.val.at(1).as_int());
  }
  if (!stopped) {
    // a prefix of reads with no final element yet, and nothing after it
    return !complete && i == trace.size();
  }
  int64_t key = curr->val.at(0).as_int();
  bool found = key == param;
  size_t writes = trace.size() - i;
  for (size_t j = i; j < trace.size(); ++j)
    if (!trace[j].write) return false;
  auto expect_result = [&](bool r) { return !complete || r == result; };
  switch (kind) {
    case OpKind::Contains:
      return writes == 0 && expect_result(found);
    case OpKind::Insert: {
      if (found) return writes == 0 && expect_result(false);
      if (writes == 0) return !complete;
      if (writes != 1 || prev == nullptr) return false;
      const Access& w = trace[i];
      if (w.elem != prev->elem) return false;
      if (!w.val.is_tuple() || w.val.size() != 2) return false;
      if (w.val.at(0) != prev->val.at(0)) return false;
      if (!w.node.is_tuple() || w.node.size() != 2) return false;
      if (w.node.at(0).as_int() != param) return false;
      if (w.node.at(1).as_int() != curr->elem) return false;
      if (w.val.at(1).as_int() == curr->elem) return false;
      return expect_result(true);
    }
    case OpKind::Remove: {
      if (!found) return writes == 0 && expect_result(false);
      if (writes == 0) return !complete;
      if (writes != 1 || prev == nullptr) return false;
      const Access& w = trace[i];
      if (w.elem != prev->elem) return false;
      if (!w.val.is_tuple() || w.val.size() != 2) return false;
      if (w.val.at(0) != prev->val.at(0)) return false;
      if (w.val.at(1) != curr->val.at(1)) return false;
      return expect_result(true);
    }
    default:
      return false;
  }
}

ListHistory list_history_of(const Execution& x, const std::set<int64_t>& initial) {
  ListHistory lh;
  lh.high.initial = initial;
  std::map<int, Access> open;
  for (const auto& e : x.events) {
    if (e.kind != EvKind::Invoke && e.kind != EvKind::Respond) continue;
    if (e.op.level == Level::Set) {
      SetEvent se;
      se.inv = e.kind == EvKind::Invoke;
      se.id = e.op.id;
      se.kind = e.op.kind;
      se.arg = e.op.arg.as_int();
      if (!se.inv) {
        se.bot = e.tok == Tok::Bot;
        se.result = !se.bot && e.val.as_bool();
      }
      lh.high.events.push_back(se);
      lh.traces[se.id];
    } else if (e.op.level == Level::Access) {
      if (e.kind == EvKind::Invoke) {
        Access a;
        a.write = e.op.kind == OpKind::Write;
        a.elem = e.op.obj;
        if (a.write) {
          a.val = e.op.arg.at(0);
          a.node = e.op.arg.at(1);
        }
        open[e.op.id] = a;
      } else {
        auto it = open.find(e.op.id);
        if (it == open.end()) continue;
        if (e.tok == Tok::Bot) {
          open.erase(it);
          continue;
        }
        Access a = it->second;
        if (!a.write) a.val = e.val;
        lh.traces[e.op.id].push_back(a);
        open.erase(it);
      }
    }
  }
  return lh;
}

Verdict ls_linearizable(const ListHistory& h) {
  std::map<int, SetEvent> inv, res;
  for (const auto& e : h.high.events) (e.inv ? inv : res)[e.id] = e;
  for (const auto& [id, e] : inv) {
    auto r = res.find(id);
    if (r != res.end() && r->second.bot) continue;
    bool complete = r != res.end();
    auto t = h.traces.find(id);
    static const std::vector<Access> empty;
    const auto& trace = t == h.traces.end() ? empty : t->second;
    if (!locally_serializable_list(trace, e.kind, e.arg, complete, complete && r->second.result)) {
      Verdict v;
      v.note = "operation " + std::to_string(id) + " is not locally serializable";
      return v;
    }
  }
  Verdict v = linearizable_set(h.high);
  if (!v.holds && v.note.empty()) v.note = "high-level history is not linearizable";
  return v;
}

namespace {

int64_t parse_key(const std::string& t) {
  if (t == "-inf") return kNegInf;
  if (t == "+inf" || t == "inf") return kPosInf;
  return std::stoll(t);
}

std::string key_str(int64_t k) {
  if (k == kNegInf) return "-inf";
  if (k == kPosInf) return "+inf";
  return std::to_string(k);
}

OpKind set_kind(const std::string& t) {
  if (t == "insert") return OpKind::Insert;
  if (t == "remove") return OpKind::Remove;
  if (t == "contains") return OpKind::Contains;
  throw std::invalid_argument("unknown set operation " + t);
}

}  // namespace

ListHistory parse_list_history(const std::string& text) {
  ListHistory h;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    auto bad = [&](const std::string& why) {
      return std::invalid_argument("line " + std::to_string(lineno) + ": " + why);
    };
    try {
      if (tag == "initial:") {
        std::string t;
        while (ls >> t) h.high.initial.insert(std::stoll(t));
      } else if (tag == "inv") {
        SetEvent e;
        std::string kind, arg;
        if (!(ls >> e.id >> kind >> arg)) throw bad("expected inv <id> <op> <arg>");
        e.kind = set_kind(kind);
        e.arg = std::stoll(arg);
        h.high.events.push_back(e);
        h.traces[e.id];
      } else if (tag == "res") {
        SetEvent e;
        std::string r;
        if (!(ls >> e.id >> r)) throw bad("expected res <id> <true|false|bot>");
        e.inv = false;
        bool found = false;
        for (const auto& x : h.high.events)
          if (x.inv && x.id == e.id) {
            e.kind = x.kind;
            e.arg = x.arg;
            found = true;
          }
        if (!found) throw bad("response without invocation");
        if (r == "bot") e.bot = true;
        else if (r == "true") e.result = true;
        else if (r != "false") throw bad("bad response " + r);
        h.high.events.push_back(e);
      } else if (tag == "acc") {
        int id = 0;
        std::string rw, key, next;
        Access a;
        if (!(ls >> id >> rw >> a.elem >> key >> next)) throw bad("expected acc <id> R|W <elem> <key> <next>");
        a.write = rw == "W";
        if (!a.write && rw != "R") throw bad("access must be R or W");
        a.val = Value::tuple({Value(parse_key(key)), Value(static_cast<int64_t>(std::stoll(next)))});
        std::string nk, nn;
        if (a.write && (ls >> nk) && nk != "-") {
          if (!(ls >> nn)) throw bad("node needs a key and a successor");
          a.node = Value::tuple({Value(parse_key(nk)), Value(static_cast<int64_t>(std::stoll(nn)))});
        }
        h.traces[id].push_back(a);
      } else {
        throw bad("unknown line " + tag);
      }
    } catch (const std::invalid_argument& e) {
      if (std::string(e.what()).rfind("line ", 0) == 0) throw;
      throw bad(e.what());
    } catch (const std::out_of_range&) {
      throw bad("number out of range");
    }
  }
  return h;
}

std::string format_list_history(const ListHistory& h) {
  std::ostringstream os;
  os << "initial:";
  for (auto k : h.high.initial) os << " " << k;
  os << "\n";
  std::map<int, size_t> shown;
  auto dump_traces = [&](int id) {
    auto it = h.traces.find(id);
    if (it == h.traces.end()) return;
    for (size_t i = shown[id]; i < it->second.size(); ++i) {
      const Access& a = it->second[i];
      os << "acc " << id << " " << (a.write ? "W" : "R") << " " << a.elem;
      if (a.val.is_tuple()) os << " " << key_str(a.val.at(0).as_int()) << " " << a.val.at(1).as_int();
      if (a.write) {
        if (a.node.is_tuple()) os << " " << key_str(a.node.at(0).as_int()) << " " << a.node.at(1).as_int();
        else os << " -";
      }
      os << "\n";
    }
    shown[id] = it->second.size();
  };
  for (const auto& e : h.high.events) {
    if (e.inv) {
      os << "inv " << e.id << " " << op_name(e.kind) << " " << e.arg << "\n";
    } else {
      dump_traces(e.id);
      os << "res " << e.id << " " << (e.bot ? "bot" : e.result ? "true" : "false") << "\n";
    }
  }
  for (const auto& [id, t] : h.traces) dump_traces(id);
  return os.str();
}

}  // namespace tmlab
