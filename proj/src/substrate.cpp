#include "tmlab/substrate.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

namespace tmlab {

ObjId Layout::add(std::string name, Value init, ObjClass cls, int tobj, Pid owner) {
  if (index_.count(name)) throw std::logic_error("duplicate base object " + name);
  ObjId id = static_cast<ObjId>(objs_.size());
  index_[name] = id;
  objs_.push_back({std::move(name), cls, tobj, owner});
  init_.push_back(std::move(init));
  return id;
}

ObjId Layout::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

ObjId Layout::at(const std::string& name) const {
  ObjId id = find(name);
  if (id < 0) throw std::out_of_range("no base object " + name);
  return id;
}

const char* prim_name(PrimKind k) {
  switch (k) {
    case PrimKind::Read:
      return "read";
    case PrimKind::Write:
      return "write";
    case PrimKind::Cas:
      return "cas";
    case PrimKind::Fadd:
      return "fadd";
  }
  return "?";
}

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::Read:
      return "read";
    case OpKind::Write:
      return "write";
    case OpKind::TryC:
      return "tryC";
    case OpKind::Insert:
      return "insert";
    case OpKind::Remove:
      return "remove";
    case OpKind::Contains:
      return "contains";
    case OpKind::Entry:
      return "entry";
    case OpKind::Exit:
      return "exit";
  }
  return "?";
}

const char* level_name(Level l) {
  switch (l) {
    case Level::Tm:
      return "tm";
    case Level::Set:
      return "set";
    case Level::Access:
      return "access";
    case Level::Mutex:
      return "mutex";
  }
  return "?";
}

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Val:
      return "val";
    case Tok::Ok:
      return "ok";
    case Tok::Abort:
      return "A";
    case Tok::Commit:
      return "C";
    case Tok::Bot:
      return "bot";
  }
  return "?";
}

std::string format_event(const Event& e, const Layout& layout) {
  std::ostringstream os;
  os << e.seq << " p" << e.proc << " ";
  if (e.txn != kNoTxn) os << "T" << e.txn << " ";
  switch (e.kind) {
    case EvKind::Prim:
      os << (e.cached ? "cached-" : "") << prim_name(e.prim.kind) << " " << layout.info(e.obj).name;
      if (e.prim.kind == PrimKind::Write || e.prim.kind == PrimKind::Fadd) os << " " << e.prim.a.str();
      if (e.prim.kind == PrimKind::Cas) os << " " << e.prim.a.str() << "->" << e.prim.b.str();
      os << " => " << (e.reply.bot ? "bot" : e.reply.v.str());
      break;
    case EvKind::CacheCommit:
      os << "cache-commit => " << (e.reply.bot ? "bot" : "commit");
      break;
    case EvKind::CacheAbort:
      os << "cache-abort";
      break;
    case EvKind::Invoke:
      os << "inv " << level_name(e.op.level) << " " << op_name(e.op.kind);
      if (e.op.obj >= 0) os << " #" << e.op.obj;
      if (!e.op.arg.is_nil()) os << " " << e.op.arg.str();
      break;
    case EvKind::Respond:
      os << "res " << level_name(e.op.level) << " " << op_name(e.op.kind) << " ";
      if (e.tok == Tok::Val)
        os << e.val.str();
      else
        os << tok_name(e.tok);
      break;
  }
  return os.str();
}

namespace {

bool is_trivial(const Prim& p, const Value& before) {
  switch (p.kind) {
    case PrimKind::Read:
      return true;
    case PrimKind::Cas:
      return before != p.a;
    default:
      return false;
  }
}

// Applies g to a value; returns h(v).
Value apply_prim(const Prim& p, Value& cell) {
  switch (p.kind) {
    case PrimKind::Read:
      return cell;
    case PrimKind::Write:
      cell = p.a;
      return Value();
    case PrimKind::Cas:
      if (cell == p.a) {
        cell = p.b;
        return Value(true);
      }
      return Value(false);
    case PrimKind::Fadd: {
      if (!cell.is_int()) throw std::runtime_error("fadd on non-integer value " + cell.str());
      Value prior = cell;
      cell = Value(cell.as_int() + p.a.as_int());
      return prior;
    }
  }
  return Value();
}

}  // namespace

Reply Memory::apply_direct(Pid p, ObjId obj, const Prim& prim, bool* trivial) {
  Value& cell = cells.at(obj);
  bool triv = is_trivial(prim, cell);
  Reply r{apply_prim(prim, cell), false};
  for (size_t q = 0; q < trackers.size(); ++q) {
    if (static_cast<Pid>(q) == p) continue;
    auto it = trackers[q].entries.find(obj);
    if (it == trackers[q].entries.end()) continue;
    if (!triv || it->second.mode == Mode::Exclusive) trackers[q].valid = false;
  }
  if (trivial) *trivial = triv;
  return r;
}

Reply Memory::apply_cached(Pid p, ObjId obj, const Prim& prim, bool* trivial) {
  Tracker& t = trackers.at(p);
  if (trivial) *trivial = true;
  if (t.entries.size() >= ts) {
    t.clear();
    return {Value(), true};
  }
  bool nontriv_possible = prim.kind != PrimKind::Read;
  auto own = t.entries.find(obj);
  Value cur = own != t.entries.end() ? own->second.v : cells.at(obj);
  bool triv = is_trivial(prim, cur);
  for (size_t q = 0; q < trackers.size(); ++q) {
    if (static_cast<Pid>(q) == p) continue;
    auto it = trackers[q].entries.find(obj);
    if (it == trackers[q].entries.end()) continue;
    if (it->second.mode == Mode::Exclusive || (nontriv_possible && !triv)) {
      t.clear();
      return {Value(), true};
    }
  }
  if (!t.valid) {
    t.clear();
    return {Value(), true};
  }
  Value h = apply_prim(prim, cur);
  Mode m = triv ? Mode::Shared : Mode::Exclusive;
  if (own != t.entries.end()) {
    own->second.v = cur;
    if (m == Mode::Exclusive) own->second.mode = Mode::Exclusive;
  } else {
    t.entries.emplace(obj, TrackEntry{cur, m});
  }
  if (trivial) *trivial = triv;
  return {h, false};
}

Reply Memory::cache_commit(Pid p) {
  Tracker& t = trackers.at(p);
  if (!t.valid) {
    t.clear();
    return {Value(), true};
  }
  for (const auto& [obj, ent] : t.entries) {
    if (ent.mode != Mode::Exclusive) continue;
    cells.at(obj) = ent.v;
    for (size_t q = 0; q < trackers.size(); ++q) {
      if (static_cast<Pid>(q) == p) continue;
      if (trackers[q].entries.count(obj)) trackers[q].valid = false;
    }
  }
  t.clear();
  return {Value(true), false};
}

void TxnState::encode(std::string& out) const {
  out += 't';
  out += std::to_string(id);
  out += live ? 'L' : 'l';
  out += fast ? 'F' : 'f';
  for (const auto* m : {&rset, &wset, &aux}) {
    out += '{';
    for (const auto& [k, v] : *m) {
      out += std::to_string(k);
      out += ':';
      v.encode(out);
    }
    out += '}';
  }
}

void PState::encode(std::string& out) const {
  txn.encode(out);
  for (const auto& [k, v] : vars) {
    out += k;
    out += '=';
    out += std::to_string(v);
    out += ';';
  }
}

Process::Process(Pid pid, std::string name, std::shared_ptr<const std::vector<Item>> items,
                 PState init)
    : pid_(pid), name_(std::move(name)), items_(std::move(items)), st_(std::move(init)) {
  advance();
}

void Process::advance() {
  while (pc_ < items_->size()) {
    PState work = st_;
    Ctx ctx(pid_, log_, pending_);
    try {
      (*items_)[pc_](ctx, work);
    } catch (const Suspend&) {
      return;
    }
    st_ = std::move(work);
    ++pc_;
    log_.clear();
  }
  done_ = true;
}

void Process::observe(const Action& a) {
  if (!monitor_raws_ || a.kind != EvKind::Prim || a.txn == kNoTxn) return;
  if (a.txn != raw_txn_) {
    raw_txn_ = a.txn;
    raw_open_.clear();
    raw_count_ = 0;
  }
  auto erase = [&](ObjId o) {
    raw_open_.erase(std::remove(raw_open_.begin(), raw_open_.end(), o), raw_open_.end());
  };
  if (a.prim.kind == PrimKind::Read) {
    bool other = std::any_of(raw_open_.begin(), raw_open_.end(), [&](ObjId o) { return o != a.obj; });
    if (other) {
      ++raw_count_;
      raw_open_.clear();
    }
    erase(a.obj);
  } else if (a.prim.kind == PrimKind::Write) {
    erase(a.obj);
    raw_open_.push_back(a.obj);
    std::sort(raw_open_.begin(), raw_open_.end());
  } else {
    erase(a.obj);
  }
  raw_max_ = std::max(raw_max_, raw_count_);
}

void Process::feed(const Reply& r) {
  if (done_) throw std::logic_error("feeding a finished process");
  observe(pending_);
  log_.push_back(r);
  advance();
}

void Process::encode(std::string& out) const {
  out += 'P';
  out += std::to_string(pc_);
  out += done_ ? 'D' : 'r';
  st_.encode(out);
  out += '[';
  for (const auto& r : log_) {
    if (r.bot) out += 'B';
    r.v.encode(out);
  }
  out += ']';
  if (monitor_raws_) {
    out += 'R';
    out += std::to_string(raw_txn_) + "," + std::to_string(raw_count_) + "," + std::to_string(raw_max_);
    for (ObjId o : raw_open_) out += "," + std::to_string(o);
  }
}

Reply Ctx::issue(Action a) {
  if (idx_ < log_.size()) return log_[idx_++];
  a.txn = txn_;
  pending_ = std::move(a);
  throw Suspend{};
}

Reply Ctx::issue_prim(ObjId o, Prim p, bool cached) {
  if (idx_ < log_.size()) return log_[idx_++];
  Action a;
  a.kind = EvKind::Prim;
  a.obj = o;
  a.prim = std::move(p);
  a.cached = cached;
  return issue(std::move(a));
}

bool Ctx::cache_commit() {
  Action a;
  a.kind = EvKind::CacheCommit;
  return !issue(std::move(a)).bot;
}

void Ctx::cache_abort() {
  Action a;
  a.kind = EvKind::CacheAbort;
  issue(std::move(a));
}

void Ctx::invoke(const OpDesc& op) {
  if (idx_ < log_.size()) {
    ++idx_;
    return;
  }
  Action a;
  a.kind = EvKind::Invoke;
  a.op = op;
  issue(std::move(a));
}

void Ctx::respond(const OpDesc& op, Tok tok, Value v) {
  if (idx_ < log_.size()) {
    ++idx_;
    return;
  }
  Action a;
  a.kind = EvKind::Respond;
  a.op = op;
  a.tok = tok;
  a.val = std::move(v);
  issue(std::move(a));
}

void Ctx::truncate(size_t start) {
  if (idx_ != log_.size()) throw std::logic_error("spin iteration is not at the log tail");
  log_.resize(start);
  idx_ = start;
}

World::World(std::shared_ptr<const Layout> layout, std::vector<Process> procs, size_t ts)
    : layout_(std::move(layout)), procs_(std::move(procs)) {
  mem_.cells = layout_->inits();
  mem_.trackers.assign(procs_.size(), Tracker{});
  mem_.ts = ts;
}

bool World::all_done() const {
  return std::all_of(procs_.begin(), procs_.end(), [](const Process& p) { return p.done(); });
}

Pid World::find_proc(const std::string& name) const {
  for (const auto& p : procs_)
    if (p.name() == name) return p.pid();
  return -1;
}

const Event& World::step(Pid p) {
  Process& pr = procs_.at(p);
  if (pr.done()) throw std::logic_error("stepping a finished process");
  const Action& a = pr.pending();
  Event e;
  e.seq = static_cast<int>(nsteps_);
  e.proc = p;
  e.txn = a.txn;
  e.kind = a.kind;
  switch (a.kind) {
    case EvKind::Prim: {
      e.obj = a.obj;
      e.prim = a.prim;
      e.cached = a.cached;
      bool triv = true;
      e.reply = a.cached ? mem_.apply_cached(p, a.obj, a.prim, &triv)
                         : mem_.apply_direct(p, a.obj, a.prim, &triv);
      e.trivial = triv;
      break;
    }
    case EvKind::CacheCommit:
      e.reply = mem_.cache_commit(p);
      e.trivial = e.reply.bot;
      break;
    case EvKind::CacheAbort:
      mem_.cache_abort(p);
      break;
    case EvKind::Invoke:
      e.op = a.op;
      break;
    case EvKind::Respond:
      e.op = a.op;
      e.tok = a.tok;
      e.val = a.val;
      break;
  }
  pr.feed(e.reply);
  ++nsteps_;
  if (keep_log_) {
    choices_.push_back(p);
    events_.push_back(std::move(e));
    return events_.back();
  }
  last_ = std::move(e);
  has_last_ = true;
  return last_;
}

void World::encode(std::string& out) const {
  for (const auto& c : mem_.cells) c.encode(out);
  out += '|';
  for (const auto& t : mem_.trackers) {
    out += t.valid ? 'v' : 'x';
    for (const auto& [o, e] : t.entries) {
      out += std::to_string(o);
      out += e.mode == Mode::Exclusive ? 'X' : 'S';
      e.v.encode(out);
    }
    out += '|';
  }
  for (const auto& p : procs_) p.encode(out);
}

Execution World::to_execution(bool incomplete) const {
  Execution x;
  x.layout = layout_;
  for (const auto& p : procs_) x.proc_names.push_back(p.name());
  x.events = events_;
  x.final_mem = mem_.cells;
  x.choices = choices_;
  x.incomplete = incomplete;
  return x;
}

Schedule parse_schedule(const std::string& text) {
  Schedule s;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) s.steps.push_back(tok);
  }
  return s;
}

Execution run_schedule(World w, const std::vector<Pid>& s) {
  for (Pid p : s) {
    if (p < 0 || static_cast<size_t>(p) >= w.nprocs())
      throw std::invalid_argument("schedule names an undeclared process");
    if (w.proc(p).done()) continue;
    w.step(p);
  }
  return w.to_execution(!w.all_done());
}

Execution run_schedule(World w, const Schedule& s) {
  std::vector<Pid> ids;
  for (const auto& name : s.steps) {
    Pid p = w.find_proc(name);
    if (p < 0) throw std::invalid_argument("schedule names undeclared process " + name);
    ids.push_back(p);
  }
  return run_schedule(std::move(w), ids);
}

namespace {

struct Enumerator {
  size_t max_events;
  const std::function<bool(const Execution&)>& cb;
  size_t count = 0;
  bool stop = false;

  void go(const World& w) {
    if (stop) return;
    if (w.all_done() || w.steps() >= max_events) {
      ++count;
      if (!cb(w.to_execution(!w.all_done()))) stop = true;
      return;
    }
    for (size_t p = 0; p < w.nprocs() && !stop; ++p) {
      if (w.proc(static_cast<Pid>(p)).done()) continue;
      World child = w;
      child.step(static_cast<Pid>(p));
      go(child);
    }
  }
};

bool is_history_action(const Action& a) { return a.kind == EvKind::Invoke || a.kind == EvKind::Respond; }

bool independent(const Action& a, const Action& b) {
  bool ha = is_history_action(a), hb = is_history_action(b);
  if (ha || hb) return !(ha && hb);
  if (a.kind != EvKind::Prim || b.kind != EvKind::Prim) return false;
  if (a.obj != b.obj) return true;
  return a.prim.kind == PrimKind::Read && b.prim.kind == PrimKind::Read && !a.cached && !b.cached;
}

struct TraceEnumerator {
  size_t max_events;
  const std::function<bool(const Execution&)>& cb;
  size_t count = 0;
  bool stop = false;

  void go(const World& w, const std::vector<std::pair<Pid, Action>>& sleep) {
    if (stop) return;
    if (w.all_done() || w.steps() >= max_events) {
      ++count;
      if (!cb(w.to_execution(!w.all_done()))) stop = true;
      return;
    }
    std::vector<std::pair<Pid, Action>> tried;
    for (Pid p = 0; p < static_cast<Pid>(w.nprocs()) && !stop; ++p) {
      if (w.proc(p).done()) continue;
      bool asleep = false;
      for (const auto& [q, a] : sleep) asleep = asleep || q == p;
      if (asleep) continue;
      const Action& a = w.proc(p).pending();
      std::vector<std::pair<Pid, Action>> next;
      for (const auto& qa : sleep)
        if (independent(qa.second, a)) next.push_back(qa);
      for (const auto& qa : tried)
        if (independent(qa.second, a)) next.push_back(qa);
      World child = w;
      child.step(p);
      go(child, next);
      tried.emplace_back(p, a);
    }
  }
};

struct Hash128 {
  uint64_t a, b;
  bool operator==(const Hash128& o) const { return a == o.a && b == o.b; }
};

struct Hash128Hasher {
  size_t operator()(const Hash128& h) const { return h.a ^ (h.b * 0x9e3779b97f4a7c15ULL); }
};

Hash128 hash_state(const std::string& s) {
  uint64_t f = 1469598103934665603ULL;
  for (unsigned char c : s) {
    f ^= c;
    f *= 1099511628211ULL;
  }
  return {std::hash<std::string_view>{}(s), f};
}

}  // namespace

size_t enumerate_executions(const World& w, size_t max_events,
                            const std::function<bool(const Execution&)>& cb) {
  Enumerator e{max_events, cb};
  e.go(w);
  return e.count;
}

size_t enumerate_traces(const World& w, size_t max_events,
                        const std::function<bool(const Execution&)>& cb) {
  TraceEnumerator e{max_events, cb};
  e.go(w, {});
  return e.count;
}

Execution run_fair(World w, size_t cap) {
  size_t taken = 0;
  while (!w.all_done() && taken < cap) {
    for (size_t p = 0; p < w.nprocs() && taken < cap; ++p) {
      if (w.proc(static_cast<Pid>(p)).done()) continue;
      w.step(static_cast<Pid>(p));
      ++taken;
    }
  }
  return w.to_execution(!w.all_done());
}

ExploreStats explore_states(const World& w0, size_t max_depth,
                            const std::function<bool(const World&)>& visit) {
  ExploreStats st;
  std::unordered_set<Hash128, Hash128Hasher> seen;
  std::vector<World> frontier;
  World root = w0;
  root.set_keep_log(false);
  std::string key;
  root.encode(key);
  seen.insert(hash_state(key));
  st.states = 1;
  if (!visit(root)) {
    st.stopped = true;
    return st;
  }
  frontier.push_back(std::move(root));
  for (size_t depth = 0; !frontier.empty(); ++depth) {
    if (depth >= max_depth) {
      for (const auto& w : frontier)
        if (!w.all_done()) st.depth_limited = true;
      break;
    }
    std::vector<World> next;
    for (const auto& w : frontier) {
      for (size_t p = 0; p < w.nprocs(); ++p) {
        if (w.proc(static_cast<Pid>(p)).done()) continue;
        World child = w;
        child.step(static_cast<Pid>(p));
        ++st.transitions;
        key.clear();
        child.encode(key);
        if (!seen.insert(hash_state(key)).second) continue;
        ++st.states;
        if (!visit(child)) {
          st.stopped = true;
          return st;
        }
        next.push_back(std::move(child));
      }
    }
    frontier.swap(next);
  }
  return st;
}

}  // namespace tmlab
