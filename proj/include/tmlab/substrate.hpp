#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tmlab/value.hpp"

namespace tmlab {

using ObjId = int;
using Pid = int;
using TxnId = int;
constexpr TxnId kNoTxn = -1;

enum class ObjClass { Meta, Data };

struct ObjInfo {
  std::string name;
  ObjClass cls = ObjClass::Meta;
  int tobj = -1;   // t-object housed by a data object
  Pid owner = -1;  // DSM home process
};

class Layout {
 public:
  ObjId add(std::string name, Value init, ObjClass cls = ObjClass::Meta, int tobj = -1,
            Pid owner = -1);
  ObjId find(const std::string& name) const;
  ObjId at(const std::string& name) const;
  const ObjInfo& info(ObjId id) const { return objs_.at(id); }
  const Value& init(ObjId id) const { return init_.at(id); }
  const std::vector<Value>& inits() const { return init_; }
  size_t size() const { return objs_.size(); }
  void set_owner(ObjId id, Pid p) { objs_.at(id).owner = p; }

 private:
  std::vector<ObjInfo> objs_;
  std::vector<Value> init_;
  std::unordered_map<std::string, ObjId> index_;
};

enum class PrimKind { Read, Write, Cas, Fadd };
const char* prim_name(PrimKind k);

struct Prim {
  PrimKind kind = PrimKind::Read;
  Value a, b;
  static Prim read() { return {PrimKind::Read, {}, {}}; }
  static Prim write(Value v) { return {PrimKind::Write, std::move(v), {}}; }
  static Prim cas(Value o, Value n) { return {PrimKind::Cas, std::move(o), std::move(n)}; }
  static Prim fadd(int64_t d) { return {PrimKind::Fadd, Value(d), {}}; }
};

enum class Level { Tm, Set, Access, Mutex };
enum class OpKind { Read, Write, TryC, Insert, Remove, Contains, Entry, Exit };
const char* op_name(OpKind k);
const char* level_name(Level l);

struct OpDesc {
  Level level = Level::Tm;
  int id = -1;  // transaction id, or set-operation id
  OpKind kind = OpKind::Read;
  int obj = -1;  // t-object index or base object id, level-dependent
  Value arg;
};

// Response tokens of high-level operations, disjoint from data values.
enum class Tok { Val, Ok, Abort, Commit, Bot };
const char* tok_name(Tok t);

enum class EvKind { Prim, CacheCommit, CacheAbort, Invoke, Respond };

struct Reply {
  Value v;
  bool bot = false;
};

struct Action {
  EvKind kind = EvKind::Prim;
  TxnId txn = kNoTxn;
  ObjId obj = -1;
  Prim prim;
  bool cached = false;
  OpDesc op;
  Tok tok = Tok::Ok;
  Value val;
};

struct Event {
  int seq = 0;
  Pid proc = 0;
  TxnId txn = kNoTxn;
  EvKind kind = EvKind::Prim;
  ObjId obj = -1;
  Prim prim;
  bool cached = false;
  bool trivial = true;
  Reply reply;
  OpDesc op;
  Tok tok = Tok::Ok;
  Value val;

  bool is_prim() const { return kind == EvKind::Prim; }
  bool direct() const { return kind == EvKind::Prim && !cached; }
  bool memory_nontrivial() const { return direct() && !trivial; }
};

std::string format_event(const Event& e, const Layout& layout);

enum class Mode { Shared, Exclusive };

struct TrackEntry {
  Value v;
  Mode mode = Mode::Shared;
};

struct Tracker {
  std::map<ObjId, TrackEntry> entries;
  bool valid = true;
  void clear() {
    entries.clear();
    valid = true;
  }
};

// Shared memory plus tracking sets. Primitive semantics live here.
struct Memory {
  std::vector<Value> cells;
  std::vector<Tracker> trackers;
  size_t ts = 8;

  Reply apply_direct(Pid p, ObjId obj, const Prim& prim, bool* trivial);
  Reply apply_cached(Pid p, ObjId obj, const Prim& prim, bool* trivial);
  Reply cache_commit(Pid p);
  void cache_abort(Pid p) { trackers.at(p).clear(); }
};

struct TxnState {
  TxnId id = kNoTxn;
  bool live = false;
  bool fast = false;
  std::map<int, Value> rset, wset, aux;
  void encode(std::string& out) const;
};

struct PState {
  TxnState txn;
  std::map<std::string, int64_t> vars;
  int64_t var(const std::string& k) const {
    auto it = vars.find(k);
    return it == vars.end() ? 0 : it->second;
  }
  void encode(std::string& out) const;
};

class Ctx;

// A resumable per-process program. Each item is re-run from its start on
// every step against the responses logged so far, which keeps the state a
// plain copyable value (pc, PState, log).
class Process {
 public:
  using Item = std::function<void(Ctx&, PState&)>;

  Process(Pid pid, std::string name, std::shared_ptr<const std::vector<Item>> items,
          PState init = {});

  Pid pid() const { return pid_; }
  const std::string& name() const { return name_; }
  bool done() const { return done_; }
  const Action& pending() const { return pending_; }
  const PState& state() const { return st_; }
  size_t pc() const { return pc_; }
  bool fresh() const { return pc_ == 0 && log_.empty(); }
  void feed(const Reply& r);
  void encode(std::string& out) const;

  void enable_raw_monitor() {
    monitor_raws_ = true;
  }
  int raw_max() const { return raw_max_; }

 private:
  void advance();
  void observe(const Action& a);

  Pid pid_;
  std::string name_;
  std::shared_ptr<const std::vector<Item>> items_;
  size_t pc_ = 0;
  PState st_;
  std::vector<Reply> log_;
  Action pending_;
  bool done_ = false;

  bool monitor_raws_ = false;
  TxnId raw_txn_ = kNoTxn;
  std::vector<ObjId> raw_open_;
  int raw_count_ = 0;
  int raw_max_ = 0;
};

struct Suspend {};

class Ctx {
 public:
  Ctx(Pid pid, std::vector<Reply>& log, Action& pending) : pid_(pid), log_(log), pending_(pending) {}

  Pid pid() const { return pid_; }
  void set_txn(TxnId t) { txn_ = t; }
  TxnId txn() const { return txn_; }

  Value read(ObjId o) { return issue_prim(o, Prim::read(), false).v; }
  void write(ObjId o, Value v) { issue_prim(o, Prim::write(std::move(v)), false); }
  bool cas(ObjId o, Value old, Value nw) {
    return issue_prim(o, Prim::cas(std::move(old), std::move(nw)), false).v.as_bool();
  }
  Value fadd(ObjId o, int64_t d) { return issue_prim(o, Prim::fadd(d), false).v; }

  // Cached primitives; nullopt stands for the hardware abort response.
  std::optional<Value> cached(ObjId o, Prim p) {
    Reply r = issue_prim(o, std::move(p), true);
    if (r.bot) return std::nullopt;
    return r.v;
  }
  bool cache_commit();
  void cache_abort();

  void invoke(const OpDesc& op);
  void respond(const OpDesc& op, Tok tok, Value v = {});

  // Busy-wait: `blocked` performs only reads. A completed iteration that is
  // still blocked is dropped from the log, so spinning revisits one state.
  template <class F>
  void spin_while(F blocked) {
    size_t start = idx_;
    for (;;) {
      if (!blocked()) return;
      truncate(start);
    }
  }

 private:
  Reply issue_prim(ObjId o, Prim p, bool cached);
  Reply issue(Action a);
  void truncate(size_t start);

  Pid pid_;
  TxnId txn_ = kNoTxn;
  std::vector<Reply>& log_;
  Action& pending_;
  size_t idx_ = 0;
};

struct Execution {
  std::shared_ptr<const Layout> layout;
  std::vector<std::string> proc_names;
  std::vector<Event> events;
  std::vector<Value> final_mem;
  std::vector<Pid> choices;
  bool incomplete = false;
};

class World {
 public:
  World(std::shared_ptr<const Layout> layout, std::vector<Process> procs, size_t ts = 8);

  const Layout& layout() const { return *layout_; }
  std::shared_ptr<const Layout> layout_ptr() const { return layout_; }
  size_t nprocs() const { return procs_.size(); }
  const Process& proc(Pid p) const { return procs_.at(p); }
  Process& proc_mut(Pid p) { return procs_.at(p); }
  const Memory& memory() const { return mem_; }
  const std::vector<Event>& events() const { return events_; }
  const Event* last_event() const { return has_last_ ? &last_ : nullptr; }
  size_t steps() const { return nsteps_; }
  bool all_done() const;
  Pid find_proc(const std::string& name) const;

  void set_keep_log(bool k) { keep_log_ = k; }
  const Event& step(Pid p);
  void encode(std::string& out) const;
  Execution to_execution(bool incomplete) const;

 private:
  std::shared_ptr<const Layout> layout_;
  std::vector<Process> procs_;
  Memory mem_;
  std::vector<Event> events_;
  std::vector<Pid> choices_;
  Event last_;
  bool has_last_ = false;
  bool keep_log_ = true;
  size_t nsteps_ = 0;
};

struct Schedule {
  std::vector<std::string> steps;
};

Schedule parse_schedule(const std::string& text);

Execution run_schedule(World w, const Schedule& s);
Execution run_schedule(World w, const std::vector<Pid>& s);

// Depth-first over every process choice. Returns the number of executions
// yielded; the callback may return false to stop early.
size_t enumerate_executions(const World& w, size_t max_events,
                            const std::function<bool(const Execution&)>& cb);

// One execution per equivalence class of interleavings (sleep sets).
// Invocations and responses are ordered among themselves and commute with
// primitives; primitives commute when on different objects or both direct
// reads. Histories, replies and per-process traces of the skipped
// interleavings all occur in some yielded execution.
size_t enumerate_traces(const World& w, size_t max_events,
                        const std::function<bool(const Execution&)>& cb);

Execution run_fair(World w, size_t cap);

struct ExploreStats {
  size_t states = 0;
  size_t transitions = 0;
  bool depth_limited = false;
  bool stopped = false;
};

// Breadth-first reachability over distinct configurations (hashed), up to
// max_depth scheduler steps. `visit` sees every new configuration.
ExploreStats explore_states(const World& w, size_t max_depth,
                            const std::function<bool(const World&)>& visit);

}  // namespace tmlab
