#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tmlab/checkers.hpp"
#include "tmlab/substrate.hpp"
#include "tmlab/tm.hpp"

namespace tmlab {

// Element ids: 0 = head, 1 = tail, then the initial nodes in key order, then
// one fresh node per insert operation. Element values are Tuple(key, next).
struct ElemTable {
  std::vector<std::string> names;
  std::vector<Value> init;

  int add(const std::string& name, Value v);
};

ElemTable initial_elems(const std::set<int64_t>& initial);

// Sequential LL on a plain element array. Returns the response and appends
// the operation's accesses to `trace`. A fresh node for insert is `newelem`.
bool ll_apply(std::vector<Value>& elems, OpKind kind, int64_t v, int newelem, std::vector<Access>* trace);

struct ListImplState;

// Read/write hooks of one concurrent list implementation. Every hook runs
// inside a set-operation item.
class ListImpl {
 public:
  virtual ~ListImpl() = default;
  virtual std::string name() const = 0;
  virtual void setup(Layout& layout, const ElemTable& elems, size_t nprocs, size_t nops) = 0;
  virtual void begin(Ctx& c, ListImplState& s) const;
  virtual std::optional<Value> read(Ctx& c, ListImplState& s, int elem) const = 0;
  virtual bool write(Ctx& c, ListImplState& s, int elem, const Value& nv, const Value& node,
                     int newelem) const = 0;
  virtual bool end(Ctx& c, ListImplState& s) const;
  // Base object holding an element's value, where one exists.
  virtual ObjId value_obj(int) const { return -1; }
};

// seq, ih, irm, itm:<tm>
std::shared_ptr<ListImpl> make_list_impl(const std::string& name);

struct SetOpDecl {
  std::string label;
  OpKind kind = OpKind::Contains;
  int64_t arg = 0;
};

struct SchedPoint {
  std::string label;
  bool write = false;
  std::string elem;
};

struct SetSchedule {
  std::set<int64_t> initial;
  std::vector<SetOpDecl> ops;
  std::vector<SchedPoint> points;
};

// initial: 1 3 4
// T1.insert(2).R(head) < T3.contains(5).R(head) < ...
SetSchedule parse_set_schedule(const std::string& text);
std::string format_set_schedule(const SetSchedule& s);

struct SetWorld {
  World world;
  ElemTable elems;
  std::shared_ptr<ListImpl> impl;
  std::set<int64_t> initial;
};

// One process per entry of `procs`; each runs its operations in order.
// Operation ids are assigned in declaration order across processes.
SetWorld build_set_world(std::shared_ptr<ListImpl> impl, const std::set<int64_t>& initial,
                         const std::vector<std::vector<SetOpDecl>>& procs);

struct AcceptResult {
  bool accepted = false;
  std::string reason;
  Execution exec;
  ListHistory history;
  bool ls_linearizable = false;
};

// Drives one process per operation so that accesses happen in the order of
// the schedule. Each point runs its operation up to and including the named
// access; after an operation's last point, its remaining steps run at once.
// With `strict` unset, leftover accesses after the last point are allowed.
AcceptResult schedule_accepts(const std::string& impl, const SetSchedule& s, bool strict = true);

bool is_observable(const SetSchedule& s, std::string* why = nullptr);

struct CorpusSpec {
  std::vector<std::set<int64_t>> initial_sets;
  std::vector<int64_t> keys = {1, 2, 3, 4, 5};
  size_t max_ops = 3;
  size_t min_ops = 2;
  size_t max_points = 8;
};

// Every interleaving of sequential LL accesses, over every multiset of
// operations drawn from the keys, within the point bound.
std::vector<SetSchedule> generate_corpus(const CorpusSpec& spec);

}  // namespace tmlab
