#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tmlab/substrate.hpp"
#include "tmlab/tmapi.hpp"

namespace tmlab {

struct TxnOp {
  OpKind kind = OpKind::Read;  // Read, Write or TryC
  int obj = -1;
  Value val;
};

struct TxnSpec {
  TxnId id = 0;
  std::vector<TxnOp> ops;
};

struct SetOpSpec {
  OpKind kind = OpKind::Contains;
  int64_t arg = 0;
};

struct ProcSpec {
  std::string name;
  bool fast = false;
  std::vector<TxnSpec> txns;
  std::vector<SetOpSpec> set_ops;
};

struct Workload {
  std::vector<std::string> objects;
  std::vector<Value> init;
  std::vector<ProcSpec> procs;

  int obj_index(const std::string& name) const;
  std::vector<TxnId> txn_ids() const;
};

// objects: X Y
// init: X=0 Y=0
// process p1 [fast|slow]:
//   txn T1: W X 5 ; R Y ; C
//   set-op insert 5
Workload parse_workload(const std::string& text);

struct TmEnv {
  std::vector<std::string> tobjs;
  std::vector<Value> init;
  size_t nprocs = 0;
  std::vector<TxnId> txns;
};

// A TM as a set of step-machine fragments. Each call runs inside one
// t-operation item; cross-operation state lives in TxnState.
class Tm {
 public:
  virtual ~Tm() = default;
  virtual std::string name() const = 0;
  virtual void setup(Layout& layout, const TmEnv& env) = 0;
  virtual std::optional<Value> read(Ctx& c, TxnState& t, int x) const = 0;
  virtual bool write(Ctx& c, TxnState& t, int x, const Value& v) const = 0;
  virtual bool try_commit(Ctx& c, TxnState& t) const = 0;
};

std::shared_ptr<Tm> make_tm(const std::string& name);
std::vector<std::string> tm_names();

struct TmWorld {
  World world;
  std::shared_ptr<Tm> tm;
  std::vector<std::string> tobjs;
  std::vector<Value> init;

  History history(const Execution& x) const { return history_of(x, tobjs, init); }
};

// Per process, one item per t-operation. Outcomes are tallied in the
// process variables "commits" and "aborts".
TmWorld build_tm_world(const Workload& w, std::shared_ptr<Tm> tm, size_t ts = 8);

// Runs one t-operation through the invoke/respond protocol. Returns false if
// the transaction aborted.
bool run_top(Ctx& c, const Tm& tm, TxnState& t, const TxnOp& op, Value* out = nullptr);

}  // namespace tmlab
