#pragma once

#include <vector>

#include "tmlab/tm.hpp"

namespace tmlab {

struct LpOptions {
  bool ss = false;          // drop read validation, validate at tryC instead
  bool late_lock = false;   // write L_j after isAbortable instead of inside acquire
};

// Lock-based progressive TM over read/write base objects: v_j holds
// (value, writer), L_j a lock bit, r_ij a single-writer bit per process.
class LpTm : public Tm {
 public:
  explicit LpTm(LpOptions o) : opt_(o) {}

  std::string name() const override { return opt_.ss ? "lp-ss" : "lp"; }
  void setup(Layout& layout, const TmEnv& env) override;
  std::optional<Value> read(Ctx& c, TxnState& t, int x) const override;
  bool write(Ctx& c, TxnState& t, int x, const Value& v) const override;
  bool try_commit(Ctx& c, TxnState& t) const override;

  ObjId v(int x) const { return v_.at(x); }
  ObjId lock(int x) const { return l_.at(x); }
  ObjId r(Pid p, int x) const { return r_.at(p).at(x); }

 private:
  bool acquire(Ctx& c, const TxnState& t) const;
  void release(Ctx& c, const TxnState& t) const;
  bool is_abortable(Ctx& c, const TxnState& t) const;
  bool validate(Ctx& c, const TxnState& t) const;

  LpOptions opt_;
  std::vector<ObjId> v_, l_;
  std::vector<std::vector<ObjId>> r_;
  size_t nprocs_ = 0;
};

}  // namespace tmlab
