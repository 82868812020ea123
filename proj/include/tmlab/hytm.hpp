#pragma once

#include <vector>

#include "tmlab/tm.hpp"

namespace tmlab {

// Hybrid TM. Slow path: value-validated reads, cas lock bits r_j, cas
// updates of v_j with undo. Fast path: cached primitives only. The second
// variant gates fast-path readers on a fetch-and-add counter instead of
// reading r_j.
class HyTm : public Tm {
 public:
  explicit HyTm(bool gated) : gated_(gated) {}

  std::string name() const override { return gated_ ? "hytm2" : "hytm1"; }
  void setup(Layout& layout, const TmEnv& env) override;
  std::optional<Value> read(Ctx& c, TxnState& t, int x) const override;
  bool write(Ctx& c, TxnState& t, int x, const Value& v) const override;
  bool try_commit(Ctx& c, TxnState& t) const override;

  ObjId v(int x) const { return v_.at(x); }
  ObjId r(int x) const { return r_.at(x); }
  ObjId fa() const { return fa_; }

 private:
  std::optional<Value> fast_read(Ctx& c, TxnState& t, int x) const;
  void release(Ctx& c, const std::vector<int>& q, bool counted) const;
  bool is_abortable(Ctx& c, const TxnState& t) const;

  bool gated_;
  std::vector<ObjId> v_, r_;
  ObjId fa_ = -1;
};

}  // namespace tmlab
