#pragma once

#include <map>
#include <vector>

#include "tmlab/tm.hpp"

namespace tmlab {

constexpr int64_t kLive = 0;
constexpr int64_t kCommitted = 1;
constexpr int64_t kAborted = 2;

// Obstruction-free TMs with ownership records tvar[m] = (owner, oval, nval)
// and a status word per transaction. T0 owns every t-object initially.
// `weak` selects the variant whose readers take ownership instead of
// validating.
class OfTm : public Tm {
 public:
  explicit OfTm(bool weak) : weak_(weak) {}

  std::string name() const override { return weak_ ? "of-weak" : "of-rw"; }
  void setup(Layout& layout, const TmEnv& env) override;
  std::optional<Value> read(Ctx& c, TxnState& t, int x) const override;
  bool write(Ctx& c, TxnState& t, int x, const Value& v) const override;
  bool try_commit(Ctx& c, TxnState& t) const override;

  ObjId tvar(int x) const { return tvar_.at(x); }
  ObjId status(TxnId k) const { return status_.at(k); }

 private:
  // Value of the t-object as seen through tv; aborts a live owner.
  std::optional<Value> current(Ctx& c, const Value& tv) const;
  bool validate(Ctx& c, const TxnState& t) const;

  bool weak_;
  std::vector<ObjId> tvar_;
  std::map<TxnId, ObjId> status_;
};

}  // namespace tmlab
