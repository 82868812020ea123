#pragma once

#include <vector>

#include "tmlab/tm.hpp"

namespace tmlab {

constexpr int64_t kWhite = 0;
constexpr int64_t kBlack = 1;

// Black-white bakery multi-trylock. With `doorway` set, a competitor whose
// contention bit is up but whose label is still 0 is waited for.
class Trylock {
 public:
  void setup(Layout& layout, size_t nprocs, const std::vector<std::string>& objs, bool doorway);

  void acquire(Ctx& c, const std::vector<int>& q) const;
  void release(Ctx& c, const std::vector<int>& q) const;
  bool is_contended(Ctx& c, int x) const;

  ObjId r(Pid p, int x) const { return r_.at(p).at(x); }
  ObjId label(Pid p) const { return la_.at(p); }
  ObjId my_color(Pid p) const { return mc_.at(p); }
  ObjId color() const { return color_; }

 private:
  std::vector<std::vector<ObjId>> r_;
  std::vector<ObjId> la_, mc_;
  ObjId color_ = -1;
  size_t nprocs_ = 0;
  bool doorway_ = true;
};

// Strongly progressive TM: LP's structure with the multi-trylock in place of
// the r/L bits.
class StrongTm : public Tm {
 public:
  explicit StrongTm(bool doorway = true) : doorway_(doorway) {}

  std::string name() const override { return "strong"; }
  void setup(Layout& layout, const TmEnv& env) override;
  std::optional<Value> read(Ctx& c, TxnState& t, int x) const override;
  bool write(Ctx& c, TxnState& t, int x, const Value& v) const override;
  bool try_commit(Ctx& c, TxnState& t) const override;

  const Trylock& lock() const { return lock_; }
  ObjId v(int x) const { return v_.at(x); }

 private:
  bool is_abortable(Ctx& c, const TxnState& t) const;

  bool doorway_;
  Trylock lock_;
  std::vector<ObjId> v_;
};

// Processes repeatedly acquire and release a set of t-objects on a bare
// multi-trylock. Variable "holds" is 1 between acquire and release.
struct TrylockSpec {
  std::vector<std::vector<int>> sets;  // per process
  int rounds = 1;
  bool doorway = true;
  size_t nobjs = 1;
};
World build_trylock_world(const TrylockSpec& spec);

// Mutual exclusion from the strong TM on a single t-object. Variable "cs"
// is 1 from Entry's response to Exit's invocation.
struct MutexSpec {
  size_t nprocs = 2;
  int entries = 2;
  bool doorway = true;
};
World build_mutex_world(const MutexSpec& spec);

}  // namespace tmlab
