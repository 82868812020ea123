#include "tmlab/hytm.hpp"

namespace tmlab {

void HyTm::setup(Layout& layout, const TmEnv& env) {
  v_.clear();
  r_.clear();
  for (size_t j = 0; j < env.tobjs.size(); ++j) {
    v_.push_back(layout.add("v_" + env.tobjs[j], Value::tuple({env.init[j], Value(0)}), ObjClass::Data,
                            static_cast<int>(j), 0));
    r_.push_back(layout.add("r_" + env.tobjs[j], Value(0), ObjClass::Meta, -1, 0));
  }
  fa_ = gated_ ? layout.add("fa", Value(0), ObjClass::Meta, -1, 0) : -1;
}

std::optional<Value> HyTm::fast_read(Ctx& c, TxnState& t, int x) const {
  if (gated_ && t.rset.empty()) {
    auto l = c.cached(fa_, Prim::read());
    if (!l) return std::nullopt;
    if (*l != Value(0)) {
      c.cache_abort();
      return std::nullopt;
    }
  }
  auto tv = c.cached(v_[x], Prim::read());
  if (!tv) return std::nullopt;
  t.rset[x] = *tv;
  if (!gated_) {
    auto lk = c.cached(r_[x], Prim::read());
    if (!lk) return std::nullopt;
    if (*lk != Value(0)) {
      c.cache_abort();
      return std::nullopt;
    }
  }
  return tv->at(0);
}

std::optional<Value> HyTm::read(Ctx& c, TxnState& t, int x) const {
  if (t.fast) return fast_read(c, t, x);
  if (auto w = t.wset.find(x); w != t.wset.end()) return w->second;
  if (auto r = t.rset.find(x); r != t.rset.end()) return r->second.at(0);
  Value cur = c.read(v_[x]);
  t.rset[x] = cur;
  if (c.read(r_[x]) != Value(0)) return std::nullopt;
  for (const auto& [y, seen] : t.rset)
    if (c.read(v_[y]) != seen) return std::nullopt;
  return cur.at(0);
}

bool HyTm::write(Ctx& c, TxnState& t, int x, const Value& v) const {
  if (t.fast) {
    if (!c.cached(v_[x], Prim::write(Value::tuple({v, Value(t.id)})))) return false;
    t.wset[x] = v;
    return true;
  }
  t.aux[x] = c.read(v_[x]);
  t.wset[x] = v;
  return true;
}

void HyTm::release(Ctx& c, const std::vector<int>& q, bool counted) const {
  for (int x : q) c.write(r_[x], Value(0));
  if (gated_ && counted) c.fadd(fa_, -1);
}

bool HyTm::is_abortable(Ctx& c, const TxnState& t) const {
  for (const auto& [x, seen] : t.rset)
    if (!t.wset.count(x) && c.read(r_[x]) != Value(0)) return true;
  for (const auto& [x, seen] : t.rset)
    if (c.read(v_[x]) != seen) return true;
  return false;
}

bool HyTm::try_commit(Ctx& c, TxnState& t) const {
  if (t.fast) return c.cache_commit();
  if (t.wset.empty()) return true;
  std::vector<int> lset;
  for (const auto& [x, nv] : t.wset) {
    if (!c.cas(r_[x], Value(0), Value(1))) {
      release(c, lset, false);
      return false;
    }
    lset.push_back(x);
  }
  if (gated_) c.fadd(fa_, 1);
  if (is_abortable(c, t)) {
    release(c, lset, true);
    return false;
  }
  std::vector<int> oset;
  for (const auto& [x, nv] : t.wset) {
    Value mine = Value::tuple({nv, Value(t.id)});
    if (c.cas(v_[x], t.aux.at(x), mine)) {
      oset.push_back(x);
      continue;
    }
    for (int y : oset) c.cas(v_[y], Value::tuple({t.wset.at(y), Value(t.id)}), t.aux.at(y));
    release(c, lset, true);
    return false;
  }
  release(c, lset, true);
  return true;
}

}  // namespace tmlab
