#include "tmlab/progressive.hpp"

namespace tmlab {

void LpTm::setup(Layout& layout, const TmEnv& env) {
  nprocs_ = env.nprocs;
  v_.clear();
  l_.clear();
  r_.assign(nprocs_, {});
  for (size_t j = 0; j < env.tobjs.size(); ++j) {
    const std::string& n = env.tobjs[j];
    v_.push_back(layout.add("v_" + n, Value::tuple({env.init[j], Value(0)}), ObjClass::Data,
                            static_cast<int>(j)));
    l_.push_back(layout.add("L_" + n, Value(0)));
  }
  for (size_t i = 0; i < nprocs_; ++i)
    for (size_t j = 0; j < env.tobjs.size(); ++j)
      r_[i].push_back(layout.add("r_" + std::to_string(i) + "_" + env.tobjs[j], Value(0), ObjClass::Meta,
                                 -1, static_cast<Pid>(i)));
}

bool LpTm::validate(Ctx& c, const TxnState& t) const {
  for (const auto& [x, seen] : t.rset)
    if (c.read(v_[x]) != seen) return true;
  return false;
}

bool LpTm::is_abortable(Ctx& c, const TxnState& t) const {
  for (const auto& [x, seen] : t.rset)
    if (!t.wset.count(x) && c.read(l_[x]) != Value(0)) return true;
  return validate(c, t);
}

bool LpTm::acquire(Ctx& c, const TxnState& t) const {
  Pid i = c.pid();
  for (const auto& [x, nv] : t.wset) c.write(r_[i][x], Value(1));
  bool taken = false;
  for (const auto& [x, nv] : t.wset) {
    for (size_t k = 0; k < nprocs_ && !taken; ++k)
      if (static_cast<Pid>(k) != i && c.read(r_[k][x]) == Value(1)) taken = true;
    if (taken) break;
  }
  if (taken) {
    for (const auto& [x, nv] : t.wset) c.write(r_[i][x], Value(0));
    return false;
  }
  if (!opt_.late_lock)
    for (const auto& [x, nv] : t.wset) c.write(l_[x], Value(1));
  return true;
}

void LpTm::release(Ctx& c, const TxnState& t) const {
  for (const auto& [x, nv] : t.wset) c.write(l_[x], Value(0));
  for (const auto& [x, nv] : t.wset) c.write(r_[c.pid()][x], Value(0));
}

std::optional<Value> LpTm::read(Ctx& c, TxnState& t, int x) const {
  if (auto w = t.wset.find(x); w != t.wset.end()) return w->second;
  if (auto r = t.rset.find(x); r != t.rset.end()) return r->second.at(0);
  Value cur = c.read(v_[x]);
  t.rset[x] = cur;
  if (c.read(l_[x]) != Value(0)) return std::nullopt;
  if (!opt_.ss && validate(c, t)) return std::nullopt;
  return cur.at(0);
}

bool LpTm::write(Ctx&, TxnState& t, int x, const Value& v) const {
  t.wset[x] = v;
  return true;
}

bool LpTm::try_commit(Ctx& c, TxnState& t) const {
  if (t.wset.empty()) return !(opt_.ss && validate(c, t));
  if (!acquire(c, t)) return false;
  if (is_abortable(c, t)) {
    release(c, t);
    return false;
  }
  if (opt_.late_lock)
    for (const auto& [x, nv] : t.wset) c.write(l_[x], Value(1));
  for (const auto& [x, nv] : t.wset) c.write(v_[x], Value::tuple({nv, Value(t.id)}));
  release(c, t);
  return true;
}

}  // namespace tmlab
