#include "tmlab/oftm.hpp"

#include <stdexcept>

namespace tmlab {

void OfTm::setup(Layout& layout, const TmEnv& env) {
  tvar_.clear();
  status_.clear();
  for (size_t j = 0; j < env.tobjs.size(); ++j)
    tvar_.push_back(layout.add("tvar_" + env.tobjs[j], Value::tuple({Value(0), env.init[j], env.init[j]}),
                               ObjClass::Data, static_cast<int>(j), 0));
  status_[0] = layout.add("status_T0", Value(kCommitted), ObjClass::Meta, -1, 0);
  for (TxnId k : env.txns) {
    if (status_.count(k)) throw std::invalid_argument("duplicate transaction id");
    status_[k] = layout.add("status_T" + std::to_string(k), Value(kLive), ObjClass::Meta, -1, 0);
  }
}

std::optional<Value> OfTm::current(Ctx& c, const Value& tv) const {
  ObjId st = status_.at(static_cast<TxnId>(tv.at(0).as_int()));
  int64_t s = c.read(st).as_int();
  if (s == kCommitted) return tv.at(2);
  if (s == kAborted) return tv.at(1);
  if (c.cas(st, Value(kLive), Value(kAborted))) return tv.at(1);
  return std::nullopt;
}

bool OfTm::validate(Ctx& c, const TxnState& t) const {
  for (const auto& [x, rec] : t.rset)
    if (!t.aux.count(x) && c.read(tvar_[x]) != rec.at(0)) return true;
  return false;
}

std::optional<Value> OfTm::read(Ctx& c, TxnState& t, int x) const {
  if (t.aux.count(x)) return t.wset.count(x) ? t.wset.at(x) : t.rset.at(x).at(1);
  if (auto r = t.rset.find(x); r != t.rset.end()) return r->second.at(1);
  Value tv = c.read(tvar_[x]);
  auto curr = current(c, tv);
  if (!curr) return std::nullopt;
  ObjId self = status_.at(t.id);
  if (weak_) {
    Value mine = Value::tuple({Value(t.id), *curr, *curr});
    if (c.cas(tvar_[x], tv, mine) && c.read(self) == Value(kLive)) {
      t.aux[x] = mine;
      t.rset[x] = Value::tuple({tv, *curr});
      return curr;
    }
    return std::nullopt;
  }
  if (c.read(self) == Value(kLive) && !validate(c, t)) {
    t.rset[x] = Value::tuple({tv, *curr});
    return curr;
  }
  return std::nullopt;
}

bool OfTm::write(Ctx& c, TxnState& t, int x, const Value& v) const {
  if (auto own = t.aux.find(x); own != t.aux.end()) {
    Value nw = Value::tuple({Value(t.id), own->second.at(1), v});
    if (!c.cas(tvar_[x], own->second, nw)) return false;
    own->second = nw;
    t.wset[x] = v;
    return true;
  }
  Value tv = c.read(tvar_[x]);
  auto curr = current(c, tv);
  if (!curr) return false;
  if (auto r = t.rset.find(x); r != t.rset.end() && r->second.at(0) != tv) return false;
  Value nw = Value::tuple({Value(t.id), *curr, v});
  if (c.cas(tvar_[x], tv, nw) && c.read(status_.at(t.id)) == Value(kLive)) {
    t.aux[x] = nw;
    t.wset[x] = v;
    return true;
  }
  return false;
}

bool OfTm::try_commit(Ctx& c, TxnState& t) const {
  if (!weak_ && validate(c, t)) return false;
  return c.cas(status_.at(t.id), Value(kLive), Value(kCommitted));
}

}  // namespace tmlab
