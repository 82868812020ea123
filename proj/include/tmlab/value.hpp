#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace tmlab {

// Immutable tagged datum. The default-constructed value is nil, used as the
// reserved "bottom" marker (never produced by workload integers).
class Value {
 public:
  using Tuple = std::vector<Value>;

  Value() = default;
  Value(int v) : v_(static_cast<int64_t>(v)) {}
  Value(int64_t v) : v_(v) {}
  Value(bool b) : v_(b) {}
  explicit Value(Tuple t) : v_(std::make_shared<const Tuple>(std::move(t))) {}

  static Value tuple(std::initializer_list<Value> xs) { return Value(Tuple(xs)); }

  bool is_nil() const { return v_.index() == 0; }
  bool is_int() const { return v_.index() == 1; }
  bool is_bool() const { return v_.index() == 2; }
  bool is_tuple() const { return v_.index() == 3; }

  int64_t as_int() const;
  bool as_bool() const;
  const Tuple& as_tuple() const;
  const Value& at(size_t i) const { return as_tuple().at(i); }
  size_t size() const { return is_tuple() ? as_tuple().size() : 0; }

  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }
  bool operator<(const Value& o) const;

  std::string str() const;
  void encode(std::string& out) const;

 private:
  // Tuples are shared and never mutated, so copies are cheap.
  std::variant<std::monostate, int64_t, bool, std::shared_ptr<const Tuple>> v_;
};

}  // namespace tmlab
