#include "tmlab/value.hpp"

#include <stdexcept>

namespace tmlab {

int64_t Value::as_int() const {
  if (!is_int()) throw std::logic_error("value is not an integer: " + str());
  return std::get<int64_t>(v_);
}

bool Value::as_bool() const {
  if (!is_bool()) throw std::logic_error("value is not a boolean: " + str());
  return std::get<bool>(v_);
}

const Value::Tuple& Value::as_tuple() const {
  if (!is_tuple()) throw std::logic_error("value is not a tuple: " + str());
  return *std::get<3>(v_);
}

bool Value::operator==(const Value& o) const {
  if (v_.index() != o.v_.index()) return false;
  if (!is_tuple()) return v_ == o.v_;
  const auto& a = std::get<3>(v_);
  const auto& b = std::get<3>(o.v_);
  return a == b || *a == *b;
}

bool Value::operator<(const Value& o) const {
  if (v_.index() != o.v_.index()) return v_.index() < o.v_.index();
  if (!is_tuple()) return v_ < o.v_;
  return *std::get<3>(v_) < *std::get<3>(o.v_);
}

std::string Value::str() const {
  switch (v_.index()) {
    case 0:
      return "nil";
    case 1:
      return std::to_string(std::get<int64_t>(v_));
    case 2:
      return std::get<bool>(v_) ? "true" : "false";
    default: {
      std::string s = "(";
      const auto& t = *std::get<3>(v_);
      for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += t[i].str();
      }
      return s + ")";
    }
  }
}

void Value::encode(std::string& out) const {
  switch (v_.index()) {
    case 0:
      out += 'n';
      break;
    case 1: {
      out += 'i';
      int64_t x = std::get<int64_t>(v_);
      out.append(reinterpret_cast<const char*>(&x), sizeof x);
      break;
    }
    case 2:
      out += std::get<bool>(v_) ? 'T' : 'F';
      break;
    default: {
      const auto& t = *std::get<3>(v_);
      out += '(';
      for (const auto& x : t) x.encode(out);
      out += ')';
    }
  }
}

}  // namespace tmlab
