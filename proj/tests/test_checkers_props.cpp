#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace tmlab;
using namespace tmlab::testing;

TEST_CASE("containment between the TM properties") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    History h = i % 2 ? tm_history(rng) : random_history(rng);
    bool fso = final_state_opaque(h).holds, op = opaque(h).holds, du = du_opaque(h).holds;
    bool ss = strictly_serializable(h).holds;
    CHECK((!du || op));
    CHECK((!op || fso));
    CHECK((!du || ss));
  }
}

TEST_CASE("du-opacity and strict serializability are prefix-closed") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    History h = i % 2 ? tm_history(rng) : random_history(rng);
    bool du = du_opaque(h).holds, ss = strictly_serializable(h).holds;
    for (size_t k = 0; k < h.events.size(); ++k) {
      History p = h.prefix(k);
      if (du) CHECK(du_opaque(p).holds);
      if (ss) CHECK(strictly_serializable(p).holds);
    }
  }
}

TEST_CASE("every positive verdict carries a valid witness") {
  std::mt19937_64 rng(13);
  const std::pair<TmProperty, Verdict (*)(const History&, size_t)> props[] = {
      {TmProperty::FinalOpacity, final_state_opaque},
      {TmProperty::DuOpacity, du_opaque},
      {TmProperty::StrictSer, strictly_serializable}};
  for (int i = 0; i < 200; ++i) {
    History h = i % 2 ? tm_history(rng) : random_history(rng);
    for (const auto& [p, f] : props) {
      Verdict v = f(h, kDefaultTxnCap);
      if (v.holds) CHECK(witness_valid(h, v, p));
    }
  }
}

TEST_CASE("histories produced by the TMs are du-opaque") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 300; ++i) {
    History h = tm_history(rng);
    CHECK(du_opaque(h).holds);
  }
}

TEST_CASE("t-sequential legal histories pass every property") {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 100; ++i) {
    History h;
    h.add_obj("X");
    h.add_obj("Y");
    Value cur[2] = {Value(0), Value(0)};
    for (int t = 1; t <= 4; ++t) {
      Value local[2] = {cur[0], cur[1]};
      for (int k = 0; k < 3; ++k) {
        int o = static_cast<int>(rng() % 2);
        if (rng() % 2) {
          Value v(static_cast<int64_t>(t * 10 + k));
          h.events.push_back({true, t, OpKind::Write, o, v, Tok::Ok});
          h.events.push_back({false, t, OpKind::Write, o, {}, Tok::Ok});
          local[o] = v;
        } else {
          h.events.push_back({true, t, OpKind::Read, o, {}, Tok::Ok});
          h.events.push_back({false, t, OpKind::Read, o, local[o], Tok::Val});
        }
      }
      bool commit = rng() % 3 != 0;
      h.events.push_back({true, t, OpKind::TryC, -1, {}, Tok::Ok});
      h.events.push_back({false, t, OpKind::TryC, -1, {}, commit ? Tok::Commit : Tok::Abort});
      if (commit) {
        cur[0] = local[0];
        cur[1] = local[1];
      }
    }
    CHECK(is_legal(h));
    CHECK(du_opaque(h).holds);
    CHECK(strictly_serializable(h).holds);
  }
}
