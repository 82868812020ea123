#include "doctest.h"
#include "support.hpp"
#include "tmlab/listset.hpp"

using namespace tmlab;
using namespace tmlab::testing;

namespace {

History h_of(const std::string& s) { return parse_history(s); }

}  // namespace

TEST_CASE("golden histories") {
  CHECK_FALSE(final_state_opaque(parse_history(corpus("fig_one_prefix.hist"))).holds);
  CHECK(final_state_opaque(parse_history(corpus("fig_one.hist"))).holds);
  History lin = parse_history(corpus("notduopaque.hist"));
  CHECK(opaque(lin).holds);
  CHECK_FALSE(du_opaque(lin).holds);
  Verdict du = du_opaque(parse_history(corpus("du_example.hist")));
  CHECK(du.holds);
  CHECK(du.order == std::vector<int>{1, 3, 2});
  History vwc = parse_history(corpus("vwc.hist"));
  CHECK(strictly_serializable(vwc).holds);
  CHECK_FALSE(du_opaque(vwc).holds);
  CHECK_FALSE(opaque(vwc).holds);
}

TEST_CASE("history text round-trips") {
  for (const char* f : {"fig_one.hist", "notduopaque.hist", "du_example.hist", "vwc.hist"}) {
    History h = parse_history(corpus(f));
    History g = parse_history(format_history(h));
    CHECK(format_history(g) == format_history(h));
    CHECK(g.events.size() == h.events.size());
  }
}

TEST_CASE("malformed histories are rejected") {
  CHECK_THROWS(analyze(h_of("init X=0\nres T1 read X 0\n")));
  CHECK_THROWS(parse_history("init X=0\ninv T1 frob X\n"));
  CHECK_THROWS(parse_history("init X\n"));
  CHECK_THROWS(parse_history("init X=0\ninv T1 write X\n"));
  CHECK_THROWS(analyze(h_of("init X=0\ninv T1 read X\ninv T1 read X\n")));
}

TEST_CASE("reading an uncommitted value breaks du-opacity but not final-state opacity") {
  History h = h_of(
      "init X=0\n"
      "inv T1 write X 1\nres T1 write X ok\n"
      "inv T2 read X\nres T2 read X 1\n"
      "inv T1 tryC\nres T1 tryC C\n");
  CHECK_FALSE(du_opaque(h).holds);
  CHECK(final_state_opaque(h).holds);
}

TEST_CASE("a read from an aborted writer is never legal") {
  History h = h_of(
      "init X=0\n"
      "inv T1 write X 1\nres T1 write X ok\ninv T1 tryC\nres T1 tryC A\n"
      "inv T2 read X\nres T2 read X 1\ninv T2 tryC\nres T2 tryC C\n");
  CHECK_FALSE(final_state_opaque(h).holds);
  CHECK_FALSE(strictly_serializable(h).holds);
}

TEST_CASE("strict serializability ignores aborted and live readers") {
  History h = h_of(
      "init X=0\n"
      "inv T1 read X\nres T1 read X 5\ninv T1 tryC\nres T1 tryC A\n");
  CHECK(strictly_serializable(h).holds);
  CHECK_FALSE(opaque(h).holds);
}

TEST_CASE("real-time order constrains the serialization") {
  History h = h_of(
      "init X=0\n"
      "inv T1 write X 1\nres T1 write X ok\ninv T1 tryC\nres T1 tryC C\n"
      "inv T2 read X\nres T2 read X 0\ninv T2 tryC\nres T2 tryC C\n");
  CHECK_FALSE(strictly_serializable(h).holds);
  CHECK_FALSE(du_opaque(h).holds);
}

TEST_CASE("commit-pending transactions may be completed either way") {
  History h = h_of(
      "init X=0\n"
      "inv T1 write X 1\nres T1 write X ok\ninv T1 tryC\n"
      "inv T2 read X\nres T2 read X 1\n");
  CHECK(completions(h).size() == 2);
  Verdict v = du_opaque(h);
  CHECK(v.holds);
  CHECK(v.committed.at(1));
  CHECK(witness_valid(h, v, TmProperty::DuOpacity));
}

TEST_CASE("witnesses are re-checked independently") {
  History h = parse_history(corpus("du_example.hist"));
  Verdict v = du_opaque(h);
  CHECK(witness_valid(h, v, TmProperty::DuOpacity));
  Verdict bogus = v;
  bogus.order = {2, 1, 3};
  CHECK_FALSE(witness_valid(h, bogus, TmProperty::DuOpacity));
}

TEST_CASE("the checker refuses above its transaction cap") {
  std::string s = "init X=0\n";
  for (int i = 1; i <= 9; ++i) {
    std::string t = "T" + std::to_string(i);
    s += "inv " + t + " read X\nres " + t + " read X 0\ninv " + t + " tryC\nres " + t + " tryC C\n";
  }
  Verdict v = du_opaque(parse_history(s));
  CHECK(v.refused);
  CHECK(du_opaque(parse_history(s), 9).holds);
}

TEST_CASE("conflicts need concurrency and a shared object with a writer") {
  History h = h_of(
      "init X=0 Y=0\n"
      "inv T1 write X 1\ninv T2 read X\ninv T3 read Y\n"
      "res T1 write X ok\nres T2 read X 0\nres T3 read Y 0\n");
  auto cf = conflicts(h, data_sets(h));
  CHECK(cf.count({1, 2}));
  CHECK_FALSE(cf.count({1, 3}));
  CHECK_FALSE(cf.count({2, 3}));
}

TEST_CASE("set linearizability") {
  SetHistory h;
  h.initial = {1};
  h.events = {{true, 1, OpKind::Insert, 2}, {true, 2, OpKind::Contains, 2}, {false, 2, OpKind::Contains, 2, false, true},
              {false, 1, OpKind::Insert, 2, false, true}};
  CHECK(linearizable_set(h).holds);
  SetHistory g = h;
  g.events = {{true, 1, OpKind::Insert, 2}, {false, 1, OpKind::Insert, 2, false, true},
              {true, 2, OpKind::Contains, 2}, {false, 2, OpKind::Contains, 2, false, false}};
  CHECK_FALSE(linearizable_set(g).holds);
  SetHistory b = g;
  b.events[3].bot = true;
  CHECK(linearizable_set(b).holds);
}

TEST_CASE("local serializability of list traces") {
  std::vector<Value> elems{Value::tuple({Value(kNegInf), Value(2)}), Value::tuple({Value(kPosInf), Value(1)}),
                           Value::tuple({Value(3), Value(1)}), Value()};
  std::vector<Access> tr;
  std::vector<Value> copy = elems;
  bool r = ll_apply(copy, OpKind::Insert, 2, 3, &tr);
  CHECK(r);
  CHECK(locally_serializable_list(tr, OpKind::Insert, 2, true, true));
  CHECK_FALSE(locally_serializable_list(tr, OpKind::Insert, 2, true, false));
  for (size_t k = 0; k <= tr.size(); ++k) {
    std::vector<Access> prefix(tr.begin(), tr.begin() + static_cast<long>(k));
    CHECK(locally_serializable_list(prefix, OpKind::Insert, 2, false, false));
  }
  std::vector<Access> skipped{tr[0], tr.back()};
  CHECK_FALSE(locally_serializable_list(skipped, OpKind::Insert, 2, true, true));
}

TEST_CASE("list history text round-trips") {
  std::string text =
      "initial: 3\n"
      "inv 1 insert 2\n"
      "acc 1 R 0 -inf 2\n"
      "acc 1 R 2 3 1\n"
      "acc 1 W 0 -inf 3 2 2\n"
      "res 1 true\n"
      "inv 2 contains 3\n"
      "res 2 bot\n";
  ListHistory h = parse_list_history(text);
  CHECK(h.high.initial == std::set<int64_t>{3});
  CHECK(h.traces.at(1).size() == 3);
  CHECK(format_list_history(parse_list_history(format_list_history(h))) == format_list_history(h));
  CHECK(ls_linearizable(h).holds);
  CHECK_THROWS(parse_list_history("res 4 true\n"));
  CHECK_THROWS(parse_list_history("inv 1 frob 2\n"));
}
