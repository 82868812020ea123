#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace tmlab;
using namespace tmlab::testing;

namespace {

Memory memory(size_t n, size_t procs = 2, size_t ts = 8) {
  Memory m;
  m.cells.assign(n, Value(0));
  m.trackers.resize(procs);
  m.ts = ts;
  return m;
}

struct Toy {
  std::shared_ptr<Layout> layout = std::make_shared<Layout>();
  std::vector<Process> procs;

  void add(const std::string& name, std::vector<Process::Item> items) {
    procs.emplace_back(static_cast<Pid>(procs.size()), name,
                       std::make_shared<const std::vector<Process::Item>>(std::move(items)));
  }
  World world() const { return World(layout, procs); }
};

// Two processes, each with `k` writes to its own object.
World straight_line(int k) {
  Toy t;
  ObjId x = t.layout->add("x", Value(0));
  ObjId y = t.layout->add("y", Value(0));
  for (ObjId o : {x, y}) {
    std::vector<Process::Item> items;
    for (int i = 0; i < k; ++i) items.push_back([o, i](Ctx& c, PState&) { c.write(o, Value(i)); });
    t.add(o == x ? "a" : "b", items);
  }
  return t.world();
}

}  // namespace

TEST_CASE("direct primitives and triviality") {
  Memory m = memory(1);
  bool triv = false;
  CHECK(m.apply_direct(0, 0, Prim::read(), &triv).v == Value(0));
  CHECK(triv);
  m.apply_direct(0, 0, Prim::write(Value(4)), &triv);
  CHECK_FALSE(triv);
  CHECK_FALSE(m.apply_direct(0, 0, Prim::cas(Value(3), Value(5)), &triv).v.as_bool());
  CHECK(triv);
  CHECK(m.apply_direct(0, 0, Prim::cas(Value(4), Value(5)), &triv).v.as_bool());
  CHECK_FALSE(triv);
  CHECK(m.apply_direct(0, 0, Prim::fadd(2), &triv).v == Value(5));
  CHECK(m.cells[0] == Value(7));
}

TEST_CASE("cached writes stay private until cache-commit") {
  Memory m = memory(2);
  bool triv = true;
  CHECK_FALSE(m.apply_cached(0, 0, Prim::write(Value(9)), &triv).bot);
  CHECK(m.cells[0] == Value(0));
  CHECK(m.apply_cached(0, 0, Prim::read(), &triv).v == Value(9));
  CHECK_FALSE(m.cache_commit(0).bot);
  CHECK(m.cells[0] == Value(9));
  CHECK(m.trackers[0].entries.empty());
}

TEST_CASE("tracking set invalidation") {
  bool triv = true;
  SUBCASE("any access by another process invalidates an exclusive entry") {
    Memory m = memory(1);
    m.apply_cached(0, 0, Prim::write(Value(1)), &triv);
    m.apply_direct(1, 0, Prim::read(), &triv);
    CHECK(m.cache_commit(0).bot);
    CHECK(m.cells[0] == Value(0));
  }
  SUBCASE("a trivial access leaves a shared entry valid") {
    Memory m = memory(1);
    m.apply_cached(0, 0, Prim::read(), &triv);
    m.apply_direct(1, 0, Prim::read(), &triv);
    CHECK_FALSE(m.cache_commit(0).bot);
  }
  SUBCASE("a nontrivial access invalidates a shared entry") {
    Memory m = memory(1);
    m.apply_cached(0, 0, Prim::read(), &triv);
    m.apply_direct(1, 0, Prim::write(Value(2)), &triv);
    CHECK(m.apply_cached(0, 0, Prim::read(), &triv).bot);
    CHECK(m.trackers[0].entries.empty());
  }
  SUBCASE("a cached access conflicting with another tracker aborts the accessor") {
    Memory m = memory(1);
    m.apply_cached(0, 0, Prim::write(Value(1)), &triv);
    CHECK(m.apply_cached(1, 0, Prim::read(), &triv).bot);
    CHECK_FALSE(m.cache_commit(0).bot);
  }
}

TEST_CASE("capacity abort fires when the tracking set is full") {
  bool triv = true;
  for (size_t ts = 1; ts <= 4; ++ts) {
    Memory m = memory(ts + 1, 1, ts);
    for (size_t i = 0; i < ts; ++i) CHECK_FALSE(m.apply_cached(0, static_cast<ObjId>(i), Prim::read(), &triv).bot);
    CHECK(m.apply_cached(0, 0, Prim::read(), &triv).bot);
    CHECK(m.trackers[0].entries.empty());
  }
}

TEST_CASE("layout lookup") {
  Layout l;
  ObjId a = l.add("a", Value(1), ObjClass::Data, 0, 1);
  CHECK(l.find("a") == a);
  CHECK(l.find("zz") < 0);
  CHECK_THROWS(l.at("zz"));
  CHECK(l.info(a).owner == 1);
  CHECK(l.init(a) == Value(1));
}

TEST_CASE("enumeration of straight-line processes yields the multinomial count") {
  CHECK(enumerate_executions(straight_line(1), 100, [](const Execution&) { return true; }) == 2);
  CHECK(enumerate_executions(straight_line(2), 100, [](const Execution&) { return true; }) == 6);
  CHECK(enumerate_executions(straight_line(3), 100, [](const Execution&) { return true; }) == 20);
}

TEST_CASE("independent steps collapse to one trace") {
  CHECK(enumerate_traces(straight_line(3), 100, [](const Execution&) { return true; }) == 1);
}

TEST_CASE("trace enumeration covers every history of the full enumeration") {
  for (const char* tm : {"lp", "of-rw", "hytm1"}) {
    TmWorld tw = tm_world(corpus("ww.tm"), tm);
    std::set<std::string> full, reduced;
    size_t nf = enumerate_executions(tw.world, 400, [&](const Execution& x) {
      full.insert(format_history(tw.history(x)));
      return true;
    });
    size_t nr = enumerate_traces(tw.world, 400, [&](const Execution& x) {
      reduced.insert(format_history(tw.history(x)));
      return true;
    });
    CHECK(nr <= nf);
    CHECK(full == reduced);
  }
}

TEST_CASE("enumeration honours the event bound and early stop") {
  size_t incomplete = 0;
  enumerate_executions(straight_line(3), 2, [&](const Execution& x) {
    incomplete += x.incomplete;
    return true;
  });
  CHECK(incomplete == 4);
  CHECK(enumerate_executions(straight_line(3), 100, [](const Execution&) { return false; }) == 1);
}

TEST_CASE("schedules name processes") {
  World w = straight_line(2);
  Execution x = run_schedule(w, parse_schedule("b a # comment\nb a"));
  REQUIRE(x.events.size() == 4);
  CHECK(x.events[0].proc == 1);
  CHECK(x.choices == std::vector<Pid>{1, 0, 1, 0});
  CHECK_THROWS(run_schedule(w, parse_schedule("c")));
}

TEST_CASE("spinning revisits one state and fair scheduling finishes") {
  Toy t;
  ObjId flag = t.layout->add("flag", Value(0));
  ObjId out = t.layout->add("out", Value(0));
  t.add("waiter", {[flag, out](Ctx& c, PState&) {
          c.spin_while([&] { return c.read(flag) == Value(0); });
          c.write(out, Value(1));
        }});
  t.add("setter", {[flag](Ctx& c, PState&) { c.write(flag, Value(1)); }});
  World w = t.world();
  auto st = explore_states(w, 1000, [](const World&) { return true; });
  CHECK_FALSE(st.depth_limited);
  CHECK(st.states <= 6);
  Execution x = run_fair(w, 100);
  CHECK_FALSE(x.incomplete);
  CHECK(x.final_mem[out] == Value(1));
}

TEST_CASE("step machines replay their log") {
  Toy t;
  ObjId x = t.layout->add("x", Value(0));
  t.add("p", {[x](Ctx& c, PState& s) {
          Value v = c.fadd(x, 1);
          s.vars["seen"] = v.as_int();
          c.fadd(x, 1);
        }});
  t.add("q", {[x](Ctx& c, PState&) { c.fadd(x, 10); }});
  World w = t.world();
  CHECK(w.proc(0).fresh());
  w.step(0);
  CHECK_FALSE(w.proc(0).fresh());
  w.step(1);
  w.step(0);
  CHECK(w.proc(0).done());
  CHECK(w.proc(0).state().var("seen") == 0);
  CHECK(w.memory().cells[x] == Value(12));
}
