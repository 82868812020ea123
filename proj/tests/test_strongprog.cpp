#include "doctest.h"
#include "support.hpp"
#include "tmlab/strongprog.hpp"

using namespace tmlab;
using namespace tmlab::testing;

TEST_CASE("two updaters on one object: at least one commits in every reachable outcome") {
  TmWorld tw = tm_world(corpus("ww.tm"), "strong");
  size_t terminal = 0;
  auto st = explore_states(tw.world, 100000, [&](const World& w) {
    if (!w.all_done()) return true;
    ++terminal;
    CHECK(w.proc(0).state().var("commits") + w.proc(1).state().var("commits") >= 1);
    return true;
  });
  CHECK_FALSE(st.depth_limited);
  CHECK(terminal > 0);
}

TEST_CASE("strong TM histories are du-opaque") {
  TmWorld tw = tm_world(corpus("conflict.tm"), "strong");
  auto st = explore_states(tw.world, 100000, [](const World&) { return true; });
  CHECK_FALSE(st.depth_limited);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    World w = tw.world;
    for (int s = 0; s < 5000 && !w.all_done(); ++s) {
      Pid p = static_cast<Pid>(rng() % 2);
      if (!w.proc(p).done()) w.step(p);
    }
    REQUIRE(w.all_done());
    CHECK(du_opaque(tw.history(w.to_execution(false))).holds);
  }
}

TEST_CASE("trylock over disjoint sets never waits") {
  World w = build_trylock_world({{{0}, {1}}, 1, true, 2});
  World solo = w;
  for (int i = 0; i < 200 && !solo.proc(0).done(); ++i) solo.step(0);
  CHECK(solo.proc(0).done());
  World half = w;
  for (int i = 0; i < 200 && half.proc(1).state().var("holds") == 0; ++i) half.step(1);
  REQUIRE(half.proc(1).state().var("holds") == 1);
  for (int i = 0; i < 200 && !half.proc(0).done(); ++i) half.step(0);
  CHECK(half.proc(0).done());
}

TEST_CASE("trylock holders exclude each other only with the doorway wait") {
  for (bool doorway : {true, false}) {
    World w = build_trylock_world({{{0}, {0}}, 2, doorway, 1});
    for (Pid p = 0; p < 2; ++p) w.proc_mut(p).enable_raw_monitor();
    int raws = 0;
    bool both = false;
    auto st = explore_states(w, 100000, [&](const World& s) {
      both = both || (s.proc(0).state().var("holds") == 1 && s.proc(1).state().var("holds") == 1);
      raws = std::max({raws, s.proc(0).raw_max(), s.proc(1).raw_max()});
      return true;
    });
    CHECK_FALSE(st.depth_limited);
    CHECK(both == !doorway);
    CHECK(raws <= 4);
  }
}

TEST_CASE("mutex from the strong TM") {
  World w = build_mutex_world({2, 2, true});
  Execution x = run_fair(w, 10000);
  CHECK_FALSE(x.incomplete);
  bool both = false;
  explore_states(w, 60, [&](const World& s) {
    both = both || (s.proc(0).state().var("cs") == 1 && s.proc(1).state().var("cs") == 1);
    return !both;
  });
  CHECK_FALSE(both);
}
