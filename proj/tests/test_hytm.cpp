#include "doctest.h"
#include "support.hpp"
#include "tmlab/hytm.hpp"

using namespace tmlab;
using namespace tmlab::testing;

namespace {

void step_responses(World& w, Pid p, int n) {
  while (n > 0 && !w.proc(p).done())
    if (w.step(p).kind == EvKind::Respond) --n;
}

void finish(World& w, Pid p) {
  while (!w.proc(p).done()) w.step(p);
}

Tok last_tok(const World& w, Pid p) {
  Tok t = Tok::Ok;
  for (const auto& e : w.events())
    if (e.proc == p && e.kind == EvKind::Respond) t = e.tok;
  return t;
}

MetaCount fast_meta(const std::string& wl, const std::string& tm) {
  TmWorld tw = tm_world(wl, tm, 64);
  Execution x = run_fair(tw.world, 100000);
  return count_metadata(x.events, *x.layout, 1);
}

}  // namespace

TEST_CASE("slow writer after a fast read aborts the fast transaction") {
  for (const char* tm : {"hytm1", "hytm2"}) {
    TmWorld tw = tm_world("objects: X\nprocess p1 fast:\n  txn T2: R X ; C\nprocess p2 slow:\n  txn T1: W X 1 ; C\n", tm);
    World w = tw.world;
    step_responses(w, 0, 1);
    finish(w, 1);
    finish(w, 0);
    CHECK(last_tok(w, 0) == Tok::Abort);
    CHECK(last_tok(w, 1) == Tok::Commit);
    CHECK(du_opaque(tw.history(w.to_execution(false))).holds);
  }
}

TEST_CASE("slow reader after a fast write aborts the fast transaction") {
  for (const char* tm : {"hytm1", "hytm2"}) {
    TmWorld tw = tm_world("objects: X\nprocess p1 fast:\n  txn T2: W X 1 ; C\nprocess p2 slow:\n  txn T1: R X ; C\n", tm);
    World w = tw.world;
    step_responses(w, 0, 1);
    finish(w, 1);
    finish(w, 0);
    CHECK(last_tok(w, 0) == Tok::Abort);
  }
}

TEST_CASE("fast transactions alone commit using cached accesses only") {
  for (const char* tm : {"hytm1", "hytm2"}) {
    TmWorld tw = tm_world("objects: X Y\nprocess p1 fast:\n  txn T1: R X ; W Y 2 ; C\n", tm);
    Execution x = run_fair(tw.world, 1000);
    CHECK(statuses(tw.history(x))[1] == TxnStatus::Committed);
    for (const auto& e : x.events)
      if (e.kind == EvKind::Prim) CHECK(e.cached);
  }
}

TEST_CASE("metadata touched by fast transactions") {
  CHECK(fast_meta("objects: X0 X1 X2\nprocess p1 fast:\n  txn T1: R X0 ; R X1 ; R X2 ; C\n", "hytm1").distinct == 3);
  CHECK(fast_meta("objects: X0 X1 X2\nprocess p1 fast:\n  txn T1: R X0 ; R X1 ; R X2 ; C\n", "hytm2").distinct <= 1);
  for (const char* tm : {"hytm1", "hytm2"})
    CHECK(fast_meta("objects: X0 X1\nprocess p1 fast:\n  txn T1: W X0 1 ; W X1 2 ; C\n", tm).distinct == 0);
}

TEST_CASE("a fast transaction over capacity aborts") {
  for (const char* tm : {"hytm1", "hytm2"}) {
    TmWorld tw = tm_world("objects: X0 X1 X2 X3\nprocess p1 fast:\n  txn T1: R X0 ; R X1 ; R X2 ; R X3 ; C\n", tm, 2);
    Execution x = run_fair(tw.world, 1000);
    CHECK(statuses(tw.history(x))[1] == TxnStatus::Aborted);
  }
}

TEST_CASE("tracking set capacity") {
  for (size_t ts : {1, 3}) {
    Memory m;
    m.cells.assign(ts + 1, Value(0));
    m.trackers.resize(1);
    m.ts = ts;
    bool trivial = true;
    for (size_t i = 0; i < ts; ++i) CHECK_FALSE(m.apply_cached(0, static_cast<ObjId>(i), Prim::read(), &trivial).bot);
    CHECK(m.apply_cached(0, 0, Prim::read(), &trivial).bot);
    CHECK(m.trackers[0].entries.empty());
    CHECK_FALSE(m.apply_cached(0, 0, Prim::read(), &trivial).bot);
  }
}

TEST_CASE("a direct write invalidates a cached reader") {
  Memory m;
  m.cells.assign(1, Value(0));
  m.trackers.resize(2);
  bool trivial = true;
  CHECK_FALSE(m.apply_cached(0, 0, Prim::read(), &trivial).bot);
  m.apply_direct(1, 0, Prim::write(Value(5)), &trivial);
  CHECK(m.cache_commit(0).bot);
  CHECK(m.cells[0] == Value(5));
}

TEST_CASE("hybrid workload enumerations are du-opaque") {
  for (const char* tm : {"hytm1", "hytm2"}) {
    TmWorld tw = tm_world(corpus("hybrid.tm"), tm);
    size_t n = enumerate_traces(tw.world, 400, [&](const Execution& x) {
      CHECK_FALSE(x.incomplete);
      CHECK(du_opaque(tw.history(x)).holds);
      return true;
    });
    CHECK(n > 1);
  }
}
