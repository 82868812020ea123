#pragma once

#include <map>
#include <string>
#include <vector>

#include "tmlab/substrate.hpp"

namespace tmlab {

// Base-object events (primitives and cache commits) of one transaction.
std::vector<Event> txn_events(const std::vector<Event>& log, TxnId txn);

// Greedy maximum of pairwise non-overlapping read-after-write patterns over
// the direct primitives of one transaction's trace.
int count_raws(const std::vector<Event>& trace);
int count_awars(const std::vector<Event>& trace);

// Stalls charged to log[idx]: length of the maximal run of nontrivial events
// on the same object by distinct other processes immediately preceding it in
// the subsequence of direct primitives.
int stalls_at(const std::vector<Event>& log, size_t idx);
int count_stalls(const std::vector<Event>& log, TxnId txn);

enum class RmrModel { CcWriteThrough, Dsm };

// 1 for each event that is a remote memory reference under the model.
// DSM needs an owner for every object touched (throws otherwise).
std::vector<int> rmr_flags(const std::vector<Event>& log, const Layout& layout, RmrModel model);
std::map<Pid, int> count_rmrs(const std::vector<Event>& log, const Layout& layout, RmrModel model);

struct MetaCount {
  int accesses = 0;
  int distinct = 0;
};
MetaCount count_metadata(const std::vector<Event>& log, const Layout& layout, TxnId txn);

struct TxnMetrics {
  TxnId txn = kNoTxn;
  Pid proc = -1;
  int raws = 0;
  int awars = 0;
  int stalls = 0;
  int steps = 0;
  int metadata_accesses = 0;
  int distinct_metadata = 0;
};

struct MetricsReport {
  std::vector<TxnMetrics> txns;
  TxnMetrics total;
  std::map<Pid, int> rmr_cc;
  std::map<Pid, int> rmr_dsm;  // empty when some object has no owner
};

MetricsReport measure(const Execution& x);
std::string format_report(const MetricsReport& r);

}  // namespace tmlab
