#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tmlab/substrate.hpp"

namespace tmlab {

// One invocation or response of a t-operation.
struct HEvent {
  bool inv = true;
  TxnId txn = 0;
  OpKind kind = OpKind::Read;
  int obj = -1;
  Value val;          // write argument on invocation, read value on response
  Tok tok = Tok::Ok;  // response token: Val, Ok, Abort, Commit
};

struct History {
  std::vector<std::string> objs;
  std::vector<Value> init;
  std::vector<HEvent> events;

  int obj_index(const std::string& name) const;
  int add_obj(const std::string& name, Value init = Value(0));
  History prefix(size_t n) const;
};

History parse_history(const std::string& text);
std::string format_history(const History& h);

struct TOpRec {
  OpKind kind = OpKind::Read;
  int obj = -1;
  Value arg;
  int inv = -1;
  int res = -1;  // -1 while pending
  Tok tok = Tok::Ok;
  Value val;
};

enum class TxnStatus { Committed, Aborted, CommitPending, Live };

struct TxnInfo {
  TxnId id = 0;
  std::vector<TOpRec> ops;
  int first = -1;
  int last = -1;
  bool complete = true;    // no pending t-operation
  bool tcomplete = false;  // ends with A or C
  TxnStatus status = TxnStatus::Live;
  int tryc_inv = -1;
};

// Per-transaction view of a well-formed history, ordered by transaction id.
// Throws std::invalid_argument on malformed histories.
std::vector<TxnInfo> analyze(const History& h);

using TxnPairs = std::set<std::pair<TxnId, TxnId>>;

TxnPairs real_time_order(const History& h);

struct DataSet {
  std::map<int, Value> rset;  // t-object -> value returned (nil if none)
  std::map<int, Value> wset;  // t-object -> last value written
};
std::map<TxnId, DataSet> data_sets(const History& h);

// Every completion, in a fixed order: commit-pending transactions are resolved
// to C before A, by ascending id.
std::vector<History> completions(const History& h);

TxnPairs conflicts(const History& h, const std::map<TxnId, DataSet>& ds);

History history_of(const Execution& x, const std::vector<std::string>& objs,
                   const std::vector<Value>& init);

}  // namespace tmlab
