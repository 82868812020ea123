#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tmlab/tmapi.hpp"

namespace tmlab {

constexpr size_t kDefaultTxnCap = 8;

struct Verdict {
  bool holds = false;
  bool refused = false;  // search bound exceeded; no decision
  std::vector<int> order;              // witness serialization
  std::map<int, bool> committed;       // completion choice per transaction
  std::string note;
};

std::string format_verdict(const Verdict& v, const std::string& property);

// s must be t-sequential and t-complete.
bool is_legal(const History& s);

Verdict final_state_opaque(const History& h, size_t cap = kDefaultTxnCap);
Verdict opaque(const History& h, size_t cap = kDefaultTxnCap);
Verdict du_opaque(const History& h, size_t cap = kDefaultTxnCap);
Verdict strictly_serializable(const History& h, size_t cap = kDefaultTxnCap);

enum class TmProperty { FinalOpacity, Opacity, DuOpacity, StrictSer };

// Independent re-check of a witness: builds the t-sequential history and
// tests legality, real-time order and, where required, local serializations.
bool witness_valid(const History& h, const Verdict& v, TmProperty p);

// ---- set and list histories ----

constexpr int64_t kNegInf = INT64_MIN / 4;
constexpr int64_t kPosInf = INT64_MAX / 4;

struct SetEvent {
  bool inv = true;
  int id = 0;
  OpKind kind = OpKind::Contains;
  int64_t arg = 0;
  bool bot = false;     // response was the abort marker
  bool result = false;  // boolean response
};

struct SetHistory {
  std::set<int64_t> initial;
  std::vector<SetEvent> events;
};

Verdict linearizable_set(const SetHistory& h);

// One low-level read or write of a list element, by logical element id
// (0 = head, 1 = tail). Element values are Tuple(key, next-element).
struct Access {
  bool write = false;
  int elem = -1;
  Value val;   // value read, or value written
  Value node;  // for an insert's write: content of the freshly linked node
};

// `complete` = the operation returned `result`; otherwise the trace is
// checked as a prefix of some valid trace.
bool locally_serializable_list(const std::vector<Access>& trace, OpKind kind, int64_t param,
                               bool complete, bool result);

struct ListHistory {
  SetHistory high;
  std::map<int, std::vector<Access>> traces;
};

ListHistory list_history_of(const Execution& x, const std::set<int64_t>& initial);
Verdict ls_linearizable(const ListHistory& h);

// initial: 1 3 4
// inv 1 insert 2
// acc 1 R 0 -inf 2          (operation, element, key, successor)
// acc 1 W 2 1 5 2 3         (write value, then the linked node or -)
// res 1 true                (true, false or bot)
// Accesses of an operation are listed between its invocation and response.
ListHistory parse_list_history(const std::string& text);
std::string format_list_history(const ListHistory& h);

}  // namespace tmlab
