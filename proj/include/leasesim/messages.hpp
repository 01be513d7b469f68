#pragma once

#include <string>
#include <variant>
#include <vector>

#include "leasesim/types.hpp"

namespace leasesim {

// A batch: op multiset (kept id-sorted) plus its promise time. promise=kNever
// marks the "not yet known" initializer value.
struct Batch {
  std::vector<Operation> ops;
  Tick promise = kNever;
  bool operator==(const Batch&) const = default;
};

inline Batch init_batch() { return Batch{{}, kNever}; }
inline bool is_init(const Batch& b) { return b.ops.empty() && b.promise == kNever; }

// lease = (batch index, start time); later-start / higher-index wins
struct Lease {
  std::int64_t batch = 0;
  Tick start = kAlways;
  bool operator==(const Lease&) const = default;
};
inline bool lease_less(const Lease& a, const Lease& b) {
  return a.batch != b.batch ? a.batch < b.batch : a.start < b.start;
}

struct Estimate {
  std::vector<Operation> ops;
  Tick ts = -1;            // timestamp of the accepting leader, -1 = none
  std::int64_t index = 0;  // batch index the ops were proposed for
  bool operator==(const Estimate&) const = default;
};

struct OpRequestMsg {
  Operation op;
};
struct EstRequestMsg {
  Tick t;
};
struct EstReplyMsg {
  Tick t;
  Estimate est;
  std::int64_t prev_index;  // est.index - 1
  Batch prev;               // sender's Batch[est.index - 1]
};
// Prepare carries the proposed batch; under the status mechanism the same
// message doubles as the periodic status round (kind name differs in traces).
struct PrepareMsg {
  std::vector<Operation> ops;
  Tick promise;
  Tick t;
  std::int64_t j;
  Batch prev;  // sender's Batch[j-1]
};
struct PAckMsg {
  Tick t;
  std::int64_t j;
};
struct CommitLeaseMsg {
  Batch b;
  std::int64_t j;
  Lease lease;
  std::vector<ProcId> holders;
};
struct RequestLeaseMsg {};
struct MyGapsMsg {
  std::vector<std::int64_t> gaps;
};
struct MyBatchMsg {
  std::int64_t j;
  Batch b;
};
struct HeartbeatMsg {
  Tick clock;
};

using Message = std::variant<OpRequestMsg, EstRequestMsg, EstReplyMsg, PrepareMsg, PAckMsg,
                             CommitLeaseMsg, RequestLeaseMsg, MyGapsMsg, MyBatchMsg, HeartbeatMsg>;

// Wire-kind name used for traces and per-link delay rules. status_tag renames
// prepare to status (the algorithm-2 flavor of the same message).
std::string message_kind(const Message& m, bool status_tag);

}  // namespace leasesim
