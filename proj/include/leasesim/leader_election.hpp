#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "leasesim/types.hpp"

namespace leasesim {

// One coalesced leadership grant: holder p believed itself leader for the
// whole abstract-timestamp interval [t1, t2].
struct GrantEntry {
  ProcId p;
  Tick t1;
  Tick t2;
};

struct LeadershipViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// AmLeader/leader oracle. am_leader() is the only mutating query: every true
// answer is a grant recorded in the ledger, which the analysis audits for
// same-holder coherence and cross-holder disjointness.
class LeadershipProvider {
 public:
  virtual ~LeadershipProvider() = default;
  // now_clock is the caller's current clock; t2 > now_clock is a contract
  // violation (no process may query the future), as is t1 > t2.
  virtual bool am_leader(ProcId p, Tick t1, Tick t2, Tick now_clock) = 0;
  // best current guess for who leads, used to address op requests
  virtual ProcId leader_hint(ProcId caller, Tick caller_clock) = 0;
  const std::vector<GrantEntry>& grants() const { return grants_; }

 protected:
  void record(ProcId p, Tick t1, Tick t2);

 private:
  std::map<std::pair<ProcId, Tick>, size_t> open_;  // (p,t1) -> grants_ index
  std::vector<GrantEntry> grants_;
};

struct LeadershipSegment {
  Tick start;      // abstract timestamp where this segment begins
  ProcId holder;   // -1: nobody leads
};

// Scripted arbiter: the timestamp axis is partitioned into segments; p leads
// [t1,t2] iff both endpoints fall inside one of p's segments.
class ArbiterProvider final : public LeadershipProvider {
 public:
  explicit ArbiterProvider(std::vector<LeadershipSegment> segs);
  bool am_leader(ProcId p, Tick t1, Tick t2, Tick now_clock) override;
  ProcId leader_hint(ProcId caller, Tick caller_clock) override;
  ProcId holder_at(Tick t) const;
  Tick segment_start(Tick t) const;
  const std::vector<LeadershipSegment>& segments() const { return segs_; }

 private:
  std::vector<LeadershipSegment> segs_;  // sorted by start, first at 0
};

// Heartbeat-based provider. Each process tracks the smallest id it heard a
// recent heartbeat from (itself included). Belief alone cannot guarantee the
// non-overlap obligation under message loss, so candidate intervals are
// arbitrated through the shared reservation table: a grant is issued only if
// it does not intersect any other process's reservation, and every grant
// extends the caller's reservation. The table models the external arbiter the
// model assumes; heartbeats only decide who asks for it.
class HeartbeatProvider final : public LeadershipProvider {
 public:
  HeartbeatProvider(int n, Tick timeout);
  bool am_leader(ProcId p, Tick t1, Tick t2, Tick now_clock) override;
  ProcId leader_hint(ProcId caller, Tick caller_clock) override;
  void on_heartbeat(ProcId from, ProcId at, Tick at_clock);
  void on_self_tick(ProcId p, Tick clock);  // own liveness refresh
  ProcId believed_leader(ProcId p, Tick clock) const;

 private:
  int n_;
  Tick timeout_;
  std::vector<std::vector<Tick>> last_heard_;      // [at][from] clock of last heartbeat
  std::vector<std::pair<Tick, Tick>> reserved_;    // per process [lo, hi] reservation
};

}  // namespace leasesim
