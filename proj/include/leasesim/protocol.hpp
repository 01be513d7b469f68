#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "leasesim/kernel.hpp"
#include "leasesim/messages.hpp"
#include "leasesim/object_model.hpp"
#include "leasesim/trace.hpp"
#include "leasesim/types.hpp"

namespace leasesim {

struct ProtocolParams {
  int algorithm = 1;            // 1 or 2 (after normalization)
  Tick promise = 0;             // how far in the future commits take effect
  Tick status_period = kNever;  // status-round period; kNever means "no rounds"
  Tick lease_len = 0;           // read-lease validity
  Tick renew = 0;               // lease renewal period
  Tick skew = 0;                // assumed clock-spread bound
  Tick delay = 0;               // assumed post-stabilization delivery bound
  Tick nice_delay = 0;          // assumed nice-period delivery bound
  Tick retx = 1;                // retransmission period for request loops
  Tick step_cost = 0;           // per-step allowance used by the bound audits
  bool strict_case1 = false;    // settled-lease reads skip the conflict filter
  bool skip_read_promise_wait = false;  // measurement-only: drop the final read wait
};

// Fault injections for checker validation. All default to "off".
struct Mutations {
  bool skip_skew_waits = false;    // drop the +skew on every wait site
  bool no_conflict_filter = false; // reads treat every batch as non-conflicting
  std::int64_t disagree_batch = -1;  // highest-id process corrupts this batch on commit
  Tick lease_slop = 0;             // readers treat leases as this much longer
};

// Internal invariant breakage (never expected in a correct run).
struct ProtocolBug : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One replica. Thread structure: a client worker runs submitted operations
// one at a time; a leader thread polls for leadership; message handlers run
// at delivery time. All waiting is on the local clock or local predicates.
class Proc {
 public:
  struct Hooks {
    std::function<void(ProcId to, const Message&)> send;
    std::function<bool(Tick t1, Tick t2)> am_leader;  // may throw LeadershipViolation
    std::function<ProcId()> leader_hint;
    std::function<void(TraceRec)> trace;
    std::function<void(std::int64_t ticket, const OpResult&)> on_done;
  };

  Proc(Kernel& k, ProcId me, int n, const ObjectType& obj, ProtocolParams pp, Hooks hooks,
       Mutations mu);
  void start();
  void deliver(ProcId from, Message m);
  void submit(const std::string& kind, std::int64_t ticket);
  void crash();
  bool crashed() const { return dead_; }

  // introspection (tests)
  Batch batch(std::int64_t j) const;
  const Estimate& estimate() const { return est_; }
  Lease lease() const { return lease_; }
  Tick max_t() const { return max_t_; }
  std::int64_t max_batch_done() const { return mbd_; }
  ObjState state_at(std::int64_t j) const { return states_.at(j); }
  std::int64_t pending_count() const { return static_cast<std::int64_t>(pending_ops_.size()); }

 private:
  enum class DoRes { Done, Failed };

  // thread bodies
  Task<> client_worker();
  Task<> leader_thread();
  Task<> leader_work(Tick t);
  Task<OpResult> run_rmw(Operation op, std::int64_t ticket);
  Task<OpResult> run_read(Operation op, std::int64_t ticket);
  Task<DoRes> do_ops_fixed(std::vector<Operation> ops, Tick s, Tick t, std::int64_t j,
                           bool recommit);
  Task<DoRes> do_ops_rounds(std::vector<Operation> ops, Tick t, std::int64_t j);
  Task<DoRes> commit_tail(std::vector<Operation> ops, Tick s, Tick t, std::int64_t j,
                          Tick first_send_clock, bool recommit);
  Task<> fill_gaps(std::int64_t up_to);
  Task<> on_commit_lease(ProcId from, CommitLeaseMsg m);

  // synchronous handlers
  void on_prepare(ProcId from, const PrepareMsg& m);
  void on_est_request(ProcId from, const EstRequestMsg& m);

  // helpers
  void set_batch(std::int64_t j, const Batch& b, const char* src);
  void execute_up_to(std::int64_t j);
  void broadcast(const Message& m);
  std::int64_t compute_khat_settled(const Operation& op, Tick tp, std::int64_t kstar) const;
  std::int64_t compute_khat_pending(const Operation& op, Tick tp, std::int64_t kstar,
                                    std::int64_t u) const;
  bool batches_present(std::int64_t lo_excl, std::int64_t hi_incl) const;
  bool read_conflicts_with(const std::string& read_kind,
                           const std::vector<Operation>& ops) const;
  Batch batch_or_init(std::int64_t j) const;
  Tick eps() const { return mu_.skip_skew_waits ? 0 : pp_.skew; }
  size_t quorum_others() const { return static_cast<size_t>(n_ / 2); }
  void dirty() { k_.notify(me_); }
  void trace(TraceRec r);
  void trace_wait(const char* cause, bool enter, std::int64_t j = kAlways);

  Kernel& k_;
  ProcId me_;
  int n_;
  const ObjectType& obj_;
  ProtocolParams pp_;
  Hooks hooks_;
  Mutations mu_;
  bool dead_ = false;

  // replica state
  Tick max_t_ = -1;
  Estimate est_;                               // ({}, -1, 0)
  std::map<std::int64_t, Batch> batch_;        // missing key = initializer
  std::map<std::int64_t, ObjState> states_;    // states_[-1] = states_[0] = initial
  Lease lease_{0, kAlways};
  Tick next_send_time_ = 0;
  std::int64_t mbd_ = 0;
  std::int64_t max_pending_index_ = 0;
  std::map<std::int64_t, std::vector<Operation>> pending_ops_;
  std::map<std::int64_t, Tick> pending_promise_;
  std::set<ProcId> lh_;
  std::set<ProcId> lease_requests_;  // absorbed by the leader loop
  std::set<Operation> ops_requested_;
  std::set<Operation> ops_done_;
  std::map<OpId, OpResult> replies_;
  std::map<OpId, Tick> takes_effect_;
  std::map<Tick, std::set<ProcId>> est_replied_;
  std::map<Tick, std::vector<Estimate>> est_replies_;
  std::map<std::pair<Tick, std::int64_t>, std::set<ProcId>> packed_;

  // client machinery
  std::int64_t counter_ = 0;
  struct Job {
    std::string kind;
    std::int64_t ticket;
  };
  std::deque<Job> jobs_;
  Tick read_cursor_ = -1;    // lease-loop clock reads, strictly increasing
  Tick leader_cursor_ = -1;  // leader-thread clock reads
  Tick main_cursor_ = -1;    // leader main-loop clock reads

  Task<> worker_task_;
  Task<> leader_task_;
  std::vector<Task<>> handler_tasks_;  // blocking commit handlers
};

}  // namespace leasesim
