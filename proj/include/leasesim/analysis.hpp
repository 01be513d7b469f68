#pragma once

#include <map>
#include <string>
#include <vector>

#include "leasesim/scenario.hpp"
#include "leasesim/trace.hpp"

namespace leasesim {

struct Violation {
  std::string check;  // audit name
  std::string detail;
};

// ----- history extraction ---------------------------------------------------

struct HistOp {
  Operation op;
  ProcId p = -1;
  Tick start_rt = 0;
  Tick done_rt = kNever;  // kNever: never completed
  bool is_read = false;
  std::string value;           // completed ops only
  std::int64_t khat = kAlways;  // completed reads only
  bool completed() const { return done_rt != kNever; }
};

struct History {
  std::string object;
  std::vector<HistOp> ops;  // sorted by start_rt, ties by op id
};

History extract_history(const Trace& t, const std::string& object);

// ----- audits ----------------------------------------------------------------

// structural safety: batch agreement across processes, single fresh lock per
// index, no op committed under two indexes, majority persistence of the batch
// sequence, per-process monotonicity of estimates / lease batches / maxT,
// leadership grant disjointness, and replayed state agreement for every
// executed batch
std::vector<Violation> check_safety(const Trace& t, const std::string& object);

// promise discipline: no response reflecting batch j is returned at a local
// clock below Batch[j].promise + skew (needs the scenario for clock offsets)
std::vector<Violation> check_promise_discipline(const Trace& t, const Scenario& s);

// every enqueued op on a non-crashed process completes
std::vector<Violation> check_liveness(const Trace& t);

// linearizability witness built from the committed batch order; empty result
// certifies the run (see README for the argument)
std::vector<Violation> check_linearizable_witness(const Trace& t, const std::string& object);

// exhaustive search over interleavings; histories above the cap throw.
// incomplete ops may take effect or not.
bool brute_force_linearizable(const History& h, size_t cap = 12);

// ----- blocking times ---------------------------------------------------------

struct BlockStats {
  Tick max_rmw = -1;  // -1: no samples
  Tick max_read = -1;
  std::int64_t n_rmw = 0;
  std::int64_t n_read = 0;
};

struct BlockingReport {
  BlockStats stable;  // started at/after measure_from, outside nice periods
  BlockStats nice;    // started 2*delay into a nice period, done inside it
  BlockStats other;
};

BlockingReport blocking_times(const Trace& t, const Scenario& s);

struct BoundSet {
  Tick stable_rmw = 0;
  Tick stable_read = 0;
  Tick nice_rmw = 0;
  Tick nice_read = 0;
};

// closed-form worst-case blocking; throws ConfigError naming the violated
// precondition when the parameters fall outside the analyzed regime
BoundSet theoretical_bound(const ProtocolParams& p);

// measured maxima against the closed forms, with 3*step_cost slack
std::vector<Violation> check_bounds(const Trace& t, const Scenario& s);

// ----- misc -------------------------------------------------------------------

std::map<std::string, std::int64_t> send_counts(const Trace& t);

// distinct promise values proposed for each locked batch index (status rounds)
std::map<std::int64_t, int> status_rounds(const Trace& t);

// safety + witness + liveness (+ bounds when the scenario opts in)
std::vector<Violation> check_all(const Trace& t, const Scenario& s);

}  // namespace leasesim
