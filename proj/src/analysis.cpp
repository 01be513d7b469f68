#include "leasesim/analysis.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace leasesim {

namespace {

std::string join_ops(const std::vector<std::string>& ops) {
  std::string out;
  for (const auto& o : ops) {
    if (!out.empty()) out += ",";
    out += o;
  }
  return out;
}

bool is_init_rec(const TraceRec& r) { return r.ops.empty() && r.s == kNever; }

struct BatchInfo {
  std::vector<std::string> ops;
  Tick promise = kNever;
  std::set<ProcId> seen_by;
};

// One agreed op sequence per batch index, collected from every lock/batch
// record. Init placeholders carry no information and are skipped. Promise
// values may legitimately differ across copies (a later leader recommitting
// an index stamps it afresh), so agreement is on the ops and the kept
// promise is the earliest one, which is the conservative visibility floor.
struct Reconstruction {
  std::map<std::int64_t, BatchInfo> batches;
  std::vector<Violation> violations;
};

Reconstruction reconstruct_batches(const Trace& t) {
  Reconstruction out;
  for (const auto& r : t.recs) {
    if (r.ev != "lock" && r.ev != "batch") continue;
    if (is_init_rec(r)) continue;
    auto it = out.batches.find(r.j);
    if (it == out.batches.end()) {
      out.batches[r.j] = BatchInfo{r.ops, r.s, {r.p}};
      continue;
    }
    BatchInfo& b = it->second;
    if (b.ops != r.ops) {
      std::ostringstream msg;
      msg << "batch " << r.j << " disagrees: p" << *b.seen_by.begin() << " has ["
          << join_ops(b.ops) << "] but p" << r.p << " has [" << join_ops(r.ops) << "]";
      out.violations.push_back({"batch_agreement", msg.str()});
    } else {
      b.seen_by.insert(r.p);
      b.promise = std::min(b.promise, r.s);
    }
  }
  return out;
}

std::set<ProcId> crashed_procs(const Trace& t) {
  std::set<ProcId> out;
  for (const auto& r : t.recs)
    if (r.ev == "crash") out.insert(r.p);
  return out;
}

}  // namespace

History extract_history(const Trace& t, const std::string& object) {
  History h;
  h.object = object;
  std::map<std::string, size_t> index;
  for (const auto& r : t.recs) {
    if (r.ev == "op_start") {
      index[r.op] = h.ops.size();
      HistOp o;
      o.op = op_from_string(r.op);
      o.p = r.p;
      o.start_rt = r.rt;
      o.is_read = r.cls == "read";
      h.ops.push_back(o);
    } else if (r.ev == "op_done") {
      auto it = index.find(r.op);
      if (it == index.end()) continue;  // malformed, surfaced by audits
      HistOp& o = h.ops[it->second];
      o.done_rt = r.rt;
      o.value = r.val;
      o.khat = r.khat;
    }
  }
  std::stable_sort(h.ops.begin(), h.ops.end(), [](const HistOp& a, const HistOp& b) {
    if (a.start_rt != b.start_rt) return a.start_rt < b.start_rt;
    return a.op.id < b.op.id;
  });
  return h;
}

std::vector<Violation> check_safety(const Trace& t, const std::string& object) {
  std::vector<Violation> out;
  Reconstruction rec = reconstruct_batches(t);
  out.insert(out.end(), rec.violations.begin(), rec.violations.end());

  // at most one fresh lock per index; an op settles under at most one index
  std::map<std::int64_t, std::vector<ProcId>> fresh;
  std::map<std::string, std::set<std::int64_t>> op_index;
  for (const auto& r : t.recs) {
    if (r.ev != "lock") continue;
    if (r.via == "fresh") fresh[r.j].push_back(r.p);
    for (const auto& o : r.ops) op_index[o].insert(r.j);
  }
  for (const auto& [j, ps] : fresh) {
    if (ps.size() > 1) {
      std::ostringstream msg;
      msg << "batch " << j << " fresh-locked " << ps.size() << " times (p";
      for (size_t i = 0; i < ps.size(); ++i) msg << (i ? ",p" : "") << ps[i];
      msg << ")";
      out.push_back({"single_fresh_lock", msg.str()});
    }
  }
  for (const auto& [o, js] : op_index) {
    if (js.size() > 1) {
      std::ostringstream msg;
      msg << "op " << o << " locked under " << js.size() << " batch indexes";
      out.push_back({"op_single_batch", msg.str()});
    }
  }

  // majority persistence: inductively it suffices that when a process first
  // records batch j, a majority already recorded batch j-1
  std::map<std::int64_t, std::map<ProcId, Tick>> first_set;
  int maxp = 0;
  for (const auto& r : t.recs) {
    maxp = std::max({maxp, static_cast<int>(r.p), static_cast<int>(r.peer)});
    if ((r.ev == "lock" || r.ev == "batch") && !is_init_rec(r) && r.j >= 1) {
      auto& m = first_set[r.j];
      if (!m.count(r.p)) m[r.p] = r.rt;  // recs arrive in real-time order
    }
  }
  int n = maxp + 1;
  for (const auto& [j, setters] : first_set) {
    if (j < 2) continue;
    auto prev = first_set.find(j - 1);
    for (const auto& [p, rt] : setters) {
      int have = 0;
      if (prev != first_set.end())
        for (const auto& [q, qrt] : prev->second)
          if (qrt <= rt) ++have;
      if (2 * have <= n) {
        std::ostringstream msg;
        msg << "p" << p << " recorded batch " << j << " at rt " << rt << " when only " << have
            << "/" << n << " processes held batch " << j - 1;
        out.push_back({"majority_persistence", msg.str()});
      }
    }
  }

  // per-process monotonicity: accepted estimates strictly increase as
  // (t, index) pairs; lease batches and maxT never decrease
  std::map<ProcId, std::pair<Tick, std::int64_t>> last_accept;
  std::map<ProcId, std::int64_t> last_lease_batch;
  std::map<ProcId, Tick> last_maxt;
  for (const auto& r : t.recs) {
    if (r.ev == "accept") {
      auto cur = std::make_pair(r.t, r.j);
      auto it = last_accept.find(r.p);
      if (it != last_accept.end() && cur <= it->second) {
        std::ostringstream msg;
        msg << "p" << r.p << " accepted (" << r.t << "," << r.j << ") after (" << it->second.first
            << "," << it->second.second << ")";
        out.push_back({"estimate_monotone", msg.str()});
      }
      last_accept[r.p] = cur;
    } else if (r.ev == "lease") {
      auto it = last_lease_batch.find(r.p);
      if (it != last_lease_batch.end() && r.b < it->second) {
        std::ostringstream msg;
        msg << "p" << r.p << " lease batch fell from " << it->second << " to " << r.b;
        out.push_back({"lease_monotone", msg.str()});
      }
      last_lease_batch[r.p] = r.b;
    } else if (r.ev == "maxt") {
      auto it = last_maxt.find(r.p);
      if (it != last_maxt.end() && r.t < it->second) {
        std::ostringstream msg;
        msg << "p" << r.p << " maxT fell from " << it->second << " to " << r.t;
        out.push_back({"maxt_monotone", msg.str()});
      }
      last_maxt[r.p] = r.t;
    }
  }

  // leadership grants: coherent per holder is free (coalesced), disjoint
  // across holders is the obligation
  std::vector<TraceRec> grants;
  for (const auto& r : t.recs)
    if (r.ev == "grant") grants.push_back(r);
  for (size_t i = 0; i < grants.size(); ++i) {
    for (size_t k = i + 1; k < grants.size(); ++k) {
      const auto& a = grants[i];
      const auto& b = grants[k];
      if (a.p == b.p) continue;
      if (a.t <= b.t2 && b.t <= a.t2) {
        std::ostringstream msg;
        msg << "p" << a.p << " held [" << a.t << "," << a.t2 << "] and p" << b.p << " held ["
            << b.t << "," << b.t2 << "]";
        out.push_back({"grant_disjoint", msg.str()});
      }
    }
  }

  // executed states must replay: fold the agreed batches and compare every
  // exec record against the replayed value
  const ObjectType& obj = object_type(object);
  std::map<std::int64_t, ObjState> replay;
  replay[0] = obj.initial_state();
  std::int64_t max_exec = 0;
  for (const auto& r : t.recs)
    if (r.ev == "exec") max_exec = std::max(max_exec, r.j);
  for (std::int64_t j = 1; j <= max_exec; ++j) {
    auto it = rec.batches.find(j);
    if (it == rec.batches.end()) {
      out.push_back({"exec_replay", "no committed batch recorded for executed index " +
                                        std::to_string(j)});
      break;
    }
    ObjState s = replay[j - 1];
    for (const auto& oenc : it->second.ops) s = obj.apply(s, op_from_string(oenc).kind).first;
    replay[j] = s;
  }
  for (const auto& r : t.recs) {
    if (r.ev != "exec") continue;
    auto it = replay.find(r.j);
    if (it == replay.end()) continue;  // already reported above
    if (r.state != it->second) {
      std::ostringstream msg;
      msg << "p" << r.p << " executed batch " << r.j << " to state " << r.state
          << " but replay gives " << it->second;
      out.push_back({"exec_replay", msg.str()});
    }
  }
  return out;
}

std::vector<Violation> check_promise_discipline(const Trace& t, const Scenario& s) {
  std::vector<Violation> out;
  Reconstruction rec = reconstruct_batches(t);
  auto clock_at = [&s](ProcId p, Tick rt) {
    Tick off = p >= 0 && p < static_cast<ProcId>(s.clock_offsets.size()) ? s.clock_offsets[p] : 0;
    return std::max<Tick>(0, rt + off);
  };
  for (const auto& r : t.recs) {
    if (r.ev != "op_done") continue;
    Tick clock = clock_at(r.p, r.rt);
    if (r.cls == "rmw") {
      if (r.te == kAlways) continue;
      if (clock < sat_add(r.te, s.params.skew)) {
        std::ostringstream msg;
        msg << "p" << r.p << " answered update " << r.op << " at clock " << clock
            << " before its promise " << r.te << " + skew " << s.params.skew;
        out.push_back({"promise_discipline", msg.str()});
      }
    } else {
      if (r.khat < 1) continue;  // batch 0 is the pre-history state
      auto it = rec.batches.find(r.khat);
      if (it == rec.batches.end()) continue;  // surfaced by the batch audits
      if (clock < sat_add(it->second.promise, s.params.skew)) {
        std::ostringstream msg;
        msg << "p" << r.p << " answered read " << r.op << " from batch " << r.khat << " at clock "
            << clock << " before its promise " << it->second.promise << " + skew "
            << s.params.skew;
        out.push_back({"promise_discipline", msg.str()});
      }
    }
  }
  return out;
}

std::vector<Violation> check_liveness(const Trace& t) {
  std::vector<Violation> out;
  std::set<ProcId> crashed = crashed_procs(t);
  std::map<std::int64_t, const TraceRec*> pending;
  for (const auto& r : t.recs) {
    if (r.ev == "op_enq" && r.ticket >= 0 && !crashed.count(r.p)) pending[r.ticket] = &r;
    if (r.ev == "op_done" && r.ticket >= 0) pending.erase(r.ticket);
  }
  for (const auto& [ticket, r] : pending) {
    std::ostringstream msg;
    msg << "ticket " << ticket << " (" << r->kind << " at p" << r->p << ", enqueued rt " << r->rt
        << ") never completed";
    out.push_back({"liveness", msg.str()});
    if (out.size() >= 5) {
      out.push_back({"liveness", "... and " + std::to_string(pending.size() - 5) + " more"});
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// linearizability witness
//
// The committed batch sequence is the serialization of all updates; a
// completed read is inserted right after max(its khat, the last batch of any
// update that completed before the read started). That candidate order is a
// valid linearization iff
//   - every batch between khat and the insertion point is conflict-free for
//     the read (otherwise the protocol really did serve a stale value),
//   - the read's value matches the replayed state at khat,
//   - update responses match the replay,
//   - updates respect real time under the batch order,
//   - no update that started after a read completed lands at or before the
//     read's insertion point,
//   - insertion points of reads are monotone in real-time completion order.
// ---------------------------------------------------------------------------

std::vector<Violation> check_linearizable_witness(const Trace& t, const std::string& object) {
  std::vector<Violation> out;
  Reconstruction rec = reconstruct_batches(t);
  if (!rec.violations.empty()) return rec.violations;  // batches must agree first
  const ObjectType& obj = object_type(object);

  std::int64_t maxj = 0;
  for (const auto& [j, b] : rec.batches) maxj = std::max(maxj, j);
  for (std::int64_t j = 1; j <= maxj; ++j)
    if (!rec.batches.count(j)) {
      out.push_back({"witness", "batch record gap at index " + std::to_string(j)});
      return out;
    }

  // replay; remember each update's batch, slot and replayed response
  struct Placed {
    std::int64_t j = -1;
    int slot = -1;
    std::string reply;
  };
  std::map<std::string, Placed> placed;
  std::map<std::int64_t, ObjState> state;
  state[0] = obj.initial_state();
  for (std::int64_t j = 1; j <= maxj; ++j) {
    ObjState s = state[j - 1];
    int slot = 0;
    for (const auto& oenc : rec.batches[j].ops) {
      auto [ns, res] = obj.apply(s, op_from_string(oenc).kind);
      s = ns;
      placed[oenc] = Placed{j, slot++, result_to_string(res)};
    }
    state[j] = s;
  }

  History h = extract_history(t, object);

  struct Update {
    const HistOp* op;
    std::int64_t j;
    int slot;
  };
  std::vector<Update> updates;
  for (const auto& o : h.ops) {
    if (o.is_read) continue;
    std::string enc = op_to_string(o.op);
    auto it = placed.find(enc);
    if (it == placed.end()) {
      if (o.completed())
        out.push_back({"witness", "completed update " + enc + " missing from every batch"});
      continue;  // unplaced incomplete updates never took effect
    }
    if (o.completed() && o.value != it->second.reply)
      out.push_back({"witness", "update " + enc + " replied " + o.value + " but replay gives " +
                                    it->second.reply});
    updates.push_back(Update{&o, it->second.j, it->second.slot});
  }

  // updates respect real time under the batch order
  for (const auto& a : updates) {
    if (!a.op->completed()) continue;
    for (const auto& b : updates) {
      if (a.op == b.op) continue;
      if (a.op->done_rt < b.op->start_rt &&
          std::pair(a.j, a.slot) > std::pair(b.j, b.slot)) {
        std::ostringstream msg;
        msg << "update " << op_to_string(b.op->op) << " (batch " << b.j << ") started after "
            << op_to_string(a.op->op) << " (batch " << a.j << ") completed";
        out.push_back({"witness", msg.str()});
      }
    }
  }

  // reads: insertion point, conflict window, value
  struct PlacedRead {
    const HistOp* op;
    std::int64_t at;  // linearized right after this batch index
  };
  std::vector<PlacedRead> reads;
  for (const auto& o : h.ops) {
    if (!o.is_read || !o.completed()) continue;
    std::string enc = op_to_string(o.op);
    if (o.khat < 0 || o.khat > maxj) {
      out.push_back({"witness", "read " + enc + " reports batch " + std::to_string(o.khat) +
                                    " outside the committed range"});
      continue;
    }
    std::int64_t at = o.khat;
    for (const auto& u : updates)
      if (u.op->completed() && u.op->done_rt < o.start_rt) at = std::max(at, u.j);
    for (std::int64_t j = o.khat + 1; j <= at; ++j) {
      for (const auto& oenc : rec.batches[j].ops) {
        Operation u = op_from_string(oenc);
        if (!obj.is_read(u.kind) && obj.conflicts(o.op.kind, u.kind)) {
          std::ostringstream msg;
          msg << "read " << enc << " served from batch " << o.khat << " but conflicting update "
              << oenc << " in batch " << j << " completed before the read started";
          out.push_back({"witness", msg.str()});
        }
      }
    }
    std::string expect = result_to_string(obj.apply(state[o.khat], o.op.kind).second);
    if (o.value != expect)
      out.push_back({"witness", "read " + enc + " returned " + o.value + " but state after batch " +
                                    std::to_string(o.khat) + " gives " + expect});
    reads.push_back(PlacedRead{&o, at});
  }

  // a completed read precedes updates that start after it finishes
  for (const auto& r : reads) {
    for (const auto& u : updates) {
      if (r.op->done_rt < u.op->start_rt && u.j <= r.at) {
        std::ostringstream msg;
        msg << "update " << op_to_string(u.op->op) << " (batch " << u.j << ") started after read "
            << op_to_string(r.op->op) << " completed at point " << r.at;
        out.push_back({"witness", msg.str()});
      }
    }
  }

  // read-read real-time order
  for (const auto& a : reads) {
    for (const auto& b : reads) {
      if (a.op->done_rt < b.op->start_rt && a.at > b.at) {
        std::ostringstream msg;
        msg << "read " << op_to_string(b.op->op) << " (point " << b.at << ") started after read "
            << op_to_string(a.op->op) << " (point " << a.at << ") completed";
        out.push_back({"witness", msg.str()});
      }
    }
  }
  return out;
}

bool brute_force_linearizable(const History& h, size_t cap) {
  const ObjectType& obj = object_type(h.object);
  const auto& ops = h.ops;
  if (ops.size() > cap)
    throw ConfigError("history of " + std::to_string(ops.size()) +
                      " ops exceeds the exhaustive-search cap " + std::to_string(cap));
  size_t n = ops.size();
  std::vector<std::uint32_t> before(n, 0);  // completed ops that must precede
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k)
      if (ops[k].completed() && ops[k].done_rt < ops[i].start_rt) before[i] |= 1u << k;
  std::uint32_t need = 0;  // completed ops must all be scheduled
  for (size_t i = 0; i < n; ++i)
    if (ops[i].completed()) need |= 1u << i;

  std::unordered_set<std::uint64_t> seen;
  // depth-first over (scheduled-set, state); incomplete ops may also be
  // dropped, which the "mask == need on the completed bits" test allows
  auto key = [](std::uint32_t mask, ObjState s) {
    return (std::uint64_t(mask) << 32) ^ std::uint64_t(std::uint32_t(s));
  };
  std::vector<std::pair<std::uint32_t, ObjState>> stack;
  stack.push_back({0, obj.initial_state()});
  while (!stack.empty()) {
    auto [mask, st] = stack.back();
    stack.pop_back();
    if ((mask & need) == need) return true;
    if (!seen.insert(key(mask, st)).second) continue;
    for (size_t i = 0; i < n; ++i) {
      std::uint32_t bit = 1u << i;
      if (mask & bit) continue;
      if ((before[i] & mask) != before[i]) continue;
      auto [ns, res] = obj.apply(st, ops[i].op.kind);
      if (ops[i].completed() && result_to_string(res) != ops[i].value) continue;
      stack.push_back({mask | bit, ns});
      // also try skipping it entirely when it never completed
    }
    // explore "drop all remaining incomplete ops": completed-bits test above
    // handles it because incomplete bits never join `need`
  }
  return false;
}

BlockingReport blocking_times(const Trace& t, const Scenario& s) {
  BlockingReport rep;
  History h = extract_history(t, s.object);
  Tick pad = 2 * s.params.delay;
  for (const auto& o : h.ops) {
    if (!o.completed()) continue;
    Tick blocking = o.done_rt - o.start_rt;
    const NicePeriod* in = nullptr;
    for (const auto& w : s.net.nice_periods)
      if (o.start_rt >= w.start && o.start_rt < w.end) in = &w;
    BlockStats* bucket;
    if (in != nullptr)
      bucket = (o.start_rt >= in->start + pad && o.done_rt <= in->end) ? &rep.nice : &rep.other;
    else
      bucket = o.start_rt >= s.measure_from ? &rep.stable : &rep.other;
    if (o.is_read) {
      bucket->max_read = std::max(bucket->max_read, blocking);
      bucket->n_read += 1;
    } else {
      bucket->max_rmw = std::max(bucket->max_rmw, blocking);
      bucket->n_rmw += 1;
    }
  }
  return rep;
}

BoundSet theoretical_bound(const ProtocolParams& p) {
  Tick d = p.delay, ds = p.nice_delay, a = p.promise, e = p.skew;
  BoundSet b;
  if (p.algorithm == 1) {
    if (a > 3 * d)
      throw ConfigError("bound: promise delay " + std::to_string(a) + " exceeds 3*delay; reads "
                        "are already never blocked at 3*delay");
    b.stable_rmw = std::max(2 * d, a + e);
    b.stable_read = std::max(3 * d - a, e);
  } else {
    Tick beta = p.status_period;
    if (beta < 2 * ds || beta > 2 * d)
      throw ConfigError("bound: status_period must lie in [2*nice_delay, 2*delay]");
    if (a > d + beta)
      throw ConfigError("bound: promise delay " + std::to_string(a) +
                        " exceeds delay + status_period");
    if ((2 * d) % beta != 0)
      throw ConfigError("bound: the update closed form needs status_period to divide 2*delay");
    b.stable_rmw = std::max(2 * d, 2 * d - beta + a + e);
    b.stable_read = std::max(d + beta - a, e);
  }
  b.nice_rmw = std::max(2 * ds, a + e);
  b.nice_read = std::max(3 * ds - a, e);
  return b;
}

std::vector<Violation> check_bounds(const Trace& t, const Scenario& s) {
  std::vector<Violation> out;
  if (!s.audit_bounds) return out;
  BoundSet bound = theoretical_bound(s.params);
  BlockingReport rep = blocking_times(t, s);
  Tick slack = 3 * s.params.step_cost;
  auto check = [&](const char* what, Tick measured, Tick limit) {
    if (measured < 0) return;
    if (measured > limit + slack) {
      std::ostringstream msg;
      msg << what << " blocked " << measured << " > bound " << limit << " + slack " << slack;
      out.push_back({"bound", msg.str()});
    }
  };
  check("stable update", rep.stable.max_rmw, bound.stable_rmw);
  check("stable read", rep.stable.max_read, bound.stable_read);
  check("nice update", rep.nice.max_rmw, bound.nice_rmw);
  check("nice read", rep.nice.max_read, bound.nice_read);
  return out;
}

std::map<std::string, std::int64_t> send_counts(const Trace& t) {
  std::map<std::string, std::int64_t> out;
  for (const auto& [k, v] : t.counters)
    if (k.rfind("send.", 0) == 0) out[k] = v;
  return out;
}

std::map<std::int64_t, int> status_rounds(const Trace& t) {
  std::map<std::int64_t, Tick> lock_t;
  for (const auto& r : t.recs)
    if (r.ev == "lock") lock_t[r.j] = r.t;
  std::map<std::int64_t, std::set<Tick>> promises;
  for (const auto& r : t.recs) {
    if (r.ev != "send" || (r.kind != "status" && r.kind != "prepare")) continue;
    auto it = lock_t.find(r.j);
    if (it == lock_t.end() || it->second != r.t) continue;
    promises[r.j].insert(r.s);
  }
  std::map<std::int64_t, int> out;
  for (const auto& [j, ps] : promises) out[j] = static_cast<int>(ps.size());
  return out;
}

std::vector<Violation> check_all(const Trace& t, const Scenario& s) {
  std::vector<Violation> out = check_safety(t, s.object);
  auto disc = check_promise_discipline(t, s);
  out.insert(out.end(), disc.begin(), disc.end());
  auto lin = check_linearizable_witness(t, s.object);
  out.insert(out.end(), lin.begin(), lin.end());
  auto live = check_liveness(t);
  out.insert(out.end(), live.begin(), live.end());
  auto bounds = check_bounds(t, s);
  out.insert(out.end(), bounds.begin(), bounds.end());
  return out;
}

}  // namespace leasesim
