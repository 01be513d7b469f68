#include "leasesim/protocol.hpp"

#include <algorithm>

namespace leasesim {

namespace {

constexpr std::int64_t kInternalTicket = -1;

std::vector<std::string> encode_ops(const std::vector<Operation>& ops) {
  std::vector<std::string> out;
  out.reserve(ops.size());
  for (const auto& o : ops) out.push_back(op_to_string(o));
  return out;
}

}  // namespace

Proc::Proc(Kernel& k, ProcId me, int n, const ObjectType& obj, ProtocolParams pp, Hooks hooks,
           Mutations mu)
    : k_(k), me_(me), n_(n), obj_(obj), pp_(pp), hooks_(std::move(hooks)), mu_(mu) {
  states_[-1] = obj_.initial_state();
  states_[0] = obj_.initial_state();
  batch_[0] = Batch{{}, 0};  // batch 0 is committed by definition
}

void Proc::start() {
  worker_task_ = client_worker();
  worker_task_.start();
  leader_task_ = leader_thread();
  leader_task_.start();
}

void Proc::crash() {
  dead_ = true;
  k_.drop_process(me_);
  worker_task_.reset();
  leader_task_.reset();
  handler_tasks_.clear();
}

void Proc::submit(const std::string& kind, std::int64_t ticket) {
  if (dead_) return;
  jobs_.push_back(Job{kind, ticket});
  dirty();
}

Batch Proc::batch_or_init(std::int64_t j) const {
  auto it = batch_.find(j);
  return it == batch_.end() ? init_batch() : it->second;
}

Batch Proc::batch(std::int64_t j) const { return batch_or_init(j); }

void Proc::trace(TraceRec r) {
  r.rt = k_.now();
  r.p = me_;
  hooks_.trace(std::move(r));
}

void Proc::trace_wait(const char* cause, bool enter, std::int64_t j) {
  TraceRec r;
  r.ev = enter ? "wait+" : "wait-";
  r.kind = cause;
  r.j = j;
  trace(std::move(r));
}

void Proc::broadcast(const Message& m) {
  for (ProcId q = 0; q < n_; ++q)
    if (q != me_) hooks_.send(q, m);
}

bool Proc::read_conflicts_with(const std::string& read_kind,
                               const std::vector<Operation>& ops) const {
  if (mu_.no_conflict_filter) return false;
  for (const auto& o : ops)
    if (!obj_.is_read(o.kind) && obj_.conflicts(read_kind, o.kind)) return true;
  return false;
}

void Proc::set_batch(std::int64_t j, const Batch& b, const char* src) {
  auto it = batch_.find(j);
  if (it != batch_.end() && it->second == b) return;
  if (it == batch_.end() && is_init(b)) return;
  batch_[j] = b;
  TraceRec r;
  r.ev = "batch";
  r.j = j;
  r.s = b.promise;
  r.ops = encode_ops(b.ops);
  r.via = src;
  trace(std::move(r));
  dirty();
}

void Proc::execute_up_to(std::int64_t j) {
  bool advanced = false;
  for (std::int64_t i = mbd_ + 1; i <= j; ++i) {
    auto it = batch_.find(i);
    if (it == batch_.end() || is_init(it->second))
      throw ProtocolBug("execute reached an unfilled batch " + std::to_string(i) + " at p" +
                        std::to_string(me_));
    const Batch& b = it->second;
    ObjState sigma = states_.at(i - 1);
    for (const auto& op : b.ops) {  // batch ops are kept in id order
      auto [ns, res] = obj_.apply(sigma, op.kind);
      sigma = ns;
      replies_[op.id] = res;
      takes_effect_[op.id] = b.promise;
    }
    states_[i] = sigma;
    ops_done_.insert(b.ops.begin(), b.ops.end());
    mbd_ = std::max(mbd_, i);
    TraceRec r;
    r.ev = "exec";
    r.j = i;
    r.state = sigma;
    r.s = b.promise;
    trace(std::move(r));
    advanced = true;
  }
  if (advanced) dirty();
}

bool Proc::batches_present(std::int64_t lo_excl, std::int64_t hi_incl) const {
  for (std::int64_t j = lo_excl + 1; j <= hi_incl; ++j)
    if (is_init(batch_or_init(j))) return false;
  return true;
}

std::int64_t Proc::compute_khat_settled(const Operation& op, Tick tp, std::int64_t kstar) const {
  // batches above the last one whose promise passed are invisible; with the
  // conflict filter, so are batches that cannot change this read's report
  std::int64_t khat = 0;
  for (const auto& [j, b] : batch_) {
    if (j < 1 || j > kstar) continue;
    if (is_init(b) || b.promise > tp) continue;
    if (!pp_.strict_case1 && !mu_.no_conflict_filter && !read_conflicts_with(op.kind, b.ops))
      continue;
    khat = std::max(khat, j);
  }
  return khat;
}

std::int64_t Proc::compute_khat_pending(const Operation& op, Tick tp, std::int64_t kstar,
                                        std::int64_t u) const {
  std::int64_t khat = kstar;
  for (const auto& [j, ops] : pending_ops_) {
    if (j <= kstar || j > u) continue;
    if (!read_conflicts_with(op.kind, ops)) continue;
    auto it = pending_promise_.find(j);
    Tick promised = it == pending_promise_.end() ? kNever : it->second;
    if (promised > tp) continue;
    khat = std::max(khat, j);
  }
  return khat;
}

// ---------------------------------------------------------------------------
// client side
// ---------------------------------------------------------------------------

Task<> Proc::client_worker() {
  for (;;) {
    if (jobs_.empty()) {
      auto idle = k_.wait_pred(me_, [this] { return !jobs_.empty(); });
      co_await idle;
    }
    Job job = jobs_.front();
    jobs_.pop_front();
    counter_ += 1;
    Operation op{OpId{me_, counter_}, job.kind};
    bool is_read = obj_.is_read(job.kind);
    TraceRec r;
    r.ev = "op_start";
    r.op = op_to_string(op);
    r.cls = is_read ? "read" : "rmw";
    r.kind = job.kind;
    r.ticket = job.ticket;
    trace(std::move(r));
    OpResult res;
    if (is_read) {
      auto rd = run_read(op, job.ticket);
      res = co_await rd;
    } else {
      auto up = run_rmw(op, job.ticket);
      res = co_await up;
    }
    if (job.ticket != kInternalTicket) hooks_.on_done(job.ticket, res);
  }
}

Task<OpResult> Proc::run_rmw(Operation op, std::int64_t ticket) {
  auto replied = [this, id = op.id] { return replies_.count(id) > 0; };
  while (!replied()) {
    hooks_.send(hooks_.leader_hint(), OpRequestMsg{op});
    auto w = k_.wait_pred_or_clock(me_, replied, k_.clock(me_) + pp_.retx);
    co_await w;
  }
  Tick until = sat_add(takes_effect_.at(op.id), eps());
  if (k_.clock(me_) < until) {
    trace_wait("rmw_promise", true);
    auto w = k_.wait_clock(me_, until);
    co_await w;
    trace_wait("rmw_promise", false);
  }
  OpResult res = replies_.at(op.id);
  TraceRec r;
  r.ev = "op_done";
  r.op = op_to_string(op);
  r.cls = "rmw";
  r.ticket = ticket;
  r.val = result_to_string(res);
  r.te = takes_effect_.at(op.id);
  trace(std::move(r));
  co_return res;
}

Task<OpResult> Proc::run_read(Operation op, std::int64_t ticket) {
  Tick tp = 0, tstar = 0;
  std::int64_t kstar = 0;
  bool waited_lease = false;
  for (;;) {
    read_cursor_ = std::max(k_.clock(me_), read_cursor_ + 1);
    if (k_.clock(me_) < read_cursor_) {
      auto w = k_.wait_clock(me_, read_cursor_);
      co_await w;
    }
    tp = read_cursor_;
    kstar = lease_.batch;
    tstar = lease_.start;
    if (tp < sat_add(tstar, pp_.lease_len + mu_.lease_slop)) break;
    if (!waited_lease) {
      trace_wait("lease_valid", true);
      waited_lease = true;
    }
  }
  if (waited_lease) trace_wait("lease_valid", false);
  Tick tp_rt = k_.now();

  std::int64_t khat;
  if (tp < tstar) {
    khat = compute_khat_settled(op, tp, kstar);
  } else {
    std::int64_t u = max_pending_index_;
    if (pp_.algorithm == 2) {
      // pending promises only rise; recomputing on every wake lets a batch
      // drop out of the candidate set, which is what unblocks the read
      for (;;) {
        khat = compute_khat_pending(op, tp, kstar, u);
        if (batches_present(kstar, khat)) break;
        trace_wait("conflicting_pending_batch", true, khat);
        Operation opc = op;
        auto w = k_.wait_pred(me_, [this, opc, tp, kstar, u] {
          return batches_present(kstar, compute_khat_pending(opc, tp, kstar, u));
        });
        co_await w;
        trace_wait("conflicting_pending_batch", false);
      }
    } else {
      khat = compute_khat_pending(op, tp, kstar, u);
      if (!batches_present(kstar, khat)) {
        trace_wait("conflicting_pending_batch", true, khat);
        auto w = k_.wait_pred(
            me_, [this, kstar, khat] { return batches_present(kstar, khat); });
        co_await w;
        trace_wait("conflicting_pending_batch", false);
      }
    }
  }

  if (!pp_.skip_read_promise_wait) {
    Tick until = sat_add(batch_or_init(khat).promise, eps());
    if (k_.clock(me_) < until) {
      trace_wait("read_promise", true, khat);
      auto w = k_.wait_clock(me_, until);
      co_await w;
      trace_wait("read_promise", false, khat);
    }
  }

  execute_up_to(khat);
  OpResult res = obj_.apply(states_.at(khat), op.kind).second;
  TraceRec r;
  r.ev = "op_done";
  r.op = op_to_string(op);
  r.cls = "read";
  r.ticket = ticket;
  r.val = result_to_string(res);
  r.khat = khat;
  r.kstar = kstar;
  r.tstar = tstar;
  r.tprime = tp;
  r.tp_rt = tp_rt;
  trace(std::move(r));
  co_return res;
}

// ---------------------------------------------------------------------------
// leader side
// ---------------------------------------------------------------------------

Task<> Proc::leader_thread() {
  for (;;) {
    leader_cursor_ = std::max(k_.clock(me_), leader_cursor_ + 1);
    if (k_.clock(me_) < leader_cursor_) {
      auto w = k_.wait_clock(me_, leader_cursor_);
      co_await w;
    }
    Tick t = leader_cursor_;
    if (hooks_.am_leader(t, t)) {
      auto era = leader_work(t);
      co_await era;
    }
  }
}

Task<> Proc::leader_work(Tick t) {
  // let promises and leases issued by any previous leader run out
  Tick settle = sat_add(t + pp_.promise + pp_.lease_len, eps());
  if (k_.clock(me_) < settle) {
    trace_wait("leader_init", true);
    auto w = k_.wait_clock(me_, settle);
    co_await w;
    trace_wait("leader_init", false);
  }
  lh_.clear();

  size_t quorum = quorum_others();
  for (;;) {
    if (est_replied_[t].size() >= quorum) break;
    if (!hooks_.am_leader(t, k_.clock(me_))) break;
    broadcast(EstRequestMsg{t});
    auto w = k_.wait_pred_or_clock(
        me_, [this, t, quorum] { return est_replied_[t].size() >= quorum; },
        k_.clock(me_) + pp_.retx);
    co_await w;
  }
  if (est_replied_[t].size() < quorum) co_return;

  Estimate best = est_;
  for (const auto& e : est_replies_[t])
    if (std::pair(e.ts, e.index) > std::pair(best.ts, best.index)) best = e;
  if (best.ts >= t) co_return;
  std::int64_t kstar = best.index;

  {
    auto fg = fill_gaps(kstar - 2);
    co_await fg;
  }
  {
    auto rc = do_ops_fixed(best.ops, 0, t, kstar, true);
    if (co_await rc == DoRes::Failed) co_return;
  }
  submit(kNoOpKind, kInternalTicket);

  for (;;) {
    main_cursor_ = std::max(k_.clock(me_), main_cursor_ + 1);
    if (k_.clock(me_) < main_cursor_) {
      auto w = k_.wait_clock(me_, main_cursor_);
      co_await w;
    }
    Tick now = main_cursor_;
    if (!hooks_.am_leader(t, now)) co_return;

    if (now >= next_send_time_) {
      lease_ = Lease{est_.index, now};
      TraceRec r;
      r.ev = "lease";
      r.via = "renew";
      r.b = lease_.batch;
      r.s = lease_.start;
      trace(std::move(r));
      dirty();
      broadcast(CommitLeaseMsg{batch_or_init(est_.index), est_.index, lease_,
                               {lh_.begin(), lh_.end()}});
      next_send_time_ = now + pp_.renew;
    }

    if (!lease_requests_.empty()) {
      lh_.insert(lease_requests_.begin(), lease_requests_.end());
      lease_requests_.clear();
      TraceRec r;
      r.ev = "lh";
      for (ProcId q : lh_) r.idxs.push_back(q);
      trace(std::move(r));
      dirty();
    }

    std::vector<Operation> next_ops;
    std::set_difference(ops_requested_.begin(), ops_requested_.end(), ops_done_.begin(),
                        ops_done_.end(), std::back_inserter(next_ops));
    if (!next_ops.empty()) {
      DoRes r;
      if (pp_.algorithm == 2) {
        auto d = do_ops_rounds(std::move(next_ops), t, est_.index + 1);
        r = co_await d;
      } else {
        auto d = do_ops_fixed(std::move(next_ops), now + pp_.promise, t, est_.index + 1, false);
        r = co_await d;
      }
      if (r == DoRes::Failed) co_return;
    }
  }
}

Task<Proc::DoRes> Proc::do_ops_fixed(std::vector<Operation> ops, Tick s, Tick t, std::int64_t j,
                                     bool recommit) {
  if (t < max_t_) co_return DoRes::Failed;
  est_ = Estimate{ops, t, j};
  {
    TraceRec r;
    r.ev = "accept";
    r.t = t;
    r.j = j;
    r.s = s;
    r.via = "self";
    trace(std::move(r));
  }
  dirty();
  auto key = std::make_pair(t, j);
  size_t quorum = quorum_others();
  Tick first_send = kNever;
  for (;;) {
    if (packed_[key].size() >= quorum) break;
    if (!hooks_.am_leader(t, k_.clock(me_))) break;
    broadcast(PrepareMsg{ops, s, t, j, batch_or_init(j - 1)});
    if (first_send == kNever) first_send = k_.clock(me_);
    auto w = k_.wait_pred_or_clock(
        me_, [this, key, quorum] { return packed_[key].size() >= quorum; },
        k_.clock(me_) + pp_.retx);
    co_await w;
  }
  if (packed_[key].size() < quorum) co_return DoRes::Failed;
  auto tail = commit_tail(std::move(ops), s, t, j, first_send, recommit);
  DoRes res = co_await tail;
  co_return res;
}

Task<Proc::DoRes> Proc::do_ops_rounds(std::vector<Operation> ops, Tick t, std::int64_t j) {
  if (t < max_t_) co_return DoRes::Failed;
  est_ = Estimate{ops, t, j};
  {
    TraceRec r;
    r.ev = "accept";
    r.t = t;
    r.j = j;
    r.via = "self";
    trace(std::move(r));
  }
  dirty();
  auto key = std::make_pair(t, j);
  size_t quorum = quorum_others();
  Tick first_send = kNever;
  Tick s = 0;
  // Rounds keep going until the batch can actually lock, not merely until a
  // quorum acks: every round lifts the promise, and that steady rise is what
  // bounds how long a read can sit on a pending batch. Stopping early would
  // freeze the promise below a reader's timestamp until the commit arrives.
  auto lh_acked = [this, key] {
    const auto& acked = packed_[key];
    for (ProcId q : lh_)
      if (!acked.count(q)) return false;
    return true;
  };
  auto can_commit = [this, key, quorum, lh_acked, &first_send, &s] {
    if (packed_[key].size() < quorum) return false;
    if (lh_acked()) return true;
    Tick now = k_.clock(me_);
    if (now < sat_add(first_send, 2 * pp_.delay)) return false;
    // a leaseholder is unreachable; safe once the lease it holds has run out
    Tick lease_end = sat_add(lease_.start, pp_.lease_len);
    return s >= lease_end || now >= sat_add(lease_end, eps());
  };
  for (;;) {
    Tick now = k_.clock(me_);
    if (!hooks_.am_leader(t, now)) co_return DoRes::Failed;
    s = now + pp_.promise;
    broadcast(PrepareMsg{ops, s, t, j, batch_or_init(j - 1)});
    if (first_send == kNever) first_send = now;
    auto w = k_.wait_pred_or_clock(me_, can_commit, now + pp_.status_period);
    co_await w;
    if (can_commit()) break;
  }
  // commit_tail's own waits are already satisfied here and fall through
  auto tail = commit_tail(std::move(ops), s, t, j, first_send, false);
  DoRes res = co_await tail;
  co_return res;
}

Task<Proc::DoRes> Proc::commit_tail(std::vector<Operation> ops, Tick s, Tick t, std::int64_t j,
                                    Tick first_send, bool recommit) {
  auto key = std::make_pair(t, j);
  auto lh_acked = [this, key] {
    const auto& acked = packed_[key];
    for (ProcId q : lh_)
      if (!acked.count(q)) return false;
    return true;
  };
  if (!lh_acked()) {
    trace_wait("leaseholder_ack", true, j);
    auto w = k_.wait_pred_or_clock(me_, lh_acked, sat_add(first_send, 2 * pp_.delay));
    co_await w;
    trace_wait("leaseholder_ack", false, j);
  }
  if (!lh_acked() && s < sat_add(lease_.start, pp_.lease_len)) {
    Tick until = sat_add(sat_add(lease_.start, pp_.lease_len), eps());
    if (k_.clock(me_) < until) {
      trace_wait("lease_expiry", true, j);
      auto w = k_.wait_clock(me_, until);
      co_await w;
      trace_wait("lease_expiry", false, j);
    }
  }
  lh_ = packed_[key];
  {
    TraceRec r;
    r.ev = "lh";
    for (ProcId q : lh_) r.idxs.push_back(q);
    trace(std::move(r));
  }

  batch_[j] = Batch{ops, s};
  lease_ = Lease{j, s};
  {
    TraceRec r;
    r.ev = "lock";
    r.t = t;
    r.j = j;
    r.s = s;
    r.ops = encode_ops(ops);
    r.via = recommit ? "recommit" : "fresh";
    trace(std::move(r));
  }
  {
    TraceRec r;
    r.ev = "lease";
    r.via = "own";
    r.b = j;
    r.s = s;
    trace(std::move(r));
  }
  dirty();
  execute_up_to(j);
  broadcast(CommitLeaseMsg{batch_[j], j, lease_, {lh_.begin(), lh_.end()}});
  next_send_time_ = s + pp_.renew;
  co_return DoRes::Done;
}

Task<> Proc::fill_gaps(std::int64_t up_to) {
  for (;;) {
    std::vector<std::int64_t> gaps;
    for (std::int64_t j = 1; j <= up_to; ++j)
      if (is_init(batch_or_init(j))) gaps.push_back(j);
    if (gaps.empty()) co_return;
    broadcast(MyGapsMsg{gaps});
    auto filled = [this, gaps] {
      for (auto j : gaps)
        if (is_init(batch_or_init(j))) return false;
      return true;
    };
    trace_wait("gap_fill", true);
    auto w = k_.wait_pred_or_clock(me_, filled, k_.clock(me_) + pp_.retx);
    co_await w;
    trace_wait("gap_fill", false);
  }
}

// ---------------------------------------------------------------------------
// message handlers (run at delivery time)
// ---------------------------------------------------------------------------

void Proc::on_est_request(ProcId from, const EstRequestMsg& m) {
  if (m.t > max_t_) {
    max_t_ = m.t;
    TraceRec r;
    r.ev = "maxt";
    r.t = max_t_;
    trace(std::move(r));
    dirty();
  }
  hooks_.send(from, EstReplyMsg{m.t, est_, est_.index - 1, batch_or_init(est_.index - 1)});
}

void Proc::on_prepare(ProcId from, const PrepareMsg& m) {
  set_batch(m.j - 1, m.prev, "prev");
  bool accept = m.t >= max_t_ && std::pair(m.t, m.j) > std::pair(est_.ts, est_.index);
  if (accept) {
    est_ = Estimate{m.ops, m.t, m.j};
    pending_ops_[m.j] = m.ops;
    if (pp_.algorithm != 2) pending_promise_[m.j] = m.promise;
    max_pending_index_ = std::max(max_pending_index_, m.j);
    TraceRec r;
    r.ev = "accept";
    r.t = m.t;
    r.j = m.j;
    r.s = m.promise;
    r.via = "prepare";
    trace(std::move(r));
    dirty();
  }
  if (pp_.algorithm == 2) {
    // every round raises the floor for this index, accepted or not
    auto it = pending_promise_.find(m.j);
    Tick next = it == pending_promise_.end() ? m.promise : std::max(it->second, m.promise);
    if (it == pending_promise_.end() || next != it->second) {
      pending_promise_[m.j] = next;
      dirty();
    }
  }
  if (est_ == Estimate{m.ops, m.t, m.j}) hooks_.send(from, PAckMsg{m.t, m.j});
}

Task<> Proc::on_commit_lease(ProcId from, CommitLeaseMsg m) {
  if (mu_.disagree_batch == m.j && me_ == n_ - 1 && !is_init(m.b)) {
    m.b.ops.push_back(Operation{OpId{me_, 999999}, kNoOpKind});
  }
  set_batch(m.j, m.b, "commit");
  auto fg = fill_gaps(m.j - 1);
  co_await fg;
  execute_up_to(m.j);
  bool member = std::find(m.holders.begin(), m.holders.end(), me_) != m.holders.end();
  if (member && lease_less(lease_, m.lease)) {
    lease_ = m.lease;
    TraceRec r;
    r.ev = "lease";
    r.via = "adopt";
    r.b = lease_.batch;
    r.s = lease_.start;
    trace(std::move(r));
    dirty();
  } else {
    hooks_.send(from, RequestLeaseMsg{});
  }
}

void Proc::deliver(ProcId from, Message m) {
  if (dead_) return;
  if (auto* op = std::get_if<OpRequestMsg>(&m)) {
    ops_requested_.insert(op->op);
    dirty();
  } else if (auto* er = std::get_if<EstReplyMsg>(&m)) {
    set_batch(er->prev_index, er->prev, "est");
    est_replied_[er->t].insert(from);
    est_replies_[er->t].push_back(er->est);
    dirty();
  } else if (auto* pk = std::get_if<PAckMsg>(&m)) {
    packed_[{pk->t, pk->j}].insert(from);
    dirty();
  } else if (auto* mg = std::get_if<MyGapsMsg>(&m)) {
    for (auto j : mg->gaps) {
      Batch b = batch_or_init(j);
      if (!is_init(b)) hooks_.send(from, MyBatchMsg{j, b});
    }
  } else if (auto* mb = std::get_if<MyBatchMsg>(&m)) {
    set_batch(mb->j, mb->b, "my_batch");
  } else if (auto* eq = std::get_if<EstRequestMsg>(&m)) {
    on_est_request(from, *eq);
  } else if (auto* pr = std::get_if<PrepareMsg>(&m)) {
    on_prepare(from, *pr);
  } else if (auto* cl = std::get_if<CommitLeaseMsg>(&m)) {
    std::erase_if(handler_tasks_, [](const Task<>& t) { return t.done(); });
    handler_tasks_.push_back(on_commit_lease(from, std::move(*cl)));
    handler_tasks_.back().start();
  } else if (std::get_if<RequestLeaseMsg>(&m)) {
    lease_requests_.insert(from);
    dirty();
  }
  // heartbeats are consumed by the leadership layer before reaching here
}

}  // namespace leasesim
