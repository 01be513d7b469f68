#include "leasesim/kernel.hpp"

#include <algorithm>

namespace leasesim {

Kernel::Kernel(int n, std::vector<Tick> clock_offsets, std::uint64_t seed)
    : n_(n),
      offset_(std::move(clock_offsets)),
      rng_(seed),
      parked_(n),
      scan_pending_(n, false),
      dropped_(n, false) {
  if (static_cast<int>(offset_.size()) != n) throw ConfigError("clock offset count != n");
  max_offset_ = *std::max_element(offset_.begin(), offset_.end());
}

Tick Kernel::real_for_clock(ProcId p, Tick v) const {
  if (v == kNever) return kNever;
  if (clock(p) >= v) return now_;
  // clock_p(rt) = max(0, rt + offset); rt >= now here so the max() arm that
  // still grows is rt + offset
  return v - offset_[p];
}

void Kernel::schedule_ranked(Tick rt, int rank, std::function<void()> fn) {
  assert(rt >= now_);
  queue_.push(Event{rt, rank, next_seq_++, std::move(fn)});
}

void Kernel::run_until(Tick horizon) {
  while (!queue_.empty() && queue_.top().rt <= horizon) {
    Event ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    now_ = ev.rt;
    ev.fn();
  }
  now_ = std::max(now_, horizon);
}

void Kernel::park(ProcId p, WaitAwaiter* aw, std::coroutine_handle<> h) {
  std::uint64_t id = next_wait_id_++;
  Parked entry{aw, h, false};
  if (aw->clock_deadline != kNever) {
    entry.has_timer = true;
    Tick rt = real_for_clock(p, aw->clock_deadline);
    schedule_ranked(rt, 1, [this, p, id] {
      auto& m = parked_[p];
      auto it = m.find(id);
      if (it == m.end()) return;  // already woken or dropped
      Parked e = it->second;
      m.erase(it);
      assert(e.aw->magic == WaitAwaiter::kLive);
      e.aw->result = Woke::Deadline;
      e.h.resume();
    });
  }
  parked_[p].emplace(id, entry);
}

void Kernel::park_real(ProcId p, Tick rt, std::coroutine_handle<> h) {
  std::uint64_t id = next_wait_id_++;
  parked_[p].emplace(id, Parked{nullptr, h, true});
  schedule_ranked(rt, 1, [this, p, id] {
    auto& m = parked_[p];
    auto it = m.find(id);
    if (it == m.end()) return;
    Parked e = it->second;
    m.erase(it);
    e.h.resume();
  });
}

void Kernel::notify(ProcId p) {
  if (dropped_[p] || scan_pending_[p]) return;
  scan_pending_[p] = true;
  schedule(now_, [this, p] {
    scan_pending_[p] = false;
    scan(p);
  });
}

void Kernel::scan(ProcId p) {
  // Resuming a wait may add or remove entries; walk ids in order, re-looking
  // up after every resume. New entries get larger ids, so they are re-checked
  // on the next notify, matching "the predicate is evaluated when parked".
  std::uint64_t cursor = 0;
  for (;;) {
    auto& m = parked_[p];
    auto it = m.upper_bound(cursor);
    if (it == m.end()) return;
    cursor = it->first;
    Parked& e = it->second;
    if (e.aw == nullptr) continue;  // pure timer
    assert(e.aw->magic == WaitAwaiter::kLive);
    if (!e.aw->pred) continue;
    if (!e.aw->pred()) continue;
    Parked copy = e;
    m.erase(it);
    copy.aw->result = Woke::Pred;
    copy.h.resume();
  }
}

void Kernel::drop_process(ProcId p) {
  parked_[p].clear();
  dropped_[p] = true;
}

}  // namespace leasesim
