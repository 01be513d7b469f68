#pragma once

#include <cassert>
#include <coroutine>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "leasesim/types.hpp"

namespace leasesim {

// ---------------------------------------------------------------------------
// Task: minimal lazy coroutine. Awaiting a Task runs the child; completion
// resumes the parent by symmetric transfer. Destroying the Task destroys the
// frame (recursively through held child Tasks), which is how crashed or
// finished processes are torn down mid-wait.
//
// Convention: never co_await a temporary (Task or WaitAwaiter); bind it to a
// named local first. gcc 11 miscompiles destructor tracking for temporaries
// promoted into the coroutine frame and re-destroys the slot at function
// cleanup after it has been reused. The magic field below turns a stale
// awaiter access into an assert instead of silent heap corruption.
// ---------------------------------------------------------------------------

namespace detail {
struct FinalAwaiter {
  bool await_ready() const noexcept { return false; }
  template <typename P>
  std::coroutine_handle<> await_suspend(std::coroutine_handle<P> h) noexcept {
    auto cont = h.promise().continuation;
    return cont ? cont : std::noop_coroutine();
  }
  void await_resume() const noexcept {}
};
}  // namespace detail

template <typename T = void>
class [[nodiscard]] Task {
 public:
  struct promise_type {
    std::coroutine_handle<> continuation;
    T result{};
    Task get_return_object() {
      return Task{std::coroutine_handle<promise_type>::from_promise(*this)};
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    detail::FinalAwaiter final_suspend() noexcept { return {}; }
    void return_value(T v) { result = std::move(v); }
    void unhandled_exception() { throw; }
  };

  Task(Task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Task(const Task&) = delete;
  Task& operator=(Task&& o) noexcept {
    if (h_) h_.destroy();
    h_ = std::exchange(o.h_, {});
    return *this;
  }
  ~Task() {
    if (h_) h_.destroy();
  }

  bool await_ready() const noexcept { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> cont) noexcept {
    h_.promise().continuation = cont;
    return h_;
  }
  T await_resume() { return std::move(h_.promise().result); }

  void start() { h_.resume(); }  // root entry; runs until the first suspend
  bool valid() const { return static_cast<bool>(h_); }

 private:
  friend promise_type;
  explicit Task(std::coroutine_handle<promise_type> h) : h_(h) {}
  std::coroutine_handle<promise_type> h_{};
};

template <>
class [[nodiscard]] Task<void> {
 public:
  struct promise_type {
    std::coroutine_handle<> continuation;
    Task get_return_object() {
      return Task{std::coroutine_handle<promise_type>::from_promise(*this)};
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    detail::FinalAwaiter final_suspend() noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() { throw; }
  };

  Task() = default;
  Task(Task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Task(const Task&) = delete;
  Task& operator=(Task&& o) noexcept {
    if (h_) h_.destroy();
    h_ = std::exchange(o.h_, {});
    return *this;
  }
  ~Task() {
    if (h_) h_.destroy();
  }

  bool await_ready() const noexcept { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> cont) noexcept {
    h_.promise().continuation = cont;
    return h_;
  }
  void await_resume() {}

  void start() { h_.resume(); }
  bool valid() const { return static_cast<bool>(h_); }
  bool done() const { return h_ && h_.done(); }
  void reset() {
    if (h_) h_.destroy();
    h_ = {};
  }

 private:
  friend promise_type;
  explicit Task(std::coroutine_handle<promise_type> h) : h_(h) {}
  std::coroutine_handle<promise_type> h_{};
};

// ---------------------------------------------------------------------------
// Kernel: discrete-event scheduler with per-process integer clocks and
// predicate parking. Events at equal real time run in schedule order.
// ---------------------------------------------------------------------------

enum class Woke { Pred, Deadline };

class Kernel {
 public:
  Kernel(int n, std::vector<Tick> clock_offsets, std::uint64_t seed);

  int n() const { return n_; }
  Tick now() const { return now_; }
  Tick clock(ProcId p) const { return std::max<Tick>(0, now_ + offset_[p]); }
  Tick offset(ProcId p) const { return offset_[p]; }
  Tick max_offset() const { return max_offset_; }
  // earliest real time rt >= now with clock_p(rt) >= v
  Tick real_for_clock(ProcId p, Tick v) const;

  std::mt19937_64& rng() { return rng_; }

  // Events at equal real time run in rank order, then schedule order. Rank 0
  // is deliveries / injections / wake scans, rank 1 is clock-deadline wakes:
  // a process polling "until X arrived" at tick T observes everything that
  // arrives at T, so a bound of the form "by time T" is met exactly at T.
  void schedule(Tick rt, std::function<void()> fn) { schedule_ranked(rt, 0, std::move(fn)); }
  void schedule_ranked(Tick rt, int rank, std::function<void()> fn);
  // Runs events with rt <= horizon. Returns when the queue is drained or
  // every remaining event is later than the horizon.
  void run_until(Tick horizon);

  // State possibly relevant to process p changed; re-scan its parked waits.
  void notify(ProcId p);
  // Crash support: forget every parked wait and pending timer for p.
  void drop_process(ProcId p);

  struct WaitAwaiter {
    Kernel* k;
    ProcId p;
    std::function<bool()> pred;  // empty: pure clock wait
    Tick clock_deadline = kNever;
    Woke result = Woke::Pred;
    static constexpr std::uint32_t kLive = 0xA11FE;
    std::uint32_t magic = kLive;
    ~WaitAwaiter() { magic = 0xDEAD; }

    bool await_ready() {
      if (pred && pred()) {
        result = Woke::Pred;
        return true;
      }
      if (clock_deadline != kNever && k->clock(p) >= clock_deadline) {
        result = Woke::Deadline;
        return true;
      }
      return !pred && clock_deadline == kNever;  // degenerate: nothing to wait for
    }
    void await_suspend(std::coroutine_handle<> h) { k->park(p, this, h); }
    Woke await_resume() { return result; }
  };

  // Suspend until pred() holds (checked on notify(p)).
  WaitAwaiter wait_pred(ProcId p, std::function<bool()> pred) {
    return WaitAwaiter{this, p, std::move(pred), kNever};
  }
  // Suspend until clock_p >= v.
  WaitAwaiter wait_clock(ProcId p, Tick v) { return WaitAwaiter{this, p, {}, v}; }
  // Suspend until pred() holds or clock_p >= v; reports which happened first.
  WaitAwaiter wait_pred_or_clock(ProcId p, std::function<bool()> pred, Tick v) {
    return WaitAwaiter{this, p, std::move(pred), v};
  }

  struct SleepAwaiter {
    Kernel* k;
    ProcId p;
    Tick rt;
    bool await_ready() const { return rt <= k->now(); }
    void await_suspend(std::coroutine_handle<> h) { k->park_real(p, rt, h); }
    void await_resume() const {}
  };
  // Suspend until real time rt (heartbeat pacing; protocol code waits on clocks).
  SleepAwaiter sleep_until_real(ProcId p, Tick rt) { return SleepAwaiter{this, p, rt}; }

 private:
  friend struct WaitAwaiter;
  struct Parked {
    WaitAwaiter* aw;
    std::coroutine_handle<> h;
    bool has_timer = false;
  };

  void park(ProcId p, WaitAwaiter* aw, std::coroutine_handle<> h);
  void park_real(ProcId p, Tick rt, std::coroutine_handle<> h);
  void scan(ProcId p);

  int n_;
  std::vector<Tick> offset_;
  Tick max_offset_;
  Tick now_ = 0;
  std::mt19937_64 rng_;

  struct Event {
    Tick rt;
    int rank;
    std::uint64_t seq;
    std::function<void()> fn;
    bool operator>(const Event& o) const {
      if (rt != o.rt) return rt > o.rt;
      if (rank != o.rank) return rank > o.rank;
      return seq > o.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_seq_ = 0;

  std::uint64_t next_wait_id_ = 1;
  std::vector<std::map<std::uint64_t, Parked>> parked_;  // per process, id-ordered
  std::vector<bool> scan_pending_;
  std::vector<bool> dropped_;
};

}  // namespace leasesim
