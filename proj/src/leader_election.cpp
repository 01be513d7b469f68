#include "leasesim/leader_election.hpp"

#include <algorithm>

namespace leasesim {

void LeadershipProvider::record(ProcId p, Tick t1, Tick t2) {
  auto key = std::make_pair(p, t1);
  auto it = open_.find(key);
  if (it != open_.end()) {
    grants_[it->second].t2 = std::max(grants_[it->second].t2, t2);
    return;
  }
  open_[key] = grants_.size();
  grants_.push_back(GrantEntry{p, t1, t2});
}

ArbiterProvider::ArbiterProvider(std::vector<LeadershipSegment> segs) : segs_(std::move(segs)) {
  if (segs_.empty()) throw ConfigError("leadership: at least one segment required");
  for (size_t i = 1; i < segs_.size(); ++i)
    if (segs_[i].start <= segs_[i - 1].start)
      throw ConfigError("leadership: segment starts must be strictly increasing");
  if (segs_.front().start != 0) throw ConfigError("leadership: first segment must start at 0");
}

ProcId ArbiterProvider::holder_at(Tick t) const {
  if (t < 0) return -1;
  size_t lo = 0;
  for (size_t i = 0; i < segs_.size(); ++i)
    if (segs_[i].start <= t) lo = i;
  return segs_[lo].holder;
}

Tick ArbiterProvider::segment_start(Tick t) const {
  Tick s = 0;
  for (const auto& seg : segs_)
    if (seg.start <= t) s = seg.start;
  return s;
}

bool ArbiterProvider::am_leader(ProcId p, Tick t1, Tick t2, Tick now_clock) {
  if (t1 > t2)
    throw LeadershipViolation("am_leader called with t1 > t2");
  if (t2 > now_clock)
    throw LeadershipViolation("am_leader called about the future (t2 > caller clock)");
  if (t1 < 0) return false;
  // both endpoints inside one segment held by p
  if (holder_at(t1) != p) return false;
  Tick seg = segment_start(t1);
  if (segment_start(t2) != seg) return false;
  record(p, t1, t2);
  return true;
}

ProcId ArbiterProvider::leader_hint(ProcId, Tick caller_clock) {
  ProcId h = holder_at(caller_clock);
  if (h >= 0) return h;
  // between reigns: aim at the eventual stable holder so retries land
  for (auto it = segs_.rbegin(); it != segs_.rend(); ++it)
    if (it->holder >= 0) return it->holder;
  return 0;
}

HeartbeatProvider::HeartbeatProvider(int n, Tick timeout)
    : n_(n),
      timeout_(timeout),
      last_heard_(n, std::vector<Tick>(n, kAlways)),
      reserved_(n, {1, 0}) {}

void HeartbeatProvider::on_heartbeat(ProcId from, ProcId at, Tick at_clock) {
  last_heard_[at][from] = std::max(last_heard_[at][from], at_clock);
}

void HeartbeatProvider::on_self_tick(ProcId p, Tick clock) {
  last_heard_[p][p] = std::max(last_heard_[p][p], clock);
}

ProcId HeartbeatProvider::believed_leader(ProcId p, Tick clock) const {
  for (ProcId q = 0; q < n_; ++q) {
    Tick h = last_heard_[p][q];
    if (h != kAlways && clock - h <= timeout_) return q;
  }
  return p;
}

bool HeartbeatProvider::am_leader(ProcId p, Tick t1, Tick t2, Tick now_clock) {
  if (t1 > t2)
    throw LeadershipViolation("am_leader called with t1 > t2");
  if (t2 > now_clock)
    throw LeadershipViolation("am_leader called about the future (t2 > caller clock)");
  if (believed_leader(p, now_clock) != p) return false;
  // reservation table: belief is advisory, reservations are authoritative
  for (ProcId q = 0; q < n_; ++q) {
    if (q == p) continue;
    const auto& [lo, hi] = reserved_[q];
    if (lo <= hi && t1 <= hi && lo <= t2) return false;
  }
  auto& [lo, hi] = reserved_[p];
  if (lo > hi) {
    reserved_[p] = {t1, t2};
  } else {
    lo = std::min(lo, t1);
    hi = std::max(hi, t2);
  }
  record(p, t1, t2);
  return true;
}

ProcId HeartbeatProvider::leader_hint(ProcId caller, Tick caller_clock) {
  return believed_leader(caller, caller_clock);
}

}  // namespace leasesim
