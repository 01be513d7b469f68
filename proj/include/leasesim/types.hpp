#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace leasesim {

// Simulated time. Real time and process clocks share the same integer axis.
using Tick = std::int64_t;
using ProcId = std::int32_t;

// Sentinels standing in for +inf / -inf on the tick axis.
inline constexpr Tick kNever = std::numeric_limits<Tick>::max();
inline constexpr Tick kAlways = std::numeric_limits<Tick>::min();

inline Tick sat_add(Tick a, Tick b) {
  if (a == kNever || b == kNever) return kNever;
  if (a == kAlways || b == kAlways) return kAlways;
  return a + b;
}

// Operation identity: (issuer, per-issuer counter). Total order = lexicographic.
struct OpId {
  ProcId issuer = -1;
  std::int64_t seq = 0;
  auto operator<=>(const OpId&) const = default;
};

struct Operation {
  OpId id;
  std::string kind;
  bool operator==(const Operation&) const = default;
  bool operator<(const Operation& o) const { return id < o.id; }
};

std::string op_to_string(const Operation& op);
Operation op_from_string(const std::string& s);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace leasesim
