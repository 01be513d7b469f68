#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "leasesim/object_model.hpp"
#include "leasesim/types.hpp"

namespace leasesim {

// Flat trace record; which fields are meaningful depends on ev. Serialized as
// one JSON object per line with a fixed key order so equal traces are equal
// byte-for-byte.
struct TraceRec {
  std::string ev;       // send recv drop crash clock op_enq op_start ...
  Tick rt = 0;          // real time
  ProcId p = -1;        // acting process
  ProcId peer = -1;     // other endpoint for send/recv/drop/grant
  std::string kind;     // message kind, op kind, wait cause, audit label
  std::int64_t mid = -1;  // message id (send/recv/drop correlation)
  Tick t = kAlways;     // leader timestamp
  std::int64_t j = kAlways;  // batch index
  Tick s = kAlways;     // promise / lease start / estimate ts
  std::int64_t b = kAlways;  // lease batch index
  std::vector<std::int64_t> idxs;  // gap lists, holder lists
  std::vector<std::string> ops;    // op encodings (batch contents)
  std::string op;       // single op encoding
  std::string cls;      // "rmw" | "read"
  std::string val;      // op result encoding
  Tick te = kAlways;    // take-effect time (rmw completion)
  std::int64_t khat = kAlways, kstar = kAlways;
  Tick tstar = kAlways, tprime = kAlways, tp_rt = kAlways;
  std::int64_t ticket = -1;  // workload ticket correlating enq..done
  std::string via;      // lock: fresh|recommit ; lease: adopt|own ; batch src
  std::int64_t state = kAlways;  // executed state value
  Tick t2 = kAlways;    // grant interval end

  bool operator==(const TraceRec&) const = default;
};

struct Trace {
  std::string schema = "leasesim-trace-1";
  std::uint64_t seed = 0;
  std::string scenario_name;
  Tick end_rt = 0;
  std::vector<TraceRec> recs;
  std::map<std::string, std::int64_t> counters;  // filled by the end record
};

void write_jsonl(const Trace& t, std::ostream& os);
std::string to_jsonl(const Trace& t);
Trace read_jsonl(std::istream& is);  // throws ConfigError on malformed input
Trace read_jsonl_file(const std::string& path);
void write_jsonl_file(const Trace& t, const std::string& path);

}  // namespace leasesim
