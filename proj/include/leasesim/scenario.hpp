#pragma once

#include <string>
#include <vector>

#include "leasesim/protocol.hpp"
#include "leasesim/types.hpp"

namespace leasesim {

// A delay rule for one directed link, optionally restricted to a message kind
// and a send-time window [from_rt, to_rt). from/to of -1 match any process.
struct LinkRule {
  ProcId from = -1;
  ProcId to = -1;
  std::string kind;  // empty matches any kind
  Tick from_rt = 0;
  Tick to_rt = kNever;
  Tick delay = 0;
};

struct NicePeriod {
  Tick start = 0;
  Tick end = 0;
  Tick delay = -1;  // -1 means the network's nice_delay_true
  std::vector<LinkRule> links;
};

struct PreGstSpec {
  Tick delay_min = 1;
  Tick delay_max = -1;  // -1 means 10 * delay_true
  double loss = 0.2;
  std::vector<LinkRule> links;  // matched sends skip the loss draw
};

struct NetworkSpec {
  Tick gst = 0;
  Tick delay_true = -1;       // -1 means params.delay
  Tick nice_delay_true = -1;  // -1 means params.nice_delay
  Tick fifo_after = -1;       // -1 means gst
  PreGstSpec pre;
  bool post_fixed = false;  // false: uniform in [1, delay_true]
  Tick post_delay = 0;
  std::vector<LinkRule> links;
  std::vector<NicePeriod> nice_periods;
};

struct CrashSpec {
  ProcId p = 0;
  Tick rt = 0;
};

struct SegmentSpec {
  Tick start = 0;
  ProcId holder = -1;  // -1 means no leader in this segment
};

struct LeadershipSpec {
  std::string provider = "arbiter";
  std::vector<SegmentSpec> segments;  // arbiter only; default [{0,0}]
  Tick period = -1;                   // heartbeat send period; -1 means delay
  Tick timeout = -1;                  // -1 means 4 * delay
};

struct OpSpec {
  ProcId p = 0;
  Tick rt = 0;
  std::string kind;
};

struct GenSpec {
  ProcId p = 0;
  Tick start = 0;
  std::int64_t count = 0;
  std::vector<std::string> kinds;
  Tick think = 0;
};

struct WorkloadSpec {
  std::vector<OpSpec> ops;
  std::vector<GenSpec> generators;
};

struct Scenario {
  std::string name = "unnamed";
  int n = 3;
  std::uint64_t seed = 1;
  std::string object = "register";
  Tick horizon = 1000;
  Tick measure_from = 0;
  bool audit_bounds = false;
  ProtocolParams params;
  Mutations mutations;
  std::vector<std::string> mutation_names;
  NetworkSpec net;
  std::vector<Tick> clock_offsets;  // resolved to size n
  std::vector<CrashSpec> crashes;
  LeadershipSpec leadership;
  WorkloadSpec workload;
};

// Parses, fills defaults, normalizes the algorithm choice and validates.
// "cht" is algorithm 1 with a zero promise delay; algorithm 2 with an
// unbounded status period degenerates to algorithm 1. Both are rewritten at
// load so downstream code sees only algorithm 1 or a finite-period 2.
Scenario scenario_from_json_text(const std::string& text);
Scenario load_scenario(const std::string& path);
void validate_scenario(const Scenario& s);

}  // namespace leasesim
