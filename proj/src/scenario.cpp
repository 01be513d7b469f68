#include "leasesim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace leasesim {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ConfigError("scenario: " + what); }

Tick get_tick(const json& j, const char* key, Tick dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) bad(std::string(key) + " must be an integer");
  return j[key].get<Tick>();
}

Tick require_tick(const json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing required field ") + key);
  return get_tick(j, key, 0);
}

LinkRule parse_link(const json& j) {
  LinkRule r;
  r.from = static_cast<ProcId>(get_tick(j, "from", -1));
  r.to = static_cast<ProcId>(get_tick(j, "to", -1));
  if (j.contains("kind")) r.kind = j["kind"].get<std::string>();
  r.from_rt = get_tick(j, "from_rt", 0);
  r.to_rt = get_tick(j, "to_rt", kNever);
  r.delay = require_tick(j, "delay");
  if (r.delay < 0) bad("link delay must be >= 0");
  return r;
}

std::vector<LinkRule> parse_links(const json& j, const char* key) {
  std::vector<LinkRule> out;
  if (!j.contains(key)) return out;
  for (const auto& lj : j[key]) out.push_back(parse_link(lj));
  return out;
}

void parse_params(const json& j, ProtocolParams& p) {
  if (j.contains("algorithm")) {
    const auto& a = j["algorithm"];
    if (a.is_string() && a.get<std::string>() == "cht") {
      p.algorithm = 1;
      if (get_tick(j, "promise", 0) != 0) bad("the cht variant fixes promise at 0");
      if (j.contains("status_period")) bad("the cht variant takes no status_period");
    } else if (a.is_number_integer() && (a.get<int>() == 1 || a.get<int>() == 2)) {
      p.algorithm = a.get<int>();
    } else {
      bad("algorithm must be 1, 2 or \"cht\"");
    }
  }
  p.promise = get_tick(j, "promise", 0);
  if (j.contains("status_period")) {
    const auto& sp = j["status_period"];
    if (sp.is_string() && sp.get<std::string>() == "inf")
      p.status_period = kNever;
    else if (sp.is_number_integer())
      p.status_period = sp.get<Tick>();
    else
      bad("status_period must be an integer or \"inf\"");
  }
  p.lease_len = require_tick(j, "lease");
  p.renew = require_tick(j, "renew");
  p.delay = require_tick(j, "delay");
  p.skew = get_tick(j, "skew", 0);
  p.nice_delay = get_tick(j, "nice_delay", p.delay);
  p.retx = get_tick(j, "retx", std::max<Tick>(1, p.delay / 2));
  p.step_cost = get_tick(j, "step_cost", 0);
  p.strict_case1 = j.value("strict_case1", false);
  p.skip_read_promise_wait = j.value("skip_read_promise_wait", false);
}

void parse_mutation(const std::string& m, Scenario& s) {
  if (m == "skip_skew_waits") {
    s.mutations.skip_skew_waits = true;
  } else if (m == "no_conflict_filter") {
    s.mutations.no_conflict_filter = true;
  } else if (m.rfind("disagree_batch:", 0) == 0) {
    s.mutations.disagree_batch = std::stoll(m.substr(15));
  } else if (m.rfind("lease_slop:", 0) == 0) {
    s.mutations.lease_slop = std::stoll(m.substr(11));
  } else {
    bad("unknown mutation " + m);
  }
  s.mutation_names.push_back(m);
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("parse error: ") + e.what());
  }
  if (j.contains("schema") && j["schema"] != "leasesim-scenario-1")
    bad("unknown schema " + j["schema"].get<std::string>());

  Scenario s;
  if (j.contains("name")) s.name = j["name"].get<std::string>();
  s.n = static_cast<int>(get_tick(j, "n", 3));
  s.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("object")) s.object = j["object"].get<std::string>();
  s.horizon = get_tick(j, "horizon", 1000);
  s.measure_from = get_tick(j, "measure_from", 0);
  s.audit_bounds = j.value("audit_bounds", false);

  if (!j.contains("params")) bad("missing params block");
  parse_params(j["params"], s.params);

  if (j.contains("mutations"))
    for (const auto& m : j["mutations"]) parse_mutation(m.get<std::string>(), s);

  if (j.contains("network")) {
    const json& nj = j["network"];
    s.net.gst = get_tick(nj, "gst", 0);
    s.net.delay_true = get_tick(nj, "delay_true", -1);
    s.net.nice_delay_true = get_tick(nj, "nice_delay_true", -1);
    s.net.fifo_after = get_tick(nj, "fifo_after", -1);
    if (nj.contains("pre")) {
      const json& pj = nj["pre"];
      s.net.pre.delay_min = get_tick(pj, "delay_min", 1);
      s.net.pre.delay_max = get_tick(pj, "delay_max", -1);
      s.net.pre.loss = pj.value("loss", 0.2);
      s.net.pre.links = parse_links(pj, "links");
    }
    if (nj.contains("post")) {
      const json& pj = nj["post"];
      if (pj.contains("delay_default")) {
        s.net.post_fixed = true;
        s.net.post_delay = require_tick(pj, "delay_default");
      }
    }
    s.net.links = parse_links(nj, "links");
    if (nj.contains("nice_periods")) {
      for (const auto& wj : nj["nice_periods"]) {
        NicePeriod w;
        w.start = require_tick(wj, "start");
        w.end = require_tick(wj, "end");
        w.delay = get_tick(wj, "delay", -1);
        w.links = parse_links(wj, "links");
        s.net.nice_periods.push_back(w);
      }
    }
  }
  if (s.net.delay_true < 0) s.net.delay_true = s.params.delay;
  if (s.net.nice_delay_true < 0) s.net.nice_delay_true = s.params.nice_delay;
  if (s.net.fifo_after < 0) s.net.fifo_after = s.net.gst;
  if (s.net.pre.delay_max < 0) s.net.pre.delay_max = 10 * s.net.delay_true;

  if (j.contains("clock_offsets"))
    for (const auto& o : j["clock_offsets"]) s.clock_offsets.push_back(o.get<Tick>());
  if (s.clock_offsets.empty()) s.clock_offsets.assign(s.n, 0);

  if (j.contains("crashes")) {
    for (const auto& cj : j["crashes"]) {
      CrashSpec c;
      c.p = static_cast<ProcId>(require_tick(cj, "p"));
      c.rt = require_tick(cj, "rt");
      s.crashes.push_back(c);
    }
  }

  if (j.contains("leadership")) {
    const json& lj = j["leadership"];
    if (lj.contains("provider")) s.leadership.provider = lj["provider"].get<std::string>();
    if (lj.contains("segments")) {
      for (const auto& sj : lj["segments"]) {
        SegmentSpec seg;
        seg.start = require_tick(sj, "start");
        seg.holder = static_cast<ProcId>(get_tick(sj, "holder", -1));
        s.leadership.segments.push_back(seg);
      }
    }
    s.leadership.period = get_tick(lj, "period", -1);
    s.leadership.timeout = get_tick(lj, "timeout", -1);
  }
  if (s.leadership.segments.empty()) s.leadership.segments.push_back(SegmentSpec{0, 0});
  if (s.leadership.period < 0) s.leadership.period = s.params.delay;
  if (s.leadership.timeout < 0) s.leadership.timeout = 4 * s.params.delay;

  if (j.contains("workload")) {
    const json& wj = j["workload"];
    if (wj.contains("ops")) {
      for (const auto& oj : wj["ops"]) {
        OpSpec o;
        o.p = static_cast<ProcId>(require_tick(oj, "p"));
        o.rt = require_tick(oj, "rt");
        o.kind = oj.at("kind").get<std::string>();
        s.workload.ops.push_back(o);
      }
    }
    if (wj.contains("generators")) {
      for (const auto& gj : wj["generators"]) {
        GenSpec g;
        g.p = static_cast<ProcId>(require_tick(gj, "p"));
        g.start = get_tick(gj, "start", 0);
        g.count = get_tick(gj, "count", 0);
        for (const auto& kj : gj.at("kinds")) g.kinds.push_back(kj.get<std::string>());
        g.think = get_tick(gj, "think", 0);
        s.workload.generators.push_back(g);
      }
    }
  }

  // a finite status period is what distinguishes algorithm 2; without one it
  // is algorithm 1 sending the same messages under another name
  if (s.params.algorithm == 2 && s.params.status_period == kNever) s.params.algorithm = 1;
  if (s.params.algorithm == 1) s.params.status_period = kNever;

  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario s = scenario_from_json_text(ss.str());
  if (s.name == "unnamed") {
    auto slash = path.find_last_of('/');
    auto base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    s.name = dot == std::string::npos ? base : base.substr(0, dot);
  }
  return s;
}

void validate_scenario(const Scenario& s) {
  const ProtocolParams& p = s.params;
  if (s.n < 3) bad("need at least 3 processes");
  if (p.delay < 1) bad("delay must be >= 1");
  if (p.promise < 0) bad("promise must be >= 0");
  if (p.algorithm == 2 && p.status_period < 1) bad("status_period must be >= 1");
  if (p.nice_delay < 1 || p.nice_delay > p.delay) bad("nice_delay must lie in [1, delay]");
  Tick floor = 3 * p.delay + p.step_cost;
  if (p.lease_len <= floor)
    bad("lease must exceed 3*delay + step_cost = " + std::to_string(floor));
  if (p.renew <= 0 || p.renew >= p.lease_len - floor)
    bad("renew must lie in (0, lease - (3*delay + step_cost))");
  if (p.retx < 1) bad("retx must be >= 1");
  if (p.step_cost < 0) bad("step_cost must be >= 0");

  if (static_cast<int>(s.clock_offsets.size()) != s.n)
    bad("clock_offsets must list one offset per process");
  auto [lo, hi] = std::minmax_element(s.clock_offsets.begin(), s.clock_offsets.end());
  if (*hi - *lo > p.skew)
    bad("clock offset spread " + std::to_string(*hi - *lo) + " exceeds skew " +
        std::to_string(p.skew));

  if (s.net.gst < 0) bad("gst must be >= 0");
  if (s.horizon <= s.net.gst) bad("horizon must exceed gst");
  if (s.net.delay_true < 1) bad("delay_true must be >= 1");
  if (s.net.pre.delay_min < 0 || s.net.pre.delay_max < s.net.pre.delay_min)
    bad("pre-gst delay range is empty");
  if (s.net.pre.loss < 0.0 || s.net.pre.loss >= 1.0) bad("pre-gst loss must lie in [0, 1)");
  if (s.net.post_fixed && s.net.post_delay < 0) bad("post delay must be >= 0");
  for (const auto& w : s.net.nice_periods) {
    if (w.start < s.net.gst) bad("nice periods must start at or after gst");
    if (w.end <= w.start) bad("nice period must have positive length");
    Tick d = w.delay < 0 ? s.net.nice_delay_true : w.delay;
    if (d < 1 || d > s.net.delay_true) bad("nice period delay must lie in [1, delay_true]");
  }

  std::set<ProcId> crash_set;
  for (const auto& c : s.crashes) {
    if (c.p < 0 || c.p >= s.n) bad("crash names an unknown process");
    if (c.rt >= s.net.gst) bad("crashes must happen before gst");
    crash_set.insert(c.p);
  }
  if (2 * static_cast<int>(crash_set.size()) >= s.n)
    bad("majority of processes must stay correct");

  if (s.leadership.provider != "arbiter" && s.leadership.provider != "heartbeat")
    bad("leadership provider must be arbiter or heartbeat");
  if (s.leadership.provider == "arbiter") {
    const auto& segs = s.leadership.segments;
    if (segs.empty() || segs.front().start != 0) bad("leadership segments must start at 0");
    for (size_t i = 1; i < segs.size(); ++i)
      if (segs[i].start <= segs[i - 1].start) bad("leadership segments must be increasing");
    for (const auto& seg : segs)
      if (seg.holder >= s.n) bad("leadership segment names an unknown process");
  }

  const ObjectType& obj = object_type(s.object);
  for (const auto& o : s.workload.ops) {
    if (o.p < 0 || o.p >= s.n) bad("workload op names an unknown process");
    if (!obj.valid_kind(o.kind)) bad("workload op kind " + o.kind + " unknown to " + s.object);
  }
  for (const auto& g : s.workload.generators) {
    if (g.p < 0 || g.p >= s.n) bad("generator names an unknown process");
    if (g.kinds.empty()) bad("generator needs at least one op kind");
    if (g.count < 0) bad("generator count must be >= 0");
    if (g.think < 0) bad("generator think time must be >= 0");
    for (const auto& k : g.kinds)
      if (!obj.valid_kind(k)) bad("generator kind " + k + " unknown to " + s.object);
  }
}

}  // namespace leasesim
