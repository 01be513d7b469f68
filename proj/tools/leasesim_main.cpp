#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "leasesim/analysis.hpp"
#include "leasesim/sim.hpp"

namespace {

using namespace leasesim;

int report(const std::vector<Violation>& vs) {
  if (vs.empty()) {
    std::cout << "violations: none\n";
    return 0;
  }
  for (const auto& v : vs) std::cout << "violation [" << v.check << "] " << v.detail << "\n";
  return 1;
}

void print_blocking(const BlockingReport& rep) {
  auto row = [](const char* name, const BlockStats& b) {
    std::printf("  %-7s update max %5lld (n=%lld)   read max %5lld (n=%lld)\n", name,
                static_cast<long long>(b.max_rmw), static_cast<long long>(b.n_rmw),
                static_cast<long long>(b.max_read), static_cast<long long>(b.n_read));
  };
  row("stable", rep.stable);
  row("nice", rep.nice);
  row("other", rep.other);
}

int cmd_run(const std::string& path, std::int64_t seed, const std::string& trace_out,
            bool check) {
  Scenario sc = load_scenario(path);
  if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
  Trace tr = run_scenario(sc);
  std::cout << "scenario " << sc.name << " seed " << sc.seed << ": " << tr.recs.size()
            << " events\n";
  if (!trace_out.empty()) {
    write_jsonl_file(tr, trace_out);
    std::cout << "trace written to " << trace_out << "\n";
  }

  std::int64_t enq = 0, done = 0;
  for (const auto& r : tr.recs) {
    if (r.ev == "op_enq") ++enq;
    if (r.ev == "op_done" && r.ticket >= 0) ++done;
  }
  std::cout << "ops: " << done << "/" << enq << " completed\n";
  std::int64_t sends = 0;
  for (const auto& [k, v] : send_counts(tr)) sends += v;
  std::cout << "messages sent: " << sends << "\n";
  print_blocking(blocking_times(tr, sc));

  auto safety = check_safety(tr, sc.object);
  std::cout << "safety audit: " << (safety.empty() ? "pass" : "FAIL") << "\n";
  if (!check) return report(safety);
  auto vs = check_all(tr, sc);
  return report(vs);
}

int cmd_check(const std::string& trace_path, const std::string& scenario_path) {
  Scenario sc = load_scenario(scenario_path);
  Trace tr = read_jsonl_file(trace_path);
  auto vs = check_all(tr, sc);
  // one line per audit, with the first counterexample where it failed
  const char* audits[] = {"batch_agreement", "single_fresh_lock", "op_single_batch",
                          "majority_persistence", "estimate_monotone", "lease_monotone",
                          "maxt_monotone", "grant_disjoint", "exec_replay",
                          "promise_discipline", "witness", "liveness", "bound"};
  for (const char* a : audits) {
    const Violation* first = nullptr;
    for (const auto& v : vs)
      if (v.check == a) {
        first = &v;
        break;
      }
    if (first)
      std::cout << "audit " << a << ": FAIL  " << first->detail << "\n";
    else
      std::cout << "audit " << a << ": pass\n";
  }
  return vs.empty() ? 0 : 1;
}

int cmd_sweep(const std::string& path, const std::string& param,
              const std::vector<std::int64_t>& values, std::int64_t seeds) {
  Scenario base = load_scenario(path);
  std::printf("%-12s %-10s %-11s %-10s %-10s\n", param.c_str(), "upd_max", "read_max",
              "upd_bound", "read_bound");
  int worst = 0;
  for (std::int64_t v : values) {
    Scenario sc = base;
    if (param == "promise")
      sc.params.promise = v;
    else if (param == "status_period")
      sc.params.status_period = v;
    else if (param == "seed")
      sc.seed = static_cast<std::uint64_t>(v);
    else
      throw ConfigError("sweep: unknown parameter " + param);
    BoundSet b;
    try {
      validate_scenario(sc);
      b = theoretical_bound(sc.params);
    } catch (const ConfigError& e) {
      // out-of-range cell: skipped, never fatal
      std::printf("%-12lld skipped: %s\n", static_cast<long long>(v), e.what());
      continue;
    }
    Tick upd = -1, rd = -1;
    for (std::int64_t s = 0; s < seeds; ++s) {
      sc.seed = base.seed + static_cast<std::uint64_t>(s);
      if (param == "seed") sc.seed = static_cast<std::uint64_t>(v);
      Trace tr = run_scenario(sc);
      auto vs = check_all(tr, sc);
      if (!vs.empty()) {
        std::cout << "sweep point " << v << " seed " << sc.seed << ":\n";
        worst = std::max(worst, report(vs));
      }
      BlockingReport rep = blocking_times(tr, sc);
      upd = std::max(upd, rep.stable.max_rmw);
      rd = std::max(rd, rep.stable.max_read);
      if (param == "seed") break;
    }
    Tick slack = 3 * sc.params.step_cost;
    bool over = upd > b.stable_rmw + slack || rd > b.stable_read + slack;
    std::printf("%-12lld %-10lld %-11lld %-10lld %-10lld%s\n", static_cast<long long>(v),
                static_cast<long long>(upd), static_cast<long long>(rd),
                static_cast<long long>(b.stable_rmw), static_cast<long long>(b.stable_read),
                over ? "  OVER BOUND" : "");
    if (over) worst = std::max(worst, 1);
  }
  return worst;
}

int cmd_table(std::vector<std::string> paths) {
  std::sort(paths.begin(), paths.end());
  std::printf("%-28s %-16s %-16s %-16s %-16s\n", "scenario", "stable_upd", "stable_read",
              "nice_upd", "nice_read");
  int worst = 0;
  for (const auto& p : paths) {
    Scenario sc = load_scenario(p);
    Trace tr = run_scenario(sc);
    auto vs = check_all(tr, sc);
    if (!vs.empty()) {
      std::cout << "scenario " << sc.name << ":\n";
      worst = std::max(worst, report(vs));
    }
    BlockingReport rep = blocking_times(tr, sc);
    auto cell = [](Tick measured, Tick bound) {
      char buf[32];
      if (measured < 0)
        std::snprintf(buf, sizeof buf, "no data/%lld", static_cast<long long>(bound));
      else
        std::snprintf(buf, sizeof buf, "%lld/%lld", static_cast<long long>(measured),
                      static_cast<long long>(bound));
      return std::string(buf);
    };
    std::string su = "-", sr = "-", nu = "-", nr = "-";
    try {
      BoundSet b = theoretical_bound(sc.params);
      su = cell(rep.stable.max_rmw, b.stable_rmw);
      sr = cell(rep.stable.max_read, b.stable_read);
      nu = cell(rep.nice.max_rmw, b.nice_rmw);
      nr = cell(rep.nice.max_read, b.nice_read);
    } catch (const ConfigError&) {
      su = std::to_string(rep.stable.max_rmw);
      sr = std::to_string(rep.stable.max_read);
      nu = std::to_string(rep.nice.max_rmw);
      nr = std::to_string(rep.nice.max_read);
    }
    std::printf("%-28s %-16s %-16s %-16s %-16s\n", sc.name.c_str(), su.c_str(), sr.c_str(),
                nu.c_str(), nr.c_str());
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"replicated-object lease protocol simulator"};
  app.require_subcommand(1);

  std::string scenario_path, trace_path, trace_out, param = "promise";
  std::int64_t seed = -1, seeds = 1;
  std::vector<std::int64_t> values;
  std::vector<std::string> paths;
  bool check = false;

  auto* run = app.add_subcommand("run", "run a scenario and report blocking times");
  run->add_option("scenario", scenario_path, "scenario json")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--trace", trace_out, "write the trace to this jsonl file");
  run->add_flag("--check", check, "run all audits after the run");

  auto* chk = app.add_subcommand("check", "audit a previously written trace");
  chk->add_option("trace", trace_path, "trace jsonl")->required();
  chk->add_option("scenario", scenario_path, "scenario json it came from")->required();

  auto* sweep = app.add_subcommand("sweep", "rerun a scenario across parameter values");
  sweep->add_option("scenario", scenario_path, "scenario json")->required();
  sweep->add_option("--param", param, "promise | status_period | seed");
  sweep->add_option("--values", values, "values to sweep");
  sweep->add_option("--seeds", seeds, "seeds per value");

  auto* table = app.add_subcommand("table", "blocking-time table for a set of scenarios");
  table->add_option("scenarios", paths, "scenario json files")->required();

  CLI11_PARSE(app, argc, argv);

  if (seed < 0) {
    if (const char* env = std::getenv("LEASESIM_SEED")) seed = std::atoll(env);
  }

  try {
    if (run->parsed()) return cmd_run(scenario_path, seed, trace_out, check);
    if (chk->parsed()) return cmd_check(trace_path, scenario_path);
    if (sweep->parsed()) return cmd_sweep(scenario_path, param, values, seeds);
    if (table->parsed()) return cmd_table(paths);
  } catch (const leasesim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
