#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "leasesim/analysis.hpp"

using namespace leasesim;

namespace {

HistOp ho(ProcId issuer, std::int64_t seq, const std::string& kind, Tick start, Tick done,
          const std::string& val = "", std::int64_t khat = kAlways) {
  HistOp o;
  o.op = Operation{OpId{issuer, seq}, kind};
  o.p = issuer;
  o.start_rt = start;
  o.done_rt = done;
  o.is_read = kind == "read";
  o.value = val;
  o.khat = khat;
  return o;
}

History hist(std::string object, std::vector<HistOp> ops) {
  History h;
  h.object = std::move(object);
  h.ops = std::move(ops);
  return h;
}

}  // namespace

TEST_CASE("exhaustive search accepts both outcomes of a concurrent read/write") {
  auto w = ho(0, 1, "write:2", 0, 10, "ack");
  CHECK(brute_force_linearizable(hist("register", {w, ho(1, 1, "read", 5, 8, "0")})));
  CHECK(brute_force_linearizable(hist("register", {w, ho(1, 1, "read", 5, 8, "2")})));
  CHECK(!brute_force_linearizable(hist("register", {w, ho(1, 1, "read", 5, 8, "7")})));
}

TEST_CASE("exhaustive search rejects a stale read after a completed write") {
  auto w = ho(0, 1, "write:2", 0, 10, "ack");
  CHECK(!brute_force_linearizable(hist("register", {w, ho(1, 1, "read", 20, 25, "0")})));
  CHECK(brute_force_linearizable(hist("register", {w, ho(1, 1, "read", 20, 25, "2")})));
}

TEST_CASE("exhaustive search rejects a lost update between two successful cas") {
  auto a = ho(0, 1, "cas:0:1", 0, 10, "1");
  auto b = ho(1, 1, "cas:0:2", 20, 30, "1");  // must have failed in any order
  CHECK(!brute_force_linearizable(hist("cas", {a, b})));
  auto b2 = ho(1, 1, "cas:0:2", 20, 30, "0");
  CHECK(brute_force_linearizable(hist("cas", {a, b2})));
}

TEST_CASE("exhaustive search rejects reads that travel back in time") {
  auto i1 = ho(0, 1, "inc", 0, 5, "0");
  auto i2 = ho(0, 2, "inc", 10, 15, "1");
  auto r1 = ho(1, 1, "read", 20, 22, "2");
  auto r2 = ho(2, 1, "read", 25, 27, "1");  // saw fewer incs than the earlier read
  CHECK(!brute_force_linearizable(hist("counter", {i1, i2, r1, r2})));
  auto r2ok = ho(2, 1, "read", 25, 27, "2");
  CHECK(brute_force_linearizable(hist("counter", {i1, i2, r1, r2ok})));
}

TEST_CASE("an operation that never completed may or may not have taken effect") {
  auto w = ho(0, 1, "write:2", 0, kNever);
  CHECK(brute_force_linearizable(hist("register", {w, ho(1, 1, "read", 10, 12, "0")})));
  CHECK(brute_force_linearizable(hist("register", {w, ho(1, 1, "read", 10, 12, "2")})));
  CHECK(!brute_force_linearizable(hist("register", {w, ho(1, 1, "read", 10, 12, "3")})));
}

TEST_CASE("histories beyond the search cap are refused loudly") {
  std::vector<HistOp> ops;
  for (int i = 0; i < 13; ++i) ops.push_back(ho(0, i + 1, "read", 2 * i, 2 * i + 1, "0"));
  CHECK_THROWS_AS(brute_force_linearizable(hist("register", ops)), ConfigError);
  ops.pop_back();
  CHECK(brute_force_linearizable(hist("register", ops)));
}

// ---- witness fixtures: traces with committed batches plus client histories

namespace {

void lock_rec(Trace& t, ProcId p, Tick rt, Tick lt, std::int64_t j, Tick s,
              std::vector<std::string> ops) {
  TraceRec r;
  r.ev = "lock";
  r.rt = rt;
  r.p = p;
  r.t = lt;
  r.j = j;
  r.s = s;
  r.ops = std::move(ops);
  r.via = "fresh";
  t.recs.push_back(r);
}

void op_recs(Trace& t, ProcId p, const std::string& enc, const std::string& cls, Tick start,
             Tick done, const std::string& val = "", std::int64_t khat = kAlways) {
  TraceRec s;
  s.ev = "op_start";
  s.rt = start;
  s.p = p;
  s.op = enc;
  s.cls = cls;
  s.ticket = 1;
  t.recs.push_back(s);
  if (done == kNever) return;
  TraceRec d = s;
  d.ev = "op_done";
  d.rt = done;
  d.val = val;
  d.khat = khat;
  t.recs.push_back(d);
}

}  // namespace

TEST_CASE("witness accepts a clean write-then-read trace") {
  Trace t;
  lock_rec(t, 0, 5, 0, 1, 5, {"0|1|write:2"});
  op_recs(t, 0, "0|1|write:2", "rmw", 1, 10, "ack");
  op_recs(t, 1, "1|1|read", "read", 20, 21, "2", 1);
  CHECK(check_linearizable_witness(t, "register").empty());
}

TEST_CASE("witness flags a read served from before a conflicting completed write") {
  Trace t;
  lock_rec(t, 0, 5, 0, 1, 5, {"0|1|write:2"});
  op_recs(t, 0, "0|1|write:2", "rmw", 1, 10, "ack");
  op_recs(t, 1, "1|1|read", "read", 20, 21, "0", 0);  // khat 0: pre-write state
  auto vs = check_linearizable_witness(t, "register");
  REQUIRE(!vs.empty());
  CHECK(vs[0].detail.find("conflicting update") != std::string::npos);
}

TEST_CASE("witness flags a read value that contradicts its own batch point") {
  Trace t;
  lock_rec(t, 0, 5, 0, 1, 5, {"0|1|write:2"});
  op_recs(t, 0, "0|1|write:2", "rmw", 1, 10, "ack");
  op_recs(t, 1, "1|1|read", "read", 20, 21, "0", 1);
  auto vs = check_linearizable_witness(t, "register");
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].detail.find("returned 0 but state after batch 1") != std::string::npos);
}

TEST_CASE("witness flags updates whose batch order inverts real time") {
  Trace t;
  lock_rec(t, 0, 5, 0, 1, 3, {"1|1|inc"});
  lock_rec(t, 0, 6, 0, 2, 4, {"0|1|inc"});
  op_recs(t, 0, "0|1|inc", "rmw", 1, 10, "1");   // batch 2, replay reply 1
  op_recs(t, 1, "1|1|inc", "rmw", 20, 25, "0");  // batch 1, yet started after
  auto vs = check_linearizable_witness(t, "counter");
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].detail.find("started after") != std::string::npos);
  // the exhaustive checker agrees once responses pin the order
  CHECK(!brute_force_linearizable(extract_history(t, "counter")));
}

TEST_CASE("witness flags read points that invert real time") {
  Trace t;
  lock_rec(t, 0, 2, 0, 1, 2, {"0|1|inc"});
  lock_rec(t, 0, 3, 0, 2, 3, {"0|2|inc"});
  op_recs(t, 0, "0|1|inc", "rmw", 1, kNever);  // in-flight: no precedence forcing
  op_recs(t, 0, "0|2|inc", "rmw", 6, kNever);
  op_recs(t, 1, "1|1|read", "read", 20, 22, "2", 2);
  op_recs(t, 2, "2|1|read", "read", 25, 27, "1", 1);
  auto vs = check_linearizable_witness(t, "counter");
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].check == "witness");
  CHECK(vs[0].detail.find("started after read") != std::string::npos);
  CHECK(!brute_force_linearizable(extract_history(t, "counter")));
}

TEST_CASE("witness reports batch disagreement before attempting placement") {
  Trace t;
  lock_rec(t, 0, 5, 0, 1, 5, {"0|1|write:2"});
  TraceRec r;
  r.ev = "batch";
  r.rt = 7;
  r.p = 1;
  r.j = 1;
  r.s = 5;
  r.ops = {"0|1|write:3"};
  r.via = "commit";
  t.recs.push_back(r);
  auto vs = check_linearizable_witness(t, "register");
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].check == "batch_agreement");
}

TEST_CASE("witness refuses a trace with a hole in the batch sequence") {
  Trace t;
  lock_rec(t, 0, 5, 0, 2, 5, {"0|1|write:2"});  // no batch 1 anywhere
  auto vs = check_linearizable_witness(t, "register");
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].detail.find("gap") != std::string::npos);
}
