#include "leasesim/sim.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <random>

#include "leasesim/kernel.hpp"
#include "leasesim/leader_election.hpp"
#include "leasesim/messages.hpp"
#include "leasesim/protocol.hpp"

namespace leasesim {

namespace {

bool rule_matches(const LinkRule& r, ProcId from, ProcId to, const std::string& kind, Tick rt) {
  if (r.from >= 0 && r.from != from) return false;
  if (r.to >= 0 && r.to != to) return false;
  if (!r.kind.empty() && r.kind != kind) return false;
  return rt >= r.from_rt && rt < r.to_rt;
}

void fill_send_fields(TraceRec& r, const Message& m) {
  if (const auto* op = std::get_if<OpRequestMsg>(&m)) {
    r.op = op_to_string(op->op);
  } else if (const auto* eq = std::get_if<EstRequestMsg>(&m)) {
    r.t = eq->t;
  } else if (const auto* er = std::get_if<EstReplyMsg>(&m)) {
    r.t = er->t;
    r.j = er->est.index;
    r.s = er->est.ts;
    for (const auto& o : er->est.ops) r.ops.push_back(op_to_string(o));
  } else if (const auto* pr = std::get_if<PrepareMsg>(&m)) {
    r.t = pr->t;
    r.j = pr->j;
    r.s = pr->promise;
    for (const auto& o : pr->ops) r.ops.push_back(op_to_string(o));
  } else if (const auto* pk = std::get_if<PAckMsg>(&m)) {
    r.t = pk->t;
    r.j = pk->j;
  } else if (const auto* cl = std::get_if<CommitLeaseMsg>(&m)) {
    r.j = cl->j;
    r.s = cl->b.promise;
    for (const auto& o : cl->b.ops) r.ops.push_back(op_to_string(o));
    r.b = cl->lease.batch;
    r.tstar = cl->lease.start;
    for (ProcId q : cl->holders) r.idxs.push_back(q);
  } else if (const auto* mg = std::get_if<MyGapsMsg>(&m)) {
    r.idxs = mg->gaps;
  } else if (const auto* mb = std::get_if<MyBatchMsg>(&m)) {
    r.j = mb->j;
    r.s = mb->b.promise;
    for (const auto& o : mb->b.ops) r.ops.push_back(op_to_string(o));
  } else if (const auto* hb = std::get_if<HeartbeatMsg>(&m)) {
    r.s = hb->clock;
  }
}

struct Sim {
  const Scenario& sc;
  Kernel kernel;
  std::unique_ptr<ArbiterProvider> arbiter;
  std::unique_ptr<HeartbeatProvider> heartbeat;
  LeadershipProvider* provider = nullptr;
  std::vector<std::unique_ptr<Proc>> procs;
  std::vector<bool> crashed;
  Trace trace;

  std::int64_t next_mid = 0;
  std::int64_t next_ticket = 0;
  std::map<std::pair<ProcId, ProcId>, Tick> fifo_last;

  struct GenState {
    GenSpec spec;
    std::int64_t issued = 0;
  };
  std::vector<GenState> gens;
  std::map<std::int64_t, int> ticket_gen;

  explicit Sim(const Scenario& s)
      : sc(s), kernel(s.n, s.clock_offsets, s.seed), crashed(s.n, false) {
    trace.seed = s.seed;
    trace.scenario_name = s.name;
    if (s.leadership.provider == "arbiter") {
      std::vector<LeadershipSegment> segs;
      for (const auto& seg : s.leadership.segments)
        segs.push_back(LeadershipSegment{seg.start, seg.holder});
      arbiter = std::make_unique<ArbiterProvider>(segs);
      provider = arbiter.get();
    } else {
      heartbeat = std::make_unique<HeartbeatProvider>(s.n, s.leadership.timeout);
      provider = heartbeat.get();
    }

    const ObjectType& obj = object_type(s.object);
    for (ProcId p = 0; p < s.n; ++p) {
      Proc::Hooks hooks;
      hooks.send = [this, p](ProcId to, const Message& m) { send(p, to, m); };
      hooks.am_leader = [this, p](Tick t1, Tick t2) {
        return provider->am_leader(p, t1, t2, kernel.clock(p));
      };
      hooks.leader_hint = [this, p] { return provider->leader_hint(p, kernel.clock(p)); };
      hooks.trace = [this](TraceRec r) { trace.recs.push_back(std::move(r)); };
      hooks.on_done = [this](std::int64_t ticket, const OpResult& res) { on_done(ticket, res); };
      procs.push_back(std::make_unique<Proc>(kernel, p, s.n, obj, s.params, std::move(hooks),
                                             s.mutations));
    }
  }

  void count(const std::string& key) { trace.counters[key] += 1; }

  Tick draw_uniform(Tick lo, Tick hi) {
    std::uniform_int_distribution<Tick> d(lo, hi);
    return d(kernel.rng());
  }

  // delay resolution: explicit link rules, then nice periods, then defaults;
  // only randomly drawn delays are FIFO-clamped, scripted ones stand as given
  void send(ProcId from, ProcId to, const Message& m) {
    Tick rt = kernel.now();
    std::string kind = message_kind(m, sc.params.algorithm == 2);
    std::int64_t mid = next_mid++;
    {
      TraceRec r;
      r.ev = "send";
      r.rt = rt;
      r.p = from;
      r.peer = to;
      r.kind = kind;
      r.mid = mid;
      fill_send_fields(r, m);
      trace.recs.push_back(std::move(r));
    }
    count("send." + kind);

    if (to == from) {
      schedule_delivery(from, to, m, kind, mid, rt);
      return;
    }

    Tick deliver_rt;
    bool scripted = false;
    if (rt < sc.net.gst) {
      const LinkRule* rule = nullptr;
      for (const auto& lr : sc.net.pre.links)
        if (rule_matches(lr, from, to, kind, rt)) {
          rule = &lr;
          break;
        }
      if (rule) {
        deliver_rt = rt + rule->delay;
        scripted = true;
      } else {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        if (u01(kernel.rng()) < sc.net.pre.loss) {
          TraceRec r;
          r.ev = "drop";
          r.rt = rt;
          r.p = from;
          r.peer = to;
          r.kind = kind;
          r.mid = mid;
          trace.recs.push_back(std::move(r));
          count("drop." + kind);
          return;
        }
        deliver_rt = rt + draw_uniform(sc.net.pre.delay_min, sc.net.pre.delay_max);
      }
    } else {
      const LinkRule* rule = nullptr;
      for (const auto& lr : sc.net.links)
        if (rule_matches(lr, from, to, kind, rt)) {
          rule = &lr;
          break;
        }
      const NicePeriod* window = nullptr;
      if (!rule)
        for (const auto& w : sc.net.nice_periods)
          if (rt >= w.start && rt < w.end) {
            window = &w;
            break;
          }
      if (!rule && window)
        for (const auto& lr : window->links)
          if (rule_matches(lr, from, to, kind, rt)) {
            rule = &lr;
            break;
          }
      if (rule) {
        deliver_rt = rt + rule->delay;
        scripted = true;
      } else if (window) {
        Tick d = window->delay < 0 ? sc.net.nice_delay_true : window->delay;
        deliver_rt = rt + d;
        scripted = true;
      } else if (sc.net.post_fixed) {
        deliver_rt = rt + sc.net.post_delay;
        scripted = true;
      } else {
        deliver_rt = rt + draw_uniform(1, sc.net.delay_true);
      }
    }

    if (!scripted && rt >= sc.net.fifo_after) {
      auto& last = fifo_last[{from, to}];
      deliver_rt = std::max(deliver_rt, last);
      last = deliver_rt;
    }
    schedule_delivery(from, to, m, kind, mid, deliver_rt);
  }

  void schedule_delivery(ProcId from, ProcId to, Message m, std::string kind, std::int64_t mid,
                         Tick rt) {
    kernel.schedule(rt, [this, from, to, m = std::move(m), kind = std::move(kind), mid] {
      if (crashed[to]) return;
      TraceRec r;
      r.ev = "recv";
      r.rt = kernel.now();
      r.p = to;
      r.peer = from;
      r.kind = kind;
      r.mid = mid;
      trace.recs.push_back(std::move(r));
      if (std::holds_alternative<HeartbeatMsg>(m)) {
        if (heartbeat) heartbeat->on_heartbeat(from, to, kernel.clock(to));
        kernel.notify(to);
        return;
      }
      procs[to]->deliver(from, m);
    });
  }

  void enqueue(ProcId p, const std::string& kind, int gen_idx) {
    if (crashed[p]) return;
    std::int64_t ticket = next_ticket++;
    ticket_gen[ticket] = gen_idx;
    TraceRec r;
    r.ev = "op_enq";
    r.rt = kernel.now();
    r.p = p;
    r.kind = kind;
    r.ticket = ticket;
    trace.recs.push_back(std::move(r));
    procs[p]->submit(kind, ticket);
  }

  void fire_generator(int gi) {
    GenState& g = gens[gi];
    if (g.issued >= g.spec.count) return;
    const std::string& kind = g.spec.kinds[g.issued % g.spec.kinds.size()];
    g.issued += 1;
    enqueue(g.spec.p, kind, gi);
  }

  void on_done(std::int64_t ticket, const OpResult&) {
    auto it = ticket_gen.find(ticket);
    if (it == ticket_gen.end() || it->second < 0) return;
    int gi = it->second;
    if (gens[gi].spec.think == 0)
      fire_generator(gi);
    else
      kernel.schedule(kernel.now() + gens[gi].spec.think, [this, gi] { fire_generator(gi); });
  }

  void run() {
    for (const auto& c : sc.crashes) {
      kernel.schedule(c.rt, [this, p = c.p] {
        crashed[p] = true;
        TraceRec r;
        r.ev = "crash";
        r.rt = kernel.now();
        r.p = p;
        trace.recs.push_back(std::move(r));
        procs[p]->crash();
      });
    }
    for (const auto& o : sc.workload.ops)
      kernel.schedule(o.rt, [this, p = o.p, kind = o.kind] { enqueue(p, kind, -1); });
    for (const auto& g : sc.workload.generators) {
      int gi = static_cast<int>(gens.size());
      gens.push_back(GenState{g, 0});
      kernel.schedule(g.start, [this, gi] { fire_generator(gi); });
    }
    if (heartbeat) {
      for (ProcId p = 0; p < sc.n; ++p) schedule_heartbeat(p);
    }
    for (auto& pr : procs) pr->start();
    kernel.run_until(sc.horizon);

    auto grants = provider->grants();
    std::sort(grants.begin(), grants.end(), [](const GrantEntry& a, const GrantEntry& b) {
      return std::tie(a.t1, a.p, a.t2) < std::tie(b.t1, b.p, b.t2);
    });
    for (const auto& g : grants) {
      TraceRec r;
      r.ev = "grant";
      r.rt = sc.horizon;
      r.p = g.p;
      r.t = g.t1;
      r.t2 = g.t2;
      trace.recs.push_back(std::move(r));
    }
    trace.end_rt = sc.horizon;
  }

  void schedule_heartbeat(ProcId p) {
    kernel.schedule(kernel.now() + sc.leadership.period, [this, p] {
      if (!crashed[p]) {
        heartbeat->on_self_tick(p, kernel.clock(p));
        kernel.notify(p);
        for (ProcId q = 0; q < sc.n; ++q)
          if (q != p) send(p, q, HeartbeatMsg{kernel.clock(p)});
      }
      schedule_heartbeat(p);
    });
  }
};

}  // namespace

Trace run_scenario(const Scenario& s) {
  validate_scenario(s);
  Sim sim(s);
  sim.run();
  return std::move(sim.trace);
}

}  // namespace leasesim
