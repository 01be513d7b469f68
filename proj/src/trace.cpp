#include "leasesim/trace.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace leasesim {

namespace {

void esc(std::ostream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      default: os << c;
    }
  }
  os << '"';
}

struct FieldWriter {
  std::ostream& os;
  bool first = true;
  void sep() {
    if (!first) os << ',';
    first = false;
  }
  void str(const char* k, const std::string& v) {
    sep();
    os << '"' << k << "\":";
    esc(os, v);
  }
  void num(const char* k, std::int64_t v) {
    sep();
    os << '"' << k << "\":" << v;
  }
  void nums(const char* k, const std::vector<std::int64_t>& v) {
    sep();
    os << '"' << k << "\":[";
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ']';
  }
  void strs(const char* k, const std::vector<std::string>& v) {
    sep();
    os << '"' << k << "\":[";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) os << ',';
      esc(os, v[i]);
    }
    os << ']';
  }
};

void write_rec(std::ostream& os, const TraceRec& r) {
  os << '{';
  FieldWriter w{os};
  w.str("ev", r.ev);
  w.num("rt", r.rt);
  if (r.p != -1) w.num("p", r.p);
  if (r.peer != -1) w.num("peer", r.peer);
  if (!r.kind.empty()) w.str("kind", r.kind);
  if (r.mid != -1) w.num("mid", r.mid);
  if (r.t != kAlways) w.num("t", r.t);
  if (r.j != kAlways) w.num("j", r.j);
  if (r.s != kAlways) w.num("s", r.s);
  if (r.b != kAlways) w.num("b", r.b);
  if (!r.idxs.empty()) w.nums("idxs", r.idxs);
  if (!r.ops.empty()) w.strs("ops", r.ops);
  if (!r.op.empty()) w.str("op", r.op);
  if (!r.cls.empty()) w.str("cls", r.cls);
  if (!r.val.empty()) w.str("val", r.val);
  if (r.te != kAlways) w.num("te", r.te);
  if (r.khat != kAlways) w.num("khat", r.khat);
  if (r.kstar != kAlways) w.num("kstar", r.kstar);
  if (r.tstar != kAlways) w.num("tstar", r.tstar);
  if (r.tprime != kAlways) w.num("tprime", r.tprime);
  if (r.tp_rt != kAlways) w.num("tp_rt", r.tp_rt);
  if (r.ticket != -1) w.num("ticket", r.ticket);
  if (!r.via.empty()) w.str("via", r.via);
  if (r.state != kAlways) w.num("state", r.state);
  if (r.t2 != kAlways) w.num("t2", r.t2);
  os << "}\n";
}

}  // namespace

void write_jsonl(const Trace& t, std::ostream& os) {
  os << "{\"ev\":\"meta\",\"schema\":";
  esc(os, t.schema);
  os << ",\"seed\":" << t.seed << ",\"scenario\":";
  esc(os, t.scenario_name);
  os << "}\n";
  for (const auto& r : t.recs) write_rec(os, r);
  os << "{\"ev\":\"end\",\"rt\":" << t.end_rt << ",\"counters\":{";
  bool first = true;
  for (const auto& [k, v] : t.counters) {
    if (!first) os << ',';
    first = false;
    esc(os, k);
    os << ':' << v;
  }
  os << "}}\n";
}

std::string to_jsonl(const Trace& t) {
  std::ostringstream os;
  write_jsonl(t, os);
  return os.str();
}

void write_jsonl_file(const Trace& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  write_jsonl(t, f);
}

namespace {

using nlohmann::json;

std::int64_t geti(const json& j, const char* k, std::int64_t dflt) {
  auto it = j.find(k);
  return it == j.end() ? dflt : it->get<std::int64_t>();
}
std::string gets(const json& j, const char* k) {
  auto it = j.find(k);
  return it == j.end() ? std::string{} : it->get<std::string>();
}

}  // namespace

namespace {

void decode_rec(const json& j, Trace& t, bool& saw_meta, bool& saw_end) {
  std::string ev = j.at("ev").get<std::string>();
  if (ev == "meta") {
    t.schema = gets(j, "schema");
    t.seed = j.at("seed").get<std::uint64_t>();
    t.scenario_name = gets(j, "scenario");
    saw_meta = true;
    return;
  }
  if (ev == "end") {
    t.end_rt = geti(j, "rt", 0);
    if (j.contains("counters"))
      for (auto& [k, v] : j.at("counters").items())
        t.counters[k] = v.get<std::int64_t>();
    saw_end = true;
    return;
  }
  TraceRec r;
  r.ev = ev;
  r.rt = geti(j, "rt", 0);
  r.p = static_cast<ProcId>(geti(j, "p", -1));
  r.peer = static_cast<ProcId>(geti(j, "peer", -1));
  r.kind = gets(j, "kind");
  r.mid = geti(j, "mid", -1);
  r.t = geti(j, "t", kAlways);
  r.j = geti(j, "j", kAlways);
  r.s = geti(j, "s", kAlways);
  r.b = geti(j, "b", kAlways);
  if (j.contains("idxs"))
    for (auto& v : j.at("idxs")) r.idxs.push_back(v.get<std::int64_t>());
  if (j.contains("ops"))
    for (auto& v : j.at("ops")) r.ops.push_back(v.get<std::string>());
  r.op = gets(j, "op");
  r.cls = gets(j, "cls");
  r.val = gets(j, "val");
  r.te = geti(j, "te", kAlways);
  r.khat = geti(j, "khat", kAlways);
  r.kstar = geti(j, "kstar", kAlways);
  r.tstar = geti(j, "tstar", kAlways);
  r.tprime = geti(j, "tprime", kAlways);
  r.tp_rt = geti(j, "tp_rt", kAlways);
  r.ticket = geti(j, "ticket", -1);
  r.via = gets(j, "via");
  r.state = geti(j, "state", kAlways);
  r.t2 = geti(j, "t2", kAlways);
  t.recs.push_back(std::move(r));
}

}  // namespace

Trace read_jsonl(std::istream& is) {
  Trace t;
  std::string line;
  std::int64_t lineno = 0;
  bool saw_meta = false, saw_end = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("ev"))
      throw ConfigError("trace line " + std::to_string(lineno) + " is not a trace record");
    try {
      decode_rec(j, t, saw_meta, saw_end);
    } catch (const json::exception& e) {
      throw ConfigError("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!saw_meta || !saw_end) throw ConfigError("trace file missing meta or end record");
  return t;
}

Trace read_jsonl_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  return read_jsonl(f);
}

}  // namespace leasesim
