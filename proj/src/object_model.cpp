#include "leasesim/object_model.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace leasesim {

std::string op_to_string(const Operation& op) {
  std::ostringstream os;
  os << op.id.issuer << "|" << op.id.seq << "|" << op.kind;
  return os.str();
}

Operation op_from_string(const std::string& s) {
  auto a = s.find('|');
  auto b = s.find('|', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw ConfigError("bad operation encoding: " + s);
  Operation op;
  op.id.issuer = static_cast<ProcId>(std::stol(s.substr(0, a)));
  op.id.seq = std::stoll(s.substr(a + 1, b - a - 1));
  op.kind = s.substr(b + 1);
  return op;
}

std::string result_to_string(const OpResult& r) {
  return r.ack ? "ack" : std::to_string(r.value);
}

bool ObjectType::is_read(const std::string& kind) const {
  for (const auto& k : op_kinds())
    if (k.name == kind) return k.is_read;
  throw ConfigError("unknown op kind '" + kind + "' for object " + name());
}

bool ObjectType::valid_kind(const std::string& kind) const {
  for (const auto& k : op_kinds())
    if (k.name == kind) return true;
  return false;
}

namespace {

// register over {0..3}: read / write:v / noop
class SmallRegister final : public ObjectType {
 public:
  SmallRegister() {
    kinds_.push_back({"read", true});
    for (int v = 0; v <= 3; ++v) kinds_.push_back({"write:" + std::to_string(v), false});
    kinds_.push_back({kNoOpKind, false});
  }
  const std::string& name() const override { return name_; }
  ObjState initial_state() const override { return 0; }
  const std::vector<OpKindInfo>& op_kinds() const override { return kinds_; }
  std::pair<ObjState, OpResult> apply(ObjState s, const std::string& kind) const override {
    if (kind == "read") return {s, {false, s}};
    if (kind == kNoOpKind) return {s, {true, 0}};
    if (kind.rfind("write:", 0) == 0) {
      ObjState v = std::stoll(kind.substr(6));
      return {v, {true, 0}};
    }
    throw ConfigError("register: unknown kind " + kind);
  }
  bool conflicts(const std::string& read_kind, const std::string& update_kind) const override {
    if (read_kind != "read") return false;
    return update_kind.rfind("write:", 0) == 0;  // a write may change any prior value
  }

 private:
  std::string name_ = "register";
  std::vector<OpKindInfo> kinds_;
};

// fetch-and-increment counter: read / inc / noop. inc returns the old value.
class Counter final : public ObjectType {
 public:
  Counter() { kinds_ = {{"read", true}, {"inc", false}, {kNoOpKind, false}}; }
  const std::string& name() const override { return name_; }
  ObjState initial_state() const override { return 0; }
  const std::vector<OpKindInfo>& op_kinds() const override { return kinds_; }
  std::pair<ObjState, OpResult> apply(ObjState s, const std::string& kind) const override {
    if (kind == "read") return {s, {false, s}};
    if (kind == "inc") return {s + 1, {false, s}};
    if (kind == kNoOpKind) return {s, {true, 0}};
    throw ConfigError("counter: unknown kind " + kind);
  }
  bool conflicts(const std::string& read_kind, const std::string& update_kind) const override {
    return read_kind == "read" && update_kind == "inc";
  }

 private:
  std::string name_ = "counter";
  std::vector<OpKindInfo> kinds_;
};

// compare-and-swap cell over {0..2}: read / cas:a:b / noop. cas reports success.
class CasCell final : public ObjectType {
 public:
  CasCell() {
    kinds_.push_back({"read", true});
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b)
        kinds_.push_back({"cas:" + std::to_string(a) + ":" + std::to_string(b), false});
    kinds_.push_back({kNoOpKind, false});
  }
  const std::string& name() const override { return name_; }
  ObjState initial_state() const override { return 0; }
  const std::vector<OpKindInfo>& op_kinds() const override { return kinds_; }
  std::pair<ObjState, OpResult> apply(ObjState s, const std::string& kind) const override {
    if (kind == "read") return {s, {false, s}};
    if (kind == kNoOpKind) return {s, {true, 0}};
    if (kind.rfind("cas:", 0) == 0) {
      auto c = kind.find(':', 4);
      ObjState a = std::stoll(kind.substr(4, c - 4));
      ObjState b = std::stoll(kind.substr(c + 1));
      if (s == a) return {b, {false, 1}};
      return {s, {false, 0}};
    }
    throw ConfigError("cas: unknown kind " + kind);
  }
  bool conflicts(const std::string& read_kind, const std::string& update_kind) const override {
    if (read_kind != "read") return false;
    if (update_kind.rfind("cas:", 0) != 0) return false;
    auto c = update_kind.find(':', 4);
    // cas:a:b changes the cell iff it can fire with a != b
    return update_kind.substr(4, c - 4) != update_kind.substr(c + 1);
  }

 private:
  std::string name_ = "cas";
  std::vector<OpKindInfo> kinds_;
};

const std::map<std::string, std::shared_ptr<const ObjectType>>& registry() {
  static const auto* m = new std::map<std::string, std::shared_ptr<const ObjectType>>{
      {"register", std::make_shared<SmallRegister>()},
      {"counter", std::make_shared<Counter>()},
      {"cas", std::make_shared<CasCell>()},
  };
  return *m;
}

}  // namespace

const ObjectType& object_type(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("unknown object type '" + name + "'");
  return *it->second;
}

std::vector<std::string> object_type_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

bool conflicts_by_enumeration(const ObjectType& t, const std::string& read_kind,
                              const std::string& update_kind) {
  if (!t.is_read(read_kind) || t.is_read(update_kind)) return false;
  // reachable states, bounded exploration (object states here are tiny)
  std::set<ObjState> seen{t.initial_state()};
  std::vector<ObjState> frontier{t.initial_state()};
  while (!frontier.empty() && seen.size() < 10000) {
    ObjState s = frontier.back();
    frontier.pop_back();
    for (const auto& k : t.op_kinds()) {
      ObjState ns = t.apply(s, k.name).first;
      if (seen.insert(ns).second) frontier.push_back(ns);
    }
  }
  for (ObjState s : seen) {
    ObjState after = t.apply(s, update_kind).first;
    if (t.apply(s, read_kind).second != t.apply(after, read_kind).second) return true;
  }
  return false;
}

}  // namespace leasesim
