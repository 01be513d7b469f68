#pragma once

#include <string>
#include <utility>
#include <vector>

#include "leasesim/types.hpp"

namespace leasesim {

// Replicated object state is a small integer so histories stay brute-forceable.
using ObjState = std::int64_t;

struct OpResult {
  bool ack = false;  // true: acknowledgment only, no value
  std::int64_t value = 0;
  bool operator==(const OpResult&) const = default;
};

std::string result_to_string(const OpResult& r);

struct OpKindInfo {
  std::string name;
  bool is_read = false;
};

// A deterministic sequential object: state transition plus a static conflict
// relation between read kinds and update kinds. Reads never change state.
class ObjectType {
 public:
  virtual ~ObjectType() = default;
  virtual const std::string& name() const = 0;
  virtual ObjState initial_state() const = 0;
  virtual const std::vector<OpKindInfo>& op_kinds() const = 0;
  virtual std::pair<ObjState, OpResult> apply(ObjState s, const std::string& kind) const = 0;
  // conflicts(r, u): does update kind u ever change the value that read kind r
  // reports, from some reachable state? Read kinds never conflict with reads.
  virtual bool conflicts(const std::string& read_kind, const std::string& update_kind) const = 0;

  bool is_read(const std::string& kind) const;
  bool valid_kind(const std::string& kind) const;
};

// Updates that are pure acknowledgments; used to fill otherwise-empty batches.
inline constexpr const char* kNoOpKind = "noop";

const ObjectType& object_type(const std::string& name);  // throws ConfigError
std::vector<std::string> object_type_names();

// Reference conflict oracle: enumerates reachable states by BFS and checks
// whether the update changes the read's report anywhere. Slow; used by tests
// to pin down the hand-written conflict tables.
bool conflicts_by_enumeration(const ObjectType& t, const std::string& read_kind,
                              const std::string& update_kind);

}  // namespace leasesim
