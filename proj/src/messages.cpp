#include "leasesim/messages.hpp"

namespace leasesim {

std::string message_kind(const Message& m, bool status_tag) {
  struct V {
    bool status;
    std::string operator()(const OpRequestMsg&) const { return "op_request"; }
    std::string operator()(const EstRequestMsg&) const { return "est_request"; }
    std::string operator()(const EstReplyMsg&) const { return "est_reply"; }
    std::string operator()(const PrepareMsg&) const { return status ? "status" : "prepare"; }
    std::string operator()(const PAckMsg&) const { return "pack"; }
    std::string operator()(const CommitLeaseMsg&) const { return "commit_lease"; }
    std::string operator()(const RequestLeaseMsg&) const { return "request_lease"; }
    std::string operator()(const MyGapsMsg&) const { return "my_gaps"; }
    std::string operator()(const MyBatchMsg&) const { return "my_batch"; }
    std::string operator()(const HeartbeatMsg&) const { return "heartbeat"; }
  };
  return std::visit(V{status_tag}, m);
}

}  // namespace leasesim
