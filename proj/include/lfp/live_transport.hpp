#pragma once

#include <memory>

#include "lfp/probe.hpp"

namespace lfp {

// Raw-socket transport for live measurement. Construction probes for the
// raw-packet privilege and throws CapabilityError naming it when absent, so
// unprivileged runs fail before anything is sent. One probe in flight at a
// time; replies are matched on identifiers (ICMP id/seq, TCP 4-tuple, the
// quoted inner header for port unreachables).
class LiveTransport : public Transport {
 public:
  LiveTransport();   // throws CapabilityError / TransportFatalError
  ~LiveTransport() override;

  ResponseRecord exchange(const ProbeRecord& probe, const ProbePlanConfig& cfg) override;
  Clock& clock() override { return clock_; }
  std::string describe() const override { return "live"; }

  LiveTransport(const LiveTransport&) = delete;
  LiveTransport& operator=(const LiveTransport&) = delete;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  WallClock clock_;
};

}  // namespace lfp
