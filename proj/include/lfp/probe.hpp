#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lfp/net.hpp"
#include "lfp/snmp.hpp"
#include "lfp/util.hpp"

namespace lfp {

enum class Protocol { Icmp, Tcp, Udp, Snmpv3 };

std::string protocol_name(Protocol p);
Protocol protocol_from_name(std::string_view name);  // throws ParseError

// The three transport protocols as a small set type. The SNMPv3 probe is
// tracked separately and never takes part in responsiveness.
class ProtocolSet {
 public:
  constexpr ProtocolSet() = default;
  static ProtocolSet of(std::initializer_list<Protocol> ps) {
    ProtocolSet s;
    for (Protocol p : ps) s.add(p);
    return s;
  }
  static constexpr ProtocolSet full() {
    ProtocolSet s;
    s.bits_ = 0b111;
    return s;
  }

  void add(Protocol p) { bits_ |= bit(p); }
  bool contains(Protocol p) const { return bits_ & bit(p); }
  bool contains_all(ProtocolSet other) const { return (bits_ & other.bits_) == other.bits_; }
  bool empty() const { return bits_ == 0; }
  bool is_full() const { return bits_ == 0b111; }
  int count() const { return ((bits_ >> 2) & 1) + ((bits_ >> 1) & 1) + (bits_ & 1); }

  std::vector<Protocol> protocols() const;
  std::vector<std::string> names() const;        // {"icmp","tcp","udp"} order
  static ProtocolSet from_names(std::span<const std::string> names);
  std::string label() const;                     // e.g. "icmp+tcp"

  auto operator<=>(const ProtocolSet&) const = default;

 private:
  static constexpr unsigned bit(Protocol p) {
    switch (p) {
      case Protocol::Icmp: return 0b001;
      case Protocol::Tcp: return 0b010;
      case Protocol::Udp: return 0b100;
      default: return 0;
    }
  }
  unsigned bits_ = 0;
};

enum class ProbeKind { IcmpEcho, TcpAck, TcpSyn, UdpZero, Snmpv3Get };

std::string probe_kind_name(ProbeKind k);
ProbeKind probe_kind_from_name(std::string_view name);  // throws ParseError

struct ProbePlanConfig {
  std::uint16_t tcp_udp_port = 33533;
  int icmp_payload_len = 56;
  int udp_payload_len = 12;      // all-zero payload
  double per_target_rate = 20.0;  // probes per second per target
  double global_rate = 1000.0;    // packets per second overall
  double reply_timeout = 2.0;     // seconds
  bool interleave = true;         // round-robin icmp,tcp,udp; sequential otherwise
  // The probe spacing within one target is not constrained beyond the rate
  // caps; 50 ms is our default, exposed for operators.
  double inter_probe_gap = 0.05;
  std::uint64_t seed = 0;

  void validate() const;  // throws ValidationError
};

struct ProbeRecord {
  Ipv4 target;
  Protocol protocol = Protocol::Icmp;
  ProbeKind kind = ProbeKind::IcmpEcho;
  int seq_index = 0;           // 0..8 transport probes, 9 for the SNMPv3 probe
  std::uint16_t sent_ipid = 0;  // distinct and non-zero within a plan
  double sent_at = 0.0;         // stamped at send time
  std::uint16_t dst_port = 0;   // tcp/udp/snmp destination
  int payload_len = 0;
  std::uint32_t tcp_ack = 0;    // non-zero acknowledgment for the SYN probe
  std::uint32_t snmp_msg_id = 0;

  bool operator==(const ProbeRecord&) const = default;
};

enum class ReplyKind { None, EchoReply, TcpRst, IcmpPortUnreach, SnmpReport };

std::string reply_kind_name(ReplyKind k);
ReplyKind reply_kind_from_name(std::string_view name);  // throws ParseError

// Expected reply kind per transport protocol (echo -> echo reply, closed TCP
// port -> RST, closed UDP port -> ICMP port unreachable).
ReplyKind expected_reply_kind(Protocol p);

struct ResponseRecord {
  ProbeRecord probe;
  ReplyKind reply_kind = ReplyKind::None;
  std::optional<std::uint16_t> reply_ipid;
  std::optional<int> reply_ttl;           // 1..255
  std::optional<int> reply_total_length;  // IP total-length field
  std::optional<std::uint32_t> tcp_rst_seq;
  std::optional<double> rtt;
  std::optional<Bytes> snmp_report;       // raw report bytes for the SNMPv3 probe

  bool answered() const { return reply_kind != ReplyKind::None; }
  bool operator==(const ResponseRecord&) const = default;
};

struct ResponseSet {
  Ipv4 target;
  std::vector<ResponseRecord> records;  // all 10, in send order
  ProtocolSet responsive;

  // A transport protocol is responsive iff all three of its probes got
  // replies of the expected kind; partial replies count as unresponsive.
  void recompute_responsive();
  std::vector<const ResponseRecord*> protocol_records(Protocol p) const;
  const ResponseRecord* snmp_record() const;

  bool operator==(const ResponseSet&) const = default;
};

// Builds the per-target measurement plan: 3 ICMP echo requests, 2 TCP ACKs
// plus 1 TCP SYN carrying a non-zero acknowledgment, 3 all-zero UDP
// datagrams, and a single SNMPv3 get-request, ten probes total.
std::vector<ProbeRecord> build_probe_plan(Ipv4 target, const ProbePlanConfig& cfg);

// Virtual time source so simulated scans are instant and deterministic.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() = 0;
  virtual void sleep_until(double t) = 0;
};

class SimClock : public Clock {
 public:
  double now() override { return now_; }
  void sleep_until(double t) override {
    if (t > now_) now_ = t;
  }

 private:
  double now_ = 0.0;
};

class WallClock : public Clock {
 public:
  double now() override;
  void sleep_until(double t) override;
};

// One probe/reply exchange against the measurement target. Implementations:
// the in-process simulator and the raw-socket live transport.
class Transport {
 public:
  virtual ~Transport() = default;
  // Blocking: returns the matched reply, or a None-kind record after the
  // configured timeout. Throws TransportSendError for a per-target failure
  // and TransportFatalError when the transport as a whole is gone.
  virtual ResponseRecord exchange(const ProbeRecord& probe, const ProbePlanConfig& cfg) = 0;
  virtual Clock& clock() = 0;
  virtual std::string describe() const = 0;
};

class TransportSendError : public Error {
 public:
  using Error::Error;
};

class TransportFatalError : public Error {
 public:
  using Error::Error;
};

struct SendLogEntry {
  Ipv4 target;
  Protocol protocol = Protocol::Icmp;
  int seq_index = 0;
  double t = 0.0;
};

struct TargetError {
  Ipv4 target;
  std::string message;
};

struct ScanResult {
  std::vector<ResponseSet> sets;  // completion order (randomized target order)
  std::vector<SendLogEntry> send_log;
  std::vector<TargetError> errors;
  bool aborted = false;  // transport died; sets holds partial results
};

using ResponseSink = std::function<void(const ResponseSet&)>;

// Scans every target: per-target probes serialized in plan order, targets
// interleaved, rate caps enforced against the transport clock. Target order
// is shuffled with cfg.seed. Throws ValidationError on an empty target list.
ScanResult execute_scan(std::span<const Ipv4> targets, const ProbePlanConfig& cfg,
                        Transport& transport, const ResponseSink& sink = {});

// Target list file: one dotted quad per line, '#' comments and blanks ignored.
std::vector<Ipv4> load_target_list(const std::string& text);

}  // namespace lfp
