#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lfp/probe.hpp"
#include "lfp/snmp.hpp"

namespace lfp {

// IPID generation for one protocol of a simulated stack.
struct IpidMode {
  enum class Kind { Incremental, Random, Static, Zero, DuplicatePattern };
  Kind kind = Kind::Random;
  std::optional<std::uint16_t> start;  // incremental: counter start (else per-router draw)
  std::uint16_t static_value = 0x1234; // static: emitted value, non-zero
  int step_jitter = 0;                 // incremental: extra 0..jitter per reply
  std::optional<std::string> shared_id;  // incremental counters with the same id share state
};

enum class UdpQuoteKind { Minimal, Full, Extended };

// ICMP port unreachable size: 56 bytes when only the header plus 8 bytes of
// the datagram are quoted, 56 + payload when the full datagram is quoted.
struct UdpQuote {
  UdpQuoteKind kind = UdpQuoteKind::Minimal;
  int extended_total_length = 0;  // Extended: explicit IP total length
};

enum class RstSeqRule { RfcZero, NonZero };

struct StackProfile {
  std::string name;
  std::string vendor;
  std::uint32_t engine_pen = 0;  // enterprise number reported over SNMPv3
  int count = 0;                 // fleet members using this profile

  bool icmp_echo_ipid = false;
  IpidMode ipid_icmp, ipid_tcp, ipid_udp;
  int ittl_icmp = 64, ittl_tcp = 64, ittl_udp = 64;
  UdpQuote udp_quote;
  RstSeqRule rst_seq_rule = RstSeqRule::RfcZero;
  double snmpv3_fraction = 1.0;  // share of members answering the SNMPv3 probe
  bool respond_icmp = true, respond_tcp = true, respond_udp = true;

  const IpidMode& ipid_mode(Protocol p) const;
  int ittl(Protocol p) const;
  void validate() const;  // throws ValidationError
};

struct FleetOptions {
  Ipv4Prefix base_prefix{Ipv4(198, 18, 0, 0), 15};
  std::uint64_t seed = 1;
  int synthetic_hops = 3;       // decremented from iTTL so inference rounds
  double background_traffic_rate = 0.0;  // increments per second on counters
  double drop_probability = 0.0;
  // Per-router chance of one config tweak (iTTL, quote or RST rule), for
  // noisy corpora in threshold sweeps.
  double mutation_rate = 0.0;
};

struct GroundTruthEntry {
  Ipv4 address;
  std::string vendor;
  std::string profile;
  bool snmpv3_enabled = false;
};

class SimRouter {
 public:
  SimRouter(Ipv4 address, StackProfile profile, bool snmp_enabled, std::uint64_t seed,
            const FleetOptions& opts);

  ResponseRecord respond(const ProbeRecord& probe, double now);

  Ipv4 address() const { return address_; }
  const StackProfile& profile() const { return profile_; }
  bool snmp_enabled() const { return snmp_enabled_; }

 private:
  struct Counter {
    std::uint32_t value = 0;
    double last_advance = 0.0;
  };

  std::uint16_t next_ipid(Protocol p, double now);
  std::uint16_t take_pending(Protocol p, double now);

  Ipv4 address_;
  StackProfile profile_;
  bool snmp_enabled_;
  FleetOptions opts_;
  Rng rng_;
  std::map<std::string, Counter> counters_;
  std::map<std::string, std::vector<std::uint16_t>> pending_;  // random/dup triples
  std::mutex mu_;
};

class SimFleet {
 public:
  // Addresses assigned sequentially inside base_prefix; throws
  // ValidationError before creating anything if the space is too small.
  static SimFleet make(const std::vector<StackProfile>& profiles, const FleetOptions& opts);

  // JSON fleet spec (see data/fleets/demo_fleet.json for the schema).
  static SimFleet from_spec_json(std::string_view text);
  static std::vector<StackProfile> profiles_from_spec_json(std::string_view text,
                                                           FleetOptions& opts);

  SimRouter* find(Ipv4 address);
  std::vector<GroundTruthEntry> ground_truth() const;
  std::vector<Ipv4> addresses() const;
  std::size_t size() const { return routers_.size(); }
  const FleetOptions& options() const { return opts_; }

  static std::string ground_truth_csv(const std::vector<GroundTruthEntry>& entries);
  static std::vector<GroundTruthEntry> parse_ground_truth_csv(std::string_view text);

 private:
  FleetOptions opts_;
  std::vector<std::unique_ptr<SimRouter>> routers_;
  std::map<Ipv4, SimRouter*> by_address_;
};

class SimTransport : public Transport {
 public:
  explicit SimTransport(SimFleet& fleet) : fleet_(fleet) {}

  ResponseRecord exchange(const ProbeRecord& probe, const ProbePlanConfig& cfg) override;
  Clock& clock() override { return clock_; }
  std::string describe() const override { return "sim"; }

 private:
  SimFleet& fleet_;
  SimClock clock_;
};

// The ten distinct demo profiles: feature sets drawn from behaviors the
// vendor tables in circulation attribute to real stacks. Each produces a
// stable canonical key at the default count of 200 members.
std::vector<StackProfile> default_demo_profiles();
// Two profiles with identical stack behavior under different vendors, for
// exercising non-unique machinery end to end.
std::vector<StackProfile> colliding_pair_profiles();
// The profile whose vector matches the published Juniper sample row, and the
// ICMP-iTTL-flipped variant that matches the Cisco row.
StackProfile juniper_sample_profile();
StackProfile cisco_sample_profile();

std::string demo_fleet_spec_json();

}  // namespace lfp
