#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "lfp/probe.hpp"

namespace lfp {

// IPID counter behavior per protocol. Echo is a sentinel for the ICMP
// counter when the stack reflects the request IPID: a reflected value is
// not a counter at all.
enum class IpidClass { Incremental, Random, Static, Zero, Duplicate, Echo };

std::string ipid_class_token(IpidClass c);                 // i r s z dup echo
IpidClass ipid_class_from_token(std::string_view token);   // throws ParseError

struct IpidConfig {
  int step_threshold = 1300;
  int modulus = 65536;

  void validate() const;
  // Probability that one uniform-random modular step lands at or below the
  // threshold: (threshold + 1) / modulus. Never hardcoded so threshold
  // changes propagate.
  double step_hit_probability() const {
    return static_cast<double>(step_threshold + 1) / static_cast<double>(modulus);
  }
  // Chance a fully random counter classifies as incremental (two steps).
  double misclassification_probability() const {
    double p = step_hit_probability();
    return p * p;
  }
};

enum class TcpSynSeq { Zero, NonZero };

// Initial TTL class: the smallest of {32, 64, 128, 255} at or above the
// observed TTL.
int infer_ittl(int observed_ttl);  // throws ValidationError for values outside 1..255

// Counter classification over one protocol's three replies in send order.
// Zero, static and duplicate are definitional; otherwise the two modular
// steps decide incremental vs random.
IpidClass classify_ipid_sequence(std::span<const std::uint16_t> ipids, const IpidConfig& cfg);

// True iff the merged reply sequence of the named responsive protocols,
// each individually incremental, moves in steps at or below the threshold.
// Any failed precondition (unresponsive protocol, non-incremental counter)
// yields false rather than an error.
bool detect_shared_counter(const ResponseSet& responses, ProtocolSet protocols,
                           const IpidConfig& cfg);

// The 15-feature signature. Every field optional: present iff all the
// protocols it depends on are responsive.
struct FeatureVector {
  std::optional<bool> icmp_ipid_echo;
  std::optional<IpidClass> icmp_ipid;
  std::optional<IpidClass> tcp_ipid;
  std::optional<IpidClass> udp_ipid;
  std::optional<bool> shared_all;
  std::optional<bool> shared_tcp_icmp;
  std::optional<bool> shared_udp_icmp;
  std::optional<bool> shared_tcp_udp;
  std::optional<int> udp_ittl;
  std::optional<int> icmp_ittl;
  std::optional<int> tcp_ittl;
  std::optional<int> icmp_resp_size;
  std::optional<int> tcp_resp_size;
  std::optional<int> udp_resp_size;
  std::optional<TcpSynSeq> tcp_syn_seq;

  // Responsive subset implied by which fields are present.
  ProtocolSet protocols() const;
  bool is_full() const { return protocols().is_full(); }
  bool empty() const { return protocols().empty(); }

  // Keeps only the fields whose protocol dependencies lie inside the subset.
  FeatureVector project(ProtocolSet subset) const;

  // Canonical 15-token comma-separated form, the signature key: booleans as
  // True/False, counter classes as {i,r,s,z,dup,echo}, TTLs and sizes as
  // decimal, tcp_syn_seq as {0,1}, absent fields as '-'.
  std::string canonical() const;
  static FeatureVector from_canonical(std::string_view key);  // throws ParseError

  bool operator==(const FeatureVector&) const = default;
};

// Full 15-feature extraction from one target's responses.
FeatureVector extract_features(const ResponseSet& responses, const IpidConfig& cfg = {});

// Protocol dependencies of the canonical key positions 0..14.
ProtocolSet feature_dependencies(int position);

}  // namespace lfp
