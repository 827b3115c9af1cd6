#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lfp/util.hpp"

namespace lfp {

using Bytes = std::vector<std::uint8_t>;

std::string bytes_to_hex(const Bytes& data);
Bytes hex_to_bytes(std::string_view hex);  // throws ParseError

// msgAuthoritativeEngineID as defined for SNMPv3. When the first octet has
// its MSB set the leading four octets carry the vendor's IANA private
// enterprise number (with that bit cleared) and octet five selects the
// format of the remainder.
struct EngineId {
  Bytes raw;                                   // 5..32 octets
  bool format_flag = false;                    // MSB of first octet
  std::optional<std::uint32_t> enterprise_number;  // present iff format_flag
  std::optional<std::uint8_t> format_octet;        // octet 5, iff format_flag

  static EngineId from_octets(Bytes octets);   // throws ValidationError on bad length
  // Builds a format_flag engine id: PEN + format octet 0x03 + 6 tail bytes.
  static EngineId make(std::uint32_t pen, std::uint64_t tail);

  bool operator==(const EngineId&) const = default;
};

// The single unauthenticated discovery probe: msgVersion 3, noAuthNoPriv
// with the reportable flag, empty USM security parameters, a get-request
// with an empty varbind list. Deterministic for a fixed msg_id.
Bytes encode_snmpv3_probe(std::uint32_t msg_id);

// Report message a compliant agent returns for the probe, carrying its
// engine id plus a usmStatsUnknownEngineIDs varbind. Used by the simulator
// and by the round-trip tests.
Bytes encode_snmpv3_report(const EngineId& engine, std::uint32_t msg_id);

// Extracts msgAuthoritativeEngineID from a BER-encoded SNMPv3 message.
// Throws ParseError (with byte offset) on malformed BER and ValidationError
// on an engine id shorter than 5 octets.
EngineId parse_engine_id(const Bytes& report);

std::uint32_t parse_msg_version(const Bytes& message);  // throws ParseError

struct VendorLabel {
  std::string name;
  enum class Source { Snmpv3, Simulated } source = Source::Snmpv3;
  bool operator==(const VendorLabel&) const = default;
};

// Closed enterprise-number -> vendor dictionary, loaded from "pen,vendor"
// CSV. Lookups are total: unknown numbers map to "Other".
class VendorDict {
 public:
  static VendorDict builtin();
  static VendorDict from_csv(std::string_view text);  // throws ParseError
  std::string to_csv() const;

  VendorLabel vendor_from_pen(std::uint32_t pen) const;
  std::optional<std::uint32_t> pen_for_vendor(const std::string& name) const;
  // Engine ids without the format flag carry no enterprise number; they
  // label as "Other" rather than being guessed at.
  VendorLabel vendor_from_engine_id(const EngineId& id) const;

  const std::map<std::uint32_t, std::string>& entries() const { return entries_; }

 private:
  std::map<std::uint32_t, std::string> entries_;
};

}  // namespace lfp
