#include "lfp/snmp.hpp"

#include <cstdio>

namespace lfp {

namespace {

// ASN.1 BER universal tags used by SNMP messages.
constexpr std::uint8_t kTagInteger = 0x02;
constexpr std::uint8_t kTagOctetString = 0x04;
constexpr std::uint8_t kTagOid = 0x06;
constexpr std::uint8_t kTagSequence = 0x30;
constexpr std::uint8_t kTagGetRequest = 0xa0;
constexpr std::uint8_t kTagReport = 0xa8;
constexpr std::uint8_t kTagCounter32 = 0x41;

void append_length(Bytes& out, std::size_t len) {
  if (len < 0x80) {
    out.push_back(static_cast<std::uint8_t>(len));
    return;
  }
  Bytes digits;
  while (len > 0) {
    digits.push_back(static_cast<std::uint8_t>(len & 0xff));
    len >>= 8;
  }
  out.push_back(static_cast<std::uint8_t>(0x80 | digits.size()));
  out.insert(out.end(), digits.rbegin(), digits.rend());
}

Bytes tlv(std::uint8_t tag, const Bytes& content) {
  Bytes out;
  out.push_back(tag);
  append_length(out, content.size());
  out.insert(out.end(), content.begin(), content.end());
  return out;
}

Bytes ber_integer(std::uint32_t value) {
  // Non-negative integers only; prepend 0x00 when the MSB would flip the sign.
  Bytes digits;
  do {
    digits.push_back(static_cast<std::uint8_t>(value & 0xff));
    value >>= 8;
  } while (value > 0);
  if (digits.back() & 0x80) digits.push_back(0x00);
  Bytes content(digits.rbegin(), digits.rend());
  return tlv(kTagInteger, content);
}

Bytes ber_octet_string(const Bytes& data) { return tlv(kTagOctetString, data); }

Bytes concat(std::initializer_list<Bytes> parts) {
  Bytes out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// USM security parameters. The probe sends them empty; the report carries
// the agent's engine id.
Bytes usm_params(const Bytes& engine_id) {
  Bytes inner = concat({
      ber_octet_string(engine_id),
      ber_integer(0),              // engine boots
      ber_integer(0),              // engine time
      ber_octet_string({}),        // user name
      ber_octet_string({}),        // authentication parameters
      ber_octet_string({}),        // privacy parameters
  });
  return ber_octet_string(tlv(kTagSequence, inner));
}

Bytes global_data(std::uint32_t msg_id, std::uint8_t flags) {
  return tlv(kTagSequence, concat({
                               ber_integer(msg_id),
                               ber_integer(65507),                  // msgMaxSize
                               ber_octet_string({flags}),           // msgFlags
                               ber_integer(3),                      // msgSecurityModel: USM
                           }));
}

struct BerReader {
  const Bytes& data;
  std::size_t pos = 0;

  std::uint8_t read_tag() {
    if (pos >= data.size()) throw ParseError("truncated BER: expected tag", pos);
    return data[pos++];
  }

  std::size_t read_length() {
    if (pos >= data.size()) throw ParseError("truncated BER: expected length", pos);
    std::uint8_t first = data[pos++];
    if ((first & 0x80) == 0) return first;
    int n = first & 0x7f;
    if (n == 0 || n > 4) throw ParseError("unsupported BER length form", pos - 1);
    std::size_t len = 0;
    for (int i = 0; i < n; ++i) {
      if (pos >= data.size()) throw ParseError("truncated BER length", pos);
      len = (len << 8) | data[pos++];
    }
    return len;
  }

  // Reads a TLV header, checks the tag, and returns the content range end.
  std::size_t enter(std::uint8_t expected_tag, const char* what) {
    std::size_t at = pos;
    std::uint8_t tag = read_tag();
    if (tag != expected_tag)
      throw ParseError(std::string("unexpected BER tag for ") + what, at);
    std::size_t len = read_length();
    if (pos + len > data.size())
      throw ParseError(std::string("BER length overruns buffer in ") + what, pos);
    return pos + len;
  }

  std::uint32_t read_integer() {
    std::size_t end = enter(kTagInteger, "INTEGER");
    std::uint32_t v = 0;
    while (pos < end) v = (v << 8) | data[pos++];
    return v;
  }

  Bytes read_octet_string() {
    std::size_t end = enter(kTagOctetString, "OCTET STRING");
    Bytes out(data.begin() + static_cast<std::ptrdiff_t>(pos),
              data.begin() + static_cast<std::ptrdiff_t>(end));
    pos = end;
    return out;
  }

  void skip_value() {
    if (pos >= data.size()) throw ParseError("truncated BER: expected value", pos);
    ++pos;
    std::size_t len = read_length();
    if (pos + len > data.size()) throw ParseError("BER value overruns buffer", pos);
    pos += len;
  }
};

}  // namespace

std::string bytes_to_hex(const Bytes& data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

Bytes hex_to_bytes(std::string_view hex) {
  if (hex.size() % 2 != 0) throw ParseError("odd-length hex string");
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ParseError("invalid hex digit");
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  return out;
}

EngineId EngineId::from_octets(Bytes octets) {
  if (octets.size() < 5 || octets.size() > 32)
    throw ValidationError("engine id length " + std::to_string(octets.size()) +
                          " outside [5, 32]");
  EngineId id;
  id.format_flag = (octets[0] & 0x80) != 0;
  if (id.format_flag) {
    std::uint32_t pen = (static_cast<std::uint32_t>(octets[0] & 0x7f) << 24) |
                        (static_cast<std::uint32_t>(octets[1]) << 16) |
                        (static_cast<std::uint32_t>(octets[2]) << 8) |
                        static_cast<std::uint32_t>(octets[3]);
    id.enterprise_number = pen;
    id.format_octet = octets[4];
  }
  id.raw = std::move(octets);
  return id;
}

EngineId EngineId::make(std::uint32_t pen, std::uint64_t tail) {
  Bytes octets;
  octets.push_back(static_cast<std::uint8_t>(((pen >> 24) & 0x7f) | 0x80));
  octets.push_back(static_cast<std::uint8_t>((pen >> 16) & 0xff));
  octets.push_back(static_cast<std::uint8_t>((pen >> 8) & 0xff));
  octets.push_back(static_cast<std::uint8_t>(pen & 0xff));
  octets.push_back(0x03);  // MAC-style remainder
  for (int i = 5; i >= 0; --i)
    octets.push_back(static_cast<std::uint8_t>((tail >> (8 * i)) & 0xff));
  return from_octets(std::move(octets));
}

Bytes encode_snmpv3_probe(std::uint32_t msg_id) {
  // Scoped PDU: empty context, get-request with empty varbind list.
  Bytes pdu = tlv(kTagGetRequest, concat({
                                      ber_integer(msg_id),  // request-id
                                      ber_integer(0),       // error-status
                                      ber_integer(0),       // error-index
                                      tlv(kTagSequence, {}) // varbinds
                                  }));
  Bytes scoped = tlv(kTagSequence, concat({
                                       ber_octet_string({}),  // contextEngineID
                                       ber_octet_string({}),  // contextName
                                       pdu,
                                   }));
  // msgFlags 0x04: reportable, noAuthNoPriv.
  return tlv(kTagSequence, concat({
                               ber_integer(3),
                               global_data(msg_id, 0x04),
                               usm_params({}),
                               scoped,
                           }));
}

Bytes encode_snmpv3_report(const EngineId& engine, std::uint32_t msg_id) {
  // usmStatsUnknownEngineIDs.0 = Counter32 1
  Bytes oid = tlv(kTagOid, {0x2b, 0x06, 0x01, 0x06, 0x03, 0x0f, 0x01, 0x01, 0x04, 0x00});
  Bytes varbind = tlv(kTagSequence, concat({oid, tlv(kTagCounter32, {0x01})}));
  Bytes pdu = tlv(kTagReport, concat({
                                  ber_integer(msg_id),
                                  ber_integer(0),
                                  ber_integer(0),
                                  tlv(kTagSequence, varbind),
                              }));
  Bytes scoped = tlv(kTagSequence, concat({
                                       ber_octet_string(engine.raw),  // contextEngineID
                                       ber_octet_string({}),
                                       pdu,
                                   }));
  return tlv(kTagSequence, concat({
                               ber_integer(3),
                               global_data(msg_id, 0x00),  // report is not reportable
                               usm_params(engine.raw),
                               scoped,
                           }));
}

EngineId parse_engine_id(const Bytes& report) {
  BerReader r{report};
  r.enter(kTagSequence, "SNMPv3 message");
  std::uint32_t version = r.read_integer();
  if (version != 3) throw ParseError("not an SNMPv3 message (version " +
                                     std::to_string(version) + ")", 0);
  std::size_t global_end = r.enter(kTagSequence, "msgGlobalData");
  r.pos = global_end;
  Bytes sec = r.read_octet_string();
  BerReader s{sec};
  s.enter(kTagSequence, "usmSecurityParameters");
  Bytes engine = s.read_octet_string();
  return EngineId::from_octets(std::move(engine));
}

std::uint32_t parse_msg_version(const Bytes& message) {
  BerReader r{message};
  r.enter(kTagSequence, "SNMPv3 message");
  return r.read_integer();
}

VendorDict VendorDict::builtin() {
  // Sourced from the IANA Private Enterprise Numbers registry.
  static const std::pair<std::uint32_t, const char*> kDefaults[] = {
      {9, "Cisco"},          {193, "Ericsson"},  {1588, "Brocade"},
      {2011, "Huawei"},      {2636, "Juniper"},  {4881, "Ruijie"},
      {6527, "Alcatel/Nokia"}, {8072, "net-snmp"}, {14988, "MikroTik"},
      {25506, "H3C"},
  };
  VendorDict dict;
  for (const auto& [pen, name] : kDefaults) dict.entries_[pen] = name;
  return dict;
}

VendorDict VendorDict::from_csv(std::string_view text) {
  VendorDict dict;
  std::size_t lineno = 0;
  for (const auto& raw_line : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line == "pen,vendor") continue;  // optional header
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("vendor dictionary line " + std::to_string(lineno) + " missing comma");
    std::string pen_text = trim(line.substr(0, comma));
    std::string vendor = trim(line.substr(comma + 1));
    if (pen_text.empty() || vendor.empty())
      throw ParseError("vendor dictionary line " + std::to_string(lineno) + " malformed");
    std::uint64_t pen = 0;
    for (char ch : pen_text) {
      if (ch < '0' || ch > '9')
        throw ParseError("vendor dictionary line " + std::to_string(lineno) +
                         " has non-numeric PEN");
      pen = pen * 10 + static_cast<std::uint64_t>(ch - '0');
      if (pen > 0x7fffffff)
        throw ParseError("vendor dictionary line " + std::to_string(lineno) + " PEN too large");
    }
    dict.entries_[static_cast<std::uint32_t>(pen)] = vendor;
  }
  return dict;
}

std::string VendorDict::to_csv() const {
  std::string out = "pen,vendor\n";
  for (const auto& [pen, vendor] : entries_)
    out += std::to_string(pen) + "," + vendor + "\n";
  return out;
}

VendorLabel VendorDict::vendor_from_pen(std::uint32_t pen) const {
  auto it = entries_.find(pen);
  if (it == entries_.end()) return {"Other", VendorLabel::Source::Snmpv3};
  return {it->second, VendorLabel::Source::Snmpv3};
}

std::optional<std::uint32_t> VendorDict::pen_for_vendor(const std::string& name) const {
  for (const auto& [pen, vendor] : entries_)
    if (vendor == name) return pen;
  return std::nullopt;
}

VendorLabel VendorDict::vendor_from_engine_id(const EngineId& id) const {
  if (!id.format_flag || !id.enterprise_number) return {"Other", VendorLabel::Source::Snmpv3};
  return vendor_from_pen(*id.enterprise_number);
}

}  // namespace lfp
