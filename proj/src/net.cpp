#include "lfp/net.hpp"

#include <cstdio>

namespace lfp {

std::optional<Ipv4> Ipv4::try_parse(std::string_view text) {
  std::uint32_t parts[4];
  int part = 0;
  std::uint32_t cur = 0;
  int digits = 0;
  for (char ch : text) {
    if (ch >= '0' && ch <= '9') {
      cur = cur * 10 + static_cast<std::uint32_t>(ch - '0');
      if (cur > 255 || ++digits > 3) return std::nullopt;
    } else if (ch == '.') {
      if (digits == 0 || part >= 3) return std::nullopt;
      parts[part++] = cur;
      cur = 0;
      digits = 0;
    } else {
      return std::nullopt;
    }
  }
  if (digits == 0 || part != 3) return std::nullopt;
  parts[3] = cur;
  return Ipv4((parts[0] << 24) | (parts[1] << 16) | (parts[2] << 8) | parts[3]);
}

Ipv4 Ipv4::parse(std::string_view text) {
  auto v = try_parse(text);
  if (!v) throw ParseError("invalid IPv4 address '" + std::string(text) + "'");
  return *v;
}

std::string Ipv4::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (value >> 24) & 0xff, (value >> 16) & 0xff,
                (value >> 8) & 0xff, value & 0xff);
  return buf;
}

Ipv4Prefix Ipv4Prefix::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos)
    throw ParseError("prefix missing '/len': '" + std::string(text) + "'");
  Ipv4 net = Ipv4::parse(text.substr(0, slash));
  int len = 0;
  auto rest = text.substr(slash + 1);
  if (rest.empty() || rest.size() > 2) throw ParseError("bad prefix length in '" + std::string(text) + "'");
  for (char ch : rest) {
    if (ch < '0' || ch > '9') throw ParseError("bad prefix length in '" + std::string(text) + "'");
    len = len * 10 + (ch - '0');
  }
  if (len > 32) throw ParseError("prefix length > 32 in '" + std::string(text) + "'");
  return Ipv4Prefix{net, len};
}

std::string Ipv4Prefix::str() const {
  return network.str() + "/" + std::to_string(length);
}

namespace {

struct ReservedBlock {
  Ipv4Prefix prefix;
  const char* reason;
};

const ReservedBlock kReserved[] = {
    {{Ipv4(0, 0, 0, 0), 8}, "this-network (0.0.0.0/8)"},
    {{Ipv4(10, 0, 0, 0), 8}, "private (10.0.0.0/8)"},
    {{Ipv4(100, 64, 0, 0), 10}, "shared address space (100.64.0.0/10)"},
    {{Ipv4(127, 0, 0, 0), 8}, "loopback (127.0.0.0/8)"},
    {{Ipv4(169, 254, 0, 0), 16}, "link-local (169.254.0.0/16)"},
    {{Ipv4(172, 16, 0, 0), 12}, "private (172.16.0.0/12)"},
    {{Ipv4(192, 0, 0, 0), 24}, "IETF protocol assignments (192.0.0.0/24)"},
    {{Ipv4(192, 168, 0, 0), 16}, "private (192.168.0.0/16)"},
    {{Ipv4(224, 0, 0, 0), 4}, "multicast (224.0.0.0/4)"},
    {{Ipv4(240, 0, 0, 0), 4}, "class E (240.0.0.0/4)"},
};

const ReservedBlock* find_reserved(Ipv4 addr) {
  if (addr.value == 0xffffffffu) {
    static const ReservedBlock broadcast{{Ipv4(255, 255, 255, 255), 32}, "limited broadcast"};
    return &broadcast;
  }
  for (const auto& block : kReserved)
    if (block.prefix.contains(addr)) return &block;
  return nullptr;
}

}  // namespace

bool is_private_or_reserved(Ipv4 addr) { return find_reserved(addr) != nullptr; }

bool is_routable_unicast(Ipv4 addr) { return !is_private_or_reserved(addr); }

void validate_scan_target(Ipv4 addr) {
  if (const ReservedBlock* block = find_reserved(addr))
    throw ValidationError("target " + addr.str() + " is not a routable unicast address: " +
                          block->reason);
}

}  // namespace lfp
