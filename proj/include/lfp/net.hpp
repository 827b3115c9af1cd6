#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lfp/util.hpp"

namespace lfp {

// IPv4 address held in host byte order.
struct Ipv4 {
  std::uint32_t value = 0;

  constexpr Ipv4() = default;
  constexpr explicit Ipv4(std::uint32_t v) : value(v) {}
  constexpr Ipv4(int a, int b, int c, int d)
      : value((std::uint32_t(a) << 24) | (std::uint32_t(b) << 16) | (std::uint32_t(c) << 8) |
              std::uint32_t(d)) {}

  static Ipv4 parse(std::string_view text);            // throws ParseError
  static std::optional<Ipv4> try_parse(std::string_view text);

  std::string str() const;

  auto operator<=>(const Ipv4&) const = default;
};

struct Ipv4Prefix {
  Ipv4 network;
  int length = 0;  // 0..32

  static Ipv4Prefix parse(std::string_view text);      // "a.b.c.d/len", throws ParseError
  bool contains(Ipv4 addr) const {
    if (length == 0) return true;
    std::uint32_t mask = length == 32 ? 0xffffffffu : ~((1u << (32 - length)) - 1);
    return (addr.value & mask) == (network.value & mask);
  }
  std::string str() const;
  auto operator<=>(const Ipv4Prefix&) const = default;
};

// Address classes we refuse to probe: loopback, RFC1918, link-local, CGNAT,
// IETF protocol assignments, multicast, class E, 0/8 and the broadcast
// address. Documentation and benchmarking blocks (192.0.2/24, 198.51.100/24,
// 203.0.113/24, 198.18/15) stay admissible so simulated fleets have address
// space that never collides with real probing policy.
bool is_routable_unicast(Ipv4 addr);
bool is_private_or_reserved(Ipv4 addr);

// Throws ValidationError naming the offending class.
void validate_scan_target(Ipv4 addr);

}  // namespace lfp
