#include "lfp/live_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/select.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace lfp {

namespace {

constexpr std::uint8_t kIcmpEchoRequest = 8;
constexpr std::uint8_t kIcmpEchoReply = 0;
constexpr std::uint8_t kIcmpDestUnreach = 3;
constexpr std::uint8_t kIcmpCodePortUnreach = 3;
constexpr std::uint8_t kTcpFlagRst = 0x04;

std::uint16_t inet_checksum(const std::uint8_t* data, std::size_t len,
                            std::uint32_t seed = 0) {
  std::uint32_t sum = seed;
  while (len > 1) {
    sum += (static_cast<std::uint32_t>(data[0]) << 8) | data[1];
    data += 2;
    len -= 2;
  }
  if (len == 1) sum += static_cast<std::uint32_t>(data[0]) << 8;
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

void put16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 8);
  p[1] = static_cast<std::uint8_t>(v & 0xff);
}

void put32(std::uint8_t* p, std::uint32_t v) {
  put16(p, static_cast<std::uint16_t>(v >> 16));
  put16(p + 2, static_cast<std::uint16_t>(v & 0xffff));
}

std::uint16_t get16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t get32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(get16(p)) << 16) | get16(p + 2);
}

// 20-byte IPv4 header, no options.
void build_ip_header(std::uint8_t* p, Ipv4 src, Ipv4 dst, std::uint8_t proto,
                     std::uint16_t total_len, std::uint16_t ipid) {
  std::memset(p, 0, 20);
  p[0] = 0x45;
  put16(p + 2, total_len);
  put16(p + 4, ipid);
  p[8] = 64;  // our own TTL, irrelevant to the features
  p[9] = proto;
  put32(p + 12, src.value);
  put32(p + 16, dst.value);
  put16(p + 10, inet_checksum(p, 20));
}

}  // namespace

struct LiveTransport::Impl {
  int icmp_fd = -1;  // raw, receives echo replies and port unreachables
  int tcp_fd = -1;   // raw, receives RSTs
  int udp_fd = -1;   // datagram socket for the SNMPv3 exchange
  Ipv4 local;
  std::uint16_t icmp_id;
  std::uint16_t ephemeral_port;

  Impl() {
    icmp_fd = ::socket(AF_INET, SOCK_RAW, IPPROTO_ICMP);
    if (icmp_fd < 0) {
      if (errno == EPERM || errno == EACCES)
        throw CapabilityError(
            "live transport needs the raw-packet privilege (CAP_NET_RAW or root); "
            "run privileged or use --transport sim:<fleet-spec>");
      throw TransportFatalError(std::string("raw ICMP socket: ") + std::strerror(errno));
    }
    tcp_fd = ::socket(AF_INET, SOCK_RAW, IPPROTO_TCP);
    udp_fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (tcp_fd < 0 || udp_fd < 0) {
      close_all();
      throw TransportFatalError(std::string("socket setup: ") + std::strerror(errno));
    }
    int on = 1;
    if (::setsockopt(icmp_fd, IPPROTO_IP, IP_HDRINCL, &on, sizeof(on)) < 0 ||
        ::setsockopt(tcp_fd, IPPROTO_IP, IP_HDRINCL, &on, sizeof(on)) < 0) {
      close_all();
      throw TransportFatalError(std::string("IP_HDRINCL: ") + std::strerror(errno));
    }
    std::uint64_t h = fnv1a64_u64(static_cast<std::uint64_t>(::getpid()));
    icmp_id = static_cast<std::uint16_t>(h & 0xffff);
    if (icmp_id == 0) icmp_id = 1;
    ephemeral_port = static_cast<std::uint16_t>(49152 + (h >> 16) % 16000);
  }

  ~Impl() { close_all(); }

  void close_all() {
    for (int* fd : {&icmp_fd, &tcp_fd, &udp_fd})
      if (*fd >= 0) {
        ::close(*fd);
        *fd = -1;
      }
  }

  // Local address the kernel would route toward this target.
  Ipv4 local_address_for(Ipv4 target) {
    int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd < 0) throw TransportFatalError("probe socket failed");
    sockaddr_in to{};
    to.sin_family = AF_INET;
    to.sin_port = htons(53);
    to.sin_addr.s_addr = htonl(target.value);
    sockaddr_in self{};
    socklen_t len = sizeof(self);
    Ipv4 out;
    if (::connect(fd, reinterpret_cast<sockaddr*>(&to), sizeof(to)) == 0 &&
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&self), &len) == 0)
      out = Ipv4(ntohl(self.sin_addr.s_addr));
    ::close(fd);
    if (out.value == 0) throw TransportSendError("no route to " + target.str());
    return out;
  }

  void send_raw(int fd, Ipv4 dst, const std::uint8_t* packet, std::size_t len) {
    sockaddr_in to{};
    to.sin_family = AF_INET;
    to.sin_addr.s_addr = htonl(dst.value);
    if (::sendto(fd, packet, len, 0, reinterpret_cast<sockaddr*>(&to), sizeof(to)) < 0)
      throw TransportSendError(std::string("sendto ") + dst.str() + ": " +
                               std::strerror(errno));
  }

  void send_probe(const ProbeRecord& probe) {
    Ipv4 src = local_address_for(probe.target);
    std::uint8_t packet[1600];
    switch (probe.protocol) {
      case Protocol::Icmp: {
        std::size_t payload = static_cast<std::size_t>(probe.payload_len);
        std::uint16_t total = static_cast<std::uint16_t>(20 + 8 + payload);
        build_ip_header(packet, src, probe.target, IPPROTO_ICMP, total, probe.sent_ipid);
        std::uint8_t* icmp = packet + 20;
        std::memset(icmp, 0, 8 + payload);
        icmp[0] = kIcmpEchoRequest;
        put16(icmp + 4, icmp_id);
        put16(icmp + 6, static_cast<std::uint16_t>(probe.seq_index));
        for (std::size_t i = 0; i < payload; ++i)
          icmp[8 + i] = static_cast<std::uint8_t>(i & 0xff);
        put16(icmp + 2, inet_checksum(icmp, 8 + payload));
        send_raw(icmp_fd, probe.target, packet, total);
        break;
      }
      case Protocol::Tcp: {
        std::uint16_t total = 20 + 20;
        build_ip_header(packet, src, probe.target, IPPROTO_TCP, total, probe.sent_ipid);
        std::uint8_t* tcp = packet + 20;
        std::memset(tcp, 0, 20);
        put16(tcp, ephemeral_port);
        put16(tcp + 2, probe.dst_port);
        put32(tcp + 4, 0x1f0 + static_cast<std::uint32_t>(probe.seq_index));
        put32(tcp + 8, probe.kind == ProbeKind::TcpSyn ? probe.tcp_ack : 0);
        tcp[12] = 0x50;
        tcp[13] = probe.kind == ProbeKind::TcpSyn ? 0x02 : 0x10;  // SYN or ACK
        put16(tcp + 14, 65535);
        // Pseudo-header checksum.
        std::uint8_t pseudo[12];
        put32(pseudo, src.value);
        put32(pseudo + 4, probe.target.value);
        pseudo[8] = 0;
        pseudo[9] = IPPROTO_TCP;
        put16(pseudo + 10, 20);
        std::uint32_t seed = 0;
        for (int i = 0; i < 12; i += 2) seed += get16(pseudo + i);
        put16(tcp + 16, inet_checksum(tcp, 20, seed));
        send_raw(tcp_fd, probe.target, packet, total);
        break;
      }
      case Protocol::Udp: {
        std::size_t payload = static_cast<std::size_t>(probe.payload_len);
        std::uint16_t total = static_cast<std::uint16_t>(20 + 8 + payload);
        build_ip_header(packet, src, probe.target, IPPROTO_UDP, total, probe.sent_ipid);
        std::uint8_t* udp = packet + 20;
        std::memset(udp, 0, 8 + payload);  // payload stays all zero
        put16(udp, ephemeral_port);
        put16(udp + 2, probe.dst_port);
        put16(udp + 4, static_cast<std::uint16_t>(8 + payload));
        // UDP checksum 0 is legal for IPv4.
        send_raw(icmp_fd, probe.target, packet, total);
        break;
      }
      case Protocol::Snmpv3: {
        Bytes msg = encode_snmpv3_probe(probe.snmp_msg_id);
        sockaddr_in to{};
        to.sin_family = AF_INET;
        to.sin_port = htons(probe.dst_port);
        to.sin_addr.s_addr = htonl(probe.target.value);
        if (::sendto(udp_fd, msg.data(), msg.size(), 0, reinterpret_cast<sockaddr*>(&to),
                     sizeof(to)) < 0)
          throw TransportSendError(std::string("snmp sendto: ") + std::strerror(errno));
        break;
      }
    }
  }

  // Fills the reply fields when the datagram matches the outstanding probe.
  bool match_reply(const ProbeRecord& probe, const std::uint8_t* ip, std::size_t len,
                   ResponseRecord& rec) {
    if (len < 20 || (ip[0] >> 4) != 4) return false;
    std::size_t ihl = static_cast<std::size_t>(ip[0] & 0xf) * 4;
    if (len < ihl + 8) return false;
    Ipv4 from(get32(ip + 12));
    std::uint8_t proto = ip[9];
    const std::uint8_t* body = ip + ihl;
    auto fill = [&](ReplyKind kind) {
      rec.reply_kind = kind;
      rec.reply_ipid = get16(ip + 4);
      rec.reply_ttl = ip[8];
      rec.reply_total_length = get16(ip + 2);
    };

    if (probe.protocol == Protocol::Icmp && proto == IPPROTO_ICMP && from == probe.target) {
      if (body[0] != kIcmpEchoReply) return false;
      if (get16(body + 4) != icmp_id || get16(body + 6) != probe.seq_index) return false;
      fill(ReplyKind::EchoReply);
      return true;
    }
    if (probe.protocol == Protocol::Tcp && proto == IPPROTO_TCP && from == probe.target) {
      if (len < ihl + 20) return false;
      if (get16(body) != probe.dst_port || get16(body + 2) != ephemeral_port) return false;
      if (!(body[13] & kTcpFlagRst)) return false;
      fill(ReplyKind::TcpRst);
      rec.tcp_rst_seq = get32(body + 4);
      return true;
    }
    if (probe.protocol == Protocol::Udp && proto == IPPROTO_ICMP) {
      if (body[0] != kIcmpDestUnreach || body[1] != kIcmpCodePortUnreach) return false;
      if (len < ihl + 8 + 20 + 8) return false;
      const std::uint8_t* inner = body + 8;
      std::size_t inner_ihl = static_cast<std::size_t>(inner[0] & 0xf) * 4;
      if (inner[9] != IPPROTO_UDP || Ipv4(get32(inner + 16)) != probe.target) return false;
      const std::uint8_t* inner_udp = inner + inner_ihl;
      if (get16(inner_udp) != ephemeral_port || get16(inner_udp + 2) != probe.dst_port)
        return false;
      fill(ReplyKind::IcmpPortUnreach);
      return true;
    }
    return false;
  }

  ResponseRecord wait_for_reply(const ProbeRecord& probe, double timeout, WallClock& clock) {
    ResponseRecord rec;
    rec.probe = probe;
    const double sent = clock.now();
    const double deadline = sent + timeout;

    if (probe.protocol == Protocol::Snmpv3) {
      for (;;) {
        double left = deadline - clock.now();
        if (left <= 0) return rec;
        fd_set rd;
        FD_ZERO(&rd);
        FD_SET(udp_fd, &rd);
        timeval tv{static_cast<time_t>(left), static_cast<suseconds_t>((left - int(left)) * 1e6)};
        if (::select(udp_fd + 1, &rd, nullptr, nullptr, &tv) <= 0) return rec;
        std::uint8_t buf[4096];
        sockaddr_in from{};
        socklen_t fl = sizeof(from);
        ssize_t n = ::recvfrom(udp_fd, buf, sizeof(buf), 0,
                               reinterpret_cast<sockaddr*>(&from), &fl);
        if (n <= 0) continue;
        if (Ipv4(ntohl(from.sin_addr.s_addr)) != probe.target) continue;
        rec.reply_kind = ReplyKind::SnmpReport;
        rec.snmp_report = Bytes(buf, buf + n);
        rec.rtt = clock.now() - sent;
        return rec;
      }
    }

    int fds[2] = {icmp_fd, tcp_fd};
    for (;;) {
      double left = deadline - clock.now();
      if (left <= 0) return rec;
      fd_set rd;
      FD_ZERO(&rd);
      int maxfd = 0;
      for (int fd : fds) {
        FD_SET(fd, &rd);
        maxfd = std::max(maxfd, fd);
      }
      timeval tv{static_cast<time_t>(left), static_cast<suseconds_t>((left - int(left)) * 1e6)};
      if (::select(maxfd + 1, &rd, nullptr, nullptr, &tv) <= 0) return rec;
      for (int fd : fds) {
        if (!FD_ISSET(fd, &rd)) continue;
        std::uint8_t buf[4096];
        ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
        if (n <= 0) continue;
        // Duplicates of an already matched probe are ignored here: the first
        // matching datagram wins and later ones never reach this loop.
        if (match_reply(probe, buf, static_cast<std::size_t>(n), rec)) {
          rec.rtt = clock.now() - sent;
          return rec;
        }
      }
    }
  }
};

LiveTransport::LiveTransport() : impl_(std::make_unique<Impl>()) {}

LiveTransport::~LiveTransport() = default;

ResponseRecord LiveTransport::exchange(const ProbeRecord& probe, const ProbePlanConfig& cfg) {
  impl_->send_probe(probe);
  return impl_->wait_for_reply(probe, cfg.reply_timeout, clock_);
}

}  // namespace lfp
