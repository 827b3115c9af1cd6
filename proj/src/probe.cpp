#include "lfp/probe.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <thread>

namespace lfp {

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Icmp: return "icmp";
    case Protocol::Tcp: return "tcp";
    case Protocol::Udp: return "udp";
    case Protocol::Snmpv3: return "snmpv3";
  }
  return "?";
}

Protocol protocol_from_name(std::string_view name) {
  if (name == "icmp") return Protocol::Icmp;
  if (name == "tcp") return Protocol::Tcp;
  if (name == "udp") return Protocol::Udp;
  if (name == "snmpv3") return Protocol::Snmpv3;
  throw ParseError("unknown protocol '" + std::string(name) + "'");
}

std::vector<Protocol> ProtocolSet::protocols() const {
  std::vector<Protocol> out;
  for (Protocol p : {Protocol::Icmp, Protocol::Tcp, Protocol::Udp})
    if (contains(p)) out.push_back(p);
  return out;
}

std::vector<std::string> ProtocolSet::names() const {
  std::vector<std::string> out;
  for (Protocol p : protocols()) out.push_back(protocol_name(p));
  return out;
}

ProtocolSet ProtocolSet::from_names(std::span<const std::string> names) {
  ProtocolSet s;
  for (const auto& n : names) {
    Protocol p = protocol_from_name(n);
    if (p == Protocol::Snmpv3) throw ParseError("snmpv3 is not a responsiveness protocol");
    s.add(p);
  }
  return s;
}

std::string ProtocolSet::label() const {
  std::string out;
  for (const auto& n : names()) {
    if (!out.empty()) out += "+";
    out += n;
  }
  return out.empty() ? "none" : out;
}

std::string probe_kind_name(ProbeKind k) {
  switch (k) {
    case ProbeKind::IcmpEcho: return "icmp_echo";
    case ProbeKind::TcpAck: return "tcp_ack";
    case ProbeKind::TcpSyn: return "tcp_syn";
    case ProbeKind::UdpZero: return "udp";
    case ProbeKind::Snmpv3Get: return "snmpv3_get";
  }
  return "?";
}

ProbeKind probe_kind_from_name(std::string_view name) {
  if (name == "icmp_echo") return ProbeKind::IcmpEcho;
  if (name == "tcp_ack") return ProbeKind::TcpAck;
  if (name == "tcp_syn") return ProbeKind::TcpSyn;
  if (name == "udp") return ProbeKind::UdpZero;
  if (name == "snmpv3_get") return ProbeKind::Snmpv3Get;
  throw ParseError("unknown probe kind '" + std::string(name) + "'");
}

std::string reply_kind_name(ReplyKind k) {
  switch (k) {
    case ReplyKind::None: return "none";
    case ReplyKind::EchoReply: return "echo_reply";
    case ReplyKind::TcpRst: return "tcp_rst";
    case ReplyKind::IcmpPortUnreach: return "icmp_port_unreach";
    case ReplyKind::SnmpReport: return "snmp_report";
  }
  return "?";
}

ReplyKind reply_kind_from_name(std::string_view name) {
  if (name == "none") return ReplyKind::None;
  if (name == "echo_reply") return ReplyKind::EchoReply;
  if (name == "tcp_rst") return ReplyKind::TcpRst;
  if (name == "icmp_port_unreach") return ReplyKind::IcmpPortUnreach;
  if (name == "snmp_report") return ReplyKind::SnmpReport;
  throw ParseError("unknown reply kind '" + std::string(name) + "'");
}

ReplyKind expected_reply_kind(Protocol p) {
  switch (p) {
    case Protocol::Icmp: return ReplyKind::EchoReply;
    case Protocol::Tcp: return ReplyKind::TcpRst;
    case Protocol::Udp: return ReplyKind::IcmpPortUnreach;
    case Protocol::Snmpv3: return ReplyKind::SnmpReport;
  }
  return ReplyKind::None;
}

void ProbePlanConfig::validate() const {
  if (tcp_udp_port < 1) throw ValidationError("tcp/udp port must be in [1, 65535]");
  if (icmp_payload_len < 0 || icmp_payload_len > 1400)
    throw ValidationError("icmp payload length out of range");
  if (udp_payload_len < 0 || udp_payload_len > 1400)
    throw ValidationError("udp payload length out of range");
  if (per_target_rate <= 0) throw ValidationError("per-target rate must be > 0");
  if (global_rate <= 0) throw ValidationError("global rate must be > 0");
  if (reply_timeout <= 0) throw ValidationError("reply timeout must be > 0");
  if (inter_probe_gap < 0) throw ValidationError("inter-probe gap must be >= 0");
}

void ResponseSet::recompute_responsive() {
  responsive = ProtocolSet{};
  for (Protocol p : {Protocol::Icmp, Protocol::Tcp, Protocol::Udp}) {
    int seen = 0, good = 0;
    for (const auto& rec : records) {
      if (rec.probe.protocol != p) continue;
      ++seen;
      if (rec.reply_kind == expected_reply_kind(p)) ++good;
    }
    if (seen == 3 && good == 3) responsive.add(p);
  }
}

std::vector<const ResponseRecord*> ResponseSet::protocol_records(Protocol p) const {
  std::vector<const ResponseRecord*> out;
  for (const auto& rec : records)
    if (rec.probe.protocol == p) out.push_back(&rec);
  return out;
}

const ResponseRecord* ResponseSet::snmp_record() const {
  for (const auto& rec : records)
    if (rec.probe.protocol == Protocol::Snmpv3) return &rec;
  return nullptr;
}

namespace {

// Distinct non-zero IPIDs per plan, derived from (seed, target, index) so a
// rerun with the same seed reproduces the plan byte for byte.
std::uint16_t plan_ipid(std::uint64_t seed, Ipv4 target, int index,
                        const std::vector<ProbeRecord>& taken) {
  std::uint64_t h = fnv1a64_u64(seed);
  h = fnv1a64_u64(target.value, h);
  h = fnv1a64_u64(static_cast<std::uint64_t>(index), h);
  auto used = [&](std::uint16_t v) {
    return std::any_of(taken.begin(), taken.end(),
                       [v](const ProbeRecord& r) { return r.sent_ipid == v; });
  };
  std::uint16_t ipid = static_cast<std::uint16_t>(h % 65535 + 1);
  while (ipid == 0 || used(ipid)) ipid = static_cast<std::uint16_t>(ipid % 65535 + 1);
  return ipid;
}

}  // namespace

std::vector<ProbeRecord> build_probe_plan(Ipv4 target, const ProbePlanConfig& cfg) {
  cfg.validate();
  validate_scan_target(target);

  std::vector<ProbeKind> transport_kinds;
  if (cfg.interleave) {
    // icmp,tcp,udp repeated; the third TCP slot carries the SYN.
    transport_kinds = {ProbeKind::IcmpEcho, ProbeKind::TcpAck, ProbeKind::UdpZero,
                       ProbeKind::IcmpEcho, ProbeKind::TcpAck, ProbeKind::UdpZero,
                       ProbeKind::IcmpEcho, ProbeKind::TcpSyn, ProbeKind::UdpZero};
  } else {
    transport_kinds = {ProbeKind::IcmpEcho, ProbeKind::IcmpEcho, ProbeKind::IcmpEcho,
                       ProbeKind::TcpAck,   ProbeKind::TcpAck,   ProbeKind::TcpSyn,
                       ProbeKind::UdpZero,  ProbeKind::UdpZero,  ProbeKind::UdpZero};
  }

  std::uint64_t h = fnv1a64_u64(cfg.seed);
  h = fnv1a64_u64(target.value, h);

  std::vector<ProbeRecord> plan;
  plan.reserve(10);
  for (int i = 0; i < 9; ++i) {
    ProbeRecord rec;
    rec.target = target;
    rec.kind = transport_kinds[static_cast<std::size_t>(i)];
    rec.seq_index = i;
    switch (rec.kind) {
      case ProbeKind::IcmpEcho:
        rec.protocol = Protocol::Icmp;
        rec.payload_len = cfg.icmp_payload_len;
        break;
      case ProbeKind::TcpAck:
      case ProbeKind::TcpSyn:
        rec.protocol = Protocol::Tcp;
        rec.dst_port = cfg.tcp_udp_port;
        if (rec.kind == ProbeKind::TcpSyn) {
          rec.tcp_ack = static_cast<std::uint32_t>(fnv1a64_u64(0x5359u, h));
          if (rec.tcp_ack == 0) rec.tcp_ack = 1;
        }
        break;
      case ProbeKind::UdpZero:
        rec.protocol = Protocol::Udp;
        rec.dst_port = cfg.tcp_udp_port;
        rec.payload_len = cfg.udp_payload_len;
        break;
      default:
        break;
    }
    rec.sent_ipid = plan_ipid(cfg.seed, target, i, plan);
    plan.push_back(rec);
  }

  ProbeRecord snmp;
  snmp.target = target;
  snmp.protocol = Protocol::Snmpv3;
  snmp.kind = ProbeKind::Snmpv3Get;
  snmp.seq_index = 9;
  snmp.dst_port = 161;
  snmp.snmp_msg_id = static_cast<std::uint32_t>(h & 0x7fffffff);
  if (snmp.snmp_msg_id == 0) snmp.snmp_msg_id = 0x1000;
  snmp.sent_ipid = plan_ipid(cfg.seed, target, 9, plan);
  plan.push_back(snmp);
  return plan;
}

double WallClock::now() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void WallClock::sleep_until(double t) {
  double dt = t - now();
  if (dt > 0) std::this_thread::sleep_for(std::chrono::duration<double>(dt));
}

ScanResult execute_scan(std::span<const Ipv4> targets, const ProbePlanConfig& cfg,
                        Transport& transport, const ResponseSink& sink) {
  cfg.validate();
  if (targets.empty()) throw ValidationError("empty target list: nothing to scan");

  struct TargetState {
    std::vector<ProbeRecord> plan;
    ResponseSet set;
    std::size_t next = 0;
    std::uint64_t ready = 0;  // microseconds after scan start
    std::size_t rank = 0;     // shuffled position, tie-break for determinism
    bool failed = false;
  };

  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(fnv1a64_u64(cfg.seed, fnv1a64("scan-order")));
  rng.shuffle(order);

  ScanResult result;
  std::vector<TargetState> states(targets.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    TargetState& st = states[rank];
    st.plan = build_probe_plan(targets[order[rank]], cfg);
    st.set.target = targets[order[rank]];
    st.rank = rank;
  }

  Clock& clock = transport.clock();
  const double start = clock.now();
  // Schedule in integer microseconds, one past the exact reciprocal, so the
  // rate caps hold in every sliding window regardless of float rounding.
  const std::uint64_t per_target_gap_us =
      std::max(static_cast<std::uint64_t>(cfg.inter_probe_gap * 1e6),
               static_cast<std::uint64_t>(1e6 / cfg.per_target_rate) + 1);
  const std::uint64_t global_gap_us = static_cast<std::uint64_t>(1e6 / cfg.global_rate) + 1;
  std::uint64_t next_global = 0;  // offsets from start

  // Earliest-ready target first; rank breaks ties so replays are identical.
  auto cmp = [&states](std::size_t a, std::size_t b) {
    if (states[a].ready != states[b].ready) return states[a].ready > states[b].ready;
    return states[a].rank > states[b].rank;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> queue(cmp);
  for (std::size_t i = 0; i < states.size(); ++i) queue.push(i);

  auto finish_target = [&](TargetState& st) {
    st.set.recompute_responsive();
    if (sink) sink(st.set);
    result.sets.push_back(std::move(st.set));
  };

  while (!queue.empty()) {
    std::size_t idx = queue.top();
    queue.pop();
    TargetState& st = states[idx];

    std::uint64_t send_us = std::max(st.ready, next_global);
    clock.sleep_until(start + static_cast<double>(send_us) * 1e-6);
    ProbeRecord probe = st.plan[st.next];
    probe.sent_at = clock.now();

    result.send_log.push_back({probe.target, probe.protocol, probe.seq_index, probe.sent_at});
    next_global = send_us + global_gap_us;
    st.ready = send_us + per_target_gap_us;

    try {
      ResponseRecord rec = transport.exchange(probe, cfg);
      rec.probe = probe;
      st.set.records.push_back(std::move(rec));
    } catch (const TransportFatalError& e) {
      // Flush whatever finished; callers get partial results plus the flag.
      result.errors.push_back({probe.target, std::string("fatal: ") + e.what()});
      result.aborted = true;
      return result;
    } catch (const TransportSendError& e) {
      result.errors.push_back({probe.target, e.what()});
      st.failed = true;
    }

    if (st.failed) continue;  // drop remaining probes for this target
    if (++st.next < st.plan.size()) {
      queue.push(idx);
    } else {
      finish_target(st);
    }
  }
  return result;
}

std::vector<Ipv4> load_target_list(const std::string& text) {
  std::vector<Ipv4> targets;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    auto hash = line.find('#');
    if (hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    auto addr = Ipv4::try_parse(line);
    if (!addr) throw ParseError("target list line " + std::to_string(lineno) +
                                ": invalid IPv4 '" + line + "'");
    targets.push_back(*addr);
  }
  return targets;
}

}  // namespace lfp
