#include "lfp/sim.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "lfp/features.hpp"

namespace lfp {

using ordered_json = nlohmann::ordered_json;

const IpidMode& StackProfile::ipid_mode(Protocol p) const {
  switch (p) {
    case Protocol::Icmp: return ipid_icmp;
    case Protocol::Tcp: return ipid_tcp;
    default: return ipid_udp;
  }
}

int StackProfile::ittl(Protocol p) const {
  switch (p) {
    case Protocol::Icmp: return ittl_icmp;
    case Protocol::Tcp: return ittl_tcp;
    default: return ittl_udp;
  }
}

void StackProfile::validate() const {
  if (name.empty()) throw ValidationError("profile needs a name");
  if (vendor.empty()) throw ValidationError("profile '" + name + "' needs a vendor");
  if (count < 1) throw ValidationError("profile '" + name + "' count must be >= 1");
  if (snmpv3_fraction < 0.0 || snmpv3_fraction > 1.0)
    throw ValidationError("profile '" + name + "' snmpv3_fraction outside [0, 1]");
  for (int v : {ittl_icmp, ittl_tcp, ittl_udp})
    if (v != 32 && v != 64 && v != 128 && v != 255)
      throw ValidationError("profile '" + name + "' iTTL must be one of 32/64/128/255");
  for (const IpidMode* m : {&ipid_icmp, &ipid_tcp, &ipid_udp}) {
    if (m->kind == IpidMode::Kind::Static && m->static_value == 0)
      throw ValidationError("profile '" + name + "' static IPID must be non-zero");
    if (m->step_jitter < 0)
      throw ValidationError("profile '" + name + "' step jitter must be >= 0");
  }
  if (udp_quote.kind == UdpQuoteKind::Extended &&
      (udp_quote.extended_total_length < 56 || udp_quote.extended_total_length > 1500))
    throw ValidationError("profile '" + name + "' extended quote length out of range");
  if (snmpv3_fraction > 0.0 && engine_pen == 0)
    throw ValidationError("profile '" + name + "' answers SNMPv3 but has no engine_pen");
}

namespace {

const IpidConfig kSimIpidConfig{};

std::string counter_key(const IpidMode& mode, Protocol p) {
  return mode.shared_id ? "shared:" + *mode.shared_id : protocol_name(p);
}

// Independent incremental counters are spread 16k apart so merged sequences
// across them can never sit inside the step threshold by accident.
constexpr std::uint32_t kCounterSpacing = 16384;

}  // namespace

SimRouter::SimRouter(Ipv4 address, StackProfile profile, bool snmp_enabled, std::uint64_t seed,
                     const FleetOptions& opts)
    : address_(address),
      profile_(std::move(profile)),
      snmp_enabled_(snmp_enabled),
      opts_(opts),
      rng_(fnv1a64_u64(address.value, fnv1a64_u64(seed, fnv1a64("sim-router")))) {
  std::uint32_t base = rng_.next_u32() & 0xffff;
  int lane = 0;
  for (Protocol p : {Protocol::Icmp, Protocol::Tcp, Protocol::Udp}) {
    const IpidMode& mode = profile_.ipid_mode(p);
    if (mode.kind != IpidMode::Kind::Incremental) continue;
    std::string key = counter_key(mode, p);
    if (counters_.count(key)) continue;  // shared counter already seeded
    Counter c;
    c.value = mode.start ? *mode.start
                         : (base + static_cast<std::uint32_t>(lane) * kCounterSpacing) & 0xffff;
    counters_[key] = c;
    ++lane;
  }
}

std::uint16_t SimRouter::take_pending(Protocol p, double now) {
  (void)now;
  const IpidMode& mode = profile_.ipid_mode(p);
  std::string key = protocol_name(p);
  auto& queue = pending_[key];
  if (queue.empty()) {
    if (mode.kind == IpidMode::Kind::Random) {
      // Redraw until the triple actually classifies random: distinct values
      // with at least one step beyond the threshold.
      for (;;) {
        std::uint16_t a = static_cast<std::uint16_t>(rng_.next_below(65536));
        std::uint16_t b = static_cast<std::uint16_t>(rng_.next_below(65536));
        std::uint16_t c = static_cast<std::uint16_t>(rng_.next_below(65536));
        std::uint16_t triple[3] = {a, b, c};
        if (classify_ipid_sequence(triple, kSimIpidConfig) == IpidClass::Random) {
          queue = {a, b, c};
          break;
        }
      }
    } else {  // DuplicatePattern: exactly two equal values per triple
      std::uint16_t a = static_cast<std::uint16_t>(rng_.next_below(65536));
      std::uint16_t b = static_cast<std::uint16_t>(rng_.next_below(65536));
      while (b == a) b = static_cast<std::uint16_t>(rng_.next_below(65536));
      queue = {a, b, a};
    }
  }
  std::uint16_t v = queue.front();
  queue.erase(queue.begin());
  return v;
}

std::uint16_t SimRouter::next_ipid(Protocol p, double now) {
  const IpidMode& mode = profile_.ipid_mode(p);
  switch (mode.kind) {
    case IpidMode::Kind::Zero:
      return 0;
    case IpidMode::Kind::Static:
      return mode.static_value;
    case IpidMode::Kind::Random:
    case IpidMode::Kind::DuplicatePattern:
      return take_pending(p, now);
    case IpidMode::Kind::Incremental: {
      Counter& c = counters_[counter_key(mode, p)];
      if (opts_.background_traffic_rate > 0 && now > c.last_advance) {
        c.value += static_cast<std::uint32_t>(
            std::floor(opts_.background_traffic_rate * (now - c.last_advance)));
      }
      c.last_advance = now;
      std::uint16_t out = static_cast<std::uint16_t>(c.value & 0xffff);
      std::uint32_t step = 1;
      if (mode.step_jitter > 0)
        step += static_cast<std::uint32_t>(
            rng_.next_below(static_cast<std::uint64_t>(mode.step_jitter) + 1));
      c.value = (c.value + step) & 0xffff;
      return out;
    }
  }
  return 0;
}

ResponseRecord SimRouter::respond(const ProbeRecord& probe, double now) {
  std::lock_guard<std::mutex> lock(mu_);
  ResponseRecord rec;
  rec.probe = probe;

  if (opts_.drop_probability > 0 && rng_.next_bool(opts_.drop_probability)) return rec;

  auto stamp = [&](ReplyKind kind, int total_length, Protocol ttl_proto) {
    rec.reply_kind = kind;
    rec.reply_ttl = std::max(1, profile_.ittl(ttl_proto) - opts_.synthetic_hops);
    rec.reply_total_length = total_length;
    rec.rtt = 0.001;
  };

  switch (probe.protocol) {
    case Protocol::Icmp: {
      if (!profile_.respond_icmp) return rec;
      stamp(ReplyKind::EchoReply, 20 + 8 + probe.payload_len, Protocol::Icmp);
      rec.reply_ipid = profile_.icmp_echo_ipid ? probe.sent_ipid : next_ipid(Protocol::Icmp, now);
      break;
    }
    case Protocol::Tcp: {
      if (!profile_.respond_tcp) return rec;
      stamp(ReplyKind::TcpRst, 40, Protocol::Tcp);
      rec.reply_ipid = next_ipid(Protocol::Tcp, now);
      if (probe.kind == ProbeKind::TcpSyn)
        rec.tcp_rst_seq = profile_.rst_seq_rule == RstSeqRule::RfcZero ? 0u : probe.tcp_ack;
      else
        rec.tcp_rst_seq = probe.tcp_ack;  // ACK probes reflect their ack field
      break;
    }
    case Protocol::Udp: {
      if (!profile_.respond_udp) return rec;
      int total = 56;
      if (profile_.udp_quote.kind == UdpQuoteKind::Full) total = 56 + probe.payload_len;
      if (profile_.udp_quote.kind == UdpQuoteKind::Extended)
        total = profile_.udp_quote.extended_total_length;
      stamp(ReplyKind::IcmpPortUnreach, total, Protocol::Udp);
      rec.reply_ipid = next_ipid(Protocol::Udp, now);
      break;
    }
    case Protocol::Snmpv3: {
      if (!snmp_enabled_) return rec;
      EngineId engine = EngineId::make(profile_.engine_pen,
                                       (0x0002ull << 32) | address_.value);
      Bytes report = encode_snmpv3_report(engine, probe.snmp_msg_id);
      stamp(ReplyKind::SnmpReport, 20 + 8 + static_cast<int>(report.size()), Protocol::Udp);
      rec.reply_ipid = 0;
      rec.snmp_report = std::move(report);
      break;
    }
  }
  return rec;
}

SimFleet SimFleet::make(const std::vector<StackProfile>& profiles, const FleetOptions& opts) {
  if (profiles.empty()) throw ValidationError("fleet needs at least one profile");
  long long total = 0;
  for (const auto& p : profiles) {
    p.validate();
    total += p.count;
  }
  long long capacity = (1ll << (32 - opts.base_prefix.length)) - 2;
  if (total > capacity)
    throw ValidationError("fleet of " + std::to_string(total) + " routers exceeds " +
                          opts.base_prefix.str() + " capacity of " + std::to_string(capacity));

  SimFleet fleet;
  fleet.opts_ = opts;
  std::uint32_t next_addr = opts.base_prefix.network.value + 1;
  Rng rng(fnv1a64_u64(opts.seed, fnv1a64("sim-fleet")));

  for (const auto& profile : profiles) {
    // Exactly round(count * fraction) members answer SNMPv3, spread by a
    // seeded shuffle, so every profile is represented in labeled data.
    int snmp_count = static_cast<int>(std::lround(profile.snmpv3_fraction * profile.count));
    std::vector<bool> snmp_on(static_cast<std::size_t>(profile.count), false);
    for (int i = 0; i < snmp_count; ++i) snmp_on[static_cast<std::size_t>(i)] = true;
    rng.shuffle(snmp_on);

    for (int i = 0; i < profile.count; ++i) {
      Ipv4 addr(next_addr++);
      StackProfile effective = profile;
      if (opts.mutation_rate > 0 && rng.next_bool(opts.mutation_rate)) {
        // One visible config tweak per mutated router.
        const int ttls[] = {32, 64, 128, 255};
        switch (rng.next_below(5)) {
          case 0: effective.ittl_icmp = ttls[rng.next_below(4)]; break;
          case 1: effective.ittl_tcp = ttls[rng.next_below(4)]; break;
          case 2: effective.ittl_udp = ttls[rng.next_below(4)]; break;
          case 3:
            effective.udp_quote.kind = effective.udp_quote.kind == UdpQuoteKind::Minimal
                                           ? UdpQuoteKind::Full
                                           : UdpQuoteKind::Minimal;
            break;
          default:
            effective.rst_seq_rule = effective.rst_seq_rule == RstSeqRule::RfcZero
                                         ? RstSeqRule::NonZero
                                         : RstSeqRule::RfcZero;
            break;
        }
      }
      fleet.routers_.push_back(std::make_unique<SimRouter>(
          addr, std::move(effective), snmp_on[static_cast<std::size_t>(i)], opts.seed, opts));
      fleet.by_address_[addr] = fleet.routers_.back().get();
    }
  }
  return fleet;
}

SimRouter* SimFleet::find(Ipv4 address) {
  auto it = by_address_.find(address);
  return it == by_address_.end() ? nullptr : it->second;
}

std::vector<GroundTruthEntry> SimFleet::ground_truth() const {
  std::vector<GroundTruthEntry> out;
  out.reserve(routers_.size());
  for (const auto& r : routers_)
    out.push_back({r->address(), r->profile().vendor, r->profile().name, r->snmp_enabled()});
  return out;
}

std::vector<Ipv4> SimFleet::addresses() const {
  std::vector<Ipv4> out;
  out.reserve(routers_.size());
  for (const auto& r : routers_) out.push_back(r->address());
  return out;
}

std::string SimFleet::ground_truth_csv(const std::vector<GroundTruthEntry>& entries) {
  std::string out = "address,vendor,profile,snmpv3_enabled\n";
  for (const auto& e : entries)
    out += e.address.str() + "," + e.vendor + "," + e.profile + "," +
           (e.snmpv3_enabled ? "1" : "0") + "\n";
  return out;
}

std::vector<GroundTruthEntry> SimFleet::parse_ground_truth_csv(std::string_view text) {
  std::vector<GroundTruthEntry> out;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line == "address,vendor,profile,snmpv3_enabled") continue;
    auto fields = split(line, ',');
    if (fields.size() != 4)
      throw ParseError("labels line " + std::to_string(lineno) + " needs 4 fields");
    out.push_back({Ipv4::parse(fields[0]), fields[1], fields[2], fields[3] == "1"});
  }
  return out;
}

ResponseRecord SimTransport::exchange(const ProbeRecord& probe, const ProbePlanConfig& cfg) {
  (void)cfg;
  SimRouter* router = fleet_.find(probe.target);
  ResponseRecord rec;
  rec.probe = probe;
  if (!router) return rec;  // address not in fleet: silence, like a filtered IP
  return router->respond(probe, clock_.now());
}

namespace {

IpidMode incremental(std::optional<std::string> shared = std::nullopt, int jitter = 0) {
  IpidMode m;
  m.kind = IpidMode::Kind::Incremental;
  m.shared_id = std::move(shared);
  m.step_jitter = jitter;
  return m;
}

IpidMode random_mode() { return IpidMode{}; }

IpidMode static_mode(std::uint16_t v) {
  IpidMode m;
  m.kind = IpidMode::Kind::Static;
  m.static_value = v;
  return m;
}

IpidMode zero_mode() {
  IpidMode m;
  m.kind = IpidMode::Kind::Zero;
  return m;
}

IpidMode dup_mode() {
  IpidMode m;
  m.kind = IpidMode::Kind::DuplicatePattern;
  return m;
}

StackProfile base_profile(std::string name, std::string vendor, std::uint32_t pen) {
  StackProfile p;
  p.name = std::move(name);
  p.vendor = std::move(vendor);
  p.engine_pen = pen;
  p.count = 200;
  p.snmpv3_fraction = 0.6;
  return p;
}

}  // namespace

StackProfile juniper_sample_profile() {
  StackProfile p = base_profile("juniper-default", "Juniper", 2636);
  p.ipid_icmp = random_mode();
  p.ipid_tcp = random_mode();
  p.ipid_udp = random_mode();
  p.ittl_udp = 255;
  p.ittl_icmp = 64;
  p.ittl_tcp = 64;
  return p;  // False,r,r,r,False,False,False,False,255,64,64,84,40,56,0
}

StackProfile cisco_sample_profile() {
  StackProfile p = juniper_sample_profile();
  p.name = "cisco-classic";
  p.vendor = "Cisco";
  p.engine_pen = 9;
  p.ittl_icmp = 255;
  return p;  // the same row with ICMP iTTL 255
}

std::vector<StackProfile> default_demo_profiles() {
  std::vector<StackProfile> out;
  out.push_back(juniper_sample_profile());
  out.push_back(cisco_sample_profile());

  StackProfile cisco_ios = base_profile("cisco-ios", "Cisco", 9);
  cisco_ios.icmp_echo_ipid = true;
  cisco_ios.ipid_tcp = random_mode();
  cisco_ios.ipid_udp = incremental();
  cisco_ios.ittl_icmp = cisco_ios.ittl_tcp = cisco_ios.ittl_udp = 255;
  cisco_ios.rst_seq_rule = RstSeqRule::NonZero;
  out.push_back(cisco_ios);

  StackProfile huawei = base_profile("huawei-vrp", "Huawei", 2011);
  huawei.icmp_echo_ipid = true;
  huawei.ipid_tcp = incremental("tu");
  huawei.ipid_udp = incremental("tu");
  huawei.ittl_icmp = huawei.ittl_tcp = huawei.ittl_udp = 255;
  out.push_back(huawei);

  StackProfile juniper_shared = base_profile("juniper-shared", "Juniper", 2636);
  juniper_shared.ipid_icmp = incremental("all");
  juniper_shared.ipid_tcp = incremental("all");
  juniper_shared.ipid_udp = incremental("all");
  juniper_shared.ittl_udp = 255;
  juniper_shared.ittl_icmp = juniper_shared.ittl_tcp = 64;
  out.push_back(juniper_shared);

  StackProfile mikrotik = base_profile("mikrotik-routeros", "MikroTik", 14988);
  mikrotik.ipid_icmp = incremental();
  mikrotik.ipid_tcp = static_mode(0x00ff);
  mikrotik.ipid_udp = dup_mode();
  mikrotik.ittl_icmp = mikrotik.ittl_tcp = mikrotik.ittl_udp = 64;
  mikrotik.udp_quote.kind = UdpQuoteKind::Full;
  out.push_back(mikrotik);

  StackProfile h3c = base_profile("h3c-comware", "H3C", 25506);
  h3c.ipid_icmp = incremental();
  h3c.ipid_tcp = random_mode();
  h3c.ipid_udp = random_mode();
  h3c.ittl_icmp = h3c.ittl_tcp = h3c.ittl_udp = 255;
  out.push_back(h3c);

  StackProfile nokia = base_profile("nokia-sros", "Alcatel/Nokia", 6527);
  nokia.ipid_icmp = random_mode();
  nokia.ipid_tcp = static_mode(0x4000);
  nokia.ipid_udp = random_mode();
  nokia.ittl_udp = 255;
  nokia.ittl_icmp = nokia.ittl_tcp = 64;
  nokia.udp_quote.kind = UdpQuoteKind::Full;
  out.push_back(nokia);

  StackProfile ericsson = base_profile("ericsson-router", "Ericsson", 193);
  ericsson.icmp_echo_ipid = true;
  ericsson.ipid_tcp = incremental("tu");
  ericsson.ipid_udp = incremental("tu");
  ericsson.ittl_icmp = ericsson.ittl_udp = 255;
  ericsson.ittl_tcp = 64;
  out.push_back(ericsson);

  StackProfile netsnmp = base_profile("netsnmp-stack", "net-snmp", 8072);
  netsnmp.ipid_icmp = zero_mode();
  netsnmp.ipid_tcp = incremental();
  netsnmp.ipid_udp = incremental();
  netsnmp.ittl_icmp = netsnmp.ittl_tcp = netsnmp.ittl_udp = 64;
  netsnmp.udp_quote.kind = UdpQuoteKind::Full;
  out.push_back(netsnmp);

  return out;
}

std::vector<StackProfile> colliding_pair_profiles() {
  // Identical stacks, different vendors: every signature they produce is
  // non-unique by construction.
  StackProfile brocade = base_profile("brocade-like", "Brocade", 1588);
  brocade.ipid_icmp = incremental("it");
  brocade.ipid_tcp = incremental("it");
  brocade.ipid_udp = random_mode();
  brocade.ittl_icmp = brocade.ittl_tcp = brocade.ittl_udp = 64;
  brocade.udp_quote.kind = UdpQuoteKind::Full;

  StackProfile ruijie = brocade;
  ruijie.name = "ruijie-like";
  ruijie.vendor = "Ruijie";
  ruijie.engine_pen = 4881;
  return {brocade, ruijie};
}

namespace {

IpidMode ipid_mode_from_json(const ordered_json& j, const std::string& where) {
  IpidMode m;
  std::string mode;
  if (j.is_string()) {
    mode = j.get<std::string>();
  } else if (j.is_object()) {
    mode = j.at("mode").get<std::string>();
    if (j.contains("start")) m.start = j["start"].get<std::uint16_t>();
    if (j.contains("value")) m.static_value = j["value"].get<std::uint16_t>();
    if (j.contains("jitter")) m.step_jitter = j["jitter"].get<int>();
    if (j.contains("shared")) m.shared_id = j["shared"].get<std::string>();
  } else {
    throw ParseError("fleet spec: " + where + " ipid mode must be string or object");
  }
  if (mode == "incremental") m.kind = IpidMode::Kind::Incremental;
  else if (mode == "random") m.kind = IpidMode::Kind::Random;
  else if (mode == "static") m.kind = IpidMode::Kind::Static;
  else if (mode == "zero") m.kind = IpidMode::Kind::Zero;
  else if (mode == "duplicate") m.kind = IpidMode::Kind::DuplicatePattern;
  else throw ParseError("fleet spec: unknown ipid mode '" + mode + "' in " + where);
  return m;
}

ordered_json ipid_mode_to_json(const IpidMode& m) {
  const char* name = "random";
  switch (m.kind) {
    case IpidMode::Kind::Incremental: name = "incremental"; break;
    case IpidMode::Kind::Random: name = "random"; break;
    case IpidMode::Kind::Static: name = "static"; break;
    case IpidMode::Kind::Zero: name = "zero"; break;
    case IpidMode::Kind::DuplicatePattern: name = "duplicate"; break;
  }
  bool plain = !m.start && !m.shared_id && m.step_jitter == 0 &&
               m.kind != IpidMode::Kind::Static;
  if (plain) return name;
  ordered_json j;
  j["mode"] = name;
  if (m.start) j["start"] = *m.start;
  if (m.kind == IpidMode::Kind::Static) j["value"] = m.static_value;
  if (m.step_jitter != 0) j["jitter"] = m.step_jitter;
  if (m.shared_id) j["shared"] = *m.shared_id;
  return j;
}

}  // namespace

std::vector<StackProfile> SimFleet::profiles_from_spec_json(std::string_view text,
                                                            FleetOptions& opts) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("fleet spec is not valid JSON: ") + e.what(),
                     static_cast<std::size_t>(e.byte));
  }
  try {
    if (doc.contains("seed")) opts.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("base_prefix"))
      opts.base_prefix = Ipv4Prefix::parse(doc["base_prefix"].get<std::string>());
    if (doc.contains("synthetic_hops")) opts.synthetic_hops = doc["synthetic_hops"].get<int>();
    if (doc.contains("background_traffic_rate"))
      opts.background_traffic_rate = doc["background_traffic_rate"].get<double>();
    if (doc.contains("drop_probability"))
      opts.drop_probability = doc["drop_probability"].get<double>();
    if (doc.contains("mutation_rate")) opts.mutation_rate = doc["mutation_rate"].get<double>();

    std::vector<StackProfile> profiles;
    for (const auto& p : doc.at("profiles")) {
      StackProfile prof;
      prof.name = p.at("name").get<std::string>();
      prof.vendor = p.at("vendor").get<std::string>();
      prof.count = p.at("count").get<int>();
      if (p.contains("engine_pen")) prof.engine_pen = p["engine_pen"].get<std::uint32_t>();
      if (p.contains("snmpv3_fraction"))
        prof.snmpv3_fraction = p["snmpv3_fraction"].get<double>();
      if (p.contains("icmp_echo_ipid")) prof.icmp_echo_ipid = p["icmp_echo_ipid"].get<bool>();
      if (p.contains("ipid")) {
        const auto& ipid = p["ipid"];
        if (ipid.contains("icmp"))
          prof.ipid_icmp = ipid_mode_from_json(ipid["icmp"], prof.name + ".icmp");
        if (ipid.contains("tcp"))
          prof.ipid_tcp = ipid_mode_from_json(ipid["tcp"], prof.name + ".tcp");
        if (ipid.contains("udp"))
          prof.ipid_udp = ipid_mode_from_json(ipid["udp"], prof.name + ".udp");
      }
      if (p.contains("ittl")) {
        const auto& ittl = p["ittl"];
        if (ittl.contains("icmp")) prof.ittl_icmp = ittl["icmp"].get<int>();
        if (ittl.contains("tcp")) prof.ittl_tcp = ittl["tcp"].get<int>();
        if (ittl.contains("udp")) prof.ittl_udp = ittl["udp"].get<int>();
      }
      if (p.contains("udp_quote")) {
        const auto& q = p["udp_quote"];
        if (q.is_string()) {
          std::string kind = q.get<std::string>();
          if (kind == "minimal") prof.udp_quote.kind = UdpQuoteKind::Minimal;
          else if (kind == "full") prof.udp_quote.kind = UdpQuoteKind::Full;
          else throw ParseError("fleet spec: unknown udp_quote '" + kind + "'");
        } else {
          prof.udp_quote.kind = UdpQuoteKind::Extended;
          prof.udp_quote.extended_total_length = q.at("total_length").get<int>();
        }
      }
      if (p.contains("rst_seq")) {
        std::string rule = p["rst_seq"].get<std::string>();
        if (rule == "zero") prof.rst_seq_rule = RstSeqRule::RfcZero;
        else if (rule == "nonzero") prof.rst_seq_rule = RstSeqRule::NonZero;
        else throw ParseError("fleet spec: unknown rst_seq '" + rule + "'");
      }
      if (p.contains("respond")) {
        const auto& r = p["respond"];
        if (r.contains("icmp")) prof.respond_icmp = r["icmp"].get<bool>();
        if (r.contains("tcp")) prof.respond_tcp = r["tcp"].get<bool>();
        if (r.contains("udp")) prof.respond_udp = r["udp"].get<bool>();
      }
      prof.validate();
      profiles.push_back(std::move(prof));
    }
    if (profiles.empty()) throw ParseError("fleet spec has no profiles");
    return profiles;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("fleet spec field error: ") + e.what());
  }
}

SimFleet SimFleet::from_spec_json(std::string_view text) {
  FleetOptions opts;
  std::vector<StackProfile> profiles = profiles_from_spec_json(text, opts);
  return make(profiles, opts);
}

std::string demo_fleet_spec_json() {
  ordered_json doc;
  doc["seed"] = 42;
  doc["base_prefix"] = "198.18.0.0/15";
  doc["synthetic_hops"] = 3;
  doc["profiles"] = ordered_json::array();
  auto profiles = default_demo_profiles();
  auto pair = colliding_pair_profiles();
  profiles.insert(profiles.end(), pair.begin(), pair.end());
  for (const auto& prof : profiles) {
    ordered_json p;
    p["name"] = prof.name;
    p["vendor"] = prof.vendor;
    p["count"] = prof.count;
    p["engine_pen"] = prof.engine_pen;
    p["snmpv3_fraction"] = prof.snmpv3_fraction;
    p["icmp_echo_ipid"] = prof.icmp_echo_ipid;
    ordered_json ipid;
    ipid["icmp"] = ipid_mode_to_json(prof.ipid_icmp);
    ipid["tcp"] = ipid_mode_to_json(prof.ipid_tcp);
    ipid["udp"] = ipid_mode_to_json(prof.ipid_udp);
    p["ipid"] = ipid;
    ordered_json ittl;
    ittl["icmp"] = prof.ittl_icmp;
    ittl["tcp"] = prof.ittl_tcp;
    ittl["udp"] = prof.ittl_udp;
    p["ittl"] = ittl;
    if (prof.udp_quote.kind == UdpQuoteKind::Extended) {
      ordered_json q;
      q["total_length"] = prof.udp_quote.extended_total_length;
      p["udp_quote"] = q;
    } else {
      p["udp_quote"] = prof.udp_quote.kind == UdpQuoteKind::Full ? "full" : "minimal";
    }
    p["rst_seq"] = prof.rst_seq_rule == RstSeqRule::RfcZero ? "zero" : "nonzero";
    ordered_json respond;
    respond["icmp"] = prof.respond_icmp;
    respond["tcp"] = prof.respond_tcp;
    respond["udp"] = prof.respond_udp;
    p["respond"] = respond;
    doc["profiles"].push_back(std::move(p));
  }
  return doc.dump(2) + "\n";
}

}  // namespace lfp
