#include "lfp/features.hpp"

#include <algorithm>
#include <array>

namespace lfp {

std::string ipid_class_token(IpidClass c) {
  switch (c) {
    case IpidClass::Incremental: return "i";
    case IpidClass::Random: return "r";
    case IpidClass::Static: return "s";
    case IpidClass::Zero: return "z";
    case IpidClass::Duplicate: return "dup";
    case IpidClass::Echo: return "echo";
  }
  return "?";
}

IpidClass ipid_class_from_token(std::string_view token) {
  if (token == "i") return IpidClass::Incremental;
  if (token == "r") return IpidClass::Random;
  if (token == "s") return IpidClass::Static;
  if (token == "z") return IpidClass::Zero;
  if (token == "dup") return IpidClass::Duplicate;
  if (token == "echo") return IpidClass::Echo;
  throw ParseError("unknown IPID class token '" + std::string(token) + "'");
}

void IpidConfig::validate() const {
  if (modulus != 65536) throw ValidationError("IPID modulus must be 65536");
  if (step_threshold <= 0 || step_threshold >= modulus)
    throw ValidationError("IPID step threshold must be in (0, modulus)");
}

int infer_ittl(int observed_ttl) {
  if (observed_ttl < 1 || observed_ttl > 255)
    throw ValidationError("observed TTL " + std::to_string(observed_ttl) + " outside 1..255");
  for (int cls : {32, 64, 128})
    if (observed_ttl <= cls) return cls;
  return 255;
}

IpidClass classify_ipid_sequence(std::span<const std::uint16_t> ipids, const IpidConfig& cfg) {
  cfg.validate();
  if (ipids.size() != 3)
    throw ValidationError("IPID classification needs exactly 3 values, got " +
                          std::to_string(ipids.size()));
  const std::uint16_t a = ipids[0], b = ipids[1], c = ipids[2];
  if (a == 0 && b == 0 && c == 0) return IpidClass::Zero;
  if (a == b && b == c) return IpidClass::Static;
  if (a == b || b == c || a == c) return IpidClass::Duplicate;
  // Steps wrap through the top of the 16-bit space.
  auto step = [&](std::uint16_t from, std::uint16_t to) {
    return static_cast<int>((static_cast<int>(to) - static_cast<int>(from) + cfg.modulus) %
                            cfg.modulus);
  };
  int max_step = std::max(step(a, b), step(b, c));
  return max_step <= cfg.step_threshold ? IpidClass::Incremental : IpidClass::Random;
}

namespace {

// Per-protocol counter class as used by the vector: the echo sentinel
// replaces the ICMP class when the stack reflects request IPIDs.
IpidClass protocol_ipid_class(const ResponseSet& responses, Protocol p, const IpidConfig& cfg) {
  auto recs = responses.protocol_records(p);
  std::array<std::uint16_t, 3> ipids{};
  std::size_t n = 0;
  for (const auto* rec : recs)
    if (rec->reply_ipid && n < 3) ipids[n++] = *rec->reply_ipid;
  return classify_ipid_sequence(std::span<const std::uint16_t>(ipids.data(), n), cfg);
}

bool icmp_echoes_ipid(const ResponseSet& responses) {
  for (const auto* rec : responses.protocol_records(Protocol::Icmp))
    if (!rec->reply_ipid || *rec->reply_ipid != rec->probe.sent_ipid) return false;
  return true;
}

}  // namespace

bool detect_shared_counter(const ResponseSet& responses, ProtocolSet protocols,
                           const IpidConfig& cfg) {
  cfg.validate();
  if (protocols.count() < 2) return false;
  if (!responses.responsive.contains_all(protocols)) return false;
  for (Protocol p : protocols.protocols()) {
    IpidClass cls = protocol_ipid_class(responses, p, cfg);
    if (p == Protocol::Icmp && icmp_echoes_ipid(responses)) return false;
    if (cls != IpidClass::Incremental) return false;
  }
  // Merge the named protocols' replies in send order and walk the steps.
  std::vector<std::uint16_t> merged;
  for (const auto& rec : responses.records)
    if (protocols.contains(rec.probe.protocol) && rec.reply_ipid)
      merged.push_back(*rec.reply_ipid);
  for (std::size_t i = 1; i < merged.size(); ++i) {
    int step = (static_cast<int>(merged[i]) - static_cast<int>(merged[i - 1]) + cfg.modulus) %
               cfg.modulus;
    if (step > cfg.step_threshold) return false;
  }
  return true;
}

FeatureVector extract_features(const ResponseSet& responses, const IpidConfig& cfg) {
  cfg.validate();
  FeatureVector v;
  const ProtocolSet resp = responses.responsive;
  const bool icmp = resp.contains(Protocol::Icmp);
  const bool tcp = resp.contains(Protocol::Tcp);
  const bool udp = resp.contains(Protocol::Udp);

  auto first_reply = [&](Protocol p) -> const ResponseRecord* {
    for (const auto& rec : responses.records)
      if (rec.probe.protocol == p && rec.answered()) return &rec;
    return nullptr;
  };

  if (icmp) {
    bool echo = icmp_echoes_ipid(responses);
    v.icmp_ipid_echo = echo;
    v.icmp_ipid = echo ? IpidClass::Echo : protocol_ipid_class(responses, Protocol::Icmp, cfg);
    const auto* first = first_reply(Protocol::Icmp);
    v.icmp_ittl = infer_ittl(*first->reply_ttl);
    v.icmp_resp_size = *first->reply_total_length;
  }
  if (tcp) {
    v.tcp_ipid = protocol_ipid_class(responses, Protocol::Tcp, cfg);
    const auto* first = first_reply(Protocol::Tcp);
    v.tcp_ittl = infer_ittl(*first->reply_ttl);
    v.tcp_resp_size = *first->reply_total_length;
    // The sequence-number feature reads only the RST elicited by the SYN.
    for (const auto& rec : responses.records)
      if (rec.probe.kind == ProbeKind::TcpSyn && rec.tcp_rst_seq)
        v.tcp_syn_seq = (*rec.tcp_rst_seq == 0) ? TcpSynSeq::Zero : TcpSynSeq::NonZero;
  }
  if (udp) {
    v.udp_ipid = protocol_ipid_class(responses, Protocol::Udp, cfg);
    const auto* first = first_reply(Protocol::Udp);
    v.udp_ittl = infer_ittl(*first->reply_ttl);
    v.udp_resp_size = *first->reply_total_length;
  }

  if (icmp && tcp && udp)
    v.shared_all = detect_shared_counter(responses, ProtocolSet::full(), cfg);
  if (tcp && icmp)
    v.shared_tcp_icmp =
        detect_shared_counter(responses, ProtocolSet::of({Protocol::Tcp, Protocol::Icmp}), cfg);
  if (udp && icmp)
    v.shared_udp_icmp =
        detect_shared_counter(responses, ProtocolSet::of({Protocol::Udp, Protocol::Icmp}), cfg);
  if (tcp && udp)
    v.shared_tcp_udp =
        detect_shared_counter(responses, ProtocolSet::of({Protocol::Tcp, Protocol::Udp}), cfg);
  return v;
}

namespace {

const ProtocolSet kIcmpOnly = ProtocolSet::of({Protocol::Icmp});
const ProtocolSet kTcpOnly = ProtocolSet::of({Protocol::Tcp});
const ProtocolSet kUdpOnly = ProtocolSet::of({Protocol::Udp});
const ProtocolSet kTcpIcmp = ProtocolSet::of({Protocol::Tcp, Protocol::Icmp});
const ProtocolSet kUdpIcmp = ProtocolSet::of({Protocol::Udp, Protocol::Icmp});
const ProtocolSet kTcpUdp = ProtocolSet::of({Protocol::Tcp, Protocol::Udp});

// Feature positions in canonical (Table) order.
const std::array<ProtocolSet, 15> kDependencies = {
    kIcmpOnly,             // icmp_ipid_echo
    kIcmpOnly,             // icmp ipid counter
    kTcpOnly,              // tcp ipid counter
    kUdpOnly,              // udp ipid counter
    ProtocolSet::full(),   // shared all
    kTcpIcmp,              // shared tcp+icmp
    kUdpIcmp,              // shared udp+icmp
    kTcpUdp,               // shared tcp+udp
    kUdpOnly,              // udp ittl
    kIcmpOnly,             // icmp ittl
    kTcpOnly,              // tcp ittl
    kIcmpOnly,             // icmp response size
    kTcpOnly,              // tcp response size
    kUdpOnly,              // udp response size
    kTcpOnly,              // tcp syn sequence
};

std::string bool_token(bool v) { return v ? "True" : "False"; }

bool bool_from_token(std::string_view t) {
  if (t == "True") return true;
  if (t == "False") return false;
  throw ParseError("expected True/False, got '" + std::string(t) + "'");
}

int int_from_token(std::string_view t) {
  if (t.empty()) throw ParseError("empty numeric token");
  int v = 0;
  for (char ch : t) {
    if (ch < '0' || ch > '9') throw ParseError("bad numeric token '" + std::string(t) + "'");
    v = v * 10 + (ch - '0');
    if (v > 1 << 20) throw ParseError("numeric token out of range '" + std::string(t) + "'");
  }
  return v;
}

}  // namespace

ProtocolSet feature_dependencies(int position) {
  return kDependencies[static_cast<std::size_t>(position)];
}

ProtocolSet FeatureVector::protocols() const {
  ProtocolSet s;
  if (icmp_ipid) s.add(Protocol::Icmp);
  if (tcp_ipid) s.add(Protocol::Tcp);
  if (udp_ipid) s.add(Protocol::Udp);
  return s;
}

FeatureVector FeatureVector::project(ProtocolSet subset) const {
  FeatureVector out;
  auto keep = [&](int pos) { return subset.contains_all(kDependencies[std::size_t(pos)]); };
  if (keep(0)) out.icmp_ipid_echo = icmp_ipid_echo;
  if (keep(1)) out.icmp_ipid = icmp_ipid;
  if (keep(2)) out.tcp_ipid = tcp_ipid;
  if (keep(3)) out.udp_ipid = udp_ipid;
  if (keep(4)) out.shared_all = shared_all;
  if (keep(5)) out.shared_tcp_icmp = shared_tcp_icmp;
  if (keep(6)) out.shared_udp_icmp = shared_udp_icmp;
  if (keep(7)) out.shared_tcp_udp = shared_tcp_udp;
  if (keep(8)) out.udp_ittl = udp_ittl;
  if (keep(9)) out.icmp_ittl = icmp_ittl;
  if (keep(10)) out.tcp_ittl = tcp_ittl;
  if (keep(11)) out.icmp_resp_size = icmp_resp_size;
  if (keep(12)) out.tcp_resp_size = tcp_resp_size;
  if (keep(13)) out.udp_resp_size = udp_resp_size;
  if (keep(14)) out.tcp_syn_seq = tcp_syn_seq;
  return out;
}

std::string FeatureVector::canonical() const {
  std::array<std::string, 15> tokens;
  tokens.fill("-");
  if (icmp_ipid_echo) tokens[0] = bool_token(*icmp_ipid_echo);
  if (icmp_ipid) tokens[1] = ipid_class_token(*icmp_ipid);
  if (tcp_ipid) tokens[2] = ipid_class_token(*tcp_ipid);
  if (udp_ipid) tokens[3] = ipid_class_token(*udp_ipid);
  if (shared_all) tokens[4] = bool_token(*shared_all);
  if (shared_tcp_icmp) tokens[5] = bool_token(*shared_tcp_icmp);
  if (shared_udp_icmp) tokens[6] = bool_token(*shared_udp_icmp);
  if (shared_tcp_udp) tokens[7] = bool_token(*shared_tcp_udp);
  if (udp_ittl) tokens[8] = std::to_string(*udp_ittl);
  if (icmp_ittl) tokens[9] = std::to_string(*icmp_ittl);
  if (tcp_ittl) tokens[10] = std::to_string(*tcp_ittl);
  if (icmp_resp_size) tokens[11] = std::to_string(*icmp_resp_size);
  if (tcp_resp_size) tokens[12] = std::to_string(*tcp_resp_size);
  if (udp_resp_size) tokens[13] = std::to_string(*udp_resp_size);
  if (tcp_syn_seq) tokens[14] = (*tcp_syn_seq == TcpSynSeq::Zero) ? "0" : "1";
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ",";
    out += tokens[i];
  }
  return out;
}

FeatureVector FeatureVector::from_canonical(std::string_view key) {
  auto tokens = split(key, ',');
  if (tokens.size() != 15)
    throw ParseError("feature key needs 15 tokens, got " + std::to_string(tokens.size()));
  FeatureVector v;
  auto present = [&](int i) { return tokens[std::size_t(i)] != "-"; };
  if (present(0)) v.icmp_ipid_echo = bool_from_token(tokens[0]);
  if (present(1)) v.icmp_ipid = ipid_class_from_token(tokens[1]);
  if (present(2)) v.tcp_ipid = ipid_class_from_token(tokens[2]);
  if (present(3)) v.udp_ipid = ipid_class_from_token(tokens[3]);
  if (present(4)) v.shared_all = bool_from_token(tokens[4]);
  if (present(5)) v.shared_tcp_icmp = bool_from_token(tokens[5]);
  if (present(6)) v.shared_udp_icmp = bool_from_token(tokens[6]);
  if (present(7)) v.shared_tcp_udp = bool_from_token(tokens[7]);
  if (present(8)) v.udp_ittl = int_from_token(tokens[8]);
  if (present(9)) v.icmp_ittl = int_from_token(tokens[9]);
  if (present(10)) v.tcp_ittl = int_from_token(tokens[10]);
  if (present(11)) v.icmp_resp_size = int_from_token(tokens[11]);
  if (present(12)) v.tcp_resp_size = int_from_token(tokens[12]);
  if (present(13)) v.udp_resp_size = int_from_token(tokens[13]);
  if (present(14)) {
    if (tokens[14] == "0") v.tcp_syn_seq = TcpSynSeq::Zero;
    else if (tokens[14] == "1") v.tcp_syn_seq = TcpSynSeq::NonZero;
    else throw ParseError("tcp_syn_seq token must be 0 or 1, got '" + tokens[14] + "'");
  }
  // Presence must match the responsive subset exactly: a field is there iff
  // all protocols it depends on are covered.
  ProtocolSet protos = v.protocols();
  for (int i = 0; i < 15; ++i) {
    bool covered = protos.contains_all(kDependencies[std::size_t(i)]);
    if (present(i) && !covered)
      throw ParseError("feature key token " + std::to_string(i) +
                       " present without its responsive protocols");
    if (!present(i) && covered)
      throw ParseError("feature key token " + std::to_string(i) +
                       " missing despite responsive protocols");
  }
  return v;
}

}  // namespace lfp
