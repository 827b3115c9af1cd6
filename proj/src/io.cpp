#include "lfp/io.hpp"

#include <json.hpp>

namespace lfp {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json record_to_json(const ResponseRecord& rec) {
  ordered_json r;
  r["protocol"] = protocol_name(rec.probe.protocol);
  r["probe_kind"] = probe_kind_name(rec.probe.kind);
  r["seq_index"] = rec.probe.seq_index;
  r["sent_ipid"] = rec.probe.sent_ipid;
  r["sent_at"] = rec.probe.sent_at;
  if (rec.probe.dst_port) r["dst_port"] = rec.probe.dst_port;
  if (rec.probe.payload_len) r["payload_len"] = rec.probe.payload_len;
  if (rec.probe.tcp_ack) r["tcp_ack"] = rec.probe.tcp_ack;
  if (rec.probe.snmp_msg_id) r["snmp_msg_id"] = rec.probe.snmp_msg_id;
  r["reply_kind"] = reply_kind_name(rec.reply_kind);
  if (rec.reply_ipid) r["reply_ipid"] = *rec.reply_ipid;
  if (rec.reply_ttl) r["reply_ttl"] = *rec.reply_ttl;
  if (rec.reply_total_length) r["reply_total_length"] = *rec.reply_total_length;
  if (rec.tcp_rst_seq) r["tcp_rst_seq"] = *rec.tcp_rst_seq;
  if (rec.rtt) r["rtt"] = *rec.rtt;
  if (rec.snmp_report) r["snmp_report"] = bytes_to_hex(*rec.snmp_report);
  return r;
}

ResponseRecord record_from_json(const ordered_json& r, Ipv4 target) {
  ResponseRecord rec;
  rec.probe.target = target;
  rec.probe.protocol = protocol_from_name(r.at("protocol").get<std::string>());
  rec.probe.kind = probe_kind_from_name(r.at("probe_kind").get<std::string>());
  rec.probe.seq_index = r.at("seq_index").get<int>();
  rec.probe.sent_ipid = r.at("sent_ipid").get<std::uint16_t>();
  rec.probe.sent_at = r.at("sent_at").get<double>();
  if (r.contains("dst_port")) rec.probe.dst_port = r["dst_port"].get<std::uint16_t>();
  if (r.contains("payload_len")) rec.probe.payload_len = r["payload_len"].get<int>();
  if (r.contains("tcp_ack")) rec.probe.tcp_ack = r["tcp_ack"].get<std::uint32_t>();
  if (r.contains("snmp_msg_id")) rec.probe.snmp_msg_id = r["snmp_msg_id"].get<std::uint32_t>();
  rec.reply_kind = reply_kind_from_name(r.at("reply_kind").get<std::string>());
  if (r.contains("reply_ipid")) rec.reply_ipid = r["reply_ipid"].get<std::uint16_t>();
  if (r.contains("reply_ttl")) rec.reply_ttl = r["reply_ttl"].get<int>();
  if (r.contains("reply_total_length"))
    rec.reply_total_length = r["reply_total_length"].get<int>();
  if (r.contains("tcp_rst_seq")) rec.tcp_rst_seq = r["tcp_rst_seq"].get<std::uint32_t>();
  if (r.contains("rtt")) rec.rtt = r["rtt"].get<double>();
  if (r.contains("snmp_report"))
    rec.snmp_report = hex_to_bytes(r["snmp_report"].get<std::string>());
  if (rec.reply_kind == ReplyKind::None &&
      (rec.reply_ipid || rec.reply_ttl || rec.reply_total_length || rec.tcp_rst_seq))
    throw ParseError("record with reply_kind none carries reply fields");
  if (rec.reply_kind == ReplyKind::TcpRst && !rec.tcp_rst_seq)
    throw ParseError("tcp_rst record missing tcp_rst_seq");
  return rec;
}

}  // namespace

std::string response_set_to_json_line(const ResponseSet& set) {
  ordered_json doc;
  doc["target"] = set.target.str();
  ordered_json records = ordered_json::array();
  for (const auto& rec : set.records) records.push_back(record_to_json(rec));
  doc["records"] = records;
  doc["responsive"] = set.responsive.names();
  return doc.dump();
}

ResponseSet response_set_from_json_line(std::string_view line) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scan line is not valid JSON: ") + e.what(),
                     static_cast<std::size_t>(e.byte));
  }
  try {
    ResponseSet set;
    set.target = Ipv4::parse(doc.at("target").get<std::string>());
    for (const auto& r : doc.at("records"))
      set.records.push_back(record_from_json(r, set.target));
    set.recompute_responsive();
    // The stored responsiveness must agree with the records.
    auto stored = doc.at("responsive").get<std::vector<std::string>>();
    if (ProtocolSet::from_names(stored) != set.responsive)
      throw ParseError("stored responsive set disagrees with records for " +
                       set.target.str());
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scan line field error: ") + e.what());
  }
}

std::string response_sets_to_jsonl(std::span<const ResponseSet> sets) {
  std::string out;
  for (const auto& set : sets) {
    out += response_set_to_json_line(set);
    out += "\n";
  }
  return out;
}

std::vector<ResponseSet> response_sets_from_jsonl(std::string_view text) {
  std::vector<ResponseSet> out;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty()) continue;
    try {
      out.push_back(response_set_from_json_line(line));
    } catch (const ParseError& e) {
      throw ParseError("scan file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<LabelEntry> label_responses(std::span<const ResponseSet> sets,
                                        const VendorDict& dict, LabelStats* stats) {
  std::vector<LabelEntry> out;
  LabelStats local;
  for (const auto& set : sets) {
    ++local.responses;
    const ResponseRecord* snmp = set.snmp_record();
    if (!snmp || snmp->reply_kind != ReplyKind::SnmpReport || !snmp->snmp_report) continue;
    ++local.reports;
    try {
      EngineId engine = parse_engine_id(*snmp->snmp_report);
      VendorLabel label = dict.vendor_from_engine_id(engine);
      out.push_back({set.target, label.name, engine.enterprise_number.value_or(0)});
    } catch (const Error&) {
      ++local.parse_failures;
    }
  }
  if (stats) *stats = local;
  return out;
}

std::string labels_to_csv(std::span<const LabelEntry> labels) {
  std::string out = "address,vendor,pen\n";
  for (const auto& label : labels)
    out += label.address.str() + "," + label.vendor + "," + std::to_string(label.pen) + "\n";
  return out;
}

std::vector<LabelEntry> labels_from_csv(std::string_view text) {
  // Accepts the label stage's "address,vendor,pen" layout and the
  // simulator's ground-truth "address,vendor,profile,snmpv3_enabled" layout.
  std::vector<LabelEntry> out;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line == "address,vendor,pen" ||
        line == "address,vendor,profile,snmpv3_enabled")
      continue;
    auto fields = split(line, ',');
    if (fields.size() != 3 && fields.size() != 4)
      throw ParseError("labels line " + std::to_string(lineno) +
                       " needs address,vendor,pen or a ground-truth row");
    LabelEntry entry;
    entry.address = Ipv4::parse(fields[0]);
    entry.vendor = fields[1];
    if (fields.size() == 3) {
      try {
        entry.pen = static_cast<std::uint32_t>(std::stoul(fields[2]));
      } catch (const std::exception&) {
        throw ParseError("labels line " + std::to_string(lineno) + " has bad PEN");
      }
    }
    if (entry.vendor.empty())
      throw ParseError("labels line " + std::to_string(lineno) + " has empty vendor");
    out.push_back(std::move(entry));
  }
  return out;
}

std::string verdict_to_json_line(Ipv4 target, const Verdict& verdict) {
  ordered_json doc;
  doc["target"] = target.str();
  doc["verdict"] = verdict_outcome_name(verdict.outcome);
  if (verdict.outcome == VerdictOutcome::Vendor) doc["vendor"] = verdict.vendor;
  if (verdict.outcome == VerdictOutcome::NonUnique)
    doc["candidates"] = std::vector<std::string>(verdict.candidates.begin(),
                                                 verdict.candidates.end());
  if (verdict.matched_key) {
    doc["match_kind"] = verdict.full_match ? "full" : "partial";
    doc["match_protocols"] = verdict.match_protocols->names();
    doc["matched_key"] = *verdict.matched_key;
  }
  doc["native_partial"] = verdict.native_partial;
  return doc.dump();
}

std::pair<Ipv4, Verdict> verdict_from_json_line(std::string_view line) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("verdict line is not valid JSON: ") + e.what(),
                     static_cast<std::size_t>(e.byte));
  }
  try {
    Ipv4 target = Ipv4::parse(doc.at("target").get<std::string>());
    Verdict v;
    v.outcome = verdict_outcome_from_name(doc.at("verdict").get<std::string>());
    if (doc.contains("vendor")) v.vendor = doc["vendor"].get<std::string>();
    if (v.outcome == VerdictOutcome::Vendor && v.vendor.empty())
      throw ParseError("vendor verdict without vendor name");
    if (doc.contains("candidates"))
      for (const auto& c : doc["candidates"]) v.candidates.insert(c.get<std::string>());
    if (doc.contains("matched_key")) {
      v.matched_key = doc["matched_key"].get<std::string>();
      v.full_match = doc.at("match_kind").get<std::string>() == "full";
      auto names = doc.at("match_protocols").get<std::vector<std::string>>();
      v.match_protocols = ProtocolSet::from_names(names);
    }
    if (doc.contains("native_partial")) v.native_partial = doc["native_partial"].get<bool>();
    return {target, std::move(v)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("verdict line field error: ") + e.what());
  }
}

std::string verdicts_to_jsonl(const std::map<Ipv4, Verdict>& verdicts) {
  std::string out;
  for (const auto& [target, verdict] : verdicts) {
    out += verdict_to_json_line(target, verdict);
    out += "\n";
  }
  return out;
}

std::map<Ipv4, Verdict> verdicts_from_jsonl(std::string_view text) {
  std::map<Ipv4, Verdict> out;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty()) continue;
    try {
      out.insert(verdict_from_json_line(line));
    } catch (const ParseError& e) {
      throw ParseError("verdict file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lfp
