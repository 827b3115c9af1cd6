#include "lfp/signatures.hpp"

#include <json.hpp>

#include "lfp/util.hpp"

namespace lfp {

using ordered_json = nlohmann::ordered_json;

std::string sig_class_name(SigClass c) {
  switch (c) {
    case SigClass::Unique: return "unique";
    case SigClass::NonUnique: return "non_unique";
    case SigClass::BelowThreshold: return "below_threshold";
  }
  return "?";
}

SigClass sig_class_from_name(std::string_view name) {
  if (name == "unique") return SigClass::Unique;
  if (name == "non_unique") return SigClass::NonUnique;
  if (name == "below_threshold") return SigClass::BelowThreshold;
  throw ParseError("unknown signature class '" + std::string(name) + "'");
}

int SignatureRecord::total() const {
  int n = 0;
  for (const auto& [vendor, count] : vendor_counts) n += count;
  return n;
}

const std::string& SignatureRecord::unique_vendor() const {
  if (cls != SigClass::Unique || vendor_counts.size() != 1)
    throw Error("unique_vendor() on a non-unique record");
  return vendor_counts.begin()->first;
}

void SignatureBuildConfig::validate() const {
  if (min_occurrences < 1) throw ValidationError("min_occurrences must be >= 1");
}

const SignatureRecord* SignatureTable::find(const std::string& key) const {
  auto it = records.find(key);
  return it == records.end() ? nullptr : &it->second;
}

std::size_t SignatureTable::count(SigClass cls) const {
  std::size_t n = 0;
  for (const auto& [key, rec] : records)
    if (rec.cls == cls) ++n;
  return n;
}

namespace {

// The six proper protocol subsets of Table 3, in its order.
const ProtocolSet kPartialSubsets[] = {
    ProtocolSet::of({Protocol::Tcp, Protocol::Udp}),
    ProtocolSet::of({Protocol::Icmp, Protocol::Udp}),
    ProtocolSet::of({Protocol::Icmp, Protocol::Tcp}),
    ProtocolSet::of({Protocol::Udp}),
    ProtocolSet::of({Protocol::Icmp}),
    ProtocolSet::of({Protocol::Tcp}),
};

SigClass classify_record(const SignatureRecord& rec, int min_occurrences) {
  if (rec.total() < min_occurrences) return SigClass::BelowThreshold;
  return rec.vendor_counts.size() == 1 ? SigClass::Unique : SigClass::NonUnique;
}

}  // namespace

SignatureTable build_signature_table(std::span<const LabeledVector> labeled,
                                     const SignatureBuildConfig& cfg) {
  cfg.validate();
  SignatureTable table;
  table.meta.config = cfg;

  auto add = [&table](const FeatureVector& vec, const std::string& vendor,
                      const std::string& dataset_id) {
    std::string key = vec.canonical();
    auto [it, inserted] = table.records.try_emplace(key);
    SignatureRecord& rec = it->second;
    if (inserted) {
      rec.key = key;
      rec.protocols = vec.protocols();
    }
    ++rec.vendor_counts[vendor];
    rec.dataset_ids.insert(dataset_id);
  };

  for (const auto& item : labeled) {
    ProtocolSet native = item.vec.protocols();
    if (native.empty()) continue;  // nothing observable, nothing to learn
    table.meta.dataset_ids.insert(item.dataset_id);
    add(item.vec, item.vendor, item.dataset_id);
    if (!cfg.derive_partials) continue;
    // Project onto every proper subset the observation covers; uniqueness is
    // re-verified per subset, so projections never leak false confidence.
    for (const ProtocolSet& subset : kPartialSubsets)
      if (native.contains_all(subset) && subset != native)
        add(item.vec.project(subset), item.vendor, item.dataset_id);
  }

  for (auto& [key, rec] : table.records) rec.cls = classify_record(rec, cfg.min_occurrences);
  return table;
}

std::vector<ThresholdCounts> sweep_threshold(std::span<const LabeledVector> labeled,
                                             std::span<const int> thresholds,
                                             bool derive_partials) {
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] < thresholds[i - 1])
      throw ValidationError("sweep thresholds must be sorted ascending");
  std::vector<ThresholdCounts> out;
  for (int t : thresholds) {
    SignatureBuildConfig cfg;
    cfg.min_occurrences = t;
    cfg.derive_partials = derive_partials;
    SignatureTable table = build_signature_table(labeled, cfg);
    out.push_back({t, static_cast<int>(table.count(SigClass::Unique)),
                   static_cast<int>(table.count(SigClass::NonUnique))});
  }
  return out;
}

std::string sweep_to_csv(std::span<const ThresholdCounts> counts) {
  std::string out = "threshold,unique,non_unique\n";
  for (const auto& c : counts)
    out += std::to_string(c.threshold) + "," + std::to_string(c.unique) + "," +
           std::to_string(c.non_unique) + "\n";
  return out;
}

namespace {

ordered_json records_to_json(const SignatureTable& table) {
  ordered_json records = ordered_json::array();
  for (const auto& [key, rec] : table.records) {
    ordered_json r;
    r["key"] = rec.key;
    r["protocols"] = rec.protocols.names();
    r["class"] = sig_class_name(rec.cls);
    ordered_json counts = ordered_json::object();
    for (const auto& [vendor, count] : rec.vendor_counts) counts[vendor] = count;
    r["vendor_counts"] = counts;
    r["datasets"] = std::vector<std::string>(rec.dataset_ids.begin(), rec.dataset_ids.end());
    records.push_back(std::move(r));
  }
  return records;
}

ordered_json meta_to_json(const BuildMeta& meta) {
  ordered_json m;
  m["min_occurrences"] = meta.config.min_occurrences;
  m["derive_partials"] = meta.config.derive_partials;
  m["datasets"] = std::vector<std::string>(meta.dataset_ids.begin(), meta.dataset_ids.end());
  m["tool_version"] = meta.tool_version;
  return m;
}

}  // namespace

std::string store_table(const SignatureTable& table) {
  ordered_json body;
  body["records"] = records_to_json(table);
  body["build_meta"] = meta_to_json(table.meta);
  std::string payload = body.dump();

  ordered_json doc;
  doc["format_version"] = table.format_version;
  doc["checksum"] = to_hex(fnv1a64(payload));
  doc["build_meta"] = body["build_meta"];
  doc["records"] = body["records"];
  return doc.dump(2) + "\n";
}

SignatureTable load_table(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("signature table is not valid JSON: ") + e.what(),
                     static_cast<std::size_t>(e.byte));
  }
  if (!doc.is_object() || !doc.contains("format_version"))
    throw ParseError("signature table missing format_version");
  int version = doc["format_version"].get<int>();
  if (version != SignatureTable::kFormatVersion)
    throw ParseError("unsupported signature table format_version " + std::to_string(version));
  if (!doc.contains("checksum") || !doc.contains("records") || !doc.contains("build_meta"))
    throw ParseError("signature table missing required fields");

  SignatureTable table;
  table.format_version = version;
  try {
    const auto& meta = doc["build_meta"];
    table.meta.config.min_occurrences = meta.at("min_occurrences").get<int>();
    table.meta.config.derive_partials = meta.at("derive_partials").get<bool>();
    for (const auto& id : meta.at("datasets"))
      table.meta.dataset_ids.insert(id.get<std::string>());
    table.meta.tool_version = meta.at("tool_version").get<std::string>();

    for (const auto& r : doc["records"]) {
      SignatureRecord rec;
      rec.key = r.at("key").get<std::string>();
      std::vector<std::string> names = r.at("protocols").get<std::vector<std::string>>();
      rec.protocols = ProtocolSet::from_names(names);
      rec.cls = sig_class_from_name(r.at("class").get<std::string>());
      for (const auto& [vendor, count] : r.at("vendor_counts").items())
        rec.vendor_counts[vendor] = count.get<int>();
      for (const auto& id : r.at("datasets")) rec.dataset_ids.insert(id.get<std::string>());
      // The key must parse and agree with the stored protocol subset.
      FeatureVector vec = FeatureVector::from_canonical(rec.key);
      if (vec.protocols() != rec.protocols)
        throw ParseError("record key/protocol mismatch for '" + rec.key + "'");
      if (table.records.count(rec.key))
        throw ParseError("duplicate record key '" + rec.key + "'");
      table.records[rec.key] = std::move(rec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("signature table field error: ") + e.what());
  }

  ordered_json body;
  body["records"] = records_to_json(table);
  body["build_meta"] = meta_to_json(table.meta);
  if (to_hex(fnv1a64(body.dump())) != doc["checksum"].get<std::string>())
    throw ParseError("signature table checksum mismatch (corrupted file)");
  return table;
}

void save_table_file(const SignatureTable& table, const std::string& path) {
  write_file_atomic(path, store_table(table));
}

SignatureTable load_table_file(const std::string& path) {
  return load_table(read_file(path));
}

}  // namespace lfp
