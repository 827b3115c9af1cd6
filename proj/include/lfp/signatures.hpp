#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lfp/features.hpp"

namespace lfp {

enum class SigClass { Unique, NonUnique, BelowThreshold };

std::string sig_class_name(SigClass c);
SigClass sig_class_from_name(std::string_view name);  // throws ParseError

struct SignatureRecord {
  std::string key;                          // canonical feature string
  ProtocolSet protocols;                    // subset the key covers
  std::map<std::string, int> vendor_counts; // vendor -> occurrences
  SigClass cls = SigClass::BelowThreshold;
  std::set<std::string> dataset_ids;

  int total() const;
  bool matchable() const { return cls != SigClass::BelowThreshold; }
  // Unique only when a single vendor accounts for every occurrence; a second
  // vendor of any count (including one discovered in another dataset) makes
  // the signature non-unique.
  const std::string& unique_vendor() const;  // valid only when cls == Unique

  bool operator==(const SignatureRecord&) const = default;
};

struct SignatureBuildConfig {
  int min_occurrences = 20;
  bool derive_partials = true;

  void validate() const;
};

struct LabeledVector {
  FeatureVector vec;
  std::string vendor;
  std::string dataset_id;
};

struct BuildMeta {
  SignatureBuildConfig config;
  std::set<std::string> dataset_ids;
  std::string tool_version;

  bool operator==(const BuildMeta&) const = default;
};

inline bool operator==(const SignatureBuildConfig& a, const SignatureBuildConfig& b) {
  return a.min_occurrences == b.min_occurrences && a.derive_partials == b.derive_partials;
}

struct SignatureTable {
  static constexpr int kFormatVersion = 1;

  std::map<std::string, SignatureRecord> records;  // canonical key -> record
  BuildMeta meta;
  int format_version = kFormatVersion;

  const SignatureRecord* find(const std::string& key) const;
  std::size_t count(SigClass cls) const;

  bool operator==(const SignatureTable&) const = default;
};

// Groups labeled vectors by canonical key; totals below min_occurrences are
// kept but classed below-threshold and excluded from matching. With
// derive_partials every vector is additionally projected onto each proper
// protocol subset it covers, and each subset key gets the same threshold and
// uniqueness rules.
SignatureTable build_signature_table(std::span<const LabeledVector> labeled,
                                     const SignatureBuildConfig& cfg);

struct ThresholdCounts {
  int threshold = 0;
  int unique = 0;
  int non_unique = 0;
};

// One build per threshold (ascending), for sensitivity reports.
std::vector<ThresholdCounts> sweep_threshold(std::span<const LabeledVector> labeled,
                                             std::span<const int> thresholds,
                                             bool derive_partials = true);

std::string sweep_to_csv(std::span<const ThresholdCounts> counts);

// Versioned JSON with a content checksum. load rejects version mismatches,
// checksum failures and truncation without returning a partial table.
std::string store_table(const SignatureTable& table);
SignatureTable load_table(std::string_view text);  // throws ParseError

void save_table_file(const SignatureTable& table, const std::string& path);
SignatureTable load_table_file(const std::string& path);

}  // namespace lfp
