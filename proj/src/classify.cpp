#include "lfp/classify.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace lfp {

std::string verdict_outcome_name(VerdictOutcome o) {
  switch (o) {
    case VerdictOutcome::Vendor: return "vendor";
    case VerdictOutcome::NonUnique: return "non_unique";
    case VerdictOutcome::Unknown: return "unknown";
    case VerdictOutcome::Unresponsive: return "unresponsive";
  }
  return "?";
}

VerdictOutcome verdict_outcome_from_name(std::string_view name) {
  if (name == "vendor") return VerdictOutcome::Vendor;
  if (name == "non_unique") return VerdictOutcome::NonUnique;
  if (name == "unknown") return VerdictOutcome::Unknown;
  if (name == "unresponsive") return VerdictOutcome::Unresponsive;
  throw ParseError("unknown verdict outcome '" + std::string(name) + "'");
}

namespace {

const ProtocolSet kFallbackOrder[] = {
    ProtocolSet::of({Protocol::Tcp, Protocol::Udp}),
    ProtocolSet::of({Protocol::Icmp, Protocol::Udp}),
    ProtocolSet::of({Protocol::Icmp, Protocol::Tcp}),
    ProtocolSet::of({Protocol::Udp}),
    ProtocolSet::of({Protocol::Tcp}),
    ProtocolSet::of({Protocol::Icmp}),
};

Verdict vendor_verdict(const SignatureRecord& rec, bool full, bool native_partial) {
  Verdict v;
  v.outcome = VerdictOutcome::Vendor;
  v.vendor = rec.unique_vendor();
  v.matched_key = rec.key;
  v.match_protocols = rec.protocols;
  v.full_match = full;
  v.native_partial = native_partial;
  return v;
}

Verdict non_unique_verdict(const SignatureRecord& rec, bool full, bool native_partial) {
  Verdict v;
  v.outcome = VerdictOutcome::NonUnique;
  for (const auto& [vendor, count] : rec.vendor_counts) v.candidates.insert(vendor);
  v.matched_key = rec.key;
  v.match_protocols = rec.protocols;
  v.full_match = full;
  v.native_partial = native_partial;
  return v;
}

}  // namespace

Verdict classify_vector(const FeatureVector& v, const SignatureTable& table) {
  ProtocolSet native = v.protocols();
  if (native.empty()) {
    Verdict out;
    out.outcome = VerdictOutcome::Unresponsive;
    return out;
  }
  const bool native_partial = !native.is_full();

  // The exact lookup at the vector's own subset is authoritative either way.
  if (const SignatureRecord* rec = table.find(v.canonical()); rec && rec->matchable()) {
    if (rec->cls == SigClass::Unique) return vendor_verdict(*rec, native.is_full(), native_partial);
    return non_unique_verdict(*rec, native.is_full(), native_partial);
  }

  // Fallback over strictly smaller subsets; only unique hits terminate.
  for (const ProtocolSet& subset : kFallbackOrder) {
    if (subset == native || !native.contains_all(subset)) continue;
    const SignatureRecord* rec = table.find(v.project(subset).canonical());
    if (rec && rec->cls == SigClass::Unique) return vendor_verdict(*rec, false, native_partial);
  }

  Verdict out;
  out.outcome = VerdictOutcome::Unknown;
  out.native_partial = native_partial;
  return out;
}

std::vector<VendorEval> evaluate_holdout(std::span<const LabeledVector> labeled,
                                         const SignatureBuildConfig& cfg, double train_fraction,
                                         std::uint64_t seed) {
  if (labeled.empty()) throw ValidationError("evaluate_holdout needs a non-empty labeled set");
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw ValidationError("split fraction must be in (0, 1)");

  std::vector<std::size_t> order(labeled.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(fnv1a64_u64(seed, fnv1a64("holdout-split")));
  rng.shuffle(order);

  std::size_t n_train = static_cast<std::size_t>(
      static_cast<double>(labeled.size()) * train_fraction);
  n_train = std::clamp<std::size_t>(n_train, 1, labeled.size() - 1);

  std::vector<LabeledVector> train;
  train.reserve(n_train);
  for (std::size_t i = 0; i < n_train; ++i) train.push_back(labeled[order[i]]);
  SignatureTable table = build_signature_table(train, cfg);

  struct Tally {
    int test_total = 0;   // rows whose true label is this vendor
    int correct = 0;      // vendor verdicts that were right
    int predicted = 0;    // vendor verdicts naming this vendor
  };
  std::map<std::string, Tally> tallies;

  for (std::size_t i = n_train; i < order.size(); ++i) {
    const LabeledVector& item = labeled[order[i]];
    ++tallies[item.vendor].test_total;
    Verdict verdict = classify_vector(item.vec, table);
    if (verdict.outcome != VerdictOutcome::Vendor) continue;  // hurts recall only
    ++tallies[verdict.vendor].predicted;
    if (verdict.vendor == item.vendor) ++tallies[item.vendor].correct;
  }

  std::vector<VendorEval> rows;
  for (const auto& [vendor, tally] : tallies) {
    VendorEval row;
    row.vendor = vendor;
    row.test_total = tally.test_total;
    if (tally.test_total > 0)
      row.recall = static_cast<double>(tally.correct) / tally.test_total;
    if (tally.predicted > 0)
      row.precision = static_cast<double>(tally.correct) / tally.predicted;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const VendorEval& a, const VendorEval& b) {
    if (a.test_total != b.test_total) return a.test_total > b.test_total;
    return a.vendor < b.vendor;
  });
  return rows;
}

std::string evaluation_to_csv(std::span<const VendorEval> rows) {
  auto fmt = [](const std::optional<double>& v) -> std::string {
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return buf;
  };
  std::string out = "vendor,recall,precision,total\n";
  for (const auto& row : rows)
    out += row.vendor + "," + fmt(row.recall) + "," + fmt(row.precision) + "," +
           std::to_string(row.test_total) + "\n";
  return out;
}

}  // namespace lfp
