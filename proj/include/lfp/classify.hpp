#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lfp/signatures.hpp"

namespace lfp {

enum class VerdictOutcome { Vendor, NonUnique, Unknown, Unresponsive };

std::string verdict_outcome_name(VerdictOutcome o);
VerdictOutcome verdict_outcome_from_name(std::string_view name);  // throws ParseError

struct Verdict {
  VerdictOutcome outcome = VerdictOutcome::Unknown;
  std::string vendor;                 // set for Vendor
  std::set<std::string> candidates;   // set for NonUnique
  std::optional<std::string> matched_key;
  std::optional<ProtocolSet> match_protocols;
  bool full_match = false;            // matched the all-protocol key
  bool native_partial = false;        // the vector itself was partial

  bool operator==(const Verdict&) const = default;
};

// Exact-match lookup at the vector's own subset first: a unique record names
// the vendor, a non-unique one returns its candidate set. On a miss, partial
// projections are tried in Table 3 order (two-protocol subsets before
// singletons); only unique partial hits terminate the chain, and exhaustion
// is Unknown. Vendor verdicts never come from non-unique or below-threshold
// records.
Verdict classify_vector(const FeatureVector& v, const SignatureTable& table);

struct VendorEval {
  std::string vendor;
  std::optional<double> recall;     // absent when the vendor has no test rows
  std::optional<double> precision;  // absent when nothing was predicted as this vendor
  int test_total = 0;
};

// Seeded random split, table built on the training share, precision/recall
// per vendor on the rest. Non-unique and unknown verdicts count against
// recall only.
std::vector<VendorEval> evaluate_holdout(std::span<const LabeledVector> labeled,
                                         const SignatureBuildConfig& cfg, double train_fraction,
                                         std::uint64_t seed);

std::string evaluation_to_csv(std::span<const VendorEval> rows);

}  // namespace lfp
