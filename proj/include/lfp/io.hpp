#pragma once

#include <map>
#include <string>
#include <vector>

#include "lfp/classify.hpp"
#include "lfp/probe.hpp"
#include "lfp/snmp.hpp"

namespace lfp {

// Scan output: JSON Lines, one object per target with stable key order.
std::string response_set_to_json_line(const ResponseSet& set);
ResponseSet response_set_from_json_line(std::string_view line);  // throws ParseError

std::string response_sets_to_jsonl(std::span<const ResponseSet> sets);
// Strict: any malformed or truncated line rejects the whole file.
std::vector<ResponseSet> response_sets_from_jsonl(std::string_view text);

// SNMPv3 labeling: parse each target's report (when present) into a vendor.
struct LabelEntry {
  Ipv4 address;
  std::string vendor;
  std::uint32_t pen = 0;
};

struct LabelStats {
  int responses = 0;
  int reports = 0;
  int parse_failures = 0;
};

std::vector<LabelEntry> label_responses(std::span<const ResponseSet> sets,
                                        const VendorDict& dict, LabelStats* stats = nullptr);

std::string labels_to_csv(std::span<const LabelEntry> labels);
std::vector<LabelEntry> labels_from_csv(std::string_view text);  // throws ParseError

// Verdicts: JSON Lines "{target, verdict, vendor, match_kind, ...}".
std::string verdict_to_json_line(Ipv4 target, const Verdict& verdict);
std::pair<Ipv4, Verdict> verdict_from_json_line(std::string_view line);

std::string verdicts_to_jsonl(const std::map<Ipv4, Verdict>& verdicts);
std::map<Ipv4, Verdict> verdicts_from_jsonl(std::string_view text);

}  // namespace lfp
