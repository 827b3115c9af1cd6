#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lfp/as_graph.hpp"
#include "lfp/classify.hpp"
#include "lfp/net.hpp"
#include "lfp/prefix_trie.hpp"

namespace lfp {

struct TracerouteHop {
  int hop_index = 0;
  std::optional<Ipv4> ip;  // missing: unresponsive or stripped at ingest
};

struct TraceroutePath {
  Ipv4 src, dst;
  std::vector<TracerouteHop> hops;  // hop indices strictly increasing

  int routable_hop_count() const;
  int total_hop_count() const { return static_cast<int>(hops.size()); }
};

struct AliasSet {
  std::string router_id;
  std::set<Ipv4> interfaces;  // size >= 2, disjoint across routers
};

// Prefix tables and the relationship graph used by the path studies.
struct AsContext {
  PrefixTrie<Asn> prefix_to_asn;
  PrefixTrie<std::string> prefix_to_country;
  PrefixTrie<bool> anycast;
  AsGraph relationships;

  std::optional<Asn> asn_of(Ipv4 addr) const { return prefix_to_asn.lookup(addr); }
  std::optional<std::string> country_of(Ipv4 addr) const {
    return prefix_to_country.lookup(addr);
  }
  bool is_anycast(Ipv4 addr) const { return anycast.contains(addr); }
};

// "prefix<TAB>length<TAB>asn" lines (pfx2as layout).
PrefixTrie<Asn> load_prefix_to_asn(std::string_view text);
// "prefix,country" CSV with prefix as a.b.c.d/len.
PrefixTrie<std::string> load_prefix_to_country(std::string_view text);
// One prefix per line.
PrefixTrie<bool> load_anycast_prefixes(std::string_view text);
// ITDK nodes layout: "node N<id>: ip ip ip". Singletons are dropped.
std::vector<AliasSet> load_alias_sets(std::string_view text);  // throws ParseError

struct IngestStats {
  int lines = 0;
  int malformed = 0;       // skipped with a warning count
  int dropped_short = 0;   // fewer routable hops than the minimum
  int stripped_hops = 0;   // private/reserved/anycast hop addresses removed
  int kept = 0;
};

// Traceroute JSONL ingest. Native layout:
//   {"src":"a.b.c.d","dst":"e.f.g.h","hops":[{"hop":1,"ip":"..."}, ...]}
// Also accepted: src_addr/dst_addr endpoint keys and the public
// traceroute-result schema subset result[].hops[].from.
// Private/reserved (and, when a context is given, anycast) hop addresses are
// stripped; a final responsive hop equal to the destination is removed; paths
// with fewer than min_hops routable hops are dropped.
std::vector<TraceroutePath> ingest_traceroutes(std::string_view jsonl, int min_hops,
                                               const AsContext* ctx, IngestStats* stats);

struct AnnotatedPath {
  TraceroutePath path;
  std::vector<std::optional<Verdict>> hop_verdicts;  // parallel to hops; absent for missing
  std::set<std::string> vendor_set;                  // distinct Vendor outcomes
  int identified_hops = 0;                           // hops with a Vendor verdict
  int routable_hops = 0;
  double identified_fraction = 0.0;        // identified / routable
  double identified_fraction_total = 0.0;  // identified / all hops incl. missing
};

struct AnnotateStats {
  int alias_conflicts = 0;  // alias sets whose interfaces disagreed on vendor
};

// Annotates every routable hop from the verdict map (absent targets are
// unknown). With alias sets, all interfaces of a router share one verdict;
// routers whose interfaces carry different vendor verdicts are counted and
// downgraded to non-unique over the conflicting candidates.
std::vector<AnnotatedPath> annotate_paths(std::span<const TraceroutePath> paths,
                                          const std::map<Ipv4, Verdict>& verdicts,
                                          std::span<const AliasSet> aliases,
                                          AnnotateStats* stats = nullptr);

enum class RegionFilterKind { All, Intra, Inter };

struct RegionFilter {
  RegionFilterKind kind = RegionFilterKind::All;
  std::string country;  // for Intra/Inter

  static RegionFilter parse(std::string_view text);  // ALL | INTRA:CC | INTER:CC
  std::string label() const;
};

struct DiversityReport {
  RegionFilter filter;
  int paths_considered = 0;
  int paths_unmapped = 0;  // endpoint without registry country, excluded
  std::map<int, int> vendor_set_size_counts;
  std::vector<std::pair<std::string, int>> top_combinations;  // "A+B" sorted, count desc
  // Histogram buckets 0..10: floor(fraction*10), 1.0 in the last bucket.
  std::array<int, 11> identified_fraction_hist{};
  std::array<int, 11> identified_fraction_total_hist{};
};

DiversityReport diversity_report(std::span<const AnnotatedPath> annotated,
                                 const RegionFilter& filter, const AsContext& ctx);

std::string diversity_report_to_json(const DiversityReport& report);
std::string combinations_to_csv(const DiversityReport& report);

int fraction_bucket(double fraction);
std::string vendor_combo_label(const std::set<std::string>& vendors);

struct HomogeneityEntry {
  Asn asn = 0;
  int total_ips = 0;
  std::string dominant_vendor;
  int dominant_count = 0;
  double share = 0.0;
};

// ASes with at least min_routers mapped router IPs where a single vendor's
// share of those IPs reaches the dominance bound. Visible data only.
std::vector<HomogeneityEntry> homogeneity_report(const std::map<Ipv4, Verdict>& verdicts,
                                                 const AsContext& ctx, int min_routers = 1000,
                                                 double dominance = 0.85);

std::string homogeneity_to_csv(std::span<const HomogeneityEntry> entries);

}  // namespace lfp
