#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lfp/util.hpp"

namespace lfp {

using Asn = std::uint32_t;

// AS relationship graph from "as1|as2|rel" lines (rel -1: as1 is the
// provider of as2, rel 0: peers). At most one relationship per AS pair.
class AsGraph {
 public:
  void add_provider_customer(Asn provider, Asn customer);
  void add_peer(Asn a, Asn b);

  static AsGraph from_text(std::string_view text);  // throws ParseError

  bool contains(Asn asn) const { return nodes_.count(asn) > 0; }
  const std::set<Asn>& providers(Asn asn) const;
  const std::set<Asn>& customers(Asn asn) const;
  const std::set<Asn>& peers(Asn asn) const;
  std::vector<Asn> all_asns() const;
  std::size_t edge_count() const { return edge_count_; }

 private:
  struct Node {
    std::set<Asn> providers, customers, peers;
  };
  void check_new_edge(Asn a, Asn b);
  std::map<Asn, Node> nodes_;
  std::size_t edge_count_ = 0;
};

enum class TransitOutcome { NoPathVisible, OnlyViaAvoided, Alternative };

std::string transit_outcome_name(TransitOutcome o);

struct TransitResult {
  TransitOutcome outcome = TransitOutcome::NoPathVisible;
  // Distinct ASNs appearing strictly between source and destination on
  // valley-free paths that avoid the excluded AS. Results reflect visible
  // paths only.
  std::set<Asn> transit_asns;
};

// Enumerates simple valley-free paths (customer->provider segment, at most
// one peering link, then provider->customer segment) of at most max_depth AS
// hops ending at dst_as, and reports whether any of them avoid avoid_as.
TransitResult alternative_transit(Asn dst_as, Asn avoid_as, const AsGraph& graph,
                                  int max_depth = 6);

}  // namespace lfp
