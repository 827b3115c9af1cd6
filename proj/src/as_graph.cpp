#include "lfp/as_graph.hpp"

#include <algorithm>

namespace lfp {

namespace {
const std::set<Asn> kEmpty;
}

void AsGraph::check_new_edge(Asn a, Asn b) {
  if (a == b) throw ValidationError("self-loop relationship for AS" + std::to_string(a));
  auto related = [&](Asn x, Asn y) {
    auto it = nodes_.find(x);
    if (it == nodes_.end()) return false;
    return it->second.providers.count(y) || it->second.customers.count(y) ||
           it->second.peers.count(y);
  };
  if (related(a, b))
    throw ValidationError("duplicate relationship between AS" + std::to_string(a) + " and AS" +
                          std::to_string(b));
}

void AsGraph::add_provider_customer(Asn provider, Asn customer) {
  check_new_edge(provider, customer);
  nodes_[provider].customers.insert(customer);
  nodes_[customer].providers.insert(provider);
  ++edge_count_;
}

void AsGraph::add_peer(Asn a, Asn b) {
  check_new_edge(a, b);
  nodes_[a].peers.insert(b);
  nodes_[b].peers.insert(a);
  ++edge_count_;
}

AsGraph AsGraph::from_text(std::string_view text) {
  AsGraph graph;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '|');
    if (fields.size() < 3)
      throw ParseError("relationship line " + std::to_string(lineno) +
                       " needs as1|as2|rel");
    Asn a = 0, b = 0;
    try {
      a = static_cast<Asn>(std::stoul(fields[0]));
      b = static_cast<Asn>(std::stoul(fields[1]));
    } catch (const std::exception&) {
      throw ParseError("relationship line " + std::to_string(lineno) + " has bad ASN");
    }
    const std::string& rel = fields[2];
    if (rel == "-1") graph.add_provider_customer(a, b);
    else if (rel == "0") graph.add_peer(a, b);
    else throw ParseError("relationship line " + std::to_string(lineno) +
                          " rel must be -1 or 0, got '" + rel + "'");
  }
  return graph;
}

const std::set<Asn>& AsGraph::providers(Asn asn) const {
  auto it = nodes_.find(asn);
  return it == nodes_.end() ? kEmpty : it->second.providers;
}

const std::set<Asn>& AsGraph::customers(Asn asn) const {
  auto it = nodes_.find(asn);
  return it == nodes_.end() ? kEmpty : it->second.customers;
}

const std::set<Asn>& AsGraph::peers(Asn asn) const {
  auto it = nodes_.find(asn);
  return it == nodes_.end() ? kEmpty : it->second.peers;
}

std::vector<Asn> AsGraph::all_asns() const {
  std::vector<Asn> out;
  out.reserve(nodes_.size());
  for (const auto& [asn, node] : nodes_) out.push_back(asn);
  return out;
}

std::string transit_outcome_name(TransitOutcome o) {
  switch (o) {
    case TransitOutcome::NoPathVisible: return "no_path_visible";
    case TransitOutcome::OnlyViaAvoided: return "only_via_avoided";
    case TransitOutcome::Alternative: return "alternative";
  }
  return "?";
}

namespace {

// Backward DFS from the destination. Walking a forward valley-free path in
// reverse, the down segment is consumed first; once an up or peer edge is
// crossed (in reverse) only up edges may follow.
struct TransitSearch {
  const AsGraph& graph;
  Asn dst, avoid;
  int max_depth;
  std::vector<Asn> stack;
  std::set<Asn> on_stack;
  bool any_path = false;
  bool any_avoiding_path = false;
  std::set<Asn> transits;

  void record_path() {
    any_path = true;
    bool contains_avoid = on_stack.count(avoid) > 0 || dst == avoid;
    if (contains_avoid) return;
    any_avoiding_path = true;
    // stack holds dst..source; interior nodes are the transits.
    for (std::size_t i = 1; i + 1 < stack.size(); ++i) transits.insert(stack[i]);
  }

  // in_down: still extending the forward path's terminal down segment.
  void explore(Asn at, bool in_down, int depth_left) {
    if (stack.size() > 1) record_path();
    if (depth_left == 0) return;
    auto visit = [&](Asn next, bool next_in_down) {
      if (on_stack.count(next)) return;
      stack.push_back(next);
      on_stack.insert(next);
      explore(next, next_in_down, depth_left - 1);
      on_stack.erase(next);
      stack.pop_back();
    };
    if (in_down) {
      // Predecessor reached us over a provider->customer edge...
      for (Asn prev : graph.providers(at)) visit(prev, true);
      // ...or this was the single peering link or the top of the climb.
      for (Asn prev : graph.peers(at)) visit(prev, false);
      for (Asn prev : graph.customers(at)) visit(prev, false);
    } else {
      // Everything earlier on the forward path is customer->provider hops.
      for (Asn prev : graph.customers(at)) visit(prev, false);
    }
  }
};

}  // namespace

TransitResult alternative_transit(Asn dst_as, Asn avoid_as, const AsGraph& graph,
                                  int max_depth) {
  if (max_depth < 1) throw ValidationError("max_depth must be >= 1");
  TransitResult result;
  if (!graph.contains(dst_as)) return result;  // no visible paths at all

  TransitSearch search{graph, dst_as, avoid_as, max_depth, {}, {}, false, false, {}};
  search.stack.push_back(dst_as);
  search.on_stack.insert(dst_as);
  search.explore(dst_as, true, max_depth);

  if (!search.any_path) {
    result.outcome = TransitOutcome::NoPathVisible;
  } else if (!search.any_avoiding_path) {
    result.outcome = TransitOutcome::OnlyViaAvoided;
  } else {
    result.outcome = TransitOutcome::Alternative;
    result.transit_asns = std::move(search.transits);
  }
  return result;
}

}  // namespace lfp
