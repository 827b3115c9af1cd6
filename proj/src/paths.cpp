#include "lfp/paths.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace lfp {

using ordered_json = nlohmann::ordered_json;

int TraceroutePath::routable_hop_count() const {
  int n = 0;
  for (const auto& hop : hops)
    if (hop.ip) ++n;
  return n;
}

PrefixTrie<Asn> load_prefix_to_asn(std::string_view text) {
  PrefixTrie<Asn> trie;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw ParseError("pfx2as line " + std::to_string(lineno) +
                       " needs prefix<TAB>length<TAB>asn");
    Ipv4 network = Ipv4::parse(trim(fields[0]));
    int length = 0;
    Asn asn = 0;
    try {
      length = std::stoi(fields[1]);
      asn = static_cast<Asn>(std::stoul(trim(fields[2])));
    } catch (const std::exception&) {
      throw ParseError("pfx2as line " + std::to_string(lineno) + " has bad numbers");
    }
    if (length < 0 || length > 32)
      throw ParseError("pfx2as line " + std::to_string(lineno) + " bad prefix length");
    trie.insert({network, length}, asn);
  }
  return trie;
}

PrefixTrie<std::string> load_prefix_to_country(std::string_view text) {
  PrefixTrie<std::string> trie;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line == "prefix,country") continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("prefix,country line " + std::to_string(lineno) + " missing comma");
    Ipv4Prefix prefix = Ipv4Prefix::parse(trim(line.substr(0, comma)));
    std::string country = trim(line.substr(comma + 1));
    if (country.empty())
      throw ParseError("prefix,country line " + std::to_string(lineno) + " empty country");
    trie.insert(prefix, country);
  }
  return trie;
}

PrefixTrie<bool> load_anycast_prefixes(std::string_view text) {
  PrefixTrie<bool> trie;
  for (const auto& raw : split(text, '\n')) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    trie.insert(Ipv4Prefix::parse(line), true);
  }
  return trie;
}

std::vector<AliasSet> load_alias_sets(std::string_view text) {
  std::vector<AliasSet> out;
  std::set<Ipv4> seen;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("node ", 0) != 0)
      throw ParseError("alias line " + std::to_string(lineno) + " must start with 'node '");
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("alias line " + std::to_string(lineno) + " missing ':'");
    AliasSet set;
    set.router_id = trim(line.substr(5, colon - 5));
    for (const auto& token : split(line.substr(colon + 1), ' ')) {
      std::string t = trim(token);
      if (t.empty()) continue;
      Ipv4 addr = Ipv4::parse(t);
      if (seen.count(addr))
        throw ParseError("alias line " + std::to_string(lineno) + ": interface " + t +
                         " appears in two routers");
      seen.insert(addr);
      set.interfaces.insert(addr);
    }
    if (set.interfaces.size() >= 2) out.push_back(std::move(set));
  }
  return out;
}

namespace {

std::optional<TraceroutePath> parse_traceroute_line(const std::string& line,
                                                    const AsContext* ctx, int min_hops,
                                                    IngestStats* stats) {
  ordered_json doc = ordered_json::parse(line);  // json parse_error handled by caller
  TraceroutePath path;
  if (doc.contains("src")) path.src = Ipv4::parse(doc["src"].get<std::string>());
  else path.src = Ipv4::parse(doc.at("src_addr").get<std::string>());
  if (doc.contains("dst")) path.dst = Ipv4::parse(doc["dst"].get<std::string>());
  else path.dst = Ipv4::parse(doc.at("dst_addr").get<std::string>());

  auto add_hop = [&](int index, const ordered_json& ip_field) {
    TracerouteHop hop;
    hop.hop_index = index;
    if (ip_field.is_string()) {
      std::string text = ip_field.get<std::string>();
      if (!text.empty() && text != "*") hop.ip = Ipv4::parse(text);
    }
    if (!path.hops.empty() && index <= path.hops.back().hop_index)
      throw ParseError("hop indices must be strictly increasing");
    path.hops.push_back(hop);
  };

  if (doc.contains("hops")) {
    for (const auto& h : doc["hops"])
      add_hop(h.at("hop").get<int>(), h.contains("ip") ? h["ip"] : ordered_json());
  } else if (doc.contains("result")) {
    // Public traceroute-result schema subset: result[].hops[].from, one
    // entry per TTL; the first reply per hop wins.
    int index = 0;
    for (const auto& entry : doc["result"]) {
      index = entry.contains("hop") ? entry["hop"].get<int>() : index + 1;
      ordered_json from;
      if (entry.contains("hops"))
        for (const auto& h : entry["hops"])
          if (h.contains("from")) {
            from = h["from"];
            break;
          }
      add_hop(index, from);
    }
  } else {
    throw ParseError("traceroute object has neither 'hops' nor 'result'");
  }

  // Strip unroutable and anycast hop addresses; the slot stays, unannotated.
  for (auto& hop : path.hops) {
    if (!hop.ip) continue;
    if (is_private_or_reserved(*hop.ip) || (ctx && ctx->is_anycast(*hop.ip))) {
      hop.ip.reset();
      if (stats) ++stats->stripped_hops;
    }
  }

  // The last responsive hop is the destination host itself, not a router.
  for (auto it = path.hops.rbegin(); it != path.hops.rend(); ++it) {
    if (!it->ip) continue;
    if (*it->ip == path.dst)
      path.hops.erase(std::next(it).base());
    break;
  }

  if (path.routable_hop_count() < min_hops) {
    if (stats) ++stats->dropped_short;
    return std::nullopt;
  }
  return path;
}

}  // namespace

std::vector<TraceroutePath> ingest_traceroutes(std::string_view jsonl, int min_hops,
                                               const AsContext* ctx, IngestStats* stats) {
  std::vector<TraceroutePath> out;
  IngestStats local;
  for (const auto& raw : split(jsonl, '\n')) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    ++local.lines;
    try {
      if (auto path = parse_traceroute_line(line, ctx, min_hops, &local)) {
        out.push_back(std::move(*path));
        ++local.kept;
      }
    } catch (const std::exception&) {
      ++local.malformed;  // counted and skipped; ingest continues
    }
  }
  if (stats) *stats = local;
  return out;
}

std::vector<AnnotatedPath> annotate_paths(std::span<const TraceroutePath> paths,
                                          const std::map<Ipv4, Verdict>& verdicts,
                                          std::span<const AliasSet> aliases,
                                          AnnotateStats* stats) {
  // Resolve one verdict per alias set up front.
  std::map<Ipv4, const AliasSet*> interface_to_router;
  std::map<const AliasSet*, Verdict> router_verdict;
  for (const auto& alias : aliases) {
    std::set<std::string> vendors;
    std::optional<Verdict> resolved;
    for (Ipv4 addr : alias.interfaces) {
      interface_to_router[addr] = &alias;
      auto it = verdicts.find(addr);
      if (it == verdicts.end()) continue;
      if (it->second.outcome == VerdictOutcome::Vendor) vendors.insert(it->second.vendor);
      if (!resolved) resolved = it->second;
    }
    Verdict v;
    if (vendors.size() == 1) {
      v.outcome = VerdictOutcome::Vendor;
      v.vendor = *vendors.begin();
    } else if (vendors.size() >= 2) {
      // Conflicting inferences inside one router: conservative downgrade.
      if (stats) ++stats->alias_conflicts;
      v.outcome = VerdictOutcome::NonUnique;
      v.candidates = vendors;
    } else if (resolved) {
      v = *resolved;
    } else {
      v.outcome = VerdictOutcome::Unknown;
    }
    router_verdict[&alias] = std::move(v);
  }

  auto verdict_for = [&](Ipv4 addr) -> Verdict {
    if (auto it = interface_to_router.find(addr); it != interface_to_router.end())
      return router_verdict[it->second];
    if (auto it = verdicts.find(addr); it != verdicts.end()) return it->second;
    Verdict v;
    v.outcome = VerdictOutcome::Unknown;
    return v;
  };

  std::vector<AnnotatedPath> out;
  out.reserve(paths.size());
  for (const auto& path : paths) {
    AnnotatedPath ap;
    ap.path = path;
    ap.hop_verdicts.resize(path.hops.size());
    for (std::size_t i = 0; i < path.hops.size(); ++i) {
      const auto& hop = path.hops[i];
      if (!hop.ip) continue;
      ++ap.routable_hops;
      Verdict v = verdict_for(*hop.ip);
      if (v.outcome == VerdictOutcome::Vendor) {
        ap.vendor_set.insert(v.vendor);
        ++ap.identified_hops;
      }
      ap.hop_verdicts[i] = std::move(v);
    }
    if (ap.routable_hops > 0)
      ap.identified_fraction = static_cast<double>(ap.identified_hops) / ap.routable_hops;
    if (!path.hops.empty())
      ap.identified_fraction_total =
          static_cast<double>(ap.identified_hops) / static_cast<double>(path.hops.size());
    out.push_back(std::move(ap));
  }
  return out;
}

RegionFilter RegionFilter::parse(std::string_view text) {
  RegionFilter f;
  if (text == "ALL" || text == "all") return f;
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ParseError("region filter must be ALL, INTRA:<cc> or INTER:<cc>");
  std::string kind(text.substr(0, colon));
  f.country = std::string(text.substr(colon + 1));
  if (f.country.empty()) throw ParseError("region filter needs a country code");
  if (kind == "INTRA" || kind == "intra") f.kind = RegionFilterKind::Intra;
  else if (kind == "INTER" || kind == "inter") f.kind = RegionFilterKind::Inter;
  else throw ParseError("region filter must be ALL, INTRA:<cc> or INTER:<cc>");
  return f;
}

std::string RegionFilter::label() const {
  switch (kind) {
    case RegionFilterKind::All: return "ALL";
    case RegionFilterKind::Intra: return "INTRA:" + country;
    case RegionFilterKind::Inter: return "INTER:" + country;
  }
  return "?";
}

int fraction_bucket(double fraction) {
  int bucket = static_cast<int>(std::floor(fraction * 10.0));
  return std::clamp(bucket, 0, 10);
}

std::string vendor_combo_label(const std::set<std::string>& vendors) {
  std::string out;
  for (const auto& v : vendors) {
    if (!out.empty()) out += "+";
    out += v;
  }
  return out.empty() ? "(none)" : out;
}

DiversityReport diversity_report(std::span<const AnnotatedPath> annotated,
                                 const RegionFilter& filter, const AsContext& ctx) {
  DiversityReport report;
  report.filter = filter;
  std::map<std::string, int> combos;

  for (const auto& ap : annotated) {
    if (filter.kind != RegionFilterKind::All) {
      auto src_cc = ctx.country_of(ap.path.src);
      auto dst_cc = ctx.country_of(ap.path.dst);
      if (!src_cc || !dst_cc) {
        ++report.paths_unmapped;
        continue;
      }
      bool src_in = *src_cc == filter.country;
      bool dst_in = *dst_cc == filter.country;
      if (filter.kind == RegionFilterKind::Intra && !(src_in && dst_in)) continue;
      if (filter.kind == RegionFilterKind::Inter && !(src_in ^ dst_in)) continue;
    }
    ++report.paths_considered;
    ++report.vendor_set_size_counts[static_cast<int>(ap.vendor_set.size())];
    ++combos[vendor_combo_label(ap.vendor_set)];
    ++report.identified_fraction_hist[static_cast<std::size_t>(
        fraction_bucket(ap.identified_fraction))];
    ++report.identified_fraction_total_hist[static_cast<std::size_t>(
        fraction_bucket(ap.identified_fraction_total))];
  }

  report.top_combinations.assign(combos.begin(), combos.end());
  std::sort(report.top_combinations.begin(), report.top_combinations.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return report;
}

std::string diversity_report_to_json(const DiversityReport& report) {
  ordered_json doc;
  doc["scope"] = "visible_paths_only";
  doc["region_filter"] = report.filter.label();
  doc["paths_considered"] = report.paths_considered;
  doc["paths_unmapped"] = report.paths_unmapped;
  ordered_json sizes = ordered_json::object();
  for (const auto& [size, count] : report.vendor_set_size_counts)
    sizes[std::to_string(size)] = count;
  doc["vendor_set_sizes"] = sizes;
  ordered_json combos = ordered_json::array();
  for (const auto& [combo, count] : report.top_combinations) {
    ordered_json c;
    c["vendors"] = combo;
    c["paths"] = count;
    combos.push_back(std::move(c));
  }
  doc["combinations"] = combos;
  doc["identified_fraction_hist"] = report.identified_fraction_hist;
  doc["identified_fraction_total_hist"] = report.identified_fraction_total_hist;
  return doc.dump(2) + "\n";
}

std::string combinations_to_csv(const DiversityReport& report) {
  std::string out = "vendors,paths\n";
  for (const auto& [combo, count] : report.top_combinations)
    out += combo + "," + std::to_string(count) + "\n";
  return out;
}

std::vector<HomogeneityEntry> homogeneity_report(const std::map<Ipv4, Verdict>& verdicts,
                                                 const AsContext& ctx, int min_routers,
                                                 double dominance) {
  struct Tally {
    int total = 0;
    std::map<std::string, int> vendor_counts;
  };
  std::map<Asn, Tally> by_as;
  for (const auto& [addr, verdict] : verdicts) {
    auto asn = ctx.asn_of(addr);
    if (!asn) continue;
    Tally& tally = by_as[*asn];
    ++tally.total;
    if (verdict.outcome == VerdictOutcome::Vendor) ++tally.vendor_counts[verdict.vendor];
  }

  std::vector<HomogeneityEntry> out;
  for (const auto& [asn, tally] : by_as) {
    if (tally.total < min_routers) continue;
    const std::string* best_vendor = nullptr;
    int best = 0;
    for (const auto& [vendor, count] : tally.vendor_counts)
      if (count > best) {
        best = count;
        best_vendor = &vendor;
      }
    if (!best_vendor) continue;
    double share = static_cast<double>(best) / tally.total;
    if (share >= dominance)
      out.push_back({asn, tally.total, *best_vendor, best, share});
  }
  return out;
}

std::string homogeneity_to_csv(std::span<const HomogeneityEntry> entries) {
  std::string out = "asn,total_ips,dominant_vendor,dominant_count,share\n";
  for (const auto& e : entries) {
    char share[16];
    std::snprintf(share, sizeof(share), "%.4f", e.share);
    out += std::to_string(e.asn) + "," + std::to_string(e.total_ips) + "," + e.dominant_vendor +
           "," + std::to_string(e.dominant_count) + "," + share + "\n";
  }
  return out;
}

}  // namespace lfp
