// lfp: lightweight router vendor fingerprinting pipeline.
//
// Pipeline stages talk only through files: scan -> label -> build-sigs ->
// classify -> analyze-paths, plus simulate (fleet materialization) and
// evaluate (holdout precision/recall). Exit codes: 0 success, 1 finished
// with warnings, 2 fatal.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "lfp/classify.hpp"
#include "lfp/features.hpp"
#include "lfp/io.hpp"
#include "lfp/live_transport.hpp"
#include "lfp/paths.hpp"
#include "lfp/signatures.hpp"
#include "lfp/sim.hpp"

using namespace lfp;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitWarnings = 1;
constexpr int kExitFatal = 2;

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Reproducibility record written next to each primary output. Timestamps
// live here and only here; data outputs stay byte-identical across reruns.
struct Manifest {
  std::string subcommand;
  ordered_json options = ordered_json::object();
  ordered_json inputs = ordered_json::object();
  std::vector<std::string> outputs;
  ordered_json summary = ordered_json::object();

  void add_input(const std::string& path) {
    inputs[path] = "fnv1a64:" + to_hex(file_digest(path));
  }

  void write(const fs::path& where) const {
    ordered_json doc;
    doc["tool"] = "lfp";
    doc["version"] = kToolVersion;
    doc["subcommand"] = subcommand;
    doc["started_at"] = iso_now();
    doc["options"] = options;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    if (!summary.empty()) doc["summary"] = summary;
    write_file_atomic(where, doc.dump(2) + "\n");
  }
};

fs::path manifest_path_for(const fs::path& primary_output) {
  fs::path p = primary_output;
  p += ".manifest.json";
  return p;
}

struct ScanArgs {
  std::string targets_file;
  std::string transport = "live";
  std::string out_file;
  ProbePlanConfig cfg;
  bool sequential = false;
};

std::unique_ptr<Transport> make_transport(const std::string& spec,
                                          std::unique_ptr<SimFleet>& fleet_holder) {
  if (spec == "live") return std::make_unique<LiveTransport>();
  if (spec.rfind("sim:", 0) == 0) {
    std::string path = spec.substr(4);
    fleet_holder = std::make_unique<SimFleet>(SimFleet::from_spec_json(read_file(path)));
    return std::make_unique<SimTransport>(*fleet_holder);
  }
  throw ValidationError("transport must be 'live' or 'sim:<fleet-spec.json>', got '" + spec +
                        "'");
}

int cmd_scan(const ScanArgs& args) {
  ScanArgs a = args;
  a.cfg.interleave = !args.sequential;
  a.cfg.validate();

  std::vector<Ipv4> targets = load_target_list(read_file(a.targets_file));
  std::unique_ptr<SimFleet> fleet;
  std::unique_ptr<Transport> transport = make_transport(a.transport, fleet);

  Manifest manifest;
  manifest.subcommand = "scan";
  manifest.add_input(a.targets_file);
  if (a.transport.rfind("sim:", 0) == 0) manifest.add_input(a.transport.substr(4));
  manifest.options["transport"] = a.transport;
  manifest.options["port"] = a.cfg.tcp_udp_port;
  manifest.options["icmp_payload_len"] = a.cfg.icmp_payload_len;
  manifest.options["udp_payload_len"] = a.cfg.udp_payload_len;
  manifest.options["per_target_rate"] = a.cfg.per_target_rate;
  manifest.options["global_rate"] = a.cfg.global_rate;
  manifest.options["reply_timeout"] = a.cfg.reply_timeout;
  manifest.options["inter_probe_gap"] = a.cfg.inter_probe_gap;
  manifest.options["interleave"] = a.cfg.interleave;
  manifest.options["seed"] = a.cfg.seed;

  std::string buffer;
  ScanResult result = execute_scan(targets, a.cfg, *transport, [&](const ResponseSet& set) {
    buffer += response_set_to_json_line(set);
    buffer += "\n";
  });
  write_file_atomic(a.out_file, buffer);

  manifest.outputs.push_back(a.out_file);
  manifest.summary["targets"] = targets.size();
  manifest.summary["response_sets"] = result.sets.size();
  manifest.summary["probes_sent"] = result.send_log.size();
  manifest.summary["target_errors"] = result.errors.size();
  manifest.summary["aborted"] = result.aborted;
  manifest.write(manifest_path_for(a.out_file));

  for (const auto& err : result.errors)
    std::cerr << "warning: " << err.target.str() << ": " << err.message << "\n";
  if (result.aborted) {
    std::cerr << "fatal: transport failed; partial results flushed to " << a.out_file << "\n";
    return kExitFatal;
  }
  std::cerr << "scanned " << result.sets.size() << " targets ("
            << result.send_log.size() << " probes) -> " << a.out_file << "\n";
  return result.errors.empty() ? kExitOk : kExitWarnings;
}

int cmd_label(const std::string& responses_file, const std::string& out_file,
              const std::string& dict_file) {
  VendorDict dict =
      dict_file.empty() ? VendorDict::builtin() : VendorDict::from_csv(read_file(dict_file));
  auto sets = response_sets_from_jsonl(read_file(responses_file));
  LabelStats stats;
  auto labels = label_responses(sets, dict, &stats);
  write_file_atomic(out_file, labels_to_csv(labels));

  Manifest manifest;
  manifest.subcommand = "label";
  manifest.add_input(responses_file);
  if (!dict_file.empty()) manifest.add_input(dict_file);
  manifest.outputs.push_back(out_file);
  manifest.summary["responses"] = stats.responses;
  manifest.summary["snmpv3_reports"] = stats.reports;
  manifest.summary["labels"] = labels.size();
  manifest.summary["parse_failures"] = stats.parse_failures;
  manifest.write(manifest_path_for(out_file));

  std::cerr << "labeled " << labels.size() << " of " << stats.responses << " targets -> "
            << out_file << "\n";
  if (stats.parse_failures) {
    std::cerr << "warning: " << stats.parse_failures << " reports failed to parse\n";
    return kExitWarnings;
  }
  return kExitOk;
}

struct Dataset {
  std::string id;
  std::string responses_file;
  std::string labels_file;
};

std::vector<LabeledVector> load_labeled_vectors(const std::vector<Dataset>& datasets,
                                                Manifest& manifest, int* unlabeled_out) {
  std::vector<LabeledVector> labeled;
  int unlabeled = 0;
  for (const auto& ds : datasets) {
    manifest.add_input(ds.responses_file);
    manifest.add_input(ds.labels_file);
    auto sets = response_sets_from_jsonl(read_file(ds.responses_file));
    std::map<Ipv4, std::string> vendor_by_addr;
    for (const auto& entry : labels_from_csv(read_file(ds.labels_file)))
      vendor_by_addr[entry.address] = entry.vendor;
    for (const auto& set : sets) {
      auto it = vendor_by_addr.find(set.target);
      if (it == vendor_by_addr.end()) {
        ++unlabeled;
        continue;
      }
      labeled.push_back({extract_features(set, IpidConfig{}), it->second, ds.id});
    }
  }
  if (unlabeled_out) *unlabeled_out = unlabeled;
  return labeled;
}

int cmd_build_sigs(const std::vector<std::string>& responses, const std::vector<std::string>& labels,
                   std::vector<std::string> dataset_ids, const std::string& out_file,
                   int min_occurrences, bool no_partials, const std::string& sweep_range,
                   const std::string& sweep_out) {
  if (responses.size() != labels.size())
    throw ValidationError("--responses and --labels must be given the same number of times");
  if (responses.empty()) throw ValidationError("at least one --responses/--labels pair needed");
  while (dataset_ids.size() < responses.size())
    dataset_ids.push_back("ds" + std::to_string(dataset_ids.size()));

  std::vector<Dataset> datasets;
  for (std::size_t i = 0; i < responses.size(); ++i)
    datasets.push_back({dataset_ids[i], responses[i], labels[i]});

  Manifest manifest;
  manifest.subcommand = "build-sigs";
  int unlabeled = 0;
  auto labeled = load_labeled_vectors(datasets, manifest, &unlabeled);

  SignatureBuildConfig cfg;
  cfg.min_occurrences = min_occurrences;
  cfg.derive_partials = !no_partials;
  SignatureTable table = build_signature_table(labeled, cfg);
  table.meta.tool_version = kToolVersion;
  save_table_file(table, out_file);

  manifest.options["min_occurrences"] = min_occurrences;
  manifest.options["derive_partials"] = cfg.derive_partials;
  manifest.outputs.push_back(out_file);
  manifest.summary["labeled_vectors"] = labeled.size();
  manifest.summary["unlabeled_skipped"] = unlabeled;
  manifest.summary["records"] = table.records.size();
  manifest.summary["unique"] = table.count(SigClass::Unique);
  manifest.summary["non_unique"] = table.count(SigClass::NonUnique);
  manifest.summary["below_threshold"] = table.count(SigClass::BelowThreshold);

  if (!sweep_range.empty()) {
    auto dots = sweep_range.find("..");
    if (dots == std::string::npos)
      throw ValidationError("--sweep wants <lo>..<hi>, got '" + sweep_range + "'");
    int lo = std::stoi(sweep_range.substr(0, dots));
    int hi = std::stoi(sweep_range.substr(dots + 2));
    if (lo < 1 || hi < lo) throw ValidationError("--sweep range must satisfy 1 <= lo <= hi");
    std::vector<int> thresholds;
    for (int t = lo; t <= hi; ++t) thresholds.push_back(t);
    auto counts = sweep_threshold(labeled, thresholds, cfg.derive_partials);
    std::string sweep_file = sweep_out.empty() ? out_file + ".sweep.csv" : sweep_out;
    write_file_atomic(sweep_file, sweep_to_csv(counts));
    manifest.outputs.push_back(sweep_file);
    std::cerr << "sweep " << lo << ".." << hi << " -> " << sweep_file << "\n";
  }

  manifest.write(manifest_path_for(out_file));
  std::cerr << "built " << table.records.size() << " signature records ("
            << table.count(SigClass::Unique) << " unique, " << table.count(SigClass::NonUnique)
            << " non-unique) from " << labeled.size() << " labeled vectors -> " << out_file
            << "\n";
  return kExitOk;
}

int cmd_classify(const std::string& responses_file, const std::string& table_file,
                 const std::string& out_file) {
  auto sets = response_sets_from_jsonl(read_file(responses_file));
  SignatureTable table = load_table_file(table_file);

  std::string buffer;
  std::map<std::string, int> outcome_counts;
  int full_matches = 0, partial_from_full = 0, partial_native = 0;
  for (const auto& set : sets) {
    FeatureVector vec = extract_features(set, IpidConfig{});
    Verdict verdict = classify_vector(vec, table);
    ++outcome_counts[verdict_outcome_name(verdict.outcome)];
    if (verdict.matched_key) {
      if (verdict.full_match) ++full_matches;
      else if (verdict.native_partial) ++partial_native;
      else ++partial_from_full;
    }
    buffer += verdict_to_json_line(set.target, verdict);
    buffer += "\n";
  }
  write_file_atomic(out_file, buffer);

  Manifest manifest;
  manifest.subcommand = "classify";
  manifest.add_input(responses_file);
  manifest.add_input(table_file);
  manifest.outputs.push_back(out_file);
  manifest.summary["targets"] = sets.size();
  for (const auto& [name, count] : outcome_counts) manifest.summary[name] = count;
  // Partial coverage reported by route: natively partial responders vs
  // full-key misses retried as partials.
  manifest.summary["full_matches"] = full_matches;
  manifest.summary["partial_matches_native"] = partial_native;
  manifest.summary["partial_matches_fallback"] = partial_from_full;
  manifest.write(manifest_path_for(out_file));

  std::cerr << "classified " << sets.size() << " targets -> " << out_file << " (full "
            << full_matches << ", partial native " << partial_native << ", partial fallback "
            << partial_from_full << ")\n";
  return kExitOk;
}

struct AnalyzeArgs {
  std::string traces_file;
  std::string verdicts_file;
  std::string out_dir;
  std::string aliases_file;
  std::string prefix2as_file;
  std::string prefix2country_file;
  std::string relationships_file;
  std::string anycast_file;
  std::string region = "ALL";
  int min_hops = 3;
  int min_routers = 1000;
  double dominance = 0.85;
  int max_depth = 6;
  std::vector<std::string> alt_transit;  // "dst:avoid"
};

int cmd_analyze_paths(const AnalyzeArgs& args) {
  Manifest manifest;
  manifest.subcommand = "analyze-paths";
  manifest.add_input(args.traces_file);
  manifest.add_input(args.verdicts_file);

  AsContext ctx;
  if (!args.prefix2as_file.empty()) {
    ctx.prefix_to_asn = load_prefix_to_asn(read_file(args.prefix2as_file));
    manifest.add_input(args.prefix2as_file);
  }
  if (!args.prefix2country_file.empty()) {
    ctx.prefix_to_country = load_prefix_to_country(read_file(args.prefix2country_file));
    manifest.add_input(args.prefix2country_file);
  }
  if (!args.anycast_file.empty()) {
    ctx.anycast = load_anycast_prefixes(read_file(args.anycast_file));
    manifest.add_input(args.anycast_file);
  }
  if (!args.relationships_file.empty()) {
    ctx.relationships = AsGraph::from_text(read_file(args.relationships_file));
    manifest.add_input(args.relationships_file);
  }

  std::map<Ipv4, Verdict> verdicts = verdicts_from_jsonl(read_file(args.verdicts_file));

  IngestStats ingest;
  auto paths = ingest_traceroutes(read_file(args.traces_file), args.min_hops, &ctx, &ingest);

  std::vector<AliasSet> aliases;
  if (!args.aliases_file.empty()) {
    aliases = load_alias_sets(read_file(args.aliases_file));
    manifest.add_input(args.aliases_file);
  }
  AnnotateStats annotate_stats;
  auto annotated = annotate_paths(paths, verdicts, aliases, &annotate_stats);

  fs::create_directories(args.out_dir);
  RegionFilter filter = RegionFilter::parse(args.region);
  DiversityReport report = diversity_report(annotated, filter, ctx);
  fs::path diversity_file = fs::path(args.out_dir) / "diversity.json";
  write_file_atomic(diversity_file, diversity_report_to_json(report));
  fs::path combos_file = fs::path(args.out_dir) / "combinations.csv";
  write_file_atomic(combos_file, combinations_to_csv(report));
  manifest.outputs.push_back(diversity_file.string());
  manifest.outputs.push_back(combos_file.string());

  if (!args.prefix2as_file.empty()) {
    auto entries = homogeneity_report(verdicts, ctx, args.min_routers, args.dominance);
    fs::path homogeneity_file = fs::path(args.out_dir) / "homogeneity.csv";
    write_file_atomic(homogeneity_file, homogeneity_to_csv(entries));
    manifest.outputs.push_back(homogeneity_file.string());
    manifest.summary["homogeneous_ases"] = entries.size();
  }

  if (!args.alt_transit.empty()) {
    if (args.relationships_file.empty())
      throw ValidationError("--alt-transit needs --relationships");
    std::string lines;
    for (const auto& query : args.alt_transit) {
      auto colon = query.find(':');
      if (colon == std::string::npos)
        throw ValidationError("--alt-transit wants <dst_as>:<avoid_as>, got '" + query + "'");
      Asn dst = static_cast<Asn>(std::stoul(query.substr(0, colon)));
      Asn avoid = static_cast<Asn>(std::stoul(query.substr(colon + 1)));
      TransitResult result = alternative_transit(dst, avoid, ctx.relationships, args.max_depth);
      ordered_json line;
      line["scope"] = "visible_paths_only";
      line["dst_as"] = dst;
      line["avoid_as"] = avoid;
      line["result"] = transit_outcome_name(result.outcome);
      line["transit_asns"] = result.transit_asns;
      lines += line.dump();
      lines += "\n";
    }
    fs::path transit_file = fs::path(args.out_dir) / "alt_transit.jsonl";
    write_file_atomic(transit_file, lines);
    manifest.outputs.push_back(transit_file.string());
  }

  manifest.options["region"] = args.region;
  manifest.options["min_hops"] = args.min_hops;
  manifest.options["min_routers"] = args.min_routers;
  manifest.options["dominance"] = args.dominance;
  manifest.options["max_depth"] = args.max_depth;
  manifest.summary["traceroutes_kept"] = ingest.kept;
  manifest.summary["traceroutes_malformed"] = ingest.malformed;
  manifest.summary["traceroutes_dropped_short"] = ingest.dropped_short;
  manifest.summary["hops_stripped"] = ingest.stripped_hops;
  manifest.summary["alias_conflicts"] = annotate_stats.alias_conflicts;
  manifest.summary["paths_considered"] = report.paths_considered;
  manifest.write(fs::path(args.out_dir) / "manifest.json");

  std::cerr << "analyzed " << ingest.kept << " paths (" << report.paths_considered
            << " in region " << filter.label() << ") -> " << args.out_dir << "\n";
  if (ingest.malformed) {
    std::cerr << "warning: " << ingest.malformed << " malformed traceroute lines skipped\n";
    return kExitWarnings;
  }
  return kExitOk;
}

int cmd_simulate(const std::string& fleet_spec, const std::string& out_dir) {
  std::string spec_text =
      fleet_spec == "builtin:demo" ? demo_fleet_spec_json() : read_file(fleet_spec);
  SimFleet fleet = SimFleet::from_spec_json(spec_text);

  fs::create_directories(out_dir);
  fs::path labels_file = fs::path(out_dir) / "labels.csv";
  write_file_atomic(labels_file, SimFleet::ground_truth_csv(fleet.ground_truth()));
  fs::path targets_file = fs::path(out_dir) / "targets.txt";
  std::string targets;
  for (const auto& addr : fleet.addresses()) targets += addr.str() + "\n";
  write_file_atomic(targets_file, targets);
  fs::path spec_file = fs::path(out_dir) / "fleet.json";
  write_file_atomic(spec_file, spec_text);

  Manifest manifest;
  manifest.subcommand = "simulate";
  if (fleet_spec != "builtin:demo") manifest.add_input(fleet_spec);
  manifest.options["fleet"] = fleet_spec;
  manifest.outputs = {labels_file.string(), targets_file.string(), spec_file.string()};
  manifest.summary["routers"] = fleet.size();
  manifest.write(fs::path(out_dir) / "manifest.json");

  std::cerr << "materialized fleet of " << fleet.size() << " routers -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& responses_file, const std::string& labels_file,
                 double split, std::uint64_t seed, int min_occurrences, bool no_partials,
                 const std::string& out_file) {
  Manifest manifest;
  manifest.subcommand = "evaluate";
  std::vector<Dataset> datasets = {{"eval", responses_file, labels_file}};
  auto labeled = load_labeled_vectors(datasets, manifest, nullptr);
  if (labeled.empty()) throw ValidationError("no labeled vectors to evaluate");

  SignatureBuildConfig cfg;
  cfg.min_occurrences = min_occurrences;
  cfg.derive_partials = !no_partials;
  auto rows = evaluate_holdout(labeled, cfg, split, seed);
  write_file_atomic(out_file, evaluation_to_csv(rows));

  manifest.options["split"] = split;
  manifest.options["seed"] = seed;
  manifest.options["min_occurrences"] = min_occurrences;
  manifest.outputs.push_back(out_file);
  manifest.summary["labeled_vectors"] = labeled.size();
  manifest.summary["vendors"] = rows.size();
  manifest.write(manifest_path_for(out_file));

  std::cerr << "evaluated " << labeled.size() << " labeled vectors over " << rows.size()
            << " vendors -> " << out_file << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lfp: lightweight router vendor fingerprinting"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "config file with per-subcommand defaults")
      ->envname("LFP_CONFIG");
  app.require_subcommand(1);

  ScanArgs scan_args;
  auto* scan = app.add_subcommand("scan", "probe targets and write response JSONL");
  scan->add_option("--targets", scan_args.targets_file, "target list, one IPv4 per line")
      ->required();
  scan->add_option("--transport", scan_args.transport, "live or sim:<fleet-spec.json>")
      ->required();
  scan->add_option("--out", scan_args.out_file, "output JSONL path")->required();
  scan->add_option("--port", scan_args.cfg.tcp_udp_port, "TCP/UDP destination port");
  scan->add_option("--icmp-payload", scan_args.cfg.icmp_payload_len, "ICMP payload bytes");
  scan->add_option("--udp-payload", scan_args.cfg.udp_payload_len, "UDP payload bytes");
  scan->add_option("--per-target-rate", scan_args.cfg.per_target_rate, "probes/s per target");
  scan->add_option("--global-rate", scan_args.cfg.global_rate, "packets/s overall");
  scan->add_option("--timeout", scan_args.cfg.reply_timeout, "reply timeout seconds");
  scan->add_option("--gap", scan_args.cfg.inter_probe_gap, "per-target probe gap seconds");
  scan->add_option("--seed", scan_args.cfg.seed, "seed for target order and probe ipids");
  scan->add_flag("--sequential", scan_args.sequential,
                 "send per-protocol blocks instead of interleaving");

  std::string label_responses_file, label_out, label_dict;
  auto* label = app.add_subcommand("label", "extract SNMPv3 vendor labels from responses");
  label->add_option("--responses", label_responses_file, "scan output JSONL")->required();
  label->add_option("--out", label_out, "labels CSV path")->required();
  label->add_option("--pen-dict", label_dict, "pen,vendor CSV (defaults to the built-in)");

  std::vector<std::string> sig_responses, sig_labels, sig_dataset_ids;
  std::string sig_out, sig_sweep, sig_sweep_out;
  int sig_min_occurrences = 20;
  bool sig_no_partials = false;
  auto* build = app.add_subcommand("build-sigs", "build the signature table from labeled scans");
  build->add_option("--responses", sig_responses, "scan output JSONL (repeatable per dataset)")
      ->required();
  build->add_option("--labels", sig_labels, "labels CSV (one per --responses)")->required();
  build->add_option("--dataset-ids", sig_dataset_ids, "dataset names (default ds0, ds1, ...)");
  build->add_option("--out", sig_out, "signature table JSON path")->required();
  build->add_option("--min-occurrences", sig_min_occurrences, "occurrence threshold");
  build->add_flag("--no-partials", sig_no_partials, "skip partial signature derivation");
  build->add_option("--sweep", sig_sweep, "also sweep thresholds <lo>..<hi>");
  build->add_option("--sweep-out", sig_sweep_out, "sweep CSV path (default <out>.sweep.csv)");

  std::string cls_responses, cls_table, cls_out;
  auto* classify = app.add_subcommand("classify", "classify responses against a table");
  classify->add_option("--responses", cls_responses, "scan output JSONL")->required();
  classify->add_option("--table", cls_table, "signature table JSON")->required();
  classify->add_option("--out", cls_out, "verdict JSONL path")->required();

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze-paths", "vendor diversity along forwarding paths");
  analyze->add_option("--traces", analyze_args.traces_file, "traceroute JSONL")->required();
  analyze->add_option("--verdicts", analyze_args.verdicts_file, "verdict JSONL")->required();
  analyze->add_option("--out-dir", analyze_args.out_dir, "report directory")->required();
  analyze->add_option("--aliases", analyze_args.aliases_file, "ITDK-style alias sets");
  analyze->add_option("--prefix2as", analyze_args.prefix2as_file, "prefix TAB len TAB asn");
  analyze->add_option("--prefix2country", analyze_args.prefix2country_file, "prefix,country CSV");
  analyze->add_option("--relationships", analyze_args.relationships_file, "as1|as2|rel lines");
  analyze->add_option("--anycast", analyze_args.anycast_file, "anycast prefixes, one per line");
  analyze->add_option("--region", analyze_args.region, "ALL, INTRA:<cc> or INTER:<cc>");
  analyze->add_option("--min-hops", analyze_args.min_hops, "minimum routable hops per path");
  analyze->add_option("--min-routers", analyze_args.min_routers,
                      "homogeneity: minimum mapped IPs per AS");
  analyze->add_option("--dominance", analyze_args.dominance, "homogeneity: dominant share bound");
  analyze->add_option("--max-depth", analyze_args.max_depth, "valley-free search depth");
  analyze->add_option("--alt-transit", analyze_args.alt_transit,
                      "alternative transit query <dst_as>:<avoid_as> (repeatable)");

  std::string sim_fleet = "builtin:demo", sim_out_dir;
  auto* simulate = app.add_subcommand("simulate", "materialize a fleet spec and its labels");
  simulate->add_option("--fleet", sim_fleet, "fleet spec JSON or builtin:demo");
  simulate->add_option("--out-dir", sim_out_dir, "output directory")->required();

  std::string eval_responses, eval_labels, eval_out;
  double eval_split = 0.8;
  std::uint64_t eval_seed = 1;
  int eval_min_occurrences = 20;
  bool eval_no_partials = false;
  auto* evaluate = app.add_subcommand("evaluate", "holdout precision/recall per vendor");
  evaluate->add_option("--responses", eval_responses, "scan output JSONL")->required();
  evaluate->add_option("--labels", eval_labels, "ground truth labels CSV")->required();
  evaluate->add_option("--split", eval_split, "training fraction (default 0.8)");
  evaluate->add_option("--seed", eval_seed, "split seed");
  evaluate->add_option("--min-occurrences", eval_min_occurrences, "occurrence threshold");
  evaluate->add_flag("--no-partials", eval_no_partials, "skip partial signature derivation");
  evaluate->add_option("--out", eval_out, "evaluation CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints the message or help text
    return code == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (scan->parsed()) return cmd_scan(scan_args);
    if (label->parsed()) return cmd_label(label_responses_file, label_out, label_dict);
    if (build->parsed())
      return cmd_build_sigs(sig_responses, sig_labels, sig_dataset_ids, sig_out,
                            sig_min_occurrences, sig_no_partials, sig_sweep, sig_sweep_out);
    if (classify->parsed()) return cmd_classify(cls_responses, cls_table, cls_out);
    if (analyze->parsed()) return cmd_analyze_paths(analyze_args);
    if (simulate->parsed()) return cmd_simulate(sim_fleet, sim_out_dir);
    if (evaluate->parsed())
      return cmd_evaluate(eval_responses, eval_labels, eval_split, eval_seed,
                          eval_min_occurrences, eval_no_partials, eval_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
