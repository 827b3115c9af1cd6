// Python bindings for the fingerprinting core: feature extraction, signature
// tables, classification, the simulated fleet, and the SNMPv3 engine-id
// machinery.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lfp/classify.hpp"
#include "lfp/features.hpp"
#include "lfp/io.hpp"
#include "lfp/signatures.hpp"
#include "lfp/sim.hpp"

namespace py = pybind11;
using namespace lfp;

namespace {

py::dict verdict_to_dict(const Verdict& verdict) {
  py::dict out;
  out["verdict"] = verdict_outcome_name(verdict.outcome);
  if (verdict.outcome == VerdictOutcome::Vendor) out["vendor"] = verdict.vendor;
  if (verdict.outcome == VerdictOutcome::NonUnique)
    out["candidates"] = std::vector<std::string>(verdict.candidates.begin(),
                                                 verdict.candidates.end());
  if (verdict.matched_key) {
    out["matched_key"] = *verdict.matched_key;
    out["match_kind"] = verdict.full_match ? "full" : "partial";
    out["match_protocols"] = verdict.match_protocols->names();
  }
  out["native_partial"] = verdict.native_partial;
  return out;
}

std::vector<LabeledVector> labeled_from_tuples(
    const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
  std::vector<LabeledVector> labeled;
  labeled.reserve(rows.size());
  for (const auto& [key, vendor, dataset] : rows)
    labeled.push_back({FeatureVector::from_canonical(key), vendor, dataset});
  return labeled;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lightweight router vendor fingerprinting core";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "LfpError");

  m.def(
      "classify_ipid_sequence",
      [](const std::vector<std::uint16_t>& ipids, int step_threshold) {
        IpidConfig cfg;
        cfg.step_threshold = step_threshold;
        return ipid_class_token(classify_ipid_sequence(ipids, cfg));
      },
      py::arg("ipids"), py::arg("step_threshold") = 1300,
      "Classify one protocol's reply IPID triple: i, r, s, z or dup.");

  m.def("infer_ittl", &infer_ittl, py::arg("observed_ttl"),
        "Smallest initial-TTL class (32/64/128/255) at or above the observation.");

  m.def(
      "misclassification_probability",
      [](int step_threshold) {
        IpidConfig cfg;
        cfg.step_threshold = step_threshold;
        return cfg.misclassification_probability();
      },
      py::arg("step_threshold") = 1300,
      "Chance a uniform-random counter classifies incremental.");

  m.def(
      "encode_snmpv3_probe",
      [](std::uint32_t msg_id) {
        Bytes b = encode_snmpv3_probe(msg_id);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      },
      py::arg("msg_id") = 0x1000, "The unauthenticated SNMPv3 discovery probe.");

  m.def(
      "parse_engine_id",
      [](const py::bytes& report) {
        std::string raw = report;
        EngineId id = parse_engine_id(Bytes(raw.begin(), raw.end()));
        py::dict out;
        out["raw_hex"] = bytes_to_hex(id.raw);
        out["format_flag"] = id.format_flag;
        out["enterprise_number"] =
            id.enterprise_number ? py::cast(*id.enterprise_number) : py::none();
        return out;
      },
      py::arg("report"), "Extract msgAuthoritativeEngineID from an SNMPv3 report.");

  m.def(
      "vendor_from_pen",
      [](std::uint32_t pen) { return VendorDict::builtin().vendor_from_pen(pen).name; },
      py::arg("pen"), "Vendor for an IANA private enterprise number ('Other' on miss).");

  m.def(
      "project_key",
      [](const std::string& key, const std::vector<std::string>& protocols) {
        return FeatureVector::from_canonical(key)
            .project(ProtocolSet::from_names(protocols))
            .canonical();
      },
      py::arg("key"), py::arg("protocols"),
      "Project a canonical feature key onto a protocol subset.");

  py::class_<SignatureTable>(m, "SignatureTable")
      .def_static(
          "build",
          [](const std::vector<std::tuple<std::string, std::string, std::string>>& rows,
             int min_occurrences, bool derive_partials) {
            return build_signature_table(labeled_from_tuples(rows),
                                         {min_occurrences, derive_partials});
          },
          py::arg("labeled"), py::arg("min_occurrences") = 20,
          py::arg("derive_partials") = true,
          "Build from (key, vendor, dataset_id) tuples.")
      .def_static("loads", [](const std::string& text) { return load_table(text); },
                  py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_table_file(path); },
                  py::arg("path"))
      .def("dumps", [](const SignatureTable& t) { return store_table(t); })
      .def("save",
           [](const SignatureTable& t, const std::string& path) { save_table_file(t, path); },
           py::arg("path"))
      .def("classify",
           [](const SignatureTable& t, const std::string& key) {
             return verdict_to_dict(classify_vector(FeatureVector::from_canonical(key), t));
           },
           py::arg("key"), "Classify a canonical feature key.")
      .def_property_readonly("record_count",
                             [](const SignatureTable& t) { return t.records.size(); })
      .def_property_readonly("unique_count",
                             [](const SignatureTable& t) { return t.count(SigClass::Unique); })
      .def_property_readonly(
          "non_unique_count",
          [](const SignatureTable& t) { return t.count(SigClass::NonUnique); })
      .def("__eq__", [](const SignatureTable& a, const SignatureTable& b) { return a == b; });

  m.def(
      "evaluate_holdout",
      [](const std::vector<std::tuple<std::string, std::string, std::string>>& rows,
         double train_fraction, std::uint64_t seed, int min_occurrences, bool derive_partials) {
        auto evals = evaluate_holdout(labeled_from_tuples(rows),
                                      {min_occurrences, derive_partials}, train_fraction, seed);
        py::list out;
        for (const auto& row : evals) {
          py::dict d;
          d["vendor"] = row.vendor;
          d["recall"] = row.recall ? py::cast(*row.recall) : py::none();
          d["precision"] = row.precision ? py::cast(*row.precision) : py::none();
          d["total"] = row.test_total;
          out.append(d);
        }
        return out;
      },
      py::arg("labeled"), py::arg("train_fraction") = 0.8, py::arg("seed") = 1,
      py::arg("min_occurrences") = 20, py::arg("derive_partials") = true,
      "Seeded split, per-vendor precision/recall on the held-out share.");

  py::class_<SimFleet>(m, "Fleet")
      .def(py::init([](const std::string& spec_json) {
             return SimFleet::from_spec_json(spec_json);
           }),
           py::arg("spec_json"), "Build a simulated fleet from a JSON spec.")
      .def_property_readonly("size", &SimFleet::size)
      .def("ground_truth",
           [](const SimFleet& fleet) {
             py::list out;
             for (const auto& e : fleet.ground_truth()) {
               py::dict d;
               d["address"] = e.address.str();
               d["vendor"] = e.vendor;
               d["profile"] = e.profile;
               d["snmpv3_enabled"] = e.snmpv3_enabled;
               out.append(d);
             }
             return out;
           })
      .def(
          "scan",
          [](SimFleet& fleet, std::uint64_t seed) {
            SimTransport transport(fleet);
            ProbePlanConfig cfg;
            cfg.seed = seed;
            auto targets = fleet.addresses();
            ScanResult result = execute_scan(targets, cfg, transport);
            VendorDict dict = VendorDict::builtin();
            py::list out;
            for (const auto& set : result.sets) {
              FeatureVector vec = extract_features(set, IpidConfig{});
              py::dict d;
              d["target"] = set.target.str();
              d["key"] = vec.canonical();
              d["responsive"] = set.responsive.names();
              const ResponseRecord* snmp = set.snmp_record();
              if (snmp && snmp->snmp_report) {
                EngineId engine = parse_engine_id(*snmp->snmp_report);
                d["snmpv3_vendor"] = dict.vendor_from_engine_id(engine).name;
              } else {
                d["snmpv3_vendor"] = py::none();
              }
              out.append(d);
            }
            return out;
          },
          py::arg("seed") = 1,
          "Run the ten-probe plan against every router; returns per-target "
          "canonical keys and SNMPv3 labels.");

  m.def("demo_fleet_spec", &demo_fleet_spec_json,
        "The bundled demo fleet spec (ten distinct profiles plus a colliding pair).");
}
