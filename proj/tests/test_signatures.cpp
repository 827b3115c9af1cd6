#include <doctest.h>

#include "lfp/signatures.hpp"
#include "lfp/util.hpp"

using namespace lfp;

namespace {

const std::string kJuniperRow = "False,r,r,r,False,False,False,False,255,64,64,84,40,56,0";
const std::string kCiscoRow = "False,r,r,r,False,False,False,False,255,255,64,84,40,56,0";

std::vector<LabeledVector> repeat(const std::string& key, const std::string& vendor, int n,
                                  const std::string& dataset = "ds0") {
  std::vector<LabeledVector> out;
  FeatureVector vec = FeatureVector::from_canonical(key);
  for (int i = 0; i < n; ++i) out.push_back({vec, vendor, dataset});
  return out;
}

void append(std::vector<LabeledVector>& into, std::vector<LabeledVector> more) {
  into.insert(into.end(), more.begin(), more.end());
}

}  // namespace

TEST_CASE("single-vendor key above threshold becomes unique") {
  auto labeled = repeat(kJuniperRow, "Juniper", 25);
  SignatureTable table = build_signature_table(labeled, {20, false});
  REQUIRE(table.records.size() == 1);
  const SignatureRecord& rec = table.records.begin()->second;
  CHECK(rec.cls == SigClass::Unique);
  CHECK(rec.vendor_counts.at("Juniper") == 25);
  CHECK(rec.unique_vendor() == "Juniper");
  CHECK(rec.protocols.is_full());
}

TEST_CASE("below the occurrence threshold a key is excluded from matching") {
  auto labeled = repeat(kJuniperRow, "Juniper", 19);
  SignatureTable table = build_signature_table(labeled, {20, false});
  REQUIRE(table.records.size() == 1);
  CHECK(table.records.begin()->second.cls == SigClass::BelowThreshold);
  CHECK_FALSE(table.records.begin()->second.matchable());
}

TEST_CASE("same key under different vendors in different datasets is non-unique") {
  auto labeled = repeat(kJuniperRow, "Cisco", 25, "ripe-a");
  append(labeled, repeat(kJuniperRow, "Huawei", 30, "itdk-b"));
  SignatureTable table = build_signature_table(labeled, {20, false});
  REQUIRE(table.records.size() == 1);
  const SignatureRecord& rec = table.records.begin()->second;
  CHECK(rec.cls == SigClass::NonUnique);
  CHECK(rec.vendor_counts.size() == 2);
  CHECK(rec.dataset_ids == std::set<std::string>{"ripe-a", "itdk-b"});
  CHECK_THROWS_AS(rec.unique_vendor(), Error);
}

TEST_CASE("duplicate labeled entries are counted, never deduplicated") {
  auto labeled = repeat(kJuniperRow, "Juniper", 3);
  SignatureTable table = build_signature_table(labeled, {1, false});
  CHECK(table.records.begin()->second.total() == 3);
}

TEST_CASE("empty input builds an empty table") {
  std::vector<LabeledVector> none;
  SignatureTable table = build_signature_table(none, {20, true});
  CHECK(table.records.empty());
}

TEST_CASE("partial derivation projects onto every covered subset") {
  auto labeled = repeat(kJuniperRow, "Juniper", 25);
  SignatureTable table = build_signature_table(labeled, {20, true});
  // Full key plus the six proper subsets.
  CHECK(table.records.size() == 7);
  FeatureVector full = FeatureVector::from_canonical(kJuniperRow);
  for (ProtocolSet subset :
       {ProtocolSet::of({Protocol::Tcp, Protocol::Udp}),
        ProtocolSet::of({Protocol::Icmp, Protocol::Udp}),
        ProtocolSet::of({Protocol::Icmp, Protocol::Tcp}), ProtocolSet::of({Protocol::Udp}),
        ProtocolSet::of({Protocol::Icmp}), ProtocolSet::of({Protocol::Tcp})}) {
    const SignatureRecord* rec = table.find(full.project(subset).canonical());
    REQUIRE(rec != nullptr);
    CHECK(rec->cls == SigClass::Unique);
    CHECK(rec->protocols == subset);
    CHECK(rec->total() == 25);
  }
}

TEST_CASE("projection can collapse distinct full keys into a non-unique partial") {
  // The two sample rows differ only in ICMP iTTL, so every subset without
  // ICMP collides while ICMP-bearing subsets stay distinct.
  auto labeled = repeat(kJuniperRow, "Juniper", 25);
  append(labeled, repeat(kCiscoRow, "Cisco", 25));
  SignatureTable table = build_signature_table(labeled, {20, true});

  FeatureVector full = FeatureVector::from_canonical(kJuniperRow);
  ProtocolSet tcp_udp = ProtocolSet::of({Protocol::Tcp, Protocol::Udp});
  const SignatureRecord* collided = table.find(full.project(tcp_udp).canonical());
  REQUIRE(collided != nullptr);
  CHECK(collided->cls == SigClass::NonUnique);
  CHECK(collided->total() == 50);

  ProtocolSet icmp_tcp = ProtocolSet::of({Protocol::Icmp, Protocol::Tcp});
  const SignatureRecord* kept = table.find(full.project(icmp_tcp).canonical());
  REQUIRE(kept != nullptr);
  CHECK(kept->cls == SigClass::Unique);
}

TEST_CASE("natively partial vectors group at their own subset") {
  FeatureVector partial = FeatureVector::from_canonical(kJuniperRow)
                              .project(ProtocolSet::of({Protocol::Icmp, Protocol::Tcp}));
  std::vector<LabeledVector> labeled;
  for (int i = 0; i < 30; ++i) labeled.push_back({partial, "Juniper", "ds0"});
  SignatureTable table = build_signature_table(labeled, {20, true});
  const SignatureRecord* rec = table.find(partial.canonical());
  REQUIRE(rec != nullptr);
  CHECK(rec->total() == 30);
  // And it projects further down to the singletons it covers.
  CHECK(table.find(partial.project(ProtocolSet::of({Protocol::Icmp})).canonical()) != nullptr);
  CHECK(table.find(partial.project(ProtocolSet::of({Protocol::Tcp})).canonical()) != nullptr);
  CHECK(table.records.size() == 3);
}

TEST_CASE("threshold sweep counts are monotone non-increasing") {
  auto labeled = repeat(kJuniperRow, "Juniper", 25);
  append(labeled, repeat(kCiscoRow, "Cisco", 12));
  append(labeled, repeat("True,echo,i,i,False,False,False,True,255,255,255,84,40,56,0",
                         "Huawei", 5));
  append(labeled, repeat(kCiscoRow, "Huawei", 4));  // contested key

  std::vector<int> thresholds = {1, 10, 20};
  auto counts = sweep_threshold(labeled, thresholds, true);
  REQUIRE(counts.size() == 3);
  for (std::size_t i = 1; i < counts.size(); ++i) {
    CHECK(counts[i].unique <= counts[i - 1].unique);
    CHECK(counts[i].non_unique <= counts[i - 1].non_unique);
  }
  CHECK(counts[0].unique > counts[2].unique);  // threshold 1 keeps the rare keys

  SUBCASE("single-vendor corpus never yields non-unique records") {
    auto solo = repeat(kJuniperRow, "Juniper", 25);
    append(solo, repeat(kCiscoRow, "Juniper", 3));
    auto solo_counts = sweep_threshold(solo, thresholds, true);
    for (const auto& c : solo_counts) CHECK(c.non_unique == 0);
  }

  SUBCASE("unsorted thresholds are rejected") {
    std::vector<int> bad = {10, 1};
    CHECK_THROWS_AS(sweep_threshold(labeled, bad, true), ValidationError);
  }

  SUBCASE("csv layout") {
    std::string csv = sweep_to_csv(counts);
    CHECK(csv.rfind("threshold,unique,non_unique\n", 0) == 0);
    CHECK(csv.find("\n1,") != std::string::npos);
  }
}

TEST_CASE("table store/load round-trip") {
  auto labeled = repeat(kJuniperRow, "Juniper", 25, "ds-a");
  append(labeled, repeat(kCiscoRow, "Cisco", 25, "ds-b"));
  append(labeled, repeat(kCiscoRow, "Huawei", 2, "ds-b"));
  SignatureTable table = build_signature_table(labeled, {20, true});
  table.meta.tool_version = "test";

  std::string stored = store_table(table);
  SignatureTable loaded = load_table(stored);
  CHECK(loaded == table);
  CHECK(store_table(loaded) == stored);

  SUBCASE("file contains the canonical keys verbatim") {
    CHECK(stored.find(kJuniperRow) != std::string::npos);
    CHECK(stored.find(kCiscoRow) != std::string::npos);
  }

  SUBCASE("truncation is rejected without a partial table") {
    for (std::size_t cut : {stored.size() / 4, stored.size() / 2, stored.size() - 3})
      CHECK_THROWS_AS(load_table(stored.substr(0, cut)), ParseError);
  }

  SUBCASE("bit flips fail the checksum") {
    std::string corrupt = stored;
    auto pos = corrupt.find("\"Juniper\": 25");
    REQUIRE(pos != std::string::npos);
    corrupt.replace(pos, 13, "\"Juniper\": 26");
    CHECK_THROWS_AS(load_table(corrupt), ParseError);
  }

  SUBCASE("version mismatches are rejected") {
    std::string wrong = stored;
    auto pos = wrong.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    wrong.replace(pos, 19, "\"format_version\": 9");
    CHECK_THROWS_AS(load_table(wrong), ParseError);
  }
}

TEST_CASE("uniqueness classing is a pure function of the counts") {
  SignatureRecord rec;
  rec.key = kJuniperRow;
  rec.vendor_counts = {{"Juniper", 25}};
  // Rebuilding from equivalent inputs gives the same class regardless of
  // insertion order.
  auto a = repeat(kJuniperRow, "Juniper", 10, "x");
  append(a, repeat(kJuniperRow, "Juniper", 15, "y"));
  auto b = repeat(kJuniperRow, "Juniper", 15, "y");
  append(b, repeat(kJuniperRow, "Juniper", 10, "x"));
  CHECK(build_signature_table(a, {20, false}) == build_signature_table(b, {20, false}));
}
