#include <doctest.h>

#include <set>

#include "lfp/features.hpp"
#include "lfp/sim.hpp"
#include "test_helpers.hpp"

using namespace lfp;

namespace {

IpidClass classify(std::initializer_list<int> vals, int threshold = 1300) {
  std::vector<std::uint16_t> v;
  for (int x : vals) v.push_back(static_cast<std::uint16_t>(x));
  IpidConfig cfg;
  cfg.step_threshold = threshold;
  return classify_ipid_sequence(v, cfg);
}

}  // namespace

TEST_CASE("ipid classification definitional cases") {
  CHECK(classify({100, 101, 103}) == IpidClass::Incremental);
  CHECK(classify({65530, 2, 8}) == IpidClass::Incremental);  // wraps through 0
  CHECK(classify({5, 40000, 12000}) == IpidClass::Random);
  CHECK(classify({7, 7, 7}) == IpidClass::Static);
  CHECK(classify({0, 0, 0}) == IpidClass::Zero);
  CHECK(classify({5, 9, 5}) == IpidClass::Duplicate);
  CHECK(classify({0, 0, 5}) == IpidClass::Duplicate);  // two zeros are still a dup
  CHECK(classify({1, 1301, 2601}) == IpidClass::Incremental);  // boundary inclusive
  CHECK(classify({1, 1302, 2603}) == IpidClass::Random);
  CHECK_THROWS_AS(classify({1, 2}), ValidationError);
}

TEST_CASE("ipid classification is shift invariant") {
  Rng rng(2024);
  IpidConfig cfg;
  for (int trial = 0; trial < 2000; ++trial) {
    std::uint16_t a = static_cast<std::uint16_t>(rng.next_below(65536));
    std::uint16_t b = static_cast<std::uint16_t>(rng.next_below(65536));
    std::uint16_t c = static_cast<std::uint16_t>(rng.next_below(65536));
    std::uint16_t shift = static_cast<std::uint16_t>(rng.next_below(65536));
    std::uint16_t orig[3] = {a, b, c};
    std::uint16_t shifted[3] = {static_cast<std::uint16_t>(a + shift),
                                static_cast<std::uint16_t>(b + shift),
                                static_cast<std::uint16_t>(c + shift)};
    CHECK(classify_ipid_sequence(orig, cfg) == classify_ipid_sequence(shifted, cfg));
  }
}

TEST_CASE("random-counter misclassification rate matches the derived bound") {
  // Monte Carlo against the closed form; the acceptance suite runs the
  // full-size version.
  IpidConfig cfg;
  Rng rng(99);
  const int n = 200000;
  int incremental = 0;
  for (int i = 0; i < n; ++i) {
    std::uint16_t t[3] = {static_cast<std::uint16_t>(rng.next_below(65536)),
                          static_cast<std::uint16_t>(rng.next_below(65536)),
                          static_cast<std::uint16_t>(rng.next_below(65536))};
    if (classify_ipid_sequence(t, cfg) == IpidClass::Incremental) ++incremental;
  }
  double observed = static_cast<double>(incremental) / n;
  double expected = cfg.misclassification_probability();
  CHECK(observed > 0.25 * expected);
  CHECK(observed < 4.0 * expected);
}

TEST_CASE("ittl inference rounds up to the smallest class") {
  CHECK(infer_ittl(61) == 64);
  CHECK(infer_ittl(247) == 255);
  CHECK(infer_ittl(128) == 128);
  CHECK(infer_ittl(1) == 32);
  CHECK(infer_ittl(32) == 32);
  CHECK(infer_ittl(33) == 64);
  CHECK(infer_ittl(129) == 255);
  CHECK(infer_ittl(255) == 255);
  CHECK_THROWS_AS(infer_ittl(0), ValidationError);
  CHECK_THROWS_AS(infer_ittl(256), ValidationError);
}

TEST_CASE("shared counter detection on merged sequences") {
  IpidConfig cfg;

  SUBCASE("one counter across all protocols") {
    // 1000,1001,...,1008 interleaved across icmp/tcp/udp.
    ResponseSet set = test::synthetic_response_set([](int seq) { return 1000 + seq; });
    CHECK(detect_shared_counter(set, ProtocolSet::full(), cfg));
    CHECK(detect_shared_counter(set, ProtocolSet::of({Protocol::Tcp, Protocol::Icmp}), cfg));
  }

  SUBCASE("distant per-protocol counters are not shared") {
    // Independent oracle: compute the merged icmp/tcp sequence by hand and
    // confirm one step exceeds the threshold, then expect false.
    std::map<Protocol, int> next{{Protocol::Icmp, 1000}, {Protocol::Tcp, 40000},
                                 {Protocol::Udp, 20000}};
    ResponseSet set = test::synthetic_response_set_per_protocol(
        [&](Protocol p, int) { return next[p]++; });
    std::vector<int> merged;
    for (const auto& rec : set.records)
      if (rec.probe.protocol != Protocol::Snmpv3) {
        if (rec.probe.protocol != Protocol::Udp) merged.push_back(*rec.reply_ipid);
      }
    bool oracle_within = true;
    for (std::size_t i = 1; i < merged.size(); ++i) {
      int step = (merged[i] - merged[i - 1] + 65536) % 65536;
      if (step > cfg.step_threshold) oracle_within = false;
    }
    REQUIRE_FALSE(oracle_within);
    CHECK_FALSE(detect_shared_counter(set, ProtocolSet::of({Protocol::Tcp, Protocol::Icmp}), cfg));
    // Each protocol on its own is still incremental.
    FeatureVector v = extract_features(set, cfg);
    CHECK(v.icmp_ipid == IpidClass::Incremental);
    CHECK(v.tcp_ipid == IpidClass::Incremental);
  }

  SUBCASE("random counter disables every flag involving it") {
    std::map<Protocol, int> next{{Protocol::Icmp, 1000}, {Protocol::Tcp, 0},
                                 {Protocol::Udp, 2000}};
    Rng rng(7);
    ResponseSet set = test::synthetic_response_set_per_protocol([&](Protocol p, int) {
      if (p == Protocol::Tcp) return 40000 + static_cast<int>(rng.next_below(20000)) * 2;
      return next[p]++;
    });
    FeatureVector v = extract_features(set, cfg);
    REQUIRE(v.tcp_ipid == IpidClass::Random);
    CHECK(*v.shared_all == false);
    CHECK(*v.shared_tcp_icmp == false);
    CHECK(*v.shared_tcp_udp == false);
  }
}

TEST_CASE("published sample rows come out of the simulator verbatim") {
  // The two vendor rows whose only difference is the ICMP iTTL.
  FeatureVector juniper = test::scan_one_profile(juniper_sample_profile());
  CHECK(juniper.canonical() == "False,r,r,r,False,False,False,False,255,64,64,84,40,56,0");

  FeatureVector cisco = test::scan_one_profile(cisco_sample_profile());
  CHECK(cisco.canonical() == "False,r,r,r,False,False,False,False,255,255,64,84,40,56,0");
}

TEST_CASE("echoed ipid forces the echo class") {
  StackProfile p = juniper_sample_profile();
  p.icmp_echo_ipid = true;
  FeatureVector v = test::scan_one_profile(p);
  CHECK(*v.icmp_ipid_echo == true);
  CHECK(*v.icmp_ipid == IpidClass::Echo);
  CHECK(*v.shared_all == false);
  CHECK(*v.shared_tcp_icmp == false);
}

TEST_CASE("partial responsiveness leaves only the protocol's own fields") {
  StackProfile p = juniper_sample_profile();
  p.respond_tcp = false;
  p.respond_udp = false;
  FeatureVector v = test::scan_one_profile(p);
  CHECK(v.icmp_ipid_echo.has_value());
  CHECK(v.icmp_ipid.has_value());
  CHECK(v.icmp_ittl.has_value());
  CHECK(v.icmp_resp_size.has_value());
  CHECK_FALSE(v.tcp_ipid.has_value());
  CHECK_FALSE(v.udp_ipid.has_value());
  CHECK_FALSE(v.shared_all.has_value());
  CHECK_FALSE(v.shared_tcp_icmp.has_value());
  CHECK_FALSE(v.shared_udp_icmp.has_value());
  CHECK_FALSE(v.shared_tcp_udp.has_value());
  CHECK_FALSE(v.tcp_syn_seq.has_value());
  CHECK(v.canonical() == "False,r,-,-,-,-,-,-,-,64,-,84,-,-,-");
}

TEST_CASE("canonical form round-trips") {
  std::vector<std::string> keys = {
      "False,r,r,r,False,False,False,False,255,64,64,84,40,56,0",
      "True,echo,i,i,False,False,False,True,255,255,255,84,40,56,0",
      "False,r,-,-,-,-,-,-,-,64,-,84,-,-,-",
      "-,-,i,r,-,-,-,True,255,-,64,-,40,68,1",
      "-,-,-,-,-,-,-,-,-,-,-,-,-,-,-",
  };
  for (const auto& key : keys) {
    FeatureVector v = FeatureVector::from_canonical(key);
    CHECK(v.canonical() == key);
    CHECK(FeatureVector::from_canonical(v.canonical()) == v);
  }
}

TEST_CASE("canonical parser rejects malformed keys") {
  CHECK_THROWS_AS(FeatureVector::from_canonical("True,r,r"), ParseError);
  CHECK_THROWS_AS(
      FeatureVector::from_canonical("Yes,r,r,r,False,False,False,False,255,64,64,84,40,56,0"),
      ParseError);
  // icmp fields present but the icmp counter missing: inconsistent subset.
  CHECK_THROWS_AS(
      FeatureVector::from_canonical("True,-,r,r,False,False,False,False,255,64,64,84,40,56,0"),
      ParseError);
  // tcp responsive but tcp_syn_seq absent.
  CHECK_THROWS_AS(
      FeatureVector::from_canonical("False,r,r,r,False,False,False,False,255,64,64,84,40,56,-"),
      ParseError);
}

TEST_CASE("projection keeps exactly the covered fields") {
  FeatureVector full = FeatureVector::from_canonical(
      "False,r,i,r,False,False,False,False,255,64,64,84,40,56,0");
  FeatureVector it = full.project(ProtocolSet::of({Protocol::Icmp, Protocol::Tcp}));
  CHECK(it.canonical() == "False,r,i,-,-,False,-,-,-,64,64,84,40,-,0");
  FeatureVector icmp_only = full.project(ProtocolSet::of({Protocol::Icmp}));
  CHECK(icmp_only.canonical() == "False,r,-,-,-,-,-,-,-,64,-,84,-,-,-");
  // Projecting a projection is the same as projecting once.
  CHECK(it.project(ProtocolSet::of({Protocol::Icmp}))== icmp_only);
}

TEST_CASE("shared_all implies the pairwise flags on simulator fleets") {
  StackProfile shared = default_demo_profiles()[4];  // all-protocols shared counter
  REQUIRE(shared.name == "juniper-shared");
  FeatureVector v = test::scan_one_profile(shared);
  REQUIRE(*v.shared_all == true);
  CHECK(*v.shared_tcp_icmp == true);
  CHECK(*v.shared_udp_icmp == true);
  CHECK(*v.shared_tcp_udp == true);
}
