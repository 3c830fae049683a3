#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dcplan/errors.hpp"
#include "dcplan/flowsim.hpp"
#include "dcplan/philox.hpp"

using namespace dcplan;
using doctest::Approx;

namespace {

FlowSimOptions opts(int trials, std::uint64_t seed = 1, int threads = 1) {
  FlowSimOptions o;
  o.trials = trials;
  o.seed = seed;
  o.threads = threads;
  return o;
}

}  // namespace

TEST_CASE("philox known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox streams are independent and reproducible") {
  Philox4x32 a(7, 0), b(7, 0), c(7, 1);
  bool differs = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs |= x != c();
  }
  CHECK(differs);
  Philox4x32 r(3, 3);
  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
}

TEST_CASE("fabric construction") {
  const auto f = build_fabric(8192, 2, 128, 800e9);
  CHECK(f.hosts_per_leaf == 64);
  CHECK(f.leaves == 128);
  CHECK(f.spines == 64);
  CHECK(f.link_count() == 2 * 8192 + 2 * 128 * 64);
  CHECK(f.path_count(0, 1) == 1);
  CHECK(f.path_count(0, 64) == 64);

  const auto one = build_fabric(4, 1, 4, 100e9);
  CHECK(one.leaves == 1);
  CHECK(one.link_count() == 8);
  CHECK(one.path_count(0, 3) == 1);

  const auto small = build_fabric(16, 2, 8, 100e9);
  CHECK(small.leaves == 4);
  CHECK(small.spines == 4);

  const auto three = build_fabric(16, 3, 4, 100e9);
  CHECK(three.pods == 4);
  CHECK(three.cores == 4);
  CHECK(three.path_count(0, 1) == 1);
  CHECK(three.path_count(0, 2) == 2);
  CHECK(three.path_count(0, 15) == 4);

  CHECK_THROWS_AS(build_fabric(8193, 2, 128, 800e9), InfeasibleError);
  CHECK_THROWS_AS(build_fabric(5, 1, 4, 800e9), InfeasibleError);
  CHECK_THROWS_AS(build_fabric(17, 3, 4, 800e9), InfeasibleError);
  CHECK_THROWS_AS(build_fabric(16, 4, 4, 800e9), std::invalid_argument);
  CHECK_THROWS_AS(build_fabric(16, 2, 7, 800e9), std::invalid_argument);
}

TEST_CASE("policy names") {
  CHECK(routing_policy_from_string("single-path") == RoutingPolicy::single_path);
  CHECK(routing_policy_from_string("ecmp") == RoutingPolicy::single_path);
  CHECK(routing_policy_from_string("spray") == RoutingPolicy::spray);
  CHECK_THROWS_AS(routing_policy_from_string("valiant"), ConfigError);
  CHECK(to_string(RoutingPolicy::spray) == "spray");
}

TEST_CASE("pattern validation") {
  CHECK_THROWS_AS((TrafficPattern{0.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TrafficPattern{1e6, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TrafficPattern{1e6, 1.5}.validate()), std::invalid_argument);
  CHECK_NOTHROW((TrafficPattern{1e6, 1.0}.validate()));
}

TEST_CASE("nearest-rank quantile") {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(sorted_quantile(v, 0.5) == 5);
  CHECK(sorted_quantile(v, 0.99) == 10);
  CHECK(sorted_quantile(v, 0.1) == 1);
  CHECK(sorted_quantile(v, 1.0) == 10);
}

TEST_CASE("single switch never inflates") {
  const auto f = build_fabric(4, 1, 4, 100e9);
  for (auto policy : {RoutingPolicy::single_path, RoutingPolicy::spray}) {
    const auto r = simulate_permutation(f, {1e6, 1.0}, policy, opts(20));
    CHECK(r.stats.flows == 80);
    for (double x : r.inflations()) CHECK(x == Approx(1.0));
  }
}

TEST_CASE("two-leaf fabric: collisions halve the rate") {
  // 2 leaves x 2 hosts, 2 spines. Two cross-leaf flows from the same leaf that
  // hash onto the same spine share both links at half rate; nothing else can
  // contend, so every inflation is exactly 1 or 2.
  const auto f = build_fabric(4, 2, 4, 100e9);
  const auto r = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::single_path, opts(200));
  std::set<long> seen;
  for (double x : r.inflations()) {
    const bool one = x == Approx(1.0);
    const bool two = x == Approx(2.0);
    CHECK((one || two));
    seen.insert(std::lround(x));
  }
  CHECK(seen == std::set<long>{1, 2});

  const auto s = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::spray, opts(200));
  for (double x : s.inflations()) CHECK(x == Approx(1.0));
}

TEST_CASE("completion times bound below by the line-rate time") {
  const auto f = build_fabric(1024, 2, 64, 400e9);
  for (auto policy : {RoutingPolicy::single_path, RoutingPolicy::spray}) {
    const auto r = simulate_permutation(f, {10e6, 1.0}, policy, opts(4));
    CHECK(r.stats.optimal_fct == Approx(10e6 * 8 / 400e9));
    for (const auto& fl : r.flows) {
      CHECK(fl.fct >= r.stats.optimal_fct * (1 - 1e-9));
      CHECK(fl.src != fl.dst);
    }
    CHECK(r.stats.p50 <= r.stats.p99);
    CHECK(r.stats.p99 <= r.stats.max);
  }
}

TEST_CASE("each trial is a derangement over the participants") {
  const auto f = build_fabric(1024, 2, 64, 400e9);
  const auto r = simulate_permutation(f, {1e6, 0.25}, RoutingPolicy::spray, opts(3));
  CHECK(r.stats.flows == 3 * 256);
  for (int t = 0; t < 3; ++t) {
    std::set<std::int64_t> src, dst;
    for (const auto& fl : r.flows) {
      if (fl.trial != t) continue;
      src.insert(fl.src);
      dst.insert(fl.dst);
    }
    CHECK(src.size() == 256);
    CHECK(src == dst);
  }
}

TEST_CASE("spray dominates single-path") {
  const auto f = build_fabric(1024, 2, 64, 400e9);
  const auto single = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::single_path, opts(5));
  const auto spray = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::spray, opts(5));
  CHECK(spray.stats.mean <= single.stats.mean);
  CHECK(spray.stats.p50 <= single.stats.p50);
  CHECK(spray.stats.p99 <= single.stats.p99);
  CHECK(spray.stats.max <= single.stats.max);
  CHECK(spray.stats.p99_inflation() == Approx(1.0).epsilon(1e-6));
  CHECK(single.stats.p99_inflation() > 2.0);
}

TEST_CASE("three-tier spray is contention-free") {
  const auto f = build_fabric(128, 3, 8, 100e9);
  const auto r = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::spray, opts(5));
  CHECK(r.stats.max_inflation() == Approx(1.0).epsilon(1e-6));
  const auto s = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::single_path, opts(5));
  CHECK(s.stats.max_inflation() >= r.stats.max_inflation());
}

TEST_CASE("deterministic across runs and thread counts") {
  const auto f = build_fabric(1024, 2, 64, 400e9);
  const auto a = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::single_path, opts(6, 42, 1));
  const auto b = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::single_path, opts(6, 42, 4));
  const auto c = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::single_path, opts(6, 42, 1));
  REQUIRE(a.flows.size() == b.flows.size());
  std::string ca, cb, cc;
  append_flowsim_csv(ca, a);
  append_flowsim_csv(cb, b);
  append_flowsim_csv(cc, c);
  CHECK(ca == cb);
  CHECK(ca == cc);
  const auto d = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::single_path, opts(6, 43, 1));
  std::string cd;
  append_flowsim_csv(cd, d);
  CHECK(ca != cd);
}

TEST_CASE("inflation is invariant under joint size and speed scaling") {
  const auto slow = build_fabric(1024, 2, 64, 100e9);
  const auto fast = build_fabric(1024, 2, 64, 800e9);
  const auto a = simulate_permutation(slow, {1e6, 1.0}, RoutingPolicy::single_path, opts(3, 9));
  const auto b = simulate_permutation(fast, {8e6, 1.0}, RoutingPolicy::single_path, opts(3, 9));
  const auto ia = a.inflations();
  const auto ib = b.inflations();
  REQUIRE(ia.size() == ib.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ia.size(); ++i) worst = std::max(worst, std::abs(ia[i] - ib[i]));
  CHECK(worst < 1e-9);
}

TEST_CASE("sparse participation approaches line rate") {
  const auto f = build_fabric(1024, 2, 64, 400e9);
  const auto dense = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::single_path, opts(5));
  const auto sparse = simulate_permutation(f, {1e6, 0.02}, RoutingPolicy::single_path, opts(5));
  CHECK(sparse.stats.mean_inflation() < dense.stats.mean_inflation());
  CHECK(sparse.stats.p50_inflation() == Approx(1.0));
  CHECK(sparse.stats.flows == 5 * 20);
}

TEST_CASE("flow CSV layout") {
  CHECK(flowsim_csv_header() == "policy,participation,trial,flow_id,fct_s,inflation");
  const auto f = build_fabric(4, 1, 4, 100e9);
  const auto r = simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::spray, opts(1));
  std::string out;
  append_flowsim_csv(out, r);
  CHECK(std::count(out.begin(), out.end(), '\n') == 4);
  CHECK(out.rfind("spray,1,0,0,", 0) == 0);
}

TEST_CASE("invalid options") {
  const auto f = build_fabric(4, 1, 4, 100e9);
  CHECK_THROWS_AS(simulate_permutation(f, {1e6, 1.0}, RoutingPolicy::spray, opts(0)), std::invalid_argument);
}
