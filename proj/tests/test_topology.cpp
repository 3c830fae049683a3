#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <utility>

#include "dcplan/errors.hpp"
#include "dcplan/topology.hpp"

using namespace dcplan;
using doctest::Approx;

namespace {

struct Graph {
  std::int64_t switches = 0;
  std::int64_t switch_links = 0;
  std::int64_t hosts = 0;
};

// Textbook k-ary fat tree: k pods of k/2 edge + k/2 aggregation switches,
// (k/2)^2 cores, k^3/4 hosts. Links are collected as an explicit edge set.
Graph enumerate_fat_tree(int k) {
  const int m = k / 2;
  std::set<std::pair<int, int>> links;
  int next = 0;
  std::vector<int> core(m * m);
  for (auto& c : core) c = next++;
  for (int pod = 0; pod < k; ++pod) {
    std::vector<int> edge(m), agg(m);
    for (auto& e : edge) e = next++;
    for (auto& a : agg) a = next++;
    for (int e = 0; e < m; ++e) {
      for (int a = 0; a < m; ++a) links.insert({edge[e], agg[a]});
    }
    for (int a = 0; a < m; ++a) {
      for (int c = 0; c < m; ++c) links.insert({agg[a], core[a * m + c]});
    }
  }
  return {next, static_cast<std::int64_t>(links.size()), static_cast<std::int64_t>(k) * k * k / 4};
}

// Leaf-spine with a partially filled last leaf: each leaf has one uplink per
// attached host, spread round-robin over just enough spines to terminate them.
Graph enumerate_leaf_spine(std::int64_t hosts, int k) {
  const int m = k / 2;
  const std::int64_t leaves = (hosts + m - 1) / m;
  const std::int64_t spines = (hosts + k - 1) / k;
  std::vector<int> spine_ports(static_cast<std::size_t>(spines), 0);
  std::int64_t wires = 0;
  for (std::int64_t l = 0; l < leaves; ++l) {
    const auto attached = std::min<std::int64_t>(m, hosts - l * m);
    for (std::int64_t u = 0; u < attached; ++u) {
      REQUIRE(++spine_ports[static_cast<std::size_t>(wires % spines)] <= k);
      ++wires;
    }
  }
  return {leaves + spines, wires, hosts};
}

SwitchChip toy_chip() { return {"toy", 16 * 400e9, {{16, 400e9}, {32, 200e9}, {64, 100e9}}}; }

void check_same_structure(const TopologyDesign& a, const TopologyDesign& b) {
  CHECK(a.hosts == b.hosts);
  CHECK(a.hosts_per_rail == b.hosts_per_rail);
  CHECK(a.rails == b.rails);
  CHECK(a.planes == b.planes);
  CHECK(a.tiers == b.tiers);
  CHECK(a.radix == b.radix);
  CHECK(a.chips == b.chips);
  CHECK(a.boxes == b.boxes);
  CHECK(a.host_cables == b.host_cables);
  CHECK(a.switch_cables == b.switch_cables);
  CHECK(a.bom.total == b.bom.total);
}

}  // namespace

TEST_CASE("chip port modes") {
  const auto chip = SwitchChip::asic_51t2();
  CHECK_NOTHROW(chip.validate());
  CHECK(chip.ports_at(800e9) == 64);
  CHECK(chip.ports_at(200e9) == 256);
  CHECK(chip.ports_at(100e9) == 512);
  CHECK(chip.ports_at(300e9) == 0);
  SwitchChip bad{"bad", 51.2e12, {{64, 700e9}}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("capacity and tier count") {
  CHECK(clos_capacity(1, 64) == 64);
  CHECK(clos_capacity(2, 64) == 2 * 32 * 32);
  CHECK(clos_capacity(4, 64) == 2.0 * 32 * 32 * 32 * 32);
  CHECK(tiers_needed(800000, 64) == 4);
  CHECK(tiers_needed(800000, 256) == 3);
  CHECK_THROWS_AS(tiers_needed(1'000'000'000, 8), InfeasibleError);
}

TEST_CASE("fat tree for 800K hosts at radix 64") {
  const auto d = fat_tree(800000, 64);
  CHECK(d.tiers == 4);
  CHECK(d.chips == 87500);
  CHECK(d.switch_cables == 2400000);
  CHECK(d.host_cables == 800000);
  CHECK(d.chips == (2 * d.tiers - 1) * d.hosts / d.radix);
  CHECK(d.bom.switch_link_transceivers == Approx(4.8e9));
  CHECK(d.bom.host_link_transceivers == Approx(1.6e9));
  CHECK(d.bom.within_budget == (d.bom.total <= PriceBook{}.budget_cap));
}

TEST_CASE("fat tree matches the k-ary enumeration") {
  for (int k : {4, 6, 8, 12, 16}) {
    const auto g = enumerate_fat_tree(k);
    const auto d = fat_tree(g.hosts, k);
    CHECK(d.tiers == 3);
    CHECK(d.chips == g.switches);
    CHECK(d.switch_cables == g.switch_links);
  }
  const auto d = fat_tree(16, 4);
  CHECK(d.tiers == 3);
  CHECK(d.chips == 20);
}

TEST_CASE("two-tier fabrics match the leaf-spine enumeration") {
  for (auto [hosts, k] : {std::pair<std::int64_t, int>{128, 16}, {32, 8}, {2048, 64}, {1000, 64}}) {
    const auto g = enumerate_leaf_spine(hosts, k);
    const auto d = fat_tree(hosts, k);
    CHECK(d.tiers == 2);
    CHECK(d.chips == g.switches);
    CHECK(d.switch_cables == g.switch_links);
  }
}

TEST_CASE("single switch") {
  const auto d = fat_tree(2, 4);
  CHECK(d.tiers == 1);
  CHECK(d.chips == 1);
  CHECK(d.switch_cables == 0);
}

TEST_CASE("multi-plane") {
  const auto chip = SwitchChip::asic_51t2();
  const auto base = fat_tree(800000, 64);
  const auto d = multi_plane(800000, chip, 4);
  CHECK(d.radix == 256);
  CHECK(d.tiers == 3);
  CHECK(d.boxes == 15625);
  CHECK(d.chips == 62500);
  CHECK(d.switch_cables == 1600000);
  CHECK(link_savings(d, base) == Approx(1.0 / 3.0));
  CHECK(chip_savings(d, base) == Approx(2.0 / 7.0));

  auto one = multi_plane(800000, chip, 1);
  CHECK(one.kind == TopologyKind::multi_plane);
  check_same_structure(one, base);

  CHECK(multi_plane(1024, toy_chip(), 4, 400e9).radix == 64);
  CHECK(multi_plane(1024, toy_chip(), 4, 400e9).tiers == 2);
  CHECK_THROWS_AS(multi_plane(1024, chip, 3), std::invalid_argument);
  CHECK_THROWS_AS(multi_plane(1024, chip, 8, 1.2e12), std::invalid_argument);
}

TEST_CASE("multi-rail") {
  const auto chip = SwitchChip::asic_51t2();
  const auto single = multi_rail(800000, 72, 72, chip, 1);
  CHECK(single.hosts_per_rail == 11112);
  CHECK(single.tiers == 3);
  const auto quad = multi_rail(800000, 72, 72, chip, 4);
  CHECK(quad.tiers == 2);
  CHECK(quad.kind == TopologyKind::multi_rail);
  check_same_structure(multi_rail(5000, 72, 1, chip, 4), multi_plane(5000, chip, 4));
  CHECK_THROWS_AS(multi_rail(800000, 72, 73, chip, 4), std::invalid_argument);
}

TEST_CASE("combined rails and planes") {
  const auto chip = SwitchChip::asic_51t2();
  const auto base = fat_tree(800000, 64);
  const auto d = combined_design(800000, 76, 4, chip);
  CHECK(d.kind == TopologyKind::combined);
  CHECK(d.hosts_per_rail == 10527);
  CHECK(d.tiers == 2);
  CHECK(d.chips == 38000);
  CHECK(d.switch_cables == 800052);
  CHECK(chip_savings(d, base) == Approx(0.5657).epsilon(0.001));
  CHECK(link_savings(d, base) == Approx(0.6667).epsilon(0.001));

  const auto toy = combined_design(128, 1, 1, SwitchChip{"t16", 16 * 100e9, {{16, 100e9}}}, 100e9);
  CHECK(toy.tiers == 2);
  CHECK(toy.chips == 24);
  CHECK(toy.switch_cables == 128);
  CHECK_THROWS_AS(combined_design(800000, 8, 1, chip), InfeasibleError);
}

TEST_CASE("capacity and port conservation over random designs") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::int64_t> hosts(1, 3'000'000);
  const int plane_opts[] = {1, 2, 4, 8};
  const auto chip = SwitchChip::asic_51t2();
  for (int i = 0; i < 400; ++i) {
    const auto h = hosts(rng);
    const int planes = plane_opts[i % 4];
    const int rails = 1 + static_cast<int>(rng() % 72);
    const auto d = multi_rail(h, 72, rails, chip, planes);
    CHECK(static_cast<double>(d.hosts_per_rail) <= clos_capacity(d.tiers, d.radix));
    if (d.tiers > 1) CHECK(static_cast<double>(d.hosts_per_rail) > clos_capacity(d.tiers - 1, d.radix));
    const auto ports = d.chips * d.radix;
    CHECK(ports >= 2 * d.switch_cables * planes + d.host_cables * planes);
    CHECK(d.chips == d.boxes * planes);
  }
}

TEST_CASE("bill of materials is linear in prices") {
  const auto d = fat_tree(100000, 64);
  const auto a = price(d, {1000.0, 20000.0, 1e12});
  const auto b = price(d, {2000.0, 40000.0, 1e12});
  CHECK(b.total == Approx(2.0 * a.total));
  CHECK(a.chips == 20000.0 * static_cast<double>(d.chips));
  CHECK(a.host_link_transceivers == 2000.0 * 100000);
  CHECK(!price(d, {1000.0, 0.0, 1.0}).within_budget);
}

TEST_CASE("oversubscription trims upper tiers") {
  TopologyOptions o;
  o.oversubscription = 3.0;
  const auto full = fat_tree(100000, 64);
  const auto thin = fat_tree(100000, 64, o);
  CHECK(thin.chips < full.chips);
  CHECK(thin.switch_cables < full.switch_cables);
  o.oversubscription = 0.5;
  CHECK_THROWS_AS(fat_tree(100000, 64, o), std::invalid_argument);
}

TEST_CASE("topology CSV") {
  const auto base = fat_tree(800000, 64);
  CHECK(topology_csv_header().rfind("design,hosts,", 0) == 0);
  CHECK(topology_csv_row(base, base).rfind("fat-tree,800000,1,1,4,64,87500,", 0) == 0);
}
