#include "dcplan/topology.hpp"

#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "dcplan/errors.hpp"

namespace dcplan {

std::string_view to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::fat_tree: return "fat-tree";
    case TopologyKind::multi_plane: return "multi-plane";
    case TopologyKind::multi_rail: return "multi-rail";
    case TopologyKind::combined: return "combined";
  }
  return "?";
}

SwitchChip SwitchChip::asic_51t2() {
  return {"51.2T", 51.2e12, {{64, 800e9}, {128, 400e9}, {256, 200e9}, {512, 100e9}}};
}

void SwitchChip::validate() const {
  if (!(bisection_bps > 0.0)) throw std::invalid_argument("chip bandwidth must be > 0");
  if (port_configs.empty()) throw std::invalid_argument("chip needs at least one port configuration");
  for (const auto& pc : port_configs) {
    if (pc.port_count < 1 || std::abs(pc.port_count * pc.port_speed_bps - bisection_bps) > 1e-9 * bisection_bps) {
      throw std::invalid_argument(fmt::format("port configuration {}x{:g} does not match chip bandwidth {:g}",
                                              pc.port_count, pc.port_speed_bps, bisection_bps));
    }
  }
}

int SwitchChip::ports_at(double speed_bps) const {
  for (const auto& pc : port_configs) {
    if (std::abs(pc.port_speed_bps - speed_bps) <= 1e-9 * speed_bps) return pc.port_count;
  }
  return 0;
}

namespace {

// Leaf ports facing hosts under down:up = oversubscription.
int leaf_down_ports(int radix, double oversubscription) {
  const int down = static_cast<int>(std::floor(radix * oversubscription / (1.0 + oversubscription)));
  if (down < 1 || down >= radix) throw std::invalid_argument("oversubscription leaves no host or uplink ports");
  return down;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

void check_fabric_args(std::int64_t hosts, int radix, const TopologyOptions& options) {
  if (hosts < 1) throw std::invalid_argument("hosts must be >= 1");
  if (radix < 2 || radix % 2 != 0) throw std::invalid_argument("radix must be even and >= 2");
  if (!(options.oversubscription >= 1.0)) throw std::invalid_argument("oversubscription must be >= 1");
}

}  // namespace

double clos_capacity(int tiers, int radix, double oversubscription) {
  if (tiers < 1) return 0.0;
  if (tiers == 1) return radix;
  const double down = leaf_down_ports(radix, oversubscription);
  return down * radix * std::pow(radix / 2.0, tiers - 2);
}

int tiers_needed(std::int64_t hosts, int radix, double oversubscription, int max_tiers) {
  for (int n = 1; n <= max_tiers; ++n) {
    if (clos_capacity(n, radix, oversubscription) >= static_cast<double>(hosts)) return n;
  }
  throw InfeasibleError(fmt::format("{} hosts exceed a {}-tier fabric of radix {} ({:.0f} hosts max)", hosts,
                                    max_tiers, radix, clos_capacity(max_tiers, radix, oversubscription)));
}

BillOfMaterials price(const TopologyDesign& d, const PriceBook& prices) {
  BillOfMaterials b;
  b.switch_link_transceivers = static_cast<double>(d.switch_cables) * 2.0 * prices.transceiver_cost;
  b.host_link_transceivers = static_cast<double>(d.host_cables) * 2.0 * prices.transceiver_cost;
  b.chips = static_cast<double>(d.chips) * prices.chip_cost;
  b.total = b.switch_link_transceivers + b.host_link_transceivers + b.chips;
  b.within_budget = b.total <= prices.budget_cap;
  return b;
}

TopologyDesign fat_tree(std::int64_t hosts, int radix, const TopologyOptions& options) {
  check_fabric_args(hosts, radix, options);
  TopologyDesign d;
  d.kind = TopologyKind::fat_tree;
  d.hosts = hosts;
  d.hosts_per_rail = hosts;
  d.radix = radix;
  d.oversubscription = options.oversubscription;
  d.tiers = tiers_needed(hosts, radix, options.oversubscription, options.max_tiers);
  d.host_cables = hosts;

  if (d.tiers == 1) {
    d.chips = 1;
    d.switch_cables = 0;
  } else {
    const int down = leaf_down_ports(radix, options.oversubscription);
    const int up = radix - down;
    const std::int64_t leaves = ceil_div(hosts, down);
    // Wires leaving the leaf tier; every tier above carries the same count.
    const std::int64_t uplinks = ceil_div(hosts * up, down);
    const std::int64_t middle_tier = ceil_div(2 * uplinks, radix);
    const std::int64_t top_tier = ceil_div(uplinks, radix);
    d.chips = leaves + (d.tiers - 2) * middle_tier + top_tier;
    d.switch_cables = (d.tiers - 1) * uplinks;
  }
  d.boxes = d.chips;
  d.bom = price(d, options.prices);
  return d;
}

TopologyDesign multi_plane(std::int64_t hosts, const SwitchChip& chip, int planes, double host_link_bps,
                           const TopologyOptions& options) {
  chip.validate();
  if (planes != 1 && planes != 2 && planes != 4 && planes != 8) {
    throw std::invalid_argument(fmt::format("plane count {} not in {{1, 2, 4, 8}}", planes));
  }
  const int radix = chip.ports_at(host_link_bps / planes);
  if (radix == 0) {
    throw std::invalid_argument(
        fmt::format("chip {} has no {:g} bps port mode for {} planes", chip.name, host_link_bps / planes, planes));
  }
  TopologyDesign d = fat_tree(hosts, radix, options);
  d.kind = TopologyKind::multi_plane;
  d.planes = planes;
  d.boxes = d.chips;          // one ASIC per plane in every box
  d.chips = d.boxes * planes;
  d.bom = price(d, options.prices);
  return d;
}

namespace {

TopologyDesign build_rails(std::int64_t hosts, int rails, const SwitchChip& chip, int planes, double host_link_bps,
                           const TopologyOptions& options) {
  if (rails < 1) throw std::invalid_argument("rails must be >= 1");
  if (hosts < 1) throw std::invalid_argument("hosts must be >= 1");
  const std::int64_t per_rail = ceil_div(hosts, rails);
  const TopologyDesign rail = multi_plane(per_rail, chip, planes, host_link_bps, options);

  TopologyDesign d = rail;
  d.kind = rails == 1 ? TopologyKind::multi_plane : TopologyKind::multi_rail;
  d.hosts = hosts;
  d.hosts_per_rail = per_rail;
  d.rails = rails;
  d.chips = rail.chips * rails;
  d.boxes = rail.boxes * rails;
  d.host_cables = rail.host_cables * rails;
  d.switch_cables = rail.switch_cables * rails;
  d.bom = price(d, options.prices);
  return d;
}

}  // namespace

TopologyDesign multi_rail(std::int64_t hosts, int gpus_per_rack, int rails, const SwitchChip& chip, int planes,
                          double host_link_bps, const TopologyOptions& options) {
  if (rails > gpus_per_rack) {
    throw std::invalid_argument(fmt::format("{} rails exceed {} GPUs per rack", rails, gpus_per_rack));
  }
  return build_rails(hosts, rails, chip, planes, host_link_bps, options);
}

TopologyDesign combined_design(std::int64_t hosts, int rails, int planes, const SwitchChip& chip, double host_link_bps,
                               const TopologyOptions& options) {
  TopologyDesign d = build_rails(hosts, rails, chip, planes, host_link_bps, options);
  if (d.tiers > 2) {
    throw InfeasibleError(fmt::format(
        "{} hosts per rail need {} tiers at radix {} (leaf-spine holds {:.0f}); add a tier, rails or planes",
        d.hosts_per_rail, d.tiers, d.radix, clos_capacity(2, d.radix, options.oversubscription)));
  }
  d.kind = TopologyKind::combined;
  return d;
}

double chip_savings(const TopologyDesign& design, const TopologyDesign& baseline) {
  return 1.0 - static_cast<double>(design.chips) / static_cast<double>(baseline.chips);
}

double link_savings(const TopologyDesign& design, const TopologyDesign& baseline) {
  return 1.0 - static_cast<double>(design.switch_cables) / static_cast<double>(baseline.switch_cables);
}

std::string topology_csv_header() {
  return "design,hosts,rails,planes,tiers,radix,chips,boxes,host_cables,switch_cables,cost_usd,"
         "switch_link_transceivers_usd,chip_savings,link_savings";
}

std::string topology_csv_row(const TopologyDesign& d, const TopologyDesign& baseline) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}", to_string(d.kind), d.hosts, d.rails,
                     d.planes, d.tiers, d.radix, d.chips, d.boxes, d.host_cables, d.switch_cables, d.bom.total,
                     d.bom.switch_link_transceivers, chip_savings(d, baseline),
                     baseline.switch_cables > 0 ? link_savings(d, baseline) : 0.0);
}

}  // namespace dcplan
