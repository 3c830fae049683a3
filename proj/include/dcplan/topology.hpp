#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dcplan {

struct PortConfig {
  int port_count = 0;
  double port_speed_bps = 0.0;
};

struct SwitchChip {
  std::string name;
  double bisection_bps = 0.0;
  std::vector<PortConfig> port_configs;

  /// 51.2 Tbps ASIC: 64x800G, 128x400G, 256x200G or 512x100G.
  static SwitchChip asic_51t2();

  void validate() const;
  /// Port count when configured at `speed_bps`; 0 when unsupported.
  int ports_at(double speed_bps) const;
};

struct PriceBook {
  double transceiver_cost = 1000.0;  // USD per cable end
  double chip_cost = 0.0;            // USD per switching ASIC
  double budget_cap = 5e9;           // USD available for the scale-out network
};

struct TopologyOptions {
  double oversubscription = 1.0;  // leaf down:up bandwidth ratio
  int max_tiers = 6;
  PriceBook prices;
};

struct BillOfMaterials {
  double switch_link_transceivers = 0.0;
  double host_link_transceivers = 0.0;
  double chips = 0.0;
  double total = 0.0;
  bool within_budget = true;
};

enum class TopologyKind { fat_tree, multi_plane, multi_rail, combined };
std::string_view to_string(TopologyKind k);

/// Cables are physical wires; plane links multiplexed on one wire count once.
/// `radix` is the effective per-plane switch radix.
struct TopologyDesign {
  TopologyKind kind = TopologyKind::fat_tree;
  std::int64_t hosts = 0;
  std::int64_t hosts_per_rail = 0;
  int rails = 1;
  int planes = 1;
  int tiers = 0;
  int radix = 0;
  std::int64_t chips = 0;
  std::int64_t boxes = 0;
  std::int64_t host_cables = 0;
  std::int64_t switch_cables = 0;
  double oversubscription = 1.0;
  BillOfMaterials bom;
};

/// Hosts a folded Clos of `tiers` tiers can attach at full bisection:
/// radix for one tier, 2 (radix/2)^tiers in general.
double clos_capacity(int tiers, int radix, double oversubscription = 1.0);

/// Smallest tier count whose capacity covers `hosts`. Throws InfeasibleError
/// beyond `max_tiers`.
int tiers_needed(std::int64_t hosts, int radix, double oversubscription = 1.0, int max_tiers = 6);

TopologyDesign fat_tree(std::int64_t hosts, int radix, const TopologyOptions& options = {});

/// `planes` independent fabrics sharing wires and boxes; each host link of
/// `host_link_bps` is split into `planes` lanes.
TopologyDesign multi_plane(std::int64_t hosts, const SwitchChip& chip, int planes, double host_link_bps = 800e9,
                           const TopologyOptions& options = {});

/// GPU i of every rack joins rail network i; each rail is a multi-plane fabric.
TopologyDesign multi_rail(std::int64_t hosts, int gpus_per_rack, int rails, const SwitchChip& chip, int planes,
                          double host_link_bps = 800e9, const TopologyOptions& options = {});

/// Rails x planes, each rail-plane a two-tier leaf-spine. Throws
/// InfeasibleError when a rail would need a third tier.
TopologyDesign combined_design(std::int64_t hosts, int rails, int planes, const SwitchChip& chip,
                               double host_link_bps = 800e9, const TopologyOptions& options = {});

BillOfMaterials price(const TopologyDesign& design, const PriceBook& prices);

/// Fractional reduction of `design` relative to `baseline`.
double chip_savings(const TopologyDesign& design, const TopologyDesign& baseline);
double link_savings(const TopologyDesign& design, const TopologyDesign& baseline);

std::string topology_csv_header();
std::string topology_csv_row(const TopologyDesign& design, const TopologyDesign& baseline);

}  // namespace dcplan
