#pragma once

#include <span>
#include <string>
#include <utility>

#include "dcplan/config.hpp"

namespace dcplan {

/// Per-device accelerator figures. Bandwidths are bytes/s per device.
struct AcceleratorSpec {
  double memory_bytes = 192e9;
  double effective_flops = 2.0e16;  // rate used for compute-time prediction
  double dense_flops = 1.0e16;      // vendor dense rate, used for provisioning totals
  double scale_up_bw = 1.8e12;      // 14.4 Tbps NVLink
  double scale_out_bw = 100e9;      // 800 Gbps NIC

  void validate() const;
  bool operator==(const AcceleratorSpec&) const = default;
};

struct RackSpec {
  int gpus_per_rack = 72;
  double cost = 3e6;    // USD
  double tdp = 130e3;   // W at full load
  double dense_flops = 72 * 1.0e16;

  void validate() const;
  bool operator==(const RackSpec&) const = default;
};

struct HardwareCatalog {
  AcceleratorSpec accelerator;
  RackSpec rack;

  /// GB200 in NVL72 packaging.
  static HardwareCatalog gb200_nvl72();

  void validate() const;
  bool operator==(const HardwareCatalog&) const = default;
};

RackSpec make_rack(int gpus_per_rack, double cost, double tdp, double per_gpu_dense_flops);

struct Provisioning {
  long long rack_count = 0;
  long long gpu_count = 0;
  double total_dense_flops = 0.0;
  double it_compute_power = 0.0;  // W
};

struct PowerEnvelope {
  double it_power = 0.0;  // compute plus storage/network overhead
  double facility_power_min = 0.0;
  double facility_power_max = 0.0;
};

struct BalancingAuthority {
  std::string name;
  double max_available_mw;
  std::string region;
};

/// Largest spare generation capacity among US grid operators (static table).
std::span<const BalancingAuthority> balancing_authorities();

/// Racks bought with `budget * compute_fraction`. Throws InfeasibleError when
/// the allocation cannot buy a single rack.
Provisioning provision(double budget, double compute_fraction, const RackSpec& rack);

PowerEnvelope power_envelope(const Provisioning& p, double overhead_fraction, double pue_min, double pue_max);

/// Households whose annual heating demand is covered by reused heat.
/// `annual_energy` and `per_household` are both Wh per year.
long long heat_reuse_households(double annual_energy, double erf, double per_household);

/// Ground area (m^2) needed to shed `power` watts by free-air cooling.
double free_air_area(double power, double dissipation_density);

/// Direct evaporative (adiabatic) water draw in L/h, scaled linearly from the
/// 1e5..3.5e6 L/h band quoted for a 5 GW site.
std::pair<double, double> adiabatic_water_range(double power);

/// Catalog <-> key/value text (the `[hardware]` section of a scenario file).
void apply_hardware_config(ConfigDocument& doc, std::string_view section, HardwareCatalog& catalog);
std::string hardware_to_config(const HardwareCatalog& catalog, std::string_view section = "hardware");

}  // namespace dcplan
