#include "dcplan/hardware.hpp"

#include <array>
#include <cmath>
#include <fmt/format.h>

#include "dcplan/errors.hpp"
#include "dcplan/units.hpp"

namespace dcplan {

namespace {

const std::array<BalancingAuthority, 4> kBalancingAuthorities{{
    {"PJM", 9915.0, "Mid-Atlantic"},
    {"SRP", 2634.0, "Southwest"},
    {"NEVP", 2209.0, "Northwest"},
    {"BPAT", 2143.0, "Northwest"},
}};

// Reference point for the adiabatic water band.
constexpr double kWaterReferencePower = 5e9;
constexpr double kWaterMinAtReference = 1e5;
constexpr double kWaterMaxAtReference = 3.5e6;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(fmt::format("{} must be > 0", what));
}

}  // namespace

void AcceleratorSpec::validate() const {
  require_positive(memory_bytes, "accelerator memory");
  require_positive(effective_flops, "accelerator effective FLOP/s");
  require_positive(dense_flops, "accelerator dense FLOP/s");
  require_positive(scale_up_bw, "scale-up bandwidth");
  require_positive(scale_out_bw, "scale-out bandwidth");
}

void RackSpec::validate() const {
  if (gpus_per_rack < 1) throw std::invalid_argument("gpus_per_rack must be >= 1");
  require_positive(cost, "rack cost");
  require_positive(tdp, "rack TDP");
  require_positive(dense_flops, "rack dense FLOP/s");
}

void HardwareCatalog::validate() const {
  accelerator.validate();
  rack.validate();
}

HardwareCatalog HardwareCatalog::gb200_nvl72() {
  HardwareCatalog c;
  c.accelerator = AcceleratorSpec{};
  c.rack = make_rack(72, 3e6, 130e3, c.accelerator.dense_flops);
  return c;
}

RackSpec make_rack(int gpus_per_rack, double cost, double tdp, double per_gpu_dense_flops) {
  RackSpec r;
  r.gpus_per_rack = gpus_per_rack;
  r.cost = cost;
  r.tdp = tdp;
  r.dense_flops = gpus_per_rack * per_gpu_dense_flops;
  r.validate();
  return r;
}

std::span<const BalancingAuthority> balancing_authorities() { return kBalancingAuthorities; }

Provisioning provision(double budget, double compute_fraction, const RackSpec& rack) {
  if (!(budget > 0.0)) throw std::invalid_argument("budget must be > 0");
  if (!(compute_fraction > 0.0 && compute_fraction <= 1.0)) {
    throw std::invalid_argument("compute_fraction must be in (0, 1]");
  }
  rack.validate();
  const double racks = std::floor(budget * compute_fraction / rack.cost);
  if (racks < 1.0) {
    throw InfeasibleError(fmt::format("infeasible: compute allocation of ${:.0f} cannot buy one ${:.0f} rack",
                                      budget * compute_fraction, rack.cost));
  }
  Provisioning p;
  p.rack_count = static_cast<long long>(racks);
  p.gpu_count = p.rack_count * rack.gpus_per_rack;
  p.total_dense_flops = static_cast<double>(p.rack_count) * rack.dense_flops;
  p.it_compute_power = static_cast<double>(p.rack_count) * rack.tdp;
  return p;
}

PowerEnvelope power_envelope(const Provisioning& p, double overhead_fraction, double pue_min, double pue_max) {
  if (overhead_fraction < 0.0) throw std::invalid_argument("overhead_fraction must be >= 0");
  if (pue_min < 1.0) throw std::invalid_argument("pue_min must be >= 1");
  if (pue_max < pue_min) throw std::invalid_argument("pue_max must be >= pue_min");
  PowerEnvelope e;
  e.it_power = p.it_compute_power * (1.0 + overhead_fraction);
  e.facility_power_min = e.it_power * pue_min;
  e.facility_power_max = e.it_power * pue_max;
  return e;
}

long long heat_reuse_households(double annual_energy, double erf, double per_household) {
  if (!(erf >= 0.0 && erf <= 1.0)) throw std::invalid_argument("erf must be in [0, 1]");
  if (annual_energy < 0.0) throw std::invalid_argument("annual energy must be >= 0");
  if (!(per_household > 0.0)) throw std::invalid_argument("per-household energy must be > 0");
  return static_cast<long long>(std::floor(annual_energy * erf / per_household));
}

double free_air_area(double power, double dissipation_density) {
  if (!(dissipation_density > 0.0)) throw std::invalid_argument("dissipation density must be > 0");
  return power / dissipation_density;
}

std::pair<double, double> adiabatic_water_range(double power) {
  require_positive(power, "power");
  const double scale = power / kWaterReferencePower;
  return {kWaterMinAtReference * scale, kWaterMaxAtReference * scale};
}

void apply_hardware_config(ConfigDocument& doc, std::string_view section, HardwareCatalog& catalog) {
  auto& acc = catalog.accelerator;
  if (auto v = doc.get_double(section, "gpu_memory_bytes")) acc.memory_bytes = *v;
  if (auto v = doc.get_double(section, "gpu_effective_flops")) acc.effective_flops = *v;
  if (auto v = doc.get_double(section, "gpu_dense_flops")) acc.dense_flops = *v;
  if (auto v = doc.get_double(section, "scale_up_bps")) acc.scale_up_bw = units::bps_to_bytes_per_s(*v);
  if (auto v = doc.get_double(section, "scale_out_bps")) acc.scale_out_bw = units::bps_to_bytes_per_s(*v);

  int gpus = catalog.rack.gpus_per_rack;
  double cost = catalog.rack.cost;
  double tdp = catalog.rack.tdp;
  if (auto v = doc.get_int(section, "gpus_per_rack")) gpus = static_cast<int>(*v);
  if (auto v = doc.get_double(section, "rack_cost_usd")) cost = *v;
  if (auto v = doc.get_double(section, "rack_tdp_w")) tdp = *v;
  try {
    catalog.rack = make_rack(gpus, cost, tdp, acc.dense_flops);
    catalog.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0, std::string(section));
  }
}

std::string hardware_to_config(const HardwareCatalog& catalog, std::string_view section) {
  const auto& acc = catalog.accelerator;
  const auto& rack = catalog.rack;
  std::string out = fmt::format("[{}]\n", section);
  out += fmt::format("gpu_memory_bytes = {:.17g}\n", acc.memory_bytes);
  out += fmt::format("gpu_effective_flops = {:.17g}\n", acc.effective_flops);
  out += fmt::format("gpu_dense_flops = {:.17g}\n", acc.dense_flops);
  out += fmt::format("scale_up_bps = {:.17g}\n", units::bytes_per_s_to_bps(acc.scale_up_bw));
  out += fmt::format("scale_out_bps = {:.17g}\n", units::bytes_per_s_to_bps(acc.scale_out_bw));
  out += fmt::format("gpus_per_rack = {}\n", rack.gpus_per_rack);
  out += fmt::format("rack_cost_usd = {:.17g}\n", rack.cost);
  out += fmt::format("rack_tdp_w = {:.17g}\n", rack.tdp);
  return out;
}

}  // namespace dcplan
