#include "dcplan/parallelism.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "dcplan/errors.hpp"
#include "dcplan/units.hpp"

namespace dcplan {

std::int64_t ParallelismPlan::dp_peers_per_dc() const {
  return std::max<std::int64_t>(1, dp_replicas_per_dc / std::max(1, layers_per_rack));
}

double per_device_state_bytes(const ModelConfig& cfg, const PrecisionPolicy& policy, int t) {
  if (t < 1) throw std::invalid_argument("tensor degree must be >= 1");
  return static_cast<double>(layer_params(cfg)) * policy.state_bytes_per_param() / static_cast<double>(t);
}

ParallelismPlan plan(const ModelConfig& cfg, const PrecisionPolicy& policy, const HardwareCatalog& hw,
                     const Provisioning& provisioning, const PlannerOptions& options) {
  validate(cfg);
  policy.validate();
  hw.validate();
  if (options.data_centers < 1) throw std::invalid_argument("data_centers must be >= 1");

  const int gpus = hw.rack.gpus_per_rack;
  const double memory = hw.accelerator.memory_bytes;

  auto candidate_ok = [&](int t) { return !options.divisors_only || gpus % t == 0; };
  auto fits = [&](int t) {
    return per_device_state_bytes(cfg, policy, t) + activation_bytes_per_device(cfg, t, policy) <= memory;
  };

  int chosen = 0;
  if (options.forced_t > 0) {
    if (options.forced_t > gpus || !candidate_ok(options.forced_t)) {
      throw InfeasibleError(fmt::format("tensor degree {} is not a valid split of a {}-GPU rack", options.forced_t, gpus));
    }
    chosen = options.forced_t;
  } else {
    for (int t = 1; t <= gpus; ++t) {
      if (candidate_ok(t) && fits(t)) {
        chosen = t;
        break;
      }
    }
  }

  if (chosen == 0 || !fits(chosen)) {
    const int t = chosen == 0 ? gpus : chosen;
    const double need = per_device_state_bytes(cfg, policy, t) + activation_bytes_per_device(cfg, t, policy);
    throw InfeasibleError(fmt::format(
        "model does not fit: '{}' needs {:.2f} GB per device at t={}, {:.2f} GB over the {:.2f} GB device memory",
        name_of(cfg), units::to_gb(need), t, units::to_gb(need - memory), units::to_gb(memory)));
  }

  ParallelismPlan p;
  p.t = chosen;
  p.layers_per_rack = gpus / chosen;
  p.pp_degree = shape_of(cfg).layers;
  p.racks_per_replica = static_cast<double>(p.pp_degree) / static_cast<double>(p.layers_per_rack);
  if (static_cast<double>(provisioning.rack_count) < p.racks_per_replica) {
    throw InfeasibleError(fmt::format("infeasible: one replica of '{}' needs {} racks, only {} provisioned",
                                      name_of(cfg), p.racks_per_replica, provisioning.rack_count));
  }
  p.dp_replicas_total =
      static_cast<std::int64_t>(std::floor(static_cast<double>(provisioning.rack_count) / p.racks_per_replica));
  p.data_centers = options.data_centers;
  p.dp_replicas_per_dc = p.dp_replicas_total / options.data_centers;
  p.per_device_state_bytes = per_device_state_bytes(cfg, policy, chosen);
  p.per_device_activation_bytes = activation_bytes_per_device(cfg, chosen, policy);
  return p;
}

}  // namespace dcplan
