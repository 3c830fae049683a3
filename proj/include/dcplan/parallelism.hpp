#pragma once

#include "dcplan/hardware.hpp"
#include "dcplan/model.hpp"

namespace dcplan {

/// 3D-parallel layout: each rack holds `layers_per_rack` copies of the same
/// layer (from different replicas), each sharded `t` ways.
struct ParallelismPlan {
  int t = 1;
  int layers_per_rack = 1;
  std::int64_t pp_degree = 1;
  std::int64_t dp_replicas_total = 0;
  std::int64_t dp_replicas_per_dc = 0;
  double racks_per_replica = 0.0;  // may be fractional (e.g. 33.5)
  double per_device_state_bytes = 0.0;
  double per_device_activation_bytes = 0.0;
  int data_centers = 1;

  double per_device_bytes() const { return per_device_state_bytes + per_device_activation_bytes; }
  /// Same-rank peers per DC in the scale-out DP ring.
  std::int64_t dp_peers_per_dc() const;
};

struct PlannerOptions {
  bool divisors_only = true;  // restrict t to divisors of gpus_per_rack
  int data_centers = 2;
  int forced_t = 0;           // 0 = search
};

/// Weights + grads + optimizer state for one layer shard, in bytes.
double per_device_state_bytes(const ModelConfig& cfg, const PrecisionPolicy& policy, int t);

/// Smallest feasible tensor degree t. Throws InfeasibleError when no
/// candidate fits in device memory, naming the shortfall of the best one.
ParallelismPlan plan(const ModelConfig& cfg, const PrecisionPolicy& policy, const HardwareCatalog& hw,
                     const Provisioning& provisioning, const PlannerOptions& options = {});

}  // namespace dcplan
