#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcplan/flowsim.hpp"
#include "dcplan/hardware.hpp"
#include "dcplan/model.hpp"
#include "dcplan/parallelism.hpp"
#include "dcplan/scaling.hpp"
#include "dcplan/step_time.hpp"
#include "dcplan/topology.hpp"

namespace dcplan {

inline constexpr int kScenarioSchemaVersion = 1;

struct FacilityInputs {
  double budget = 100e9;  // USD
  double compute_fraction = 0.7;
  double overhead_fraction = 0.2;
  double pue_min = 1.15;
  double pue_max = 1.3;
  double annual_energy_wh = 52.66e12;
  double erf = 0.69;
  double household_wh = 6.3e6;
  double cooling_power_w = 5e9;
  double dissipation_w_per_m2 = 2076.0;
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::scale_up;
  std::vector<double> values_bps;
};

struct TopologyInputs {
  std::int64_t hosts = 800000;
  int radix = 64;
  int planes = 4;
  int rails = 72;
  int combined_rails = 76;
  int combined_planes = 4;
  double host_link_bps = 800e9;
  TopologyOptions options;
};

struct FlowSimInputs {
  std::int64_t hosts = 8192;
  int tiers = 2;
  int radix = 128;
  double link_speed_bps = 800e9;
  double flow_bytes = 100e6;
  std::vector<double> participation{1.0};
  std::vector<RoutingPolicy> policies{RoutingPolicy::single_path, RoutingPolicy::spray};
  FlowSimOptions options;
};

struct InferenceInputs {
  std::vector<double> tokens{512, 1024, 2048, 16000, 32000};
  std::vector<std::string> tables{"100t", "50t"};
};

struct ScalingInputs {
  std::vector<ScalingLaw> laws{chinchilla_approach2()};
  std::string active_law = "chinchilla-approach2";
  std::optional<double> compute;        // FLOP
  std::optional<double> target_params;  // invert the law for this size
  std::optional<double> duration;       // s; compute = rate * utilization * duration
  double utilization = 1.0;

  const ScalingLaw& law() const;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "default";
  FacilityInputs facility;
  HardwareCatalog hardware = HardwareCatalog::gb200_nvl72();
  PrecisionPolicy precision;
  std::vector<ModelConfig> models;
  double recompute_overhead = kDefaultRecomputeOverhead;
  PlannerOptions planner;
  WanLink wan;
  std::vector<SweepSpec> sweeps;
  TopologyInputs topology;
  FlowSimInputs flowsim;
  InferenceInputs inference;
  ScalingInputs scaling;
  std::string source;  // text the scenario was parsed from
};

/// Built-in scenario: both presets on the default hardware and facility.
Scenario default_scenario();

/// Parse scenario text. Unknown sections or keys, a missing or unsupported
/// schema_version, and unresolved model names raise ConfigError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// FNV-1a 64 over `text`.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace dcplan
