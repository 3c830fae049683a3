#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dcplan/flowsim.hpp"
#include "dcplan/inference.hpp"
#include "dcplan/scenario.hpp"

namespace dcplan {

std::string_view tool_version();

struct FacilityReport {
  FacilityInputs inputs;
  Provisioning provisioning;
  PowerEnvelope power;
  long long heat_reuse_households = 0;
  double free_air_area_m2 = 0.0;
  std::pair<double, double> adiabatic_water_lph{};
  std::vector<std::string> notes;
};

struct ModelReport {
  ModelConfig model;
  std::int64_t total_params = 0;
  std::int64_t active_params = 0;
  std::int64_t per_expert_params = 0;  // MoE only
  MemoryFootprint memory;
  double flops_forward_per_layer = 0.0;
  ParallelismPlan plan;
  StepTimeReport step;
};

struct TopologyReport {
  std::vector<TopologyDesign> designs;  // designs.front() is the baseline fat tree
};

struct FlowSimReport {
  Fabric fabric;
  double flow_bytes = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<FlowSimResult> runs;  // policy-major, then participation
};

struct InferenceRow {
  double tokens = 0.0;
  InferenceEstimate estimate;
  std::optional<double> published_seconds;
  double relative_error = 0.0;  // (model - published) / published
};

struct InferenceTableReport {
  std::string model;
  double racks = 0.0;
  LatencyModel fit;
  std::vector<LatencySample> calibration;
  std::vector<InferenceRow> rows;
};

struct ScalingReport {
  ScalingLaw law;
  double aggregate_rate = 0.0;
  double utilization = 1.0;
  std::optional<double> compute;
  std::optional<Allocation> allocation;
  std::optional<double> training_time;
  std::optional<double> target_params;
  std::optional<double> target_compute;
  std::optional<double> target_tokens;
  std::optional<double> target_training_time;
};

enum class Section : unsigned {
  facility = 1u << 0,
  plan = 1u << 1,
  sweep = 1u << 2,
  topology = 1u << 3,
  flowsim = 1u << 4,
  inference = 1u << 5,
  scaling = 1u << 6,
};

class Sections {
 public:
  constexpr Sections() = default;
  constexpr Sections(std::initializer_list<Section> list) {
    for (auto s : list) bits_ |= static_cast<unsigned>(s);
  }
  constexpr bool has(Section s) const { return (bits_ & static_cast<unsigned>(s)) != 0; }
  /// Everything except the flow simulation.
  static constexpr Sections analytic() {
    return {Section::facility, Section::plan, Section::sweep, Section::topology, Section::inference, Section::scaling};
  }

 private:
  unsigned bits_ = 0;
};

struct Report {
  int schema_version = kScenarioSchemaVersion;
  std::string tool_version;
  std::string scenario_name;
  std::uint64_t scenario_hash = 0;

  std::optional<FacilityReport> facility;
  std::vector<ModelReport> models;
  std::vector<SweepRow> sweep;
  std::optional<TopologyReport> topology;
  std::optional<FlowSimReport> flowsim;
  std::vector<InferenceTableReport> inference;
  std::optional<ScalingReport> scaling;
};

/// Evaluate the requested sections. Identical inputs give identical reports.
/// Throws InfeasibleError from planning/topology and ConfigError for
/// inconsistent scenario values.
Report run(const Scenario& scenario, Sections sections = Sections::analytic());

/// Key-ordered JSON; throws Error if any number is not finite.
nlohmann::ordered_json to_json(const Report& report);

/// CSV table for one section (header line plus rows).
std::string to_csv(const Report& report, Section section);

/// Human-readable tables.
std::string render_text(const Report& report);

/// Write `content` to `path` via a temporary file in the same directory and
/// a rename. Throws Error naming the path on failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

enum class OutputFormat { json, csv };
OutputFormat output_format_from_string(std::string_view s);

/// Serialize `report` and write it to `path` atomically.
void emit(const Report& report, OutputFormat format, const std::filesystem::path& path, Section csv_section);

}  // namespace dcplan
