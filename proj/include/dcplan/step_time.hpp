#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "dcplan/hardware.hpp"
#include "dcplan/model.hpp"
#include "dcplan/parallelism.hpp"

namespace dcplan {

/// Wide-area path between the two datacenters, provisioned per GPU.
struct WanLink {
  double per_gpu_capacity_bps = 20e9;
  double rtt = 0.060;              // s; one-way propagation is rtt / 2
  double loss_penalty_rtts = 0.0;  // tail retransmission cost in RTTs

  void validate() const;
};

enum class Network { scale_up, scale_out, cross_dc };
std::string_view to_string(Network n);

struct DpStage {
  Network network = Network::scale_up;
  double bytes_per_device = 0.0;
  std::int64_t peers = 1;
  double time = 0.0;
};

/// Hierarchical gradient synchronisation, in order: in-rack all-reduce,
/// in-DC scale-out all-reduce, cross-DC pairwise exchange, in-DC scale-out
/// all-gather, in-rack all-gather.
struct DpSchedule {
  std::array<DpStage, 5> stages;
  std::string note;

  double total_time() const;
};

struct ExposedBreakdown {
  double tp = 0.0;  // both passes
  double pp = 0.0;  // both passes
  std::array<double, 5> dp_stage{};
  double dp = 0.0;
  double total = 0.0;
};

struct StepTimeReport {
  std::string model;
  double fwd_per_layer = 0.0;
  double bwd_per_layer = 0.0;
  double tp_bytes_per_pass = 0.0;
  double tp_time_per_pass = 0.0;
  double pp_bytes_per_pass = 0.0;
  double pp_time_per_pass = 0.0;
  DpSchedule dp_schedule;
  ExposedBreakdown exposed;
  double exposed_fraction = 0.0;
};

struct ComputeTimes {
  double fwd = 0.0;
  double bwd = 0.0;
};

struct TrafficTime {
  double bytes = 0.0;
  double seconds = 0.0;
};

/// Default selective-recomputation overhead on the forward pass.
inline constexpr double kDefaultRecomputeOverhead = 0.0097;

ComputeTimes layer_compute_times(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                                 double recompute_overhead = kDefaultRecomputeOverhead);

/// Sequence-parallel traffic of one pass: volume 2sbhr, time of two ring
/// all-reduces of sbhr among t peers on the scale-up network.
TrafficTime tp_comm_per_pass(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                             const PrecisionPolicy& policy);

/// Pipeline hand-off of one pass: sbhr / t bytes over the scale-out NIC.
TrafficTime pp_comm_per_pass(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                             const PrecisionPolicy& policy);

/// Per-layer gradient bytes exchanged by data parallelism (all experts).
double dp_gradient_bytes_per_layer(const ModelConfig& cfg, const PrecisionPolicy& policy);

DpSchedule dp_schedule(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                       const PrecisionPolicy& policy, const WanLink& wan);

/// Steady-state exposed communication per layer: TP and PP are never
/// overlapped; each DP stage hides behind up to one layer's backward pass.
StepTimeReport exposed_fraction(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                                const PrecisionPolicy& policy, const WanLink& wan,
                                double recompute_overhead = kDefaultRecomputeOverhead);

enum class SweepAxis { scale_up, scale_out, wan };
std::string_view to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(std::string_view s);

struct SweepCase {
  ModelConfig model;
  ParallelismPlan plan;
};

struct SweepRow {
  SweepAxis axis = SweepAxis::scale_up;
  double axis_value_bps = 0.0;
  StepTimeReport report;
};

/// One row per (value, model), value-major in the given order.
std::vector<SweepRow> sweep(SweepAxis axis, const std::vector<double>& values_bps, const std::vector<SweepCase>& cases,
                            const HardwareCatalog& hw, const PrecisionPolicy& policy, const WanLink& wan,
                            double recompute_overhead = kDefaultRecomputeOverhead);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

}  // namespace dcplan
