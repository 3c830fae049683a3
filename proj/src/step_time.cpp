#include "dcplan/step_time.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <stdexcept>

#include "dcplan/collectives.hpp"
#include "dcplan/errors.hpp"
#include "dcplan/units.hpp"

namespace dcplan {

void WanLink::validate() const {
  if (!(per_gpu_capacity_bps > 0.0)) throw std::invalid_argument("WAN capacity must be > 0");
  if (rtt < 0.0 || loss_penalty_rtts < 0.0) throw std::invalid_argument("WAN RTT and loss penalty must be >= 0");
}

std::string_view to_string(Network n) {
  switch (n) {
    case Network::scale_up: return "scale-up";
    case Network::scale_out: return "scale-out";
    case Network::cross_dc: return "cross-dc";
  }
  return "?";
}

double DpSchedule::total_time() const {
  double sum = 0.0;
  for (const auto& s : stages) sum += s.time;
  return sum;
}

ComputeTimes layer_compute_times(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                                 double recompute_overhead) {
  if (plan.t < 1) throw std::invalid_argument("tensor degree must be >= 1");
  if (recompute_overhead < 0.0) throw std::invalid_argument("recompute overhead must be >= 0");
  ComputeTimes c;
  c.fwd = flops_forward_per_layer(cfg) / (static_cast<double>(plan.t) * hw.accelerator.effective_flops) *
          (1.0 + recompute_overhead);
  c.bwd = 2.0 * c.fwd;
  return c;
}

namespace {

double sequence_bytes(const ModelConfig& cfg, const PrecisionPolicy& policy) {
  const auto& s = shape_of(cfg);
  return static_cast<double>(s.seq_len) * static_cast<double>(s.microbatch) * static_cast<double>(s.hidden) *
         policy.activation_bytes_per_elem;
}

}  // namespace

TrafficTime tp_comm_per_pass(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                             const PrecisionPolicy& policy) {
  const double sbhr = sequence_bytes(cfg, policy);
  // Two all-gathers + two reduce-scatters, costed as two ring all-reduces.
  return {2.0 * sbhr, 2.0 * ring_all_reduce_time(sbhr, plan.t, hw.accelerator.scale_up_bw)};
}

TrafficTime pp_comm_per_pass(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                             const PrecisionPolicy& policy) {
  if (plan.pp_degree <= 1) return {0.0, 0.0};
  const double chunk = sequence_bytes(cfg, policy) / static_cast<double>(plan.t);
  return {chunk, p2p_time(chunk, hw.accelerator.scale_out_bw)};
}

double dp_gradient_bytes_per_layer(const ModelConfig& cfg, const PrecisionPolicy& policy) {
  return static_cast<double>(layer_params(cfg)) * policy.grad_bytes_per_param;
}

DpSchedule dp_schedule(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                       const PrecisionPolicy& policy, const WanLink& wan) {
  wan.validate();
  DpSchedule s;
  s.stages[0].network = Network::scale_up;
  s.stages[1].network = Network::scale_out;
  s.stages[2].network = Network::cross_dc;
  s.stages[3].network = Network::scale_out;
  s.stages[4].network = Network::scale_up;
  if (plan.dp_replicas_total < 2) {
    s.note = "no data parallelism";
    return s;
  }

  const double grads = dp_gradient_bytes_per_layer(cfg, policy);
  const std::int64_t in_rack = plan.layers_per_rack;
  const std::int64_t per_dc = plan.dp_peers_per_dc();
  const double up = hw.accelerator.scale_up_bw;
  const double out = hw.accelerator.scale_out_bw;

  const double shard = grads / plan.t;          // this device's slice of one layer
  const double rack_chunk = shard / in_rack;    // after the in-rack reduce
  const double dc_chunk = rack_chunk / per_dc;  // after the in-DC reduce

  s.stages[0] = {Network::scale_up, shard, in_rack, ring_all_reduce_time(shard, in_rack, up)};
  s.stages[1] = {Network::scale_out, rack_chunk, per_dc, ring_all_reduce_time(rack_chunk, per_dc, out)};

  s.stages[2] = {Network::cross_dc, dc_chunk, plan.data_centers, 0.0};
  if (plan.data_centers > 1) {
    const double wan_bw = units::bps_to_bytes_per_s(wan.per_gpu_capacity_bps);
    // Two DCs: the ring reduces to one pairwise exchange of the chunk.
    s.stages[2].time = ring_all_reduce_time(dc_chunk, plan.data_centers, wan_bw) + wan.rtt / 2.0 +
                       wan.loss_penalty_rtts * wan.rtt;
  }

  s.stages[3] = {Network::scale_out, rack_chunk, per_dc, ring_all_gather_time(dc_chunk, per_dc, out)};
  s.stages[4] = {Network::scale_up, shard, in_rack, ring_all_gather_time(rack_chunk, in_rack, up)};
  return s;
}

StepTimeReport exposed_fraction(const ModelConfig& cfg, const ParallelismPlan& plan, const HardwareCatalog& hw,
                                const PrecisionPolicy& policy, const WanLink& wan, double recompute_overhead) {
  StepTimeReport r;
  r.model = name_of(cfg);
  const auto compute = layer_compute_times(cfg, plan, hw, recompute_overhead);
  r.fwd_per_layer = compute.fwd;
  r.bwd_per_layer = compute.bwd;

  const auto tp = tp_comm_per_pass(cfg, plan, hw, policy);
  const auto pp = pp_comm_per_pass(cfg, plan, hw, policy);
  r.tp_bytes_per_pass = tp.bytes;
  r.tp_time_per_pass = tp.seconds;
  r.pp_bytes_per_pass = pp.bytes;
  r.pp_time_per_pass = pp.seconds;
  r.dp_schedule = dp_schedule(cfg, plan, hw, policy, wan);

  auto& e = r.exposed;
  e.tp = 2.0 * tp.seconds;
  e.pp = 2.0 * pp.seconds;
  for (std::size_t i = 0; i < e.dp_stage.size(); ++i) {
    e.dp_stage[i] = std::max(0.0, r.dp_schedule.stages[i].time - compute.bwd);
    e.dp += e.dp_stage[i];
  }
  e.total = e.tp + e.pp + e.dp;
  const double step = compute.fwd + compute.bwd + e.total;
  r.exposed_fraction = step > 0.0 ? e.total / step : 0.0;
  return r;
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::scale_up: return "scale-up";
    case SweepAxis::scale_out: return "scale-out";
    case SweepAxis::wan: return "wan";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(std::string_view s) {
  if (s == "scale-up" || s == "scale_up") return SweepAxis::scale_up;
  if (s == "scale-out" || s == "scale_out") return SweepAxis::scale_out;
  if (s == "wan") return SweepAxis::wan;
  throw ConfigError(fmt::format("unknown sweep axis '{}' (expected scale-up, scale-out or wan)", s));
}

std::vector<SweepRow> sweep(SweepAxis axis, const std::vector<double>& values_bps, const std::vector<SweepCase>& cases,
                            const HardwareCatalog& hw, const PrecisionPolicy& policy, const WanLink& wan,
                            double recompute_overhead) {
  if (values_bps.empty()) throw std::invalid_argument("sweep needs at least one value");
  std::vector<SweepRow> rows;
  rows.reserve(values_bps.size() * cases.size());
  for (double value : values_bps) {
    if (!(value > 0.0)) throw std::invalid_argument("sweep values must be > 0");
    HardwareCatalog h = hw;
    WanLink w = wan;
    switch (axis) {
      case SweepAxis::scale_up: h.accelerator.scale_up_bw = units::bps_to_bytes_per_s(value); break;
      case SweepAxis::scale_out: h.accelerator.scale_out_bw = units::bps_to_bytes_per_s(value); break;
      case SweepAxis::wan: w.per_gpu_capacity_bps = value; break;
    }
    for (const auto& c : cases) {
      rows.push_back({axis, value, exposed_fraction(c.model, c.plan, h, policy, w, recompute_overhead)});
    }
  }
  return rows;
}

std::string sweep_csv_header() {
  return "axis_name,axis_value_bps,model,fwd_ms,bwd_ms,tp_ms,pp_ms,dp_stage1_ms,dp_stage2_ms,dp_stage3_ms,"
         "dp_stage4_ms,dp_stage5_ms,exposed_ms,exposed_fraction";
}

std::string sweep_csv_row(const SweepRow& row) {
  const auto& r = row.report;
  const auto& st = r.dp_schedule.stages;
  return fmt::format("{},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}",
                     to_string(row.axis), row.axis_value_bps, r.model, units::to_ms(r.fwd_per_layer),
                     units::to_ms(r.bwd_per_layer), units::to_ms(r.tp_time_per_pass), units::to_ms(r.pp_time_per_pass),
                     units::to_ms(st[0].time), units::to_ms(st[1].time), units::to_ms(st[2].time),
                     units::to_ms(st[3].time), units::to_ms(st[4].time), units::to_ms(r.exposed.total),
                     r.exposed_fraction);
}

}  // namespace dcplan
