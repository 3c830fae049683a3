#include "dcplan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fmt/format.h>
#include <fstream>
#include <system_error>
#include <unistd.h>

#include "dcplan/errors.hpp"
#include "dcplan/units.hpp"

#ifndef DCPLAN_VERSION
#define DCPLAN_VERSION "0.0.0"
#endif

namespace dcplan {

using nlohmann::ordered_json;
using units::to_ms;

std::string_view tool_version() { return DCPLAN_VERSION; }

namespace {

FacilityReport facility_report(const Scenario& sc) {
  const auto& in = sc.facility;
  FacilityReport r;
  r.inputs = in;
  r.provisioning = provision(in.budget, in.compute_fraction, sc.hardware.rack);
  r.power = power_envelope(r.provisioning, in.overhead_fraction, in.pue_min, in.pue_max);
  r.heat_reuse_households = heat_reuse_households(in.annual_energy_wh, in.erf, in.household_wh);
  r.free_air_area_m2 = free_air_area(in.cooling_power_w, in.dissipation_w_per_m2);
  r.adiabatic_water_lph = adiabatic_water_range(in.cooling_power_w);
  if (in.cooling_power_w == 5e9 && in.dissipation_w_per_m2 == 2076.0) {
    r.notes.push_back(
        "free-air area: the widely quoted 2.41B m^2 for 5 GW at 2.076 kW/m^2 is 1000x the quotient of those inputs; "
        "this report gives the quotient");
  }
  r.notes.push_back("heat reuse: annual energy is read as Wh per year");
  return r;
}

ModelReport model_report(const Scenario& sc, const ModelConfig& cfg, const Provisioning& prov) {
  ModelReport m;
  m.model = cfg;
  if (const auto* moe = std::get_if<MoEConfig>(&cfg)) {
    const auto c = param_count_moe(*moe);
    m.total_params = c.total;
    m.active_params = c.active;
    m.per_expert_params = c.per_expert_model;
  } else {
    m.total_params = m.active_params = total_params(cfg);
  }
  m.memory = memory_footprint(static_cast<double>(m.total_params), sc.precision);
  m.flops_forward_per_layer = flops_forward_per_layer(cfg);
  m.plan = plan(cfg, sc.precision, sc.hardware, prov, sc.planner);
  m.step = exposed_fraction(cfg, m.plan, sc.hardware, sc.precision, sc.wan, sc.recompute_overhead);
  return m;
}

TopologyReport topology_report(const Scenario& sc) {
  const auto& t = sc.topology;
  const auto chip = SwitchChip::asic_51t2();
  TopologyReport r;
  try {
    r.designs.push_back(fat_tree(t.hosts, t.radix, t.options));
    r.designs.push_back(multi_plane(t.hosts, chip, t.planes, t.host_link_bps, t.options));
    if (t.rails <= sc.hardware.rack.gpus_per_rack) {
      r.designs.push_back(multi_rail(t.hosts, sc.hardware.rack.gpus_per_rack, t.rails, chip, 1, t.host_link_bps,
                                     t.options));
      r.designs.push_back(multi_rail(t.hosts, sc.hardware.rack.gpus_per_rack, t.rails, chip, t.planes,
                                     t.host_link_bps, t.options));
    }
    r.designs.push_back(combined_design(t.hosts, t.combined_rails, t.combined_planes, chip, t.host_link_bps, t.options));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0, "topology");
  }
  return r;
}

FlowSimReport flowsim_report(const Scenario& sc) {
  const auto& f = sc.flowsim;
  FlowSimReport r;
  r.flow_bytes = f.flow_bytes;
  r.trials = f.options.trials;
  r.seed = f.options.seed;
  try {
    r.fabric = build_fabric(f.hosts, f.tiers, f.radix, f.link_speed_bps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0, "flowsim");
  }
  for (auto policy : f.policies) {
    for (double p : f.participation) {
      r.runs.push_back(simulate_permutation(r.fabric, {f.flow_bytes, p}, policy, f.options));
    }
  }
  return r;
}

std::vector<InferenceTableReport> inference_report(const Scenario& sc) {
  std::vector<InferenceTableReport> out;
  for (const auto& name : sc.inference.tables) {
    const auto& table = name == "50t" ? latency_table_50t() : latency_table_100t();
    InferenceTableReport t;
    t.model = table.model;
    t.racks = table.racks;
    t.calibration = calibration_rows(table);
    t.fit = fit_latency(t.calibration);
    for (double tokens : sc.inference.tokens) {
      InferenceRow row;
      row.tokens = tokens;
      row.estimate = generation_time(t.fit, tokens);
      for (const auto& pub : table.rows) {
        if (pub.tokens == tokens) {
          row.published_seconds = pub.seconds;
          row.relative_error = (row.estimate.total_time - pub.seconds) / pub.seconds;
        }
      }
      t.rows.push_back(row);
    }
    out.push_back(std::move(t));
  }
  return out;
}

ScalingReport scaling_report(const Scenario& sc, const Provisioning& prov) {
  const auto& in = sc.scaling;
  ScalingReport r;
  r.law = in.law();
  r.aggregate_rate = prov.total_dense_flops;
  r.utilization = in.utilization;
  const TrainingBudget budget{r.aggregate_rate, r.utilization, in.duration.value_or(0.0)};
  if (in.compute) {
    r.compute = in.compute;
  } else if (in.duration) {
    r.compute = budget.compute();
  }
  if (r.compute) {
    r.allocation = optimal_allocation(*r.compute, r.law);
    r.training_time = training_time(r.allocation->params, r.allocation->tokens, budget);
  }
  if (in.target_params) {
    r.target_params = in.target_params;
    r.target_compute = compute_for_params(*in.target_params, r.law);
    r.target_tokens = *r.target_compute / (6.0 * *in.target_params);
    r.target_training_time = training_time(*in.target_params, *r.target_tokens, budget);
  }
  return r;
}

std::string effective_settings(const Scenario& sc) {
  return fmt::format("\n#seed={};trials={};law={}", sc.flowsim.options.seed, sc.flowsim.options.trials,
                     sc.scaling.active_law);
}

// ---- JSON ----

ordered_json to_json(const Provisioning& p) {
  return {{"rack_count", p.rack_count},
          {"gpu_count", p.gpu_count},
          {"total_dense_flops", p.total_dense_flops},
          {"it_compute_power_w", p.it_compute_power}};
}

ordered_json to_json(const FacilityReport& f) {
  ordered_json authorities = ordered_json::array();
  for (const auto& a : balancing_authorities()) {
    authorities.push_back({{"name", a.name}, {"max_available_mw", a.max_available_mw}, {"region", a.region}});
  }
  return {{"budget_usd", f.inputs.budget},
          {"compute_fraction", f.inputs.compute_fraction},
          {"provisioning", to_json(f.provisioning)},
          {"power",
           {{"it_power_w", f.power.it_power},
            {"facility_power_min_w", f.power.facility_power_min},
            {"facility_power_max_w", f.power.facility_power_max}}},
          {"heat_reuse_households", f.heat_reuse_households},
          {"free_air_area_m2", f.free_air_area_m2},
          {"adiabatic_water_lph", {f.adiabatic_water_lph.first, f.adiabatic_water_lph.second}},
          {"balancing_authorities", authorities},
          {"notes", f.notes}};
}

ordered_json to_json(const ParallelismPlan& p) {
  return {{"t", p.t},
          {"layers_per_rack", p.layers_per_rack},
          {"pp_degree", p.pp_degree},
          {"dp_replicas_total", p.dp_replicas_total},
          {"dp_replicas_per_dc", p.dp_replicas_per_dc},
          {"dp_peers_per_dc", p.dp_peers_per_dc()},
          {"racks_per_replica", p.racks_per_replica},
          {"data_centers", p.data_centers},
          {"per_device_state_bytes", p.per_device_state_bytes},
          {"per_device_activation_bytes", p.per_device_activation_bytes},
          {"per_device_bytes", p.per_device_bytes()}};
}

ordered_json to_json(const StepTimeReport& r) {
  ordered_json stages = ordered_json::array();
  const double window = r.bwd_per_layer;
  for (std::size_t i = 0; i < r.dp_schedule.stages.size(); ++i) {
    const auto& s = r.dp_schedule.stages[i];
    stages.push_back({{"stage", i + 1},
                      {"network", to_string(s.network)},
                      {"bytes_per_device", s.bytes_per_device},
                      {"peers", s.peers},
                      {"time_ms", to_ms(s.time)},
                      {"masked_ms", to_ms(std::min(s.time, window))},
                      {"exposed_ms", to_ms(r.exposed.dp_stage[i])}});
  }
  ordered_json out = {{"fwd_ms", to_ms(r.fwd_per_layer)},
                      {"bwd_ms", to_ms(r.bwd_per_layer)},
                      {"tp_bytes_per_pass", r.tp_bytes_per_pass},
                      {"tp_ms_per_pass", to_ms(r.tp_time_per_pass)},
                      {"pp_bytes_per_pass", r.pp_bytes_per_pass},
                      {"pp_ms_per_pass", to_ms(r.pp_time_per_pass)},
                      {"dp_stages", stages},
                      {"exposed",
                       {{"tp_ms", to_ms(r.exposed.tp)},
                        {"pp_ms", to_ms(r.exposed.pp)},
                        {"dp_ms", to_ms(r.exposed.dp)},
                        {"total_ms", to_ms(r.exposed.total)}}},
                      {"exposed_fraction", r.exposed_fraction}};
  if (!r.dp_schedule.note.empty()) out["note"] = r.dp_schedule.note;
  return out;
}

ordered_json to_json(const ModelReport& m) {
  const auto& s = shape_of(m.model);
  ordered_json model = {{"name", name_of(m.model)},
                        {"kind", is_moe(m.model) ? "moe" : "dense"},
                        {"layers", s.layers},
                        {"hidden", s.hidden},
                        {"heads", s.heads},
                        {"vocab", s.vocab},
                        {"seq_len", s.seq_len},
                        {"microbatch", s.microbatch}};
  if (const auto* moe = std::get_if<MoEConfig>(&m.model)) {
    model["experts"] = moe->experts;
    model["top_k"] = moe->top_k;
  }
  ordered_json params = {{"total", m.total_params}, {"active", m.active_params}};
  if (is_moe(m.model)) params["per_expert_model"] = m.per_expert_params;
  return {{"model", model},
          {"params", params},
          {"memory_bytes",
           {{"weights", m.memory.weights_bytes},
            {"grads", m.memory.grad_bytes},
            {"optimizer", m.memory.optimizer_bytes},
            {"total", m.memory.total_bytes}}},
          {"flops_forward_per_layer", m.flops_forward_per_layer},
          {"parallelism", to_json(m.plan)},
          {"step_time", to_json(m.step)}};
}

ordered_json to_json(const SweepRow& row) {
  const auto& r = row.report;
  ordered_json stages = ordered_json::array();
  for (const auto& s : r.dp_schedule.stages) stages.push_back(to_ms(s.time));
  return {{"axis", to_string(row.axis)},
          {"axis_value_bps", row.axis_value_bps},
          {"model", r.model},
          {"fwd_ms", to_ms(r.fwd_per_layer)},
          {"bwd_ms", to_ms(r.bwd_per_layer)},
          {"tp_ms", to_ms(r.tp_time_per_pass)},
          {"pp_ms", to_ms(r.pp_time_per_pass)},
          {"dp_stage_ms", stages},
          {"exposed_ms", to_ms(r.exposed.total)},
          {"exposed_fraction", r.exposed_fraction}};
}

ordered_json to_json(const TopologyReport& t) {
  ordered_json designs = ordered_json::array();
  const auto& base = t.designs.front();
  for (const auto& d : t.designs) {
    designs.push_back({{"design", to_string(d.kind)},
                       {"hosts", d.hosts},
                       {"hosts_per_rail", d.hosts_per_rail},
                       {"rails", d.rails},
                       {"planes", d.planes},
                       {"tiers", d.tiers},
                       {"radix", d.radix},
                       {"chips", d.chips},
                       {"boxes", d.boxes},
                       {"host_cables", d.host_cables},
                       {"switch_cables", d.switch_cables},
                       {"oversubscription", d.oversubscription},
                       {"bom_usd",
                        {{"switch_link_transceivers", d.bom.switch_link_transceivers},
                         {"host_link_transceivers", d.bom.host_link_transceivers},
                         {"chips", d.bom.chips},
                         {"total", d.bom.total},
                         {"within_budget", d.bom.within_budget}}},
                       {"chip_savings", chip_savings(d, base)},
                       {"link_savings", base.switch_cables > 0 ? link_savings(d, base) : 0.0}});
  }
  return {{"designs", designs}};
}

ordered_json to_json(const FlowSimReport& f) {
  ordered_json runs = ordered_json::array();
  for (const auto& r : f.runs) {
    const auto& s = r.stats;
    runs.push_back({{"policy", to_string(r.policy)},
                    {"participation", r.pattern.participation},
                    {"flows", s.flows},
                    {"optimal_fct_s", s.optimal_fct},
                    {"fct_s", {{"mean", s.mean}, {"p50", s.p50}, {"p99", s.p99}, {"max", s.max}}},
                    {"inflation",
                     {{"mean", s.mean_inflation()},
                      {"p50", s.p50_inflation()},
                      {"p99", s.p99_inflation()},
                      {"max", s.max_inflation()}}}});
  }
  return {{"fabric",
           {{"hosts", f.fabric.hosts},
            {"tiers", f.fabric.tiers},
            {"radix", f.fabric.radix},
            {"link_speed_bps", f.fabric.link_speed_bps},
            {"leaves", f.fabric.leaves},
            {"spines", f.fabric.spines},
            {"links", f.fabric.link_count()}}},
          {"flow_bytes", f.flow_bytes},
          {"trials", f.trials},
          {"seed", f.seed},
          {"runs", runs}};
}

ordered_json to_json(const InferenceTableReport& t) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json row = {{"tokens", r.tokens},
                        {"total_s", r.estimate.total_time},
                        {"tokens_per_second", r.estimate.tokens_per_second}};
    if (r.published_seconds) {
      row["published_s"] = *r.published_seconds;
      row["relative_error"] = r.relative_error;
    }
    rows.push_back(row);
  }
  ordered_json calib = ordered_json::array();
  for (const auto& c : t.calibration) calib.push_back(c.tokens);
  ordered_json out = {{"model", t.model},
                      {"alpha_s_per_token", t.fit.alpha},
                      {"beta_s_per_token2", t.fit.beta},
                      {"calibration_tokens", calib},
                      {"rows", rows}};
  if (t.racks > 0.0) out["deployment_racks"] = t.racks;
  return out;
}

ordered_json to_json(const ScalingReport& s) {
  ordered_json out = {{"law", {{"name", s.law.name}, {"coefficient", s.law.coefficient}, {"exponent", s.law.exponent}}},
                      {"aggregate_rate_flops", s.aggregate_rate},
                      {"utilization", s.utilization}};
  if (s.compute) {
    out["compute_flop"] = *s.compute;
    out["optimal_params"] = s.allocation->params;
    out["optimal_tokens"] = s.allocation->tokens;
    out["training_time_s"] = *s.training_time;
  }
  if (s.target_params) {
    out["target"] = {{"params", *s.target_params},
                     {"compute_flop", *s.target_compute},
                     {"tokens", *s.target_tokens},
                     {"training_time_s", *s.target_training_time}};
  }
  return out;
}

void require_finite(const ordered_json& j, const std::string& path) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw Error(fmt::format("report value at {} is not finite", path));
  }
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) require_finite(v, path + "." + k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], fmt::format("{}[{}]", path, i));
  }
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

Report run(const Scenario& sc, Sections sections) {
  Report r;
  r.tool_version = std::string(tool_version());
  r.scenario_name = sc.name;
  r.scenario_hash = fnv1a64(sc.source + effective_settings(sc));

  const bool needs_provisioning =
      sections.has(Section::facility) || sections.has(Section::plan) || sections.has(Section::sweep) ||
      sections.has(Section::scaling);
  Provisioning prov;
  if (needs_provisioning) prov = provision(sc.facility.budget, sc.facility.compute_fraction, sc.hardware.rack);

  if (sections.has(Section::facility)) r.facility = facility_report(sc);
  if (sections.has(Section::plan) || (sections.has(Section::sweep) && !sc.sweeps.empty())) {
    for (const auto& m : sc.models) r.models.push_back(model_report(sc, m, prov));
  }
  if (sections.has(Section::sweep)) {
    std::vector<SweepCase> cases;
    for (const auto& m : r.models) cases.push_back({m.model, m.plan});
    for (const auto& s : sc.sweeps) {
      auto rows = sweep(s.axis, s.values_bps, cases, sc.hardware, sc.precision, sc.wan, sc.recompute_overhead);
      r.sweep.insert(r.sweep.end(), rows.begin(), rows.end());
    }
  }
  if (!sections.has(Section::plan)) r.models.clear();
  if (sections.has(Section::topology)) r.topology = topology_report(sc);
  if (sections.has(Section::flowsim)) r.flowsim = flowsim_report(sc);
  if (sections.has(Section::inference)) r.inference = inference_report(sc);
  if (sections.has(Section::scaling)) r.scaling = scaling_report(sc, prov);
  return r;
}

nlohmann::ordered_json to_json(const Report& r) {
  ordered_json j;
  j["schema_version"] = r.schema_version;
  j["tool_version"] = r.tool_version;
  j["scenario"] = r.scenario_name;
  j["scenario_hash"] = fmt::format("{:016x}", r.scenario_hash);
  if (r.facility) j["facility"] = to_json(*r.facility);
  if (!r.models.empty()) {
    ordered_json models = ordered_json::array();
    for (const auto& m : r.models) models.push_back(to_json(m));
    j["models"] = models;
  }
  if (!r.sweep.empty()) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.sweep) rows.push_back(to_json(row));
    j["sweep"] = rows;
  }
  if (r.topology) j["topology"] = to_json(*r.topology);
  if (r.flowsim) j["flowsim"] = to_json(*r.flowsim);
  if (!r.inference.empty()) {
    ordered_json tables = ordered_json::array();
    for (const auto& t : r.inference) tables.push_back(to_json(t));
    j["inference"] = tables;
  }
  if (r.scaling) j["scaling"] = to_json(*r.scaling);
  require_finite(j, "$");
  return j;
}

std::string to_csv(const Report& r, Section section) {
  std::string out;
  switch (section) {
    case Section::facility: {
      out = "quantity,value\n";
      if (!r.facility) break;
      const auto& f = *r.facility;
      const std::pair<const char*, double> rows[] = {
          {"rack_count", static_cast<double>(f.provisioning.rack_count)},
          {"gpu_count", static_cast<double>(f.provisioning.gpu_count)},
          {"total_dense_flops", f.provisioning.total_dense_flops},
          {"it_compute_power_w", f.provisioning.it_compute_power},
          {"it_power_w", f.power.it_power},
          {"facility_power_min_w", f.power.facility_power_min},
          {"facility_power_max_w", f.power.facility_power_max},
          {"heat_reuse_households", static_cast<double>(f.heat_reuse_households)},
          {"free_air_area_m2", f.free_air_area_m2},
          {"adiabatic_water_min_lph", f.adiabatic_water_lph.first},
          {"adiabatic_water_max_lph", f.adiabatic_water_lph.second},
      };
      for (const auto& [k, v] : rows) out += fmt::format("{},{}\n", k, g17(v));
      break;
    }
    case Section::plan: {
      out = "model,t,layers_per_rack,pp_degree,dp_replicas_total,dp_replicas_per_dc,racks_per_replica,"
            "per_device_gb,fwd_ms,bwd_ms,tp_ms,pp_ms,dp_stage1_ms,dp_stage2_ms,dp_stage3_ms,dp_stage4_ms,"
            "dp_stage5_ms,exposed_ms,exposed_fraction\n";
      for (const auto& m : r.models) {
        const auto& p = m.plan;
        const auto& s = m.step;
        const auto& st = s.dp_schedule.stages;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", name_of(m.model), p.t,
                           p.layers_per_rack, p.pp_degree, p.dp_replicas_total, p.dp_replicas_per_dc,
                           g17(p.racks_per_replica), g17(units::to_gb(p.per_device_bytes())),
                           g17(to_ms(s.fwd_per_layer)), g17(to_ms(s.bwd_per_layer)), g17(to_ms(s.tp_time_per_pass)),
                           g17(to_ms(s.pp_time_per_pass)), g17(to_ms(st[0].time)), g17(to_ms(st[1].time)),
                           g17(to_ms(st[2].time)), g17(to_ms(st[3].time)), g17(to_ms(st[4].time)),
                           g17(to_ms(s.exposed.total)), g17(s.exposed_fraction));
      }
      break;
    }
    case Section::sweep:
      out = sweep_csv_header() + "\n";
      for (const auto& row : r.sweep) out += sweep_csv_row(row) + "\n";
      break;
    case Section::topology:
      out = topology_csv_header() + "\n";
      if (r.topology) {
        for (const auto& d : r.topology->designs) out += topology_csv_row(d, r.topology->designs.front()) + "\n";
      }
      break;
    case Section::flowsim:
      out = flowsim_csv_header() + "\n";
      if (r.flowsim) {
        for (const auto& run : r.flowsim->runs) append_flowsim_csv(out, run);
      }
      break;
    case Section::inference:
      out = "model,tokens,total_s,tokens_per_second,published_s,relative_error\n";
      for (const auto& t : r.inference) {
        for (const auto& row : t.rows) {
          out += fmt::format("{},{},{},{},{},{}\n", t.model, g17(row.tokens), g17(row.estimate.total_time),
                             g17(row.estimate.tokens_per_second),
                             row.published_seconds ? g17(*row.published_seconds) : "",
                             row.published_seconds ? g17(row.relative_error) : "");
        }
      }
      break;
    case Section::scaling:
      out = "law,coefficient,exponent,compute_flop,params,tokens,training_time_s\n";
      if (r.scaling) {
        const auto& s = *r.scaling;
        if (s.compute) {
          out += fmt::format("{},{},{},{},{},{},{}\n", s.law.name, g17(s.law.coefficient), g17(s.law.exponent),
                             g17(*s.compute), g17(s.allocation->params), g17(s.allocation->tokens),
                             g17(*s.training_time));
        }
        if (s.target_params) {
          out += fmt::format("{},{},{},{},{},{},{}\n", s.law.name, g17(s.law.coefficient), g17(s.law.exponent),
                             g17(*s.target_compute), g17(*s.target_params), g17(*s.target_tokens),
                             g17(*s.target_training_time));
        }
      }
      break;
  }
  return out;
}

std::string render_text(const Report& r) {
  std::string out = fmt::format("scenario {} (schema {}, dcplan {}, hash {:016x})\n", r.scenario_name,
                                r.schema_version, r.tool_version, r.scenario_hash);
  if (r.facility) {
    const auto& f = *r.facility;
    out += "\nFacility\n";
    out += fmt::format("  racks {:>12}   GPUs {:>12}   dense {:.3g} FLOP/s\n", f.provisioning.rack_count,
                       f.provisioning.gpu_count, f.provisioning.total_dense_flops);
    out += fmt::format("  IT compute {:.3f} GW   IT total {:.3f} GW   facility {:.3f}-{:.3f} GW\n",
                       f.provisioning.it_compute_power / 1e9, f.power.it_power / 1e9,
                       f.power.facility_power_min / 1e9, f.power.facility_power_max / 1e9);
    out += fmt::format("  heat reuse {} households   free-air area {:.4g} m^2   water {:.3g}-{:.3g} L/h\n",
                       f.heat_reuse_households, f.free_air_area_m2, f.adiabatic_water_lph.first,
                       f.adiabatic_water_lph.second);
    for (const auto& n : f.notes) out += fmt::format("  note: {}\n", n);
  }
  if (!r.models.empty()) {
    out += "\nModels\n";
    out += fmt::format("  {:<12} {:>10} {:>10} {:>4} {:>4} {:>9} {:>9} {:>10}\n", "model", "params", "active", "t",
                       "lpr", "replicas", "per-DC", "GB/device");
    for (const auto& m : r.models) {
      out += fmt::format("  {:<12} {:>10.4g} {:>10.4g} {:>4} {:>4} {:>9} {:>9} {:>10.2f}\n", name_of(m.model),
                         static_cast<double>(m.total_params), static_cast<double>(m.active_params), m.plan.t,
                         m.plan.layers_per_rack, m.plan.dp_replicas_total, m.plan.dp_replicas_per_dc,
                         units::to_gb(m.plan.per_device_bytes()));
    }
    out += "\nPer-layer step time (ms)\n";
    out += fmt::format("  {:<12} {:>8} {:>8} {:>7} {:>7} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n", "model", "fwd",
                       "bwd", "tp", "pp", "dp1", "dp2", "dp3", "dp4", "dp5", "exposed", "fraction");
    for (const auto& m : r.models) {
      const auto& s = m.step;
      const auto& st = s.dp_schedule.stages;
      out += fmt::format(
          "  {:<12} {:>8.2f} {:>8.2f} {:>7.2f} {:>7.2f} {:>8.2f} {:>8.2f} {:>8.2f} {:>8.2f} {:>8.2f} {:>8.2f} "
          "{:>7.1f}%\n",
          name_of(m.model), to_ms(s.fwd_per_layer), to_ms(s.bwd_per_layer), to_ms(s.tp_time_per_pass),
          to_ms(s.pp_time_per_pass), to_ms(st[0].time), to_ms(st[1].time), to_ms(st[2].time), to_ms(st[3].time),
          to_ms(st[4].time), to_ms(s.exposed.total), 100.0 * s.exposed_fraction);
    }
    for (const auto& m : r.models) {
      const auto& st = m.step.dp_schedule.stages;
      const auto longest = std::max_element(st.begin(), st.end(), [](auto& a, auto& b) { return a.time < b.time; });
      if (longest->time <= 0.0) continue;
      const auto idx = static_cast<std::size_t>(longest - st.begin());
      out += fmt::format("  {}: longest DP stage {} takes {:.1f} ms, of which {:.1f} ms are masked\n",
                         name_of(m.model), idx + 1, to_ms(longest->time),
                         to_ms(longest->time - m.step.exposed.dp_stage[idx]));
    }
  }
  if (!r.sweep.empty()) {
    out += "\nSweep\n";
    out += fmt::format("  {:<10} {:>14} {:<12} {:>10} {:>9}\n", "axis", "value (bps)", "model", "exposed ms",
                       "fraction");
    for (const auto& row : r.sweep) {
      out += fmt::format("  {:<10} {:>14.4g} {:<12} {:>10.2f} {:>8.1f}%\n", to_string(row.axis), row.axis_value_bps,
                         row.report.model, to_ms(row.report.exposed.total), 100.0 * row.report.exposed_fraction);
    }
  }
  if (r.topology) {
    const auto& base = r.topology->designs.front();
    out += "\nTopology\n";
    out += fmt::format("  {:<12} {:>5} {:>6} {:>5} {:>6} {:>8} {:>10} {:>12} {:>8} {:>8}\n", "design", "rails",
                       "planes", "tiers", "radix", "chips", "cables", "xcvr USD", "chips-%", "links-%");
    for (const auto& d : r.topology->designs) {
      out += fmt::format("  {:<12} {:>5} {:>6} {:>5} {:>6} {:>8} {:>10} {:>12.4g} {:>8.1f} {:>8.1f}\n",
                         to_string(d.kind), d.rails, d.planes, d.tiers, d.radix, d.chips, d.switch_cables,
                         d.bom.switch_link_transceivers, 100.0 * chip_savings(d, base),
                         base.switch_cables > 0 ? 100.0 * link_savings(d, base) : 0.0);
    }
  }
  if (r.flowsim) {
    const auto& f = r.flowsim->fabric;
    out += fmt::format("\nFlow simulation ({} hosts, {} tiers, radix {}, {:g} bps links)\n", f.hosts, f.tiers,
                       f.radix, f.link_speed_bps);
    out += fmt::format("  {:<12} {:>6} {:>9} {:>8} {:>8} {:>8} {:>8}\n", "policy", "load", "flows", "mean", "p50",
                       "p99", "max");
    for (const auto& run : r.flowsim->runs) {
      const auto& s = run.stats;
      out += fmt::format("  {:<12} {:>6.3f} {:>9} {:>8.3f} {:>8.3f} {:>8.3f} {:>8.3f}\n", to_string(run.policy),
                         run.pattern.participation, s.flows, s.mean_inflation(), s.p50_inflation(), s.p99_inflation(),
                         s.max_inflation());
    }
    out += "  (columns after flows are FCT / optimal FCT)\n";
  }
  for (const auto& t : r.inference) {
    out += fmt::format("\nInference {}: total = {:.4g} T + {:.4g} T^2 s\n", t.model, t.fit.alpha, t.fit.beta);
    for (const auto& row : t.rows) {
      out += fmt::format("  {:>8g} tokens {:>12.1f} s {:>9.3f} tok/s", row.tokens, row.estimate.total_time,
                         row.estimate.tokens_per_second);
      if (row.published_seconds) {
        out += fmt::format("   published {:g} s ({:+.1f}%)", *row.published_seconds, 100.0 * row.relative_error);
      }
      out += "\n";
    }
  }
  if (r.scaling) {
    const auto& s = *r.scaling;
    out += fmt::format("\nScaling law {}: N = {:.5g} C^{:g}\n", s.law.name, s.law.coefficient, s.law.exponent);
    if (s.compute) {
      out += fmt::format("  C = {:.4g} FLOP -> N = {:.4g}, D = {:.4g}, {:.4g} s at {:.3g} FLOP/s\n", *s.compute,
                         s.allocation->params, s.allocation->tokens, *s.training_time,
                         s.aggregate_rate * s.utilization);
    }
    if (s.target_params) {
      out += fmt::format("  N = {:.4g} needs C = {:.4g} FLOP, D = {:.4g}, {:.4g} s at {:.3g} FLOP/s\n",
                         *s.target_params, *s.target_compute, *s.target_tokens, *s.target_training_time,
                         s.aggregate_rate * s.utilization);
    }
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += fmt::format(".tmp.{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(fmt::format("write failed for '{}'", path.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(fmt::format("cannot write '{}': {}", path.string(), ec.message()));
  }
}

OutputFormat output_format_from_string(std::string_view s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw ConfigError(fmt::format("unknown output format '{}' (expected json or csv)", s));
}

void emit(const Report& report, OutputFormat format, const std::filesystem::path& path, Section csv_section) {
  const std::string content = format == OutputFormat::json ? to_json(report).dump(2) + "\n" : to_csv(report, csv_section);
  write_atomic(path, content);
}

}  // namespace dcplan
