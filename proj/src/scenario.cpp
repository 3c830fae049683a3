#include "dcplan/scenario.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "dcplan/errors.hpp"
#include "dcplan/units.hpp"

namespace dcplan {

namespace {

constexpr std::array kKnownSections{"",         "facility", "hardware", "precision", "model",    "parallelism",
                                    "network",  "sweep",    "topology", "flowsim",   "inference", "scaling"};

int key_line(const ConfigDocument& doc, std::string_view section, std::string_view key) {
  for (const auto& e : doc.entries()) {
    if (e.section == section && e.key == key) return e.line;
  }
  return doc.section_line(section);
}

class Reader {
 public:
  explicit Reader(ConfigDocument& doc) : doc_(doc) {}

  void number(std::string_view section, std::string_view key, double& out, double min, bool min_exclusive,
              double max = std::numeric_limits<double>::infinity()) {
    auto v = doc_.get_double(section, key);
    if (!v) return;
    const bool low = min_exclusive ? !(*v > min) : !(*v >= min);
    if (low || *v > max) {
      std::string range = fmt::format("{} {:g}", min_exclusive ? ">" : ">=", min);
      if (max != std::numeric_limits<double>::infinity()) range += fmt::format(" and <= {:g}", max);
      fail(section, key, fmt::format("value {:g} out of range (must be {})", *v, range));
    }
    out = *v;
  }

  template <typename Int>
  void integer(std::string_view section, std::string_view key, Int& out, long long min,
               long long max = std::numeric_limits<int>::max()) {
    auto v = doc_.get_int(section, key);
    if (!v) return;
    if (*v < min || *v > max) fail(section, key, fmt::format("value {} out of range [{}, {}]", *v, min, max));
    out = static_cast<Int>(*v);
  }

  std::vector<double> positive_list(std::string_view section, std::string_view key) {
    auto v = doc_.get_double_list(section, key);
    if (!v) return {};
    if (v->empty()) fail(section, key, "list must not be empty");
    for (double x : *v) {
      if (!(x > 0.0)) fail(section, key, fmt::format("value {:g} must be > 0", x));
    }
    return *v;
  }

  [[noreturn]] void fail(std::string_view section, std::string_view key, const std::string& message) const {
    throw ConfigError(message, key_line(doc_, section, key), std::string(key));
  }

  ConfigDocument& doc() { return doc_; }

 private:
  ConfigDocument& doc_;
};

void check_sections(const ConfigDocument& doc) {
  for (const auto& s : doc.sections()) {
    const bool known = std::find(kKnownSections.begin(), kKnownSections.end(), s) != kKnownSections.end();
    const bool prefixed = (s.rfind("model.", 0) == 0 && s.size() > 6) || (s.rfind("law.", 0) == 0 && s.size() > 4);
    if (!known && !prefixed) throw ConfigError(fmt::format("unknown section [{}]", s), doc.section_line(s));
  }
}

void read_facility(Reader& r, FacilityInputs& f) {
  constexpr const char* s = "facility";
  r.number(s, "budget_usd", f.budget, 0.0, true);
  r.number(s, "compute_fraction", f.compute_fraction, 0.0, true, 1.0);
  r.number(s, "overhead_fraction", f.overhead_fraction, 0.0, false);
  r.number(s, "pue_min", f.pue_min, 1.0, false);
  r.number(s, "pue_max", f.pue_max, 1.0, false);
  if (f.pue_max < f.pue_min) r.fail(s, "pue_max", "pue_max must be >= pue_min");
  r.number(s, "annual_energy_wh", f.annual_energy_wh, 0.0, false);
  r.number(s, "erf", f.erf, 0.0, false, 1.0);
  r.number(s, "household_wh", f.household_wh, 0.0, true);
  r.number(s, "cooling_power_w", f.cooling_power_w, 0.0, true);
  r.number(s, "dissipation_w_per_m2", f.dissipation_w_per_m2, 0.0, true);
}

void read_models(Reader& r, Scenario& sc) {
  auto& doc = r.doc();
  std::vector<ModelConfig> custom;
  for (const auto& s : doc.sections()) {
    if (s.rfind("model.", 0) == 0) custom.push_back(model_from_config(doc, s, s.substr(6)));
  }
  r.number("model", "recompute_overhead", sc.recompute_overhead, 0.0, false);

  const auto names = doc.get_list("model", "models").value_or(std::vector<std::string>{"dense-100t", "moe-8x17t"});
  if (names.empty()) r.fail("model", "models", "at least one model is required");
  for (const auto& name : names) {
    auto it = std::find_if(custom.begin(), custom.end(), [&](const ModelConfig& m) { return name_of(m) == name; });
    if (it != custom.end()) {
      sc.models.push_back(*it);
      continue;
    }
    try {
      sc.models.push_back(model_preset(name));
    } catch (const ConfigError&) {
      r.fail("model", "models", fmt::format("'{}' is neither a preset nor a [model.{}] section", name, name));
    }
  }
}

void read_network(Reader& r, Scenario& sc) {
  constexpr const char* s = "network";
  double up = units::bytes_per_s_to_bps(sc.hardware.accelerator.scale_up_bw);
  double out = units::bytes_per_s_to_bps(sc.hardware.accelerator.scale_out_bw);
  r.number(s, "scale_up_bps", up, 0.0, true);
  r.number(s, "scale_out_bps", out, 0.0, true);
  sc.hardware.accelerator.scale_up_bw = units::bps_to_bytes_per_s(up);
  sc.hardware.accelerator.scale_out_bw = units::bps_to_bytes_per_s(out);
  r.number(s, "wan_bps", sc.wan.per_gpu_capacity_bps, 0.0, true);
  r.number(s, "wan_rtt_s", sc.wan.rtt, 0.0, false);
  r.number(s, "wan_loss_penalty_rtts", sc.wan.loss_penalty_rtts, 0.0, false);
}

void read_sweeps(Reader& r, Scenario& sc) {
  constexpr std::array<std::pair<SweepAxis, const char*>, 3> keys{
      {{SweepAxis::scale_up, "scale_up_bps"}, {SweepAxis::scale_out, "scale_out_bps"}, {SweepAxis::wan, "wan_bps"}}};
  for (const auto& [axis, key] : keys) {
    auto values = r.positive_list("sweep", key);
    if (!values.empty()) sc.sweeps.push_back({axis, std::move(values)});
  }
}

void read_topology(Reader& r, TopologyInputs& t) {
  constexpr const char* s = "topology";
  r.integer(s, "hosts", t.hosts, 1, std::numeric_limits<std::int64_t>::max());
  r.integer(s, "radix", t.radix, 2);
  if (t.radix % 2 != 0) r.fail(s, "radix", "radix must be even");
  r.integer(s, "planes", t.planes, 1, 8);
  r.integer(s, "rails", t.rails, 1);
  r.integer(s, "combined_rails", t.combined_rails, 1);
  r.integer(s, "combined_planes", t.combined_planes, 1, 8);
  for (const auto* key : {"planes", "combined_planes"}) {
    const int p = std::string_view(key) == "planes" ? t.planes : t.combined_planes;
    if (p != 1 && p != 2 && p != 4 && p != 8) r.fail(s, key, "plane count must be 1, 2, 4 or 8");
  }
  r.number(s, "host_link_bps", t.host_link_bps, 0.0, true);
  r.number(s, "oversubscription", t.options.oversubscription, 1.0, false);
  r.integer(s, "max_tiers", t.options.max_tiers, 1, 6);
  r.number(s, "transceiver_usd", t.options.prices.transceiver_cost, 0.0, false);
  r.number(s, "chip_usd", t.options.prices.chip_cost, 0.0, false);
  r.number(s, "budget_usd", t.options.prices.budget_cap, 0.0, false);
}

void read_flowsim(Reader& r, FlowSimInputs& f) {
  constexpr const char* s = "flowsim";
  r.integer(s, "hosts", f.hosts, 2, std::numeric_limits<std::int64_t>::max());
  r.integer(s, "tiers", f.tiers, 1, 3);
  r.integer(s, "radix", f.radix, 2);
  if (f.radix % 2 != 0) r.fail(s, "radix", "radix must be even");
  r.number(s, "link_bps", f.link_speed_bps, 0.0, true);
  r.number(s, "flow_bytes", f.flow_bytes, 0.0, true);
  if (auto p = r.positive_list(s, "participation"); !p.empty()) {
    for (double x : p) {
      if (x > 1.0) r.fail(s, "participation", fmt::format("participation {:g} must be in (0, 1]", x));
    }
    f.participation = std::move(p);
  }
  if (auto names = r.doc().get_list(s, "policies")) {
    if (names->empty()) r.fail(s, "policies", "list must not be empty");
    f.policies.clear();
    for (const auto& n : *names) {
      try {
        f.policies.push_back(routing_policy_from_string(n));
      } catch (const ConfigError& e) {
        r.fail(s, "policies", e.what());
      }
    }
  }
  r.integer(s, "trials", f.options.trials, 1);
  r.integer(s, "seed", f.options.seed, 0, std::numeric_limits<long long>::max());
  r.integer(s, "threads", f.options.threads, 0, 1024);
}

void read_inference(Reader& r, InferenceInputs& in) {
  constexpr const char* s = "inference";
  if (auto t = r.positive_list(s, "tokens"); !t.empty()) {
    for (double x : t) {
      if (x < 1.0) r.fail(s, "tokens", "token counts must be >= 1");
    }
    in.tokens = std::move(t);
  }
  if (auto tables = r.doc().get_list(s, "tables")) {
    for (const auto& name : *tables) {
      if (name != "100t" && name != "50t") r.fail(s, "tables", fmt::format("unknown latency table '{}'", name));
    }
    in.tables = *tables;
  }
}

void read_scaling(Reader& r, ScalingInputs& sc) {
  constexpr const char* s = "scaling";
  sc.laws = laws_from_config(r.doc());
  if (auto law = r.doc().get_string(s, "law")) sc.active_law = *law;
  if (std::none_of(sc.laws.begin(), sc.laws.end(), [&](const ScalingLaw& l) { return l.name == sc.active_law; })) {
    r.fail(s, "law", fmt::format("no scaling law named '{}'", sc.active_law));
  }
  auto optional_positive = [&](const char* key, std::optional<double>& out) {
    if (auto x = r.doc().get_double(s, key)) {
      if (!(*x > 0.0)) r.fail(s, key, "value must be > 0");
      out = *x;
    }
  };
  optional_positive("compute_flop", sc.compute);
  optional_positive("target_params", sc.target_params);
  optional_positive("duration_s", sc.duration);
  r.number(s, "utilization", sc.utilization, 0.0, true, 1.0);
}

}  // namespace

const ScalingLaw& ScalingInputs::law() const {
  auto it = std::find_if(laws.begin(), laws.end(), [&](const ScalingLaw& l) { return l.name == active_law; });
  if (it == laws.end()) throw ConfigError(fmt::format("no scaling law named '{}'", active_law), 0, "law");
  return *it;
}

Scenario default_scenario() { return parse_scenario("schema_version = 1\n"); }

Scenario parse_scenario(std::string_view text) {
  auto doc = ConfigDocument::parse(text);
  check_sections(doc);
  Reader r(doc);

  Scenario sc;
  sc.source = std::string(text);
  const auto version = doc.get_int("", "schema_version");
  if (!version) throw ConfigError("missing schema_version", 1, "schema_version");
  if (*version != kScenarioSchemaVersion) {
    r.fail("", "schema_version",
           fmt::format("unsupported schema_version {} (this build reads {})", *version, kScenarioSchemaVersion));
  }
  sc.schema_version = static_cast<int>(*version);
  if (auto name = doc.get_string("", "name")) sc.name = *name;

  read_facility(r, sc.facility);
  apply_hardware_config(doc, "hardware", sc.hardware);
  apply_precision_config(doc, "precision", sc.precision);
  read_models(r, sc);
  r.integer("parallelism", "data_centers", sc.planner.data_centers, 1);
  if (auto v = doc.get_bool("parallelism", "divisors_only")) sc.planner.divisors_only = *v;
  r.integer("parallelism", "tensor_degree", sc.planner.forced_t, 0, sc.hardware.rack.gpus_per_rack);
  read_network(r, sc);
  read_sweeps(r, sc);
  read_topology(r, sc.topology);
  read_flowsim(r, sc.flowsim);
  read_inference(r, sc.inference);
  read_scaling(r, sc.scaling);

  doc.reject_unconsumed();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open scenario file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace dcplan
