#include "dcplan/scaling.hpp"

#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "dcplan/errors.hpp"

namespace dcplan {

void ScalingLaw::validate() const {
  if (!(coefficient > 0.0)) throw std::invalid_argument("scaling-law coefficient must be > 0");
  if (!(exponent > 0.0 && exponent < 1.0)) throw std::invalid_argument("scaling-law exponent must be in (0, 1)");
}

ScalingLaw fit_through_anchor(std::string name, double anchor_params, double anchor_compute, double exponent) {
  if (!(anchor_params > 0.0 && anchor_compute > 0.0)) throw std::invalid_argument("anchor must be positive");
  ScalingLaw law{std::move(name), anchor_params / std::pow(anchor_compute, exponent), exponent};
  law.validate();
  return law;
}

ScalingLaw chinchilla_approach2() { return fit_through_anchor("chinchilla-approach2", 7e10, 5.88e23, 0.49); }

Allocation optimal_allocation(double compute, const ScalingLaw& law) {
  if (!(compute > 0.0)) throw std::invalid_argument("compute must be > 0");
  law.validate();
  Allocation a;
  a.params = law.coefficient * std::pow(compute, law.exponent);
  a.tokens = compute / (6.0 * a.params);
  return a;
}

double compute_for_params(double params, const ScalingLaw& law) {
  if (!(params > 0.0)) throw std::invalid_argument("params must be > 0");
  law.validate();
  return std::pow(params / law.coefficient, 1.0 / law.exponent);
}

double training_time(double params, double tokens, const TrainingBudget& budget) {
  if (!(params > 0.0 && tokens > 0.0 && budget.aggregate_rate > 0.0)) {
    throw std::invalid_argument("params, tokens and rate must be > 0");
  }
  if (!(budget.utilization > 0.0 && budget.utilization <= 1.0)) {
    throw std::invalid_argument("utilization must be in (0, 1]");
  }
  return 6.0 * params * tokens / (budget.aggregate_rate * budget.utilization);
}

std::vector<ScalingLaw> laws_from_config(ConfigDocument& doc) {
  std::vector<ScalingLaw> laws{chinchilla_approach2()};
  for (const auto& section : doc.sections()) {
    if (section.rfind("law.", 0) != 0) continue;
    auto name = section.substr(4);
    auto exponent = doc.get_double(section, "exponent");
    if (!exponent) throw ConfigError(fmt::format("missing exponent in [{}]", section), 0, "exponent");
    ScalingLaw law;
    try {
      if (auto g = doc.get_double(section, "coefficient")) {
        law = ScalingLaw{name, *g, *exponent};
        law.validate();
      } else {
        auto n = doc.get_double(section, "anchor_params");
        auto c = doc.get_double(section, "anchor_compute");
        if (!n || !c) {
          throw ConfigError(fmt::format("[{}] needs coefficient or anchor_params + anchor_compute", section));
        }
        law = fit_through_anchor(name, *n, *c, *exponent);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), 0, section);
    }
    std::erase_if(laws, [&](const ScalingLaw& l) { return l.name == law.name; });
    laws.push_back(std::move(law));
  }
  return laws;
}

}  // namespace dcplan
