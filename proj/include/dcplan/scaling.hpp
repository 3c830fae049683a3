#pragma once

#include <string>
#include <vector>

#include "dcplan/config.hpp"

namespace dcplan {

/// Compute-optimal power law N_opt = coefficient * C^exponent, with tokens
/// from the C = 6 N D FLOP convention.
struct ScalingLaw {
  std::string name;
  double coefficient = 0.0;
  double exponent = 0.0;

  void validate() const;
};

struct Allocation {
  double params = 0.0;
  double tokens = 0.0;
};

struct TrainingBudget {
  double aggregate_rate = 0.0;  // FLOP/s
  double utilization = 1.0;
  double duration = 0.0;        // s

  double compute() const { return aggregate_rate * utilization * duration; }
};

/// Fit the coefficient so the law passes through (anchor_compute, anchor_params).
ScalingLaw fit_through_anchor(std::string name, double anchor_params, double anchor_compute, double exponent);

/// Parameter exponent 0.49 through the 70B / 5.88e23 FLOP compute-optimal point.
ScalingLaw chinchilla_approach2();

Allocation optimal_allocation(double compute, const ScalingLaw& law);

/// Compute at which the law recommends `params` parameters.
double compute_for_params(double params, const ScalingLaw& law);

double training_time(double params, double tokens, const TrainingBudget& budget);

/// Laws declared as `[law.<name>]` sections with either coefficient/exponent
/// or anchor_params/anchor_compute/exponent. The built-in law is always present.
std::vector<ScalingLaw> laws_from_config(ConfigDocument& doc);

}  // namespace dcplan
