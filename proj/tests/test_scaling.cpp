#include <doctest.h>

#include <cmath>
#include <random>

#include "dcplan/errors.hpp"
#include "dcplan/scaling.hpp"

using namespace dcplan;
using doctest::Approx;

TEST_CASE("approach-2 law through the 70B anchor") {
  const auto law = chinchilla_approach2();
  CHECK(law.exponent == 0.49);
  CHECK(law.coefficient == Approx(0.15780).epsilon(1e-4));
  CHECK(optimal_allocation(5.88e23, law).params == Approx(7e10).epsilon(1e-12));
}

TEST_CASE("evaluating the law at full cluster scale") {
  const auto law = chinchilla_approach2();
  // Oracle: log-space inversion, N = exp(ln G + a ln C).
  const double log_g = std::log(7e10) - 0.49 * std::log(5.88e23);
  const double n_oracle = std::exp(log_g + 0.49 * std::log(1.86e30));
  const auto a = optimal_allocation(1.86e30, law);
  CHECK(a.params == Approx(n_oracle).epsilon(1e-12));
  CHECK(a.params == Approx(1.0719e14).epsilon(1e-3));

  const double c_oracle = std::exp((std::log(103.8e12) - log_g) / 0.49);
  CHECK(compute_for_params(103.8e12, law) == Approx(c_oracle).epsilon(1e-12));
  CHECK(compute_for_params(103.8e12, law) == Approx(1.7418e30).epsilon(1e-3));
  CHECK(optimal_allocation(compute_for_params(103.8e12, law), law).params == Approx(103.8e12).epsilon(1e-12));
}

TEST_CASE("closed-form allocations") {
  const ScalingLaw half{"half", 1.0, 0.5};
  const auto a = optimal_allocation(36.0, half);
  CHECK(a.params == Approx(6.0));
  CHECK(a.tokens == Approx(1.0));
  CHECK(optimal_allocation(72.0, half).params == Approx(6.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(optimal_allocation(0.0, half), std::invalid_argument);
  CHECK_THROWS_AS(optimal_allocation(1.0, ScalingLaw{"bad", 1.0, 1.2}), std::invalid_argument);
}

TEST_CASE("6ND = C and monotonicity over random laws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> exp_dist(0.2, 0.8), log_c(18.0, 32.0), log_g(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const ScalingLaw law{"r", std::pow(10.0, log_g(rng)), exp_dist(rng)};
    const double c = std::pow(10.0, log_c(rng));
    const auto a = optimal_allocation(c, law);
    CHECK(std::abs(6.0 * a.params * a.tokens - c) / c < 1e-12);
    const auto b = optimal_allocation(c * 1.5, law);
    CHECK(b.params > a.params);
    if (law.exponent < 1.0) CHECK(b.tokens > a.tokens);
  }
}

TEST_CASE("training time") {
  const double c = 1.86e30;
  const double n = 1.038e14;
  const double d = c / (6.0 * n);
  CHECK(training_time(n, d, {1.68e22, 1.0, 0.0}) == Approx(1.107e8).epsilon(0.001));
  CHECK(training_time(n, d, {1.68e22, 0.5, 0.0}) == Approx(2.0 * training_time(n, d, {1.68e22, 1.0, 0.0})));
  CHECK(training_time(1.0, 1.0, {6.0, 1.0, 0.0}) == Approx(1.0));
  CHECK_THROWS_AS(training_time(1.0, 1.0, {6.0, 0.0, 0.0}), std::invalid_argument);
  CHECK(TrainingBudget{2.0, 0.5, 10.0}.compute() == 10.0);
}

TEST_CASE("laws declared in config") {
  auto doc = ConfigDocument::parse(
      "[law.kaplan]\ncoefficient = 1.3e-3\nexponent = 0.73\n"
      "[law.chinchilla-approach2]\nanchor_params = 7e10\nanchor_compute = 5.88e23\nexponent = 0.5\n");
  const auto laws = laws_from_config(doc);
  REQUIRE(laws.size() == 2);
  CHECK(laws[0].name == "kaplan");
  CHECK(laws[0].coefficient == 1.3e-3);
  CHECK(laws[1].name == "chinchilla-approach2");
  CHECK(laws[1].exponent == 0.5);
  CHECK_NOTHROW(doc.reject_unconsumed());

  auto missing = ConfigDocument::parse("[law.x]\ncoefficient = 1\n");
  CHECK_THROWS_AS(laws_from_config(missing), ConfigError);
  auto bad = ConfigDocument::parse("[law.x]\ncoefficient = -1\nexponent = 0.5\n");
  CHECK_THROWS_AS(laws_from_config(bad), ConfigError);
}
