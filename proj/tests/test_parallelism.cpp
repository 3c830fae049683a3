#include <doctest.h>

#include <random>
#include <string>

#include "dcplan/errors.hpp"
#include "dcplan/parallelism.hpp"

using namespace dcplan;
using doctest::Approx;

namespace {

const HardwareCatalog kHw = HardwareCatalog::gb200_nvl72();
const Provisioning kProv = provision(100e9, 0.7, kHw.rack);

}  // namespace

TEST_CASE("dense 100T plan") {
  const auto p = plan(dense_100t(), PrecisionPolicy{}, kHw, kProv);
  CHECK(p.t == 18);
  CHECK(p.layers_per_rack == 4);
  CHECK(p.pp_degree == 134);
  CHECK(p.racks_per_replica == 33.5);
  CHECK(p.dp_replicas_total == 696);
  CHECK(p.dp_replicas_per_dc == 348);
  CHECK(p.dp_peers_per_dc() == 87);
  CHECK(p.per_device_state_bytes == Approx(159.05e9).epsilon(0.001));
  CHECK(p.per_device_bytes() == Approx(160e9).epsilon(0.03));
  CHECK(p.per_device_bytes() <= kHw.accelerator.memory_bytes);
}

TEST_CASE("MoE 8x17T plan") {
  const auto p = plan(moe_8x17t(), PrecisionPolicy{}, kHw, kProv);
  CHECK(p.t == 18);
  CHECK(p.racks_per_replica == 29.5);
  CHECK(p.dp_replicas_total == 790);
  CHECK(std::abs(p.dp_replicas_total - 788) <= 4);
  CHECK(p.dp_replicas_per_dc == 395);
  CHECK(p.dp_peers_per_dc() == 98);
  CHECK(p.per_device_state_bytes == Approx(181e9).epsilon(0.005));
}

TEST_CASE("search picks t = 1 when a layer fits on one device") {
  ModelConfig toy = DenseTransformerConfig{"toy", {.layers = 8, .hidden = 1024, .heads = 8, .vocab = 1000, .seq_len = 128}};
  const auto p = plan(toy, PrecisionPolicy{}, kHw, kProv);
  CHECK(p.t == 1);
  CHECK(p.layers_per_rack == 72);
}

TEST_CASE("non-divisor scan") {
  PlannerOptions o;
  o.divisors_only = false;
  const auto p = plan(dense_100t(), PrecisionPolicy{}, kHw, kProv, o);
  CHECK(p.t == 16);
  CHECK(p.layers_per_rack == 4);
}

TEST_CASE("forced tensor degree") {
  PlannerOptions o;
  o.forced_t = 24;
  CHECK(plan(dense_100t(), PrecisionPolicy{}, kHw, kProv, o).t == 24);
  o.forced_t = 7;
  CHECK_THROWS_AS(plan(dense_100t(), PrecisionPolicy{}, kHw, kProv, o), InfeasibleError);
  o.forced_t = 9;
  CHECK_THROWS_AS(plan(dense_100t(), PrecisionPolicy{}, kHw, kProv, o), InfeasibleError);
}

TEST_CASE("infeasible plans name the deficit") {
  auto small = kHw;
  small.accelerator.memory_bytes = 20e9;
  try {
    plan(dense_100t(), PrecisionPolicy{}, small, kProv);
    FAIL("expected an error");
  } catch (const InfeasibleError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("does not fit") != std::string::npos);
    CHECK(msg.find("GB over") != std::string::npos);
  }
  Provisioning few = kProv;
  few.rack_count = 30;
  CHECK_THROWS_AS(plan(dense_100t(), PrecisionPolicy{}, kHw, few), InfeasibleError);
}

TEST_CASE("feasibility, minimality and replica bounds over random models") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> heads_dist(1, 64), layers_dist(1, 200);
  std::uniform_real_distribution<double> mem_dist(20e9, 400e9);
  int feasible = 0;
  for (int i = 0; i < 300; ++i) {
    const std::int64_t heads = heads_dist(rng);
    const std::int64_t hidden = heads * 1024 * std::uniform_int_distribution<int>(1, 4)(rng);
    ModelConfig cfg = DenseTransformerConfig{
        "r", {.layers = layers_dist(rng), .hidden = hidden, .heads = heads, .vocab = 50000, .seq_len = 8192}};
    auto hw = kHw;
    hw.accelerator.memory_bytes = mem_dist(rng);
    const PrecisionPolicy policy;
    auto need = [&](int t) { return per_device_state_bytes(cfg, policy, t) + activation_bytes_per_device(cfg, t, policy); };
    try {
      const auto p = plan(cfg, policy, hw, kProv);
      ++feasible;
      CHECK(p.t * p.layers_per_rack == hw.rack.gpus_per_rack);
      CHECK(p.per_device_bytes() <= hw.accelerator.memory_bytes);
      for (int t = 1; t < p.t; ++t) {
        if (hw.rack.gpus_per_rack % t == 0) CHECK(need(t) > hw.accelerator.memory_bytes);
      }
      CHECK(static_cast<double>(p.dp_replicas_total) * p.racks_per_replica <= static_cast<double>(kProv.rack_count));
    } catch (const InfeasibleError&) {
      CHECK(need(72) > hw.accelerator.memory_bytes);
    }
  }
  CHECK(feasible > 100);
}
