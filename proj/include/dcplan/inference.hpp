#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dcplan {

/// total_time(T) = alpha * T + beta * T^2 for T generated tokens.
struct LatencyModel {
  double alpha = 0.0;  // s/token
  double beta = 0.0;   // s/token^2
};

struct LatencySample {
  double tokens = 0.0;
  double seconds = 0.0;
};

struct InferenceEstimate {
  double tokens = 0.0;
  double total_time = 0.0;
  double tokens_per_second = 0.0;
};

/// Least-squares fit of alpha*T + beta*T^2 through the origin. A negative
/// alpha is clamped to 0 and beta refit alone. Throws std::invalid_argument
/// on fewer than two samples or a single distinct T.
LatencyModel fit_latency(const std::vector<LatencySample>& table);

InferenceEstimate generation_time(const LatencyModel& model, double tokens);

struct LatencyTable {
  std::string model;
  double racks = 0.0;  // deployment size as published; metadata only
  std::vector<LatencySample> rows;
};

/// Published generation latencies for the 100T and 50T models.
const LatencyTable& latency_table_100t();
const LatencyTable& latency_table_50t();

/// Rows used for calibration: the two shortest generations. Longer rows
/// depart from a pure quadratic and serve as held-out checks.
std::vector<LatencySample> calibration_rows(const LatencyTable& table);

}  // namespace dcplan
