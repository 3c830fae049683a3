#include "dcplan/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcplan {

LatencyModel fit_latency(const std::vector<LatencySample>& table) {
  if (table.size() < 2) throw std::invalid_argument("latency fit needs at least two samples");
  double s2 = 0, s3 = 0, s4 = 0, sy1 = 0, sy2 = 0;
  for (const auto& r : table) {
    if (!(r.tokens > 0.0) || !std::isfinite(r.seconds)) throw std::invalid_argument("latency samples need T > 0");
    const double t = r.tokens;
    s2 += t * t;
    s3 += t * t * t;
    s4 += t * t * t * t;
    sy1 += t * r.seconds;
    sy2 += t * t * r.seconds;
  }
  const bool degenerate = std::all_of(table.begin(), table.end(),
                                      [&](const LatencySample& r) { return r.tokens == table.front().tokens; });
  if (degenerate) throw std::invalid_argument("latency fit needs at least two distinct token counts");

  // Normal equations of min sum (alpha T + beta T^2 - y)^2.
  const double det = s2 * s4 - s3 * s3;
  LatencyModel m;
  m.alpha = (sy1 * s4 - sy2 * s3) / det;
  m.beta = (s2 * sy2 - s3 * sy1) / det;
  if (m.alpha < 0.0) {
    m.alpha = 0.0;
    m.beta = sy2 / s4;
  }
  m.beta = std::max(m.beta, 0.0);
  return m;
}

InferenceEstimate generation_time(const LatencyModel& model, double tokens) {
  if (!(tokens >= 1.0)) throw std::invalid_argument("token count must be >= 1");
  InferenceEstimate e;
  e.tokens = tokens;
  e.total_time = model.alpha * tokens + model.beta * tokens * tokens;
  e.tokens_per_second = e.total_time > 0.0 ? tokens / e.total_time : 0.0;
  return e;
}

const LatencyTable& latency_table_100t() {
  static const LatencyTable t{"100T", 224.0, {{512, 18}, {1024, 72}, {2048, 289}, {16000, 18664}, {32000, 71838}}};
  return t;
}

const LatencyTable& latency_table_50t() {
  static const LatencyTable t{"50T", 0.0, {{512, 9.58}, {1024, 38}, {2048, 153}, {16000, 9504}, {32000, 38526}}};
  return t;
}

std::vector<LatencySample> calibration_rows(const LatencyTable& table) {
  auto rows = table.rows;
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.tokens < b.tokens; });
  rows.resize(std::min<std::size_t>(rows.size(), 2));
  return rows;
}

}  // namespace dcplan
