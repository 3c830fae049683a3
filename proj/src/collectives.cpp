#include "dcplan/collectives.hpp"

#include <stdexcept>

namespace dcplan {

namespace {

void check(double bytes, std::int64_t peers, double bandwidth) {
  if (peers < 1) throw std::invalid_argument("collective needs at least one peer");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  if (bytes < 0.0) throw std::invalid_argument("message size must be >= 0");
}

}  // namespace

double ring_reduce_scatter_time(double bytes, std::int64_t peers, double bandwidth) {
  check(bytes, peers, bandwidth);
  const double n = static_cast<double>(peers);
  return bytes * (n - 1.0) / (n * bandwidth);
}

double ring_all_reduce_time(double bytes, std::int64_t peers, double bandwidth) {
  check(bytes, peers, bandwidth);
  const double n = static_cast<double>(peers);
  return 2.0 * bytes * (n - 1.0) / (n * bandwidth);
}

double ring_all_gather_time(double bytes_per_peer, std::int64_t peers, double bandwidth) {
  check(bytes_per_peer, peers, bandwidth);
  return bytes_per_peer * static_cast<double>(peers - 1) / bandwidth;
}

double p2p_time(double bytes, double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  if (bytes < 0.0) throw std::invalid_argument("message size must be >= 0");
  return bytes / bandwidth;
}

}  // namespace dcplan
