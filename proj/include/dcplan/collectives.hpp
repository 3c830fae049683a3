#pragma once

#include <cstdint>

namespace dcplan {

// Bandwidth-only ring collective costs. `bytes` is the full buffer size per
// participant, `bandwidth` is bytes/s per participant. All return 0 for a
// single peer.

double ring_reduce_scatter_time(double bytes, std::int64_t peers, double bandwidth);

/// 2 * M * (n - 1) / (n * B)
double ring_all_reduce_time(double bytes, std::int64_t peers, double bandwidth);

/// Each peer contributes `bytes_per_peer`; time = M_peer * (n - 1) / B.
double ring_all_gather_time(double bytes_per_peer, std::int64_t peers, double bandwidth);

double p2p_time(double bytes, double bandwidth);

}  // namespace dcplan
