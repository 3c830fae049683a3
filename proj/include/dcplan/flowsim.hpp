#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dcplan {

/// Full-bisection folded Clos with explicit, deterministically indexed links.
/// Links are unidirectional; every host has one up and one down link.
///
///   tiers = 1: one switch.
///   tiers = 2: leaf-spine; radix/2 hosts per leaf, radix/2 spines, each
///              leaf has one link to every spine.
///   tiers = 3: k-ary fat tree (pods of radix/2 leaves and aggregation
///              switches, (radix/2)^2 cores), populated up to `hosts`.
class Fabric {
 public:
  std::int64_t hosts = 0;
  int tiers = 0;
  int radix = 0;
  double link_speed_bps = 0.0;

  int hosts_per_leaf = 0;
  int leaves = 0;
  int spines = 0;  // tiers == 2
  int pods = 0;    // tiers == 3
  int cores = 0;   // tiers == 3

  std::size_t link_count() const { return link_count_; }

  // Link indices.
  std::size_t host_up(std::int64_t host) const { return static_cast<std::size_t>(host); }
  std::size_t host_down(std::int64_t host) const { return static_cast<std::size_t>(hosts + host); }
  std::size_t leaf_up(int leaf, int port) const;        // tiers 2: port = spine; tiers 3: port = agg in pod
  std::size_t leaf_down_from(int leaf, int port) const;  // spine/agg -> leaf
  std::size_t agg_up(int pod, int agg, int core_port) const;
  std::size_t core_down(int pod, int agg, int core_port) const;

  int leaf_of(std::int64_t host) const { return static_cast<int>(host / hosts_per_leaf); }
  int pod_of_leaf(int leaf) const { return leaf / half(); }
  int half() const { return radix / 2; }

  /// Equal-cost paths between two hosts.
  std::int64_t path_count(std::int64_t src, std::int64_t dst) const;

 private:
  friend Fabric build_fabric(std::int64_t hosts, int tiers, int radix, double link_speed_bps);
  std::size_t link_count_ = 0;
  std::size_t up_base_ = 0;
  std::size_t down_base_ = 0;
  std::size_t agg_up_base_ = 0;
  std::size_t core_down_base_ = 0;
};

/// Throws InfeasibleError when `hosts` exceeds the tier capacity.
Fabric build_fabric(std::int64_t hosts, int tiers, int radix, double link_speed_bps);

enum class RoutingPolicy { single_path, spray };
std::string_view to_string(RoutingPolicy p);
RoutingPolicy routing_policy_from_string(std::string_view s);

struct TrafficPattern {
  double flow_bytes = 100e6;
  double participation = 1.0;  // fraction of hosts sending (and receiving)

  void validate() const;
};

struct FctStats {
  double optimal_fct = 0.0;
  double mean = 0.0;
  double p50 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
  std::int64_t flows = 0;

  double mean_inflation() const { return mean / optimal_fct; }
  double p50_inflation() const { return p50 / optimal_fct; }
  double p99_inflation() const { return p99 / optimal_fct; }
  double max_inflation() const { return max / optimal_fct; }
};

struct FlowRecord {
  std::int32_t trial = 0;
  std::int32_t flow_id = 0;
  std::int64_t src = 0;
  std::int64_t dst = 0;
  double fct = 0.0;
};

struct FlowSimResult {
  RoutingPolicy policy = RoutingPolicy::single_path;
  TrafficPattern pattern;
  FctStats stats;
  std::vector<FlowRecord> flows;  // trial-major, flow id within trial

  std::vector<double> inflations() const;
};

struct FlowSimOptions {
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 1;  // 0 = hardware concurrency
};

/// Synchronized permutation traffic: each trial draws a random derangement
/// of the participating hosts and runs a fluid max-min model until every
/// flow completes. Single-path pins each flow to one uniformly hashed path;
/// spray splits every flow evenly across all equal-cost paths.
/// Output is a pure function of (fabric, pattern, policy, trials, seed).
FlowSimResult simulate_permutation(const Fabric& fabric, const TrafficPattern& pattern, RoutingPolicy policy,
                                   const FlowSimOptions& options);

/// Nearest-rank quantile of an ascending-sorted sample, q in (0, 1].
double sorted_quantile(const std::vector<double>& sorted, double q);

std::string flowsim_csv_header();
void append_flowsim_csv(std::string& out, const FlowSimResult& result);

}  // namespace dcplan
