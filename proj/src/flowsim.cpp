#include "dcplan/flowsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

#include "dcplan/errors.hpp"
#include "dcplan/philox.hpp"

namespace dcplan {

std::size_t Fabric::leaf_up(int leaf, int port) const {
  return up_base_ + static_cast<std::size_t>(leaf) * (tiers == 2 ? spines : half()) + port;
}

std::size_t Fabric::leaf_down_from(int leaf, int port) const {
  return down_base_ + static_cast<std::size_t>(leaf) * (tiers == 2 ? spines : half()) + port;
}

std::size_t Fabric::agg_up(int pod, int agg, int core_port) const {
  return agg_up_base_ + (static_cast<std::size_t>(pod) * half() + agg) * half() + core_port;
}

std::size_t Fabric::core_down(int pod, int agg, int core_port) const {
  return core_down_base_ + (static_cast<std::size_t>(pod) * half() + agg) * half() + core_port;
}

std::int64_t Fabric::path_count(std::int64_t src, std::int64_t dst) const {
  if (tiers == 1) return 1;
  const int ls = leaf_of(src);
  const int ld = leaf_of(dst);
  if (ls == ld) return 1;
  if (tiers == 2) return spines;
  if (pod_of_leaf(ls) == pod_of_leaf(ld)) return half();
  return static_cast<std::int64_t>(half()) * half();
}

Fabric build_fabric(std::int64_t hosts, int tiers, int radix, double link_speed_bps) {
  if (hosts < 2) throw std::invalid_argument("fabric needs at least two hosts");
  if (radix < 2 || radix % 2 != 0) throw std::invalid_argument("radix must be even and >= 2");
  if (!(link_speed_bps > 0.0)) throw std::invalid_argument("link speed must be > 0");
  if (tiers < 1 || tiers > 3) throw std::invalid_argument("flow simulator supports 1 to 3 tiers");

  const std::int64_t m = radix / 2;
  const std::int64_t capacity = tiers == 1 ? radix : 2 * m * (tiers == 3 ? m * m : m);
  if (hosts > capacity) {
    throw InfeasibleError(
        fmt::format("{} hosts exceed the {}-tier capacity of {} at radix {}", hosts, tiers, capacity, radix));
  }

  Fabric f;
  f.hosts = hosts;
  f.tiers = tiers;
  f.radix = radix;
  f.link_speed_bps = link_speed_bps;
  f.up_base_ = static_cast<std::size_t>(2 * hosts);

  if (tiers == 1) {
    f.hosts_per_leaf = static_cast<int>(hosts);
    f.leaves = 1;
    f.link_count_ = f.up_base_;
    f.down_base_ = f.up_base_;
    return f;
  }

  f.hosts_per_leaf = static_cast<int>(m);
  f.leaves = static_cast<int>((hosts + m - 1) / m);
  if (tiers == 2) {
    f.spines = static_cast<int>(m);
    const std::size_t per_dir = static_cast<std::size_t>(f.leaves) * f.spines;
    f.down_base_ = f.up_base_ + per_dir;
    f.link_count_ = f.down_base_ + per_dir;
    return f;
  }

  f.pods = static_cast<int>((f.leaves + m - 1) / m);
  f.cores = static_cast<int>(m * m);
  const std::size_t leaf_links = static_cast<std::size_t>(f.leaves) * m;
  const std::size_t agg_links = static_cast<std::size_t>(f.pods) * m * m;
  f.down_base_ = f.up_base_ + leaf_links;
  f.agg_up_base_ = f.down_base_ + leaf_links;
  f.core_down_base_ = f.agg_up_base_ + agg_links;
  f.link_count_ = f.core_down_base_ + agg_links;
  return f;
}

std::string_view to_string(RoutingPolicy p) { return p == RoutingPolicy::spray ? "spray" : "single-path"; }

RoutingPolicy routing_policy_from_string(std::string_view s) {
  if (s == "single-path" || s == "single_path" || s == "ecmp") return RoutingPolicy::single_path;
  if (s == "spray") return RoutingPolicy::spray;
  throw ConfigError(fmt::format("unknown routing policy '{}' (expected single-path or spray)", s));
}

void TrafficPattern::validate() const {
  if (!(flow_bytes > 0.0)) throw std::invalid_argument("flow size must be > 0");
  if (!(participation > 0.0 && participation <= 1.0)) throw std::invalid_argument("participation must be in (0, 1]");
}

std::vector<double> FlowSimResult::inflations() const {
  std::vector<double> out;
  out.reserve(flows.size());
  for (const auto& f : flows) out.push_back(f.fct / stats.optimal_fct);
  return out;
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

namespace {

struct Hop {
  std::size_t link;
  double weight;
};

// Append the links a flow loads, with the fraction of its rate each carries.
void route(const Fabric& fab, std::int64_t src, std::int64_t dst, RoutingPolicy policy, Philox4x32& rng,
           std::vector<Hop>& hops) {
  hops.push_back({fab.host_up(src), 1.0});
  hops.push_back({fab.host_down(dst), 1.0});
  if (fab.tiers == 1) return;
  const int ls = fab.leaf_of(src);
  const int ld = fab.leaf_of(dst);
  if (ls == ld) return;

  const int m = fab.half();
  if (fab.tiers == 2) {
    if (policy == RoutingPolicy::single_path) {
      const int s = static_cast<int>(rng.below(fab.spines));
      hops.push_back({fab.leaf_up(ls, s), 1.0});
      hops.push_back({fab.leaf_down_from(ld, s), 1.0});
    } else {
      const double w = 1.0 / fab.spines;
      for (int s = 0; s < fab.spines; ++s) {
        hops.push_back({fab.leaf_up(ls, s), w});
        hops.push_back({fab.leaf_down_from(ld, s), w});
      }
    }
    return;
  }

  const int ps = fab.pod_of_leaf(ls);
  const int pd = fab.pod_of_leaf(ld);
  if (policy == RoutingPolicy::single_path) {
    const int a = static_cast<int>(rng.below(m));
    hops.push_back({fab.leaf_up(ls, a), 1.0});
    hops.push_back({fab.leaf_down_from(ld, a), 1.0});
    if (ps != pd) {
      const int c = static_cast<int>(rng.below(m));
      hops.push_back({fab.agg_up(ps, a, c), 1.0});
      hops.push_back({fab.core_down(pd, a, c), 1.0});
    }
    return;
  }
  const double wa = 1.0 / m;
  for (int a = 0; a < m; ++a) {
    hops.push_back({fab.leaf_up(ls, a), wa});
    hops.push_back({fab.leaf_down_from(ld, a), wa});
    if (ps != pd) {
      const double wc = wa / m;
      for (int c = 0; c < m; ++c) {
        hops.push_back({fab.agg_up(ps, a, c), wc});
        hops.push_back({fab.core_down(pd, a, c), wc});
      }
    }
  }
}

struct Trial {
  std::vector<std::int64_t> src;
  std::vector<std::int64_t> dst;
  std::vector<double> fct;
};

// Fluid model of one trial. Rates follow weighted max-min fairness
// (progressive filling), recomputed at every completion event.
class FluidSimulator {
 public:
  FluidSimulator(const Fabric& fab, std::size_t flows) : fab_(fab), flow_off_(1, 0) { flow_off_.reserve(flows + 1); }

  void add_flow(const std::vector<Hop>& hops) {
    for (const auto& h : hops) {
      hop_link_.push_back(h.link);
      hop_weight_.push_back(h.weight);
    }
    flow_off_.push_back(hop_link_.size());
  }

  std::vector<double> run(double bits) {
    const std::size_t flows = flow_off_.size() - 1;
    index_links();

    std::vector<double> remaining(flows, bits);
    std::vector<double> fct(flows, 0.0);
    std::vector<std::uint32_t> active(flows);
    std::iota(active.begin(), active.end(), 0u);
    rate_.assign(flows, 0.0);
    frozen_.assign(flows, 1);
    residual_.assign(fab_.link_count(), 0.0);
    weight_.assign(fab_.link_count(), 0.0);

    const double capacity = fab_.link_speed_bps;
    const double done_tol = bits * 1e-9;
    double now = 0.0;
    while (!active.empty()) {
      fill_rates(active, capacity);
      double dt = std::numeric_limits<double>::infinity();
      for (auto f : active) dt = std::min(dt, remaining[f] / rate_[f]);
      now += dt;
      std::size_t kept = 0;
      for (auto f : active) {
        remaining[f] -= rate_[f] * dt;
        if (remaining[f] <= done_tol) {
          fct[f] = now;
        } else {
          active[kept++] = f;
        }
      }
      active.resize(kept);
    }
    return fct;
  }

 private:
  void index_links() {
    const std::size_t links = fab_.link_count();
    link_off_.assign(links + 1, 0);
    for (auto l : hop_link_) ++link_off_[l + 1];
    std::partial_sum(link_off_.begin(), link_off_.end(), link_off_.begin());
    link_flow_.resize(hop_link_.size());
    link_weight_.resize(hop_link_.size());
    std::vector<std::size_t> cursor(link_off_.begin(), link_off_.end() - 1);
    const std::size_t flows = flow_off_.size() - 1;
    for (std::size_t f = 0; f < flows; ++f) {
      for (std::size_t i = flow_off_[f]; i < flow_off_[f + 1]; ++i) {
        const auto pos = cursor[hop_link_[i]]++;
        link_flow_[pos] = static_cast<std::uint32_t>(f);
        link_weight_[pos] = hop_weight_[i];
      }
    }
  }

  void fill_rates(const std::vector<std::uint32_t>& active, double capacity) {
    touched_.clear();
    for (auto f : active) {
      frozen_[f] = 0;
      for (std::size_t i = flow_off_[f]; i < flow_off_[f + 1]; ++i) {
        const auto l = hop_link_[i];
        if (weight_[l] == 0.0) {
          touched_.push_back(l);
          residual_[l] = capacity;
        }
        weight_[l] += hop_weight_[i];
      }
    }

    // A link's fair share only grows as flows freeze elsewhere, so stale heap
    // keys are underestimates: re-key them when popped.
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (auto l : touched_) heap.emplace(residual_[l] / weight_[l], l);

    constexpr double kEmpty = 1e-12;
    double floor_level = 0.0;
    while (!heap.empty()) {
      const auto [key, link] = heap.top();
      heap.pop();
      if (weight_[link] <= kEmpty) continue;
      const double level = std::max(floor_level, residual_[link] / weight_[link]);
      if (level > key * (1.0 + 1e-12)) {
        heap.emplace(level, link);
        continue;
      }
      floor_level = level;
      for (std::size_t i = link_off_[link]; i < link_off_[link + 1]; ++i) {
        const auto f = link_flow_[i];
        if (frozen_[f]) continue;
        frozen_[f] = 1;
        rate_[f] = level;
        for (std::size_t j = flow_off_[f]; j < flow_off_[f + 1]; ++j) {
          const auto l = hop_link_[j];
          residual_[l] = std::max(0.0, residual_[l] - hop_weight_[j] * level);
          weight_[l] -= hop_weight_[j];
        }
      }
    }
    for (auto l : touched_) weight_[l] = 0.0;
  }

  const Fabric& fab_;
  std::vector<std::size_t> flow_off_;
  std::vector<std::size_t> hop_link_;
  std::vector<double> hop_weight_;
  std::vector<std::size_t> link_off_;
  std::vector<std::uint32_t> link_flow_;
  std::vector<double> link_weight_;

  std::vector<double> rate_;
  std::vector<char> frozen_;
  std::vector<double> residual_;
  std::vector<double> weight_;
  std::vector<std::size_t> touched_;
};

Trial run_trial(const Fabric& fab, const TrafficPattern& pattern, RoutingPolicy policy, std::uint64_t seed,
                std::uint64_t trial_index) {
  Philox4x32 rng(seed, trial_index);
  const std::int64_t n = fab.hosts;
  const auto active_count =
      std::clamp<std::int64_t>(std::llround(pattern.participation * static_cast<double>(n)), 2, n);

  // Participating hosts: partial Fisher-Yates, then ascending order so flow
  // ids follow source host ids.
  std::vector<std::int64_t> hosts(n);
  std::iota(hosts.begin(), hosts.end(), 0);
  for (std::int64_t i = 0; i < active_count; ++i) {
    const auto j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(hosts[i], hosts[j]);
  }
  hosts.resize(active_count);
  std::sort(hosts.begin(), hosts.end());

  // Derangement by rejection.
  std::vector<std::int64_t> perm(active_count);
  while (true) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::int64_t i = active_count - 1; i > 0; --i) {
      std::swap(perm[i], perm[static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
    }
    bool fixed_point = false;
    for (std::int64_t i = 0; i < active_count && !fixed_point; ++i) fixed_point = perm[i] == i;
    if (!fixed_point) break;
  }

  Trial t;
  t.src = hosts;
  t.dst.resize(active_count);
  FluidSimulator sim(fab, static_cast<std::size_t>(active_count));
  std::vector<Hop> hops;
  for (std::int64_t i = 0; i < active_count; ++i) {
    t.dst[i] = hosts[perm[i]];
    hops.clear();
    route(fab, t.src[i], t.dst[i], policy, rng, hops);
    sim.add_flow(hops);
  }
  t.fct = sim.run(pattern.flow_bytes * 8.0);
  return t;
}

}  // namespace

FlowSimResult simulate_permutation(const Fabric& fabric, const TrafficPattern& pattern, RoutingPolicy policy,
                                   const FlowSimOptions& options) {
  pattern.validate();
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");

  std::vector<Trial> trials(static_cast<std::size_t>(options.trials));
  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, options.trials);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < options.trials; i = next++) {
      trials[i] = run_trial(fabric, pattern, policy, options.seed, static_cast<std::uint64_t>(i));
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  FlowSimResult result;
  result.policy = policy;
  result.pattern = pattern;
  for (int i = 0; i < options.trials; ++i) {
    const auto& t = trials[i];
    for (std::size_t f = 0; f < t.fct.size(); ++f) {
      result.flows.push_back({i, static_cast<std::int32_t>(f), t.src[f], t.dst[f], t.fct[f]});
    }
  }

  auto& s = result.stats;
  s.optimal_fct = pattern.flow_bytes * 8.0 / fabric.link_speed_bps;
  s.flows = static_cast<std::int64_t>(result.flows.size());
  std::vector<double> sorted;
  sorted.reserve(result.flows.size());
  for (const auto& f : result.flows) sorted.push_back(f.fct);
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / static_cast<double>(sorted.size());
  s.p50 = sorted_quantile(sorted, 0.50);
  s.p99 = sorted_quantile(sorted, 0.99);
  s.max = sorted.back();
  return result;
}

std::string flowsim_csv_header() { return "policy,participation,trial,flow_id,fct_s,inflation"; }

void append_flowsim_csv(std::string& out, const FlowSimResult& result) {
  const auto policy = to_string(result.policy);
  for (const auto& f : result.flows) {
    out += fmt::format("{},{:.17g},{},{},{:.17g},{:.17g}\n", policy, result.pattern.participation, f.trial, f.flow_id,
                       f.fct, f.fct / result.stats.optimal_fct);
  }
}

}  // namespace dcplan
