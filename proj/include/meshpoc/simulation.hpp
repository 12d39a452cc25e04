#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshpoc/assignment.hpp"
#include "meshpoc/metrics.hpp"
#include "meshpoc/routing.hpp"
#include "meshpoc/topology.hpp"

namespace meshpoc {

struct SimParams {
  LinkModel link;
  /// Attempts per hop before the packet is dropped.
  int retx_cap = 7;
  /// Queueing delay coefficient, in packet times.
  double queue_coeff = 1.0;
  /// Utilization is clamped to this value before the u / (1 - u) term.
  double max_utilization = 0.99;
};

/// Success probability and expected attempts of one hop under truncated
/// geometric retransmission.
struct HopDelivery {
  double success = 0.0;
  double attempts = 0.0;
};

HopDelivery truncated_retx(double delivery_prob, int retx_cap);

struct PathStats {
  double pdr = 0.0;
  /// Expected transmissions and retransmissions per offered packet.
  double attempts = 0.0;
  double retransmissions = 0.0;
  double delay_s = 0.0;
};

/// Closed-form statistics of a path given per-hop delivery probabilities
/// and link utilizations (same length).
PathStats evaluate_path(std::span<const double> delivery_probs,
                        std::span<const double> utilization, const SimParams& sim);

struct TopologySpec {
  enum class Kind { Grid, Random, Fixed };
  Kind kind = Kind::Grid;
  GridParams grid;
  RandomParams random;
  std::optional<Topology> fixed;

  /// Instantiates the topology with every node carrying `radios` radios.
  Topology build(int radios, std::uint64_t seed) const;
};

struct SweepPoint {
  int channels = 11;
  int radios = 3;
  bool operator==(const SweepPoint&) const = default;
};

struct Scenario {
  TopologySpec topology;
  PhyParams phy;
  std::vector<Demand> sources;
  std::vector<SweepPoint> sweep;
  std::vector<RoutingMetric> metrics{RoutingMetric::Sinr};
  ChannelPins pins;
  std::uint64_t seed = 1;
  double duration_s = 300.0;
  SimParams sim;

  /// Throws std::invalid_argument on an empty sweep, non-positive demand,
  /// or missing metric.
  void validate() const;
};

struct SimRow {
  SweepPoint point;
  RoutingMetric metric = RoutingMetric::Sinr;
  double pdr = 0.0;
  double mean_delay_s = 0.0;
  double overhead_retx = 0.0;
  double throughput_bps = 0.0;
  double agg_capacity_bps = 0.0;
  /// Sources left without any usable path.
  int unrouted = 0;

  bool operator==(const SimRow&) const = default;
};

struct SimReport {
  std::vector<SimRow> rows;  ///< sweep order, then metric order

  bool operator==(const SimReport&) const = default;
};

/// Everything built for one sweep point before traffic is evaluated.
struct SweepState {
  Topology topology;
  PhyParams phy;
  AssignmentResult assignment;
};

SweepState prepare_sweep_point(const Scenario& s, const SweepPoint& point);

/// Routes every source under `metric`; falls back to independent
/// per-source shortest paths when capacity-aware routing fails. Sources
/// with no usable path are omitted from the plan.
RoutePlan plan_routes(const SweepState& state, const Scenario& s, RoutingMetric metric);

/// Transmitters of every directed link that carries flow in `plan`, one
/// entry per (node, channel).
std::vector<Interferer> active_transmitters(const SweepState& state, const RoutePlan& plan);

/// SINR of one hop with only the plan's active transmitters interfering.
double traffic_sinr(const SweepState& state, const RoutePlan& plan, const DirectedLink& dl);

SimRow evaluate_plan(const SweepState& state, const Scenario& s, const RoutePlan& plan,
                     const SweepPoint& point, RoutingMetric metric);

/// One row per sweep point and scenario metric.
SimReport run_scenario(const Scenario& s);

/// The same scenario under sinr, etx, ett and hopcount routing.
SimReport compare_metrics(const Scenario& s);

/// 4x4 grid at 200 m spacing, gateways {0, 2}, sources 1, 5, 6, 9, 14 at
/// 1 Mbit/s each, sweeping K = 1..11 with 3 radios.
Scenario grid_reference_scenario();

/// Pins that load the 14-10-6-2 column and its west neighbour column
/// 13-9-5-1 onto one shared channel.
ChannelPins corridor_interference_pins(const Topology& grid4);

/// Line-oriented scenario text. Relative `topology file` paths resolve
/// against `base_dir`.
Scenario parse_scenario(std::istream& in, const std::string& base_dir = {});
Scenario load_scenario(const std::string& path);

void write_report_csv(std::ostream& out, const SimReport& report);

}  // namespace meshpoc
