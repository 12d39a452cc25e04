#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "meshpoc/assignment.hpp"
#include "meshpoc/metrics.hpp"
#include "meshpoc/topology.hpp"

namespace meshpoc {

/// Routing weight per link id; nullopt excludes the link.
using LinkCosts = std::vector<std::optional<double>>;

/// SINR cost beta / min(sinr_fwd, sinr_rev) for every link.
LinkCosts sinr_link_costs(const Topology& t, const InterferenceDb& db, const PhyParams& p);

/// Costs under any routing metric, from the link qualities implied by `db`.
LinkCosts link_costs(const Topology& t, const InterferenceDb& db, const PhyParams& p,
                     RoutingMetric metric, const LinkModel& model = {});

struct PathResult {
  std::vector<NodeId> path;  ///< source first, gateway last
  double cost = 0.0;

  int hops() const { return static_cast<int>(path.size()) - 1; }
  NodeId gateway() const { return path.back(); }
};

/**
 * Least-cost path from `source` to any gateway over the usable links.
 * Equal costs fall back to fewer hops, then the lexicographically smallest
 * node sequence. Gateways are terminal. A gateway source yields [source]
 * at cost 0. Throws NoFeasiblePath when no gateway is reachable.
 */
PathResult shortest_route(const Topology& t, const LinkCosts& costs, NodeId source);
PathResult shortest_route(const Topology& t, const InterferenceDb& db, const PhyParams& p,
                          NodeId source);

/// Exhaustive reference for shortest_route: enumerates every simple path
/// to a gateway. Throws InstanceTooLarge past `max_paths`.
PathResult enumerate_paths_oracle(const Topology& t, const LinkCosts& costs, NodeId source,
                                  std::size_t max_paths = 1'000'000);
PathResult enumerate_paths_oracle(const Topology& t, const InterferenceDb& db,
                                  const PhyParams& p, NodeId source);

struct Demand {
  NodeId node = 0;
  std::int64_t bps = 0;
};

/// One direction of a link; `forward` means a -> b.
struct DirectedLink {
  LinkId link = 0;
  bool forward = true;

  auto operator<=>(const DirectedLink&) const = default;
};

DirectedLink direction_of(const Topology& t, NodeId from, NodeId to);

struct Route {
  NodeId source = 0;
  std::int64_t demand_bps = 0;
  PathResult path;
};

struct RoutePlan {
  std::vector<Route> routes;  ///< ascending source id
  std::map<DirectedLink, double> flows;
};

/**
 * Routes each demand (ascending node id) on its least-cost path and loads
 * it onto the directed links. When a demand would push a link past its
 * capacity, that link is dropped for this source and the path recomputed.
 *
 * Throws NoFeasiblePath if a source has no usable path at all, and
 * CapacityExhausted when every usable path is saturated.
 */
RoutePlan route_all(const Topology& t, const InterferenceDb& db, const LinkCosts& costs,
                    std::span<const Demand> sources);
RoutePlan route_all(const Topology& t, const InterferenceDb& db, const PhyParams& p,
                    std::span<const Demand> sources);

struct NodeImbalance {
  NodeId node = 0;
  double imbalance = 0.0;  ///< (outflow - inflow) - demand
};

struct CapacityViolation {
  DirectedLink link;
  double flow = 0.0;
  double capacity = 0.0;
};

struct FlowCheckReport {
  std::vector<NodeImbalance> conservation_violations;
  std::vector<CapacityViolation> capacity_violations;
  bool integrality_ok = true;

  bool feasible() const {
    return conservation_violations.empty() && capacity_violations.empty() && integrality_ok;
  }
};

/// Flow conservation at every non-gateway node, 0 <= flow <= capacity on
/// every directed link, and integral flows.
FlowCheckReport check_flow(const RoutePlan& plan, const Topology& t, const InterferenceDb& db,
                           std::span<const Demand> sources);

void write_routes_csv(std::ostream& out, const RoutePlan& plan);
void write_flows_csv(std::ostream& out, const RoutePlan& plan, const InterferenceDb& db);

}  // namespace meshpoc
