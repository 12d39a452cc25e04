#include "meshpoc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "meshpoc/error.hpp"

namespace meshpoc {

HopDelivery truncated_retx(double p, int retx_cap) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("truncated_retx: p must lie in [0, 1]");
  if (retx_cap < 1) throw std::invalid_argument("truncated_retx: retx_cap must be >= 1");
  const double fail_all = std::pow(1.0 - p, retx_cap);
  HopDelivery h;
  h.success = 1.0 - fail_all;
  // Attempt k happens iff the first k-1 failed: sum_{k<cap} (1-p)^k.
  h.attempts = p == 0.0 ? static_cast<double>(retx_cap) : h.success / p;
  return h;
}

PathStats evaluate_path(std::span<const double> delivery_probs,
                        std::span<const double> utilization, const SimParams& sim) {
  if (delivery_probs.size() != utilization.size()) {
    throw std::invalid_argument("evaluate_path: one utilization per hop required");
  }
  const double packet_time = sim.link.packet_bits / sim.link.data_rate_bps;
  PathStats st;
  double reach = 1.0;
  for (std::size_t i = 0; i < delivery_probs.size(); ++i) {
    const HopDelivery hop = truncated_retx(delivery_probs[i], sim.retx_cap);
    st.attempts += reach * hop.attempts;
    st.retransmissions += reach * (hop.attempts - 1.0);
    const double u = std::clamp(utilization[i], 0.0, sim.max_utilization);
    st.delay_s += hop.attempts * packet_time + sim.queue_coeff * (u / (1.0 - u)) * packet_time;
    reach *= hop.success;
  }
  st.pdr = reach;
  return st;
}

Topology TopologySpec::build(int radios, std::uint64_t seed) const {
  switch (kind) {
    case Kind::Grid: {
      GridParams g = grid;
      g.radios = radios;
      return grid_topology(g);
    }
    case Kind::Random: {
      RandomParams r = random;
      r.radios = radios;
      return random_connected_topology(r, seed);
    }
    case Kind::Fixed:
      if (!fixed) throw std::invalid_argument("fixed topology spec without a topology");
      return fixed->with_radios(radios);
  }
  throw std::invalid_argument("unknown topology kind");
}

void Scenario::validate() const {
  if (sweep.empty()) throw std::invalid_argument("scenario sweep is empty");
  if (metrics.empty()) throw std::invalid_argument("scenario has no routing metric");
  for (const auto& d : sources) {
    if (d.bps <= 0) {
      throw std::invalid_argument("demand of node " + std::to_string(d.node) + " must be > 0");
    }
  }
  for (const auto& pt : sweep) {
    if (pt.channels < 1 || pt.radios < 1) {
      throw std::invalid_argument("sweep points need K >= 1 and R >= 1");
    }
  }
  phy.validate();
}

SweepState prepare_sweep_point(const Scenario& s, const SweepPoint& point) {
  Topology t = s.topology.build(point.radios, s.seed);
  PhyParams phy = s.phy;
  phy.channels = point.channels;
  for (const auto& d : s.sources) {
    if (d.node < 0 || d.node >= t.node_count()) {
      throw std::invalid_argument("source " + std::to_string(d.node) + " is not a node");
    }
  }
  AssignmentResult ar = assign_channels(t, phy, s.pins);
  return {std::move(t), phy, std::move(ar)};
}

RoutePlan plan_routes(const SweepState& state, const Scenario& s, RoutingMetric metric) {
  const LinkCosts costs =
      link_costs(state.topology, state.assignment.db, state.phy, metric, s.sim.link);
  try {
    return route_all(state.topology, state.assignment.db, costs, s.sources);
  } catch (const CapacityExhausted&) {
  } catch (const NoFeasiblePath&) {
  }

  // Best effort: every source on its own least-cost path, capacity ignored.
  std::vector<Demand> ordered = s.sources;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Demand& x, const Demand& y) { return x.node < y.node; });
  RoutePlan plan;
  for (const Demand& d : ordered) {
    PathResult pr;
    try {
      pr = shortest_route(state.topology, costs, d.node);
    } catch (const NoFeasiblePath&) {
      continue;
    }
    for (std::size_t i = 0; i + 1 < pr.path.size(); ++i) {
      plan.flows[direction_of(state.topology, pr.path[i], pr.path[i + 1])] +=
          static_cast<double>(d.bps);
    }
    plan.routes.push_back({d.node, d.bps, std::move(pr)});
  }
  return plan;
}

std::vector<Interferer> active_transmitters(const SweepState& state, const RoutePlan& plan) {
  std::set<std::pair<NodeId, Channel>> seen;
  for (const auto& [dl, flow] : plan.flows) {
    if (flow <= 0.0) continue;
    const Link& l = state.topology.link(dl.link);
    seen.emplace(dl.forward ? l.a : l.b, state.assignment.assignment[dl.link]);
  }
  std::vector<Interferer> out;
  for (auto [n, c] : seen) out.push_back({n, c});
  return out;
}

double traffic_sinr(const SweepState& state, const RoutePlan& plan, const DirectedLink& dl) {
  const Link& l = state.topology.link(dl.link);
  const NodeId tx = dl.forward ? l.a : l.b;
  const NodeId rx = dl.forward ? l.b : l.a;
  std::vector<Interferer> others;
  for (const Interferer& z : active_transmitters(state, plan)) {
    if (z.node != tx && z.node != rx) others.push_back(z);
  }
  return sinr(rx, tx, state.assignment.assignment[dl.link], others, state.topology, state.phy);
}

SimRow evaluate_plan(const SweepState& state, const Scenario& s, const RoutePlan& plan,
                     const SweepPoint& point, RoutingMetric metric) {
  const Topology& t = state.topology;
  const InterferenceDb& db = state.assignment.db;

  SimRow row;
  row.point = point;
  row.metric = metric;
  for (const auto& li : db.links) row.agg_capacity_bps += li.capacity_bps;

  double offered = 0.0;
  for (const auto& d : s.sources) offered += static_cast<double>(d.bps);

  double delivered = 0.0;
  double retx = 0.0;
  double delay_weighted = 0.0;
  for (const Route& r : plan.routes) {
    std::vector<double> probs;
    std::vector<double> util;
    for (std::size_t i = 0; i + 1 < r.path.path.size(); ++i) {
      const DirectedLink dl = direction_of(t, r.path.path[i], r.path.path[i + 1]);
      const auto& li = db[dl.link];
      probs.push_back(delivery_prob(linear_to_db(traffic_sinr(state, plan, dl)),
                                    state.phy.sinr_threshold_db, s.sim.link.margin_db));
      const auto it = plan.flows.find(dl);
      const double flow = it == plan.flows.end() ? 0.0 : it->second;
      util.push_back(li.capacity_bps > 0.0 ? flow / li.capacity_bps : s.sim.max_utilization);
    }
    const PathStats st = evaluate_path(probs, util, s.sim);
    const double demand = static_cast<double>(r.demand_bps);
    delivered += demand * st.pdr;
    retx += demand * st.retransmissions;
    delay_weighted += demand * st.pdr * st.delay_s;
  }
  row.unrouted = static_cast<int>(s.sources.size() - plan.routes.size());

  constexpr double inf = std::numeric_limits<double>::infinity();
  row.throughput_bps = delivered;
  row.pdr = offered > 0.0 ? delivered / offered : 0.0;
  row.overhead_retx = delivered > 0.0 ? retx / delivered : inf;
  row.mean_delay_s = delivered > 0.0 ? delay_weighted / delivered : inf;
  return row;
}

namespace {

SimReport run_with_metrics(const Scenario& s, std::span<const RoutingMetric> metrics) {
  s.validate();
  SimReport report;
  for (const SweepPoint& pt : s.sweep) {
    const SweepState state = prepare_sweep_point(s, pt);
    for (RoutingMetric m : metrics) {
      const RoutePlan plan = plan_routes(state, s, m);
      report.rows.push_back(evaluate_plan(state, s, plan, pt, m));
    }
  }
  return report;
}

}  // namespace

SimReport run_scenario(const Scenario& s) { return run_with_metrics(s, s.metrics); }

SimReport compare_metrics(const Scenario& s) {
  const RoutingMetric all[] = {RoutingMetric::Sinr, RoutingMetric::Etx, RoutingMetric::Ett,
                               RoutingMetric::HopCount};
  return run_with_metrics(s, all);
}

Scenario grid_reference_scenario() {
  Scenario s;
  s.topology.kind = TopologySpec::Kind::Grid;
  s.topology.grid = GridParams{};
  for (NodeId src : {1, 5, 6, 9, 14}) s.sources.push_back({src, 1'000'000});
  for (int k = 1; k <= 11; ++k) s.sweep.push_back({k, 3});
  return s;
}

ChannelPins corridor_interference_pins(const Topology& grid4) {
  ChannelPins pins;
  const std::pair<NodeId, NodeId> loaded[] = {{14, 10}, {10, 6}, {6, 2}, {13, 9}, {9, 5}, {5, 1}};
  for (auto [u, v] : loaded) {
    const auto l = grid4.link_between(u, v);
    if (!l) throw std::invalid_argument("corridor pins need the 4x4 reference grid");
    pins[*l] = 1;
  }
  return pins;
}

}  // namespace meshpoc
