#include "meshpoc/routing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "meshpoc/error.hpp"
#include "meshpoc/text_format.hpp"

namespace meshpoc {

LinkCosts sinr_link_costs(const Topology& t, const InterferenceDb& db, const PhyParams& p) {
  LinkCosts out(static_cast<std::size_t>(t.link_count()));
  const double beta = p.beta_linear();
  for (LinkId l = 0; l < t.link_count(); ++l) {
    out[static_cast<std::size_t>(l)] = sinr_cost(db[l].sinr_min(), beta);
  }
  return out;
}

LinkCosts link_costs(const Topology& t, const InterferenceDb& db, const PhyParams& p,
                     RoutingMetric metric, const LinkModel& model) {
  if (metric == RoutingMetric::Sinr) return sinr_link_costs(t, db, p);
  LinkCosts out(static_cast<std::size_t>(t.link_count()));
  for (LinkId l = 0; l < t.link_count(); ++l) {
    const auto q = link_quality(db[l].sinr_min(), db[l].capacity_bps, p, model);
    out[static_cast<std::size_t>(l)] = metric_cost(metric, q);
  }
  return out;
}

namespace {

// Total order used by both the search and the oracle.
struct Label {
  double cost = 0.0;
  std::vector<NodeId> path;

  bool operator<(const Label& o) const {
    if (cost != o.cost) return cost < o.cost;
    if (path.size() != o.path.size()) return path.size() < o.path.size();
    return path < o.path;
  }
  bool operator>(const Label& o) const { return o < *this; }
};

void check_source(const Topology& t, const LinkCosts& costs, NodeId source) {
  if (source < 0 || source >= t.node_count()) {
    throw std::out_of_range("source " + std::to_string(source) + " is not a node");
  }
  if (static_cast<int>(costs.size()) != t.link_count()) {
    throw std::invalid_argument("cost vector does not match the link count");
  }
}

NoFeasiblePath no_path(NodeId source) {
  return NoFeasiblePath("no feasible path from node " + std::to_string(source) +
                        " to any gateway");
}

}  // namespace

PathResult shortest_route(const Topology& t, const LinkCosts& costs, NodeId source) {
  check_source(t, costs, source);
  if (t.node(source).is_gateway) return {{source}, 0.0};

  std::vector<std::optional<Label>> best(static_cast<std::size_t>(t.node_count()));
  std::priority_queue<Label, std::vector<Label>, std::greater<>> queue;
  best[static_cast<std::size_t>(source)] = Label{0.0, {source}};
  queue.push(*best[static_cast<std::size_t>(source)]);

  while (!queue.empty()) {
    Label cur = queue.top();
    queue.pop();
    const NodeId u = cur.path.back();
    if (*best[static_cast<std::size_t>(u)] < cur) continue;
    if (t.node(u).is_gateway) return {std::move(cur.path), cur.cost};

    for (LinkId l : t.incident_links(u)) {
      const auto& w = costs[static_cast<std::size_t>(l)];
      if (!w) continue;
      const NodeId v = t.link(l).other(u);
      if (std::find(cur.path.begin(), cur.path.end(), v) != cur.path.end()) continue;
      Label next{cur.cost + *w, cur.path};
      next.path.push_back(v);
      auto& slot = best[static_cast<std::size_t>(v)];
      if (!slot || next < *slot) {
        slot = next;
        queue.push(std::move(next));
      }
    }
  }
  throw no_path(source);
}

PathResult shortest_route(const Topology& t, const InterferenceDb& db, const PhyParams& p,
                          NodeId source) {
  return shortest_route(t, sinr_link_costs(t, db, p), source);
}

PathResult enumerate_paths_oracle(const Topology& t, const LinkCosts& costs, NodeId source,
                                  std::size_t max_paths) {
  check_source(t, costs, source);
  if (t.node(source).is_gateway) return {{source}, 0.0};

  std::optional<Label> best;
  std::size_t found = 0;
  std::vector<NodeId> path{source};
  std::vector<char> on_path(static_cast<std::size_t>(t.node_count()), 0);
  on_path[static_cast<std::size_t>(source)] = 1;

  std::function<void(double)> dfs = [&](double cost) {
    const NodeId u = path.back();
    if (u != source && t.node(u).is_gateway) {
      if (++found > max_paths) {
        throw InstanceTooLarge("enumerate_paths_oracle: more than " + std::to_string(max_paths) +
                               " simple paths");
      }
      Label cand{cost, path};
      if (!best || cand < *best) best = std::move(cand);
      return;
    }
    for (LinkId l : t.incident_links(u)) {
      const auto& w = costs[static_cast<std::size_t>(l)];
      if (!w) continue;
      const NodeId v = t.link(l).other(u);
      if (on_path[static_cast<std::size_t>(v)]) continue;
      on_path[static_cast<std::size_t>(v)] = 1;
      path.push_back(v);
      dfs(cost + *w);
      path.pop_back();
      on_path[static_cast<std::size_t>(v)] = 0;
    }
  };
  dfs(0.0);

  if (!best) throw no_path(source);
  return {std::move(best->path), best->cost};
}

PathResult enumerate_paths_oracle(const Topology& t, const InterferenceDb& db,
                                  const PhyParams& p, NodeId source) {
  return enumerate_paths_oracle(t, sinr_link_costs(t, db, p), source);
}

DirectedLink direction_of(const Topology& t, NodeId from, NodeId to) {
  const auto l = t.link_between(from, to);
  if (!l) {
    throw std::invalid_argument("no link between " + std::to_string(from) + " and " +
                                std::to_string(to));
  }
  return {*l, t.link(*l).a == from};
}

RoutePlan route_all(const Topology& t, const InterferenceDb& db, const LinkCosts& costs,
                    std::span<const Demand> sources) {
  std::vector<Demand> ordered(sources.begin(), sources.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Demand& x, const Demand& y) { return x.node < y.node; });

  RoutePlan plan;
  for (const Demand& d : ordered) {
    if (d.bps <= 0) {
      throw std::invalid_argument("demand of node " + std::to_string(d.node) + " must be > 0");
    }
    LinkCosts usable = costs;
    std::set<LinkId> blocked;
    while (true) {
      PathResult pr;
      try {
        pr = shortest_route(t, usable, d.node);
      } catch (const NoFeasiblePath&) {
        if (blocked.empty()) throw;
        std::ostringstream os;
        os << "capacity exhausted for source " << d.node << "; saturated links:";
        for (LinkId l : blocked) os << ' ' << l;
        throw CapacityExhausted(os.str(), d.node, std::vector<LinkId>(blocked.begin(), blocked.end()));
      }

      bool fits = true;
      for (std::size_t i = 0; i + 1 < pr.path.size(); ++i) {
        const DirectedLink dl = direction_of(t, pr.path[i], pr.path[i + 1]);
        const auto it = plan.flows.find(dl);
        const double load = it == plan.flows.end() ? 0.0 : it->second;
        if (load + static_cast<double>(d.bps) > db[dl.link].capacity_bps) {
          blocked.insert(dl.link);
          usable[static_cast<std::size_t>(dl.link)].reset();
          fits = false;
        }
      }
      if (!fits) continue;

      for (std::size_t i = 0; i + 1 < pr.path.size(); ++i) {
        plan.flows[direction_of(t, pr.path[i], pr.path[i + 1])] += static_cast<double>(d.bps);
      }
      plan.routes.push_back({d.node, d.bps, std::move(pr)});
      break;
    }
  }
  return plan;
}

RoutePlan route_all(const Topology& t, const InterferenceDb& db, const PhyParams& p,
                    std::span<const Demand> sources) {
  return route_all(t, db, sinr_link_costs(t, db, p), sources);
}

FlowCheckReport check_flow(const RoutePlan& plan, const Topology& t, const InterferenceDb& db,
                           std::span<const Demand> sources) {
  FlowCheckReport report;
  std::vector<double> net(static_cast<std::size_t>(t.node_count()), 0.0);
  std::vector<double> demand(static_cast<std::size_t>(t.node_count()), 0.0);
  for (const Demand& d : sources) demand.at(static_cast<std::size_t>(d.node)) += static_cast<double>(d.bps);

  for (const auto& [dl, flow] : plan.flows) {
    const Link& l = t.link(dl.link);
    const NodeId from = dl.forward ? l.a : l.b;
    const NodeId to = dl.forward ? l.b : l.a;
    net[static_cast<std::size_t>(from)] += flow;
    net[static_cast<std::size_t>(to)] -= flow;
    const double cap = db[dl.link].capacity_bps;
    if (flow < 0.0 || flow > cap) report.capacity_violations.push_back({dl, flow, cap});
    if (flow < 0.0 || std::floor(flow) != flow) report.integrality_ok = false;
  }

  for (const Node& nd : t.nodes()) {
    if (nd.is_gateway) continue;
    const auto i = static_cast<std::size_t>(nd.id);
    const double imbalance = net[i] - demand[i];
    if (imbalance != 0.0) report.conservation_violations.push_back({nd.id, imbalance});
  }
  return report;
}

void write_routes_csv(std::ostream& out, const RoutePlan& plan) {
  out << "source,gateway,cost,path\n";
  for (const Route& r : plan.routes) {
    out << r.source << ',' << r.path.gateway() << ',' << text::format_double(r.path.cost) << ',';
    for (std::size_t i = 0; i < r.path.path.size(); ++i) out << (i ? "/" : "") << r.path.path[i];
    out << '\n';
  }
}

void write_flows_csv(std::ostream& out, const RoutePlan& plan, const InterferenceDb& db) {
  out << "link_id,dir,flow_bps,capacity_bps\n";
  for (const auto& [dl, flow] : plan.flows) {
    out << dl.link << ',' << (dl.forward ? "fwd" : "rev") << ',' << text::format_double(flow)
        << ',' << text::format_double(db[dl.link].capacity_bps) << '\n';
  }
}

}  // namespace meshpoc
