// Acceptance gate: one PASS/FAIL line per criterion. Every CSV the suite
// produces is kept in memory; criterion 12 reruns the whole suite and
// compares the bytes. Exit status is 0 only when every criterion passes.

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "meshpoc/assignment.hpp"
#include "meshpoc/error.hpp"
#include "meshpoc/metrics.hpp"
#include "meshpoc/routing.hpp"
#include "meshpoc/simulation.hpp"
#include "meshpoc/text_format.hpp"
#include "oracles.hpp"

using namespace meshpoc;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Artifacts = std::map<std::string, std::string>;

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

// ---- 1. formula exactness ---------------------------------------------------

Big big(double v) { return Big(v); }
Big big_pow(const Big& b, const Big& e) { return boost::multiprecision::pow(b, e); }
Big big_mw(double dbm) { return big_pow(Big(10), big(dbm) / 10); }

double rel_err(double got, const Big& want) {
  if (want == 0) return got == 0.0 ? 0.0 : 1.0;
  return static_cast<double>(boost::multiprecision::abs((big(got) - want) / want));
}

Outcome formula_exactness(Artifacts& art) {
  std::mt19937_64 rng(1);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto uint = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  std::map<std::string, double> worst;
  auto note = [&](const std::string& name, double err) { worst[name] = std::max(worst[name], err); };

  for (int i = 0; i < 20; ++i) {
    const double df = uni(0.05, 1.0);
    const double dr = uni(0.05, 1.0);
    note("etx", rel_err(etx(df, dr), Big(1) / (big(df) * big(dr))));

    const double n = uni(1.0, 50.0);
    const double s = uni(500.0, 12000.0);
    const double b = uni(1e6, 54e6);
    note("ett", rel_err(ett(n, s, b), big(n) * big(s) / big(b)));

    std::vector<EttOnChannel> path;
    const int hops = uint(1, 6);
    for (int h = 0; h < hops; ++h) path.push_back({uni(1e-4, 1e-2), uint(1, 11)});
    const double a = uni(0.0, 1.0);
    Big sum = 0;
    std::map<int, Big> per;
    for (const auto& hop : path) {
      sum += big(hop.ett);
      per[hop.channel] += big(hop.ett);
    }
    Big mx = 0;
    for (const auto& [c, x] : per) mx = std::max(mx, x);
    note("wcett", rel_err(wcett(path, a, 11), (1 - big(a)) * sum + big(a) * mx));

    const double snr = uni(0.0, 1e5);
    const double bw = uni(1e6, 40e6);
    note("capacity", rel_err(shannon_capacity(snr, bw),
                             big(bw) * boost::multiprecision::log(1 + big(snr)) / boost::multiprecision::log(Big(2))));

    // SINR on a random layout with up to six interferers.
    PhyParams p;
    p.tx_power_dbm = uni(10, 30);
    p.noise_dbm = uni(-100, -80);
    p.path_loss_exp = uni(2.0, 4.0);
    std::vector<Node> nodes{{0, {0, 0}, 1, true}, {1, {uni(1, 250), uni(-50, 50)}, 1, false}};
    const int nz = uint(0, 6);
    for (int k = 0; k < nz; ++k) nodes.push_back({k + 2, {uni(-600, 600), uni(-600, 600)}, 1, false});
    std::vector<Link> links;
    if (nodes[1].pos.norm() <= 250) links.push_back({0, 0, 1});
    else nodes[1].pos = nodes[1].pos.normalized() * 200;
    if (links.empty()) links.push_back({0, 0, 1});
    const Topology t(nodes, links, 250, 550);
    const int c = uint(1, 11);
    std::vector<Interferer> z;
    Big interf = big_mw(p.noise_dbm);
    const Big P = big_mw(p.tx_power_dbm);
    for (int k = 0; k < nz; ++k) {
      const int zc = uint(1, 11);
      z.push_back({k + 2, zc});
      const Position d = nodes[static_cast<std::size_t>(k + 2)].pos - nodes[1].pos;
      const Big dist = boost::multiprecision::sqrt(big(d.x()) * big(d.x()) + big(d.y()) * big(d.y()));
      if (dist > 550) continue;
      const Big ov = std::max(Big(0), 1 - Big(std::abs(c - zc)) / 5);
      interf += ov * P * big_pow(dist, -big(p.path_loss_exp));
    }
    const Position d0 = nodes[1].pos;
    const Big dist0 = boost::multiprecision::sqrt(big(d0.x()) * big(d0.x()) + big(d0.y()) * big(d0.y()));
    const Big want_sinr = P * big_pow(dist0, -big(p.path_loss_exp)) / interf;
    const double got_sinr = sinr(1, 0, c, z, t, p);
    note("sinr", rel_err(got_sinr, want_sinr));

    // Feasibility at beta and the beta / sinr cost.
    const double beta_db = uni(-15, 15);
    const Big beta = big_pow(Big(10), big(beta_db) / 10);
    const auto cost = sinr_cost(got_sinr, db_to_linear(beta_db));
    const bool feasible = big(got_sinr) >= beta;
    if (cost.has_value() != feasible) note("sinr_cost", 1.0);
    else if (cost) note("sinr_cost", rel_err(*cost, beta / big(got_sinr)));
    else note("sinr_cost", 0.0);

    const double dd = uni(1, 600);
    const double al = uni(2, 4);
    note("path_gain", rel_err(path_gain(dd, al), big_pow(big(dd), -big(al))));
    const double db = uni(-120, 40);
    note("db_to_linear", rel_err(db_to_linear(db), big_pow(Big(10), big(db) / 10)));
  }

  std::ostringstream csv;
  csv << "formula,max_rel_err\n";
  bool ok = true;
  std::string detail;
  for (const auto& [name, err] : worst) {
    csv << name << ',' << text::format_double(err) << '\n';
    ok = ok && err <= 1e-9;
    detail += name + "=" + fmt(err, 2) + " ";
  }
  art["formula_errors.csv"] = csv.str();
  return {ok, "max rel err: " + detail + "(limit 1e-9)"};
}

// ---- 2. coloring validity ---------------------------------------------------

// Six routers as a 2x3 block at 200 m; L1 is the middle rung 1-4 and
// every other link sits within interference range of it.
Topology cluster_layout() {
  std::vector<Node> nodes;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) nodes.push_back({r * 3 + c, {200.0 * c, 200.0 * r}, 3, r * 3 + c == 0});
  }
  const std::vector<Link> links{{0, 1, 4}, {1, 0, 1}, {2, 1, 2}, {3, 3, 4}, {4, 4, 5}, {5, 0, 3}, {6, 2, 5}};
  return Topology(nodes, links, 250, 550);
}

Outcome coloring_validity(Artifacts& art) {
  PhyParams p;
  p.channels = 11;
  const Topology t = cluster_layout();
  const auto r = assign_channels(t, p, {{0, 9}});
  std::ostringstream a;
  write_assignment(a, r.assignment);
  art["cluster_assignment.txt"] = a.str();

  int near_l1 = 0;
  bool cluster_ok = r.assignment[0] == 9;
  for (const Link& f : t.links()) {
    if (f.id == 0) continue;
    bool within = false;
    for (NodeId x : {t.link(0).a, t.link(0).b}) {
      for (NodeId y : {f.a, f.b}) within = within || oracle::dist(t, x, y) <= t.int_range();
    }
    if (!within) continue;
    ++near_l1;
    cluster_ok = cluster_ok && r.assignment[f.id] != 9;
  }
  cluster_ok = cluster_ok && hard_violation_count(validate_assignment(t, p, r.assignment)) == 0;

  std::ostringstream csv;
  csv << "seed,links,violations,hard\n";
  std::size_t hard_total = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Topology rt = random_connected_topology({}, seed);
    const auto ra = assign_channels(rt, p);
    const auto v = validate_assignment(rt, p, ra.assignment);
    const std::size_t h = hard_violation_count(v);
    hard_total += h;
    csv << seed << ',' << rt.link_count() << ',' << v.size() << ',' << h << '\n';
  }
  art["random_violations.csv"] = csv.str();
  return {cluster_ok && hard_total == 0,
          "cluster: L1=ch" + std::to_string(r.assignment[0]) + ", " + std::to_string(near_l1) +
              " links in range avoid ch9: " + (cluster_ok ? "yes" : "no") +
              "; 100 random topologies: " + std::to_string(hard_total) + " hard violations"};
}

// ---- 3. oracle dominance ----------------------------------------------------

Outcome oracle_dominance(Artifacts& art) {
  std::ostringstream csv;
  csv << "seed,K,links,max_degree,oracle_score,greedy_score,greedy_hard\n";
  int dominated = 0;
  int clean_needed = 0;
  int clean = 0;
  int oracle_agree = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t seed = 5000 + static_cast<std::uint64_t>(i);
    const Topology t = gen::small_topology(seed);
    PhyParams p;
    p.channels = i % 2 == 0 ? 2 : 3;
    const auto bf = brute_force_assign(t, p, p.channels);
    const auto g = assign_channels(t, p);
    const double gs = interference_score(t, p, g.assignment);
    const double ind = static_cast<double>(oracle::min_score(t, p, p.channels));
    oracle_agree += std::abs(bf.score - ind) <= 1e-12 * std::max(1.0, ind);
    dominated += bf.score <= gs * (1 + 1e-12);
    const int d = chromatic_bounds(t).max_degree;
    const std::size_t hard = hard_violation_count(validate_assignment(t, p, g.assignment));
    if (p.channels >= d + 1) {
      ++clean_needed;
      clean += hard == 0;
    }
    csv << seed << ',' << p.channels << ',' << t.link_count() << ',' << d << ','
        << text::format_double(bf.score) << ',' << text::format_double(gs) << ',' << hard << '\n';
  }
  art["oracle_dominance.csv"] = csv.str();
  return {dominated == n && clean == clean_needed && oracle_agree == n,
          "oracle <= greedy on " + std::to_string(dominated) + "/" + std::to_string(n) +
              "; brute force = independent optimum on " + std::to_string(oracle_agree) + "/" +
              std::to_string(n) + "; validator-clean " + std::to_string(clean) + "/" +
              std::to_string(clean_needed) + " with K >= d+1"};
}

// ---- 4 & 5. routing exactness and flow feasibility ---------------------------

struct RoutingInstance {
  Topology topology;
  InterferenceDb db;
  LinkCosts costs;
};

std::vector<RoutingInstance> routing_instances() {
  std::vector<RoutingInstance> out;
  for (int i = 0; i < 50; ++i) {
    gen::SmallSpec spec;
    spec.min_nodes = 5;
    spec.max_nodes = 10;
    spec.max_links = 20;
    spec.area = 600;
    spec.min_radios = 2;
    const Topology t = gen::small_topology(9000 + static_cast<std::uint64_t>(i), spec);
    PhyParams p;
    p.channels = 3 + i % 9;
    auto ar = assign_channels(t, p);
    LinkCosts c = sinr_link_costs(t, ar.db, p);
    out.push_back({t, std::move(ar.db), std::move(c)});
  }
  return out;
}

Outcome routing_exactness(const std::vector<RoutingInstance>& inst, Artifacts& art) {
  std::ostringstream csv;
  csv << "instance,source,cost,path\n";
  int compared = 0;
  int equal = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto& [t, db, costs] = inst[i];
    for (NodeId s = 0; s < t.node_count(); ++s) {
      if (t.node(s).is_gateway) continue;
      ++compared;
      const auto want = oracle::best_path(t, costs, s);
      std::optional<PathResult> lib_oracle;
      std::optional<PathResult> got;
      try {
        got = shortest_route(t, costs, s);
      } catch (const NoFeasiblePath&) {
      }
      try {
        lib_oracle = enumerate_paths_oracle(t, costs, s);
      } catch (const NoFeasiblePath&) {
      }
      bool same = got.has_value() == want.has_value() && lib_oracle.has_value() == want.has_value();
      if (same && got) {
        same = got->path == lib_oracle->path && got->cost == lib_oracle->cost &&
               got->path == want->nodes && got->cost == want->cost;
      }
      equal += same;
      csv << i << ',' << s << ',';
      if (got) {
        csv << text::format_double(got->cost) << ',';
        for (std::size_t k = 0; k < got->path.size(); ++k) csv << (k ? "/" : "") << got->path[k];
      } else {
        csv << "inf,";
      }
      csv << '\n';
    }
  }
  art["routing_exactness.csv"] = csv.str();
  return {equal == compared, std::to_string(equal) + "/" + std::to_string(compared) +
                                 " sources match exhaustive enumeration (path, cost, tie-break)"};
}

Outcome flow_feasibility(const std::vector<RoutingInstance>& inst, Artifacts& art) {
  std::ostringstream csv;
  int ok = 0;
  int attempted = 0;
  int succeeded = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto& [t, db, costs] = inst[i];
    std::vector<Demand> demands;
    for (NodeId n = 0; n < t.node_count(); ++n) {
      if (!t.node(n).is_gateway) demands.push_back({n, 1'000'000});
    }
    ++attempted;
    RoutePlan plan;
    try {
      plan = route_all(t, db, costs, demands);
    } catch (const Error&) {
      continue;
    }
    ++succeeded;
    const FlowCheckReport rep = check_flow(plan, t, db, demands);
    ok += rep.feasible();
    csv << "# instance " << i << '\n';
    write_flows_csv(csv, plan, db);
  }
  art["flows.csv"] = csv.str();
  return {succeeded > 0 && ok == succeeded,
          std::to_string(ok) + "/" + std::to_string(succeeded) + " successful plans feasible (" +
              std::to_string(attempted - succeeded) + " of " + std::to_string(attempted) +
              " instances had an unroutable or saturated source)"};
}

// ---- 6-9. grid scenario trends ----------------------------------------------

const SimRow& row_of(const SimReport& r, int k, RoutingMetric m) {
  for (const auto& row : r.rows) {
    if (row.point.channels == k && row.metric == m) return row;
  }
  throw std::logic_error("missing row");
}

Outcome pdr_trend(const SimReport& grid) {
  bool mono = true;
  bool floor = true;
  std::string detail = "PDR(K=1..11):";
  double prev = -1;
  for (int k = 1; k <= 11; ++k) {
    const double pdr = row_of(grid, k, RoutingMetric::Sinr).pdr;
    detail += " " + fmt(pdr, 3);
    if (prev >= 0 && pdr < prev - 0.02) mono = false;
    if (k >= 4 && pdr < 0.85) floor = false;
    prev = std::max(prev, pdr);
  }
  return {mono && floor, detail + (mono ? "; non-decreasing within 2 pp" : "; drops > 2 pp") +
                             (floor ? "; >= 0.85 for K >= 4" : "; below 0.85 for some K >= 4")};
}

Outcome capacity_trend(const SimReport& grid) {
  const double c3 = row_of(grid, 3, RoutingMetric::Sinr).agg_capacity_bps;
  const double c11 = row_of(grid, 11, RoutingMetric::Sinr).agg_capacity_bps;
  return {c11 >= 1.2 * c3, "capacity K=3 " + fmt(c3 / 1e6) + " Mb/s, K=11 " + fmt(c11 / 1e6) +
                               " Mb/s (ratio " + fmt(c11 / c3, 3) + ", need >= 1.2)"};
}

Outcome radios_trend(Artifacts& art) {
  Scenario s = grid_reference_scenario();
  s.sweep = {{11, 1}, {11, 3}};
  const SimReport r = run_scenario(s);
  std::ostringstream csv;
  write_report_csv(csv, r);
  art["radios_k11.csv"] = csv.str();
  const double t1 = r.rows.at(0).throughput_bps;
  const double t3 = r.rows.at(1).throughput_bps;
  return {t3 >= t1, "throughput at K=11: R=1 " + fmt(t1 / 1e6) + " Mb/s, R=3 " + fmt(t3 / 1e6) + " Mb/s"};
}

Outcome metric_comparison(const SimReport& grid) {
  bool ok = true;
  std::string detail = "overhead sinr/etx/ett:";
  std::vector<int> losses;
  for (int k = 4; k <= 11; ++k) {
    const double s = row_of(grid, k, RoutingMetric::Sinr).overhead_retx;
    const double x = row_of(grid, k, RoutingMetric::Etx).overhead_retx;
    const double t = row_of(grid, k, RoutingMetric::Ett).overhead_retx;
    detail += " K" + std::to_string(k) + "=" + fmt(s, 3) + "/" + fmt(x, 3) + "/" + fmt(t, 3);
    if (!(s <= x && s <= t)) {
      ok = false;
      losses.push_back(k);
    }
  }
  if (!losses.empty()) {
    detail += "; sinr higher at K=";
    for (std::size_t i = 0; i < losses.size(); ++i) detail += (i ? "," : "") + std::to_string(losses[i]);
  }
  return {ok, detail};
}

// ---- 10. detour ------------------------------------------------------------

Outcome detour(Artifacts& art) {
  Scenario s = grid_reference_scenario();
  const Topology grid = grid_topology(s.topology.grid);
  s.pins = corridor_interference_pins(grid);
  const SweepState st = prepare_sweep_point(s, {11, 3});
  const PathResult sinr_route = shortest_route(st.topology, st.assignment.db, st.phy, 14);
  const LinkCosts hop = link_costs(st.topology, st.assignment.db, st.phy, RoutingMetric::HopCount);
  const PathResult hop_route = shortest_route(st.topology, hop, 14);

  bool above_beta = true;
  for (std::size_t i = 0; i + 1 < sinr_route.path.size(); ++i) {
    const LinkId l = *st.topology.link_between(sinr_route.path[i], sinr_route.path[i + 1]);
    above_beta = above_beta && st.assignment.db[l].sinr_min() >= st.phy.beta_linear();
  }
  auto show = [](const std::vector<NodeId>& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "-" : "") + std::to_string(p[i]);
    return s;
  };
  RoutePlan plan;
  plan.routes.push_back({14, 1'000'000, sinr_route});
  plan.routes.push_back({14, 1'000'000, hop_route});
  std::ostringstream csv;
  write_routes_csv(csv, plan);
  art["detour_routes.csv"] = csv.str();

  const bool hop_ok = hop_route.path == std::vector<NodeId>{14, 10, 6, 2};
  return {hop_ok && sinr_route.path != hop_route.path && above_beta,
          "sinr route " + show(sinr_route.path) + ", hop-count route " + show(hop_route.path) +
              (above_beta ? "; every sinr hop >= beta" : "; a sinr hop is below beta")};
}

// ---- 11. Monte Carlo ---------------------------------------------------------

Outcome monte_carlo(Artifacts& art) {
  const std::vector<std::vector<double>> paths{
      {0.95}, {0.9, 0.8}, {0.7, 0.9, 0.85}, {0.5}, {0.99, 0.6, 0.9, 0.8}};
  const SimParams sim;
  std::ostringstream csv;
  csv << "path,pdr_closed,pdr_mc,overhead_closed,overhead_mc\n";
  double worst = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::vector<double> util(paths[i].size(), 0.0);
    const PathStats st = evaluate_path(paths[i], util, sim);
    const auto mc = oracle::simulate_path(paths[i], sim.retx_cap, 100000, 31 + i);
    const double oh_closed = st.retransmissions / st.pdr;
    const double oh_mc = mc.retx / mc.pdr;
    worst = std::max({worst, std::abs(st.pdr - mc.pdr), std::abs(oh_closed - oh_mc)});
    csv << i << ',' << text::format_double(st.pdr) << ',' << text::format_double(mc.pdr) << ','
        << text::format_double(oh_closed) << ',' << text::format_double(oh_mc) << '\n';
  }
  art["montecarlo.csv"] = csv.str();
  return {worst <= 0.01, "max |closed - simulated| = " + fmt(worst, 3) + " over 5 paths (limit 0.01)"};
}

// ---- driver -------------------------------------------------------------------

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome(Artifacts&)> run;
};

struct SuiteResult {
  std::vector<std::pair<Outcome, double>> outcomes;
  Artifacts artifacts;
};

SuiteResult run_suite(const std::vector<Criterion>& criteria) {
  SuiteResult r;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(r.artifacts);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && dt > c.limit_s) {
      o.pass = false;
      o.detail += "; runtime " + fmt(dt, 3) + " s exceeds " + fmt(c.limit_s) + " s";
    }
    r.outcomes.emplace_back(o, dt);
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out_dir = argc > 1 ? argv[1] : "acceptance_out";

  std::vector<RoutingInstance> instances;
  SimReport grid;
  const std::vector<Criterion> criteria{
      {1, "formula exactness", 1.0, formula_exactness},
      {2, "coloring validity", 10.0, coloring_validity},
      {3, "oracle dominance", 60.0, oracle_dominance},
      {4, "routing exactness", 30.0,
       [&](Artifacts& a) {
         instances = routing_instances();
         return routing_exactness(instances, a);
       }},
      {5, "flow feasibility", 0.0, [&](Artifacts& a) { return flow_feasibility(instances, a); }},
      {6, "pdr trend", 30.0,
       [&](Artifacts& a) {
         grid = compare_metrics(grid_reference_scenario());
         std::ostringstream csv;
         write_report_csv(csv, grid);
         a["grid_compare.csv"] = csv.str();
         return pdr_trend(grid);
       }},
      {7, "capacity trend", 30.0, [&](Artifacts&) { return capacity_trend(grid); }},
      {8, "throughput vs radios", 0.0, radios_trend},
      {9, "metric comparison", 0.0, [&](Artifacts&) { return metric_comparison(grid); }},
      {10, "detour reproduction", 0.0, detour},
      {11, "monte-carlo cross-check", 0.0, monte_carlo},
  };

  const SuiteResult first = run_suite(criteria);
  const SuiteResult second = run_suite(criteria);

  std::filesystem::create_directories(out_dir);
  for (const auto& [name, bytes] : first.artifacts) {
    std::ofstream(out_dir / name, std::ios::binary) << bytes;
  }

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [o, dt] = first.outcomes[i];
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << criteria[i].id << "] " << criteria[i].name << ": "
              << o.detail << " (" << fmt(dt, 3) << " s)\n";
  }

  std::size_t differing = 0;
  for (const auto& [name, bytes] : first.artifacts) {
    const auto it = second.artifacts.find(name);
    differing += it == second.artifacts.end() || it->second != bytes;
  }
  differing += first.artifacts.size() != second.artifacts.size();
  const bool det = differing == 0;
  failed += !det;
  std::cout << (det ? "PASS" : "FAIL") << " [12] determinism: " << first.artifacts.size()
            << " CSV artifacts, " << differing << " differ between two full runs\n";

  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << '\n';
  return failed == 0 ? 0 : 1;
}
