#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "meshpoc/assignment.hpp"
#include "meshpoc/error.hpp"
#include "meshpoc/routing.hpp"
#include "meshpoc/simulation.hpp"
#include "meshpoc/text_format.hpp"
#include "meshpoc/topology.hpp"

#ifndef MESHPOC_VERSION
#define MESHPOC_VERSION "0.0.0"
#endif

namespace meshpoc::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// PHY overrides shared by every subcommand; unset flags keep the defaults.
struct PhyFlags {
  std::optional<int> channels;
  std::optional<double> alpha;
  std::optional<double> beta_db;
  std::optional<double> noise_dbm;
  std::optional<double> tx_power_dbm;
  std::optional<double> bandwidth_hz;
  std::optional<std::string> overlap_model;

  void add_to(CLI::App& app) {
    app.add_option("--channels", channels, "Number of channels K");
    app.add_option("--alpha", alpha, "Path-loss exponent");
    app.add_option("--beta-db", beta_db, "SINR threshold in dB");
    app.add_option("--noise-dbm", noise_dbm, "Thermal noise in dBm");
    app.add_option("--tx-power-dbm", tx_power_dbm, "Transmit power in dBm");
    app.add_option("--bandwidth-hz", bandwidth_hz, "Channel bandwidth in Hz");
    app.add_option("--overlap-model", overlap_model, "Spectral overlap model (linear5)");
  }

  void apply(PhyParams& p) const {
    if (channels) p.channels = *channels;
    if (alpha) p.path_loss_exp = *alpha;
    if (beta_db) p.sinr_threshold_db = *beta_db;
    if (noise_dbm) p.noise_dbm = *noise_dbm;
    if (tx_power_dbm) p.tx_power_dbm = *tx_power_dbm;
    if (bandwidth_hz) p.bandwidth_hz = *bandwidth_hz;
    if (overlap_model) {
      try {
        p.orthogonal_sep = parse_overlap_model(*overlap_model);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

std::string describe(const PhyParams& p) {
  using text::format_double;
  return "channels=" + std::to_string(p.channels) + " alpha=" + format_double(p.path_loss_exp) +
         " beta_db=" + format_double(p.sinr_threshold_db) +
         " noise_dbm=" + format_double(p.noise_dbm) +
         " tx_power_dbm=" + format_double(p.tx_power_dbm) +
         " bandwidth_hz=" + format_double(p.bandwidth_hz) +
         " overlap_model=" + overlap_model_name(p);
}

// Buffers every output and only touches the filesystem once the command
// has succeeded; a failed write removes whatever was already written.
class Outputs {
 public:
  explicit Outputs(std::vector<std::string> header) : header_(std::move(header)) {}

  std::ostringstream& open(const std::string& path) {
    files_.push_back({path, std::make_unique<std::ostringstream>()});
    auto& os = *files_.back().buf;
    for (const auto& h : header_) os << "# " << h << '\n';
    return os;
  }

  void commit() {
    std::vector<std::string> written;
    try {
      for (const auto& f : files_) {
        std::ofstream out(f.path, std::ios::binary);
        if (!out) throw Error("cannot open '" + f.path + "' for writing");
        written.push_back(f.path);
        out << f.buf->str();
        if (!out) throw Error("write to '" + f.path + "' failed");
      }
    } catch (...) {
      for (const auto& p : written) {
        std::error_code ec;
        std::filesystem::remove(p, ec);
      }
      throw;
    }
  }

 private:
  struct File {
    std::string path;
    std::unique_ptr<std::ostringstream> buf;
  };
  std::vector<std::string> header_;
  std::vector<File> files_;
};

std::vector<std::string> base_header(const std::string& command, const std::string& config,
                                     const std::vector<std::string>& inputs) {
  std::vector<std::string> h;
  h.push_back(std::string("meshpoc ") + MESHPOC_VERSION);
  h.push_back("command: " + command);
  h.push_back("config: " + config);
  for (const auto& in : inputs) {
    const auto digest = text::file_digest(in);
    h.push_back("input: " + in + " fnv1a64=" + (digest ? text::hex64(*digest) : "unreadable"));
  }
  return h;
}

std::vector<Demand> parse_sources(const std::vector<std::string>& specs) {
  std::vector<Demand> out;
  for (const auto& s : specs) {
    const auto parts = text::split(s, ':');
    if (parts.size() != 2) throw UsageError("--source expects <node>:<demand_bps>, got '" + s + "'");
    try {
      out.push_back({static_cast<NodeId>(text::parse_int(parts[0], 0)), text::parse_int(parts[1], 0)});
    } catch (const ParseError&) {
      throw UsageError("--source expects <node>:<demand_bps>, got '" + s + "'");
    }
    if (out.back().bps <= 0) throw UsageError("--source demand must be > 0");
  }
  return out;
}

std::string join_ids(const std::vector<NodeId>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return s;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::optional<int> side;
  double spacing = 200.0;
  double tx = 250.0;
  double int_range = 550.0;
  std::vector<NodeId> gw;
  std::optional<int> n;
  double width = 1000.0;
  double height = 1000.0;
  int gateways = 2;
  int radios = 3;
  std::uint64_t seed = 1;
  int attempts = 1;
  std::string out;
};

void add_gen(CLI::App& app, GenArgs& a) {
  app.add_option("--kind", a.kind, "grid | random")->required()->check(CLI::IsMember({"grid", "random"}));
  app.add_option("--side", a.side, "Grid side length in nodes");
  app.add_option("--spacing", a.spacing, "Grid spacing in meters");
  app.add_option("--tx", a.tx, "Transmission range in meters");
  app.add_option("--int", a.int_range, "Interference range in meters");
  app.add_option("--gw", a.gw, "Gateway node ids (grid)")->delimiter(',');
  app.add_option("--n", a.n, "Node count (random)");
  app.add_option("--width", a.width, "Area width in meters (random)");
  app.add_option("--height", a.height, "Area height in meters (random)");
  app.add_option("--gateways", a.gateways, "Gateway count (random)");
  app.add_option("--radios", a.radios, "Radios per node");
  app.add_option("--seed", a.seed, "Random seed");
  app.add_option("--attempts", a.attempts, "Seeds to try until the random graph is connected");
  app.add_option("--out", a.out, "Output topology file")->required();
}

int run_gen(const GenArgs& a) {
  Topology t = [&] {
    if (a.kind == "grid") {
      if (!a.side) throw UsageError("--kind grid requires --side");
      GridParams g{*a.side, a.spacing, a.tx, a.int_range, a.radios, a.gw};
      if (g.gateways.empty()) g.gateways = {0};
      return grid_topology(g);
    }
    if (!a.n) throw UsageError("--kind random requires --n");
    RandomParams r{*a.n, a.width, a.height, a.tx, a.int_range, a.radios, a.gateways};
    return random_connected_topology(r, a.seed, std::max(1, a.attempts));
  }();

  using text::format_double;
  std::string config = "kind=" + a.kind + " tx=" + format_double(a.tx) +
                       " int=" + format_double(a.int_range) + " radios=" + std::to_string(a.radios);
  if (a.kind == "grid") {
    config += " side=" + std::to_string(*a.side) + " spacing=" + format_double(a.spacing) +
              " gw=" + join_ids(t.gateways());
  } else {
    config += " n=" + std::to_string(*a.n) + " width=" + format_double(a.width) +
              " height=" + format_double(a.height) + " gateways=" + std::to_string(a.gateways) +
              " seed=" + std::to_string(a.seed) + " attempts=" + std::to_string(a.attempts);
  }
  Outputs outs(base_header("gen", config, {}));
  write_topology(outs.open(a.out), t);
  outs.commit();
  return kExitOk;
}

// ---- assign / route ----------------------------------------------------------

struct AssignArgs {
  std::string topology;
  std::optional<int> radios;
  PhyFlags phy;
  std::string out;
  std::string db;
};

Topology load_with_radios(const std::string& path, std::optional<int> radios) {
  Topology t = load_topology(path);
  if (radios) {
    if (*radios < 1) throw UsageError("--radios must be >= 1");
    t = t.with_radios(*radios);
  }
  return t;
}

int run_assign(const AssignArgs& a) {
  PhyParams p;
  a.phy.apply(p);
  const Topology t = load_with_radios(a.topology, a.radios);
  const AssignmentResult ar = assign_channels(t, p);

  std::string config = describe(p);
  if (a.radios) config += " radios=" + std::to_string(*a.radios);
  Outputs outs(base_header("assign", config, {a.topology}));
  write_assignment(outs.open(a.out), ar.assignment);
  if (!a.db.empty()) write_interference_csv(outs.open(a.db), ar.db);
  outs.commit();

  const auto violations = validate_assignment(t, p, ar.assignment);
  std::cerr << "assigned " << t.link_count() << " links; " << hard_violation_count(violations)
            << " hard violations, " << violations.size() << " total\n";
  return kExitOk;
}

struct RouteArgs {
  std::string topology;
  std::string assignment;
  std::optional<int> radios;
  PhyFlags phy;
  std::string metric = "sinr";
  std::vector<std::string> sources;
  std::string out;
  std::string flows;
};

int run_route(const RouteArgs& a) {
  PhyParams p;
  a.phy.apply(p);
  RoutingMetric metric;
  try {
    metric = parse_routing_metric(a.metric);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto sources = parse_sources(a.sources);
  if (sources.empty()) throw UsageError("route needs at least one --source");

  const Topology t = load_with_radios(a.topology, a.radios);
  std::vector<std::string> inputs{a.topology};
  ChannelAssignment ca;
  InterferenceDb db;
  if (a.assignment.empty()) {
    auto ar = assign_channels(t, p);
    ca = std::move(ar.assignment);
    db = std::move(ar.db);
  } else {
    std::ifstream in(a.assignment, std::ios::binary);
    if (!in) throw Error("cannot open '" + a.assignment + "'");
    ca = read_assignment(in, t);
    db = compute_interference_db(t, ca, p);
    inputs.push_back(a.assignment);
  }
  for (const auto& d : sources) {
    if (d.node < 0 || d.node >= t.node_count()) {
      throw UsageError("source " + std::to_string(d.node) + " is not a node");
    }
  }

  const RoutePlan plan = route_all(t, db, link_costs(t, db, p, metric), sources);

  std::string config = describe(p) + " metric=" + to_string(metric);
  if (a.radios) config += " radios=" + std::to_string(*a.radios);
  for (const auto& d : sources) config += " source=" + std::to_string(d.node) + ":" + std::to_string(d.bps);
  Outputs outs(base_header("route", config, inputs));
  write_routes_csv(outs.open(a.out), plan);
  if (!a.flows.empty()) write_flows_csv(outs.open(a.flows), plan, db);
  outs.commit();
  return kExitOk;
}

// ---- sim / compare -------------------------------------------------------------

struct SimArgs {
  std::string scenario;
  PhyFlags phy;
  std::optional<int> radios;
  std::optional<std::string> metric;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_sim(CLI::App& app, SimArgs& a, bool with_metric) {
  app.add_option("--scenario", a.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  a.phy.add_to(app);
  app.add_option("--radios", a.radios, "Override the radio count of every sweep point");
  if (with_metric) app.add_option("--metric", a.metric, "sinr | etx | ett | hopcount");
  app.add_option("--seed", a.seed, "Override the scenario seed");
  app.add_option("--out", a.out, "Report CSV")->required();
}

int run_sim(const SimArgs& a, bool compare) {
  Scenario s = load_scenario(a.scenario);
  a.phy.apply(s.phy);
  for (auto& pt : s.sweep) {
    if (a.phy.channels) pt.channels = *a.phy.channels;
    if (a.radios) pt.radios = *a.radios;
  }
  // Overrides can collapse sweep points onto each other.
  std::vector<SweepPoint> unique;
  for (const auto& pt : s.sweep) {
    if (std::find(unique.begin(), unique.end(), pt) == unique.end()) unique.push_back(pt);
  }
  s.sweep = std::move(unique);
  if (a.metric) {
    try {
      s.metrics = {parse_routing_metric(*a.metric)};
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (a.seed) s.seed = *a.seed;

  const SimReport report = compare ? compare_metrics(s) : run_scenario(s);

  std::string config = describe(s.phy) + " seed=" + std::to_string(s.seed) + " metrics=";
  const auto& metrics = compare ? std::vector<RoutingMetric>{RoutingMetric::Sinr, RoutingMetric::Etx,
                                                             RoutingMetric::Ett, RoutingMetric::HopCount}
                                : s.metrics;
  for (std::size_t i = 0; i < metrics.size(); ++i) config += (i ? "," : "") + to_string(metrics[i]);
  config += " sweep=";
  for (std::size_t i = 0; i < s.sweep.size(); ++i) {
    config += (i ? "," : "") + std::string("K") + std::to_string(s.sweep[i].channels) + "R" +
              std::to_string(s.sweep[i].radios);
  }
  config += " retx_cap=" + std::to_string(s.sim.retx_cap) +
            " margin_db=" + text::format_double(s.sim.link.margin_db) +
            " queue_coeff=" + text::format_double(s.sim.queue_coeff);
  Outputs outs(base_header(compare ? "compare" : "sim", config, {a.scenario}));
  write_report_csv(outs.open(a.out), report);
  outs.commit();
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Channel assignment, SINR routing and flow-level simulation for multi-radio mesh networks"};
  app.set_version_flag("--version", std::string("meshpoc ") + MESHPOC_VERSION);
  app.require_subcommand(1);

  GenArgs gen;
  add_gen(*app.add_subcommand("gen", "Generate a grid or random topology"), gen);

  AssignArgs assign;
  auto* assign_cmd = app.add_subcommand("assign", "Assign channels to every link");
  assign_cmd->add_option("--topology", assign.topology, "Topology file")->required()->check(CLI::ExistingFile);
  assign_cmd->add_option("--radios", assign.radios, "Override radios per node");
  assign.phy.add_to(*assign_cmd);
  assign_cmd->add_option("--out", assign.out, "Assignment file")->required();
  assign_cmd->add_option("--db", assign.db, "Interference database CSV");

  RouteArgs route;
  auto* route_cmd = app.add_subcommand("route", "Route sources to gateways");
  route_cmd->add_option("--topology", route.topology, "Topology file")->required()->check(CLI::ExistingFile);
  route_cmd->add_option("--assignment", route.assignment, "Assignment file (assigned on the fly if absent)");
  route_cmd->add_option("--radios", route.radios, "Override radios per node");
  route.phy.add_to(*route_cmd);
  route_cmd->add_option("--metric", route.metric, "sinr | etx | ett | hopcount");
  route_cmd->add_option("--source", route.sources, "Traffic source <node>:<demand_bps>, repeatable");
  route_cmd->add_option("--out", route.out, "Route plan CSV")->required();
  route_cmd->add_option("--flows", route.flows, "Flow CSV");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("sim", "Simulate a scenario sweep");
  add_sim(*sim_cmd, sim, true);

  SimArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Simulate a scenario under every routing metric");
  add_sim(*cmp_cmd, cmp, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("gen")) return run_gen(gen);
    if (app.got_subcommand("assign")) return run_assign(assign);
    if (app.got_subcommand("route")) return run_route(route);
    if (app.got_subcommand("sim")) return run_sim(sim, false);
    if (app.got_subcommand("compare")) return run_sim(cmp, true);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace meshpoc::cli
