#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "meshpoc/error.hpp"
#include "meshpoc/simulation.hpp"
#include "meshpoc/text_format.hpp"

namespace meshpoc {

namespace {

// Accepts "7" or an inclusive range "1..11".
std::pair<int, int> parse_int_range(std::string_view v, std::size_t line) {
  const auto dots = v.find("..");
  if (dots == std::string_view::npos) {
    const auto x = static_cast<int>(text::parse_int(v, line));
    return {x, x};
  }
  const auto lo = static_cast<int>(text::parse_int(v.substr(0, dots), line));
  const auto hi = static_cast<int>(text::parse_int(v.substr(dots + 2), line));
  if (hi < lo) throw ParseError(line, "empty range '" + std::string(v) + "'");
  return {lo, hi};
}

void apply_phy(PhyParams& p, std::string_view key, std::string_view value, std::size_t line) {
  const auto num = [&] { return text::parse_double(value, line); };
  if (key == "tx_power_dbm") {
    p.tx_power_dbm = num();
  } else if (key == "noise_dbm") {
    p.noise_dbm = num();
  } else if (key == "alpha" || key == "path_loss_exp") {
    p.path_loss_exp = num();
  } else if (key == "beta_db" || key == "sinr_threshold_db") {
    p.sinr_threshold_db = num();
  } else if (key == "channels") {
    p.channels = static_cast<int>(text::parse_int(value, line));
  } else if (key == "bandwidth_hz") {
    p.bandwidth_hz = num();
  } else if (key == "orthogonal_sep") {
    p.orthogonal_sep = static_cast<int>(text::parse_int(value, line));
  } else if (key == "overlap_model") {
    try {
      p.orthogonal_sep = parse_overlap_model(value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
  } else {
    throw ParseError(line, "unknown phy key '" + std::string(key) + "'");
  }
}

void apply_sim(SimParams& s, std::string_view key, std::string_view value, std::size_t line) {
  const double v = text::parse_double(value, line);
  if (key == "retx_cap") {
    s.retx_cap = static_cast<int>(text::parse_int(value, line));
  } else if (key == "queue_coeff") {
    s.queue_coeff = v;
  } else if (key == "max_utilization") {
    s.max_utilization = v;
  } else if (key == "margin_db") {
    s.link.margin_db = v;
  } else if (key == "packet_bits") {
    s.link.packet_bits = v;
  } else if (key == "data_rate_bps") {
    s.link.data_rate_bps = v;
  } else {
    throw ParseError(line, "unknown sim key '" + std::string(key) + "'");
  }
}

std::vector<NodeId> parse_id_list(std::string_view v, std::size_t line) {
  std::vector<NodeId> out;
  for (auto part : text::split(v, ',')) {
    out.push_back(static_cast<NodeId>(text::parse_int(part, line)));
  }
  return out;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& base_dir) {
  Scenario s;
  s.metrics.clear();
  bool have_topology = false;
  std::set<RoutingMetric> seen_metrics;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (text::is_comment_or_blank(raw)) continue;
    const auto tok = text::split_ws(raw);
    const auto kind = tok[0];

    if (kind == "topology") {
      if (tok.size() < 2) throw ParseError(lineno, "topology needs a kind: grid|random|file");
      have_topology = true;
      const auto tkind = tok[1];
      if (tkind == "grid") {
        s.topology.kind = TopologySpec::Kind::Grid;
        auto& g = s.topology.grid;
        for (std::size_t i = 2; i < tok.size(); ++i) {
          auto [k, v] = text::parse_key_value(tok[i], lineno);
          if (k == "side") g.side = static_cast<int>(text::parse_int(v, lineno));
          else if (k == "spacing") g.spacing = text::parse_double(v, lineno);
          else if (k == "tx") g.tx_range = text::parse_double(v, lineno);
          else if (k == "int") g.int_range = text::parse_double(v, lineno);
          else if (k == "gw") g.gateways = parse_id_list(v, lineno);
          else throw ParseError(lineno, "unknown grid key '" + std::string(k) + "'");
        }
      } else if (tkind == "random") {
        s.topology.kind = TopologySpec::Kind::Random;
        auto& r = s.topology.random;
        for (std::size_t i = 2; i < tok.size(); ++i) {
          auto [k, v] = text::parse_key_value(tok[i], lineno);
          if (k == "n") r.n = static_cast<int>(text::parse_int(v, lineno));
          else if (k == "width") r.width = text::parse_double(v, lineno);
          else if (k == "height") r.height = text::parse_double(v, lineno);
          else if (k == "tx") r.tx_range = text::parse_double(v, lineno);
          else if (k == "int") r.int_range = text::parse_double(v, lineno);
          else if (k == "gateways") r.n_gateways = static_cast<int>(text::parse_int(v, lineno));
          else throw ParseError(lineno, "unknown random key '" + std::string(k) + "'");
        }
      } else if (tkind == "file") {
        if (tok.size() != 3) throw ParseError(lineno, "expected: topology file path=<file>");
        auto [k, v] = text::parse_key_value(tok[2], lineno);
        if (k != "path") throw ParseError(lineno, "expected: topology file path=<file>");
        std::filesystem::path path(std::string{v});
        if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
        s.topology.kind = TopologySpec::Kind::Fixed;
        s.topology.fixed = load_topology(path.string());
      } else {
        throw ParseError(lineno, "unknown topology kind '" + std::string(tkind) + "'");
      }
    } else if (kind == "source") {
      if (tok.size() != 3) throw ParseError(lineno, "expected: source <node> <demand_bps>");
      Demand d{static_cast<NodeId>(text::parse_int(tok[1], lineno)), text::parse_int(tok[2], lineno)};
      if (d.bps <= 0) throw ParseError(lineno, "demand must be > 0");
      s.sources.push_back(d);
    } else if (kind == "sweep") {
      std::pair<int, int> ks{0, -1};
      std::pair<int, int> rs{0, -1};
      for (std::size_t i = 1; i < tok.size(); ++i) {
        auto [k, v] = text::parse_key_value(tok[i], lineno);
        if (k == "K") ks = parse_int_range(v, lineno);
        else if (k == "R") rs = parse_int_range(v, lineno);
        else throw ParseError(lineno, "unknown sweep key '" + std::string(k) + "'");
      }
      if (ks.second < ks.first || rs.second < rs.first) {
        throw ParseError(lineno, "expected: sweep K=<k> R=<r>");
      }
      for (int k = ks.first; k <= ks.second; ++k) {
        for (int r = rs.first; r <= rs.second; ++r) s.sweep.push_back({k, r});
      }
    } else if (kind == "metric") {
      if (tok.size() != 2) throw ParseError(lineno, "expected: metric <name>");
      try {
        const auto m = parse_routing_metric(tok[1]);
        if (seen_metrics.insert(m).second) s.metrics.push_back(m);
      } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
      }
    } else if (kind == "phy" || kind == "sim") {
      for (std::size_t i = 1; i < tok.size(); ++i) {
        auto [k, v] = text::parse_key_value(tok[i], lineno);
        if (kind == "phy") apply_phy(s.phy, k, v, lineno);
        else apply_sim(s.sim, k, v, lineno);
      }
    } else if (kind == "pin") {
      if (tok.size() != 3) throw ParseError(lineno, "expected: pin <link_id> <channel>");
      s.pins[static_cast<LinkId>(text::parse_int(tok[1], lineno))] =
          static_cast<Channel>(text::parse_int(tok[2], lineno));
    } else if (kind == "seed") {
      if (tok.size() != 2) throw ParseError(lineno, "expected: seed <n>");
      const auto v = text::parse_int(tok[1], lineno);
      if (v < 0) throw ParseError(lineno, "seed must be >= 0");
      s.seed = static_cast<std::uint64_t>(v);
    } else if (kind == "duration") {
      if (tok.size() != 2) throw ParseError(lineno, "expected: duration <seconds>");
      s.duration_s = text::parse_double(tok[1], lineno);
    } else {
      throw ParseError(lineno, "unknown record '" + std::string(kind) + "'");
    }
  }

  if (!have_topology) throw ParseError(0, "scenario has no topology line");
  if (s.sweep.empty()) throw ParseError(0, "scenario has no sweep line");
  if (s.metrics.empty()) s.metrics.push_back(RoutingMetric::Sinr);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_scenario(in, std::filesystem::path(path).parent_path().string());
}

void write_report_csv(std::ostream& out, const SimReport& report) {
  using text::format_double;
  out << "K,R,metric,pdr,mean_delay_s,overhead_retx,throughput_bps,agg_capacity_bps\n";
  for (const SimRow& r : report.rows) {
    out << r.point.channels << ',' << r.point.radios << ',' << to_string(r.metric) << ','
        << format_double(r.pdr) << ',' << format_double(r.mean_delay_s) << ','
        << format_double(r.overhead_retx) << ',' << format_double(r.throughput_bps) << ','
        << format_double(r.agg_capacity_bps) << '\n';
  }
}

}  // namespace meshpoc
