#include "meshpoc/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "meshpoc/error.hpp"
#include "meshpoc/text_format.hpp"

namespace meshpoc {

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links, double tx_range,
                   double int_range)
    : nodes_(std::move(nodes)), links_(std::move(links)), tx_range_(tx_range),
      int_range_(int_range) {
  if (!(tx_range_ > 0.0)) throw TopologyError("tx_range must be positive");
  if (!(int_range_ >= tx_range_)) throw TopologyError("int_range must be >= tx_range");

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != static_cast<NodeId>(i)) {
      throw TopologyError("node ids must be contiguous from 0 (position " + std::to_string(i) +
                          " holds id " + std::to_string(nodes_[i].id) + ")");
    }
    if (nodes_[i].radios < 1) {
      throw TopologyError("node " + std::to_string(i) + " has fewer than one radio");
    }
  }

  incident_.assign(nodes_.size(), {});
  std::set<std::pair<NodeId, NodeId>> pairs;
  const auto n = static_cast<NodeId>(nodes_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& l = links_[i];
    const std::string name = "link " + std::to_string(l.id);
    if (l.id != static_cast<LinkId>(i)) {
      throw TopologyError("link ids must be contiguous from 0 (position " + std::to_string(i) +
                          " holds id " + std::to_string(l.id) + ")");
    }
    if (l.a < 0 || l.a >= n || l.b < 0 || l.b >= n) {
      throw TopologyError(name + " has a dangling endpoint");
    }
    if (l.a == l.b) throw TopologyError(name + " is a self loop");
    if (!pairs.emplace(std::min(l.a, l.b), std::max(l.a, l.b)).second) {
      throw TopologyError(name + " duplicates an existing node pair");
    }
    if (distance(l.a, l.b) > tx_range_) {
      throw TopologyError(name + " is longer than tx_range");
    }
    incident_[static_cast<std::size_t>(l.a)].push_back(l.id);
    incident_[static_cast<std::size_t>(l.b)].push_back(l.id);
  }
}

std::vector<NodeId> Topology::neighbors(NodeId n) const {
  std::vector<NodeId> out;
  for (LinkId l : incident_links(n)) out.push_back(link(l).other(n));
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<LinkId> Topology::link_between(NodeId u, NodeId v) const {
  for (LinkId l : incident_links(u)) {
    if (link(l).other(u) == v) return l;
  }
  return std::nullopt;
}

std::vector<NodeId> Topology::gateways() const {
  std::vector<NodeId> out;
  for (const Node& nd : nodes_) {
    if (nd.is_gateway) out.push_back(nd.id);
  }
  return out;
}

Topology Topology::with_radios(int radios) const {
  auto nodes = nodes_;
  for (Node& nd : nodes) nd.radios = radios;
  return Topology(std::move(nodes), links_, tx_range_, int_range_);
}

namespace {

std::vector<Link> links_within_range(const std::vector<Node>& nodes, double tx_range) {
  std::vector<Link> links;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if ((nodes[i].pos - nodes[j].pos).norm() <= tx_range) {
        links.push_back({static_cast<LinkId>(links.size()), nodes[i].id, nodes[j].id});
      }
    }
  }
  return links;
}

// 53 random bits scaled to [0, 1); independent of the standard library's
// distribution implementation so placements are portable.
double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::string describe_components(const std::vector<std::vector<NodeId>>& comps) {
  std::ostringstream os;
  os << comps.size() << " components:";
  for (const auto& c : comps) {
    os << " {";
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << "}";
  }
  return os.str();
}

}  // namespace

Topology grid_topology(const GridParams& p) {
  if (p.side < 2) throw TopologyError("grid side must be >= 2");
  if (p.spacing > p.tx_range) {
    throw TopologyError("grid spacing exceeds tx_range: no links would form");
  }
  const int count = p.side * p.side;
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(count));
  for (int r = 0; r < p.side; ++r) {
    for (int c = 0; c < p.side; ++c) {
      nodes.push_back({r * p.side + c, Position(c * p.spacing, r * p.spacing), p.radios, false});
    }
  }
  for (NodeId g : p.gateways) {
    if (g < 0 || g >= count) {
      throw TopologyError("gateway id " + std::to_string(g) + " out of range for " +
                          std::to_string(count) + " nodes");
    }
    nodes[static_cast<std::size_t>(g)].is_gateway = true;
  }
  auto links = links_within_range(nodes, p.tx_range);
  return Topology(std::move(nodes), std::move(links), p.tx_range, p.int_range);
}

Topology random_topology(const RandomParams& p, std::uint64_t seed) {
  if (p.n < 2) throw TopologyError("random topology needs n >= 2");
  if (p.n_gateways < 1 || p.n_gateways > p.n) {
    throw TopologyError("n_gateways must be in [1, n]");
  }
  if (!(p.width > 0.0 && p.height > 0.0)) throw TopologyError("area must be positive");

  std::mt19937_64 gen(seed);
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(p.n));
  for (int i = 0; i < p.n; ++i) {
    const double x = unit_uniform(gen) * p.width;
    const double y = unit_uniform(gen) * p.height;
    nodes.push_back({i, Position(x, y), p.radios, false});
  }

  const std::array<Position, 4> corners{Position(0.0, 0.0), Position(p.width, p.height),
                                        Position(p.width, 0.0), Position(0.0, p.height)};
  for (int g = 0; g < p.n_gateways; ++g) {
    const Position& corner = corners[static_cast<std::size_t>(g % 4)];
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Node& nd : nodes) {
      if (nd.is_gateway) continue;
      const double d = (nd.pos - corner).norm();
      if (d < best_d) {
        best_d = d;
        best = nd.id;
      }
    }
    nodes[static_cast<std::size_t>(best)].is_gateway = true;
  }

  auto links = links_within_range(nodes, p.tx_range);
  Topology t(std::move(nodes), std::move(links), p.tx_range, p.int_range);
  auto comps = connected_components(t);
  if (comps.size() > 1) {
    throw DisconnectedError("random topology (seed " + std::to_string(seed) +
                                ") is disconnected: " + describe_components(comps),
                            std::move(comps));
  }
  return t;
}

namespace {
// splitmix64 finalizer; keeps the retry streams of nearby seeds apart.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

Topology random_connected_topology(const RandomParams& params, std::uint64_t seed,
                                   int max_attempts) {
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t s =
        attempt == 0 ? seed : mix(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    try {
      return random_topology(params, s);
    } catch (const DisconnectedError&) {
      if (attempt + 1 >= max_attempts) throw;
    }
  }
}

std::vector<std::vector<NodeId>> connected_components(const Topology& t) {
  std::vector<int> comp(static_cast<std::size_t>(t.node_count()), -1);
  std::vector<std::vector<NodeId>> out;
  for (NodeId s = 0; s < t.node_count(); ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::deque<NodeId> queue{s};
    comp[static_cast<std::size_t>(s)] = c;
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      out.back().push_back(u);
      for (NodeId v : t.neighbors(u)) {
        if (comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = c;
          queue.push_back(v);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

std::vector<int> bfs_levels(const Topology& t) {
  std::vector<int> level(static_cast<std::size_t>(t.node_count()), -1);
  std::deque<NodeId> queue;
  for (NodeId g : t.gateways()) {
    level[static_cast<std::size_t>(g)] = 0;
    queue.push_back(g);
  }
  if (queue.empty()) throw TopologyError("bfs_levels: topology has no gateway");
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : t.neighbors(u)) {
      auto& lv = level[static_cast<std::size_t>(v)];
      if (lv < 0) {
        lv = level[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  for (NodeId v = 0; v < t.node_count(); ++v) {
    if (level[static_cast<std::size_t>(v)] < 0) {
      throw TopologyError("node " + std::to_string(v) + " is unreachable from every gateway");
    }
  }
  return level;
}

void write_topology(std::ostream& out, const Topology& t) {
  using text::format_double;
  out << "meta tx_range=" << format_double(t.tx_range())
      << " int_range=" << format_double(t.int_range()) << '\n';
  for (const Node& nd : t.nodes()) {
    out << "node " << nd.id << ' ' << format_double(nd.pos.x()) << ' '
        << format_double(nd.pos.y()) << ' ' << nd.radios << ' ' << (nd.is_gateway ? 1 : 0)
        << '\n';
  }
  for (const Link& l : t.links()) {
    out << "link " << l.id << ' ' << l.a << ' ' << l.b << '\n';
  }
}

Topology read_topology(std::istream& in) {
  std::optional<double> tx_range;
  std::optional<double> int_range;
  std::map<NodeId, Node> nodes;
  std::map<LinkId, Link> links;
  std::map<LinkId, std::size_t> link_lines;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (text::is_comment_or_blank(raw)) continue;
    const auto tok = text::split_ws(raw);
    const auto kind = tok[0];
    if (kind == "meta") {
      for (std::size_t i = 1; i < tok.size(); ++i) {
        auto [key, value] = text::parse_key_value(tok[i], lineno);
        if (key == "tx_range") {
          tx_range = text::parse_double(value, lineno);
        } else if (key == "int_range") {
          int_range = text::parse_double(value, lineno);
        } else {
          throw ParseError(lineno, "unknown meta key '" + std::string(key) + "'");
        }
      }
    } else if (kind == "node") {
      if (tok.size() != 6) throw ParseError(lineno, "node line needs: node <id> <x> <y> <radios> <gw>");
      Node nd;
      nd.id = static_cast<NodeId>(text::parse_int(tok[1], lineno));
      nd.pos = Position(text::parse_double(tok[2], lineno), text::parse_double(tok[3], lineno));
      nd.radios = static_cast<int>(text::parse_int(tok[4], lineno));
      const auto gw = text::parse_int(tok[5], lineno);
      if (gw != 0 && gw != 1) throw ParseError(lineno, "gateway flag must be 0 or 1");
      nd.is_gateway = gw == 1;
      if (nd.id < 0) throw ParseError(lineno, "negative node id");
      if (!nodes.emplace(nd.id, nd).second) {
        throw ParseError(lineno, "duplicate node id " + std::to_string(nd.id));
      }
    } else if (kind == "link") {
      if (tok.size() != 4) throw ParseError(lineno, "link line needs: link <id> <a> <b>");
      Link l;
      l.id = static_cast<LinkId>(text::parse_int(tok[1], lineno));
      l.a = static_cast<NodeId>(text::parse_int(tok[2], lineno));
      l.b = static_cast<NodeId>(text::parse_int(tok[3], lineno));
      if (l.id < 0) throw ParseError(lineno, "negative link id");
      if (!links.emplace(l.id, l).second) {
        throw ParseError(lineno, "duplicate link id " + std::to_string(l.id));
      }
      link_lines[l.id] = lineno;
    } else {
      throw ParseError(lineno, "unknown record '" + std::string(kind) + "'");
    }
  }

  if (nodes.empty()) throw ParseError(0, "no nodes");
  if (!tx_range || !int_range) throw ParseError(0, "missing meta line with tx_range and int_range");
  for (const auto& [id, l] : links) {
    for (NodeId end : {l.a, l.b}) {
      if (!nodes.contains(end)) {
        throw ParseError(link_lines[id], "link " + std::to_string(id) +
                                             " references dangling endpoint " +
                                             std::to_string(end));
      }
    }
  }

  std::vector<Node> node_vec;
  for (auto& [id, nd] : nodes) node_vec.push_back(nd);
  std::vector<Link> link_vec;
  for (auto& [id, l] : links) link_vec.push_back(l);
  try {
    return Topology(std::move(node_vec), std::move(link_vec), *tx_range, *int_range);
  } catch (const TopologyError& e) {
    throw ParseError(0, e.what());
  }
}

void save_topology(const Topology& t, const std::string& path,
                   const std::vector<std::string>& header_comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const auto& h : header_comments) out << "# " << h << '\n';
  write_topology(out, t);
  if (!out) throw Error("write to '" + path + "' failed");
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_topology(in);
}

}  // namespace meshpoc
