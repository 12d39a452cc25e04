#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace meshpoc {

using NodeId = int;
using LinkId = int;
using Position = Eigen::Vector2d;

/// A static mesh router.
struct Node {
  NodeId id = 0;
  Position pos = Position::Zero();
  int radios = 1;
  bool is_gateway = false;

  bool operator==(const Node& o) const {
    return id == o.id && pos == o.pos && radios == o.radios && is_gateway == o.is_gateway;
  }
};

/// Undirected candidate link between two routers.
struct Link {
  LinkId id = 0;
  NodeId a = 0;
  NodeId b = 0;

  bool operator==(const Link&) const = default;

  bool touches(NodeId n) const { return a == n || b == n; }
  NodeId other(NodeId n) const { return n == a ? b : a; }
};

/**
 * Immutable mesh graph: positioned routers plus the links induced by the
 * transmission range.
 *
 * The constructor validates every structural invariant (contiguous ids,
 * radios >= 1, no self loops or parallel links, link length within
 * tx_range, int_range >= tx_range) and throws TopologyError otherwise.
 */
class Topology {
 public:
  Topology(std::vector<Node> nodes, std::vector<Link> links, double tx_range, double int_range);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const Link& link(LinkId id) const { return links_.at(static_cast<std::size_t>(id)); }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }

  double tx_range() const { return tx_range_; }
  double int_range() const { return int_range_; }

  /// Link ids incident to `n`, ascending.
  std::span<const LinkId> incident_links(NodeId n) const {
    return incident_.at(static_cast<std::size_t>(n));
  }
  int degree(NodeId n) const { return static_cast<int>(incident_links(n).size()); }
  /// Neighbor node ids of `n`, ascending.
  std::vector<NodeId> neighbors(NodeId n) const;
  std::optional<LinkId> link_between(NodeId u, NodeId v) const;

  double distance(NodeId u, NodeId v) const { return (node(u).pos - node(v).pos).norm(); }
  double link_length(LinkId l) const { return distance(link(l).a, link(l).b); }

  std::vector<NodeId> gateways() const;

  /// Copy with every node's radio count replaced.
  Topology with_radios(int radios) const;

  bool operator==(const Topology& o) const {
    return nodes_ == o.nodes_ && links_ == o.links_ && tx_range_ == o.tx_range_ &&
           int_range_ == o.int_range_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  double tx_range_;
  double int_range_;
  std::vector<std::vector<LinkId>> incident_;
};

struct GridParams {
  int side = 4;
  double spacing = 200.0;
  double tx_range = 250.0;
  double int_range = 550.0;
  int radios = 3;
  std::vector<NodeId> gateways{0, 2};
};

/// side x side square lattice, row-major ids; node (r, c) sits at (c*spacing, r*spacing).
Topology grid_topology(const GridParams& params);

struct RandomParams {
  int n = 25;
  double width = 1000.0;
  double height = 1000.0;
  double tx_range = 250.0;
  double int_range = 550.0;
  int radios = 3;
  int n_gateways = 2;
};

/**
 * Uniform placement from a seeded mt19937_64, links between every pair
 * within tx_range. Gateways are the nodes nearest to the area corners,
 * visited in the order (0,0), (W,H), (W,0), (0,H) and cycling.
 *
 * Throws DisconnectedError (listing the components) if the graph is not
 * connected.
 */
Topology random_topology(const RandomParams& params, std::uint64_t seed);

/// random_topology(seed) if connected, otherwise retries with seeds hashed
/// from (seed, attempt). Throws the last DisconnectedError after
/// `max_attempts`.
Topology random_connected_topology(const RandomParams& params, std::uint64_t seed,
                                   int max_attempts = 1000);

/// Hop distance from every node to its nearest gateway. Throws
/// TopologyError naming the first unreachable node.
std::vector<int> bfs_levels(const Topology& t);

/// Connected components, each sorted, ordered by smallest member.
std::vector<std::vector<NodeId>> connected_components(const Topology& t);

void write_topology(std::ostream& out, const Topology& t);
Topology read_topology(std::istream& in);

void save_topology(const Topology& t, const std::string& path,
                   const std::vector<std::string>& header_comments = {});
Topology load_topology(const std::string& path);

}  // namespace meshpoc
