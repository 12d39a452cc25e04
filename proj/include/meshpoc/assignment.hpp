#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "meshpoc/phy.hpp"
#include "meshpoc/topology.hpp"

namespace meshpoc {

/// Link -> channel map. Channel 0 marks an uncolored link.
struct ChannelAssignment {
  std::vector<Channel> channel_of;
  /// Link ids in the order they received their channel.
  std::vector<LinkId> order;

  Channel operator[](LinkId l) const { return channel_of.at(static_cast<std::size_t>(l)); }
  bool complete() const;
  bool operator==(const ChannelAssignment&) const = default;
};

/// Per-link SINR in both directions and the resulting Shannon capacity.
struct LinkInterference {
  double sinr_fwd = 0.0;  ///< at b, receiving from a
  double sinr_rev = 0.0;  ///< at a, receiving from b
  double capacity_bps = 0.0;

  double sinr_min() const { return sinr_fwd < sinr_rev ? sinr_fwd : sinr_rev; }
  bool operator==(const LinkInterference&) const = default;
};

/// Cache of link interference derived from (Topology, ChannelAssignment, PhyParams).
struct InterferenceDb {
  std::vector<LinkInterference> links;

  const LinkInterference& operator[](LinkId l) const {
    return links.at(static_cast<std::size_t>(l));
  }
  bool operator==(const InterferenceDb&) const = default;
};

struct AssignmentResult {
  ChannelAssignment assignment;
  InterferenceDb db;
};

/// Channels fixed before the greedy pass starts.
using ChannelPins = std::map<LinkId, Channel>;

/**
 * Link coupling weights W(e, f): the worst-case interference power (mW)
 * link f induces at the endpoints of e plus what e induces at the
 * endpoints of f, at full spectral overlap.
 *
 * For a receiver r of link e, the interfering transmitter of f is its
 * endpoint closest to r, excluding e's own endpoints; anything beyond
 * int_range contributes zero. The diagonal is zero.
 */
Eigen::MatrixXd link_coupling_matrix(const Topology& t, const PhyParams& p);

/// Total interference score: sum over unordered link pairs of
/// overlap(c_e, c_f) * W(e, f). Uncolored links contribute nothing.
double interference_score(const Topology& t, const PhyParams& p, const ChannelAssignment& ca);

/**
 * Greedy interference-aware edge coloring.
 *
 * Nodes are visited by BFS level from the gateways (ties by id); each
 * node's uncolored links (by id) take the channel in [1, K] with the lowest
 * marginal interference score. A channel already present at either
 * endpoint is skipped while any alternative remains; a channel that would
 * exceed an endpoint's radio count is never taken. Ties go to the lowest
 * channel.
 *
 * When both endpoints already have every radio tuned to disjoint channel
 * sets, one endpoint's channel is renamed across its same-channel component
 * (never touching pinned links) so the link can share a channel.
 *
 * Throws AssignmentError if pins leave no usable channel for some link,
 * TopologyError if a node cannot reach a gateway.
 */
AssignmentResult assign_channels(const Topology& t, const PhyParams& p,
                                 const ChannelPins& pins = {});

/// Interference at each link from every other colored link, evaluated per
/// `sinr` with the same worst-case transmitter rule as the coupling matrix.
InterferenceDb compute_interference_db(const Topology& t, const ChannelAssignment& ca,
                                       const PhyParams& p);

/// Interferer list seen by `receiver` (an endpoint of `link`).
std::vector<Interferer> link_interferers(const Topology& t, const ChannelAssignment& ca,
                                         LinkId link, NodeId receiver);

enum class ViolationKind { AdjacentSameChannel, RadioCountExceeded, TwoHopSameChannel };

std::string to_string(ViolationKind k);

struct Violation {
  ViolationKind kind{};
  NodeId node = -1;  ///< shared node, -1 for two-hop pairs
  std::vector<LinkId> links;
  Channel channel = 0;
  /// Set on adjacent-channel reuse that radio counts or K made unavoidable.
  bool forced = false;

  bool hard() const {
    switch (kind) {
      case ViolationKind::RadioCountExceeded: return true;
      case ViolationKind::AdjacentSameChannel: return !forced;
      case ViolationKind::TwoHopSameChannel: return false;
    }
    return true;
  }
};

/// Proper-coloring, radio-count and strong (2-hop) coloring checks.
/// Requires a complete assignment with channels in [1, K].
std::vector<Violation> validate_assignment(const Topology& t, const PhyParams& p,
                                           const ChannelAssignment& ca);
std::size_t hard_violation_count(std::span<const Violation> v);

struct ChromaticBounds {
  int max_degree = 0;
  int vizing_upper = 1;
};

ChromaticBounds chromatic_bounds(const Topology& t);

struct BruteForceResult {
  ChannelAssignment assignment;
  double score = 0.0;
};

/// Every K^|links| assignment honoring radio counts; returns the
/// lexicographically first one with minimal interference_score.
/// Throws InstanceTooLarge when K^|links| > 1e7.
BruteForceResult brute_force_assign(const Topology& t, const PhyParams& p, int channels);

void write_assignment(std::ostream& out, const ChannelAssignment& ca);
ChannelAssignment read_assignment(std::istream& in, const Topology& t);
void write_interference_csv(std::ostream& out, const InterferenceDb& db);

}  // namespace meshpoc
