#include "meshpoc/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>

#include "meshpoc/error.hpp"
#include "meshpoc/text_format.hpp"

namespace meshpoc {

bool ChannelAssignment::complete() const {
  return std::none_of(channel_of.begin(), channel_of.end(), [](Channel c) { return c == 0; });
}

namespace {

// Endpoint of `f` closest to `receiver`, skipping the endpoints of the
// victim link. Ties go to the lower node id.
std::optional<NodeId> worst_transmitter(const Topology& t, const Link& f, NodeId receiver,
                                        const Link& victim) {
  std::optional<NodeId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId cand : {std::min(f.a, f.b), std::max(f.a, f.b)}) {
    if (victim.touches(cand)) continue;
    const double d = t.distance(cand, receiver);
    if (d < best_d) {
      best_d = d;
      best = cand;
    }
  }
  return best;
}

double induced_power(const Topology& t, const Eigen::MatrixXd& power, const Link& victim,
                     const Link& aggressor) {
  double sum = 0.0;
  for (NodeId r : {victim.a, victim.b}) {
    if (auto tx = worst_transmitter(t, aggressor, r, victim)) sum += power(*tx, r);
  }
  return sum;
}

double score_of(std::span<const Channel> channels, const Eigen::MatrixXd& coupling, int sep) {
  double total = 0.0;
  const auto n = static_cast<Eigen::Index>(channels.size());
  for (Eigen::Index e = 0; e < n; ++e) {
    const Channel ce = channels[static_cast<std::size_t>(e)];
    if (ce == 0) continue;
    for (Eigen::Index f = e + 1; f < n; ++f) {
      const Channel cf = channels[static_cast<std::size_t>(f)];
      if (cf == 0 || coupling(e, f) == 0.0) continue;
      total += overlap_factor(ce, cf, sep) * coupling(e, f);
    }
  }
  return total;
}

std::set<Channel> channels_at(const Topology& t, const std::vector<Channel>& channel_of,
                              NodeId n) {
  std::set<Channel> out;
  for (LinkId l : t.incident_links(n)) {
    if (const Channel c = channel_of[static_cast<std::size_t>(l)]; c != 0) out.insert(c);
  }
  return out;
}

bool radios_respected(const Topology& t, const std::vector<Channel>& channel_of) {
  for (const Node& nd : t.nodes()) {
    if (static_cast<int>(channels_at(t, channel_of, nd.id).size()) > nd.radios) return false;
  }
  return true;
}

void require_complete(const Topology& t, const PhyParams& p, const ChannelAssignment& ca) {
  if (static_cast<int>(ca.channel_of.size()) != t.link_count()) {
    throw std::invalid_argument("assignment size does not match the link count");
  }
  for (std::size_t l = 0; l < ca.channel_of.size(); ++l) {
    const Channel c = ca.channel_of[l];
    if (c < 1 || c > p.channels) {
      throw std::invalid_argument("link " + std::to_string(l) + " has channel " +
                                  std::to_string(c) + " outside [1, " +
                                  std::to_string(p.channels) + "]");
    }
  }
}

// Links reachable from `start` over links that all carry channel `c`.
std::vector<LinkId> channel_component(const Topology& t, const std::vector<Channel>& channel_of,
                                      NodeId start, Channel c) {
  std::vector<LinkId> out;
  std::vector<char> seen_node(static_cast<std::size_t>(t.node_count()), 0);
  std::vector<NodeId> stack{start};
  seen_node[static_cast<std::size_t>(start)] = 1;
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    for (LinkId l : t.incident_links(n)) {
      if (channel_of[static_cast<std::size_t>(l)] != c) continue;
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
      const NodeId m = t.link(l).other(n);
      if (!seen_node[static_cast<std::size_t>(m)]) {
        seen_node[static_cast<std::size_t>(m)] = 1;
        stack.push_back(m);
      }
    }
  }
  return out;
}

// Both endpoints of `e` have every radio tuned and share no channel. Renaming
// one endpoint's channel across its same-channel component to a channel of
// the other endpoint never raises any node's channel count, so `e` can then
// reuse it. Pinned links are never renamed. Returns false if no rename works.
bool merge_for(const Topology& t, const PhyParams& p, const Eigen::MatrixXd& coupling,
               const ChannelPins& pins, std::vector<Channel>& channel_of, LinkId e) {
  const Link& le = t.link(e);
  std::optional<std::vector<Channel>> best;
  double best_score = std::numeric_limits<double>::infinity();
  for (auto [from, to] : {std::pair{le.b, le.a}, std::pair{le.a, le.b}}) {
    const auto keep = channels_at(t, channel_of, to);
    for (Channel old_c : channels_at(t, channel_of, from)) {
      const auto comp = channel_component(t, channel_of, from, old_c);
      if (std::any_of(comp.begin(), comp.end(), [&](LinkId l) { return pins.contains(l); })) continue;
      for (Channel new_c : keep) {
        std::vector<Channel> trial = channel_of;
        for (LinkId l : comp) trial[static_cast<std::size_t>(l)] = new_c;
        trial[static_cast<std::size_t>(e)] = new_c;
        const double s = score_of(trial, coupling, p.orthogonal_sep);
        if (s < best_score) {
          best_score = s;
          best = std::move(trial);
        }
      }
    }
  }
  if (!best) return false;
  channel_of = std::move(*best);
  return true;
}

}  // namespace

Eigen::MatrixXd link_coupling_matrix(const Topology& t, const PhyParams& p) {
  const Eigen::MatrixXd power = interference_power_matrix(t, p);
  const Eigen::Index n = t.link_count();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index e = 0; e < n; ++e) {
    const Link& le = t.link(static_cast<LinkId>(e));
    for (Eigen::Index f = e + 1; f < n; ++f) {
      const Link& lf = t.link(static_cast<LinkId>(f));
      w(e, f) = w(f, e) = induced_power(t, power, le, lf) + induced_power(t, power, lf, le);
    }
  }
  return w;
}

double interference_score(const Topology& t, const PhyParams& p, const ChannelAssignment& ca) {
  return score_of(ca.channel_of, link_coupling_matrix(t, p), p.orthogonal_sep);
}

AssignmentResult assign_channels(const Topology& t, const PhyParams& p, const ChannelPins& pins) {
  p.validate();
  const std::vector<int> level = bfs_levels(t);
  const Eigen::MatrixXd coupling = link_coupling_matrix(t, p);

  ChannelAssignment ca;
  ca.channel_of.assign(static_cast<std::size_t>(t.link_count()), 0);
  for (const auto& [l, c] : pins) {
    if (l < 0 || l >= t.link_count()) {
      throw AssignmentError("pinned link " + std::to_string(l) + " does not exist");
    }
    if (c < 1 || c > p.channels) {
      throw AssignmentError("pinned channel " + std::to_string(c) + " outside [1, K]");
    }
    ca.channel_of[static_cast<std::size_t>(l)] = c;
    ca.order.push_back(l);
  }

  std::vector<NodeId> node_order(static_cast<std::size_t>(t.node_count()));
  for (NodeId v = 0; v < t.node_count(); ++v) node_order[static_cast<std::size_t>(v)] = v;
  std::stable_sort(node_order.begin(), node_order.end(), [&](NodeId x, NodeId y) {
    return level[static_cast<std::size_t>(x)] < level[static_cast<std::size_t>(y)];
  });

  for (NodeId u : node_order) {
    for (LinkId e : t.incident_links(u)) {
      if (ca.channel_of[static_cast<std::size_t>(e)] != 0) continue;
      const Link& le = t.link(e);
      const auto at_a = channels_at(t, ca.channel_of, le.a);
      const auto at_b = channels_at(t, ca.channel_of, le.b);
      const auto radio_ok = [&](const std::set<Channel>& used, NodeId n, Channel c) {
        return used.contains(c) || static_cast<int>(used.size()) < t.node(n).radios;
      };

      std::vector<double> score(static_cast<std::size_t>(p.channels) + 1, 0.0);
      for (Channel c = 1; c <= p.channels; ++c) {
        double s = 0.0;
        for (LinkId f = 0; f < t.link_count(); ++f) {
          const Channel cf = ca.channel_of[static_cast<std::size_t>(f)];
          if (cf == 0 || coupling(e, f) == 0.0) continue;
          s += overlap_factor(c, cf, p.orthogonal_sep) * coupling(e, f);
        }
        score[static_cast<std::size_t>(c)] = s;
      }

      Channel best = 0;
      for (bool allow_reuse : {false, true}) {
        double best_score = std::numeric_limits<double>::infinity();
        for (Channel c = 1; c <= p.channels; ++c) {
          if (!radio_ok(at_a, le.a, c) || !radio_ok(at_b, le.b, c)) continue;
          if (!allow_reuse && (at_a.contains(c) || at_b.contains(c))) continue;
          if (score[static_cast<std::size_t>(c)] < best_score) {
            best_score = score[static_cast<std::size_t>(c)];
            best = c;
          }
        }
        if (best != 0) break;
      }
      if (best == 0 && merge_for(t, p, coupling, pins, ca.channel_of, e)) {
        ca.order.push_back(e);
        continue;
      }
      if (best == 0) {
        throw AssignmentError("radio counts at nodes " + std::to_string(le.a) + " and " +
                              std::to_string(le.b) + " leave no channel for link " +
                              std::to_string(e));
      }
      ca.channel_of[static_cast<std::size_t>(e)] = best;
      ca.order.push_back(e);
    }
  }

  InterferenceDb db = compute_interference_db(t, ca, p);
  return {std::move(ca), std::move(db)};
}

std::vector<Interferer> link_interferers(const Topology& t, const ChannelAssignment& ca,
                                         LinkId link, NodeId receiver) {
  const Link& victim = t.link(link);
  std::vector<Interferer> out;
  for (LinkId f = 0; f < t.link_count(); ++f) {
    if (f == link) continue;
    const Channel cf = ca[f];
    if (cf == 0) continue;
    if (auto tx = worst_transmitter(t, t.link(f), receiver, victim)) out.push_back({*tx, cf});
  }
  return out;
}

InterferenceDb compute_interference_db(const Topology& t, const ChannelAssignment& ca,
                                       const PhyParams& p) {
  InterferenceDb db;
  db.links.reserve(static_cast<std::size_t>(t.link_count()));
  for (const Link& l : t.links()) {
    const Channel c = ca[l.id];
    if (c == 0) throw std::invalid_argument("link " + std::to_string(l.id) + " is uncolored");
    LinkInterference li;
    li.sinr_fwd = sinr(l.b, l.a, c, link_interferers(t, ca, l.id, l.b), t, p);
    li.sinr_rev = sinr(l.a, l.b, c, link_interferers(t, ca, l.id, l.a), t, p);
    li.capacity_bps = shannon_capacity(li.sinr_min(), p.bandwidth_hz);
    db.links.push_back(li);
  }
  return db;
}

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::AdjacentSameChannel: return "adjacent-same-channel";
    case ViolationKind::RadioCountExceeded: return "radio-count-exceeded";
    case ViolationKind::TwoHopSameChannel: return "two-hop-same-channel";
  }
  return "unknown";
}

std::vector<Violation> validate_assignment(const Topology& t, const PhyParams& p,
                                           const ChannelAssignment& ca) {
  require_complete(t, p, ca);
  std::vector<Violation> out;

  // Reuse at a node is unavoidable when an endpoint has more links than
  // radios, or when the link's line-graph degree leaves no free channel.
  const auto forced = [&](LinkId l) {
    const Link& lk = t.link(l);
    const int da = t.degree(lk.a);
    const int db = t.degree(lk.b);
    return da > t.node(lk.a).radios || db > t.node(lk.b).radios || da + db - 2 >= p.channels;
  };

  for (const Node& nd : t.nodes()) {
    const auto inc = t.incident_links(nd.id);
    const auto used = channels_at(t, ca.channel_of, nd.id);
    if (static_cast<int>(used.size()) > nd.radios) {
      out.push_back({ViolationKind::RadioCountExceeded, nd.id,
                     std::vector<LinkId>(inc.begin(), inc.end()), 0, false});
    }
    for (std::size_t i = 0; i < inc.size(); ++i) {
      for (std::size_t j = i + 1; j < inc.size(); ++j) {
        if (ca[inc[i]] != ca[inc[j]]) continue;
        out.push_back({ViolationKind::AdjacentSameChannel, nd.id, {inc[i], inc[j]}, ca[inc[i]],
                       forced(inc[i]) || forced(inc[j])});
      }
    }
  }

  for (LinkId e = 0; e < t.link_count(); ++e) {
    const Link& le = t.link(e);
    for (LinkId f = e + 1; f < t.link_count(); ++f) {
      const Link& lf = t.link(f);
      if (ca[e] != ca[f] || le.touches(lf.a) || le.touches(lf.b)) continue;
      const bool bridged = t.link_between(le.a, lf.a) || t.link_between(le.a, lf.b) ||
                           t.link_between(le.b, lf.a) || t.link_between(le.b, lf.b);
      if (bridged) out.push_back({ViolationKind::TwoHopSameChannel, -1, {e, f}, ca[e], false});
    }
  }
  return out;
}

std::size_t hard_violation_count(std::span<const Violation> v) {
  return static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [](const Violation& x) { return x.hard(); }));
}

ChromaticBounds chromatic_bounds(const Topology& t) {
  int d = 0;
  for (const Node& nd : t.nodes()) d = std::max(d, t.degree(nd.id));
  return {d, d + 1};
}

BruteForceResult brute_force_assign(const Topology& t, const PhyParams& p, int channels) {
  if (channels < 1) throw std::invalid_argument("brute_force_assign: channels must be >= 1");
  const int links = t.link_count();
  constexpr double kLimit = 1e7;
  if (std::pow(static_cast<double>(channels), links) > kLimit) {
    throw InstanceTooLarge("brute_force_assign: " + std::to_string(channels) + "^" +
                           std::to_string(links) + " assignments exceed the 1e7 guardrail");
  }
  PhyParams pk = p;
  pk.channels = channels;
  pk.validate();
  const Eigen::MatrixXd coupling = link_coupling_matrix(t, pk);

  std::vector<Channel> cur(static_cast<std::size_t>(links), 1);
  std::optional<std::vector<Channel>> best;
  double best_score = std::numeric_limits<double>::infinity();
  while (true) {
    if (radios_respected(t, cur)) {
      const double s = score_of(cur, coupling, pk.orthogonal_sep);
      if (s < best_score) {
        best_score = s;
        best = cur;
      }
    }
    // Odometer increment, last link fastest: lexicographic order.
    int i = links - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == channels) {
      cur[static_cast<std::size_t>(i)] = 1;
      --i;
    }
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
  }
  if (!best) throw AssignmentError("brute_force_assign: no assignment honors the radio counts");

  BruteForceResult r;
  r.assignment.channel_of = *best;
  for (LinkId l = 0; l < links; ++l) r.assignment.order.push_back(l);
  r.score = best_score;
  return r;
}

void write_assignment(std::ostream& out, const ChannelAssignment& ca) {
  for (std::size_t l = 0; l < ca.channel_of.size(); ++l) {
    out << "chan " << l << ' ' << ca.channel_of[l] << '\n';
  }
}

ChannelAssignment read_assignment(std::istream& in, const Topology& t) {
  ChannelAssignment ca;
  ca.channel_of.assign(static_cast<std::size_t>(t.link_count()), 0);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (text::is_comment_or_blank(raw)) continue;
    const auto tok = text::split_ws(raw);
    if (tok.size() != 3 || tok[0] != "chan") {
      throw ParseError(lineno, "expected: chan <link_id> <channel>");
    }
    const auto l = text::parse_int(tok[1], lineno);
    const auto c = text::parse_int(tok[2], lineno);
    if (l < 0 || l >= t.link_count()) {
      throw ParseError(lineno, "unknown link id " + std::to_string(l));
    }
    if (c < 1) throw ParseError(lineno, "channel must be >= 1");
    auto& slot = ca.channel_of[static_cast<std::size_t>(l)];
    if (slot != 0) throw ParseError(lineno, "duplicate link id " + std::to_string(l));
    slot = static_cast<Channel>(c);
    ca.order.push_back(static_cast<LinkId>(l));
  }
  for (std::size_t l = 0; l < ca.channel_of.size(); ++l) {
    if (ca.channel_of[l] == 0) throw ParseError(0, "link " + std::to_string(l) + " has no channel");
  }
  return ca;
}

void write_interference_csv(std::ostream& out, const InterferenceDb& db) {
  using text::format_double;
  out << "link_id,sinr_fwd_db,sinr_rev_db,capacity_bps\n";
  for (std::size_t l = 0; l < db.links.size(); ++l) {
    const auto& li = db.links[l];
    out << l << ',' << format_double(linear_to_db(li.sinr_fwd)) << ','
        << format_double(linear_to_db(li.sinr_rev)) << ',' << format_double(li.capacity_bps)
        << '\n';
  }
}

}  // namespace meshpoc
