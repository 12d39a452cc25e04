#include "meshpoc/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace meshpoc {

namespace {
void require_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string("etx: ") + name + " must lie in [0, 1]");
  }
}
}  // namespace

double etx(double d_f, double d_r) {
  require_probability(d_f, "d_f");
  require_probability(d_r, "d_r");
  if (d_f == 0.0 || d_r == 0.0) return kInfiniteEtx;
  return 1.0 / (d_f * d_r);
}

double ett(double etx_count, double packet_bits, double bandwidth_bps) {
  if (!(bandwidth_bps > 0.0)) throw std::invalid_argument("ett: bandwidth must be > 0");
  return etx_count * packet_bits / bandwidth_bps;
}

double wcett(std::span<const EttOnChannel> path, double alpha, int channels) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("wcett: alpha must lie in [0, 1]");
  std::vector<double> per_channel(static_cast<std::size_t>(channels) + 1, 0.0);
  double sum = 0.0;
  for (const auto& hop : path) {
    if (hop.channel < 1 || hop.channel > channels) {
      throw std::out_of_range("wcett: channel " + std::to_string(hop.channel) + " outside [1, K]");
    }
    sum += hop.ett;
    per_channel[static_cast<std::size_t>(hop.channel)] += hop.ett;
  }
  const double max_bin = *std::max_element(per_channel.begin(), per_channel.end());
  return (1.0 - alpha) * sum + alpha * max_bin;
}

std::optional<double> sinr_cost(double sinr_linear, double beta_linear) {
  if (!(sinr_linear > 0.0) || !(beta_linear > 0.0)) {
    throw std::invalid_argument("sinr_cost: inputs must be positive");
  }
  if (sinr_linear < beta_linear) return std::nullopt;
  return beta_linear / sinr_linear;
}

double delivery_prob(double sinr_db, double beta_db, double margin_db) {
  if (!(margin_db > 0.0)) throw std::invalid_argument("delivery_prob: margin must be > 0");
  if (sinr_db <= beta_db) return 0.0;
  if (sinr_db >= beta_db + margin_db) return 1.0;
  return (sinr_db - beta_db) / margin_db;
}

std::string to_string(RoutingMetric m) {
  switch (m) {
    case RoutingMetric::Sinr: return "sinr";
    case RoutingMetric::Etx: return "etx";
    case RoutingMetric::Ett: return "ett";
    case RoutingMetric::HopCount: return "hopcount";
  }
  return "unknown";
}

RoutingMetric parse_routing_metric(std::string_view name) {
  if (name == "sinr") return RoutingMetric::Sinr;
  if (name == "etx") return RoutingMetric::Etx;
  if (name == "ett") return RoutingMetric::Ett;
  if (name == "hopcount") return RoutingMetric::HopCount;
  throw std::invalid_argument("unknown routing metric '" + std::string(name) + "'");
}

}  // namespace meshpoc

namespace meshpoc {

LinkQuality link_quality(double sinr_linear, double capacity_bps, const PhyParams& p,
                         const LinkModel& m) {
  LinkQuality q;
  q.sinr_linear = sinr_linear;
  q.delivery_prob = delivery_prob(linear_to_db(sinr_linear), p.sinr_threshold_db, m.margin_db);
  q.etx = etx(q.delivery_prob, q.delivery_prob);
  q.ett_s = capacity_bps > 0.0 ? ett(q.etx, m.packet_bits, capacity_bps) : kInfiniteEtx;
  q.cost = sinr_cost(sinr_linear, p.beta_linear());
  return q;
}

std::optional<double> metric_cost(RoutingMetric metric, const LinkQuality& q) {
  switch (metric) {
    case RoutingMetric::Sinr:
      return q.cost;
    case RoutingMetric::Etx:
      if (q.etx == kInfiniteEtx) return std::nullopt;
      return q.etx;
    case RoutingMetric::Ett:
      if (q.etx == kInfiniteEtx) return std::nullopt;
      return q.ett_s;
    case RoutingMetric::HopCount:
      return 1.0;
  }
  return std::nullopt;
}

}  // namespace meshpoc
