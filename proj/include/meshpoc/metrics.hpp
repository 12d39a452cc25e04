#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "meshpoc/phy.hpp"

namespace meshpoc {

inline constexpr double kInfiniteEtx = std::numeric_limits<double>::infinity();

/// Expected transmission count 1 / (d_f * d_r); infinite when either ratio is 0.
double etx(double d_f, double d_r);

/// Expected transmission time etx * packet_bits / bandwidth_bps.
double ett(double etx_count, double packet_bits, double bandwidth_bps);

struct EttOnChannel {
  double ett = 0.0;
  Channel channel = 1;
};

/// Weighted cumulative ETT of a path over K channels.
double wcett(std::span<const EttOnChannel> path, double alpha, int channels);

/// beta / sinr on the feasible region sinr >= beta, nullopt otherwise.
std::optional<double> sinr_cost(double sinr_linear, double beta_linear);

/// Linear-in-dB ramp: 0 at sinr <= beta, 1 at sinr >= beta + margin.
double delivery_prob(double sinr_db, double beta_db, double margin_db);

enum class RoutingMetric { Sinr, Etx, Ett, HopCount };

std::string to_string(RoutingMetric m);
RoutingMetric parse_routing_metric(std::string_view name);

struct LinkQuality {
  double sinr_linear = 0.0;
  double delivery_prob = 0.0;
  double etx = kInfiniteEtx;
  double ett_s = 0.0;
  std::optional<double> cost;
};

}  // namespace meshpoc

namespace meshpoc {

/// Link-layer constants shared by the baseline metrics and the simulator.
struct LinkModel {
  double margin_db = 20.0;
  double packet_bits = 8000.0;
  double data_rate_bps = 11e6;
};

/// Quality figures for a link with the given (worst-direction) SINR and
/// Shannon capacity. Delivery is symmetric: d_f = d_r = delivery_prob.
/// ETT uses the link's Shannon capacity as its bandwidth.
LinkQuality link_quality(double sinr_linear, double capacity_bps, const PhyParams& p,
                         const LinkModel& m);

/// Routing weight of a link under `metric`; nullopt marks it unusable.
std::optional<double> metric_cost(RoutingMetric metric, const LinkQuality& q);

}  // namespace meshpoc
