#include "meshpoc/phy.hpp"

#include <charconv>
#include <cstdlib>

namespace meshpoc {

void PhyParams::validate() const {
  if (!(path_loss_exp > 0.0)) throw std::invalid_argument("path_loss_exp must be > 0");
  if (channels < 1) throw std::invalid_argument("channels must be >= 1");
  if (orthogonal_sep < 1) throw std::invalid_argument("orthogonal_sep must be >= 1");
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth_hz must be > 0");
}

double PhyParams::tx_power_mw() const { return db_to_linear(tx_power_dbm); }
double PhyParams::noise_mw() const { return db_to_linear(noise_dbm); }
double PhyParams::beta_linear() const { return db_to_linear(sinr_threshold_db); }

double overlap_factor(Channel c1, Channel c2, int orthogonal_sep) {
  if (c1 < 1 || c2 < 1) throw std::out_of_range("overlap_factor: channel must be >= 1");
  if (orthogonal_sep < 1) throw std::invalid_argument("overlap_factor: orthogonal_sep must be >= 1");
  const int sep = std::abs(c1 - c2);
  if (sep >= orthogonal_sep) return 0.0;
  return 1.0 - static_cast<double>(sep) / static_cast<double>(orthogonal_sep);
}

double overlap_factor(Channel c1, Channel c2, const PhyParams& p) {
  if (c1 > p.channels || c2 > p.channels) {
    throw std::out_of_range("overlap_factor: channel exceeds K=" + std::to_string(p.channels));
  }
  return overlap_factor(c1, c2, p.orthogonal_sep);
}

int parse_overlap_model(std::string_view name) {
  constexpr std::string_view prefix = "linear";
  if (name.substr(0, prefix.size()) != prefix) {
    throw std::invalid_argument("unknown overlap model '" + std::string(name) + "'");
  }
  const auto digits = name.substr(prefix.size());
  int sep = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), sep);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || sep < 1) {
    throw std::invalid_argument("unknown overlap model '" + std::string(name) + "'");
  }
  return sep;
}

std::string overlap_model_name(const PhyParams& p) {
  return "linear" + std::to_string(p.orthogonal_sep);
}

double received_power_mw(double distance, const PhyParams& p) {
  return p.tx_power_mw() * path_gain(distance, p.path_loss_exp);
}

double sinr(NodeId receiver, NodeId transmitter, Channel channel,
            std::span<const Interferer> interferers, const Topology& t, const PhyParams& p) {
  const double d_signal = t.distance(transmitter, receiver);
  if (d_signal > t.tx_range()) {
    throw std::invalid_argument("sinr: transmitter " + std::to_string(transmitter) +
                                " is out of range of receiver " + std::to_string(receiver));
  }
  const double signal = received_power_mw(d_signal, p);
  double interference = 0.0;
  for (const Interferer& z : interferers) {
    const double d = t.distance(z.node, receiver);
    if (d > t.int_range()) continue;
    const double f = overlap_factor(channel, z.channel, p);
    if (f == 0.0) continue;
    interference += f * received_power_mw(d, p);
  }
  return signal / (p.noise_mw() + interference);
}

Eigen::MatrixXd interference_power_matrix(const Topology& t, const PhyParams& p) {
  const Eigen::Index n = t.node_count();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = t.distance(static_cast<NodeId>(i), static_cast<NodeId>(j));
      if (d > t.int_range()) continue;
      m(i, j) = m(j, i) = received_power_mw(d, p);
    }
  }
  return m;
}

}  // namespace meshpoc
