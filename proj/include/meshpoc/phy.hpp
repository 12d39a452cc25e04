#pragma once

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "meshpoc/topology.hpp"

namespace meshpoc {

using Channel = int;

/// Radio parameters shared by every node. Powers are in dBm at the
/// boundary; all arithmetic below happens in linear mW.
struct PhyParams {
  double tx_power_dbm = 20.0;
  double noise_dbm = -90.0;
  double path_loss_exp = 3.0;
  double sinr_threshold_db = -10.0;
  int channels = 11;
  double bandwidth_hz = 22e6;
  /// Channel separation at which spectral overlap reaches zero.
  int orthogonal_sep = 5;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;

  double tx_power_mw() const;
  double noise_mw() const;
  double beta_linear() const;
};

template <typename Scalar>
Scalar db_to_linear(Scalar db) {
  using std::pow;
  return pow(Scalar(10), db / Scalar(10));
}

template <typename Scalar>
Scalar linear_to_db(Scalar ratio) {
  using std::log10;
  if (!(ratio > Scalar(0))) throw std::domain_error("linear_to_db: ratio must be positive");
  return Scalar(10) * log10(ratio);
}

/// Distance power law d^-alpha.
template <typename Scalar>
Scalar path_gain(Scalar d, Scalar alpha) {
  using std::pow;
  if (!(d > Scalar(0))) throw std::domain_error("path_gain: distance must be positive");
  return pow(d, -alpha);
}

/// B * log2(1 + snr), in bit/s.
template <typename Scalar>
Scalar shannon_capacity(Scalar snr, Scalar bandwidth_hz) {
  using std::log2;
  if (snr < Scalar(0)) throw std::domain_error("shannon_capacity: snr must be >= 0");
  return bandwidth_hz * log2(Scalar(1) + snr);
}

/// Triangular spectral overlap max(0, 1 - |c1 - c2| / orthogonal_sep).
/// Channels must be >= 1; the PhyParams overload also bounds them by K.
double overlap_factor(Channel c1, Channel c2, int orthogonal_sep);
double overlap_factor(Channel c1, Channel c2, const PhyParams& p);

/// Overlap models are named "linear<N>"; N becomes orthogonal_sep.
int parse_overlap_model(std::string_view name);
std::string overlap_model_name(const PhyParams& p);

/// Received power P * d^-alpha in mW.
double received_power_mw(double distance, const PhyParams& p);

struct Interferer {
  NodeId node = 0;
  Channel channel = 1;
};

/**
 * Signal to interference plus noise ratio (linear) at `receiver` for a
 * transmission from `transmitter` on `channel`.
 *
 * Interferers farther than the topology's int_range from the receiver
 * contribute nothing; the rest are weighted by their overlap factor with
 * `channel`.
 */
double sinr(NodeId receiver, NodeId transmitter, Channel channel,
            std::span<const Interferer> interferers, const Topology& t, const PhyParams& p);

/// Pairwise received power P * G(i, j) in mW, zero on the diagonal and
/// beyond int_range.
Eigen::MatrixXd interference_power_matrix(const Topology& t, const PhyParams& p);

}  // namespace meshpoc
