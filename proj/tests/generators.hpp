#pragma once

// Seeded generators for small property-test instances.

#include <cstdint>
#include <random>
#include <vector>

#include "meshpoc/topology.hpp"

namespace gen {

using namespace meshpoc;

struct SmallSpec {
  int min_nodes = 3;
  int max_nodes = 6;
  int max_links = 6;
  double area = 400.0;
  double tx_range = 250.0;
  double int_range = 550.0;
  int min_radios = 1;
  int max_radios = 3;
};

/// Connected topology with 1-2 gateways and at most spec.max_links links.
inline Topology small_topology(std::uint64_t seed, const SmallSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_dist(spec.min_nodes, spec.max_nodes);
  std::uniform_real_distribution<double> pos(0.0, spec.area);
  std::uniform_int_distribution<int> radios(spec.min_radios, spec.max_radios);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const int n = n_dist(rng);
    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({i, {pos(rng), pos(rng)}, radios(rng), false});
    nodes[0].is_gateway = true;
    if (n > 3 && rng() % 2) nodes[static_cast<std::size_t>(n - 1)].is_gateway = true;
    std::vector<Link> links;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double d = (nodes[static_cast<std::size_t>(i)].pos - nodes[static_cast<std::size_t>(j)].pos).norm();
        if (d <= spec.tx_range && d > 1.0) links.push_back({static_cast<LinkId>(links.size()), i, j});
      }
    }
    if (static_cast<int>(links.size()) > spec.max_links) continue;
    Topology t(nodes, links, spec.tx_range, spec.int_range);
    if (connected_components(t).size() == 1) return t;
  }
  throw std::runtime_error("small_topology: no instance found");
}

}  // namespace gen
