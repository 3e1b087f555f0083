#include "xfer/env/rideshare/network.hpp"

#include <limits>
#include <queue>
#include <stdexcept>

namespace xfer::mod {

RoadNetwork RoadNetwork::lattice(int width, int height, double edge_meters,
                                 double speed_mps) {
  if (width < 2 || height < 2)
    throw std::invalid_argument("RoadNetwork::lattice: need at least 2x2 nodes");
  if (edge_meters <= 0.0 || speed_mps <= 0.0)
    throw std::invalid_argument("RoadNetwork::lattice: bad edge length or speed");

  RoadNetwork net;
  net.speed_ = speed_mps;
  const int n = width * height;
  net.pos_x_.resize(n);
  net.pos_y_.resize(n);
  net.adjacency_.resize(n);
  auto id = [&](int x, int y) { return y * width + x; };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int v = id(x, y);
      net.pos_x_[v] = x * edge_meters;
      net.pos_y_[v] = y * edge_meters;
      if (x + 1 < width) {
        net.adjacency_[v].push_back({id(x + 1, y), edge_meters});
        net.adjacency_[id(x + 1, y)].push_back({v, edge_meters});
      }
      if (y + 1 < height) {
        net.adjacency_[v].push_back({id(x, y + 1), edge_meters});
        net.adjacency_[id(x, y + 1)].push_back({v, edge_meters});
      }
    }
  }
  net.extent_x_ = (width - 1) * edge_meters;
  net.extent_y_ = (height - 1) * edge_meters;
  net.build_tables();
  return net;
}

void RoadNetwork::build_tables() {
  const int n = node_count();
  const double inf = std::numeric_limits<double>::infinity();
  dist_.assign(static_cast<std::size_t>(n) * n, inf);

  // Dijkstra from every source.
  for (int src = 0; src < n; ++src) {
    double* d = &dist_[index(src, 0)];
    d[src] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, src});
    while (!heap.empty()) {
      const auto [dv, v] = heap.top();
      heap.pop();
      if (dv > d[v]) continue;
      for (const Edge& e : adjacency_[v]) {
        const double cand = dv + e.length_m;
        if (cand < d[e.to]) {
          d[e.to] = cand;
          heap.push({cand, e.to});
        }
      }
    }
    for (int v = 0; v < n; ++v)
      if (!(d[v] < inf))
        throw std::runtime_error("RoadNetwork: graph is not strongly connected");
  }

  // next_hop(a,b): neighbour of a minimizing edge + dist(neigh, b); ties go
  // to the smallest neighbour id so routes are deterministic.
  hop_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) {
        hop_[index(a, b)] = b;
        continue;
      }
      int best = -1;
      double best_cost = inf;
      for (const Edge& e : adjacency_[a]) {
        const double cost = e.length_m + dist_[index(e.to, b)];
        if (cost < best_cost - 1e-9 || (cost < best_cost + 1e-9 && e.to < best)) {
          best_cost = cost;
          best = e.to;
        }
      }
      hop_[index(a, b)] = best;
    }
  }
}

double RoadNetwork::edge_length_m(int a, int b) const {
  for (const Edge& e : adjacency_[a])
    if (e.to == b) return e.length_m;
  throw std::invalid_argument("RoadNetwork::edge_length_m: no such edge");
}

std::vector<int> RoadNetwork::path(int a, int b) const {
  std::vector<int> p{a};
  int v = a;
  while (v != b) {
    v = next_hop(v, b);
    p.push_back(v);
  }
  return p;
}

bool RoadNetwork::in_business_zone(int v) const {
  const double fx = extent_x_ > 0 ? pos_x_[v] / extent_x_ : 0.0;
  const double fy = extent_y_ > 0 ? pos_y_[v] / extent_y_ : 0.0;
  return fx >= 0.35 && fx <= 0.65 && fy >= 0.35 && fy <= 0.65;
}

}  // namespace xfer::mod
