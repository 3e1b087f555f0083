#pragma once

#include <vector>

namespace xfer::mod {

/// Directed road graph with an all-pairs shortest-path oracle and
/// deterministic next-hop routing. Node positions are kept in meters for
/// observation encoding and zone assignment.
class RoadNetwork {
 public:
  /// width x height grid of intersections, every adjacent pair connected
  /// both ways with `edge_meters`-long edges, constant travel speed.
  static RoadNetwork lattice(int width, int height, double edge_meters,
                             double speed_mps);

  int node_count() const { return static_cast<int>(pos_x_.size()); }
  double speed_mps() const { return speed_; }

  double distance_m(int a, int b) const { return dist_[index(a, b)]; }
  double travel_time_s(int a, int b) const { return dist_[index(a, b)] / speed_; }

  /// First node on a shortest a->b path (ties resolved to the smallest
  /// neighbour id). Returns b when a == b.
  int next_hop(int a, int b) const { return hop_[index(a, b)]; }
  double edge_length_m(int a, int b) const;
  std::vector<int> path(int a, int b) const;

  double node_x(int v) const { return pos_x_[v]; }
  double node_y(int v) const { return pos_y_[v]; }
  double extent_x() const { return extent_x_; }
  double extent_y() const { return extent_y_; }

  /// Central-block business zone used by the demand patterns.
  bool in_business_zone(int v) const;

 private:
  struct Edge {
    int to;
    double length_m;
  };

  double speed_ = 1.0;
  double extent_x_ = 0.0, extent_y_ = 0.0;
  std::vector<double> pos_x_, pos_y_;
  std::vector<std::vector<Edge>> adjacency_;
  std::vector<double> dist_;  // node_count^2, meters
  std::vector<int> hop_;

  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * pos_x_.size() + b;
  }
  void build_tables();
};

}  // namespace xfer::mod
