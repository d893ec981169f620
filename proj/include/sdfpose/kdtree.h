#pragma once

#include <cstddef>
#include <vector>

#include "sdfpose/geometry.h"

namespace sdfpose {

/// Static 3D k-d tree with exact nearest-neighbour queries. Ties are broken
/// towards the lowest point index, so results match a linear scan exactly.
class KdTree {
 public:
  struct Neighbor {
    std::size_t index;
    double distance;
  };

  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  /// Throws std::logic_error on an empty tree.
  Neighbor nearest(const Vec3& q) const;

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3>& points() const { return points_; }

 private:
  struct Node {
    std::size_t begin, end;  // range in order_
    int axis;                // -1 for leaves
    double split;
    int left, right;
  };

  int build(std::size_t begin, std::size_t end);
  void search(int node, const Vec3& q, double& best_d2, std::size_t& best) const;

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Linear-scan reference, same tie rule as KdTree.
KdTree::Neighbor brute_force_nearest(const std::vector<Vec3>& points, const Vec3& q);

}  // namespace sdfpose
