// Copyright 2026 The DialogForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dialogforge::belief {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Exact Euclidean nearest-neighbour index. Nodes are balls (centroid,
/// radius); internal nodes split their points at the median of the
/// dimension with the largest spread.
class BallTree {
 public:
  static constexpr std::size_t kDefaultLeafSize = 32;

  struct Node {
    Eigen::VectorXd centroid;
    double radius = 0.0;
    std::int32_t left = -1;  // -1 for leaves
    std::int32_t right = -1;
    std::size_t begin = 0;   // range into point_order()
    std::size_t end = 0;

    bool is_leaf() const { return left < 0; }
  };

  struct Neighbor {
    std::size_t index = std::numeric_limits<std::size_t>::max();
    double distance = std::numeric_limits<double>::infinity();
  };

  BallTree() = default;
  /// One point per row. Throws InvalidArgument on no points or leaf_size 0.
  explicit BallTree(PointMatrix points, std::size_t leaf_size = kDefaultLeafSize);
  /// Throws DimensionMismatch when rows have differing lengths.
  static BallTree from_rows(const std::vector<std::vector<double>>& rows,
                            std::size_t leaf_size = kDefaultLeafSize);

  /// Exact nearest point; equal distances resolve to the lowest row index.
  /// Throws DimensionMismatch.
  Neighbor nearest(std::span<const double> query) const;

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  std::size_t leaf_size() const { return leaf_size_; }
  const PointMatrix& points() const { return points_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::size_t>& point_order() const { return order_; }

  static double distance(const double* a, const double* b, std::size_t dim);

 private:
  std::int32_t build(std::size_t begin, std::size_t end);

  PointMatrix points_;
  std::size_t leaf_size_ = kDefaultLeafSize;
  std::vector<Node> nodes_;
  std::vector<std::size_t> order_;
};

}  // namespace dialogforge::belief
