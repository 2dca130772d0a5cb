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

#include "dialogforge/ball_tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dialogforge/errors.hpp"

namespace dialogforge::belief {

double BallTree::distance(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

BallTree::BallTree(PointMatrix points, std::size_t leaf_size)
    : points_(std::move(points)), leaf_size_(leaf_size) {
  if (points_.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "ball tree needs at least one point");
  if (leaf_size_ == 0) throw Error(ErrorCode::kInvalidArgument, "leaf_size must be positive");
  order_.resize(size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * (size() / leaf_size_ + 1));
  build(0, size());
}

BallTree BallTree::from_rows(const std::vector<std::vector<double>>& rows, std::size_t leaf_size) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "ball tree needs at least one point");
  const std::size_t dim = rows.front().size();
  PointMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "point " + std::to_string(i) + " has dimension " +
                                                     std::to_string(rows[i].size()) + ", expected " +
                                                     std::to_string(dim));
    }
    for (std::size_t k = 0; k < dim; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return BallTree(std::move(m), leaf_size);
}

std::int32_t BallTree::build(std::size_t begin, std::size_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  const std::size_t d = dim();
  const std::size_t count = end - begin;

  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t k = begin; k < end; ++k) {
    centroid += points_.row(static_cast<Eigen::Index>(order_[k])).transpose();
  }
  centroid /= static_cast<double>(count);
  double radius = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    radius = std::max(radius, distance(centroid.data(), points_.row(static_cast<Eigen::Index>(order_[k])).data(), d));
  }
  nodes_[static_cast<std::size_t>(id)].centroid = std::move(centroid);
  nodes_[static_cast<std::size_t>(id)].radius = radius;
  nodes_[static_cast<std::size_t>(id)].begin = begin;
  nodes_[static_cast<std::size_t>(id)].end = end;
  if (count <= leaf_size_) return id;

  std::size_t split_dim = 0;
  double best_spread = -1.0;
  for (std::size_t k = 0; k < d; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = points_(static_cast<Eigen::Index>(order_[i]), static_cast<Eigen::Index>(k));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      split_dim = k;
    }
  }
  const std::size_t mid = begin + count / 2;
  const auto col = static_cast<Eigen::Index>(split_dim);
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     const double va = points_(static_cast<Eigen::Index>(a), col);
                     const double vb = points_(static_cast<Eigen::Index>(b), col);
                     return va < vb || (va == vb && a < b);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

BallTree::Neighbor BallTree::nearest(std::span<const double> query) const {
  if (query.size() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "query dimension " + std::to_string(query.size()) +
                                                   " != index dimension " + std::to_string(dim()));
  }
  Neighbor best;
  if (nodes_.empty()) return best;
  const std::size_t d = dim();
  const double* q = query.data();

  // Lower bounds are recomputed quantities; a relative slack keeps rounding
  // from pruning a ball whose nearest point ties the current best.
  auto prunable = [&](double lower_bound) {
    return lower_bound - best.distance > 1e-12 * (1.0 + best.distance);
  };

  struct Item {
    std::int32_t node;
    double lower_bound;
  };
  std::vector<Item> stack;
  const double root_d = distance(q, nodes_[0].centroid.data(), d);
  stack.push_back({0, std::max(0.0, root_d - nodes_[0].radius)});
  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    if (prunable(item.lower_bound)) continue;
    const Node& node = nodes_[static_cast<std::size_t>(item.node)];
    if (node.is_leaf()) {
      for (std::size_t k = node.begin; k < node.end; ++k) {
        const std::size_t idx = order_[k];
        const double dist = distance(q, points_.row(static_cast<Eigen::Index>(idx)).data(), d);
        if (dist < best.distance || (dist == best.distance && idx < best.index)) {
          best = {idx, dist};
        }
      }
      continue;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    const double dl = distance(q, l.centroid.data(), d);
    const double dr = distance(q, r.centroid.data(), d);
    const Item li{node.left, std::max(0.0, dl - l.radius)};
    const Item ri{node.right, std::max(0.0, dr - r.radius)};
    // Push the farther child first so the nearer one is explored first.
    if (dl <= dr) {
      stack.push_back(ri);
      stack.push_back(li);
    } else {
      stack.push_back(li);
      stack.push_back(ri);
    }
  }
  return best;
}

}  // namespace dialogforge::belief
