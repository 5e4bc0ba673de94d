// Copyright 2026 The Usrec Authors
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

#include "kd_tree.h"

#include <algorithm>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

namespace usrec {

KdTree::KdTree(const Eigen::MatrixXd& points, int leaf_size)
    : points_(points), leaf_size_(std::max(1, leaf_size)), order_(points.rows()) {
  std::iota(order_.begin(), order_.end(), 0);
  if (!order_.empty()) Build(0, static_cast<int>(order_.size()));
}

int KdTree::Build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_) return id;

  int best_dim = 0;
  double best_spread = -1;
  for (Eigen::Index c = 0; c < points_.cols(); ++c) {
    double lo = points_(order_[begin], c);
    double hi = lo;
    for (int i = begin + 1; i < end; ++i) {
      lo = std::min(lo, points_(order_[i], c));
      hi = std::max(hi, points_(order_[i], c));
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = static_cast<int>(c);
    }
  }
  if (best_spread <= 0) return id;  // all points coincide

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_(a, best_dim) < points_(b, best_dim); });
  const double split = points_(order_[mid], best_dim);
  const int left = Build(begin, mid);
  const int right = Build(mid, end);
  nodes_[id].dim = best_dim;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<ItemId> KdTree::Nearest(ItemId query, int k, const std::vector<bool>& excluded) const {
  using Candidate = std::pair<double, ItemId>;
  std::priority_queue<Candidate> best;  // max-heap on (distance, id)
  if (k <= 0 || nodes_.empty()) return {};
  const Eigen::Index q = Index(query);

  auto visit_leaf = [&](const Node& node) {
    for (int i = node.begin; i < node.end; ++i) {
      const int row = order_[i];
      const ItemId item = row + 1;
      if (row == q) continue;
      if (!excluded.empty() && excluded[item]) continue;
      const Candidate c{SquaredDistance(points_, q, row), item};
      if (static_cast<int>(best.size()) < k) {
        best.push(c);
      } else if (c < best.top()) {
        best.pop();
        best.push(c);
      }
    }
  };

  // Explicit stack of (node, lower bound on squared distance).
  std::vector<std::pair<int, double>> stack = {{0, 0.0}};
  while (!stack.empty()) {
    const auto [id, bound] = stack.back();
    stack.pop_back();
    if (static_cast<int>(best.size()) == k && bound > best.top().first) continue;
    const Node& node = nodes_[id];
    if (node.dim < 0) {
      visit_leaf(node);
      continue;
    }
    const double diff = points_(q, node.dim) - node.split;
    const double plane = diff * diff;
    const int near = diff < 0 ? node.left : node.right;
    const int far = diff < 0 ? node.right : node.left;
    // Points equal to the split value can sit on either side.
    stack.emplace_back(far, diff == 0 ? bound : std::max(bound, plane));
    stack.emplace_back(near, bound);
  }

  std::vector<ItemId> out(best.size());
  for (int i = static_cast<int>(best.size()) - 1; i >= 0; --i) {
    out[i] = best.top().second;
    best.pop();
  }
  return out;
}

}  // namespace usrec
