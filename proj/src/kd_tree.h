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

#ifndef USREC_SRC_KD_TREE_H_
#define USREC_SRC_KD_TREE_H_

#include <vector>

#include "Eigen/Core"
#include "usrec/catalog.h"

namespace usrec {

// Sum of squared coordinate differences, accumulated left to right so every
// caller sees bit-identical values.
inline double SquaredDistance(const Eigen::MatrixXd& x, Eigen::Index a, Eigen::Index b) {
  double s = 0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double d = x(a, c) - x(b, c);
    s += d * d;
  }
  return s;
}

// Static k-d tree over the rows of a matrix for exact k-NN queries ordered by
// (squared distance, item id).
class KdTree {
 public:
  // `points` must outlive the tree.
  explicit KdTree(const Eigen::MatrixXd& points, int leaf_size = 16);

  std::vector<ItemId> Nearest(ItemId query, int k, const std::vector<bool>& excluded) const;

 private:
  struct Node {
    int begin = 0;
    int end = 0;
    int left = -1;
    int right = -1;
    int dim = -1;  // -1 for leaves
    double split = 0;
  };

  int Build(int begin, int end);

  const Eigen::MatrixXd& points_;
  int leaf_size_;
  std::vector<int> order_;  // row indices
  std::vector<Node> nodes_;
};

}  // namespace usrec

#endif  // USREC_SRC_KD_TREE_H_
