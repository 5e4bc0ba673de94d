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

#include "usrec/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "absl/strings/str_cat.h"

namespace usrec {

SyntheticCloud GaussianMixture2d(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal(0.0, 1.0);
  SyntheticCloud out;
  Eigen::MatrixXd x(n, 2);
  out.component.resize(n);
  for (int i = 0; i < n; ++i) {
    const int c = coin(rng) ? 1 : 0;
    out.component[i] = c;
    x(i, 0) = 3.0 * c + normal(rng);
    x(i, 1) = 1.0 * c + 0.7 * normal(rng);
  }
  out.points = EmbeddingMatrix(std::move(x));
  return out;
}

EmbeddingMatrix UniformCloud(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) x(i, c) = u(rng);
  return EmbeddingMatrix(std::move(x));
}

int RecoveryNeighborCount(int n, int d) {
  const double k = std::pow(n, 2.0 / (d + 2)) * std::pow(std::log(n), static_cast<double>(d) / (d + 2));
  return static_cast<int>(std::ceil(k - 1e-9));
}

ItemCatalog ComponentCatalog(const SyntheticCloud& cloud) {
  const int groups = cloud.component.empty()
                         ? 1
                         : *std::max_element(cloud.component.begin(), cloud.component.end()) + 1;
  std::vector<std::string> names;
  for (int g = 0; g < groups; ++g) names.push_back(absl::StrCat("c", g));
  std::vector<GroupId> ids(cloud.component.begin(), cloud.component.end());
  return *ItemCatalog::Create(std::move(ids), std::move(names));
}

}  // namespace usrec
