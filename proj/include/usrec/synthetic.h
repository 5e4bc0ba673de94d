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

#ifndef USREC_SYNTHETIC_H_
#define USREC_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "usrec/catalog.h"
#include "usrec/embedding.h"

namespace usrec {

struct SyntheticCloud {
  EmbeddingMatrix points;
  std::vector<int> component;  // mixture component of each point
};

// Equal-weight mixture of N((0,0), diag(1, 0.49)) and N((3,1), diag(1, 0.49)).
SyntheticCloud GaussianMixture2d(int n, std::uint64_t seed);

// n iid points uniform on [0,1)^d.
EmbeddingMatrix UniformCloud(int n, int d, std::uint64_t seed);

// ceil(n^(2/(d+2)) * ln(n)^(d/(d+2))), the neighbour count used for
// recovery experiments.
int RecoveryNeighborCount(int n, int d);

// Catalog whose groups are the mixture components.
ItemCatalog ComponentCatalog(const SyntheticCloud& cloud);

}  // namespace usrec

#endif  // USREC_SYNTHETIC_H_
