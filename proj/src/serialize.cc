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

#include "usrec/serialize.h"

namespace usrec {

nlohmann::ordered_json RecResultToJson(const RecResult& result, const ItemCatalog& catalog) {
  nlohmann::ordered_json out;
  out["list"] = result.items;
  if (result.stats.accesses.has_value()) {
    out["accesses"] = *result.stats.accesses;
  } else {
    out["accesses"] = nullptr;
  }
  out["walk_length"] = result.stats.walk_length;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (GroupId g = 0; g < catalog.num_groups(); ++g) {
    counts[catalog.group_name(g)] =
        g < static_cast<GroupId>(result.group_counts.size()) ? result.group_counts[g] : 0;
  }
  out["group_counts"] = std::move(counts);
  out["trace"] = result.trace;
  out["fallback_used"] = result.fallback_used;
  return out;
}

nlohmann::ordered_json AlignResultToJson(const AlignResult& result) {
  nlohmann::ordered_json out;
  out["error"] = result.error;
  out["scale"] = result.scale;
  nlohmann::ordered_json rotation = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < result.rotation.rows(); ++r) {
    std::vector<double> row(result.rotation.cols());
    for (Eigen::Index c = 0; c < result.rotation.cols(); ++c) row[c] = result.rotation(r, c);
    rotation.push_back(row);
  }
  out["rotation"] = std::move(rotation);
  std::vector<double> translation(result.translation.size());
  for (Eigen::Index c = 0; c < result.translation.size(); ++c) {
    translation[c] = result.translation(c);
  }
  out["translation"] = translation;
  return out;
}

}  // namespace usrec
