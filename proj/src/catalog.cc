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

#include "usrec/catalog.h"

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "json.hpp"
#include "usrec/status_macros.h"

namespace usrec {

absl::StatusOr<ItemCatalog> ItemCatalog::Create(std::vector<GroupId> groups,
                                                std::vector<std::string> group_names,
                                                std::vector<int> labels,
                                                std::vector<ItemMeta> meta) {
  if (group_names.empty()) {
    return absl::InvalidArgumentError("catalog needs at least one group");
  }
  const int num_groups = static_cast<int>(group_names.size());
  std::vector<int> sizes(num_groups, 0);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i] < 0 || groups[i] >= num_groups) {
      return absl::InvalidArgumentError(
          absl::StrCat("item ", i + 1, " has unknown group id ", groups[i]));
    }
    ++sizes[groups[i]];
  }
  if (!labels.empty() && labels.size() != groups.size()) {
    return absl::InvalidArgumentError("label count does not match item count");
  }
  if (!meta.empty() && meta.size() != groups.size()) {
    return absl::InvalidArgumentError("metadata count does not match item count");
  }
  ItemCatalog catalog;
  catalog.groups_ = std::move(groups);
  catalog.group_names_ = std::move(group_names);
  catalog.group_sizes_ = std::move(sizes);
  catalog.labels_ = std::move(labels);
  catalog.meta_ = std::move(meta);
  return catalog;
}

ItemCatalog ItemCatalog::SingleGroup(int n, std::string name) {
  ItemCatalog catalog;
  catalog.groups_.assign(n, 0);
  catalog.group_names_ = {std::move(name)};
  catalog.group_sizes_ = {n};
  return catalog;
}

std::optional<GroupId> ItemCatalog::FindGroup(absl::string_view name) const {
  for (std::size_t g = 0; g < group_names_.size(); ++g) {
    if (group_names_[g] == name) return static_cast<GroupId>(g);
  }
  return std::nullopt;
}

absl::StatusOr<ItemCatalog> ItemCatalog::Regroup(std::vector<GroupId> groups,
                                                 std::vector<std::string> group_names) const {
  if (groups.size() != groups_.size()) {
    return absl::InvalidArgumentError("regrouping must cover every item");
  }
  return Create(std::move(groups), std::move(group_names), labels_, meta_);
}

absl::StatusOr<ItemCatalog> ReadCatalogTsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open catalog ", path));
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": empty catalog file"));
  }
  struct Row {
    std::string group;
    std::optional<int> label;
    ItemMeta meta;
    bool has_meta = false;
  };
  std::vector<std::optional<Row>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols = absl::StrSplit(line, '\t');
    if (cols.size() < 2) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": expected at least 2 columns"));
    }
    int id = 0;
    if (!absl::SimpleAtoi(cols[0], &id) || id < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": bad item id '", cols[0], "'"));
    }
    if (static_cast<std::size_t>(id) > rows.size()) rows.resize(id);
    if (rows[id - 1].has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": duplicate item id ", id));
    }
    Row row;
    row.group = cols[1];
    if (row.group.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(path, ":", line_no, ": empty group"));
    }
    if (cols.size() > 2 && !cols[2].empty()) {
      int label = 0;
      if (!absl::SimpleAtoi(cols[2], &label)) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ":", line_no, ": bad label '", cols[2], "'"));
      }
      row.label = label;
    }
    if (cols.size() > 3 && !cols[3].empty()) {
      nlohmann::json meta = nlohmann::json::parse(cols[3], nullptr, /*allow_exceptions=*/false);
      if (meta.is_discarded() || !meta.is_object()) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ":", line_no, ": meta_json is not a JSON object"));
      }
      row.has_meta = true;
      if (meta.contains("external_id")) {
        const auto& ext = meta["external_id"];
        row.meta.external_id = ext.is_string() ? ext.get<std::string>() : ext.dump();
      }
      if (meta.contains("title") && meta["title"].is_string()) {
        row.meta.title = meta["title"].get<std::string>();
      }
      if (meta.contains("year") && meta["year"].is_number_integer()) {
        row.meta.year = meta["year"].get<int>();
      }
    }
    rows[id - 1] = std::move(row);
  }
  std::vector<GroupId> groups;
  std::vector<std::string> names;
  absl::flat_hash_map<std::string, GroupId> name_to_id;
  std::vector<int> labels;
  std::vector<ItemMeta> meta;
  bool any_label = false;
  bool any_meta = false;
  for (const auto& row : rows) {
    if (row.has_value()) {
      any_label |= row->label.has_value();
      any_meta |= row->has_meta;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": item ids must be 1..n; missing ", i + 1));
    }
    const Row& row = *rows[i];
    auto [it, inserted] = name_to_id.try_emplace(row.group, static_cast<GroupId>(names.size()));
    if (inserted) names.push_back(row.group);
    groups.push_back(it->second);
    if (any_label) {
      if (!row.label.has_value()) {
        return absl::InvalidArgumentError(absl::StrCat(path, ": item ", i + 1, " has no label"));
      }
      labels.push_back(*row.label);
    }
    if (any_meta) meta.push_back(row.meta);
  }
  return ItemCatalog::Create(std::move(groups), std::move(names), std::move(labels),
                             std::move(meta));
}

absl::Status WriteCatalogTsv(const ItemCatalog& catalog, const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << "item_id\tgroup\tlabel\tmeta_json\n";
  for (ItemId item = 1; item <= catalog.size(); ++item) {
    out << item << '\t' << catalog.group_name(catalog.group(item)) << '\t';
    if (catalog.has_labels()) out << catalog.label(item);
    out << '\t';
    if (catalog.has_meta()) {
      const ItemMeta& m = catalog.meta(item);
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      if (!m.external_id.empty()) j["external_id"] = m.external_id;
      if (!m.title.empty()) j["title"] = m.title;
      if (m.year.has_value()) j["year"] = *m.year;
      out << j.dump();
    }
    out << '\n';
  }
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<UserHistory> ReadHistoryFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open history ", path));
  UserHistory history;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty()) continue;
    ItemId item = 0;
    if (!absl::SimpleAtoi(text, &item) || item < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": bad item id '", text, "'"));
    }
    history.insert(item);
  }
  return history;
}

GroupCounter::GroupCounter(int num_groups, int tau)
    : counts_(num_groups, 0), tau_(tau), deficit_(tau * num_groups) {}

int GroupCounter::RecomputeDeficit() const {
  int s = 0;
  for (int c : counts_) s += c < tau_ ? tau_ - c : 0;
  return s;
}

absl::StatusOr<bool> FairInsertCheck(const GroupCounter& counter, int k, int list_len,
                                     GroupId group) {
  if (group < 0 || group >= counter.num_groups()) {
    return absl::DataLossError(
        absl::StrCat("group id ", group, " is not in the catalog; catalog is corrupt"));
  }
  if (list_len >= k) {
    return absl::InvalidArgumentError(
        absl::StrCat("list of length ", list_len, " is already full (k = ", k, ")"));
  }
  return counter.CanSafelyAdd(group, k, list_len);
}

}  // namespace usrec
