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

#include "usrec/datasets.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "usrec/status_macros.h"

namespace usrec {
namespace {

namespace fs = std::filesystem;

bool IsValidUtf8(absl::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = s[i];
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 0;
    if (len == 0 || i + len > s.size()) return false;
    for (int k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += len;
  }
  return true;
}

// GroupLens metadata is Latin-1; everything downstream expects UTF-8.
std::string ToUtf8(absl::string_view s) {
  if (IsValidUtf8(s)) return std::string(s);
  std::string out;
  for (unsigned char c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back(static_cast<char>(0xc0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
    }
  }
  return out;
}

void StripCr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Dense 1-based ids for external keys: numeric order when every key is an
// integer, lexicographic otherwise.
class IdMap {
 public:
  void Add(const std::string& key) { keys_.insert(key); }

  void Freeze() {
    std::vector<std::string> sorted(keys_.begin(), keys_.end());
    bool numeric = true;
    for (const auto& k : sorted) {
      long long v;
      if (!absl::SimpleAtoi(k, &v)) numeric = false;
    }
    if (numeric) {
      std::sort(sorted.begin(), sorted.end(), [](const std::string& a, const std::string& b) {
        long long x = 0, y = 0;
        (void)absl::SimpleAtoi(a, &x);
        (void)absl::SimpleAtoi(b, &y);
        return x < y;
      });
    } else {
      std::sort(sorted.begin(), sorted.end());
    }
    for (std::size_t i = 0; i < sorted.size(); ++i) ids_[sorted[i]] = static_cast<int>(i) + 1;
    ordered_ = std::move(sorted);
  }

  int id(const std::string& key) const { return ids_.at(key); }
  int size() const { return static_cast<int>(ordered_.size()); }
  const std::vector<std::string>& ordered() const { return ordered_; }

 private:
  absl::flat_hash_set<std::string> keys_;
  absl::flat_hash_map<std::string, int> ids_;
  std::vector<std::string> ordered_;
};

struct RawInteraction {
  std::string user;
  std::string item;
  std::int64_t timestamp = 0;
};

struct RawItem {
  std::string title;
  std::optional<int> year;
};

absl::Status LineError(const fs::path& path, int line_no, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(path.string(), ":", line_no, ": ", what));
}

absl::StatusOr<std::int64_t> ParseTimestamp(absl::string_view s) {
  std::int64_t t = 0;
  if (absl::SimpleAtoi(s, &t)) return t;
  double d = 0;
  if (absl::SimpleAtod(s, &d) && std::isfinite(d)) return static_cast<std::int64_t>(d);
  return absl::InvalidArgumentError(absl::StrCat("bad timestamp '", s, "'"));
}

std::optional<int> ParseYear(absl::string_view s) {
  s = absl::StripAsciiWhitespace(s);
  if (s.size() < 4) return std::nullopt;
  int year = 0;
  if (!absl::SimpleAtoi(s.substr(s.size() - 4), &year) || year < 1000) return std::nullopt;
  return year;
}

absl::Status ReadGroupLensData(const fs::path& path, std::vector<RawInteraction>& out) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cols = absl::StrSplit(line, '\t');
    if (cols.size() != 4) return LineError(path, line_no, "expected user, item, rating, timestamp");
    auto ts = ParseTimestamp(cols[3]);
    if (!ts.ok()) return LineError(path, line_no, ts.status().message());
    out.push_back({cols[0], cols[1], *ts});
  }
  return absl::OkStatus();
}

absl::Status ReadGroupLensItems(const fs::path& path, std::map<std::string, RawItem>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cols = absl::StrSplit(line, '|');
    if (cols.size() < 3) return LineError(path, line_no, "expected id|title|release date|...");
    out[cols[0]] = RawItem{ToUtf8(cols[1]), ParseYear(cols[2])};
  }
  return absl::OkStatus();
}

// Maps typed atomic-file header fields ("item_id:token") to column indices.
absl::flat_hash_map<std::string, int> AtomicHeader(const std::string& line) {
  absl::flat_hash_map<std::string, int> cols;
  const std::vector<std::string> fields = absl::StrSplit(line, '\t');
  for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
    cols[std::string(absl::StripAsciiWhitespace(fields[i].substr(0, fields[i].find(':'))))] = i;
  }
  return cols;
}

absl::Status ReadAtomicInter(const fs::path& path, std::vector<RawInteraction>& out,
                             bool& has_timestamps) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  std::string line;
  if (!std::getline(in, line)) return LineError(path, 1, "missing header");
  StripCr(line);
  const auto header = AtomicHeader(line);
  if (!header.contains("user_id") || !header.contains("item_id")) {
    return LineError(path, 1, "header lacks user_id or item_id");
  }
  const int user_col = header.at("user_id");
  const int item_col = header.at("item_id");
  const int ts_col = header.contains("timestamp") ? header.at("timestamp") : -1;
  has_timestamps = ts_col >= 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cols = absl::StrSplit(line, '\t');
    const int need = std::max({user_col, item_col, ts_col}) + 1;
    if (static_cast<int>(cols.size()) < need) return LineError(path, line_no, "too few columns");
    RawInteraction r{cols[user_col], cols[item_col], 0};
    if (ts_col >= 0) {
      auto ts = ParseTimestamp(cols[ts_col]);
      if (!ts.ok()) return LineError(path, line_no, ts.status().message());
      r.timestamp = *ts;
    }
    out.push_back(std::move(r));
  }
  return absl::OkStatus();
}

absl::Status ReadAtomicItems(const fs::path& path, std::map<std::string, RawItem>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  std::string line;
  if (!std::getline(in, line)) return LineError(path, 1, "missing header");
  StripCr(line);
  const auto header = AtomicHeader(line);
  if (!header.contains("item_id")) return LineError(path, 1, "header lacks item_id");
  const int id_col = header.at("item_id");
  int title_col = -1, year_col = -1;
  for (const auto& [name, col] : header) {
    if (absl::EndsWith(name, "title")) title_col = col;
    if (name == "release_year" || name == "year") year_col = col;
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cols = absl::StrSplit(line, '\t');
    if (static_cast<int>(cols.size()) <= id_col) return LineError(path, line_no, "missing item id");
    RawItem item;
    if (title_col >= 0 && title_col < static_cast<int>(cols.size())) {
      item.title = ToUtf8(cols[title_col]);
    }
    if (year_col >= 0 && year_col < static_cast<int>(cols.size())) {
      item.year = ParseYear(cols[year_col]);
    }
    out[cols[id_col]] = std::move(item);
  }
  return absl::OkStatus();
}

std::optional<fs::path> FindWithExtension(const fs::path& dir, absl::string_view ext) {
  std::vector<fs::path> hits;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension().string() == ext) hits.push_back(entry.path());
  }
  if (hits.empty()) return std::nullopt;
  std::sort(hits.begin(), hits.end());
  return hits.front();
}

}  // namespace

absl::StatusOr<MovieLensData> IngestMovieLens(const std::string& dir) {
  const fs::path root(dir);
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    return absl::NotFoundError(absl::StrCat("dataset directory ", dir, " does not exist"));
  }
  std::vector<RawInteraction> raw;
  std::map<std::string, RawItem> items;
  bool has_timestamps = true;
  if (fs::exists(root / "u.data") && fs::exists(root / "u.item")) {
    RETURN_IF_ERROR(ReadGroupLensData(root / "u.data", raw));
    RETURN_IF_ERROR(ReadGroupLensItems(root / "u.item", items));
  } else {
    const auto inter = FindWithExtension(root, ".inter");
    const auto item = FindWithExtension(root, ".item");
    if (!inter || !item) {
      return absl::NotFoundError(absl::StrCat(
          dir, " holds neither u.data + u.item nor *.inter + *.item files"));
    }
    RETURN_IF_ERROR(ReadAtomicInter(*inter, raw, has_timestamps));
    RETURN_IF_ERROR(ReadAtomicItems(*item, items));
  }
  if (raw.empty()) return absl::InvalidArgumentError(absl::StrCat(dir, ": no interactions"));

  IdMap users, item_ids;
  for (const auto& r : raw) {
    users.Add(r.user);
    item_ids.Add(r.item);
  }
  for (const auto& [key, unused] : items) item_ids.Add(key);
  users.Freeze();
  item_ids.Freeze();

  MovieLensData data;
  data.log.num_users = users.size();
  data.log.num_items = item_ids.size();
  data.log.has_timestamps = has_timestamps;
  data.log.entries.reserve(raw.size());
  for (const auto& r : raw) {
    data.log.entries.push_back({users.id(r.user), item_ids.id(r.item), r.timestamp});
  }
  DeduplicateInteractions(data.log);

  std::vector<ItemMeta> meta(item_ids.size());
  for (int i = 0; i < item_ids.size(); ++i) {
    const std::string& key = item_ids.ordered()[i];
    meta[i].external_id = key;
    if (auto it = items.find(key); it != items.end()) {
      meta[i].title = it->second.title;
      meta[i].year = it->second.year;
    }
  }
  ASSIGN_OR_RETURN(data.catalog,
                   ItemCatalog::Create(std::vector<GroupId>(item_ids.size(), 0), {"all"}, {},
                                       std::move(meta)));
  return data;
}

absl::StatusOr<InteractionData> IngestInteractions(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::vector<RawInteraction> raw;
  bool has_timestamps = false;
  std::string line;
  int line_no = 0;
  int width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cols = absl::StrSplit(line, '\t');
    if (line_no == 1 && absl::StartsWithIgnoreCase(cols[0], "user")) continue;  // header
    if (cols.size() < 2 || cols.size() > 4) {
      return LineError(path, line_no, "expected user<TAB>item[<TAB>rating][<TAB>timestamp]");
    }
    if (width < 0) width = static_cast<int>(cols.size());
    if (static_cast<int>(cols.size()) != width) {
      return LineError(path, line_no, "inconsistent column count");
    }
    RawInteraction r{cols[0], cols[1], 0};
    if (cols[0].empty() || cols[1].empty()) return LineError(path, line_no, "empty id");
    if (width == 4) {
      auto ts = ParseTimestamp(cols[3]);
      if (!ts.ok()) return LineError(path, line_no, ts.status().message());
      r.timestamp = *ts;
      has_timestamps = true;
    }
    raw.push_back(std::move(r));
  }
  if (raw.empty()) return absl::InvalidArgumentError(absl::StrCat(path, ": no interactions"));

  IdMap users, items;
  for (const auto& r : raw) {
    users.Add(r.user);
    items.Add(r.item);
  }
  users.Freeze();
  items.Freeze();
  InteractionData data;
  data.log.num_users = users.size();
  data.log.num_items = items.size();
  data.log.has_timestamps = has_timestamps;
  absl::flat_hash_set<std::tuple<int, int, std::int64_t>> seen;
  for (const auto& r : raw) {
    const Interaction e{users.id(r.user), items.id(r.item), r.timestamp};
    if (seen.insert({e.user, e.item, e.timestamp}).second) data.log.entries.push_back(e);
  }
  data.item_external_ids = items.ordered();
  return data;
}

absl::Status WriteInteractionsTsv(const InteractionLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << "user\titem\trating\ttimestamp\n";
  for (const Interaction& e : log.entries) {
    out << e.user << '\t' << e.item << "\t1\t" << e.timestamp << '\n';
  }
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<InteractionLog> ReadInteractionsForCatalog(const std::string& path,
                                                          const ItemCatalog& catalog) {
  ASSIGN_OR_RETURN(InteractionData data, IngestInteractions(path));
  std::vector<ItemId> remap(data.item_external_ids.size());
  for (std::size_t i = 0; i < remap.size(); ++i) {
    ItemId id = kNoItem;
    if (!absl::SimpleAtoi(data.item_external_ids[i], &id) || !catalog.contains(id)) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": item '", data.item_external_ids[i],
                                                     "' is not a catalog id"));
    }
    remap[i] = id;
  }
  InteractionLog log = std::move(data.log);
  log.num_items = catalog.size();
  for (Interaction& e : log.entries) e.item = remap[Index(e.item)];
  return log;
}

absl::StatusOr<PreparedDataset> LoadDatasetDir(const std::string& dir) {
  const fs::path root(dir);
  std::error_code ec;
  if (dir.empty() || !fs::is_directory(root, ec)) {
    return absl::InvalidArgumentError(absl::StrCat("dataset directory '", dir, "' does not exist"));
  }
  PreparedDataset out;
  if (fs::exists(root / "catalog.tsv")) {
    ASSIGN_OR_RETURN(out.catalog, ReadCatalogTsv((root / "catalog.tsv").string()));
    if (fs::exists(root / "interactions.tsv")) {
      ASSIGN_OR_RETURN(out.log,
                       ReadInteractionsForCatalog((root / "interactions.tsv").string(), out.catalog));
    }
    return out;
  }
  ASSIGN_OR_RETURN(MovieLensData ml, IngestMovieLens(dir));
  out.catalog = std::move(ml.catalog);
  out.log = std::move(ml.log);
  return out;
}

absl::StatusOr<GroupRule> ParseGroupRule(absl::string_view text) {
  if (text == "oldness") return GroupRule{GroupRuleKind::kYearThreshold, 1990};
  if (text == "popularity") return GroupRule{GroupRuleKind::kInteractionCountThreshold, 50};
  if (text == "attribute") return GroupRule{GroupRuleKind::kAttributeColumn, 0};
  if (text == "year-distance") return GroupRule{GroupRuleKind::kYearDistance, 10};
  const std::vector<absl::string_view> parts = absl::StrSplit(text, ':');
  int threshold = 0;
  if (parts.size() == 2 && absl::SimpleAtoi(parts[1], &threshold) && threshold >= 0) {
    if (parts[0] == "year") return GroupRule{GroupRuleKind::kYearThreshold, threshold};
    if (parts[0] == "count") {
      return GroupRule{GroupRuleKind::kInteractionCountThreshold, threshold};
    }
    if (parts[0] == "year-distance") return GroupRule{GroupRuleKind::kYearDistance, threshold};
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown group rule '", text,
      "' (expected oldness, popularity, attribute, year-distance, year:N, count:N or "
      "year-distance:N)"));
}

std::string GroupRuleName(const GroupRule& rule) {
  switch (rule.kind) {
    case GroupRuleKind::kYearThreshold:
      return absl::StrCat("year:", rule.threshold);
    case GroupRuleKind::kInteractionCountThreshold:
      return absl::StrCat("count:", rule.threshold);
    case GroupRuleKind::kAttributeColumn:
      return "attribute";
    case GroupRuleKind::kYearDistance:
      return absl::StrCat("year-distance:", rule.threshold);
  }
  return "unknown";
}

absl::StatusOr<ItemCatalog> ApplyGroupRule(const ItemCatalog& catalog, const GroupRule& rule,
                                           const InteractionLog* log,
                                           std::optional<ItemId> source) {
  if (rule.kind == GroupRuleKind::kAttributeColumn) return catalog;
  const int n = catalog.size();
  std::vector<GroupId> groups(n, 0);
  switch (rule.kind) {
    case GroupRuleKind::kYearThreshold:
      if (!catalog.has_meta()) {
        return absl::FailedPreconditionError("year rule needs item release years");
      }
      for (ItemId i = 1; i <= n; ++i) {
        const auto& year = catalog.meta(i).year;
        if (year.has_value() && *year < rule.threshold) groups[Index(i)] = 1;
      }
      break;
    case GroupRuleKind::kInteractionCountThreshold: {
      if (log == nullptr) {
        return absl::FailedPreconditionError("popularity rule needs the interaction log");
      }
      std::vector<int> count(n, 0);
      for (const Interaction& e : log->entries) {
        if (catalog.contains(e.item)) ++count[Index(e.item)];
      }
      for (int i = 0; i < n; ++i) groups[i] = count[i] < rule.threshold ? 1 : 0;
      break;
    }
    case GroupRuleKind::kYearDistance: {
      if (!catalog.has_meta()) {
        return absl::FailedPreconditionError("year-distance rule needs item release years");
      }
      if (!source.has_value() || !catalog.contains(*source)) {
        return absl::InvalidArgumentError("year-distance rule needs a valid source item");
      }
      const auto& origin = catalog.meta(*source).year;
      if (!origin.has_value()) {
        return absl::FailedPreconditionError(
            absl::StrCat("source item ", *source, " has no release year"));
      }
      for (ItemId i = 1; i <= n; ++i) {
        const auto& year = catalog.meta(i).year;
        if (year.has_value() && std::abs(*year - *origin) > rule.threshold) groups[Index(i)] = 1;
      }
      break;
    }
    case GroupRuleKind::kAttributeColumn:
      break;
  }
  return catalog.Regroup(std::move(groups),
                         {std::string(kOtherGroup), std::string(kProtectedGroup)});
}

InteractionLog KCore(const InteractionLog& log, int k) {
  InteractionLog out = log;
  while (true) {
    std::vector<int> user_deg(log.num_users + 1, 0), item_deg(log.num_items + 1, 0);
    for (const Interaction& e : out.entries) {
      ++user_deg[e.user];
      ++item_deg[e.item];
    }
    const std::size_t before = out.entries.size();
    out.entries.erase(std::remove_if(out.entries.begin(), out.entries.end(),
                                     [&](const Interaction& e) {
                                       return user_deg[e.user] < k || item_deg[e.item] < k;
                                     }),
                      out.entries.end());
    if (out.entries.size() == before) break;
  }
  return out;
}

Split MakeSplit(const InteractionLog& log, std::uint64_t seed) {
  std::map<std::int32_t, std::vector<Interaction>> by_user;
  for (const Interaction& e : log.entries) by_user[e.user].push_back(e);
  std::mt19937_64 rng(seed);

  Split split;
  split.train.num_users = log.num_users;
  split.train.num_items = log.num_items;
  split.train.has_timestamps = log.has_timestamps;
  absl::flat_hash_map<std::int32_t, ItemId> held_out;
  for (auto& [user, entries] : by_user) {
    // Order oldest to latest; equal timestamps put the larger id later.
    if (log.has_timestamps) {
      std::sort(entries.begin(), entries.end(), [](const Interaction& a, const Interaction& b) {
        return std::tie(a.timestamp, a.item) < std::tie(b.timestamp, b.item);
      });
    } else {
      std::sort(entries.begin(), entries.end(),
                [](const Interaction& a, const Interaction& b) { return a.item < b.item; });
      std::shuffle(entries.begin(), entries.end(), rng);
    }
    const ItemId test = entries.back().item;
    ItemId source = kNoItem;
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
      if (it->item != test) {
        source = it->item;
        break;
      }
    }
    if (source == kNoItem) {
      split.warnings.push_back(
          absl::StrCat("user ", user, " has fewer than two distinct items; dropped"));
      continue;
    }
    held_out[user] = test;
    split.test[user] = {test};
    split.source[user] = source;
    split.users.push_back(user);
  }
  for (const Interaction& e : log.entries) {
    auto it = held_out.find(e.user);
    if (it != held_out.end() && it->second == e.item) continue;
    split.train.entries.push_back(e);
  }
  return split;
}

}  // namespace usrec
