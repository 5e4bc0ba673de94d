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

#include "usrec/embedding.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace usrec {

absl::StatusOr<EmbeddingMatrix> ReadEmbeddingTsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open embedding ", path));
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": empty embedding file"));
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = absl::StrSplit(line, '\t');
  if (header.size() < 2 || header[0] != "item_id") {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": header must be item_id<TAB>v1...<TAB>vd"));
  }
  const int dim = static_cast<int>(header.size()) - 1;
  std::vector<std::optional<std::vector<double>>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cols = absl::StrSplit(line, '\t');
    if (static_cast<int>(cols.size()) != dim + 1) {
      return absl::InvalidArgumentError(absl::StrCat(path, ":", line_no, ": expected ",
                                                     dim + 1, " columns, got ", cols.size()));
    }
    int id = 0;
    if (!absl::SimpleAtoi(cols[0], &id) || id < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": bad item id '", cols[0], "'"));
    }
    std::vector<double> values(dim);
    for (int c = 0; c < dim; ++c) {
      if (!absl::SimpleAtod(cols[c + 1], &values[c]) || !std::isfinite(values[c])) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ":", line_no, ": bad value '", cols[c + 1], "'"));
      }
    }
    if (static_cast<std::size_t>(id) > rows.size()) rows.resize(id);
    if (rows[id - 1].has_value()) {
      return absl::InvalidArgumentError(absl::StrCat(path, ":", line_no, ": duplicate id ", id));
    }
    rows[id - 1] = std::move(values);
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].has_value()) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": missing item ", i + 1));
    }
    for (int c = 0; c < dim; ++c) x(i, c) = (*rows[i])[c];
  }
  return EmbeddingMatrix(std::move(x));
}

absl::Status WriteEmbeddingTsv(const EmbeddingMatrix& x, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  std::fputs("item_id", f);
  for (int c = 1; c <= x.dim(); ++c) std::fprintf(f, "\tv%d", c);
  std::fputc('\n', f);
  for (int i = 0; i < x.num_items(); ++i) {
    std::fprintf(f, "%d", i + 1);
    for (int c = 0; c < x.dim(); ++c) std::fprintf(f, "\t%.17g", x.values()(i, c));
    std::fputc('\n', f);
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

}  // namespace usrec
