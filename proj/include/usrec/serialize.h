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

#ifndef USREC_SERIALIZE_H_
#define USREC_SERIALIZE_H_

#include "json.hpp"
#include "usrec/catalog.h"
#include "usrec/recommenders.h"
#include "usrec/recovery.h"

namespace usrec {

// {"list": [...], "accesses": n | null, "walk_length": n,
//  "group_counts": {name: count}, "trace": [...], "fallback_used": bool}
nlohmann::ordered_json RecResultToJson(const RecResult& result, const ItemCatalog& catalog);

// {"error": e, "scale": s, "rotation": [[...]], "translation": [...]}
nlohmann::ordered_json AlignResultToJson(const AlignResult& result);

}  // namespace usrec

#endif  // USREC_SERIALIZE_H_
