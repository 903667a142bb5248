// Copyright 2026 The sampattn Authors. All Rights Reserved.
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

#include "sampattn/core.hpp"

namespace sampattn {

void validate(const HeadSet& set) {
  if (set.heads.empty()) throw InputError("head set is empty");
  for (const Head& head : set.heads) {
    validate(head);
    if (head.seq_len() != set.seq_len || head.head_dim() != set.head_dim)
      throw InputError("all heads must share S and d");
  }
}

}  // namespace sampattn
