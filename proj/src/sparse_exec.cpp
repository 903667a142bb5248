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

#include "sampattn/sparse_exec.hpp"

namespace sampattn {

FlopReport flop_accounting(const BlockMask& mask, Index head_dim) {
  FlopReport r;
  r.active_blocks = mask.active_count();
  r.causal_blocks = mask.causal_block_count();
  r.block_density = mask.density();
  const double per_entry = 4.0 * static_cast<double>(head_dim);
  for (Index qb = 0; qb < mask.n_qblocks(); ++qb) {
    const double nr = static_cast<double>(mask.block_size(qb));
    for (Index kb = 0; kb <= qb; ++kb) {
      const double pair = per_entry * nr * static_cast<double>(mask.block_size(kb));
      r.flops_dense += pair;
      if (mask.active(qb, kb)) r.flops_sparse += pair;
    }
  }
  return r;
}

}  // namespace sampattn
