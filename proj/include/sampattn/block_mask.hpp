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

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sampattn/core.hpp"

namespace sampattn {

inline Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

/// Column and slash block indices chosen for one sampling chunk. Indices are
/// kept in rank order (descending score, ties toward the lower index).
struct ChunkSelection {
  std::vector<Index> columns;
  std::vector<Index> slashes;
  Index k_c = 0;
  Index k_s = 0;
  // Sampled mass covered by the selection and the direction totals, all
  // summed in rank order so retained >= alpha * total holds exactly.
  double column_retained = 0.0;
  double slash_retained = 0.0;
  double column_total = 0.0;
  double slash_total = 0.0;
};

struct SelectedIndices {
  std::vector<ChunkSelection> chunks;
};

/// Block-level sparsity pattern over the (query block x key block) grid.
/// Only causal blocks (kb <= qb) may be active. Each query block's active
/// key blocks are kept sorted ascending.
class BlockMask {
 public:
  BlockMask() = default;
  BlockMask(Index seq_len, Index blk);

  static BlockMask full_causal(Index seq_len, Index blk);
  static BlockMask diagonal(Index seq_len, Index blk);

  Index seq_len() const { return seq_len_; }
  Index blk() const { return blk_; }
  Index n_qblocks() const { return static_cast<Index>(rows_.size()); }
  Index n_kblocks() const { return n_qblocks(); }

  /// Rows covered by query block qb: [qb*blk, min((qb+1)*blk, S)).
  Index block_begin(Index b) const { return b * blk_; }
  Index block_size(Index b) const {
    return std::min(blk_, seq_len_ - b * blk_);
  }

  bool active(Index qb, Index kb) const;
  /// Throws InputError for acausal or out-of-range blocks.
  void activate(Index qb, Index kb);
  const std::vector<Index>& row(Index qb) const { return rows_.at(qb); }

  Index active_count() const;
  Index causal_block_count() const {
    return n_qblocks() * (n_qblocks() + 1) / 2;
  }
  double density() const;
  bool has_diagonal() const;
  /// True when every active block of *this is active in other.
  bool subset_of(const BlockMask& other) const;

  std::optional<SelectedIndices> provenance;

  friend bool operator==(const BlockMask& a, const BlockMask& b) {
    return a.seq_len_ == b.seq_len_ && a.blk_ == b.blk_ && a.rows_ == b.rows_;
  }

 private:
  Index seq_len_ = 0;
  Index blk_ = 1;
  std::vector<std::vector<Index>> rows_;
};

/// Text form:
///   BLOCKMASK v1 <n_qblocks> <n_kblocks> <blk>
///   one line per query block: active key blocks, ascending, space separated
/// The header carries no S, so a parsed mask assumes S = n_qblocks * blk
/// unless `seq_len` is given.
void write_block_mask(std::ostream& os, const BlockMask& mask);
std::string to_text(const BlockMask& mask);
BlockMask read_block_mask(std::istream& is, std::optional<Index> seq_len = {});
std::vector<BlockMask> read_block_masks(std::istream& is,
                                        std::optional<Index> seq_len = {});

}  // namespace sampattn
