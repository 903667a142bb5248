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

#include "sampattn/block_mask.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace sampattn {

BlockMask::BlockMask(Index seq_len, Index blk) : seq_len_(seq_len), blk_(blk) {
  if (seq_len < 1 || blk < 1)
    throw InputError("BlockMask: S and blk must be >= 1");
  rows_.resize(ceil_div(seq_len, blk));
}

BlockMask BlockMask::full_causal(Index seq_len, Index blk) {
  BlockMask mask(seq_len, blk);
  for (Index qb = 0; qb < mask.n_qblocks(); ++qb)
    for (Index kb = 0; kb <= qb; ++kb) mask.rows_[qb].push_back(kb);
  return mask;
}

BlockMask BlockMask::diagonal(Index seq_len, Index blk) {
  BlockMask mask(seq_len, blk);
  for (Index qb = 0; qb < mask.n_qblocks(); ++qb) mask.rows_[qb].push_back(qb);
  return mask;
}

bool BlockMask::active(Index qb, Index kb) const {
  if (qb < 0 || qb >= n_qblocks()) return false;
  const auto& r = rows_[qb];
  return std::binary_search(r.begin(), r.end(), kb);
}

void BlockMask::activate(Index qb, Index kb) {
  if (qb < 0 || qb >= n_qblocks() || kb < 0 || kb > qb)
    throw InputError("BlockMask: block (" + std::to_string(qb) + ", " +
                     std::to_string(kb) + ") is not a causal block");
  auto& r = rows_[qb];
  auto it = std::lower_bound(r.begin(), r.end(), kb);
  if (it == r.end() || *it != kb) r.insert(it, kb);
}

Index BlockMask::active_count() const {
  Index n = 0;
  for (const auto& r : rows_) n += static_cast<Index>(r.size());
  return n;
}

double BlockMask::density() const {
  return static_cast<double>(active_count()) /
         static_cast<double>(causal_block_count());
}

bool BlockMask::has_diagonal() const {
  for (Index qb = 0; qb < n_qblocks(); ++qb)
    if (!active(qb, qb)) return false;
  return true;
}

bool BlockMask::subset_of(const BlockMask& other) const {
  if (other.n_qblocks() != n_qblocks()) return false;
  for (Index qb = 0; qb < n_qblocks(); ++qb)
    if (!std::includes(other.rows_[qb].begin(), other.rows_[qb].end(),
                       rows_[qb].begin(), rows_[qb].end()))
      return false;
  return true;
}

void write_block_mask(std::ostream& os, const BlockMask& mask) {
  os << "BLOCKMASK v1 " << mask.n_qblocks() << ' ' << mask.n_kblocks() << ' '
     << mask.blk() << '\n';
  for (Index qb = 0; qb < mask.n_qblocks(); ++qb) {
    const auto& r = mask.row(qb);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os << ' ';
      os << r[i];
    }
    os << '\n';
  }
}

std::string to_text(const BlockMask& mask) {
  std::ostringstream os;
  write_block_mask(os, mask);
  return os.str();
}

namespace {

bool read_header(std::istream& is, Index& nq, Index& nk, Index& blk) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream hs(line);
    std::string magic, version;
    hs >> magic >> version >> nq >> nk >> blk;
    if (!hs || magic != "BLOCKMASK" || version != "v1")
      throw InputError("block mask: bad header '" + line + "'");
    if (nq < 1 || nk != nq || blk < 1)
      throw InputError("block mask: inconsistent header '" + line + "'");
    return true;
  }
  return false;
}

BlockMask read_body(std::istream& is, Index nq, Index blk,
                    std::optional<Index> seq_len) {
  const Index s = seq_len.value_or(nq * blk);
  if (ceil_div(s, blk) != nq)
    throw InputError("block mask: S does not match the block grid");
  BlockMask mask(s, blk);
  std::string line;
  for (Index qb = 0; qb < nq; ++qb) {
    if (!std::getline(is, line))
      throw InputError("block mask: truncated at query block " +
                       std::to_string(qb));
    std::istringstream ls(line);
    Index kb = 0, prev = -1;
    while (ls >> kb) {
      if (kb <= prev)
        throw InputError("block mask: key blocks must be ascending");
      mask.activate(qb, kb);
      prev = kb;
    }
    if (!ls.eof())
      throw InputError("block mask: malformed line for query block " +
                       std::to_string(qb));
  }
  return mask;
}

}  // namespace

BlockMask read_block_mask(std::istream& is, std::optional<Index> seq_len) {
  Index nq = 0, nk = 0, blk = 0;
  if (!read_header(is, nq, nk, blk)) throw InputError("block mask: empty input");
  return read_body(is, nq, blk, seq_len);
}

std::vector<BlockMask> read_block_masks(std::istream& is,
                                        std::optional<Index> seq_len) {
  std::vector<BlockMask> out;
  Index nq = 0, nk = 0, blk = 0;
  while (read_header(is, nq, nk, blk)) out.push_back(read_body(is, nq, blk, seq_len));
  return out;
}

}  // namespace sampattn
