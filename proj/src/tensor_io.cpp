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

#include "sampattn/tensor_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sampattn {

namespace {

constexpr std::uint32_t kMagic = 0x3F800000u;  // 1.0f
constexpr std::size_t kMaxHeaderBytes = 256;

void put_u32(std::ostream& os, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xFF),
                              static_cast<char>((v >> 8) & 0xFF),
                              static_cast<char>((v >> 16) & 0xFF),
                              static_cast<char>((v >> 24) & 0xFF)};
  os.write(b.data(), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

[[noreturn]] void fail(const std::string& what, std::uint64_t offset) {
  throw InputError("tensor file: " + what + " at byte offset " +
                   std::to_string(offset));
}

}  // namespace

void write_tensors(std::ostream& os, const HeadSet& set) {
  validate(set);
  os << "QKV " << kTensorFormatVersion << ' ' << set.heads.size() << ' '
     << set.seq_len << ' ' << set.head_dim << '\n';
  put_u32(os, kMagic);
  for (const Head& h : set.heads)
    for (const MatrixXf* m : {&h.q, &h.k, &h.v})
      for (Index i = 0; i < m->size(); ++i)
        put_u32(os, std::bit_cast<std::uint32_t>(m->data()[i]));
  if (!os) throw InputError("tensor file: write failed");
}

HeadSet read_tensors(std::istream& is) {
  std::string header;
  char c = 0;
  while (header.size() < kMaxHeaderBytes && is.get(c) && c != '\n') header.push_back(c);
  if (c != '\n') fail("missing or overlong header line", header.size());
  const std::uint64_t header_bytes = header.size() + 1;

  std::istringstream hs(header);
  std::string tag;
  long long version = 0, heads = 0, s = 0, d = 0;
  hs >> tag >> version >> heads >> s >> d;
  std::string extra;
  if (!hs || tag != "QKV" || (hs >> extra))
    fail("malformed header '" + header + "'", 0);
  if (version != kTensorFormatVersion)
    fail("unsupported version " + std::to_string(version), 4);
  if (heads < 1 || s < 1 || d < 1)
    fail("header dimensions must be >= 1", 0);

  unsigned char magic[4];
  if (!is.read(reinterpret_cast<char*>(magic), 4)) fail("truncated magic", header_bytes);
  if (get_u32(magic) != kMagic)
    fail("bad magic (expected little-endian 1.0f; big-endian or corrupt file)",
         header_bytes);

  const std::uint64_t per_matrix = static_cast<std::uint64_t>(s) * d;
  const std::uint64_t count = per_matrix * 3 * heads;
  std::vector<unsigned char> payload(count * 4);
  is.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size()));
  const std::uint64_t got = static_cast<std::uint64_t>(is.gcount());
  const std::uint64_t payload_offset = header_bytes + 4;
  if (got != payload.size())
    fail("truncated payload: expected " + std::to_string(payload.size()) +
             " bytes, got " + std::to_string(got),
         payload_offset + got);
  if (is.peek() != std::char_traits<char>::eof())
    fail("unexpected trailing bytes", payload_offset + payload.size());

  HeadSet set;
  set.seq_len = s;
  set.head_dim = d;
  std::uint64_t at = 0;
  for (long long h = 0; h < heads; ++h) {
    Head head;
    head.head_id = h;
    for (MatrixXf* m : {&head.q, &head.k, &head.v}) {
      m->resize(s, d);
      for (std::uint64_t i = 0; i < per_matrix; ++i, ++at) {
        const float v = std::bit_cast<float>(get_u32(&payload[at * 4]));
        if (!std::isfinite(v)) fail("non-finite value", payload_offset + at * 4);
        m->data()[i] = v;
      }
    }
    set.heads.push_back(std::move(head));
  }
  return set;
}

void save_tensors(const HeadSet& set, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open " + path.string() + " for writing");
  write_tensors(os, set);
}

HeadSet load_tensors(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path.string());
  return read_tensors(is);
}

}  // namespace sampattn
