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

// Binary Q/K/V dump format:
//   ASCII header line "QKV <version> <heads> <S> <d>\n"
//   4-byte magic: 1.0f little-endian (00 00 80 3F), an endianness probe
//   heads * 3 * S * d little-endian float32, per head Q then K then V,
//   each row-major.

#include <filesystem>
#include <iosfwd>

#include "sampattn/core.hpp"

namespace sampattn {

inline constexpr int kTensorFormatVersion = 1;

void write_tensors(std::ostream& os, const HeadSet& set);
HeadSet read_tensors(std::istream& is);

void save_tensors(const HeadSet& set, const std::filesystem::path& path);
HeadSet load_tensors(const std::filesystem::path& path);

}  // namespace sampattn
