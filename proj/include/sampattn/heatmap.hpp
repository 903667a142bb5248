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

// 8-bit grayscale PGM (P5) export. Probability matrices are log-scaled over
// six decades (1.0 -> 255, <= 1e-6 -> 0); masks are binary. Tiles of
// downsample x downsample cells are max-pooled.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sampattn/block_mask.hpp"
#include "sampattn/core.hpp"

namespace sampattn {

struct GrayImage {
  Index width = 0;
  Index height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(Index row, Index col) const { return pixels[row * width + col]; }
};

std::uint8_t log_gray(double probability);

GrayImage heatmap_image(const MatrixXd& probs, Index downsample);
/// One cell per (query block, key block).
GrayImage heatmap_image(const BlockMask& mask, Index downsample);

void write_pgm(const GrayImage& img, const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);

void export_heatmap(const MatrixXd& probs, const std::filesystem::path& path,
                    Index downsample = 1);
void export_heatmap(const BlockMask& mask, const std::filesystem::path& path,
                    Index downsample = 1);

}  // namespace sampattn
