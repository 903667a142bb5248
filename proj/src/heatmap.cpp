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

#include "sampattn/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sampattn {

std::uint8_t log_gray(double p) {
  if (!(p > 0.0)) return 0;
  const double t = 1.0 + std::log10(std::min(p, 1.0)) / 6.0;
  return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
}

namespace {

template <typename CellFn>
GrayImage pooled(Index rows, Index cols, Index downsample, CellFn&& cell) {
  if (downsample < 1) throw InputError("heatmap: downsample must be >= 1");
  GrayImage img;
  img.height = ceil_div(rows, downsample);
  img.width = ceil_div(cols, downsample);
  img.pixels.assign(static_cast<std::size_t>(img.width * img.height), 0);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      auto& px = img.pixels[(i / downsample) * img.width + j / downsample];
      px = std::max(px, cell(i, j));
    }
  return img;
}

}  // namespace

GrayImage heatmap_image(const MatrixXd& probs, Index downsample) {
  return pooled(probs.rows(), probs.cols(), downsample,
                [&](Index i, Index j) { return log_gray(probs(i, j)); });
}

GrayImage heatmap_image(const BlockMask& mask, Index downsample) {
  return pooled(mask.n_qblocks(), mask.n_kblocks(), downsample,
                [&](Index i, Index j) -> std::uint8_t { return mask.active(i, j) ? 255 : 0; });
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open " + path.string() + " for writing");
  os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
  if (!os) throw InputError("write failed: " + path.string());
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path.string());
  std::string magic;
  int maxval = 0;
  GrayImage img;
  is >> magic >> img.width >> img.height >> maxval;
  if (!is || magic != "P5" || maxval != 255 || img.width < 0 || img.height < 0)
    throw InputError("not an 8-bit P5 PGM: " + path.string());
  is.get();
  img.pixels.resize(static_cast<std::size_t>(img.width * img.height));
  if (!is.read(reinterpret_cast<char*>(img.pixels.data()),
               static_cast<std::streamsize>(img.pixels.size())))
    throw InputError("truncated PGM: " + path.string());
  return img;
}

void export_heatmap(const MatrixXd& probs, const std::filesystem::path& path,
                    Index downsample) {
  write_pgm(heatmap_image(probs, downsample), path);
}

void export_heatmap(const BlockMask& mask, const std::filesystem::path& path,
                    Index downsample) {
  write_pgm(heatmap_image(mask, downsample), path);
}

}  // namespace sampattn
