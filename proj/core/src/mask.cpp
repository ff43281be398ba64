/*
 * Copyright (c) 2026, the trackmine authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "trackmine/mask.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trackmine {
namespace {

// Intersection/union pixel counts via a two-pointer sweep over run lists.
struct RleOverlap {
  std::uint64_t intersection = 0;
  std::uint64_t union_ = 0;
};

RleOverlap rle_overlap(const RleMask& a, const RleMask& b) {
  RleOverlap out;
  std::size_t ia = 0, ib = 0;
  std::uint64_t remaining_a = a.runs.empty() ? 0 : a.runs[0];
  std::uint64_t remaining_b = b.runs.empty() ? 0 : b.runs[0];
  bool fg_a = false, fg_b = false;
  std::uint64_t left = a.pixel_count();
  while (left > 0) {
    while (remaining_a == 0 && ia + 1 < a.runs.size()) {
      remaining_a = a.runs[++ia];
      fg_a = (ia % 2) == 1;
    }
    while (remaining_b == 0 && ib + 1 < b.runs.size()) {
      remaining_b = b.runs[++ib];
      fg_b = (ib % 2) == 1;
    }
    const std::uint64_t step = std::min({remaining_a, remaining_b, left});
    if (step == 0) break;  // malformed runs; validate_mask reports this case
    if (fg_a && fg_b) out.intersection += step;
    if (fg_a || fg_b) out.union_ += step;
    remaining_a -= step;
    remaining_b -= step;
    left -= step;
  }
  return out;
}

double box_box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double pixel_iou(const RleMask& a, const RleMask& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("mask_iou: RLE canvas size mismatch");
  const RleOverlap o = rle_overlap(a, b);
  if (o.union_ == 0) return 0.0;
  return double(o.intersection) / double(o.union_);
}

}  // namespace

RleMask rle_from_pixels(const std::vector<std::uint8_t>& pixels,
                        std::uint32_t width, std::uint32_t height) {
  if (pixels.size() != std::size_t(width) * height)
    throw std::invalid_argument("rle_from_pixels: buffer size mismatch");
  RleMask m;
  m.width = width;
  m.height = height;
  std::uint64_t run = 0;
  bool fg = false;
  for (std::uint8_t p : pixels) {
    const bool v = p != 0;
    if (v == fg) {
      ++run;
    } else {
      m.runs.push_back(run);
      fg = v;
      run = 1;
    }
  }
  m.runs.push_back(run);
  return m;
}

std::vector<std::uint8_t> rle_to_pixels(const RleMask& mask) {
  std::vector<std::uint8_t> pixels;
  pixels.reserve(mask.pixel_count());
  bool fg = false;
  for (std::uint64_t run : mask.runs) {
    pixels.insert(pixels.end(), run, fg ? 1 : 0);
    fg = !fg;
  }
  if (pixels.size() != mask.pixel_count())
    throw std::invalid_argument("rle_to_pixels: run-length sum mismatch");
  return pixels;
}

RleMask rasterize_box(const BoundingBox& box, std::uint32_t width, std::uint32_t height) {
  std::vector<std::uint8_t> pixels(std::size_t(width) * height, 0);
  for (std::uint32_t row = 0; row < height; ++row) {
    const double cy = row + 0.5;
    if (cy < box.y || cy >= box.y + box.h) continue;
    for (std::uint32_t col = 0; col < width; ++col) {
      const double cx = col + 0.5;
      if (cx >= box.x && cx < box.x + box.w) pixels[std::size_t(row) * width + col] = 1;
    }
  }
  return rle_from_pixels(pixels, width, height);
}

double mask_iou(const MaskGeometry& a, const MaskGeometry& b) {
  if (a.is_rle() && b.is_rle()) return pixel_iou(a.rle(), b.rle());
  if (!a.is_rle() && !b.is_rle()) return box_box_iou(a.box(), b.box());
  // Mixed pair: the box degenerates to a mask on the RLE canvas.
  const RleMask& m = a.is_rle() ? a.rle() : b.rle();
  const BoundingBox& box = a.is_rle() ? b.box() : a.box();
  return pixel_iou(m, rasterize_box(box, m.width, m.height));
}

}  // namespace trackmine
