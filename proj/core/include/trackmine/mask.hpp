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

#pragma once

#include "trackmine/types.hpp"

namespace trackmine {

/// Intersection-over-union of two masks in [0, 1].
///
/// Box/box pairs use exact continuous area arithmetic. RLE/RLE pairs run a
/// two-pointer merge over the run lists and require equal canvas sizes
/// (throws std::invalid_argument otherwise). Mixed pairs rasterize the box
/// onto the RLE canvas (a pixel is foreground when its center falls inside
/// the box) and compute pixel IoU. When both masks are empty the result is
/// 0, never a match.
double mask_iou(const MaskGeometry& a, const MaskGeometry& b);

/// Rasterize a box onto a w x h canvas using the pixel-center rule.
RleMask rasterize_box(const BoundingBox& box, std::uint32_t width, std::uint32_t height);

/// Build an RLE mask from a row-major pixel buffer (non-zero = foreground).
RleMask rle_from_pixels(const std::vector<std::uint8_t>& pixels,
                        std::uint32_t width, std::uint32_t height);

/// Expand an RLE mask to a row-major pixel buffer of width * height bytes.
std::vector<std::uint8_t> rle_to_pixels(const RleMask& mask);

}  // namespace trackmine
