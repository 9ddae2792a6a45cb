#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metaglyph/geometry.hpp"

// Data-parallel inner loops. `serial` holds straightforward reference
// implementations kept for testing and benchmarking; `parallel` holds the
// OpenMP versions used by the engine. Results agree up to floating-point
// rounding (masks and resampling agree exactly).
namespace metaglyph::kernels {

/// Row-major w×h coverage grid over `frame`; a pixel is set when its center
/// lies inside a closed ring (nonzero winding) or within half the stroke
/// width of an open polyline.
struct MaskSpec {
  Rect frame;
  std::size_t width{256};
  std::size_t height{256};
  double stroke_width{1.0};  // user units
};

namespace serial {
/// Per box: area of the union of its intersections with every other box,
/// divided by its own area.
std::vector<double> overlap_fractions(std::span<const Rect> boxes);
std::vector<std::uint8_t> fill_mask(std::span<const Polyline> outline, const MaskSpec& spec);
/// Mean of `field` over set mask cells; NaN when the mask is empty.
double masked_mean(std::span<const float> field, std::span<const std::uint8_t> mask);
std::vector<float> resample_bilinear(std::span<const float> src, std::size_t sw, std::size_t sh, std::size_t dw,
                                     std::size_t dh);
}  // namespace serial

namespace parallel {
std::vector<double> overlap_fractions(std::span<const Rect> boxes);
std::vector<std::uint8_t> fill_mask(std::span<const Polyline> outline, const MaskSpec& spec);
double masked_mean(std::span<const float> field, std::span<const std::uint8_t> mask);
std::vector<float> resample_bilinear(std::span<const float> src, std::size_t sw, std::size_t sh, std::size_t dw,
                                     std::size_t dh);
}  // namespace parallel

using parallel::fill_mask;
using parallel::masked_mean;
using parallel::overlap_fractions;
using parallel::resample_bilinear;

int max_threads();

}  // namespace metaglyph::kernels
