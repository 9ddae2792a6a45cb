#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaglyph/geometry.hpp"

namespace metaglyph {

struct ElementList;

struct Rgb {
  std::uint8_t r{0}, g{0}, b{0};
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// #rgb, #rrggbb, rgb(r,g,b) and a small set of named colors.
std::optional<Rgb> parse_color(std::string_view text);
std::string to_hex(Rgb c);

struct RgbImage {
  std::size_t width{0};
  std::size_t height{0};
  std::vector<std::uint8_t> pixels;  // row-major RGB
};

/// Paint the visible elements (removed ones included) onto a white canvas
/// spanning the whole-image bbox.
RgbImage rasterize(const ElementList& list, std::size_t width, std::size_t height);

/// Uncompressed-filter PNG (zlib deflate).
std::string encode_png(const RgbImage& img);

}  // namespace metaglyph
