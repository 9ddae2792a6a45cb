#include "metaglyph/raster.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>

#include "metaglyph/kernels.hpp"
#include "metaglyph/metaphor.hpp"

namespace metaglyph {

namespace {

struct Named {
  const char* name;
  Rgb rgb;
};

constexpr Named kNamed[] = {
    {"black", {0, 0, 0}},        {"white", {255, 255, 255}},   {"red", {255, 0, 0}},
    {"green", {0, 128, 0}},      {"blue", {0, 0, 255}},        {"yellow", {255, 255, 0}},
    {"orange", {255, 165, 0}},   {"brown", {165, 42, 42}},     {"gray", {128, 128, 128}},
    {"grey", {128, 128, 128}},   {"purple", {128, 0, 128}},    {"pink", {255, 192, 203}},
    {"gold", {255, 215, 0}},     {"tan", {210, 180, 140}},     {"navy", {0, 0, 128}},
    {"lime", {0, 255, 0}},       {"maroon", {128, 0, 0}},      {"olive", {128, 128, 0}},
    {"teal", {0, 128, 128}},     {"silver", {192, 192, 192}},  {"darkgreen", {0, 100, 0}},
};

int hexval(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out += static_cast<char>((v >> s) & 0xFF);
}

void put_chunk(std::string& out, const char* type, const std::string& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  put_u32(out, static_cast<std::uint32_t>(crc32(0, reinterpret_cast<const Bytef*>(body.data()),
                                                 static_cast<uInt>(body.size()))));
}

}  // namespace

std::optional<Rgb> parse_color(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty() || text == "none" || text == "transparent") return std::nullopt;
  if (text.front() == '#') {
    if (text.size() == 4) {
      int v[3];
      for (int i = 0; i < 3; ++i)
        if ((v[i] = hexval(text[static_cast<std::size_t>(i) + 1])) < 0) return std::nullopt;
      return Rgb{static_cast<std::uint8_t>(v[0] * 17), static_cast<std::uint8_t>(v[1] * 17),
                 static_cast<std::uint8_t>(v[2] * 17)};
    }
    if (text.size() == 7) {
      int v[6];
      for (int i = 0; i < 6; ++i)
        if ((v[i] = hexval(text[static_cast<std::size_t>(i) + 1])) < 0) return std::nullopt;
      return Rgb{static_cast<std::uint8_t>(v[0] * 16 + v[1]), static_cast<std::uint8_t>(v[2] * 16 + v[3]),
                 static_cast<std::uint8_t>(v[4] * 16 + v[5])};
    }
    return std::nullopt;
  }
  if (text.rfind("rgb(", 0) == 0) {
    int r = 0, g = 0, b = 0;
    const std::string s(text);
    if (std::sscanf(s.c_str(), "rgb(%d , %d , %d )", &r, &g, &b) == 3)
      return Rgb{static_cast<std::uint8_t>(std::clamp(r, 0, 255)), static_cast<std::uint8_t>(std::clamp(g, 0, 255)),
                 static_cast<std::uint8_t>(std::clamp(b, 0, 255))};
    return std::nullopt;
  }
  std::string lower;
  for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& n : kNamed)
    if (lower == n.name) return n.rgb;
  return std::nullopt;
}

std::string to_hex(Rgb c) {
  std::array<char, 8> buf{};
  std::snprintf(buf.data(), buf.size(), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf.data();
}

RgbImage rasterize(const ElementList& list, std::size_t width, std::size_t height) {
  RgbImage img{width, height, std::vector<std::uint8_t>(width * height * 3, 255)};
  for (const auto& e : list.elements) {
    const auto fill = parse_color(e.style.fill);
    const auto stroke = parse_color(e.style.stroke);
    if (!fill && !stroke) continue;
    const Rgb c = fill ? *fill : *stroke;
    kernels::MaskSpec spec{list.whole_image.bbox, width, height, e.style.stroke_width};
    const auto mask = kernels::fill_mask(e.outline, spec);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      img.pixels[i * 3] = c.r;
      img.pixels[i * 3 + 1] = c.g;
      img.pixels[i * 3 + 2] = c.b;
    }
  }
  return img;
}

std::string encode_png(const RgbImage& img) {
  std::string raw;
  raw.reserve((img.width * 3 + 1) * img.height);
  for (std::size_t y = 0; y < img.height; ++y) {
    raw += '\0';
    raw.append(reinterpret_cast<const char*>(img.pixels.data() + y * img.width * 3), img.width * 3);
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::string z(zlen, '\0');
  compress2(reinterpret_cast<Bytef*>(z.data()), &zlen, reinterpret_cast<const Bytef*>(raw.data()),
            static_cast<uLong>(raw.size()), 6);
  z.resize(zlen);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(img.width));
  put_u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", {});
  return out;
}

}  // namespace metaglyph
