#include <algorithm>
#include <cmath>
#include <limits>

#include "metaglyph/kernels.hpp"

namespace metaglyph::kernels::serial {

namespace {

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

// Winding number of ring around p, half-open in y.
int winding(Point p, const std::vector<Point>& ring) {
  int wn = 0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Point a = ring[i], b = ring[(i + 1) % n];
    const double cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && cross > 0) ++wn;
    } else if (b.y <= p.y && cross < 0) {
      --wn;
    }
  }
  return wn;
}

}  // namespace

std::vector<double> overlap_fractions(std::span<const Rect> boxes) {
  std::vector<double> out(boxes.size(), 0.0);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const double own = boxes[i].area();
    if (own <= 0) continue;
    std::vector<Rect> parts;
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      if (i == j) continue;
      const Rect r = intersection(boxes[i], boxes[j]);
      if (r.area() > 0) parts.push_back(r);
    }
    if (parts.empty()) continue;
    // Coordinate-compressed grid; a cell counts when any part covers its center.
    std::vector<double> xs, ys;
    for (const auto& r : parts) {
      xs.insert(xs.end(), {r.min_x, r.max_x});
      ys.insert(ys.end(), {r.min_y, r.max_y});
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    double covered = 0.0;
    for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
      for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
        const Point c{(xs[a] + xs[a + 1]) / 2, (ys[b] + ys[b + 1]) / 2};
        for (const auto& r : parts) {
          if (c.x > r.min_x && c.x < r.max_x && c.y > r.min_y && c.y < r.max_y) {
            covered += (xs[a + 1] - xs[a]) * (ys[b + 1] - ys[b]);
            break;
          }
        }
      }
    }
    out[i] = covered / own;
  }
  return out;
}

std::vector<std::uint8_t> fill_mask(std::span<const Polyline> outline, const MaskSpec& spec) {
  std::vector<std::uint8_t> mask(spec.width * spec.height, 0);
  const double pw = spec.frame.width() / static_cast<double>(spec.width);
  const double ph = spec.frame.height() / static_cast<double>(spec.height);
  const double half = std::max(spec.stroke_width / 2, 0.5 * std::max(pw, ph));
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      const Point p{spec.frame.min_x + (static_cast<double>(x) + 0.5) * pw,
                    spec.frame.min_y + (static_cast<double>(y) + 0.5) * ph};
      int wn = 0;
      bool hit = false;
      for (const auto& pl : outline) {
        if (pl.closed && pl.points.size() >= 3) {
          wn += winding(p, pl.points);
        } else {
          for (std::size_t k = 1; k < pl.points.size() && !hit; ++k)
            hit = segment_distance(p, pl.points[k - 1], pl.points[k]) <= half;
          if (pl.points.size() == 1) hit = hit || distance(p, pl.points[0]) <= half;
        }
      }
      mask[y * spec.width + x] = (wn != 0 || hit) ? 1 : 0;
    }
  }
  return mask;
}

double masked_mean(std::span<const float> field, std::span<const std::uint8_t> mask) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < mask.size() && i < field.size(); ++i) {
    if (!mask[i]) continue;
    sum += field[i];
    ++count;
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

std::vector<float> resample_bilinear(std::span<const float> src, std::size_t sw, std::size_t sh, std::size_t dw,
                                     std::size_t dh) {
  std::vector<float> dst(dw * dh, 0.0f);
  if (sw == 0 || sh == 0) return dst;
  for (std::size_t y = 0; y < dh; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * static_cast<double>(sh) / static_cast<double>(dh) - 0.5,
                                 0.0, static_cast<double>(sh - 1));
    const std::size_t y0 = static_cast<std::size_t>(fy), y1 = std::min(y0 + 1, sh - 1);
    const double ty = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < dw; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * static_cast<double>(sw) / static_cast<double>(dw) - 0.5,
                                   0.0, static_cast<double>(sw - 1));
      const std::size_t x0 = static_cast<std::size_t>(fx), x1 = std::min(x0 + 1, sw - 1);
      const double tx = fx - static_cast<double>(x0);
      const double top = src[y0 * sw + x0] * (1 - tx) + src[y0 * sw + x1] * tx;
      const double bot = src[y1 * sw + x0] * (1 - tx) + src[y1 * sw + x1] * tx;
      dst[y * dw + x] = static_cast<float>(top * (1 - ty) + bot * ty);
    }
  }
  return dst;
}

}  // namespace metaglyph::kernels::serial
