#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "metaglyph/kernels.hpp"

namespace metaglyph::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace parallel {

namespace {

// Union area of rectangles by an x-sweep over merged y-intervals.
double union_area(std::vector<Rect>& parts) {
  std::vector<double> xs;
  xs.reserve(parts.size() * 2);
  for (const auto& r : parts) xs.insert(xs.end(), {r.min_x, r.max_x});
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(parts.begin(), parts.end(), [](const Rect& a, const Rect& b) { return a.min_y < b.min_y; });
  double total = 0.0;
  for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
    const double x0 = xs[a], x1 = xs[a + 1];
    double covered = 0.0, run_lo = 0.0, run_hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : parts) {
      if (r.min_x > x0 || r.max_x < x1) continue;
      if (r.min_y > run_hi) {
        if (run_hi > run_lo) covered += run_hi - run_lo;
        run_lo = r.min_y;
        run_hi = r.max_y;
      } else {
        run_hi = std::max(run_hi, r.max_y);
      }
    }
    if (run_hi > run_lo) covered += run_hi - run_lo;
    total += covered * (x1 - x0);
  }
  return total;
}

}  // namespace

std::vector<double> overlap_fractions(std::span<const Rect> boxes) {
  const auto n = static_cast<std::ptrdiff_t>(boxes.size());
  std::vector<double> out(boxes.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double own = boxes[ui].area();
    if (own <= 0) continue;
    std::vector<Rect> parts;
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      if (j == ui) continue;
      const Rect r = intersection(boxes[ui], boxes[j]);
      if (r.area() > 0) parts.push_back(r);
    }
    if (!parts.empty()) out[ui] = union_area(parts) / own;
  }
  return out;
}

std::vector<std::uint8_t> fill_mask(std::span<const Polyline> outline, const MaskSpec& spec) {
  std::vector<std::uint8_t> mask(spec.width * spec.height, 0);
  const double pw = spec.frame.width() / static_cast<double>(spec.width);
  const double ph = spec.frame.height() / static_cast<double>(spec.height);
  const double half = std::max(spec.stroke_width / 2, 0.5 * std::max(pw, ph));
  const auto rows = static_cast<std::ptrdiff_t>(spec.height);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t yi = 0; yi < rows; ++yi) {
    const auto y = static_cast<std::size_t>(yi);
    const double cy = spec.frame.min_y + (static_cast<double>(y) + 0.5) * ph;
    std::uint8_t* row = mask.data() + y * spec.width;

    // Scanline crossings with direction; winding at x = sum of crossings right of x.
    std::vector<std::pair<double, int>> cross;
    for (const auto& pl : outline) {
      if (!pl.closed || pl.points.size() < 3) continue;
      for (std::size_t i = 0, n = pl.points.size(); i < n; ++i) {
        const Point a = pl.points[i], b = pl.points[(i + 1) % n];
        int dir = 0;
        if (a.y <= cy && b.y > cy) dir = 1;
        else if (b.y <= cy && a.y > cy) dir = -1;
        if (!dir) continue;
        const double t = (cy - a.y) / (b.y - a.y);
        cross.emplace_back(a.x + t * (b.x - a.x), dir);
      }
    }
    std::sort(cross.begin(), cross.end());
    int total = 0;
    for (const auto& c : cross) total += c.second;
    // Walk left to right: winding(x) = total - sum(dir of crossings with cx >= x_cross).
    std::size_t k = 0;
    int passed = 0;
    for (std::size_t x = 0; x < spec.width; ++x) {
      const double cx = spec.frame.min_x + (static_cast<double>(x) + 0.5) * pw;
      while (k < cross.size() && cross[k].first < cx) passed += cross[k++].second;
      if (total - passed != 0) row[x] = 1;
    }

    for (const auto& pl : outline) {
      if (pl.closed && pl.points.size() >= 3) continue;
      auto stamp = [&](Point a, Point b) {
        if (std::min(a.y, b.y) - half > cy || std::max(a.y, b.y) + half < cy) return;
        const double lo = std::min(a.x, b.x) - half, hi = std::max(a.x, b.x) + half;
        const auto x0 = static_cast<std::ptrdiff_t>(std::floor((lo - spec.frame.min_x) / pw - 0.5));
        const auto x1 = static_cast<std::ptrdiff_t>(std::ceil((hi - spec.frame.min_x) / pw - 0.5));
        const double dx = b.x - a.x, dy = b.y - a.y, len2 = dx * dx + dy * dy;
        for (std::ptrdiff_t x = std::max<std::ptrdiff_t>(x0, 0);
             x <= std::min<std::ptrdiff_t>(x1, static_cast<std::ptrdiff_t>(spec.width) - 1); ++x) {
          const Point p{spec.frame.min_x + (static_cast<double>(x) + 0.5) * pw, cy};
          double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          if (distance(p, {a.x + t * dx, a.y + t * dy}) <= half) row[x] = 1;
        }
      };
      if (pl.points.size() == 1) stamp(pl.points[0], pl.points[0]);
      for (std::size_t i = 1; i < pl.points.size(); ++i) stamp(pl.points[i - 1], pl.points[i]);
    }
  }
  return mask;
}

double masked_mean(std::span<const float> field, std::span<const std::uint8_t> mask) {
  const auto n = static_cast<std::ptrdiff_t>(std::min(field.size(), mask.size()));
  double sum = 0.0;
  long long count = 0;
#pragma omp parallel for reduction(+ : sum, count) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (mask[static_cast<std::size_t>(i)]) {
      sum += field[static_cast<std::size_t>(i)];
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

std::vector<float> resample_bilinear(std::span<const float> src, std::size_t sw, std::size_t sh, std::size_t dw,
                                     std::size_t dh) {
  std::vector<float> dst(dw * dh, 0.0f);
  if (sw == 0 || sh == 0) return dst;
  const auto rows = static_cast<std::ptrdiff_t>(dh);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t yi = 0; yi < rows; ++yi) {
    const auto y = static_cast<std::size_t>(yi);
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

}  // namespace parallel
}  // namespace metaglyph::kernels
