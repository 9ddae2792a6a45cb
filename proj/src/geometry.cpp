#include "metaglyph/geometry.hpp"

namespace metaglyph {

double signed_area(std::span<const Point> ring) {
  if (ring.size() < 3) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Point& p = ring[i];
    const Point& q = ring[(i + 1) % n];
    sum += p.x * q.y - q.x * p.y;
  }
  return sum / 2.0;
}

double polyline_length(const Polyline& pl) {
  double len = 0.0;
  for (std::size_t i = 1; i < pl.points.size(); ++i) len += distance(pl.points[i - 1], pl.points[i]);
  if (pl.closed && pl.points.size() > 2) len += distance(pl.points.back(), pl.points.front());
  return len;
}

Rect bounds(std::span<const Polyline> outline) {
  Rect r;
  for (const auto& pl : outline)
    for (const auto& p : pl.points) r.expand(p);
  return r;
}

std::vector<Point> resample_ring(std::span<const Point> ring, std::size_t samples) {
  std::vector<Point> out;
  if (ring.empty() || samples == 0) return out;
  const std::size_t n = ring.size();
  double perimeter = 0.0;
  for (std::size_t i = 0; i < n; ++i) perimeter += distance(ring[i], ring[(i + 1) % n]);
  if (perimeter <= 0.0) return std::vector<Point>(samples, ring.front());

  out.reserve(samples);
  const double step = perimeter / static_cast<double>(samples);
  double target = 0.0, walked = 0.0;
  std::size_t seg = 0;
  while (out.size() < samples && seg < n) {
    const Point a = ring[seg], b = ring[(seg + 1) % n];
    const double len = distance(a, b);
    if (target <= walked + len || seg == n - 1) {
      const double t = len > 0 ? std::clamp((target - walked) / len, 0.0, 1.0) : 0.0;
      out.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
      target += step;
    } else {
      walked += len;
      ++seg;
    }
  }
  return out;
}

}  // namespace metaglyph
