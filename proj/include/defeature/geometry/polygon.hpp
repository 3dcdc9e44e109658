#pragma once

// Polygon-with-holes sets and the boolean operations on them. The clipping
// kernel is Boost.Geometry; everything downstream works on plain vertex loops.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include "defeature/common.hpp"

namespace defeature::geom {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline bool finite(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double dist(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Open vertex loop, counterclockwise for outer rings, clockwise for holes.
using Ring = std::vector<Point>;

struct PolygonWithHoles {
  Ring outer;
  std::vector<Ring> holes;
};

using PolygonSet = std::vector<PolygonWithHoles>;

// Signed area of an open loop (shoelace).
inline double signed_area(const Ring& r) {
  double s = 0.0;
  size_t n = r.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& a = r[i];
    const Point& b = r[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

inline double ring_length(const Ring& r) {
  double s = 0.0;
  size_t n = r.size();
  for (size_t i = 0; i < n; ++i) s += dist(r[i], r[(i + 1) % n]);
  return s;
}

// Length of an open polyline (no closing segment).
inline double polyline_length(const std::vector<Point>& pts) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) s += dist(pts[i], pts[i + 1]);
  return s;
}

inline double area(const PolygonWithHoles& p) {
  double a = std::abs(signed_area(p.outer));
  for (const Ring& h : p.holes) a -= std::abs(signed_area(h));
  return a;
}

inline double area(const PolygonSet& s) {
  double a = 0.0;
  for (const auto& p : s) a += area(p);
  return a;
}

inline double perimeter(const PolygonWithHoles& p) {
  double s = ring_length(p.outer);
  for (const Ring& h : p.holes) s += ring_length(h);
  return s;
}

inline double perimeter(const PolygonSet& s) {
  double a = 0.0;
  for (const auto& p : s) a += perimeter(p);
  return a;
}

namespace detail {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false, true>;  // ccw, closed
using BMultiPolygon = bg::model::multi_polygon<BPolygon>;

inline BPolygon to_boost(const PolygonWithHoles& p) {
  BPolygon out;
  for (const Point& v : p.outer) bg::append(out.outer(), BPoint(v.x, v.y));
  out.inners().resize(p.holes.size());
  for (size_t i = 0; i < p.holes.size(); ++i)
    for (const Point& v : p.holes[i]) bg::append(out.inners()[i], BPoint(v.x, v.y));
  bg::correct(out);
  return out;
}

inline BMultiPolygon to_boost(const PolygonSet& s) {
  BMultiPolygon out;
  for (const auto& p : s) out.push_back(to_boost(p));
  return out;
}

inline PolygonSet from_boost(const BMultiPolygon& mp) {
  PolygonSet out;
  for (const BPolygon& bp : mp) {
    PolygonWithHoles p;
    const auto& o = bp.outer();
    for (size_t i = 0; i + 1 < o.size(); ++i) p.outer.push_back({bg::get<0>(o[i]), bg::get<1>(o[i])});
    for (const auto& inner : bp.inners()) {
      Ring h;
      for (size_t i = 0; i + 1 < inner.size(); ++i) h.push_back({bg::get<0>(inner[i]), bg::get<1>(inner[i])});
      p.holes.push_back(std::move(h));
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Drop slivers below an absolute area floor produced by near-degenerate clips.
inline PolygonSet prune(PolygonSet s, double min_area) {
  PolygonSet out;
  for (auto& p : s)
    if (area(p) > min_area) out.push_back(std::move(p));
  return out;
}

}  // namespace detail

inline constexpr double kSliverArea = 1e-18;

inline PolygonSet set_union(const PolygonSet& a, const PolygonSet& b) {
  detail::BMultiPolygon r;
  boost::geometry::union_(detail::to_boost(a), detail::to_boost(b), r);
  return detail::prune(detail::from_boost(r), kSliverArea);
}

inline PolygonSet set_difference(const PolygonSet& a, const PolygonSet& b) {
  detail::BMultiPolygon r;
  boost::geometry::difference(detail::to_boost(a), detail::to_boost(b), r);
  return detail::prune(detail::from_boost(r), kSliverArea);
}

inline PolygonSet set_intersection(const PolygonSet& a, const PolygonSet& b) {
  detail::BMultiPolygon r;
  boost::geometry::intersection(detail::to_boost(a), detail::to_boost(b), r);
  return detail::prune(detail::from_boost(r), kSliverArea);
}

inline PolygonSet set_symmetric_difference(const PolygonSet& a, const PolygonSet& b) {
  detail::BMultiPolygon r;
  boost::geometry::sym_difference(detail::to_boost(a), detail::to_boost(b), r);
  return detail::prune(detail::from_boost(r), kSliverArea);
}

inline bool contains(const PolygonSet& s, const Point& p) {
  return boost::geometry::within(detail::BPoint(p.x, p.y), detail::to_boost(s));
}

inline bool covers(const PolygonSet& s, const Point& p) {
  return boost::geometry::covered_by(detail::BPoint(p.x, p.y), detail::to_boost(s));
}

inline double closure_distance(const PolygonSet& a, const PolygonSet& b) {
  if (a.empty() || b.empty()) return kInf;
  return boost::geometry::distance(detail::to_boost(a), detail::to_boost(b));
}

inline bool is_simple_ring(const Ring& r) {
  if (r.size() < 3) return false;
  detail::BPolygon p;
  for (const Point& v : r) boost::geometry::append(p.outer(), detail::BPoint(v.x, v.y));
  boost::geometry::correct(p);
  return !boost::geometry::intersects(p);  // self-intersection test
}

// Distance from a point to the closest segment of a ring.
inline double distance_to_ring(const Point& p, const Ring& r) {
  double best = kInf;
  size_t n = r.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& a = r[i];
    const Point& b = r[(i + 1) % n];
    double vx = b.x - a.x, vy = b.y - a.y;
    double wx = p.x - a.x, wy = p.y - a.y;
    double vv = vx * vx + vy * vy;
    double t = vv > 0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
    best = std::min(best, std::hypot(wx - t * vx, wy - t * vy));
  }
  return best;
}

inline double distance_to_boundary(const Point& p, const PolygonSet& s) {
  double best = kInf;
  for (const auto& poly : s) {
    best = std::min(best, distance_to_ring(p, poly.outer));
    for (const Ring& h : poly.holes) best = std::min(best, distance_to_ring(p, h));
  }
  return best;
}

inline Point centroid(const PolygonSet& s) {
  detail::BPoint c;
  boost::geometry::centroid(detail::to_boost(s), c);
  return {boost::geometry::get<0>(c), boost::geometry::get<1>(c)};
}

inline void bounding_box(const PolygonSet& s, Point& lo, Point& hi) {
  lo = {kInf, kInf};
  hi = {-kInf, -kInf};
  for (const auto& p : s)
    for (const Point& v : p.outer) {
      lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y);
    }
}

inline double diameter(const PolygonSet& s) {
  Point lo, hi;
  bounding_box(s, lo, hi);
  return std::hypot(hi.x - lo.x, hi.y - lo.y);
}

// Constructors for the shapes the scenarios use.

inline Ring make_rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

inline Ring make_circle(double cx, double cy, double r, int segments) {
  Ring out;
  out.reserve(static_cast<size_t>(segments));
  for (int i = 0; i < segments; ++i) {
    double t = 2.0 * 3.14159265358979323846 * static_cast<double>(i) / segments;
    out.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
  }
  return out;
}

inline PolygonSet make_set(Ring outer) {
  PolygonWithHoles p;
  p.outer = std::move(outer);
  if (signed_area(p.outer) < 0) std::reverse(p.outer.begin(), p.outer.end());
  return {std::move(p)};
}

}  // namespace defeature::geom
