#pragma once

// Orientation and in-circle tests for the triangulator. Fast double-precision
// evaluation with a forward error bound; ambiguous cases fall through to a
// multiprecision re-evaluation so the mesher never acts on a wrong sign.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "defeature/geometry/polygon.hpp"

namespace defeature::geom {

namespace detail {
using bigfloat = boost::multiprecision::cpp_bin_float_50;
}

// > 0: c left of a->b, < 0: right, 0: collinear.
inline double orient2d(const Point& a, const Point& b, const Point& c) {
  double l = (a.x - c.x) * (b.y - c.y);
  double r = (a.y - c.y) * (b.x - c.x);
  double det = l - r;
  double sum = std::abs(l) + std::abs(r);
  // 4*eps bound on the two products and the subtraction
  if (std::abs(det) > 8.8817841970012523e-16 * sum) return det;
  detail::bigfloat ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  detail::bigfloat d = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
  if (d > 0) return 1.0;
  if (d < 0) return -1.0;
  return 0.0;
}

// > 0: d strictly inside the circumcircle of ccw triangle (a,b,c).
inline double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  double adx = a.x - d.x, ady = a.y - d.y;
  double bdx = b.x - d.x, bdy = b.y - d.y;
  double cdx = c.x - d.x, cdy = c.y - d.y;
  double ad2 = adx * adx + ady * ady;
  double bd2 = bdx * bdx + bdy * bdy;
  double cd2 = cdx * cdx + cdy * cdy;
  double det = ad2 * (bdx * cdy - cdx * bdy) - bd2 * (adx * cdy - cdx * ady) +
               cd2 * (adx * bdy - bdx * ady);
  double perm = ad2 * (std::abs(bdx * cdy) + std::abs(cdx * bdy)) +
                bd2 * (std::abs(adx * cdy) + std::abs(cdx * ady)) +
                cd2 * (std::abs(adx * bdy) + std::abs(bdx * ady));
  if (std::abs(det) > 1.2e-14 * perm) return det;
  using detail::bigfloat;
  bigfloat Adx(adx), Ady(ady), Bdx(bdx), Bdy(bdy), Cdx(cdx), Cdy(cdy);
  bigfloat Ad2 = Adx * Adx + Ady * Ady;
  bigfloat Bd2 = Bdx * Bdx + Bdy * Bdy;
  bigfloat Cd2 = Cdx * Cdx + Cdy * Cdy;
  bigfloat D = Ad2 * (Bdx * Cdy - Cdx * Bdy) - Bd2 * (Adx * Cdy - Cdx * Ady) +
               Cd2 * (Adx * Bdy - Bdx * Ady);
  if (D > 0) return 1.0;
  if (D < 0) return -1.0;
  return 0.0;
}

}  // namespace defeature::geom
