#pragma once

// Gauss rules on [0,1] and symmetric rules on the reference triangle
// {(r,s) : r,s >= 0, r+s <= 1}. Triangle weights sum to 1/2 (the reference
// area), segment weights sum to 1.

#include <array>
#include <vector>

#include "defeature/common.hpp"

namespace defeature::quad {

struct Point1 {
  double t;
  double w;
};

struct Point2 {
  double r, s;
  double w;
};

// Gauss-Legendre on [0,1], exact for polynomials of degree 2n-1.
inline std::vector<Point1> segment_rule(int order) {
  auto scaled = [](std::initializer_list<Point1> pts) {
    std::vector<Point1> out;
    for (Point1 p : pts) out.push_back({0.5 * (1.0 + p.t), 0.5 * p.w});
    return out;
  };
  if (order <= 1) return scaled({{0.0, 2.0}});
  if (order <= 3)
    return scaled({{-0.5773502691896257, 1.0}, {0.5773502691896257, 1.0}});
  if (order <= 5)
    return scaled({{-0.7745966692414834, 0.5555555555555556},
                   {0.0, 0.8888888888888889},
                   {0.7745966692414834, 0.5555555555555556}});
  if (order <= 7)
    return scaled({{-0.8611363115940526, 0.3478548451374538},
                   {-0.3399810435848563, 0.6521451548625461},
                   {0.3399810435848563, 0.6521451548625461},
                   {0.8611363115940526, 0.3478548451374538}});
  if (order <= 9)
    return scaled({{-0.9061798459386640, 0.2369268850561891},
                   {-0.5384693101056831, 0.4786286704993665},
                   {0.0, 0.5688888888888889},
                   {0.5384693101056831, 0.4786286704993665},
                   {0.9061798459386640, 0.2369268850561891}});
  if (order <= 11)
    return scaled({{-0.9324695142031521, 0.1713244923791704},
                   {-0.6612093864662645, 0.3607615730481386},
                   {-0.2386191860831969, 0.4679139345726910},
                   {0.2386191860831969, 0.4679139345726910},
                   {0.6612093864662645, 0.3607615730481386},
                   {0.9324695142031521, 0.1713244923791704}});
  throw UnsupportedOrder("segment quadrature order " + std::to_string(order));
}

// Symmetric triangle rules (Dunavant); weights include the factor 1/2.
inline std::vector<Point2> triangle_rule(int order) {
  auto w = [](std::initializer_list<Point2> pts) {
    std::vector<Point2> out;
    for (Point2 p : pts) out.push_back({p.r, p.s, 0.5 * p.w});
    return out;
  };
  if (order <= 1) return w({{1.0 / 3.0, 1.0 / 3.0, 1.0}});
  if (order <= 2)
    return w({{1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
              {2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
              {1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0}});
  if (order <= 4)
    return w({{0.445948490915965, 0.445948490915965, 0.223381589678011},
              {0.108103018168070, 0.445948490915965, 0.223381589678011},
              {0.445948490915965, 0.108103018168070, 0.223381589678011},
              {0.091576213509771, 0.091576213509771, 0.109951743655322},
              {0.816847572980459, 0.091576213509771, 0.109951743655322},
              {0.091576213509771, 0.816847572980459, 0.109951743655322}});
  if (order <= 5)
    return w({{1.0 / 3.0, 1.0 / 3.0, 0.225},
              {0.470142064105115, 0.470142064105115, 0.132394152788506},
              {0.059715871789770, 0.470142064105115, 0.132394152788506},
              {0.470142064105115, 0.059715871789770, 0.132394152788506},
              {0.101286507323456, 0.101286507323456, 0.125939180544827},
              {0.797426985353087, 0.101286507323456, 0.125939180544827},
              {0.101286507323456, 0.797426985353087, 0.125939180544827}});
  if (order <= 8) {
    // 16-point rule, degree 8
    std::initializer_list<Point2> pts = {
        {1.0 / 3.0, 1.0 / 3.0, 0.1443156076777871},
        {0.4592925882927231, 0.4592925882927231, 0.0950916342672846},
        {0.0814148234145538, 0.4592925882927231, 0.0950916342672846},
        {0.4592925882927231, 0.0814148234145538, 0.0950916342672846},
        {0.1705693077517602, 0.1705693077517602, 0.1032173705347182},
        {0.6588613844964797, 0.1705693077517602, 0.1032173705347182},
        {0.1705693077517602, 0.6588613844964797, 0.1032173705347182},
        {0.0505472283170310, 0.0505472283170310, 0.0324584976231980},
        {0.8989055433659380, 0.0505472283170310, 0.0324584976231980},
        {0.0505472283170310, 0.8989055433659380, 0.0324584976231980},
        {0.2631128296346381, 0.7284923929554043, 0.0272303141744349},
        {0.7284923929554043, 0.0083947774099576, 0.0272303141744349},
        {0.0083947774099576, 0.2631128296346381, 0.0272303141744349},
        {0.7284923929554043, 0.2631128296346381, 0.0272303141744349},
        {0.2631128296346381, 0.0083947774099576, 0.0272303141744349},
        {0.0083947774099576, 0.7284923929554043, 0.0272303141744349}};
    return w(pts);
  }
  throw UnsupportedOrder("triangle quadrature order " + std::to_string(order));
}

}  // namespace defeature::quad
