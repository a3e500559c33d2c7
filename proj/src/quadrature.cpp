/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ductflow/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ductflow {

QuadRule cell_rule(int dim) {
  QuadRule r;
  if (dim == 2) {
    r.npts = 3;
    r.bary[0] = {0.5, 0.5, 0.0, 0.0};
    r.bary[1] = {0.0, 0.5, 0.5, 0.0};
    r.bary[2] = {0.5, 0.0, 0.5, 0.0};
    r.weight[0] = r.weight[1] = r.weight[2] = 1.0 / 3.0;
  } else if (dim == 3) {
    const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
    const double b = (5.0 - std::sqrt(5.0)) / 20.0;
    r.npts = 4;
    for (int i = 0; i < 4; ++i) {
      r.bary[i] = {b, b, b, b};
      r.bary[i][i] = a;
      r.weight[i] = 0.25;
    }
  } else {
    throw std::invalid_argument("cell_rule: dim must be 2 or 3");
  }
  return r;
}

QuadRule facet_rule(int dim) {
  QuadRule r;
  if (dim == 2) {
    // 2-point Gauss on the edge, degree 3.
    const double g = 0.5 / std::sqrt(3.0);
    r.npts = 2;
    r.bary[0] = {0.5 + g, 0.5 - g, 0.0, 0.0};
    r.bary[1] = {0.5 - g, 0.5 + g, 0.0, 0.0};
    r.weight[0] = r.weight[1] = 0.5;
  } else if (dim == 3) {
    // Dunavant degree-4 rule on the triangle, 6 points, positive weights.
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    r.npts = 6;
    int k = 0;
    for (int i = 0; i < 3; ++i, ++k) {
      r.bary[k] = {a1, a1, a1, 0.0};
      r.bary[k][i] = 1.0 - 2.0 * a1;
      r.weight[k] = w1;
    }
    for (int i = 0; i < 3; ++i, ++k) {
      r.bary[k] = {a2, a2, a2, 0.0};
      r.bary[k][i] = 1.0 - 2.0 * a2;
      r.weight[k] = w2;
    }
  } else {
    throw std::invalid_argument("facet_rule: dim must be 2 or 3");
  }
  return r;
}

}  // namespace ductflow
