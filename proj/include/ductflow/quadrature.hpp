/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef DUCTFLOW_QUADRATURE_HPP
#define DUCTFLOW_QUADRATURE_HPP

#include <array>

namespace ductflow {

/// Quadrature rule on a reference simplex, in barycentric coordinates.
/// Weights sum to 1; multiply by the simplex measure.
struct QuadRule {
  int npts = 0;
  std::array<std::array<double, 4>, 6> bary{};
  std::array<double, 6> weight{};
};

/// Degree-2 exact rule on cells (3-point mid-edge on triangles,
/// 4-point on tetrahedra). All weights positive.
QuadRule cell_rule(int dim);

/// Facet rule, degree >= 3 exact with positive weights (2-point Gauss on
/// edges, 6-point degree-4 on triangles). Used for all boundary terms so
/// that the discrete energy identities close exactly.
QuadRule facet_rule(int dim);

}  // namespace ductflow

#endif  // DUCTFLOW_QUADRATURE_HPP
