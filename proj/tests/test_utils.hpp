#ifndef DUCTFLOW_TEST_UTILS_HPP
#define DUCTFLOW_TEST_UTILS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>

#include "ductflow/assembly.hpp"
#include "ductflow/mesh.hpp"

namespace dftest {

using ductflow::DofMap;
using ductflow::Index;
using ductflow::Mesh;
using ductflow::Vec3;

// ---------------------------------------------------------------------------
// Independent oracles (kept free of the library's assembly path).
// ---------------------------------------------------------------------------

inline double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// Exact integral of a product of barycentric powers over a d-simplex:
//   int_T prod_i lambda_i^{a_i} = d! * prod_i a_i! / (sum a_i + d)! * |T|
inline double exact_bary_integral(int dim, double measure,
                                  const std::array<int, 4>& powers) {
  int total = 0;
  double num = factorial(dim);
  for (int i = 0; i <= dim; ++i) {
    num *= factorial(powers[i]);
    total += powers[i];
  }
  return num / factorial(total + dim) * measure;
}

// Dense Monte-Carlo-free quadrature oracle: integrates f over the mesh with
// a high-order rule built from repeated midpoint refinement of each cell
// (recursion depth 4 is plenty for the smooth integrands used in tests).
inline double integrate_over_mesh(const Mesh& mesh,
                                  const std::function<double(const Vec3&)>& f,
                                  int depth = 4) {
  std::function<double(std::array<Vec3, 3>, int)> tri_int =
      [&](std::array<Vec3, 3> t, int d) -> double {
    if (d == 0) {
      Vec3 c{(t[0][0] + t[1][0] + t[2][0]) / 3.0,
             (t[0][1] + t[1][1] + t[2][1]) / 3.0,
             (t[0][2] + t[1][2] + t[2][2]) / 3.0};
      double area = 0.5 * std::abs((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) -
                                   (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]));
      return area * f(c);
    }
    auto mid = [](const Vec3& a, const Vec3& b) {
      return Vec3{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
    };
    Vec3 m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m02 = mid(t[0], t[2]);
    return tri_int({t[0], m01, m02}, d - 1) + tri_int({m01, t[1], m12}, d - 1) +
           tri_int({m02, m12, t[2]}, d - 1) + tri_int({m01, m12, m02}, d - 1);
  };
  double sum = 0.0;
  for (Index c = 0; c < static_cast<Index>(mesh.n_cells()); ++c) {
    std::array<Vec3, 3> t{mesh.vertices[mesh.cells[c][0]],
                          mesh.vertices[mesh.cells[c][1]],
                          mesh.vertices[mesh.cells[c][2]]};
    sum += tri_int(t, depth);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Small meshes
// ---------------------------------------------------------------------------

// Unit right triangle (0,0), (1,0), (0,1); all edges tagged 1.
inline Mesh unit_triangle() {
  Mesh m;
  m.dim = 2;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.cells = {{0, 1, 2, -1}};
  m.boundary_facets = {{{0, 1, -1}, 1, -1},
                       {{1, 2, -1}, 1, -1},
                       {{2, 0, -1}, 1, -1}};
  m.tag_names = {{1, "boundary"}};
  m.finalize();
  return m;
}

// One tetrahedron below the z=0 plane; the top facet (tag 2) is the
// triangle (0,0,0), (1,0,0), (0,1,0) with outward normal (0,0,1).
inline Mesh tet_below_plane() {
  Mesh m;
  m.dim = 3;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, -1}};
  m.cells = {{0, 1, 2, 3}};
  m.boundary_facets = {{{0, 1, 2}, 2, -1},
                       {{0, 1, 3}, 1, -1},
                       {{1, 2, 3}, 1, -1},
                       {{0, 2, 3}, 1, -1}};
  m.tag_names = {{1, "side"}, {2, "top"}};
  m.finalize();
  return m;
}

// Reference tetrahedron with all facets tagged 1.
inline Mesh unit_tet() {
  Mesh m;
  m.dim = 3;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.cells = {{0, 1, 2, 3}};
  m.boundary_facets = {{{0, 1, 2}, 1, -1},
                       {{0, 1, 3}, 1, -1},
                       {{1, 2, 3}, 1, -1},
                       {{0, 2, 3}, 1, -1}};
  m.tag_names = {{1, "boundary"}};
  m.finalize();
  return m;
}

// Nodal interpolant of an analytic velocity field.
inline Eigen::VectorXd interpolate_velocity(
    const Mesh& mesh, const DofMap& dofs,
    const std::function<Vec3(const Vec3&)>& f) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dofs.n_u());
  for (Index v = 0; v < static_cast<Index>(mesh.n_vertices()); ++v) {
    Vec3 val = f(mesh.vertices[v]);
    for (int c = 0; c < mesh.dim; ++c) u[dofs.u_dof(v, c)] = val[c];
  }
  return u;
}

inline Eigen::VectorXd interpolate_scalar(
    const Mesh& mesh, const DofMap& dofs,
    const std::function<double(const Vec3&)>& f) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dofs.n_p());
  for (Index v = 0; v < static_cast<Index>(mesh.n_vertices()); ++v)
    p[dofs.p_dof(v)] = f(mesh.vertices[v]);
  return p;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

}  // namespace dftest

#endif
