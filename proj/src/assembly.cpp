/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ductflow/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "ductflow/linalg.hpp"
#include "ductflow/quadrature.hpp"

namespace ductflow {

namespace {

double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

SpMat from_triplets(Index rows, Index cols, std::vector<Triplet>& trips) {
  SpMat A(rows, cols);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

}  // namespace

bool SparseOperator::is_symmetric() const {
  if (matrix.rows() != matrix.cols()) return false;
  SpMat diff = SpMat(matrix - SpMat(matrix.transpose()));
  double mx = 0.0, scale = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it)
      mx = std::max(mx, std::abs(it.value()));
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (SpMat::InnerIterator it(matrix, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  return mx <= 1e-12 * std::max(scale, 1e-300);
}

bool SparseOperator::all_finite() const {
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (SpMat::InnerIterator it(matrix, k); it; ++it)
      if (!std::isfinite(it.value())) return false;
  if (rhs)
    for (Eigen::Index i = 0; i < rhs->size(); ++i)
      if (!std::isfinite((*rhs)[i])) return false;
  return true;
}

CellBasis cell_basis(const Mesh& mesh, Index c) {
  CellBasis b;
  const auto& cell = mesh.cells[c];
  const Vec3& p0 = mesh.vertices[cell[0]];
  if (mesh.dim == 2) {
    const Vec3& p1 = mesh.vertices[cell[1]];
    const Vec3& p2 = mesh.vertices[cell[2]];
    double j11 = p1[0] - p0[0], j21 = p1[1] - p0[1];
    double j12 = p2[0] - p0[0], j22 = p2[1] - p0[1];
    double det = j11 * j22 - j12 * j21;
    b.measure = 0.5 * std::abs(det);
    // rows of J^{-T}
    b.grad[1] = {j22 / det, -j12 / det, 0.0};
    b.grad[2] = {-j21 / det, j11 / det, 0.0};
    b.grad[0] = {-b.grad[1][0] - b.grad[2][0], -b.grad[1][1] - b.grad[2][1], 0.0};
  } else {
    Eigen::Matrix3d J;
    for (int i = 0; i < 3; ++i) {
      const Vec3& pi = mesh.vertices[cell[i + 1]];
      for (int k = 0; k < 3; ++k) J(k, i) = pi[k] - p0[k];
    }
    double det = J.determinant();
    b.measure = std::abs(det) / 6.0;
    Eigen::Matrix3d Jit = J.inverse().transpose();
    for (int i = 0; i < 3; ++i)
      b.grad[i + 1] = {Jit(0, i), Jit(1, i), Jit(2, i)};
    b.grad[0] = {-b.grad[1][0] - b.grad[2][0] - b.grad[3][0],
                 -b.grad[1][1] - b.grad[2][1] - b.grad[3][1],
                 -b.grad[1][2] - b.grad[2][2] - b.grad[3][2]};
  }
  return b;
}

FacetBasis facet_basis(const Mesh& mesh, Index f) {
  FacetBasis b;
  FacetGeometry g = mesh.facet_geometry(f);
  b.measure = g.measure;
  b.normal = g.normal;
  const auto& bf = mesh.boundary_facets[f];
  if (mesh.dim == 2) {
    // P1 gradient along an edge of length L has magnitude 1/L.
    const Vec3& p0 = mesh.vertices[bf.v[0]];
    const Vec3& p1 = mesh.vertices[bf.v[1]];
    Vec3 t{(p1[0] - p0[0]) / (g.measure * g.measure),
           (p1[1] - p0[1]) / (g.measure * g.measure), 0.0};
    b.tgrad[0] = {-t[0], -t[1], 0.0};
    b.tgrad[1] = t;
  } else {
    // In-plane 2D coordinates, standard triangle gradients, mapped back.
    const Vec3& p0 = mesh.vertices[bf.v[0]];
    const Vec3& p1 = mesh.vertices[bf.v[1]];
    const Vec3& p2 = mesh.vertices[bf.v[2]];
    const Vec3& t1 = g.tangents[0];
    const Vec3& t2 = g.tangents[1];
    Vec3 e1{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
    Vec3 e2{p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
    double j11 = dot3(e1, t1), j21 = dot3(e1, t2);
    double j12 = dot3(e2, t1), j22 = dot3(e2, t2);
    double det = j11 * j22 - j12 * j21;
    double g1x = j22 / det, g1y = -j12 / det;
    double g2x = -j21 / det, g2y = j11 / det;
    auto to3d = [&](double gx, double gy) {
      return Vec3{gx * t1[0] + gy * t2[0], gx * t1[1] + gy * t2[1],
                  gx * t1[2] + gy * t2[2]};
    };
    b.tgrad[1] = to3d(g1x, g1y);
    b.tgrad[2] = to3d(g2x, g2y);
    b.tgrad[0] = {-b.tgrad[1][0] - b.tgrad[2][0], -b.tgrad[1][1] - b.tgrad[2][1],
                  -b.tgrad[1][2] - b.tgrad[2][2]};
  }
  return b;
}

SparseOperator assemble_mass(const Mesh& mesh, const DofMap& dofs, Space space) {
  const int d = mesh.dim;
  const int nvc = d + 1;
  const int ncomp = (space == Space::velocity) ? d : 1;
  std::vector<Triplet> trips;
  trips.reserve(mesh.n_cells() * nvc * nvc * ncomp);
  for (Index c = 0; c < static_cast<Index>(mesh.n_cells()); ++c) {
    double meas = mesh.cell_measure(c);
    double base = meas / ((d + 1.0) * (d + 2.0));
    for (int i = 0; i < nvc; ++i)
      for (int j = 0; j < nvc; ++j) {
        double m = base * (i == j ? 2.0 : 1.0);
        Index vi = mesh.cells[c][i], vj = mesh.cells[c][j];
        if (space == Space::velocity) {
          for (int comp = 0; comp < d; ++comp)
            trips.emplace_back(dofs.u_dof(vi, comp), dofs.u_dof(vj, comp), m);
        } else {
          trips.emplace_back(dofs.p_dof(vi), dofs.p_dof(vj), m);
        }
      }
  }
  Index n = (space == Space::velocity) ? dofs.n_u() : dofs.n_p();
  return {from_triplets(n, n, trips), std::nullopt};
}

SparseOperator assemble_stiffness(const Mesh& mesh, const DofMap& dofs,
                                  double coeff, Space space) {
  if (!(coeff >= 0))
    throw std::invalid_argument("assemble_stiffness: coeff must be >= 0");
  const int d = mesh.dim;
  const int nvc = d + 1;
  std::vector<Triplet> trips;
  for (Index c = 0; c < static_cast<Index>(mesh.n_cells()); ++c) {
    CellBasis b = cell_basis(mesh, c);
    for (int i = 0; i < nvc; ++i)
      for (int j = 0; j < nvc; ++j) {
        double k = coeff * b.measure * dot3(b.grad[i], b.grad[j]);
        Index vi = mesh.cells[c][i], vj = mesh.cells[c][j];
        if (space == Space::velocity) {
          for (int comp = 0; comp < d; ++comp)
            trips.emplace_back(dofs.u_dof(vi, comp), dofs.u_dof(vj, comp), k);
        } else {
          trips.emplace_back(dofs.p_dof(vi), dofs.p_dof(vj), k);
        }
      }
  }
  Index n = (space == Space::velocity) ? dofs.n_u() : dofs.n_p();
  return {from_triplets(n, n, trips), std::nullopt};
}

SparseOperator assemble_convection(const Mesh& mesh, const DofMap& dofs,
                                   const Eigen::VectorXd& u_prev, double rho) {
  const int d = mesh.dim;
  const int nvc = d + 1;
  const QuadRule qr = cell_rule(d);
  std::vector<Triplet> trips;
  for (Index c = 0; c < static_cast<Index>(mesh.n_cells()); ++c) {
    CellBasis b = cell_basis(mesh, c);
    std::array<Vec3, 4> uv{};
    for (int i = 0; i < nvc; ++i)
      for (int k = 0; k < d; ++k)
        uv[i][k] = u_prev[dofs.u_dof(mesh.cells[c][i], k)];
    double div_prev = 0.0;
    for (int i = 0; i < nvc; ++i) div_prev += dot3(uv[i], b.grad[i]);

    std::array<std::array<double, 4>, 4> local{};
    for (int q = 0; q < qr.npts; ++q) {
      Vec3 uq{0, 0, 0};
      for (int i = 0; i < nvc; ++i)
        for (int k = 0; k < 3; ++k) uq[k] += qr.bary[q][i] * uv[i][k];
      double wq = qr.weight[q] * b.measure;
      for (int i = 0; i < nvc; ++i)
        for (int j = 0; j < nvc; ++j)
          local[i][j] += wq * qr.bary[q][i] *
                         (rho * dot3(uq, b.grad[j]) +
                          0.5 * rho * div_prev * qr.bary[q][j]);
    }
    for (int i = 0; i < nvc; ++i)
      for (int j = 0; j < nvc; ++j) {
        Index vi = mesh.cells[c][i], vj = mesh.cells[c][j];
        for (int comp = 0; comp < d; ++comp)
          trips.emplace_back(dofs.u_dof(vi, comp), dofs.u_dof(vj, comp),
                             local[i][j]);
      }
  }
  return {from_triplets(dofs.n_u(), dofs.n_u(), trips), std::nullopt};
}

SparseOperator assemble_divergence(const Mesh& mesh, const DofMap& dofs) {
  const int d = mesh.dim;
  const int nvc = d + 1;
  std::vector<Triplet> trips;
  for (Index c = 0; c < static_cast<Index>(mesh.n_cells()); ++c) {
    CellBasis b = cell_basis(mesh, c);
    double wq = b.measure / (d + 1.0);  // int_T lambda_q
    for (int q = 0; q < nvc; ++q)
      for (int j = 0; j < nvc; ++j) {
        Index vq = mesh.cells[c][q], vj = mesh.cells[c][j];
        for (int comp = 0; comp < d; ++comp)
          trips.emplace_back(dofs.p_dof(vq), dofs.u_dof(vj, comp),
                             wq * b.grad[j][comp]);
      }
  }
  return {from_triplets(dofs.n_p(), dofs.n_u(), trips), std::nullopt};
}

SparseOperator assemble_pressure_stab(const Mesh& mesh, const DofMap& dofs,
                                      double gamma_p, double mu) {
  if (!(gamma_p >= 0))
    throw std::invalid_argument("assemble_pressure_stab: gamma_p must be >= 0");
  const int nvc = mesh.dim + 1;
  std::vector<Triplet> trips;
  if (gamma_p > 0) {
    for (Index c = 0; c < static_cast<Index>(mesh.n_cells()); ++c) {
      CellBasis b = cell_basis(mesh, c);
      double h = mesh.cell_diameter(c);
      double delta = gamma_p * h * h / mu;
      for (int i = 0; i < nvc; ++i)
        for (int j = 0; j < nvc; ++j)
          trips.emplace_back(dofs.p_dof(mesh.cells[c][i]),
                             dofs.p_dof(mesh.cells[c][j]),
                             delta * b.measure * dot3(b.grad[i], b.grad[j]));
    }
  }
  return {from_triplets(dofs.n_p(), dofs.n_p(), trips), std::nullopt};
}

SparseOperator assemble_streamline_diffusion(const Mesh& mesh,
                                             const DofMap& dofs,
                                             const Eigen::VectorXd& u_prev,
                                             double gamma_sd, double tau,
                                             double rho) {
  if (!(gamma_sd >= 0))
    throw std::invalid_argument(
        "assemble_streamline_diffusion: gamma_sd must be >= 0");
  const int d = mesh.dim;
  const int nvc = d + 1;
  const QuadRule qr = cell_rule(d);
  std::vector<Triplet> trips;
  if (gamma_sd > 0) {
    for (Index c = 0; c < static_cast<Index>(mesh.n_cells()); ++c) {
      CellBasis b = cell_basis(mesh, c);
      std::array<Vec3, 4> uv{};
      Vec3 umean{0, 0, 0};
      for (int i = 0; i < nvc; ++i) {
        for (int k = 0; k < d; ++k) {
          uv[i][k] = u_prev[dofs.u_dof(mesh.cells[c][i], k)];
          umean[k] += uv[i][k] / nvc;
        }
      }
      double h = mesh.cell_diameter(c);
      double speed = std::sqrt(dot3(umean, umean));
      double inv = std::sqrt(4.0 / (tau * tau) + 4.0 * speed * speed / (h * h));
      double delta = gamma_sd / (rho * inv);

      std::array<std::array<double, 4>, 4> local{};
      for (int q = 0; q < qr.npts; ++q) {
        Vec3 uq{0, 0, 0};
        for (int i = 0; i < nvc; ++i)
          for (int k = 0; k < 3; ++k) uq[k] += qr.bary[q][i] * uv[i][k];
        double wq = qr.weight[q] * b.measure;
        std::array<double, 4> a{};
        for (int i = 0; i < nvc; ++i) a[i] = dot3(uq, b.grad[i]);
        for (int i = 0; i < nvc; ++i)
          for (int j = 0; j < nvc; ++j) local[i][j] += wq * delta * a[i] * a[j];
      }
      for (int i = 0; i < nvc; ++i)
        for (int j = 0; j < nvc; ++j) {
          Index vi = mesh.cells[c][i], vj = mesh.cells[c][j];
          for (int comp = 0; comp < d; ++comp)
            trips.emplace_back(dofs.u_dof(vi, comp), dofs.u_dof(vj, comp),
                               local[i][j]);
        }
    }
  }
  return {from_triplets(dofs.n_u(), dofs.n_u(), trips), std::nullopt};
}

namespace {

// Facet P1 mass entries: |f| (1 + delta_ij) / (d (d+1)).
double facet_mass_entry(double measure, int dim, int i, int j) {
  return measure * (i == j ? 2.0 : 1.0) / (dim * (dim + 1.0));
}

}  // namespace

SparseOperator assemble_inlet_penalty(const Mesh& mesh, const DofMap& dofs,
                                      int inlet_tag, double gamma_inlet,
                                      const Eigen::VectorXd& u_inlet_profile,
                                      double f_of_t) {
  if (!(gamma_inlet > 0))
    throw std::invalid_argument(
        "assemble_inlet_penalty: gamma_inlet must be > 0");
  if (!mesh.has_tag(inlet_tag))
    throw std::runtime_error("assemble_inlet_penalty: missing inlet tag " +
                             std::to_string(inlet_tag));
  const int d = mesh.dim;
  std::vector<Triplet> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.n_u());
  for (Index f : mesh.facets_with_tag(inlet_tag)) {
    const auto& bf = mesh.boundary_facets[f];
    double meas = mesh.facet_measure(f);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double m = gamma_inlet * facet_mass_entry(meas, d, i, j);
        for (int comp = 0; comp < d; ++comp) {
          Index row = dofs.u_dof(bf.v[i], comp);
          trips.emplace_back(row, dofs.u_dof(bf.v[j], comp), m);
          rhs[row] += f_of_t * m * u_inlet_profile[dofs.u_dof(bf.v[j], comp)];
        }
      }
  }
  return {from_triplets(dofs.n_u(), dofs.n_u(), trips), rhs};
}

BoundaryRoles BoundaryRoles::from_names(const Mesh& mesh) {
  BoundaryRoles r;
  r.inlet_tag = mesh.tag_by_name("inlet");
  r.wall_tag = mesh.tag_by_name("wall");
  for (int tag : mesh.boundary_tags())
    if (tag != r.inlet_tag && tag != r.wall_tag) r.outlet_tags.push_back(tag);
  return r;
}

double boundary_flux(const Mesh& mesh, const DofMap& dofs,
                     const Eigen::VectorXd& u, int tag) {
  if (!mesh.has_tag(tag))
    throw std::runtime_error("boundary_flux: unknown tag " +
                             std::to_string(tag));
  const int d = mesh.dim;
  double q = 0.0;
  for (Index f : mesh.facets_with_tag(tag)) {
    FacetGeometry g = mesh.facet_geometry(f);
    const auto& bf = mesh.boundary_facets[f];
    for (int i = 0; i < d; ++i) {
      double un = 0.0;
      for (int comp = 0; comp < d; ++comp)
        un += u[dofs.u_dof(bf.v[i], comp)] * g.normal[comp];
      q += g.measure / d * un;
    }
  }
  return q;
}

FieldState stokes_inlet_profile(const Mesh& mesh, const DofMap& dofs,
                                const BoundaryRoles& roles, double mu,
                                double gamma_p) {
  if (roles.inlet_tag < 0 || !mesh.has_tag(roles.inlet_tag))
    throw std::runtime_error("stokes_inlet_profile: missing inlet tag");
  if (roles.wall_tag < 0 || !mesh.has_tag(roles.wall_tag))
    throw std::runtime_error("stokes_inlet_profile: missing wall tag");
  const int d = mesh.dim;
  const Index n_u = dofs.n_u(), n_p = dofs.n_p();
  const Index n = n_u + n_p;

  SparseOperator K = assemble_stiffness(mesh, dofs, mu, Space::velocity);
  SparseOperator B = assemble_divergence(mesh, dofs);
  SparseOperator C = assemble_pressure_stab(mesh, dofs, gamma_p, mu);

  std::vector<Triplet> trips;
  auto push_block = [&trips](const SpMat& A, Index r0, Index c0, double sgn) {
    for (int k = 0; k < A.outerSize(); ++k)
      for (SpMat::InnerIterator it(A, k); it; ++it)
        trips.emplace_back(r0 + it.row(), c0 + it.col(), sgn * it.value());
  };
  push_block(K.matrix, 0, 0, 1.0);
  SpMat Bt = SpMat(B.matrix.transpose());
  push_block(Bt, 0, n_u, -1.0);
  push_block(B.matrix, n_u, 0, 1.0);
  push_block(C.matrix, n_u, n_u, -1.0);

  // Unit inward traction at the inlet: rhs_i = -int_inlet n . v.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Index f : mesh.facets_with_tag(roles.inlet_tag)) {
    FacetGeometry g = mesh.facet_geometry(f);
    const auto& bf = mesh.boundary_facets[f];
    for (int i = 0; i < d; ++i)
      for (int comp = 0; comp < d; ++comp)
        rhs[dofs.u_dof(bf.v[i], comp)] -= g.measure / d * g.normal[comp];
  }

  std::vector<char> marked(n, 0);
  for (Index v : mesh.vertices_with_tag(roles.wall_tag))
    for (int comp = 0; comp < d; ++comp) marked[dofs.u_dof(v, comp)] = 1;
  eliminate_marked(trips, marked);

  SpMatCol A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd x;
  try {
    x = solve_direct(A, rhs);
  } catch (const SolverError& e) {
    throw std::runtime_error(std::string("stokes_inlet_profile: ") + e.what() +
                             " (check that at least one outlet allows outflow)");
  }

  FieldState s;
  s.u = x.head(n_u);
  s.p = x.tail(n_p);
  double inflow = -boundary_flux(mesh, dofs, s.u, roles.inlet_tag);
  if (!(std::abs(inflow) > 1e-12))
    throw std::runtime_error(
        "stokes_inlet_profile: zero net inlet flux; system is not solvable "
        "with the given boundary roles");
  s.u /= inflow;
  s.p /= inflow;
  return s;
}

}  // namespace ductflow
