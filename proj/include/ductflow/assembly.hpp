/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef DUCTFLOW_ASSEMBLY_HPP
#define DUCTFLOW_ASSEMBLY_HPP

#include <Eigen/Sparse>
#include <functional>
#include <optional>

#include "ductflow/mesh.hpp"

namespace ductflow {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Space { velocity, pressure };

/// P1 nodal layout: one scalar pressure dof per vertex, `dim` interleaved
/// velocity components per vertex.
struct DofMap {
  int dim = 2;
  Index n_vertices = 0;

  Index n_u() const { return dim * n_vertices; }
  Index n_p() const { return n_vertices; }
  Index u_dof(Index vertex, int comp) const { return dim * vertex + comp; }
  Index p_dof(Index vertex) const { return vertex; }

  static DofMap from(const Mesh& mesh) {
    return DofMap{mesh.dim, static_cast<Index>(mesh.n_vertices())};
  }
};

/// Velocity/pressure coefficient vectors at one time level.
struct FieldState {
  Eigen::VectorXd u;  // cm/s, interleaved components
  Eigen::VectorXd p;  // dyn/cm^2
  double t = 0.0;     // s

  static FieldState zero(const DofMap& dofs) {
    FieldState s;
    s.u = Eigen::VectorXd::Zero(dofs.n_u());
    s.p = Eigen::VectorXd::Zero(dofs.n_p());
    return s;
  }
};

/// Sparse matrix in compressed row layout with an optional right-hand side.
struct SparseOperator {
  SpMat matrix;
  std::optional<Eigen::VectorXd> rhs;

  /// max |A - A^T| < 1e-12 max |A|.
  bool is_symmetric() const;
  /// True when no stored entry is NaN/Inf.
  bool all_finite() const;
};

/// Per-cell P1 basis data: measure and the constant gradients of the
/// barycentric functions.
struct CellBasis {
  double measure = 0.0;
  std::array<Vec3, 4> grad{};
};
CellBasis cell_basis(const Mesh& mesh, Index c);

/// Per-facet P1 basis data: measure, outward normal and the in-facet
/// (tangential) gradients of the facet barycentric functions.
struct FacetBasis {
  double measure = 0.0;
  Vec3 normal{};
  std::array<Vec3, 3> tgrad{};
};
FacetBasis facet_basis(const Mesh& mesh, Index f);

/// Consistent P1 mass matrix (unweighted).
SparseOperator assemble_mass(const Mesh& mesh, const DofMap& dofs, Space space);

/// P1 stiffness (Laplacian) weighted by `coeff`; block diagonal over
/// components for the velocity space.
SparseOperator assemble_stiffness(const Mesh& mesh, const DofMap& dofs,
                                  double coeff, Space space);

/// Semi-implicit convection rho * (u_prev . grad u) . v plus the Temam
/// correction (rho/2) (div u_prev) u . v, with degree-2 quadrature.
SparseOperator assemble_convection(const Mesh& mesh, const DofMap& dofs,
                                   const Eigen::VectorXd& u_prev, double rho);

/// Divergence coupling B with (B u)_q = int q div(u); n_p x n_u.
SparseOperator assemble_divergence(const Mesh& mesh, const DofMap& dofs);

/// Brezzi-Pitkaranta pressure stabilization:
///   sum_cells (gamma_p h_cell^2 / mu) int_cell grad p . grad q.
SparseOperator assemble_pressure_stab(const Mesh& mesh, const DofMap& dofs,
                                      double gamma_p, double mu);

/// Streamline diffusion sum_cells delta_cell int (u_prev.grad u).(u_prev.grad v)
/// with delta_cell = gamma_sd / (rho * sqrt((2/tau)^2 + (2|u|_cell/h_cell)^2)).
SparseOperator assemble_streamline_diffusion(const Mesh& mesh,
                                             const DofMap& dofs,
                                             const Eigen::VectorXd& u_prev,
                                             double gamma_sd, double tau,
                                             double rho);

/// Inlet penalization: matrix gamma int_inlet u.v and right-hand side
/// gamma f(t) int_inlet u_profile.v.
SparseOperator assemble_inlet_penalty(const Mesh& mesh, const DofMap& dofs,
                                      int inlet_tag, double gamma_inlet,
                                      const Eigen::VectorXd& u_inlet_profile,
                                      double f_of_t);

/// Boundary roles used by the Stokes profile solve.
struct BoundaryRoles {
  int inlet_tag = -1;
  int wall_tag = -1;
  std::vector<int> outlet_tags;

  /// Derive from the mesh tag names ("inlet", "wall", rest = outlets).
  static BoundaryRoles from_names(const Mesh& mesh);
};

/// Steady Stokes solve (traction-driven at the inlet, no-slip walls, free
/// traction at outlets), normalized so the net inlet inflow is 1 (cm^3/s in
/// 3D, cm^2/s in 2D). Used as the inlet velocity profile.
FieldState stokes_inlet_profile(const Mesh& mesh, const DofMap& dofs,
                                const BoundaryRoles& roles, double mu = 0.035,
                                double gamma_p = 1e-2);

/// int_{facets with tag} u.n (signed, outward positive).
double boundary_flux(const Mesh& mesh, const DofMap& dofs,
                     const Eigen::VectorXd& u, int tag);

}  // namespace ductflow

#endif  // DUCTFLOW_ASSEMBLY_HPP
