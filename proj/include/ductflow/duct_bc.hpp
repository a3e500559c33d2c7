/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef DUCTFLOW_DUCT_BC_HPP
#define DUCTFLOW_DUCT_BC_HPP

#include "ductflow/assembly.hpp"
#include "ductflow/mesh.hpp"

namespace ductflow {

// Boundary terms of the duct outlet model: a straight virtual duct of
// length ell attached at a planar outlet contributes a surface inertial
// term ell rho d(u.n)/dt (v.n) and a tangential-viscous term
// ell mu grad_t(u.n) . grad_t(v.n), plus backflow stabilization and a
// tangential velocity penalty. Free-traction outlets contribute nothing
// to the momentum operator (the plain do-nothing outlet).

enum class OutletKind { duct, free_traction };

/// One outlet: its boundary tag, kind, virtual duct length, facet set and
/// the shared unit outward normal. Facets must be planar per outlet.
struct OutletSpec {
  int tag = 0;
  OutletKind kind = OutletKind::free_traction;
  double length_cm = 0.0;
  std::vector<Index> facets;
  Vec3 normal{0, 0, 0};
};

/// Penalty coefficients for the outlet boundary terms.
struct BoundaryCoefficients {
  double gamma_tan = 1e8;    // g / (cm^2 s)
  double gamma_press = 0.0;  // optional outlet pressure stabilization
  bool backflow = true;
};

/// Builds an OutletSpec for `tag`, validating planarity: every facet normal
/// must agree with the shared normal within 1e-8. Throws on violation,
/// unknown tags and non-positive duct lengths.
OutletSpec make_outlet(const Mesh& mesh, int tag, OutletKind kind,
                       double length_cm = 0.0);

/// max(-x, 0).
double negative_part(double x);

/// sum_m ell_m rho int_{Gamma_m} (u.n)(v.n); duct outlets only.
SparseOperator assemble_duct_inertia(const Mesh& mesh, const DofMap& dofs,
                                     const std::vector<OutletSpec>& outlets,
                                     double rho);

/// sum_m ell_m mu int_{Gamma_m} grad_t(u.n) . grad_t(v.n); duct outlets only.
SparseOperator assemble_duct_viscous(const Mesh& mesh, const DofMap& dofs,
                                     const std::vector<OutletSpec>& outlets,
                                     double mu);

/// sum_m int_{Gamma_m} (rho/2) |u_prev.n|_- (u.v); duct outlets only,
/// positive semidefinite by construction.
SparseOperator assemble_backflow(const Mesh& mesh, const DofMap& dofs,
                                 const std::vector<OutletSpec>& outlets,
                                 const Eigen::VectorXd& u_prev, double rho);

/// sum_m gamma_tan int_{Gamma_m} (u - (u.n)n) . (v - (v.n)n); duct outlets
/// only. Weakly enforces flow perpendicular to the outlet.
SparseOperator assemble_tangential_penalty(const Mesh& mesh, const DofMap& dofs,
                                           const std::vector<OutletSpec>& outlets,
                                           double gamma_tan);

/// Pressure surface mass for the projection step: (1/ell_m) on duct outlets
/// and `free_coeff` on free-traction outlets (weak p = 0 ground).
SparseOperator assemble_pressure_penalty(const Mesh& mesh, const DofMap& dofs,
                                         const std::vector<OutletSpec>& outlets,
                                         double free_coeff = 1e8);

/// Optional projection-step stabilization
/// gamma_press sum_m int_{Gamma_m} grad_t p . grad_t q over duct outlets.
SparseOperator assemble_outlet_pressure_stab(const Mesh& mesh,
                                             const DofMap& dofs,
                                             const std::vector<OutletSpec>& outlets,
                                             double gamma_press);

/// Flow rate int_{Gamma_m} u.n through one outlet.
double outlet_flow_rate(const Eigen::VectorXd& u, const Mesh& mesh,
                        const DofMap& dofs, const OutletSpec& outlet);

/// Mean pressure over one outlet.
double outlet_mean_pressure(const Eigen::VectorXd& p, const Mesh& mesh,
                            const DofMap& dofs, const OutletSpec& outlet);

}  // namespace ductflow

#endif  // DUCTFLOW_DUCT_BC_HPP
