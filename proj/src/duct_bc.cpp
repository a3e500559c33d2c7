/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ductflow/duct_bc.hpp"

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

double facet_mass_entry(double measure, int dim, int i, int j) {
  return measure * (i == j ? 2.0 : 1.0) / (dim * (dim + 1.0));
}

}  // namespace

OutletSpec make_outlet(const Mesh& mesh, int tag, OutletKind kind,
                       double length_cm) {
  if (!mesh.has_tag(tag))
    throw std::runtime_error("make_outlet: unknown boundary tag " +
                             std::to_string(tag));
  if (kind == OutletKind::duct && !(length_cm > 0))
    throw std::invalid_argument("make_outlet: duct length must be > 0 (tag " +
                                std::to_string(tag) + ")");
  OutletSpec spec;
  spec.tag = tag;
  spec.kind = kind;
  spec.length_cm = length_cm;
  spec.facets = mesh.facets_with_tag(tag);

  Vec3 mean{0, 0, 0};
  for (Index f : spec.facets) {
    FacetGeometry g = mesh.facet_geometry(f);
    for (int k = 0; k < 3; ++k) mean[k] += g.normal[k] * g.measure;
  }
  double nn = std::sqrt(dot3(mean, mean));
  if (!(nn > 0)) throw std::runtime_error("make_outlet: empty outlet facet set");
  for (int k = 0; k < 3; ++k) mean[k] /= nn;
  for (Index f : spec.facets) {
    FacetGeometry g = mesh.facet_geometry(f);
    double dev = std::sqrt(std::pow(g.normal[0] - mean[0], 2) +
                           std::pow(g.normal[1] - mean[1], 2) +
                           std::pow(g.normal[2] - mean[2], 2));
    if (dev > 1e-8)
      throw std::runtime_error(
          "make_outlet: outlet tag " + std::to_string(tag) +
          " is not planar (facet normal deviates by " + std::to_string(dev) +
          ")");
  }
  spec.normal = mean;
  return spec;
}

double negative_part(double x) { return x < 0 ? -x : 0.0; }

SparseOperator assemble_duct_inertia(const Mesh& mesh, const DofMap& dofs,
                                     const std::vector<OutletSpec>& outlets,
                                     double rho) {
  const int d = mesh.dim;
  std::vector<Triplet> trips;
  for (const OutletSpec& o : outlets) {
    if (o.kind != OutletKind::duct) continue;
    for (Index f : o.facets) {
      double meas = mesh.facet_measure(f);
      const auto& bf = mesh.boundary_facets[f];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double m = o.length_cm * rho * facet_mass_entry(meas, d, i, j);
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              trips.emplace_back(dofs.u_dof(bf.v[i], a), dofs.u_dof(bf.v[j], b),
                                 m * o.normal[a] * o.normal[b]);
        }
    }
  }
  return {from_triplets(dofs.n_u(), dofs.n_u(), trips), std::nullopt};
}

SparseOperator assemble_duct_viscous(const Mesh& mesh, const DofMap& dofs,
                                     const std::vector<OutletSpec>& outlets,
                                     double mu) {
  const int d = mesh.dim;
  std::vector<Triplet> trips;
  for (const OutletSpec& o : outlets) {
    if (o.kind != OutletKind::duct) continue;
    for (Index f : o.facets) {
      FacetBasis fb = facet_basis(mesh, f);
      const auto& bf = mesh.boundary_facets[f];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double k = o.length_cm * mu * fb.measure * dot3(fb.tgrad[i], fb.tgrad[j]);
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              trips.emplace_back(dofs.u_dof(bf.v[i], a), dofs.u_dof(bf.v[j], b),
                                 k * o.normal[a] * o.normal[b]);
        }
    }
  }
  return {from_triplets(dofs.n_u(), dofs.n_u(), trips), std::nullopt};
}

SparseOperator assemble_backflow(const Mesh& mesh, const DofMap& dofs,
                                 const std::vector<OutletSpec>& outlets,
                                 const Eigen::VectorXd& u_prev, double rho) {
  const int d = mesh.dim;
  const QuadRule qr = facet_rule(d);
  std::vector<Triplet> trips;
  for (const OutletSpec& o : outlets) {
    if (o.kind != OutletKind::duct) continue;
    for (Index f : o.facets) {
      double meas = mesh.facet_measure(f);
      const auto& bf = mesh.boundary_facets[f];
      std::array<double, 3> un{};
      for (int i = 0; i < d; ++i)
        for (int comp = 0; comp < d; ++comp)
          un[i] += u_prev[dofs.u_dof(bf.v[i], comp)] * o.normal[comp];
      std::array<std::array<double, 3>, 3> local{};
      for (int q = 0; q < qr.npts; ++q) {
        double uq = 0.0;
        for (int i = 0; i < d; ++i) uq += qr.bary[q][i] * un[i];
        double w = 0.5 * rho * negative_part(uq) * qr.weight[q] * meas;
        if (w == 0.0) continue;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            local[i][j] += w * qr.bary[q][i] * qr.bary[q][j];
      }
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          if (local[i][j] == 0.0) continue;
          for (int a = 0; a < d; ++a)
            trips.emplace_back(dofs.u_dof(bf.v[i], a), dofs.u_dof(bf.v[j], a),
                               local[i][j]);
        }
    }
  }
  return {from_triplets(dofs.n_u(), dofs.n_u(), trips), std::nullopt};
}

SparseOperator assemble_tangential_penalty(const Mesh& mesh, const DofMap& dofs,
                                           const std::vector<OutletSpec>& outlets,
                                           double gamma_tan) {
  if (!(gamma_tan >= 0))
    throw std::invalid_argument(
        "assemble_tangential_penalty: gamma_tan must be >= 0");
  const int d = mesh.dim;
  std::vector<Triplet> trips;
  if (gamma_tan > 0) {
    for (const OutletSpec& o : outlets) {
      if (o.kind != OutletKind::duct) continue;
      for (Index f : o.facets) {
        double meas = mesh.facet_measure(f);
        const auto& bf = mesh.boundary_facets[f];
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            double m = gamma_tan * facet_mass_entry(meas, d, i, j);
            for (int a = 0; a < d; ++a)
              for (int b = 0; b < d; ++b) {
                double proj = (a == b ? 1.0 : 0.0) - o.normal[a] * o.normal[b];
                if (proj == 0.0) continue;
                trips.emplace_back(dofs.u_dof(bf.v[i], a),
                                   dofs.u_dof(bf.v[j], b), m * proj);
              }
          }
      }
    }
  }
  return {from_triplets(dofs.n_u(), dofs.n_u(), trips), std::nullopt};
}

SparseOperator assemble_pressure_penalty(const Mesh& mesh, const DofMap& dofs,
                                         const std::vector<OutletSpec>& outlets,
                                         double free_coeff) {
  const int d = mesh.dim;
  std::vector<Triplet> trips;
  for (const OutletSpec& o : outlets) {
    double coeff;
    if (o.kind == OutletKind::duct) {
      if (!(o.length_cm > 0))
        throw std::invalid_argument(
            "assemble_pressure_penalty: duct length must be > 0");
      coeff = 1.0 / o.length_cm;
    } else {
      coeff = free_coeff;
    }
    for (Index f : o.facets) {
      double meas = mesh.facet_measure(f);
      const auto& bf = mesh.boundary_facets[f];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          trips.emplace_back(dofs.p_dof(bf.v[i]), dofs.p_dof(bf.v[j]),
                             coeff * facet_mass_entry(meas, d, i, j));
    }
  }
  return {from_triplets(dofs.n_p(), dofs.n_p(), trips), std::nullopt};
}

SparseOperator assemble_outlet_pressure_stab(const Mesh& mesh,
                                             const DofMap& dofs,
                                             const std::vector<OutletSpec>& outlets,
                                             double gamma_press) {
  const int d = mesh.dim;
  std::vector<Triplet> trips;
  if (gamma_press > 0) {
    for (const OutletSpec& o : outlets) {
      if (o.kind != OutletKind::duct) continue;
      for (Index f : o.facets) {
        FacetBasis fb = facet_basis(mesh, f);
        const auto& bf = mesh.boundary_facets[f];
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            trips.emplace_back(
                dofs.p_dof(bf.v[i]), dofs.p_dof(bf.v[j]),
                gamma_press * fb.measure * dot3(fb.tgrad[i], fb.tgrad[j]));
      }
    }
  }
  return {from_triplets(dofs.n_p(), dofs.n_p(), trips), std::nullopt};
}

double outlet_flow_rate(const Eigen::VectorXd& u, const Mesh& mesh,
                        const DofMap& dofs, const OutletSpec& outlet) {
  const int d = mesh.dim;
  double q = 0.0;
  for (Index f : outlet.facets) {
    double meas = mesh.facet_measure(f);
    const auto& bf = mesh.boundary_facets[f];
    for (int i = 0; i < d; ++i) {
      double un = 0.0;
      for (int comp = 0; comp < d; ++comp)
        un += u[dofs.u_dof(bf.v[i], comp)] * outlet.normal[comp];
      q += meas / d * un;
    }
  }
  return q;
}

double outlet_mean_pressure(const Eigen::VectorXd& p, const Mesh& mesh,
                            const DofMap& dofs, const OutletSpec& outlet) {
  const int d = mesh.dim;
  double sum = 0.0, area = 0.0;
  for (Index f : outlet.facets) {
    double meas = mesh.facet_measure(f);
    const auto& bf = mesh.boundary_facets[f];
    for (int i = 0; i < d; ++i) sum += meas / d * p[dofs.p_dof(bf.v[i])];
    area += meas;
  }
  return area > 0 ? sum / area : 0.0;
}

}  // namespace ductflow
