/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef DUCTFLOW_LINALG_HPP
#define DUCTFLOW_LINALG_HPP

#include <Eigen/Sparse>
#include <string>
#include <vector>

namespace ductflow {

using SpMatCol = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Thrown when a linear solve fails; carries the relative residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

/// Strong Dirichlet rows: drops every triplet whose row or column is
/// marked and appends a unit diagonal for marked dofs (the prescribed
/// value is zero, so no right-hand-side correction is needed).
void eliminate_marked(std::vector<Triplet>& triplets,
                      const std::vector<char>& marked);

/// Sparse LU solve; validates the relative residual.
Eigen::VectorXd solve_direct(const SpMatCol& A, const Eigen::VectorXd& b);

/// ILUT-preconditioned BiCGSTAB with relative tolerance `tol`.
Eigen::VectorXd solve_iterative(const SpMatCol& A, const Eigen::VectorXd& b,
                                double tol);

/// Reusable direct factorization (the matrix sparsity/values are fixed).
class DirectSolver {
 public:
  void factorize(const SpMatCol& A);
  bool ready() const { return ready_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  Eigen::SparseLU<SpMatCol> lu_;
  bool ready_ = false;
};

}  // namespace ductflow

#endif  // DUCTFLOW_LINALG_HPP
