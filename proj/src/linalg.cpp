/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ductflow/linalg.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

namespace ductflow {

void eliminate_marked(std::vector<Triplet>& triplets,
                      const std::vector<char>& marked) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    if (marked[t.row()] || marked[t.col()]) continue;
    triplets[out++] = t;
  }
  triplets.resize(out);
  for (std::size_t d = 0; d < marked.size(); ++d)
    if (marked[d])
      triplets.emplace_back(static_cast<int>(d), static_cast<int>(d), 1.0);
}

namespace {

double relative_residual(const SpMatCol& A, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
  double bn = b.norm();
  if (bn == 0.0) return (A * x).norm();
  return (A * x - b).norm() / bn;
}

}  // namespace

Eigen::VectorXd solve_direct(const SpMatCol& A, const Eigen::VectorXd& b) {
  Eigen::SparseLU<SpMatCol> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SolverError("direct solve: factorization failed (singular or "
                      "ill-conditioned matrix)",
                      std::numeric_limits<double>::infinity());
  Eigen::VectorXd x = lu.solve(b);
  double res = relative_residual(A, x, b);
  if (!std::isfinite(res) || res > 1e-6) {
    std::ostringstream os;
    os << "direct solve: residual too large (relative residual " << res << ")";
    throw SolverError(os.str(), res);
  }
  return x;
}

Eigen::VectorXd solve_iterative(const SpMatCol& A, const Eigen::VectorXd& b,
                                double tol) {
  Eigen::BiCGSTAB<SpMatCol, Eigen::IncompleteLUT<double>> solver;
  solver.setTolerance(tol);
  solver.setMaxIterations(2000);
  solver.compute(A);
  if (solver.info() != Eigen::Success)
    throw SolverError("iterative solve: preconditioner setup failed",
                      std::numeric_limits<double>::infinity());
  Eigen::VectorXd x = solver.solve(b);
  double res = relative_residual(A, x, b);
  if (solver.info() != Eigen::Success || !std::isfinite(res) || res > 10 * tol) {
    std::ostringstream os;
    os << "iterative solve: no convergence after " << solver.iterations()
       << " iterations (relative residual " << res << ")";
    throw SolverError(os.str(), res);
  }
  return x;
}

void DirectSolver::factorize(const SpMatCol& A) {
  lu_.compute(A);
  if (lu_.info() != Eigen::Success)
    throw SolverError("direct solve: factorization failed (singular or "
                      "ill-conditioned matrix)",
                      std::numeric_limits<double>::infinity());
  ready_ = true;
}

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& b) const {
  if (!ready_) throw std::logic_error("DirectSolver: factorize first");
  return lu_.solve(b);
}

}  // namespace ductflow
