#pragma once

// Unconstrained smooth minimization and exp-parametrized density operators.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qfdiv/linops.hpp"

namespace qfdiv {

struct LbfgsOptions {
  int max_iters = 500;
  double grad_tol = 1e-7;
  int memory = 10;
  double armijo_c1 = 1e-4;
  int max_backtracks = 60;
  // Caps the max-norm of each trial step; 0 disables the cap.
  double max_step = 0.0;
};

struct LbfgsResult {
  RealVector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Returns f(x) and writes the gradient. Non-finite values are treated as
// outside the domain and trigger backtracking.
using Objective = std::function<double(const RealVector& x, RealVector& grad)>;

// L-BFGS with Armijo backtracking. Convergence means the max-norm of the
// gradient fell below grad_tol.
LbfgsResult minimize_lbfgs(const Objective& fn, const RealVector& x0,
                           const LbfgsOptions& opts = {});

// Modified Newton with a Hessian from central differences of the gradient
// and eigenvalues replaced by their magnitudes. Meant for polishing badly
// scaled optima in low dimension; costs 2n gradient calls per iteration.
LbfgsResult minimize_newton(const Objective& fn, const RealVector& x0,
                            const LbfgsOptions& opts = {});

// Central differences with step h on a value-only function.
Objective with_finite_differences(std::function<double(const RealVector&)> fn,
                                  double h = 1e-5);

// Hermitian matrices of size n packed as n^2 reals: the diagonal first, then
// (Re, Im) of each upper off-diagonal entry in row order.
std::size_t hermitian_param_count(std::size_t n);
ComplexMatrix hermitian_from_params(const RealVector& p, std::size_t n,
                                    std::size_t offset = 0);
RealVector params_from_hermitian(const ComplexMatrix& h);

// Chain rule for g(H): given dg = Tr{G dH} with G Hermitian, the gradient
// with respect to the packed parameters.
void hermitian_grad_to_params(const ComplexMatrix& g, RealVector& out,
                              std::size_t offset = 0);

// exp(H)/Tr{exp(H)} for Hermitian H.
ComplexMatrix density_from_hermitian(const ComplexMatrix& h);
// log(rho) for a positive definite density; inverse of the map above up to a
// multiple of the identity.
ComplexMatrix hermitian_from_density(const ComplexMatrix& rho);

RealVector random_params(std::size_t n, double scale, std::uint64_t seed);

}  // namespace qfdiv
