#include "qfdiv/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qfdiv/errors.hpp"
#include "qfdiv/optimizer.hpp"
#include "qfdiv/tau_objective.hpp"

namespace qfdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Divergence of the value along the epsilon schedule.
constexpr double kDivergenceThreshold = 1e6;
constexpr double kDivergenceRelChange = 1e-3;

// Newton polishing after a stalled L-BFGS run is limited to d <= 8.
constexpr Eigen::Index kNewtonMaxParams = 64;
constexpr double kMaxLogStep = 2.0;  // per-step cap on log-weight changes

void require_same_dim(const HermitianOperator& a, const HermitianOperator& b, const char* what) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw ArgumentError(os.str());
  }
}

void require_nonzero(const HermitianOperator& x) {
  psd_spectrum(x.matrix());
  if (!(x.trace() > 0.0)) throw ArgumentError("X must be nonzero");
}

Spectrum positive_definite_spectrum(const HermitianOperator& h, const char* name) {
  Spectrum s = eig_hermitian(h);
  if (!(s.eigenvalues(0) > 0.0)) {
    std::ostringstream os;
    os << name << " must be positive definite (smallest eigenvalue " << s.eigenvalues(0) << ")";
    throw DomainError(os.str());
  }
  return s;
}

void require_anti_monotone(const FDescriptor& f) {
  if (!f.anti_monotone()) {
    throw ArgumentError("the supremum over tau needs an operator anti-monotone kernel; '" +
                        f.name() + "' is not flagged as one");
  }
}

// Y + eps Pi_Y^perp built from the clipped spectrum of Y.
ComplexMatrix regularized(const Spectrum& sy, double eps) {
  const double tol = default_rank_tol(sy.eigenvalues);
  return spectral_apply(sy, [tol, eps](double m) { return m > tol ? m : m + eps; });
}

double spectral_sum(const ComplexMatrix& x_half, const Spectrum& sz, const Spectrum& st,
                    const FDescriptor& f) {
  const ComplexMatrix w = sz.eigenvectors.adjoint() * x_half * st.eigenvectors;
  double acc = 0.0;
  for (Eigen::Index y = 0; y < w.rows(); ++y) {
    for (Eigen::Index t = 0; t < w.cols(); ++t) {
      const double p = std::norm(w(y, t));
      if (p == 0.0) continue;
      acc += f(sz.eigenvalues(y) / st.eigenvalues(t)) * p;
    }
  }
  return acc;
}

// --- tau optimizer ---------------------------------------------------------

struct RungResult {
  double value = -kInf;
  RealVector params;
  ComplexMatrix tau;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

RungResult maximize_rung(const ComplexMatrix& x_half, const ComplexMatrix& z,
                         const FDescriptor& f, const std::vector<std::size_t>& blocks,
                         const std::vector<RealVector>& starts, const OptimizerOptions& opts) {
  const Spectrum sz = eig_hermitian(z);
  const TauObjective obj(x_half, sz, f, blocks);
  LbfgsOptions lo;
  lo.max_iters = opts.max_iters;
  lo.grad_tol = opts.grad_tol;
  lo.max_step = kMaxLogStep;
  const Objective fn = [&obj](const RealVector& p, RealVector& g) { return obj(p, g); };
  RungResult best;
  for (const auto& start : starts) {
    LbfgsResult r;
    try {
      r = minimize_lbfgs(fn, start, lo);
    } catch (const DomainError&) {
      continue;  // start outside the domain (overflowing weights)
    }
    if (!r.converged && r.x.size() <= kNewtonMaxParams) {
      const LbfgsResult polished = minimize_newton(fn, r.x, lo);
      if (polished.value <= r.value) {
        const int before = r.iterations;
        r = polished;
        r.iterations += before;
      }
    }
    const double v = -r.value;
    if (v > best.value) {
      best.value = v;
      best.params = r.x;
      best.converged = r.converged;
      best.grad_norm = r.grad_norm;
    }
    best.iterations += r.iterations;
  }
  if (!std::isfinite(best.value)) {
    throw ConvergenceError("tau optimizer found no start inside the objective's domain");
  }
  best.tau = obj.tau(best.params);
  return best;
}

DivergenceResult optimize_tau(const HermitianOperator& x, const HermitianOperator& y,
                              const FDescriptor& f, const std::vector<std::size_t>& blocks,
                              const OptimizerOptions& opts) {
  require_same_dim(x, y, "optimized_f_divergence");
  require_nonzero(x);
  require_anti_monotone(f);
  if (opts.max_iters < 1 || !(opts.grad_tol > 0.0) || opts.multistarts < 1) {
    throw ArgumentError("optimizer options: max_iters, grad_tol and multistarts must be positive");
  }

  DivergenceResult res;
  if (f.limit_at_zero().is_pos_infinity() && !support_contained(x.matrix(), y.matrix())) {
    res.value = ExtendedReal::pos_infinity();
    res.converged = true;
    return res;
  }

  const Spectrum sy = psd_spectrum(y.matrix());
  const double tol = default_rank_tol(sy.eigenvalues);
  const bool has_kernel = (sy.eigenvalues.array() <= tol).any();
  std::vector<double> rungs = has_kernel ? opts.epsilon_schedule : std::vector<double>{0.0};
  if (rungs.empty()) throw ArgumentError("epsilon schedule is empty");
  for (double e : rungs) {
    if (has_kernel && !(e > 0.0)) throw ArgumentError("epsilon schedule entries must be > 0");
  }

  const ComplexMatrix x_half = psd_sqrt(x.matrix());
  std::size_t nparams = 0;
  for (auto n : blocks) nparams += n * n;

  std::vector<RealVector> starts{RealVector::Zero(static_cast<Eigen::Index>(nparams))};
  for (int k = 1; k < opts.multistarts; ++k) {
    starts.push_back(random_params(nparams, 1.0, opts.seed * 1000003ULL + static_cast<std::uint64_t>(k)));
  }

  std::vector<double> values;
  RungResult last;
  for (std::size_t r = 0; r < rungs.size(); ++r) {
    const ComplexMatrix z = regularized(sy, rungs[r]);
    last = maximize_rung(x_half, z, f, blocks, starts, opts);
    values.push_back(last.value);
    res.epsilon_schedule.push_back(rungs[r]);
    res.iterations += last.iterations;
    // Later rungs warm start from this optimum and from the plain start.
    starts = {last.params, RealVector::Zero(static_cast<Eigen::Index>(nparams))};
  }

  res.converged = last.converged;
  res.gradient_norm = last.grad_norm;
  res.tau_star = HermitianOperator(last.tau, x.layout());
  const std::size_t n = values.size();
  if (n >= 2) {
    const double a = values[n - 2];
    const double b = values[n - 1];
    const bool growing = b > a && std::abs(b - a) > kDivergenceRelChange * std::abs(a);
    if (b > kDivergenceThreshold && growing) {
      res.value = ExtendedReal::pos_infinity();
      return res;
    }
  }
  res.value = ExtendedReal::finite(values.back());
  return res;
}

double quasi_norm(const HermitianOperator& x, const HermitianOperator& y, double alpha) {
  const double g = (1.0 - alpha) / (2.0 * alpha);
  const ComplexMatrix yg = psd_power(y.matrix(), g);
  const ComplexMatrix s = hermitian_part(yg * x.matrix() * yg);
  return schatten_norm(s, alpha);
}

void require_sandwiched_order(double alpha, bool allow_any_order) {
  const bool standard = (alpha >= 0.5 && alpha < 1.0) || (alpha > 1.0 && std::isfinite(alpha));
  const bool permissive = alpha > 0.0 && alpha != 1.0 && std::isfinite(alpha);
  if (!(allow_any_order ? permissive : standard)) {
    std::ostringstream os;
    os << "sandwiched order " << alpha << " is outside "
       << (allow_any_order ? "(0,1) or (1,inf)" : "[1/2,1) or (1,inf)");
    throw ArgumentError(os.str());
  }
}

}  // namespace

double optimized_f_at(const HermitianOperator& x, const HermitianOperator& z,
                      const HermitianOperator& tau, const FDescriptor& f, EvalPath path) {
  require_same_dim(x, z, "optimized_f_at");
  require_same_dim(x, tau, "optimized_f_at");
  const Spectrum sz = positive_definite_spectrum(z, "Z");
  const Spectrum st = positive_definite_spectrum(tau, "tau");
  const ComplexMatrix x_half = psd_sqrt(x.matrix());
  switch (path) {
    case EvalPath::Spectral:
      return spectral_sum(x_half, sz, st, f);
    case EvalPath::Tensor: {
      const ComplexMatrix tau_inv = spectral_apply(st, [](double v) { return 1.0 / v; });
      const ComplexMatrix op = kron(tau_inv, z.matrix().transpose());
      const ComplexMatrix f_op = spectral_apply(eig_hermitian(hermitian_part(op)),
                                                [&f](double v) { return f(v); });
      const auto d = static_cast<Eigen::Index>(x.dim());
      ComplexVector phi(d * d);
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index i = 0; i < d; ++i) phi(a * d + i) = x_half(a, i);
      }
      return phi.dot(f_op * phi).real();
    }
    case EvalPath::RelativeModular:
      return rel_modular_eval(x, z, tau, f);
  }
  throw ArgumentError("unknown evaluation path");
}

double rel_modular_eval(const HermitianOperator& x, const HermitianOperator& y,
                        const HermitianOperator& tau, const FDescriptor& f) {
  require_same_dim(x, y, "rel_modular_eval");
  require_same_dim(x, tau, "rel_modular_eval");
  positive_definite_spectrum(y, "Y");
  const Spectrum st = positive_definite_spectrum(tau, "tau");
  const ComplexMatrix tau_inv = spectral_apply(st, [](double v) { return 1.0 / v; });
  const auto d = static_cast<Eigen::Index>(x.dim());
  // Column (i,j) holds vec(Delta(E_ij)) = vec(Y E_ij tau^{-1}), row-major vec.
  ComplexMatrix super(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const ComplexMatrix img = y.matrix().col(i) * tau_inv.row(j);
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) super(a * d + b, i * d + j) = img(a, b);
      }
    }
  }
  const ComplexMatrix f_super =
      spectral_apply(eig_hermitian(hermitian_part(super)), [&f](double v) { return f(v); });
  const ComplexMatrix x_half = psd_sqrt(x.matrix());
  ComplexVector v(d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) v(a * d + b) = x_half(a, b);
  }
  // <W, Z> = Tr{W^dagger Z} is the conjugate-linear dot product of the vecs.
  return v.dot(f_super * v).real();
}

DivergenceResult optimized_f_divergence(const HermitianOperator& x, const HermitianOperator& y,
                                        const FDescriptor& f, const OptimizerOptions& opts) {
  return optimize_tau(x, y, f, {x.dim()}, opts);
}

ExtendedReal optimized_f_value(const HermitianOperator& x, const HermitianOperator& y,
                               const FDescriptor& f, const OptimizerOptions& opts) {
  switch (f.family()) {
    case Family::NegLog:
      return quantum_relative_entropy(x, y).scaled(x.trace());
    case Family::NegPower:
      return sandwiched_quasi(x, y, 1.0 / (1.0 + f.beta()));
    case Family::InvPower:
      if (f.beta() > -1.0) return sandwiched_quasi(x, y, 1.0 / (1.0 + f.beta()));
      break;
    default:
      break;
  }
  return optimized_f_divergence(x, y, f, opts).value;
}

ExtendedReal quantum_relative_entropy(const HermitianOperator& x, const HermitianOperator& y) {
  require_same_dim(x, y, "quantum_relative_entropy");
  require_nonzero(x);
  psd_spectrum(y.matrix());
  if (!support_contained(x.matrix(), y.matrix())) return ExtendedReal::pos_infinity();
  const ComplexMatrix xbar = x.matrix() / x.trace();
  const Spectrum sx = psd_spectrum(xbar);
  double ent = 0.0;
  for (Eigen::Index i = 0; i < sx.eigenvalues.size(); ++i) {
    const double l = sx.eigenvalues(i);
    if (l > 0.0) ent += l * std::log(l);
  }
  const double cross = (xbar * psd_log_on_support(y.matrix())).trace().real();
  return ExtendedReal::finite(ent - cross);
}

ExtendedReal sandwiched_quasi(const HermitianOperator& x, const HermitianOperator& y,
                              double alpha, bool allow_any_order) {
  require_sandwiched_order(alpha, allow_any_order);
  require_same_dim(x, y, "sandwiched_quasi");
  require_nonzero(x);
  if (alpha > 1.0 && !support_contained(x.matrix(), y.matrix())) {
    return ExtendedReal::pos_infinity();
  }
  const double norm = quasi_norm(x, y, alpha);
  return ExtendedReal::finite(alpha < 1.0 ? -norm : norm);
}

ExtendedReal sandwiched_renyi(const HermitianOperator& x, const HermitianOperator& y,
                              double alpha, bool allow_any_order) {
  const ExtendedReal q = sandwiched_quasi(x, y, alpha, allow_any_order);
  if (!q.is_finite()) return q;
  const double norm = std::abs(q.value());
  if (norm == 0.0) return ExtendedReal::pos_infinity();
  return ExtendedReal::finite(alpha / (alpha - 1.0) * std::log(norm));
}

HermitianOperator holder_optimal_tau(const HermitianOperator& x, const HermitianOperator& y,
                                     double alpha, double eps) {
  require_sandwiched_order(alpha, false);
  require_same_dim(x, y, "holder_optimal_tau");
  const Spectrum sy = psd_spectrum(y.matrix());
  const double tol = default_rank_tol(sy.eigenvalues);
  if ((sy.eigenvalues.array() <= tol).any() && !(eps > 0.0)) {
    throw ArgumentError("holder_optimal_tau: Y has a kernel, eps must be > 0");
  }
  const double p = (1.0 - alpha) / alpha;
  const ComplexMatrix yp = spectral_apply(sy, [tol, eps, p](double m) {
    return std::pow(m > tol ? m : m + eps, p);
  });
  const ComplexMatrix x_half = psd_sqrt(x.matrix());
  const ComplexMatrix a = hermitian_part(x_half * yp * x_half);
  const ComplexMatrix a_pow = psd_power(a, alpha);
  const double tr = a_pow.trace().real();
  if (!(tr > 0.0)) throw DomainError("holder_optimal_tau: A is degenerate (zero)");
  return HermitianOperator(a_pow / tr, x.layout());
}

ExtendedReal petz_f_divergence(const HermitianOperator& x, const HermitianOperator& y,
                               const FDescriptor& f) {
  require_same_dim(x, y, "petz_f_divergence");
  require_nonzero(x);
  const Spectrum sx = psd_spectrum(x.matrix());
  const Spectrum sy = psd_spectrum(y.matrix());
  const double tol_x = default_rank_tol(sx.eigenvalues);
  const double tol_y = default_rank_tol(sy.eigenvalues);
  const ComplexMatrix overlap = sx.eigenvectors.adjoint() * sy.eigenvectors;
  double acc = 0.0;
  double kernel_weight = 0.0;
  for (Eigen::Index i = 0; i < sx.eigenvalues.size(); ++i) {
    const double lam = sx.eigenvalues(i);
    if (lam <= tol_x) continue;
    for (Eigen::Index j = 0; j < sy.eigenvalues.size(); ++j) {
      const double w = lam * std::norm(overlap(i, j));
      const double mu = sy.eigenvalues(j);
      if (mu > tol_y) {
        acc += w * f(mu / lam);
      } else {
        kernel_weight += w;
      }
    }
  }
  const ExtendedReal& lim = f.limit_at_zero();
  if (kernel_weight > 1e-10 * x.trace()) {
    if (!lim.is_finite()) return lim;
    acc += lim.value() * kernel_weight;
  } else if (lim.is_finite()) {
    acc += lim.value() * kernel_weight;
  }
  return ExtendedReal::finite(acc);
}

ExtendedReal petz_renyi(const HermitianOperator& x, const HermitianOperator& y, double alpha) {
  if (alpha == 1.0) {
    throw ArgumentError("Petz-Renyi order 1 is the relative entropy; use quantum_relative_entropy");
  }
  if (!(alpha >= -1.0 && alpha <= 2.0)) {
    std::ostringstream os;
    os << "Petz-Renyi order " << alpha << " is outside [-1,1) or (1,2]";
    throw ArgumentError(os.str());
  }
  require_same_dim(x, y, "petz_renyi");
  require_nonzero(x);
  psd_spectrum(y.matrix());
  if (alpha > 1.0 && !support_contained(x.matrix(), y.matrix())) {
    return ExtendedReal::pos_infinity();
  }
  const ComplexMatrix xa = psd_power(x.matrix(), alpha);
  const ComplexMatrix yb = psd_power(y.matrix(), 1.0 - alpha);
  const double tr = (xa * yb).trace().real();
  if (!(tr > 0.0)) {
    // log 0 with a negative prefactor.
    return alpha < 1.0 ? ExtendedReal::pos_infinity() : ExtendedReal::neg_infinity();
  }
  return ExtendedReal::finite(std::log(tr) / (alpha - 1.0));
}

double optimized_alpha_divergence_at(const HermitianOperator& x, const HermitianOperator& y,
                                     const HermitianOperator& tau, double beta) {
  if (!(beta >= 1.0 && beta <= 2.0)) {
    throw ArgumentError("optimized_alpha_divergence_at: beta must lie in [1,2]");
  }
  require_same_dim(x, y, "optimized_alpha_divergence_at");
  require_same_dim(x, tau, "optimized_alpha_divergence_at");
  const ComplexMatrix x_half = matrix_function(x, [](double v) { return std::sqrt(v); }).matrix();
  const ComplexMatrix y_b = matrix_function(y, [beta](double v) { return std::pow(v, beta); }).matrix();
  const ComplexMatrix t_b = matrix_function(tau, [beta](double v) { return std::pow(v, -beta); }).matrix();
  return (x_half * y_b * x_half * t_b).trace().real();
}

DivergenceResult classical_f_divergence(const RealVector& lambda, const RealVector& mu,
                                        const FDescriptor& f, const OptimizerOptions& opts) {
  if (lambda.size() != mu.size() || lambda.size() == 0) {
    throw ArgumentError("classical_f_divergence: vectors must have equal nonzero length");
  }
  if ((lambda.array() < 0.0).any() || (mu.array() < 0.0).any()) {
    throw DomainError("classical_f_divergence: entries must be nonnegative");
  }
  if (!(lambda.sum() > 0.0)) throw ArgumentError("classical_f_divergence: lambda must be nonzero");
  require_anti_monotone(f);

  const Eigen::Index n = lambda.size();
  const double tol = kRankTolerance * mu.maxCoeff();
  std::vector<bool> zero_mu(static_cast<std::size_t>(n));
  bool any_zero = false;
  bool violation = false;
  for (Eigen::Index z = 0; z < n; ++z) {
    zero_mu[static_cast<std::size_t>(z)] = !(mu(z) > tol);
    any_zero = any_zero || zero_mu[static_cast<std::size_t>(z)];
    violation = violation || (zero_mu[static_cast<std::size_t>(z)] && lambda(z) > 0.0);
  }
  DivergenceResult res;
  if (violation && f.limit_at_zero().is_pos_infinity()) {
    res.value = ExtendedReal::pos_infinity();
    res.converged = true;
    return res;
  }

  const std::vector<double> rungs = any_zero ? opts.epsilon_schedule : std::vector<double>{0.0};
  LbfgsOptions lo;
  lo.max_iters = opts.max_iters;
  lo.grad_tol = opts.grad_tol;
  lo.max_step = kMaxLogStep;

  std::vector<RealVector> starts{RealVector::Zero(n)};
  for (int k = 1; k < opts.multistarts; ++k) {
    starts.push_back(random_params(static_cast<std::size_t>(n), 1.0,
                                   opts.seed * 1000003ULL + static_cast<std::uint64_t>(k)));
  }

  auto softmax = [](const RealVector& h) {
    const double top = h.maxCoeff();
    RealVector t = (h.array() - top).exp();
    return RealVector(t / t.sum());
  };

  std::vector<double> values;
  RealVector best_h;
  for (double eps : rungs) {
    RealVector m = mu;
    for (Eigen::Index z = 0; z < n; ++z) {
      if (zero_mu[static_cast<std::size_t>(z)]) m(z) = eps;
    }
    const Objective fn = [&](const RealVector& h, RealVector& grad) {
      const RealVector t = softmax(h);
      double value = 0.0;
      RealVector dv = RealVector::Zero(n);
      for (Eigen::Index z = 0; z < n; ++z) {
        if (lambda(z) == 0.0) continue;
        const double r = m(z) / t(z);
        const double fv = f(r);
        if (!std::isfinite(fv)) return kInf;
        value += lambda(z) * fv;
        dv(z) = -lambda(z) * f.derivative(r) * r / t(z);
      }
      const double mean = t.dot(dv);
      grad = -(t.array() * (dv.array() - mean)).matrix();
      return -value;
    };
    double best = -kInf;
    RealVector arg;
    bool conv = false;
    double gn = 0.0;
    for (const auto& s : starts) {
      const LbfgsResult r = minimize_lbfgs(fn, s, lo);
      res.iterations += r.iterations;
      if (-r.value > best) {
        best = -r.value;
        arg = r.x;
        conv = r.converged;
        gn = r.grad_norm;
      }
    }
    values.push_back(best);
    res.epsilon_schedule.push_back(eps);
    res.converged = conv;
    res.gradient_norm = gn;
    best_h = arg;
    starts = {arg, RealVector::Zero(n)};
  }

  const RealVector t = softmax(best_h);
  res.tau_star = HermitianOperator(t.cast<Complex>().asDiagonal().toDenseMatrix());
  const std::size_t k = values.size();
  if (k >= 2) {
    const double a = values[k - 2];
    const double b = values[k - 1];
    if (b > kDivergenceThreshold && b > a && std::abs(b - a) > kDivergenceRelChange * std::abs(a)) {
      res.value = ExtendedReal::pos_infinity();
      return res;
    }
  }
  res.value = ExtendedReal::finite(values.back());
  return res;
}

std::pair<HermitianOperator, HermitianOperator> assemble_blocks(const std::vector<CqBlock>& blocks) {
  if (blocks.empty()) throw ArgumentError("cq_f_divergence: no blocks");
  std::size_t d = 0;
  for (const auto& b : blocks) {
    require_same_dim(b.x, b.y, "cq_f_divergence block");
    d += b.x.dim();
  }
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix x = ComplexMatrix::Zero(n, n);
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  Eigen::Index o = 0;
  for (const auto& b : blocks) {
    const auto m = static_cast<Eigen::Index>(b.x.dim());
    x.block(o, o, m, m) = b.x.matrix();
    y.block(o, o, m, m) = b.y.matrix();
    o += m;
  }
  return {HermitianOperator(x), HermitianOperator(y)};
}

DivergenceResult cq_f_divergence(const std::vector<CqBlock>& blocks, const FDescriptor& f,
                                 const OptimizerOptions& opts) {
  const auto [x, y] = assemble_blocks(blocks);
  std::vector<std::size_t> sizes;
  for (const auto& b : blocks) sizes.push_back(b.x.dim());
  return optimize_tau(x, y, f, sizes, opts);
}

GapPair sandwiched_vs_petz_gap(const HermitianOperator& x, const HermitianOperator& y,
                               double alpha) {
  require_sandwiched_order(alpha, false);
  GapPair out;
  out.lhs = sandwiched_renyi(x, y, alpha);
  const ExtendedReal petz = petz_renyi(x, y, (2.0 * alpha - 1.0) / alpha);
  out.rhs = petz + ExtendedReal::finite(-std::log(x.trace()));
  return out;
}

}  // namespace qfdiv
