#include "qfdiv/measures.hpp"

#include <cmath>
#include <limits>

#include "qfdiv/errors.hpp"
#include "qfdiv/optimizer.hpp"

namespace qfdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct InnerValue {
  ExtendedReal value;
  bool converged = true;
};

bool has_closed_form(const FDescriptor& f) {
  switch (f.family()) {
    case Family::NegLog:
    case Family::NegPower:
      return true;
    case Family::InvPower:
      return f.beta() > -1.0;
    default:
      return false;
  }
}

InnerValue inner_value(const HermitianOperator& x, const HermitianOperator& y,
                       const FDescriptor& f, const OptimizerOptions& opts) {
  if (has_closed_form(f)) return {optimized_f_value(x, y, f, opts), true};
  const DivergenceResult r = optimized_f_divergence(x, y, f, opts);
  return {r.value, r.converged};
}

void require_bipartite(const HermitianOperator& rho, const SystemLayout& layout) {
  if (layout.size() != 2 || layout.total_dim() != rho.dim()) {
    throw ArgumentError("expected a bipartite layout (A, B) matching the state");
  }
}

// Minimizes value(sigma) over densities sigma = exp(H)/Tr exp(H) of size d.
MeasureResult minimize_over_states(
    std::size_t d, const std::function<InnerValue(const HermitianOperator&)>& value,
    const std::optional<HermitianOperator>& warm, const MeasureOptions& opts) {
  MeasureResult out;
  if (d == 1) {
    const HermitianOperator one(identity(1));
    const InnerValue v = value(one);
    out.value = v.value;
    out.converged = v.converged;
    out.inner_witness = one;
    return out;
  }
  bool inner_ok = true;
  auto eval = [&](const RealVector& p) {
    const HermitianOperator sigma(density_from_hermitian(hermitian_from_params(p, d)));
    const InnerValue v = value(sigma);
    inner_ok = inner_ok && v.converged;
    return v.value.is_finite() ? v.value.value() : kInf;
  };
  const Objective fn = with_finite_differences(eval, opts.fd_step);

  std::vector<RealVector> starts;
  if (warm) {
    const Spectrum s = eig_hermitian(*warm);
    if (s.eigenvalues(0) > 1e-8) starts.push_back(params_from_hermitian(hermitian_from_density(warm->matrix())));
  }
  starts.push_back(RealVector::Zero(static_cast<Eigen::Index>(d * d)));
  for (std::uint64_t k = 1; static_cast<int>(starts.size()) < opts.outer_multistarts; ++k) {
    starts.push_back(random_params(d * d, 1.0, opts.seed * 7919ULL + k));
  }

  LbfgsOptions lo;
  lo.max_iters = opts.outer_max_iters;
  lo.grad_tol = opts.outer_grad_tol;
  double best = kInf;
  RealVector arg;
  bool best_conv = false;
  bool any_infinite_only = true;
  for (const auto& s : starts) {
    LbfgsResult r;
    try {
      r = minimize_lbfgs(fn, s, lo);
    } catch (const DomainError&) {
      continue;  // infinite at this start
    }
    any_infinite_only = false;
    if (r.value < best) {
      best = r.value;
      arg = r.x;
      // A stalled line search at FD noise level still counts as converged.
      best_conv = r.converged || r.grad_norm <= 1e3 * opts.outer_grad_tol;
    }
  }
  if (any_infinite_only) {
    out.value = ExtendedReal::pos_infinity();
    out.converged = inner_ok;
    return out;
  }
  out.value = ExtendedReal::finite(best);
  out.inner_witness = HermitianOperator(density_from_hermitian(hermitian_from_params(arg, d)));
  out.converged = best_conv && inner_ok;
  return out;
}

MeasureResult negated(MeasureResult r) {
  r.value = -r.value;
  return r;
}

}  // namespace

MeasureResult f_entropy(const HermitianOperator& rho, const FDescriptor& f,
                        const MeasureOptions& opts) {
  const HermitianOperator id(identity(rho.dim()), rho.layout());
  const InnerValue v = inner_value(rho, id, f, opts.inner);
  MeasureResult out;
  out.value = -v.value;
  out.converged = v.converged;
  return out;
}

MeasureResult f_mutual_information(const HermitianOperator& rho_ab, const SystemLayout& layout,
                                   const FDescriptor& f, const MeasureOptions& opts) {
  require_bipartite(rho_ab, layout);
  const auto dims = layout.dims();
  const ComplexMatrix rho_a = partial_trace(rho_ab.matrix(), dims, {true, false});
  const ComplexMatrix rho_b = partial_trace(rho_ab.matrix(), dims, {false, true});
  auto value = [&](const HermitianOperator& sigma) {
    return inner_value(rho_ab, HermitianOperator(kron(rho_a, sigma.matrix()), layout), f, opts.inner);
  };
  return minimize_over_states(dims[1], value, HermitianOperator(rho_b), opts);
}

MeasureResult conditional_f_entropy(const HermitianOperator& rho_ab, const SystemLayout& layout,
                                    const FDescriptor& f, const MeasureOptions& opts) {
  require_bipartite(rho_ab, layout);
  const auto dims = layout.dims();
  const ComplexMatrix rho_b = partial_trace(rho_ab.matrix(), dims, {false, true});
  const ComplexMatrix id_a = identity(dims[0]);
  auto value = [&](const HermitianOperator& sigma) {
    return inner_value(rho_ab, HermitianOperator(kron(id_a, sigma.matrix()), layout), f, opts.inner);
  };
  return negated(minimize_over_states(dims[1], value, HermitianOperator(rho_b), opts));
}

MeasureResult coherent_f_information(const HermitianOperator& rho_ab, const SystemLayout& layout,
                                     const FDescriptor& f, const MeasureOptions& opts) {
  return negated(conditional_f_entropy(rho_ab, layout, f, opts));
}

MeasureResult resource_measure(const HermitianOperator& rho, const FreeStateSet& free,
                               const FDescriptor& f, const MeasureOptions& opts) {
  if (free.states.empty()) throw ArgumentError("resource_measure: free set is empty");
  MeasureResult out;
  out.value = ExtendedReal::pos_infinity();
  for (const auto& sigma : free.states) {
    if (sigma.dim() != rho.dim()) throw ArgumentError("resource_measure: free state dimension mismatch");
    const InnerValue v = inner_value(rho, sigma, f, opts.inner);
    out.converged = out.converged && v.converged;
    if (!out.inner_witness || v.value < out.value) {
      out.value = v.value;
      out.inner_witness = sigma;
    }
  }
  return out;
}

MeasureResult channel_f_mutual_information(const QuantumChannel& ch, const FDescriptor& f,
                                           const MeasureOptions& opts) {
  const std::size_t d = ch.din();
  const auto n = static_cast<Eigen::Index>(d);
  const SystemLayout out_layout({{"R", d}, {"B", ch.dout()}});
  MeasureOptions inner_opts = opts;
  inner_opts.outer_multistarts = 2;

  std::vector<ComplexMatrix> lifted;
  for (const auto& k : ch.kraus()) lifted.push_back(kron(identity(d), k));

  auto output_state = [&](const RealVector& p) {
    ComplexVector psi(n * n);
    for (Eigen::Index i = 0; i < n * n; ++i) psi(i) = Complex(p(2 * i), p(2 * i + 1));
    const double norm = psi.norm();
    if (!(norm > 1e-12)) return std::optional<HermitianOperator>{};
    psi /= norm;
    ComplexMatrix omega = ComplexMatrix::Zero(n * static_cast<Eigen::Index>(ch.dout()),
                                              n * static_cast<Eigen::Index>(ch.dout()));
    for (const auto& k : lifted) {
      const ComplexVector v = k * psi;
      omega += v * v.adjoint();
    }
    return std::optional<HermitianOperator>(HermitianOperator(hermitian_part(omega), out_layout));
  };

  bool inner_ok = true;
  auto eval = [&](const RealVector& p) {
    const auto omega = output_state(p);
    if (!omega) return kInf;
    const MeasureResult mi = f_mutual_information(*omega, out_layout, f, inner_opts);
    inner_ok = inner_ok && mi.converged;
    return mi.value.is_finite() ? -mi.value.value() : kInf;
  };
  const Objective fn = with_finite_differences(eval, opts.fd_step);

  // Row-major (M (x) I)|Gamma> has amplitude M(r, a) at r*d + a.
  std::vector<RealVector> starts;
  RealVector eye = RealVector::Zero(2 * n * n);
  for (Eigen::Index i = 0; i < n; ++i) eye(2 * (i * n + i)) = 1.0;
  starts.push_back(eye);
  const int extra = std::min(opts.outer_multistarts - 1, 2);
  for (int k = 0; k < extra; ++k) {
    starts.push_back(random_params(static_cast<std::size_t>(2 * n * n), 1.0,
                                   opts.seed * 104729ULL + static_cast<std::uint64_t>(k) + 1));
  }

  LbfgsOptions lo;
  lo.max_iters = opts.outer_max_iters;
  lo.grad_tol = opts.outer_grad_tol;
  double best = kInf;
  RealVector arg;
  bool best_conv = false;
  for (const auto& s : starts) {
    LbfgsResult r;
    try {
      r = minimize_lbfgs(fn, s, lo);
    } catch (const DomainError&) {
      continue;
    }
    if (r.value < best) {
      best = r.value;
      arg = r.x;
      best_conv = r.converged || r.grad_norm <= 1e3 * opts.outer_grad_tol;
    }
  }
  MeasureResult out;
  if (!std::isfinite(best)) {
    out.value = ExtendedReal::pos_infinity();
    out.converged = false;
    return out;
  }
  out.value = ExtendedReal::finite(-best);
  out.inner_witness = output_state(arg);
  out.converged = best_conv && inner_ok;
  return out;
}

DualityPair duality_pair(const PureStateVector& psi, const FDescriptor& f,
                         const MeasureOptions& opts) {
  const SystemLayout& layout = psi.layout;
  if (layout.size() != 3 || layout.total_dim() != psi.dim()) {
    throw ArgumentError("duality_pair: expected a three-factor layout A, B, C");
  }
  const double norm = psi.amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-9) throw ArgumentError("duality_pair: state is not normalized");
  const ComplexMatrix rho = psi.amplitudes * psi.amplitudes.adjoint();
  const auto dims = layout.dims();
  const auto& fac = layout.factors();
  const HermitianOperator rho_ab(hermitian_part(partial_trace(rho, dims, {true, true, false})),
                                 SystemLayout({fac[0], fac[1]}));
  const HermitianOperator rho_ac(hermitian_part(partial_trace(rho, dims, {true, false, true})),
                                 SystemLayout({fac[0], fac[2]}));
  DualityPair out;
  out.lhs = conditional_f_entropy(rho_ab, rho_ab.layout(), f, opts);
  out.rhs = negated(conditional_f_entropy(rho_ac, rho_ac.layout(), dual_k(f), opts));
  return out;
}

}  // namespace qfdiv
