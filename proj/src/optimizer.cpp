#include "qfdiv/optimizer.hpp"

#include <cmath>
#include <deque>
#include <random>

#include "qfdiv/errors.hpp"

namespace qfdiv {

LbfgsResult minimize_lbfgs(const Objective& fn, const RealVector& x0,
                           const LbfgsOptions& opts) {
  LbfgsResult res;
  res.x = x0;
  RealVector g(x0.size());
  res.value = fn(res.x, g);
  if (!std::isfinite(res.value)) {
    throw DomainError("optimizer start point is outside the objective's domain");
  }
  if (x0.size() == 0) {
    res.converged = true;
    return res;
  }

  std::deque<RealVector> s_hist, y_hist;
  std::deque<double> rho_hist;
  RealVector x_new(x0.size()), g_new(x0.size());
  int stalled = 0;

  for (res.iterations = 0; res.iterations < opts.max_iters; ++res.iterations) {
    res.grad_norm = g.cwiseAbs().maxCoeff();
    if (res.grad_norm <= opts.grad_tol) {
      res.converged = true;
      break;
    }

    // Two-loop recursion.
    RealVector q = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    } else {
      q *= std::min(1.0, 1.0 / g.norm());
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    RealVector dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -g * std::min(1.0, 1.0 / g.norm());
      slope = g.dot(dir);
    }

    if (opts.max_step > 0.0) {
      const double len = dir.cwiseAbs().maxCoeff();
      if (len > opts.max_step) {
        dir *= opts.max_step / len;
        slope = g.dot(dir);
      }
    }

    double t = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = res.x + t * dir;
      f_new = fn(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.value + opts.armijo_c1 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!s_hist.empty()) {
        // Retry from steepest descent before giving up.
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      break;
    }

    RealVector s = x_new - res.x;
    RealVector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double prev = res.value;
    res.x = x_new;
    g = g_new;
    res.value = f_new;
    stalled = (prev - f_new <= 1e-15 * std::max(1.0, std::abs(prev))) ? stalled + 1 : 0;
    if (stalled >= 10) break;
  }
  res.grad_norm = g.cwiseAbs().maxCoeff();
  if (res.grad_norm <= opts.grad_tol) res.converged = true;
  return res;
}

LbfgsResult minimize_newton(const Objective& fn, const RealVector& x0,
                            const LbfgsOptions& opts) {
  const Eigen::Index n = x0.size();
  LbfgsResult res;
  res.x = x0;
  RealVector g(n), g_new(n), gp(n), gm(n);
  res.value = fn(res.x, g);
  if (!std::isfinite(res.value)) {
    throw DomainError("optimizer start point is outside the objective's domain");
  }
  Eigen::MatrixXd hess(n, n);
  for (res.iterations = 0; res.iterations < opts.max_iters; ++res.iterations) {
    res.grad_norm = n == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
    if (res.grad_norm <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(res.x(i)));
      RealVector probe = res.x;
      probe(i) += h;
      const double up = fn(probe, gp);
      probe(i) = res.x(i) - h;
      const double down = fn(probe, gm);
      if (!std::isfinite(up) || !std::isfinite(down)) return res;
      hess.col(i) = (gp - gm) / (2.0 * h);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    const RealVector curv = es.eigenvalues().cwiseAbs().cwiseMax(1e-12 * std::max(top, 1e-300));
    const RealVector dir =
        -es.eigenvectors() * (es.eigenvectors().transpose() * g).cwiseQuotient(curv);
    const double slope = g.dot(dir);
    if (!(slope < 0.0)) break;
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      const RealVector x_new = res.x + t * dir;
      const double f_new = fn(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.value + opts.armijo_c1 * t * slope) {
        res.x = x_new;
        res.value = f_new;
        g = g_new;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  res.grad_norm = n == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
  if (res.grad_norm <= opts.grad_tol) res.converged = true;
  return res;
}

Objective with_finite_differences(std::function<double(const RealVector&)> fn, double h) {
  return [fn = std::move(fn), h](const RealVector& x, RealVector& grad) {
    const double v = fn(x);
    grad.resize(x.size());
    if (!std::isfinite(v)) {
      grad.setZero();
      return v;
    }
    RealVector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      probe(i) = x(i) + h;
      const double up = fn(probe);
      probe(i) = x(i) - h;
      const double down = fn(probe);
      probe(i) = x(i);
      grad(i) = (up - down) / (2.0 * h);
    }
    return v;
  };
}

std::size_t hermitian_param_count(std::size_t n) { return n * n; }

ComplexMatrix hermitian_from_params(const RealVector& p, std::size_t n, std::size_t offset) {
  const auto m = static_cast<Eigen::Index>(n);
  ComplexMatrix h = ComplexMatrix::Zero(m, m);
  auto k = static_cast<Eigen::Index>(offset);
  for (Eigen::Index s = 0; s < m; ++s) h(s, s) = p(k++);
  for (Eigen::Index s = 0; s < m; ++s) {
    for (Eigen::Index t = s + 1; t < m; ++t) {
      const Complex z(p(k), p(k + 1));
      k += 2;
      h(s, t) = z;
      h(t, s) = std::conj(z);
    }
  }
  return h;
}

RealVector params_from_hermitian(const ComplexMatrix& h) {
  const auto m = h.rows();
  RealVector p(m * m);
  Eigen::Index k = 0;
  for (Eigen::Index s = 0; s < m; ++s) p(k++) = h(s, s).real();
  for (Eigen::Index s = 0; s < m; ++s) {
    for (Eigen::Index t = s + 1; t < m; ++t) {
      p(k++) = h(s, t).real();
      p(k++) = h(s, t).imag();
    }
  }
  return p;
}

void hermitian_grad_to_params(const ComplexMatrix& g, RealVector& out, std::size_t offset) {
  const auto m = g.rows();
  auto k = static_cast<Eigen::Index>(offset);
  for (Eigen::Index s = 0; s < m; ++s) out(k++) = g(s, s).real();
  for (Eigen::Index s = 0; s < m; ++s) {
    for (Eigen::Index t = s + 1; t < m; ++t) {
      // H_st = a + ib, H_ts = a - ib.
      out(k++) = 2.0 * g(t, s).real();
      out(k++) = 2.0 * g(s, t).imag();
    }
  }
}

ComplexMatrix density_from_hermitian(const ComplexMatrix& h) {
  const Spectrum s = eig_hermitian(h);
  const double top = s.eigenvalues.maxCoeff();
  ComplexMatrix rho = spectral_apply(s, [top](double a) { return std::exp(a - top); });
  return hermitian_part(rho / rho.trace().real());
}

ComplexMatrix hermitian_from_density(const ComplexMatrix& rho) {
  const Spectrum s = eig_hermitian(rho);
  if (!(s.eigenvalues(0) > 0.0)) {
    throw DomainError("hermitian_from_density needs a positive definite input");
  }
  return spectral_apply(s, [](double x) { return std::log(x); });
}

RealVector random_params(std::size_t n, double scale, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, scale);
  RealVector p(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = normal(gen);
  return p;
}

}  // namespace qfdiv
