#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "qfdiv/fkernel.hpp"
#include "qfdiv/linops.hpp"
#include "qfdiv/optimizer.hpp"

namespace qfdiv {

// Objective -sum_{y,t} f(mu_y/nu_t) |W_yt|^2 over tau = exp(H)/Tr exp(H), H
// block diagonal, with W = Phi^dagger X^{1/2} Psi. The analytic gradient uses
// divided differences of h_y(nu) = f(mu_y/nu) in the eigenbasis of tau and the
// logarithmic mean of its eigenvalues for the exponential map.
class TauObjective {
 public:
  TauObjective(const ComplexMatrix& x_half, const Spectrum& sz, const FDescriptor& f,
               std::vector<std::size_t> blocks)
      : f_(f), mu_(sz.eigenvalues), m_(sz.eigenvectors.adjoint() * x_half),
        blocks_(std::move(blocks)) {
    std::size_t off = 0;
    for (auto n : blocks_) {
      offsets_.push_back(off);
      off += n;
      param_count_ += n * n;
    }
    d_ = off;
  }

  std::size_t param_count() const { return param_count_; }

  struct Decomp {
    RealVector log_nu;  // log nu, shifted so the sum of nu is 1
    RealVector nu;
    std::vector<ComplexMatrix> vecs;  // per block
  };

  Decomp decompose(const RealVector& p) const {
    Decomp dec;
    dec.log_nu.resize(static_cast<Eigen::Index>(d_));
    std::size_t poff = 0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const std::size_t n = blocks_[b];
      const Spectrum s = eig_hermitian(hermitian_from_params(p, n, poff));
      poff += n * n;
      dec.log_nu.segment(static_cast<Eigen::Index>(offsets_[b]), static_cast<Eigen::Index>(n)) =
          s.eigenvalues;
      dec.vecs.push_back(s.eigenvectors);
    }
    const double top = dec.log_nu.maxCoeff();
    double z = 0.0;
    for (Eigen::Index i = 0; i < dec.log_nu.size(); ++i) z += std::exp(dec.log_nu(i) - top);
    dec.log_nu.array() -= top + std::log(z);
    dec.nu = dec.log_nu.array().exp();
    return dec;
  }

  ComplexMatrix tau(const RealVector& p) const {
    const Decomp dec = decompose(p);
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_));
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto o = static_cast<Eigen::Index>(offsets_[b]);
      const auto n = static_cast<Eigen::Index>(blocks_[b]);
      out.block(o, o, n, n) = dec.vecs[b] * dec.nu.segment(o, n).cast<Complex>().asDiagonal() *
                              dec.vecs[b].adjoint();
    }
    return hermitian_part(out);
  }

  double operator()(const RealVector& p, RealVector& grad) const {
    grad.setZero(p.size());
    const Decomp dec = decompose(p);
    const auto d = static_cast<Eigen::Index>(d_);
    ComplexMatrix w(m_.rows(), d);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto o = static_cast<Eigen::Index>(offsets_[b]);
      const auto n = static_cast<Eigen::Index>(blocks_[b]);
      w.middleCols(o, n) = m_.middleCols(o, n) * dec.vecs[b];
    }

    double value = 0.0;
    for (Eigen::Index y = 0; y < w.rows(); ++y) {
      for (Eigen::Index t = 0; t < d; ++t) {
        const double pw = std::norm(w(y, t));
        if (pw == 0.0) continue;
        const double fv = f_(mu_(y) / dec.nu(t));
        if (!std::isfinite(fv)) return std::numeric_limits<double>::infinity();
        value += fv * pw;
      }
    }

    // Within-block gradient with respect to tau in its eigenbasis.
    std::vector<ComplexMatrix> g_blocks;
    double c = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto o = static_cast<Eigen::Index>(offsets_[b]);
      const auto n = static_cast<Eigen::Index>(blocks_[b]);
      ComplexMatrix g = ComplexMatrix::Zero(n, n);
      for (Eigen::Index y = 0; y < w.rows(); ++y) {
        const double mu = mu_(y);
        for (Eigen::Index s = 0; s < n; ++s) {
          for (Eigen::Index t = s; t < n; ++t) {
            const double l = divided_difference(mu, dec.nu(o + s), dec.nu(o + t));
            const Complex term = l * std::conj(w(y, o + s)) * w(y, o + t);
            g(s, t) += term;
            if (t != s) g(t, s) += std::conj(term);
          }
        }
      }
      for (Eigen::Index s = 0; s < n; ++s) c += dec.nu(o + s) * g(s, s).real();
      g_blocks.push_back(std::move(g));
    }

    std::size_t poff = 0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto o = static_cast<Eigen::Index>(offsets_[b]);
      const auto n = static_cast<Eigen::Index>(blocks_[b]);
      ComplexMatrix gh(n, n);
      for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index t = 0; t < n; ++t) {
          const double k = log_mean(dec.nu(o + s), dec.nu(o + t), dec.log_nu(o + s), dec.log_nu(o + t));
          gh(s, t) = k * (g_blocks[b](s, t) - (s == t ? c : 0.0));
        }
      }
      const ComplexMatrix full = dec.vecs[b] * gh * dec.vecs[b].adjoint();
      hermitian_grad_to_params(full, grad, poff);
      poff += blocks_[b] * blocks_[b];
    }
    if (!grad.allFinite()) return std::numeric_limits<double>::infinity();
    grad = -grad;
    return -value;
  }

 private:
  double divided_difference(double mu, double a, double b) const {
    const double gap = std::abs(a - b);
    if (gap > 1e-6 * std::max(a, b)) {
      return (f_(mu / a) - f_(mu / b)) / (a - b);
    }
    const double m = 0.5 * (a + b);
    return -f_.derivative(mu / m) * mu / (m * m);
  }

  static double log_mean(double a, double b, double la, double lb) {
    const double delta = la - lb;
    if (std::abs(delta) < 1e-12) return 0.5 * (a + b);
    return b * std::expm1(delta) / delta;
  }

  const FDescriptor& f_;
  RealVector mu_;
  ComplexMatrix m_;
  std::vector<std::size_t> blocks_;
  std::vector<std::size_t> offsets_;
  std::size_t param_count_ = 0;
  std::size_t d_ = 0;
};

}  // namespace qfdiv
