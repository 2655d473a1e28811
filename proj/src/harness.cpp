#include "qfdiv/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "qfdiv/channels.hpp"
#include "qfdiv/errors.hpp"
#include "qfdiv/measures.hpp"
#include "qfdiv/quantity.hpp"

namespace qfdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kClosedSlack = 1e-9;
constexpr double kNumericSlack = 1e-6;
constexpr double kNestedSlack = 1e-4;
constexpr double kIsometrySlack = 1e-8;
constexpr double kZeroOrderSlack = 1e-10;
constexpr std::size_t kDefaultTrials = 50;
constexpr std::size_t kNegativeControlTrials = 500;

const std::vector<std::string> kDpiQuantities{
    "neg_log", "renyi:1/2", "renyi:3/4", "renyi:2", "renyi:3", "petz_renyi:1/2", "petz_renyi:2"};

class Digest {
 public:
  void add(const ComplexMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double parts[2] = {m(i, j).real(), m(i, j).imag()};
        h_ = fnv1a(parts, sizeof(parts), h_);
      }
    }
  }
  void add(const HermitianOperator& x) { add(x.matrix()); }
  void add(const ComplexVector& v) { add(ComplexMatrix(v)); }
  void add(const RealVector& v) { add(ComplexMatrix(v.cast<Complex>())); }
  void add(const QuantumChannel& ch) {
    for (const auto& k : ch.kraus()) add(k);
  }
  std::string hex() const { return digest_hex(h_); }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

// Runs the trials of one check and accumulates records into the report.
class Campaign {
 public:
  Campaign(std::string name, const CheckConfig& cfg, std::size_t default_trials)
      : cfg_(cfg) {
    report_.check_name = std::move(name);
    report_.seed = cfg.seed;
    report_.trials = cfg.trials.value_or(default_trials);
  }

  CheckReport& report() { return report_; }

  // Calls body(trial, seed, rng) for every trial. Exceptions become failed
  // records instead of aborting the campaign.
  void run(const std::function<void(std::size_t, std::uint64_t, std::mt19937_64&)>& body) {
    for (std::size_t t = 0; t < report_.trials; ++t) {
      trial_ = t;
      seed_ = trial_seed(cfg_.seed, report_.check_name, t);
      digest_ = Digest{};
      trial_failed_ = false;
      std::mt19937_64 rng(seed_);
      try {
        body(t, seed_, rng);
      } catch (const std::exception& e) {
        TrialRecord r = base("error");
        r.relation = "ge";
        r.lhs = ExtendedReal::neg_infinity();
        r.rhs = ExtendedReal::finite(0.0);
        r.violation = kInf;
        r.failed = true;
        r.error = e.what();
        push(std::move(r));
      }
      if (trial_failed_) ++report_.failures;
    }
  }

  Digest& digest() { return digest_; }

  bool rank_deficient(std::mt19937_64& rng) const {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg_.rank_deficient_fraction;
  }

  double slack_or(double fallback) const { return cfg_.slack.value_or(fallback); }

  void ge(const std::string& label, ExtendedReal lhs, ExtendedReal rhs, double slack) {
    TrialRecord r = base(label);
    r.relation = "ge";
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = slack;
    if (lhs.is_pos_infinity() || rhs.is_neg_infinity()) {
      r.violation = lhs == rhs ? 0.0 : -kInf;
    } else if (lhs.is_neg_infinity() || rhs.is_pos_infinity()) {
      r.violation = kInf;
    } else {
      const double a = lhs.value();
      const double b = rhs.value();
      r.violation = (b - a) / std::max({1.0, std::abs(a), std::abs(b)});
    }
    r.failed = r.violation > slack;
    push(std::move(r));
  }

  void eq(const std::string& label, ExtendedReal lhs, ExtendedReal rhs, double slack) {
    TrialRecord r = base(label);
    r.relation = "eq";
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = slack;
    if (!lhs.is_finite() || !rhs.is_finite()) {
      r.violation = lhs == rhs ? 0.0 : kInf;
    } else {
      const double a = lhs.value();
      const double b = rhs.value();
      r.violation = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
    }
    r.failed = r.violation > slack;
    push(std::move(r));
  }

  CheckReport finish() {
    report_.worst_violation = -kInf;
    for (const auto& r : report_.records) {
      report_.worst_violation = std::max(report_.worst_violation, r.violation);
    }
    return std::move(report_);
  }

 private:
  TrialRecord base(const std::string& label) const {
    TrialRecord r;
    r.trial = trial_;
    r.seed = seed_;
    r.label = label;
    r.input_digest = digest_.hex();
    return r;
  }

  void push(TrialRecord r) {
    trial_failed_ = trial_failed_ || r.failed;
    report_.records.push_back(std::move(r));
  }

  const CheckConfig& cfg_;
  CheckReport report_;
  std::size_t trial_ = 0;
  std::uint64_t seed_ = 0;
  Digest digest_;
  bool trial_failed_ = false;
};

ExtendedReal fin(double v) { return ExtendedReal::from_double(v); }

RngSeed sub_seed(std::mt19937_64& rng) { return RngSeed{rng()}; }

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Zeroes one eigenvalue chosen at random.
HermitianOperator drop_eigenvalue(const HermitianOperator& x, std::mt19937_64& rng) {
  Spectrum s = eig_hermitian(x);
  s.eigenvalues(static_cast<Eigen::Index>(pick(rng, x.dim()))) = 0.0;
  return HermitianOperator(hermitian_part(reconstruct(s)), x.layout());
}

// Conjugates X_AB by (P (x) I) with P a random projector of rank dA - 1, so
// that X_A is singular.
HermitianOperator singular_marginal(const HermitianOperator& x, std::size_t da, std::size_t db,
                                    std::mt19937_64& rng) {
  const ComplexMatrix u = random_unitary(da, sub_seed(rng));
  const ComplexMatrix keep = u.leftCols(static_cast<Eigen::Index>(da - 1));
  const ComplexMatrix p = kron(ComplexMatrix(keep * keep.adjoint()), identity(db));
  return HermitianOperator(hermitian_part(p * x.matrix() * p), x.layout());
}

std::vector<double> alphas_or(const CheckConfig& cfg, std::vector<double> fallback) {
  return cfg.alphas.empty() ? fallback : cfg.alphas;
}

std::vector<std::string> quantities_or(const CheckConfig& cfg, std::vector<std::string> fallback) {
  return cfg.quantities.empty() ? fallback : cfg.quantities;
}

std::string alpha_label(const std::string& prefix, double a) {
  std::ostringstream os;
  os.precision(6);
  os << prefix << a;
  return os.str();
}

struct ParsedQuantity {
  Quantity q;
  bool numeric = false;
};

std::vector<ParsedQuantity> parse_all(const std::vector<std::string>& specs, bool numeric) {
  std::vector<ParsedQuantity> out;
  for (const auto& s : specs) {
    ParsedQuantity p{parse_quantity(s), false};
    p.numeric = numeric && p.q.kernel().has_value() && p.q.kind != QuantityKind::ConvexPow;
    out.push_back(std::move(p));
  }
  return out;
}

ExtendedReal value_of(const ParsedQuantity& p, const HermitianOperator& x,
                      const HermitianOperator& y, const OptimizerOptions& opts) {
  return evaluate(p.q, x, y, opts, p.numeric).value;
}

double slack_for(const Campaign& c, const ParsedQuantity& p) {
  if (p.numeric || (p.q.kind == QuantityKind::InvPow && p.q.param <= -1.0)) {
    return c.slack_or(kNumericSlack);
  }
  return c.slack_or(kClosedSlack);
}

OptimizerOptions trial_options(const CheckConfig& cfg, std::uint64_t seed) {
  OptimizerOptions o = cfg.optimizer;
  o.seed = seed;
  return o;
}

const char* kLowerBoundNote =
    "numeric optimized values are lower bounds on suprema; differences of two lower bounds "
    "can misreport in either direction by the optimizer gap";

CheckReport partial_trace_campaign(const std::string& name, const CheckConfig& cfg,
                                   const std::vector<std::string>& specs,
                                   std::size_t default_trials, bool expect_violation) {
  Campaign c(name, cfg, default_trials);
  const auto qs = parse_all(specs, cfg.numeric);
  const std::size_t da = cfg.dim_a;
  const std::size_t db = cfg.dim_b;
  const SystemLayout layout = SystemLayout::bipartite(da, db);
  c.run([&](std::size_t, std::uint64_t seed, std::mt19937_64& rng) {
    HermitianOperator x(random_psd(da * db, sub_seed(rng)).matrix(), layout);
    HermitianOperator y(random_psd(da * db, sub_seed(rng)).matrix(), layout);
    bool singular_xa = false;
    if (c.rank_deficient(rng)) {
      // Numeric mode keeps Y invertible so that no epsilon limit is involved.
      const std::size_t mode = cfg.numeric ? pick(rng, 2) : pick(rng, 3);
      if (mode == 0) {
        x = drop_eigenvalue(x, rng);
      } else if (mode == 1 && da > 1) {
        x = singular_marginal(x, da, db, rng);
        singular_xa = true;
      } else {
        y = drop_eigenvalue(y, rng);
      }
    }
    c.digest().add(x);
    c.digest().add(y);
    const HermitianOperator xa(partial_trace(x.matrix(), {da, db}, {true, false}));
    const HermitianOperator ya(partial_trace(y.matrix(), {da, db}, {true, false}));
    const OptimizerOptions opts = trial_options(cfg, seed);
    for (const auto& p : qs) {
      c.ge(p.q.spec, value_of(p, x, y, opts), value_of(p, xa, ya, opts), slack_for(c, p));
    }
    if (singular_xa && !expect_violation) {
      // The kernel-extended recovery map sends X_A back to X_AB.
      const HermitianOperator back = apply(extended_petz_recovery(x, layout), xa);
      c.eq("extended_recovery", fin(max_abs(back.matrix() - x.matrix())), fin(0.0),
           c.slack_or(kClosedSlack));
    }
  });
  CheckReport r = c.finish();
  r.expect_violation = expect_violation;
  if (cfg.numeric) r.note = kLowerBoundNote;
  if (expect_violation) {
    r.note = "negative control: the quantity is outside its data-processing range, "
             "so violations are expected";
  }
  return r;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t trial_seed(std::uint64_t master, const std::string& check, std::size_t trial) {
  const std::uint64_t name = fnv1a(check.data(), check.size());
  return splitmix64(splitmix64(master ^ name) + static_cast<std::uint64_t>(trial));
}

CheckReport check_dpi_channel(const CheckConfig& cfg) {
  Campaign c("dpi_channel", cfg, kDefaultTrials);
  const auto qs = parse_all(quantities_or(cfg, kDpiQuantities), cfg.numeric);
  c.run([&](std::size_t, std::uint64_t seed, std::mt19937_64& rng) {
    HermitianOperator x = random_psd(cfg.din, sub_seed(rng));
    HermitianOperator y = random_psd(cfg.din, sub_seed(rng));
    if (c.rank_deficient(rng)) {
      const std::size_t mode = cfg.numeric ? 0 : pick(rng, 3);
      if (mode != 1) x = drop_eigenvalue(x, rng);
      if (mode != 0) y = drop_eigenvalue(y, rng);
    }
    const QuantumChannel ch = random_channel(cfg.din, cfg.dout, 0, sub_seed(rng));
    c.digest().add(x);
    c.digest().add(y);
    c.digest().add(ch);
    const HermitianOperator nx = apply(ch, x);
    const HermitianOperator ny = apply(ch, y);
    const OptimizerOptions opts = trial_options(cfg, seed);
    for (const auto& p : qs) {
      c.ge(p.q.spec, value_of(p, x, y, opts), value_of(p, nx, ny, opts), slack_for(c, p));
    }
  });
  CheckReport r = c.finish();
  if (cfg.numeric) r.note = kLowerBoundNote;
  return r;
}

CheckReport check_partial_trace(const CheckConfig& cfg) {
  return partial_trace_campaign("partial_trace", cfg, quantities_or(cfg, kDpiQuantities),
                                kDefaultTrials, false);
}

CheckReport check_isometric_invariance(const CheckConfig& cfg) {
  Campaign c("isometric_invariance", cfg, kDefaultTrials);
  // Embedded operators always have a kernel, so only closed forms are used:
  // the epsilon limit converges too slowly for an equality check.
  const auto qs = parse_all(quantities_or(cfg, kDpiQuantities), false);
  const std::size_t d = cfg.dim_a;
  c.run([&](std::size_t trial, std::uint64_t seed, std::mt19937_64& rng) {
    HermitianOperator x = random_psd(d, sub_seed(rng));
    HermitianOperator y = random_psd(d, sub_seed(rng));
    if (c.rank_deficient(rng)) x = drop_eigenvalue(x, rng);
    const std::size_t k = trial % 3;
    // k = 0: unitary; otherwise alternate coordinate embeddings and random isometries.
    Isometry v;
    if (k == 0) {
      v = Isometry(random_unitary(d, sub_seed(rng)));
    } else if (trial % 2 == 0) {
      v = embedding_isometry(d, d + k);
    } else {
      v = random_isometry(d, d + k, sub_seed(rng));
    }
    c.digest().add(x);
    c.digest().add(y);
    c.digest().add(v.matrix());
    const HermitianOperator vx = apply(v, x);
    const HermitianOperator vy = apply(v, y);
    const OptimizerOptions opts = trial_options(cfg, seed);
    for (const auto& p : qs) {
      c.eq(p.q.spec, value_of(p, x, y, opts), value_of(p, vx, vy, opts),
           c.slack_or(kIsometrySlack));
    }
  });
  return c.finish();
}

CheckReport check_recovery_chain(const CheckConfig& cfg) {
  Campaign c("recovery_chain", cfg, kDefaultTrials);
  std::vector<std::string> specs = quantities_or(
      cfg, {"neg_log", "renyi:1/2", "renyi:3/4", "renyi:2", "renyi:3", "neg_pow:1/2",
            "inv_pow:-1/2", "inv_pow:-1", "convex_pow:1", "convex_pow:3/2", "convex_pow:2"});
  std::vector<FDescriptor> kernels;
  for (const auto& s : specs) kernels.push_back(parse_f_spec(s));
  const std::size_t da = cfg.dim_a;
  const std::size_t db = cfg.dim_b;
  const SystemLayout layout = SystemLayout::bipartite(da, db);
  c.run([&](std::size_t trial, std::uint64_t, std::mt19937_64& rng) {
    const HermitianOperator x(random_density(da * db, sub_seed(rng)).matrix(), layout);
    const HermitianOperator y(random_density(da * db, sub_seed(rng)).matrix(), layout);
    const HermitianOperator xa(partial_trace(x.matrix(), {da, db}, {true, false}));
    const HermitianOperator ya(partial_trace(y.matrix(), {da, db}, {true, false}));
    // Every fourth trial uses the normalized marginal as omega_A.
    const HermitianOperator omega =
        trial % 4 == 0 ? HermitianOperator(xa.matrix() / xa.trace())
                       : random_density(da, sub_seed(rng));
    c.digest().add(x);
    c.digest().add(y);
    c.digest().add(omega);
    const HermitianOperator tau = apply(petz_recovery(x, layout), omega);
    const double s = c.slack_or(kClosedSlack);
    for (std::size_t i = 0; i < kernels.size(); ++i) {
      c.ge(specs[i], fin(optimized_f_at(x, y, tau, kernels[i])),
           fin(optimized_f_at(xa, ya, omega, kernels[i])), s);
    }
    c.ge("alpha_chain:3/2", fin(optimized_alpha_divergence_at(x, y, tau, 1.5)),
         fin(optimized_alpha_divergence_at(xa, ya, omega, 1.5)), s);
  });
  return c.finish();
}

CheckReport check_dominating(const CheckConfig& cfg) {
  Campaign c("dominating", cfg, kDefaultTrials);
  const auto qs = parse_all(
      quantities_or(cfg, {"neg_log", "renyi:1/2", "renyi:3/4", "renyi:2", "renyi:3", "neg_pow:1/2",
                          "inv_pow:-1/2", "petz_renyi:0", "petz_renyi:1/2", "petz_renyi:2"}),
      cfg.numeric);
  const std::size_t d = cfg.din;
  c.run([&](std::size_t, std::uint64_t seed, std::mt19937_64& rng) {
    HermitianOperator x = random_psd(d, sub_seed(rng));
    HermitianOperator y1 = random_psd(d, sub_seed(rng));
    HermitianOperator gap = random_psd(d, sub_seed(rng));
    if (c.rank_deficient(rng)) {
      x = drop_eigenvalue(x, rng);
      if (!cfg.numeric) y1 = drop_eigenvalue(y1, rng);
      gap = drop_eigenvalue(gap, rng);
    }
    const double scale = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const HermitianOperator y2(y1.matrix() + scale * gap.matrix());
    c.digest().add(x);
    c.digest().add(y1);
    c.digest().add(y2);
    const OptimizerOptions opts = trial_options(cfg, seed);
    for (const auto& p : qs) {
      c.ge(p.q.spec, value_of(p, x, y1, opts), value_of(p, x, y2, opts), slack_for(c, p));
    }
  });
  CheckReport r = c.finish();
  if (cfg.numeric) r.note = kLowerBoundNote;
  return r;
}

CheckReport check_sandwich_petz(const CheckConfig& cfg) {
  Campaign c("sandwich_petz", cfg, kDefaultTrials);
  const auto alphas = alphas_or(cfg, {0.5, 0.75, 2.0, 3.0});
  const std::size_t d = cfg.din;
  c.run([&](std::size_t, std::uint64_t, std::mt19937_64& rng) {
    HermitianOperator x = random_psd(d, sub_seed(rng));
    HermitianOperator y = random_psd(d, sub_seed(rng));
    bool full_rank = true;
    if (c.rank_deficient(rng)) {
      full_rank = false;
      if (pick(rng, 2) == 0) {
        x = drop_eigenvalue(x, rng);
      } else {
        y = drop_eigenvalue(y, rng);
      }
    }
    c.digest().add(x);
    c.digest().add(y);
    const double s = c.slack_or(kClosedSlack);
    for (double a : alphas) {
      const GapPair g = sandwiched_vs_petz_gap(x, y, a);
      c.ge(alpha_label("alpha:", a), g.lhs, g.rhs, s);
      if (full_rank && g.rhs.is_finite()) {
        // tau = X / Tr X attains the right-hand side.
        const HermitianOperator xbar(x.matrix() / x.trace());
        const double q = optimized_f_at(x, y, xbar, renyi_f(a));
        c.eq(alpha_label("witness:", a), fin(a / (a - 1.0) * std::log(std::abs(q))), g.rhs, s);
      }
    }
  });
  return c.finish();
}

CheckReport check_duality(const CheckConfig& cfg) {
  Campaign c("duality", cfg, kDefaultTrials);
  const auto alphas = alphas_or(cfg, {2.0, 3.0});
  const SystemLayout layout({{"A", 2}, {"B", 2}, {"C", 2}});
  c.run([&](std::size_t trial, std::uint64_t seed, std::mt19937_64& rng) {
    ComplexVector psi;
    if (trial == 0) {
      // Bell state on AB times |0> on C.
      ComplexVector bell = ComplexVector::Zero(4);
      bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
      ComplexVector zero = ComplexVector::Zero(2);
      zero(0) = 1.0;
      psi = kron(bell, zero);
    } else {
      psi = random_pure(8, sub_seed(rng)).amplitudes;
    }
    c.digest().add(psi);
    MeasureOptions mo;
    mo.inner = trial_options(cfg, seed);
    mo.seed = seed;
    const PureStateVector state{psi, layout, true};
    for (double a : alphas) {
      const DualityPair pair = duality_pair(state, renyi_f(a), mo);
      c.eq(alpha_label("alpha:", a), pair.lhs.value, pair.rhs.value, c.slack_or(kNestedSlack));
    }
  });
  return c.finish();
}

namespace {

const std::vector<std::string> kReductionKernels{"neg_log", "renyi:1/2", "renyi:3/4", "renyi:2",
                                                 "renyi:3", "neg_pow:1/2", "inv_pow:-1/2"};

}  // namespace

CheckReport check_classical_reduction(const CheckConfig& cfg) {
  Campaign c("classical_reduction", cfg, kDefaultTrials);
  const auto specs = quantities_or(cfg, kReductionKernels);
  std::vector<FDescriptor> kernels;
  for (const auto& s : specs) kernels.push_back(parse_f_spec(s));
  const std::size_t n = cfg.din;
  c.run([&](std::size_t, std::uint64_t seed, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    RealVector lambda(static_cast<Eigen::Index>(n));
    RealVector mu(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      lambda(static_cast<Eigen::Index>(i)) = expo(rng);
      mu(static_cast<Eigen::Index>(i)) = expo(rng);
    }
    if (c.rank_deficient(rng)) {
      if (pick(rng, 2) == 0) {
        lambda(static_cast<Eigen::Index>(pick(rng, n))) = 0.0;
      } else {
        mu(static_cast<Eigen::Index>(pick(rng, n))) = 0.0;
      }
    }
    lambda /= lambda.sum();
    mu /= mu.sum();
    c.digest().add(lambda);
    c.digest().add(mu);
    const HermitianOperator x(lambda.cast<Complex>().asDiagonal().toDenseMatrix());
    const HermitianOperator y(mu.cast<Complex>().asDiagonal().toDenseMatrix());
    const OptimizerOptions opts = trial_options(cfg, seed);
    for (std::size_t i = 0; i < kernels.size(); ++i) {
      c.eq(specs[i], classical_f_divergence(lambda, mu, kernels[i], opts).value,
           optimized_f_divergence(x, y, kernels[i], opts).value, c.slack_or(kNumericSlack));
    }
  });
  return c.finish();
}

CheckReport check_cq_reduction(const CheckConfig& cfg) {
  Campaign c("cq_reduction", cfg, kDefaultTrials);
  const auto specs = quantities_or(cfg, kReductionKernels);
  std::vector<FDescriptor> kernels;
  for (const auto& s : specs) kernels.push_back(parse_f_spec(s));
  const std::size_t d = cfg.dim_b;
  c.run([&](std::size_t, std::uint64_t seed, std::mt19937_64& rng) {
    std::vector<CqBlock> blocks;
    const bool deficient = c.rank_deficient(rng);
    const std::size_t which = pick(rng, 2);
    for (std::size_t z = 0; z < 2; ++z) {
      HermitianOperator bx = random_psd(d, sub_seed(rng));
      const HermitianOperator by = random_psd(d, sub_seed(rng));
      if (deficient && z == which) bx = drop_eigenvalue(bx, rng);
      c.digest().add(bx);
      c.digest().add(by);
      blocks.push_back({bx, by});
    }
    const auto [x, y] = assemble_blocks(blocks);
    const OptimizerOptions opts = trial_options(cfg, seed);
    for (std::size_t i = 0; i < kernels.size(); ++i) {
      c.eq(specs[i], cq_f_divergence(blocks, kernels[i], opts).value,
           optimized_f_divergence(x, y, kernels[i], opts).value, c.slack_or(kNumericSlack));
    }
  });
  return c.finish();
}

CheckReport check_petz_renyi_dpi(const CheckConfig& cfg) {
  Campaign c("petz_renyi_dpi", cfg, kDefaultTrials);
  const auto alphas = alphas_or(cfg, {0.0, 0.25, 0.5, 0.75, 1.5, 2.0});
  const std::size_t da = cfg.dim_a;
  const std::size_t db = cfg.dim_b;
  c.run([&](std::size_t, std::uint64_t, std::mt19937_64& rng) {
    HermitianOperator x = random_psd(cfg.din, sub_seed(rng));
    HermitianOperator y = random_psd(cfg.din, sub_seed(rng));
    HermitianOperator xab = random_psd(da * db, sub_seed(rng));
    HermitianOperator yab = random_psd(da * db, sub_seed(rng));
    if (c.rank_deficient(rng)) {
      x = drop_eigenvalue(x, rng);
      xab = drop_eigenvalue(xab, rng);
    }
    const QuantumChannel ch = random_channel(cfg.din, cfg.dout, 0, sub_seed(rng));
    c.digest().add(x);
    c.digest().add(y);
    c.digest().add(xab);
    c.digest().add(yab);
    c.digest().add(ch);
    const HermitianOperator nx = apply(ch, x);
    const HermitianOperator ny = apply(ch, y);
    const HermitianOperator xa(partial_trace(xab.matrix(), {da, db}, {true, false}));
    const HermitianOperator ya(partial_trace(yab.matrix(), {da, db}, {true, false}));
    const double s = c.slack_or(kClosedSlack);
    for (double a : alphas) {
      c.ge(alpha_label("channel:", a), petz_renyi(x, y, a), petz_renyi(nx, ny, a), s);
      c.ge(alpha_label("partial_trace:", a), petz_renyi(xab, yab, a), petz_renyi(xa, ya, a), s);
    }
  });
  return c.finish();
}

CheckReport check_reversed_monotonicity(const CheckConfig& cfg) {
  Campaign c("reversed_monotonicity", cfg, kDefaultTrials);
  const auto alphas = alphas_or(cfg, {-1.0, -0.75, -0.5, -0.25});
  const std::size_t da = cfg.dim_a;
  const std::size_t db = cfg.dim_b;
  // Reversed orders need positive definite inputs, so no rank-deficient trials.
  c.run([&](std::size_t, std::uint64_t, std::mt19937_64& rng) {
    const HermitianOperator x = random_density(da * db, sub_seed(rng));
    const HermitianOperator y = random_density(da * db, sub_seed(rng));
    c.digest().add(x);
    c.digest().add(y);
    const HermitianOperator xa(partial_trace(x.matrix(), {da, db}, {true, false}));
    const HermitianOperator ya(partial_trace(y.matrix(), {da, db}, {true, false}));
    const double s = c.slack_or(kClosedSlack);
    for (double a : alphas) {
      c.ge(alpha_label("alpha:", a), petz_renyi(xa, ya, a), petz_renyi(x, y, a), s);
    }
    const double s0 = c.slack_or(kZeroOrderSlack);
    const ExtendedReal d0 = petz_renyi(x, y, 0.0);
    c.eq("alpha:0", petz_renyi(xa, ya, 0.0), d0, s0);
    c.eq("alpha:0:-log_tr_y", d0, fin(-std::log(y.trace())), s0);
  });
  return c.finish();
}

CheckReport check_negative_control(const CheckConfig& cfg) {
  CheckConfig local = cfg;
  local.numeric = false;
  return partial_trace_campaign("negative_control", local,
                                quantities_or(cfg, {"sandwiched:0.3"}), kNegativeControlTrials,
                                true);
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "dpi_channel",  "partial_trace",         "isometric_invariance",
      "recovery_chain", "dominating",          "sandwich_petz",
      "duality",      "classical_reduction",   "cq_reduction",
      "petz_renyi_dpi", "reversed_monotonicity", "negative_control"};
  return names;
}

CheckReport run_check(const std::string& name, const CheckConfig& cfg) {
  static const std::vector<std::pair<std::string, CheckReport (*)(const CheckConfig&)>> table{
      {"dpi_channel", check_dpi_channel},
      {"partial_trace", check_partial_trace},
      {"isometric_invariance", check_isometric_invariance},
      {"recovery_chain", check_recovery_chain},
      {"dominating", check_dominating},
      {"sandwich_petz", check_sandwich_petz},
      {"duality", check_duality},
      {"classical_reduction", check_classical_reduction},
      {"cq_reduction", check_cq_reduction},
      {"petz_renyi_dpi", check_petz_renyi_dpi},
      {"reversed_monotonicity", check_reversed_monotonicity},
      {"negative_control", check_negative_control},
  };
  for (const auto& [n, fn] : table) {
    if (n == name) return fn(cfg);
  }
  throw ArgumentError("unknown check '" + name + "'");
}

std::vector<CheckReport> run_all(const CheckConfig& cfg) {
  std::vector<CheckReport> out;
  for (const auto& name : check_names()) {
    if (name == "negative_control") continue;
    out.push_back(run_check(name, cfg));
  }
  return out;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ojson number(const ExtendedReal& v) {
  if (v.is_pos_infinity()) return "inf";
  if (v.is_neg_infinity()) return "-inf";
  return v.value();
}

ojson summary_object(const CheckReport& r) {
  ojson j;
  j["schema"] = 1;
  j["type"] = "summary";
  j["check"] = r.check_name;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["records"] = r.records.size();
  j["failures"] = r.failures;
  j["worst_violation"] = number(r.worst_violation);
  j["expect_violation"] = r.expect_violation;
  j["passed"] = r.passed();
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

}  // namespace

void write_jsonl(std::ostream& os, const std::vector<CheckReport>& reports) {
  for (const auto& r : reports) {
    for (const auto& t : r.records) {
      ojson j;
      j["schema"] = 1;
      j["type"] = "trial";
      j["check"] = r.check_name;
      j["trial"] = t.trial;
      j["seed"] = t.seed;
      j["label"] = t.label;
      j["input_digest"] = t.input_digest;
      j["relation"] = t.relation;
      j["lhs"] = number(t.lhs);
      j["rhs"] = number(t.rhs);
      j["slack"] = t.slack;
      j["violation"] = number(t.violation);
      j["failed"] = t.failed;
      if (!t.error.empty()) j["error"] = t.error;
      os << j.dump() << '\n';
    }
    os << summary_object(r).dump() << '\n';
  }
}

std::string summary_json(const std::vector<CheckReport>& reports) {
  ojson j;
  j["schema"] = 1;
  ojson checks = ojson::array();
  bool all = true;
  for (const auto& r : reports) {
    checks.push_back(summary_object(r));
    all = all && r.passed();
  }
  j["checks"] = checks;
  j["passed"] = all;
  return j.dump();
}

}  // namespace qfdiv
