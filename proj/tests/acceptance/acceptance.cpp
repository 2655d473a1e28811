// Acceptance suite: one PASS/FAIL line per criterion. Usage: acceptance <path-to-qdiv>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "qfdiv/channels.hpp"
#include "qfdiv/divergences.hpp"
#include "qfdiv/harness.hpp"
#include "qfdiv/io.hpp"
#include "qfdiv/measures.hpp"

using namespace qfdiv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

HermitianOperator rank_state(std::size_t d, std::size_t r, std::uint64_t seed) {
  const ComplexMatrix g = random_gaussian(d, r, {seed});
  const ComplexMatrix m = g * g.adjoint();
  return HermitianOperator(m / m.trace().real());
}

// X_AB whose A marginal has a one-dimensional kernel in a random direction.
HermitianOperator deficient_ab(std::size_t da, std::size_t db, std::uint64_t seed) {
  const std::size_t dk = (da - 1) * db;
  const ComplexMatrix g = random_gaussian(dk, dk, {seed});
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(da * db), static_cast<Eigen::Index>(da * db));
  m.topLeftCorner(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk)) = g * g.adjoint();
  const ComplexMatrix u = kron(random_unitary(da, {seed ^ 0x5bd1e995ULL}), identity(db));
  return HermitianOperator(u * (m / m.trace().real()) * u.adjoint(), SystemLayout::bipartite(da, db));
}

std::string summarize(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (i) os << ", ";
    os << r.check_name << " " << r.failures << "/" << r.trials;
  }
  return os.str();
}

Outcome closed_forms() {
  const FDescriptor nl = make_builtin(BuiltinFamily::neg_log());
  const double alphas[] = {0.5, 0.75, 2.0, 3.0};
  double worst = 0.0, worst_witness = 0.0;
  bool ok = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t d = 2 + s % 3;
    const HermitianOperator x = s % 4 == 3 ? rank_state(d, d - 1, 1000 + s) : random_density(d, {1000 + s});
    const HermitianOperator y = random_density(d, {5000 + s});
    const double qre = quantum_relative_entropy(x, y).value();
    const auto rn = optimized_f_divergence(x, y, nl);
    const double g = rel_gap(rn.value.value(), qre);
    worst = std::max(worst, g);
    ok = ok && g <= 1e-6;
    for (double a : alphas) {
      const double closed = sandwiched_quasi(x, y, a).value();
      const auto r = optimized_f_divergence(x, y, renyi_f(a));
      const double ga = rel_gap(r.value.value(), closed);
      worst = std::max(worst, ga);
      ok = ok && ga <= 1e-6;
      HermitianOperator t = holder_optimal_tau(x, y, a, 1e-8);
      if (eig_hermitian(t).eigenvalues(0) <= 0.0) {
        // tau* inherits ker X, where the purification has no weight.
        t = HermitianOperator((1 - 1e-14) * t.matrix() + 1e-14 / static_cast<double>(d) * identity(d));
      }
      const double gw = rel_gap(optimized_f_at(x, y, t, renyi_f(a)), closed);
      worst_witness = std::max(worst_witness, gw);
      ok = ok && gw <= 1e-8;
    }
  }
  return {ok, "worst optimizer gap " + fmt(worst) + " (tol 1e-6), worst witness gap " + fmt(worst_witness) +
                  " (tol 1e-8), 50 pairs"};
}

Outcome path_equivalence() {
  const std::vector<FDescriptor> ks = {make_builtin(BuiltinFamily::neg_log()),
                                       make_builtin(BuiltinFamily::neg_power(0.5)),
                                       make_builtin(BuiltinFamily::inv_power(-1.0)), renyi_f(0.75), renyi_f(3.0)};
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t d = 2 + s % 3;
    const HermitianOperator x = s % 5 == 0 ? rank_state(d, 1, 7000 + s) : random_psd(d, {7000 + s});
    const HermitianOperator z = random_psd(d, {8000 + s});
    const HermitianOperator t = random_density(d, {9000 + s});
    const FDescriptor& f = ks[s % ks.size()];
    const double a = optimized_f_at(x, z, t, f, EvalPath::Tensor);
    const double b = optimized_f_at(x, z, t, f, EvalPath::Spectral);
    const double c = optimized_f_at(x, z, t, f, EvalPath::RelativeModular);
    worst = std::max({worst, rel_gap(a, b), rel_gap(a, c), rel_gap(b, c)});
  }
  return {worst <= 1e-8, "worst pairwise gap " + fmt(worst) + " over 100 triples (tol 1e-8)"};
}

Outcome dpi_campaign() {
  CheckConfig cfg;
  cfg.seed = 0;
  const std::vector<CheckReport> reports = {check_dpi_channel(cfg), check_partial_trace(cfg),
                                            check_isometric_invariance(cfg)};
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.passed() && r.trials == 50;
  return {ok, summarize(reports) + " failing trials"};
}

Outcome negative_control() {
  const CheckReport r = check_negative_control(CheckConfig{});
  return {r.passed(), std::to_string(r.failures) + "/" + std::to_string(r.trials) +
                          " trials violate monotonicity for sandwiched order 0.3"};
}

Outcome structural() {
  double trick = 0.0, recovery = 0.0, iso = 0.0, transport = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t d = 2 + s % 3;
    const ComplexMatrix z = random_gaussian(d, d, {100 + s});
    const ComplexMatrix w = random_gaussian(d, d, {200 + s});
    const ComplexVector g = max_entangled_vector(d).amplitudes;
    trick = std::max(trick, max_abs(kron(z, identity(d)) * g - kron(identity(d), ComplexMatrix(z.transpose())) * g));
    const Complex lhs = g.dot(kron(z, w) * g);
    trick = std::max(trick, std::abs(lhs - (z.transpose() * w).trace()));
    // Hermitian Z through the library transpose.
    const HermitianOperator h(z + z.adjoint());
    const ComplexMatrix ht = transpose_in_basis(h).matrix();
    trick = std::max(trick, max_abs(kron(h.matrix(), identity(d)) * g - kron(identity(d), ht) * g));
  }
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t da = 2 + s % 2, db = 2 + (s / 2) % 2;
    const HermitianOperator xab = random_psd(da * db, {300 + s}).with_layout(SystemLayout::bipartite(da, db));
    const HermitianOperator xa = partial_trace(xab, xab.layout(), {"A"});
    recovery = std::max(recovery, max_abs(apply(petz_recovery(xab, xab.layout()), xa).matrix() - xab.matrix()));

    const HermitianOperator dab = deficient_ab(da, db, 400 + s);
    const Isometry v = extended_petz_isometry(dab, dab.layout());
    iso = std::max(iso, max_abs(v.matrix().adjoint() * v.matrix() - identity(da)));
    const HermitianOperator dxa = partial_trace(dab, dab.layout(), {"A"});
    const ComplexVector out = kron(v.matrix(), identity(da)) * canonical_purification(dxa).amplitudes;
    const ComplexVector pab = canonical_purification(dab).amplitudes;
    const std::size_t dc = db + da, de = 1 + da * db;
    ComplexVector expect = ComplexVector::Zero(out.size());
    for (std::size_t a = 0; a < da; ++a)
      for (std::size_t b = 0; b < db; ++b)
        for (std::size_t ah = 0; ah < da; ++ah)
          for (std::size_t bh = 0; bh < db; ++bh) {
            const std::size_t row = (((a * db + b) * dc + bh) * de) * da + ah;
            expect(static_cast<Eigen::Index>(row)) = pab(static_cast<Eigen::Index>((a * db + b) * da * db + ah * db + bh));
          }
    transport = std::max(transport, max_abs(out - expect));
  }
  const bool ok = trick <= 1e-10 && recovery <= 1e-9 && iso <= 1e-9 && transport <= 1e-9;
  return {ok, "transpose/Gamma " + fmt(trick) + ", perfect recovery " + fmt(recovery) + ", V^dagger V - I " +
                  fmt(iso) + ", transport " + fmt(transport)};
}

Outcome inequalities() {
  CheckConfig cfg;
  const std::vector<CheckReport> reports = {check_dominating(cfg), check_sandwich_petz(cfg),
                                            check_reversed_monotonicity(cfg)};
  bool ok = true;
  std::size_t d0 = 0, witnesses = 0;
  for (const auto& r : reports) {
    ok = ok && r.passed() && r.trials == 50;
    for (const auto& rec : r.records) {
      if (rec.label.rfind("alpha:0", 0) == 0 && rec.relation == "eq") {
        ++d0;
        ok = ok && rec.slack <= 1e-10;
      }
      if (rec.label.rfind("witness", 0) == 0) ++witnesses;
    }
  }
  ok = ok && d0 > 0 && witnesses > 0;
  return {ok, summarize(reports) + " failing trials; " + std::to_string(d0) + " D_0 and " +
                  std::to_string(witnesses) + " tau = X/Tr X equality records"};
}

Outcome reductions() {
  CheckConfig cfg;
  cfg.trials = 25;
  const std::vector<CheckReport> reports = {check_classical_reduction(cfg), check_cq_reduction(cfg)};
  bool ok = true;
  double worst = 0.0;
  for (const auto& r : reports) {
    ok = ok && r.passed() && r.trials == 25;
    worst = std::max(worst, r.worst_violation);
    for (const auto& rec : r.records) ok = ok && rec.slack <= 1e-6;
  }
  return {ok, summarize(reports) + " failing instances, worst gap " + fmt(worst) + " (tol 1e-6)"};
}

Outcome measures() {
  const FDescriptor nl = make_builtin(BuiltinFamily::neg_log());
  ComplexVector b = ComplexVector::Zero(4);
  b(0) = b(3) = 1.0 / std::sqrt(2.0);
  const HermitianOperator bell(b * b.adjoint(), SystemLayout::bipartite(2, 2));
  const double ln2 = std::log(2.0);
  const double mi = f_mutual_information(bell, bell.layout(), nl).value.value();
  const double ce = conditional_f_entropy(bell, bell.layout(), nl).value.value();
  bool ok = std::abs(mi - 2 * ln2) <= 1e-4 && std::abs(ce + ln2) <= 1e-4;
  double worst = 0.0;
  const SystemLayout abc({{"A", 2}, {"B", 2}, {"C", 2}});
  for (std::uint64_t s = 0; s < 20; ++s) {
    PureStateVector psi = random_pure(8, {600 + s});
    psi.layout = abc;
    for (double a : {2.0, 3.0}) {
      const DualityPair p = duality_pair(psi, renyi_f(a));
      worst = std::max(worst, std::abs(p.lhs.value.value() - p.rhs.value.value()));
    }
  }
  ok = ok && worst <= 1e-4;
  return {ok, "Bell I = " + fmt(mi, 10) + ", S(A|B) = " + fmt(ce, 10) + ", worst duality residual " + fmt(worst) +
                  " over 20 states x 2 orders"};
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

Outcome cli(const std::string& qdiv) {
  const fs::path dir = fs::temp_directory_path() / ("qdiv_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string q = "'" + qdiv + "'";
  bool ok = true;
  std::string detail;

  struct Gen {
    const char* args;
    const char* name;
  };
  const Gen gens[] = {{"state --dims 2,3 --seed 11", "state.json"},
                      {"psd --dim 4 --rank 2 --seed 12", "psd.json"},
                      {"pure --dims 2,2,2 --labels A,B,C --seed 13", "pure.json"},
                      {"channel --din 3 --dout 2 --seed 14", "channel.json"}};
  std::size_t round_trips = 0;
  for (const auto& g : gens) {
    const fs::path file = dir / g.name;
    if (run(q + " gen " + g.args + " --out '" + file.string() + "' > /dev/null") != 0) {
      ok = false;
      continue;
    }
    std::string text = read_text_file(file.string());
    while (!text.empty() && text.back() == '\n') text.pop_back();
    std::string once, twice;
    const std::string kind = g.name;
    if (kind == "pure.json") {
      once = serialize_pure_state(parse_pure_state(text));
      twice = serialize_pure_state(parse_pure_state(once));
    } else if (kind == "channel.json") {
      once = serialize_channel(parse_channel(text));
      twice = serialize_channel(parse_channel(once));
    } else {
      once = serialize_operator(parse_operator(text));
      twice = serialize_operator(parse_operator(once));
    }
    if (once == text && twice == text) ++round_trips;
  }
  ok = ok && round_trips == 4;
  detail += std::to_string(round_trips) + "/4 file round-trips exact";

  const fs::path a = dir / "run1.jsonl", b = dir / "run2.jsonl";
  const int c1 = run(q + " verify --check all --seed 0 --out '" + a.string() + "' > /dev/null 2>&1");
  const int c2 = run(q + " verify --check all --seed 0 --out '" + b.string() + "' > /dev/null 2>&1");
  const bool same = fs::exists(a) && fs::exists(b) && read_text_file(a.string()) == read_text_file(b.string());
  ok = ok && c1 == 0 && c2 == 0 && same;
  detail += "; verify --check all --seed 0 exit codes " + std::to_string(c1) + "," + std::to_string(c2) +
            "; reports " + (same ? "byte-identical" : "differ");
  fs::remove_all(dir);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-qdiv>\n";
    return 2;
  }
  const std::string qdiv = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form identities", closed_forms},
      {"evaluation-path equivalence", path_equivalence},
      {"data-processing campaign", dpi_campaign},
      {"negative control", negative_control},
      {"structural identities", structural},
      {"inequality suite", inequalities},
      {"classical and classical-quantum reductions", reductions},
      {"information measures", measures},
      {"command line", [&] { return cli(qdiv); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": "
              << o.detail << " [" << fmt(secs) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
