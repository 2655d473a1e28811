#include "qfdiv/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qfdiv/channels.hpp"
#include "qfdiv/divergences.hpp"
#include "qfdiv/errors.hpp"
#include "qfdiv/harness.hpp"
#include "qfdiv/io.hpp"
#include "qfdiv/measures.hpp"
#include "qfdiv/quantity.hpp"

namespace qfdiv {

namespace {

using json = nlohmann::ordered_json;

const double kLn2 = std::log(2.0);

struct OptimizerFlags {
  int max_iters = 500;
  double grad_tol = 1e-7;
  int multistarts = 3;
  std::string eps;
  std::uint64_t seed = 0;

  OptimizerOptions options() const {
    OptimizerOptions o;
    o.max_iters = max_iters;
    o.grad_tol = grad_tol;
    o.multistarts = multistarts;
    o.seed = seed;
    if (!eps.empty()) {
      o.epsilon_schedule.clear();
      for (const auto& s : split(eps, ',')) o.epsilon_schedule.push_back(parse_real(s));
    }
    return o;
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--max-iters", max_iters, "Optimizer iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--grad-tol", grad_tol, "Optimizer gradient tolerance (max-norm)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--multistarts", multistarts, "Optimizer starts: H = 0 plus random ones")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--eps", eps, "Comma-separated epsilon schedule for ker Y, e.g. 1e-2,1e-4");
    cmd->add_option("--seed", seed, "Seed for random starts");
  }
};

json number(const ExtendedReal& v, double scale = 1.0) {
  if (v.is_pos_infinity()) return "inf";
  if (v.is_neg_infinity()) return "-inf";
  return v.value() / scale;
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : OptimizerFlags::split(s, ',')) out.push_back(parse_real(item));
  return out;
}

std::pair<std::size_t, std::size_t> parse_pair(const std::string& s, const char* what) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    const long long a = std::stoll(s.substr(0, x));
    const long long b = std::stoll(s.substr(x + 1));
    if (a < 1 || b < 1) throw std::invalid_argument(s);
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
  } catch (const std::exception&) {
    throw ParseError(std::string(what) + " must look like 2x3, got '" + s + "'");
  }
}

void emit(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

bool is_log_quantity(QuantityKind k) {
  return k == QuantityKind::NegLog || k == QuantityKind::Renyi || k == QuantityKind::PetzRenyi ||
         k == QuantityKind::Sandwiched;
}

// ---------------------------------------------------------------------------
// div

struct DivArgs {
  std::string f;
  std::string x;
  std::string y;
  std::string tau;
  std::string path = "spectral";
  bool numeric = false;
  bool bits = false;
  OptimizerFlags opt;
};

EvalPath parse_path(const std::string& s) {
  if (s == "spectral") return EvalPath::Spectral;
  if (s == "tensor") return EvalPath::Tensor;
  if (s == "modular") return EvalPath::RelativeModular;
  throw ParseError("unknown evaluation path '" + s + "'");
}

int cmd_div(const DivArgs& a, std::ostream& out) {
  const Quantity q = parse_quantity(a.f);
  const HermitianOperator x = parse_operator(read_text_file(a.x));
  const HermitianOperator y = parse_operator(read_text_file(a.y));
  json res;
  json diag;
  diag["quantity"] = q.spec;

  if (!a.tau.empty()) {
    const HermitianOperator tau = parse_operator(read_text_file(a.tau));
    std::optional<FDescriptor> f = q.kernel();
    if (!f) throw ArgumentError("'" + q.spec + "' has no fixed-tau form");
    const bool log_units = q.kind == QuantityKind::NegLog;
    const double scale = a.bits && log_units ? kLn2 : 1.0;
    res["value"] = number(ExtendedReal::finite(optimized_f_at(x, y, tau, *f, parse_path(a.path))), scale);
    diag["method"] = "fixed_tau";
    diag["path"] = a.path;
    diag["units"] = log_units ? (a.bits ? "bits" : "nats") : "quasi";
    res["diagnostics"] = diag;
    emit(out, res);
    return kExitOk;
  }

  const OptimizerOptions opts = a.opt.options();
  const QuantityResult r = evaluate(q, x, y, opts, a.numeric);
  const bool log_units = is_log_quantity(q.kind);
  const double scale = a.bits && log_units ? kLn2 : 1.0;
  res["value"] = number(r.value, scale);
  if (r.numeric && r.numeric->tau_star) {
    res["tau_star"] = matrix_json(r.numeric->tau_star->matrix());
  } else if (q.kind == QuantityKind::Renyi && r.value.is_finite()) {
    try {
      res["tau_star"] = matrix_json(holder_optimal_tau(x, y, q.param, 0.0).matrix());
    } catch (const ArgumentError&) {
      // No attained optimum when Y has a kernel.
    }
  }
  diag["method"] = r.method;
  diag["units"] = log_units ? (a.bits ? "bits" : "nats") : "quasi";
  if (r.numeric) {
    diag["converged"] = r.numeric->converged;
    diag["iterations"] = r.numeric->iterations;
    diag["gradient_norm"] = r.numeric->gradient_norm;
    diag["epsilon_schedule"] = r.numeric->epsilon_schedule;
    if (!r.numeric->converged) diag["note"] = "optimizer did not converge; the value is a lower bound";
  } else {
    diag["converged"] = true;
  }
  res["diagnostics"] = diag;
  emit(out, res);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// measure

struct MeasureArgs {
  std::string kind;
  std::string f;
  std::string rho;
  std::string psi;
  std::string channel;
  std::vector<std::string> free;
  bool bits = false;
  int outer_multistarts = 5;
  OptimizerFlags opt;
};

const std::vector<std::string> kMeasureKinds{"entropy",       "mutual_info",         "conditional_entropy",
                                             "coherent_info", "channel_mutual_info", "resource",
                                             "duality"};

std::string require_file(const std::string& path, const char* flag, const std::string& kind) {
  if (path.empty()) throw ArgumentError("measure '" + kind + "' needs " + flag);
  return read_text_file(path);
}

int cmd_measure(const MeasureArgs& a, std::ostream& out) {
  const FDescriptor f = parse_f_spec(a.f);
  MeasureOptions mo;
  mo.inner = a.opt.options();
  mo.seed = a.opt.seed;
  mo.outer_multistarts = a.outer_multistarts;
  const bool nats = f.family() == Family::NegLog;
  const double scale = a.bits && nats ? kLn2 : 1.0;

  json res;
  json diag;
  diag["kind"] = a.kind;
  diag["f"] = f.name();
  diag["units"] = nats ? (a.bits ? "bits" : "nats") : "quasi";

  if (a.kind == "duality") {
    const PureStateVector psi = parse_pure_state(require_file(a.psi, "--psi", a.kind));
    const DualityPair p = duality_pair(psi, f, mo);
    res["lhs"] = number(p.lhs.value, scale);
    res["rhs"] = number(p.rhs.value, scale);
    if (p.lhs.value.is_finite() && p.rhs.value.is_finite()) {
      res["value"] = (p.lhs.value.value() - p.rhs.value.value()) / scale;
    } else {
      res["value"] = "inf";
    }
    diag["converged"] = p.lhs.converged && p.rhs.converged;
    diag["dual_f"] = dual_k(f).name();
    res["diagnostics"] = diag;
    emit(out, res);
    return kExitOk;
  }

  MeasureResult m;
  if (a.kind == "channel_mutual_info") {
    m = channel_f_mutual_information(parse_channel(require_file(a.channel, "--channel", a.kind)), f, mo);
  } else {
    const HermitianOperator rho = parse_operator(require_file(a.rho, "--rho", a.kind));
    if (a.kind == "entropy") {
      m = f_entropy(rho, f, mo);
    } else if (a.kind == "mutual_info") {
      m = f_mutual_information(rho, rho.layout(), f, mo);
    } else if (a.kind == "conditional_entropy") {
      m = conditional_f_entropy(rho, rho.layout(), f, mo);
    } else if (a.kind == "coherent_info") {
      m = coherent_f_information(rho, rho.layout(), f, mo);
    } else if (a.kind == "resource") {
      FreeStateSet free;
      for (const auto& path : a.free) free.states.push_back(parse_operator(read_text_file(path)));
      m = resource_measure(rho, free, f, mo);
    } else {
      throw ArgumentError("unknown measure kind '" + a.kind + "'");
    }
  }
  res["value"] = number(m.value, scale);
  if (m.inner_witness) res["witness"] = matrix_json(m.inner_witness->matrix());
  diag["converged"] = m.converged;
  res["diagnostics"] = diag;
  emit(out, res);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::vector<std::string> checks{"all"};
  std::optional<std::size_t> trials;
  std::uint64_t seed = 0;
  std::optional<double> slack;
  bool numeric = false;
  std::string quantities;
  std::string alphas;
  std::string dims = "2x2";
  std::string channel_dims = "3x2";
  double rank_deficient = 0.25;
  std::string out;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  CheckConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  if (a.slack && !(*a.slack > 0.0)) throw ArgumentError("--slack must be > 0");
  cfg.slack = a.slack;
  cfg.numeric = a.numeric;
  cfg.quantities = OptimizerFlags::split(a.quantities, ',');
  for (const auto& q : cfg.quantities) parse_quantity(q);
  cfg.alphas = parse_list(a.alphas);
  std::tie(cfg.dim_a, cfg.dim_b) = parse_pair(a.dims, "--dims");
  std::tie(cfg.din, cfg.dout) = parse_pair(a.channel_dims, "--channel-dims");
  if (a.rank_deficient < 0.0 || a.rank_deficient > 1.0) {
    throw ArgumentError("--rank-deficient must lie in [0, 1]");
  }
  cfg.rank_deficient_fraction = a.rank_deficient;

  std::vector<CheckReport> reports;
  for (const auto& name : a.checks) {
    if (name == "all") {
      for (auto& r : run_all(cfg)) reports.push_back(std::move(r));
    } else {
      reports.push_back(run_check(name, cfg));
    }
  }
  bool passed = true;
  for (const auto& r : reports) {
    passed = passed && r.passed();
    err << r.check_name << ": " << (r.passed() ? "pass" : "FAIL") << " (" << r.failures << "/"
        << r.trials << " failing trials)\n";
  }
  if (a.out.empty()) {
    write_jsonl(out, reports);
  } else {
    std::ostringstream os;
    write_jsonl(os, reports);
    write_text_file(a.out, os.str());
    out << summary_json(reports) << '\n';
  }
  return passed ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::string what;
  std::size_t dim = 2;
  std::string dims;
  std::string labels;
  std::size_t rank = 0;
  std::size_t din = 2;
  std::size_t dout = 2;
  std::size_t env = 0;
  std::uint64_t seed = 0;
  std::string out;
};

SystemLayout gen_layout(const GenArgs& a) {
  std::vector<std::size_t> dims;
  if (a.dims.empty()) {
    dims.push_back(a.dim);
  } else {
    for (const auto& s : OptimizerFlags::split(a.dims, ',')) {
      try {
        const long long v = std::stoll(s);
        if (v < 1) throw std::invalid_argument(s);
        dims.push_back(static_cast<std::size_t>(v));
      } catch (const std::exception&) {
        throw ParseError("--dims must be a comma-separated list of positive integers");
      }
    }
  }
  std::vector<std::string> labels = OptimizerFlags::split(a.labels, ',');
  if (labels.empty()) {
    if (dims.size() == 1) {
      labels.push_back("S");
    } else {
      for (std::size_t i = 0; i < dims.size(); ++i) labels.push_back(std::string(1, static_cast<char>('A' + i)));
    }
  }
  if (labels.size() != dims.size()) throw ArgumentError("--labels needs one label per dimension");
  std::vector<SystemFactor> factors;
  for (std::size_t i = 0; i < dims.size(); ++i) factors.push_back({labels[i], dims[i]});
  return SystemLayout(std::move(factors));
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  std::string text;
  const RngSeed seed{a.seed};
  if (a.what == "channel") {
    text = serialize_channel(random_channel(a.din, a.dout, a.env, seed));
  } else {
    const SystemLayout layout = gen_layout(a);
    const std::size_t d = layout.total_dim();
    if (a.what == "pure") {
      PureStateVector psi = random_pure(d, seed);
      psi.layout = layout;
      text = serialize_pure_state(psi);
    } else if (a.what == "state" || a.what == "psd") {
      ComplexMatrix m;
      if (a.rank > 0) {
        if (a.rank > d) throw ArgumentError("--rank exceeds the dimension");
        const ComplexMatrix g = random_gaussian(d, a.rank, seed);
        m = g * g.adjoint();
        if (a.what == "state") m /= m.trace().real();
      } else {
        m = a.what == "state" ? random_density(d, seed).matrix() : random_psd(d, seed).matrix();
      }
      text = serialize_operator(HermitianOperator(hermitian_part(m), layout));
    } else {
      throw ArgumentError("unknown gen target '" + a.what + "'");
    }
  }
  if (a.out.empty()) {
    out << text << '\n';
  } else {
    write_text_file(a.out, text);
    json j;
    j["written"] = a.out;
    j["kind"] = a.what;
    emit(out, j);
  }
  return kExitOk;
}

const char* kFooter = R"(Quantity specs (div --f):
  neg_log           Tr{X} D(X/Tr X || Y), relative entropy
  renyi:A           sandwiched Renyi D~_A, A in [1/2,1) or (1,inf)
  petz_renyi:A      Petz-Renyi D_A, A in [-1,1) or (1,2]
  neg_pow:B         optimized quasi-divergence, f(x) = -x^B, B in (0,1]
  inv_pow:B         optimized quasi-divergence, f(x) = x^B, B in [-1,0)
  sandwiched:A      sandwiched Renyi for any A in (0,1) or (1,inf), no data processing below 1/2
  convex_pow:B      f(x) = x^B, B in [1,2]; only with --tau
Orders accept fractions such as 3/4.

Files: operators are {"dims", "labels"?, "matrix"} with entries [re, im];
pure states use "vector" in place of "matrix"; channels are {"din", "dout", "kraus"}.

Exit codes: 0 success, 1 verify found failures, 2 domain or argument error,
3 parse error (flags, files, specs). Values are in nats unless --bits is given;
--bits only rescales logarithmic quantities. Infinite values print as "inf".)";

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimized quantum f-divergences: evaluation, measures and verification campaigns",
               "qdiv"};
  app.require_subcommand(1);
  app.footer(kFooter);

  DivArgs div;
  CLI::App* div_cmd = app.add_subcommand("div", "Evaluate a divergence between two operator files");
  div_cmd->add_option("--f", div.f, "Quantity spec, e.g. renyi:2")->required();
  div_cmd->add_option("--x", div.x, "Operator file for X")->required();
  div_cmd->add_option("--y", div.y, "Operator file for Y")->required();
  div_cmd->add_option("--tau", div.tau, "Evaluate at this fixed tau instead of the supremum");
  div_cmd->add_option("--path", div.path, "Fixed-tau evaluation path: spectral, tensor or modular");
  div_cmd->add_flag("--numeric", div.numeric, "Use the tau optimizer even when a closed form exists");
  div_cmd->add_flag("--bits", div.bits, "Report logarithmic quantities in bits");
  div.opt.add_to(div_cmd);

  MeasureArgs meas;
  CLI::App* meas_cmd = app.add_subcommand("measure", "Evaluate an information measure");
  meas_cmd->add_option("--kind", meas.kind, "Measure kind")
      ->required()
      ->check(CLI::IsMember(kMeasureKinds));
  meas_cmd->add_option("--f", meas.f, "Kernel spec: neg_log, renyi:A, neg_pow:B, inv_pow:B")->required();
  meas_cmd->add_option("--rho", meas.rho, "Operator file (bipartite A,B for the bipartite kinds)");
  meas_cmd->add_option("--psi", meas.psi, "Pure state file on A,B,C (duality)");
  meas_cmd->add_option("--channel", meas.channel, "Channel file (channel_mutual_info)");
  meas_cmd->add_option("--free", meas.free, "Free state files (resource); repeatable");
  meas_cmd->add_option("--outer-multistarts", meas.outer_multistarts, "Starts of the outer minimization")
      ->check(CLI::PositiveNumber);
  meas_cmd->add_flag("--bits", meas.bits, "Report entropic (neg_log) values in bits");
  meas.opt.add_to(meas_cmd);

  VerifyArgs ver;
  CLI::App* ver_cmd = app.add_subcommand("verify", "Run seeded verification campaigns");
  std::vector<std::string> check_choices = check_names();
  check_choices.push_back("all");
  ver_cmd->add_option("--check", ver.checks, "Check name or 'all' (excludes negative_control); repeatable")
      ->check(CLI::IsMember(check_choices))
      ->capture_default_str();
  ver_cmd->add_option("--trials", ver.trials, "Trials per check (default 50, negative_control 500)");
  ver_cmd->add_option("--seed", ver.seed, "Master seed");
  ver_cmd->add_option("--slack", ver.slack, "Override every declared slack");
  ver_cmd->add_flag("--numeric", ver.numeric, "Route optimized quantities through the tau optimizer");
  ver_cmd->add_option("--quantities", ver.quantities, "Comma-separated quantity specs");
  ver_cmd->add_option("--alphas", ver.alphas, "Comma-separated orders");
  ver_cmd->add_option("--dims", ver.dims, "Bipartite dimensions dA x dB")->capture_default_str();
  ver_cmd->add_option("--channel-dims", ver.channel_dims, "Channel dimensions din x dout")
      ->capture_default_str();
  ver_cmd->add_option("--rank-deficient", ver.rank_deficient, "Fraction of rank-deficient trials")
      ->capture_default_str();
  ver_cmd->add_option("--out", ver.out, "Write the JSON-lines report here; stdout then gets a summary");

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Write a random state, operator or channel file");
  gen_cmd->add_option("what", gen.what, "state, psd, pure or channel")
      ->required()
      ->check(CLI::IsMember({"state", "psd", "pure", "channel"}));
  gen_cmd->add_option("--dim", gen.dim, "Dimension of a single system")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--dims", gen.dims, "Comma-separated factor dimensions, e.g. 2,2");
  gen_cmd->add_option("--labels", gen.labels, "Comma-separated factor labels");
  gen_cmd->add_option("--rank", gen.rank, "Rank of the generated state or operator");
  gen_cmd->add_option("--din", gen.din, "Channel input dimension")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--dout", gen.dout, "Channel output dimension")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--env", gen.env, "Number of Kraus operators (0 = din*dout)");
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--out", gen.out, "Output file (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*div_cmd) return cmd_div(div, out);
    if (*meas_cmd) return cmd_measure(meas, out);
    if (*ver_cmd) return cmd_verify(ver, out, err);
    if (*gen_cmd) return cmd_gen(gen, out);
  } catch (const ParseError& e) {
    err << "qdiv: parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const DomainError& e) {
    err << "qdiv: domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ArgumentError& e) {
    err << "qdiv: argument error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ConvergenceError& e) {
    err << "qdiv: convergence error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "qdiv: error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitParse;
}

}  // namespace qfdiv
