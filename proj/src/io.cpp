#include "qfdiv/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "qfdiv/errors.hpp"

namespace qfdiv {

namespace {

using json = nlohmann::ordered_json;

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

std::size_t positive_size(const json& j, const char* what) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ParseError(std::string(what) + " must be a positive integer");
  }
  const auto v = j.get<long long>();
  if (v < 1) throw ParseError(std::string(what) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

Complex complex_entry(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ParseError("matrix entries must be [re, im] pairs or numbers");
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

ComplexMatrix matrix_from(const json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows) {
    throw ParseError("matrix must have " + std::to_string(rows) + " rows");
  }
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != cols) {
      throw ParseError("matrix row " + std::to_string(r) + " must have " + std::to_string(cols) +
                       " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_entry(row[c]);
    }
  }
  if (!m.allFinite()) throw ParseError("matrix has non-finite entries");
  return m;
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

SystemLayout layout_from(const json& j) {
  const json& dims = field(j, "dims");
  if (!dims.is_array() || dims.empty()) throw ParseError("dims must be a non-empty array");
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const json& l = j["labels"];
    if (!l.is_array() || l.size() != dims.size()) {
      throw ParseError("labels must be an array with one entry per dimension");
    }
    for (const auto& s : l) {
      if (!s.is_string()) throw ParseError("labels must be strings");
      labels.push_back(s.get<std::string>());
    }
  } else if (dims.size() == 1) {
    labels.push_back("S");
  } else {
    for (std::size_t i = 0; i < dims.size(); ++i) labels.push_back(std::string(1, static_cast<char>('A' + i)));
  }
  std::vector<SystemFactor> factors;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    factors.push_back({labels[i], positive_size(dims[i], "dims entries")});
  }
  try {
    return SystemLayout(std::move(factors));
  } catch (const ArgumentError& e) {
    throw ParseError(e.what());
  }
}

void put_layout(json& j, const SystemLayout& layout) {
  j["dims"] = layout.dims();
  j["labels"] = layout.labels();
}

}  // namespace

HermitianOperator parse_operator(std::string_view text) {
  const json j = parse_json(text);
  const SystemLayout layout = layout_from(j);
  const std::size_t n = layout.total_dim();
  const ComplexMatrix m = matrix_from(field(j, "matrix"), n, n);
  const double skew = max_abs(m - m.adjoint());
  if (skew > 1e-9 * std::max(1.0, max_abs(m))) {
    std::ostringstream os;
    os << "matrix is not Hermitian (|M - M^dagger|_max = " << skew << ")";
    throw ParseError(os.str());
  }
  return HermitianOperator(m, layout);
}

std::string serialize_operator(const HermitianOperator& op) {
  json j;
  put_layout(j, op.layout());
  j["matrix"] = matrix_json(op.matrix());
  return j.dump();
}

PureStateVector parse_pure_state(std::string_view text) {
  const json j = parse_json(text);
  PureStateVector psi;
  psi.layout = layout_from(j);
  const json& v = field(j, "vector");
  const std::size_t n = psi.layout.total_dim();
  if (!v.is_array() || v.size() != n) {
    throw ParseError("vector must have " + std::to_string(n) + " entries");
  }
  psi.amplitudes.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) psi.amplitudes(static_cast<Eigen::Index>(i)) = complex_entry(v[i]);
  if (!psi.amplitudes.allFinite()) throw ParseError("vector has non-finite entries");
  psi.normalized = std::abs(psi.amplitudes.norm() - 1.0) <= 1e-9;
  return psi;
}

std::string serialize_pure_state(const PureStateVector& psi) {
  json j;
  put_layout(j, psi.layout);
  json v = json::array();
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) v.push_back(complex_json(psi.amplitudes(i)));
  j["vector"] = std::move(v);
  return j.dump();
}

QuantumChannel parse_channel(std::string_view text) {
  const json j = parse_json(text);
  const std::size_t din = positive_size(field(j, "din"), "din");
  const std::size_t dout = positive_size(field(j, "dout"), "dout");
  const json& k = field(j, "kraus");
  if (!k.is_array() || k.empty()) throw ParseError("kraus must be a non-empty array of matrices");
  std::vector<ComplexMatrix> kraus;
  for (const auto& m : k) kraus.push_back(matrix_from(m, dout, din));
  return QuantumChannel(std::move(kraus), din, dout);
}

std::string serialize_channel(const QuantumChannel& ch) {
  json j;
  j["din"] = ch.din();
  j["dout"] = ch.dout();
  json k = json::array();
  for (const auto& m : ch.kraus()) k.push_back(matrix_json(m));
  j["kraus"] = std::move(k);
  return j.dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write file '" + path + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace qfdiv
