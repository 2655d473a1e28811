#pragma once

// JSON file formats.
//
// Operator file:  {"dims": [d1, ...], "labels": ["A", ...], "matrix": [[[re, im], ...], ...]}
// Pure state:     {"dims": [d1, ...], "labels": [...], "vector": [[re, im], ...]}
// Channel file:   {"din": n, "dout": m, "kraus": [matrix, ...]}
//
// "labels" is optional (defaults: "S" for one factor, "A", "B", ... otherwise).
// Entries may also be plain real numbers. Malformed files raise ParseError,
// which includes a matrix that is not Hermitian to 1e-9.

#include <string>
#include <string_view>

#include "qfdiv/channels.hpp"
#include "qfdiv/linops.hpp"

namespace qfdiv {

HermitianOperator parse_operator(std::string_view text);
std::string serialize_operator(const HermitianOperator& op);

PureStateVector parse_pure_state(std::string_view text);
std::string serialize_pure_state(const PureStateVector& psi);

QuantumChannel parse_channel(std::string_view text);
std::string serialize_channel(const QuantumChannel& ch);

// Whole-file helpers; an unreadable file is a ParseError.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qfdiv
