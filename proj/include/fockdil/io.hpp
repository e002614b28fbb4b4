#pragma once

// JSON file formats for tuples, symbols and liftings, and a deterministic
// report writer.
//
//   tuple:   {"d": 2, "dim": 3, "mats": [M_1, ..., M_d]}
//   symbol:  {"d", "N", "dom_dim", "cod_dim", "coeffs": [{"word": "1.2", "matrix": M}]}
//   lifting: {"d", "dim_C", "dim_A", "C": [...], "A": [...], "B": [...]}
//
// A matrix is a row-major nested array whose entries are [re, im] pairs or
// plain reals.  Symbol files list only the words with a nonzero coefficient.

#include "fockdil/liftings.hpp"
#include "fockdil/symbols.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace fockdil {

using json = nlohmann::json;

// Malformed or inconsistent input file.
class InputError : public FockdilError {
public:
    explicit InputError(const std::string& what) : FockdilError("InputError: " + what) {}
};

json matrix_to_json(const CMat& M);
CMat matrix_from_json(const json& j);

json tuple_to_json(const OperatorTuple& T);
OperatorTuple tuple_from_json(const json& j);

json symbol_to_json(const MultiAnalyticSymbol& theta, double zero_tol = 0.0);
MultiAnalyticSymbol symbol_from_json(const json& j);

json lifting_to_json(const Lifting& L);
// Parts of a lifting file; gamma is recovered by the caller.
struct LiftingParts {
    OperatorTuple C, A;
    std::vector<CMat> B;
};
LiftingParts lifting_parts_from_json(const json& j);

std::string read_file(const std::string& path);
json read_json_file(const std::string& path);

// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

// Serialise with every double printed as %.17g and object keys in insertion
// order of the underlying map (sorted), so equal inputs give equal bytes.
std::string dump_json(const json& j, int indent = 2);

}  // namespace fockdil
