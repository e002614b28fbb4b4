#include "fockdil/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fockdil {

namespace {

cplx entry_from_json(const json& e) {
    if (e.is_number()) return {e.get<double>(), 0.0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<double>(), e[1].get<double>()};
    throw InputError("matrix entry must be a number or an [re, im] pair");
}

int get_int(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw InputError(std::string("missing integer field '") + key + "'");
    return j.at(key).get<int>();
}

std::vector<CMat> matrices_from_json(const json& j, const char* key, size_t count, Index rows, Index cols) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != count)
        throw InputError(std::string("field '") + key + "' must be an array of " + std::to_string(count) +
                         " matrices");
    std::vector<CMat> out;
    for (const json& m : j.at(key)) {
        CMat M = matrix_from_json(m);
        if (rows == 0 && cols == 0 && M.size() == 0) {
            out.push_back(CMat::Zero(rows, cols));
            continue;
        }
        if (M.rows() != rows || M.cols() != cols) {
            std::ostringstream os;
            os << "matrix in '" << key << "' is " << M.rows() << "x" << M.cols() << ", expected " << rows << "x"
               << cols;
            throw InputError(os.str());
        }
        out.push_back(std::move(M));
    }
    return out;
}

void dump_number(std::ostringstream& os, double v) {
    if (!std::isfinite(v)) {
        os << (std::isnan(v) ? "\"nan\"" : (v > 0 ? "\"inf\"" : "\"-inf\""));
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

void dump_rec(std::ostringstream& os, const json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<size_t>(indent * depth), ' ') : "";
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) { os << "{}"; return; }
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',';
            first = false;
            os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
            dump_rec(os, it.value(), indent, depth + 1);
        }
        os << close << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) { os << "[]"; return; }
        // Arrays of scalars stay on one line.
        bool flat = true;
        for (const json& e : j)
            if (e.is_structured() && !(e.is_array() && e.size() == 2 && e[0].is_number())) flat = false;
        os << '[';
        bool first = true;
        for (const json& e : j) {
            if (!first) os << (flat ? ", " : ",");
            first = false;
            if (!flat) os << pad;
            dump_rec(os, e, flat ? 0 : indent, depth + 1);
        }
        os << (flat ? "" : close) << ']';
        return;
    }
    case json::value_t::number_float:
        dump_number(os, j.get<double>());
        return;
    default:
        os << j.dump();
    }
}

}  // namespace

json matrix_to_json(const CMat& M) {
    json rows = json::array();
    for (Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < M.cols(); ++c) row.push_back(json::array({M(r, c).real(), M(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMat matrix_from_json(const json& j) {
    if (!j.is_array()) throw InputError("matrix must be a nested array");
    const Index rows = static_cast<Index>(j.size());
    if (rows == 0) return CMat(0, 0);
    if (!j[0].is_array()) throw InputError("matrix rows must be arrays");
    const Index cols = static_cast<Index>(j[0].size());
    CMat M(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw InputError("ragged matrix rows");
        for (Index c = 0; c < cols; ++c) M(r, c) = entry_from_json(row[static_cast<size_t>(c)]);
    }
    return M;
}

json tuple_to_json(const OperatorTuple& T) {
    json mats = json::array();
    for (const CMat& M : T.mats()) mats.push_back(matrix_to_json(M));
    return json{{"d", T.d()}, {"dim", T.dim()}, {"mats", mats}};
}

OperatorTuple tuple_from_json(const json& j) {
    if (!j.is_object()) throw InputError("tuple file must hold a JSON object");
    const int d = get_int(j, "d");
    const int dim = get_int(j, "dim");
    if (d < 1 || dim < 0) throw InputError("need d >= 1 and dim >= 0");
    if (dim == 0) return OperatorTuple::empty(d);
    return OperatorTuple(matrices_from_json(j, "mats", static_cast<size_t>(d), dim, dim));
}

json symbol_to_json(const MultiAnalyticSymbol& theta, double zero_tol) {
    json coeffs = json::array();
    const TruncatedFock& F = theta.fock();
    for (Index a = 0; a < F.total_dim(); ++a) {
        const CMat& c = theta.coeff(a);
        if (c.size() == 0 || c.norm() <= zero_tol) continue;
        coeffs.push_back(json{{"word", word_to_string(F.word(a))}, {"matrix", matrix_to_json(c)}});
    }
    return json{{"d", theta.d()},
                {"N", theta.N()},
                {"dom_dim", theta.dom_dim()},
                {"cod_dim", theta.cod_dim()},
                {"coeffs", coeffs}};
}

MultiAnalyticSymbol symbol_from_json(const json& j) {
    if (!j.is_object()) throw InputError("symbol file must hold a JSON object");
    const int d = get_int(j, "d"), N = get_int(j, "N");
    const int dom = get_int(j, "dom_dim"), cod = get_int(j, "cod_dim");
    if (d < 1 || N < 0 || dom < 0 || cod < 0) throw InputError("bad symbol header");
    MultiAnalyticSymbol theta(d, N, dom, cod);
    if (!j.contains("coeffs") || !j.at("coeffs").is_array()) throw InputError("missing 'coeffs' array");
    for (const json& c : j.at("coeffs")) {
        if (!c.contains("word") || !c.at("word").is_string() || !c.contains("matrix"))
            throw InputError("each coefficient needs 'word' and 'matrix'");
        Word w;
        try {
            w = word_from_string(c.at("word").get<std::string>());
        } catch (const FockdilError& e) {
            throw InputError(e.what());
        }
        for (int letter : w)
            if (letter < 1 || letter > d) throw InputError("word letter outside 1..d");
        if (static_cast<int>(w.size()) > N) throw InputError("word longer than N");
        CMat M = matrix_from_json(c.at("matrix"));
        if (M.rows() != cod || M.cols() != dom) throw InputError("coefficient shape differs from header");
        theta.set(w, M);
    }
    return theta;
}

json lifting_to_json(const Lifting& L) {
    json C = json::array(), A = json::array(), B = json::array();
    for (int i = 0; i < L.d(); ++i) {
        C.push_back(matrix_to_json(L.C[i]));
        A.push_back(matrix_to_json(L.mA() ? L.A[i] : CMat(0, 0)));
        B.push_back(matrix_to_json(L.B[static_cast<size_t>(i)]));
    }
    return json{{"d", L.d()}, {"dim_C", L.mC()}, {"dim_A", L.mA()}, {"C", C}, {"A", A}, {"B", B}};
}

LiftingParts lifting_parts_from_json(const json& j) {
    if (!j.is_object()) throw InputError("lifting file must hold a JSON object");
    const int d = get_int(j, "d"), mC = get_int(j, "dim_C"), mA = get_int(j, "dim_A");
    if (d < 1 || mC < 1 || mA < 0) throw InputError("bad lifting header");
    LiftingParts p;
    p.C = OperatorTuple(matrices_from_json(j, "C", static_cast<size_t>(d), mC, mC));
    p.A = mA == 0 ? OperatorTuple::empty(d)
                  : OperatorTuple(matrices_from_json(j, "A", static_cast<size_t>(d), mA, mA));
    if (mA == 0) {
        p.B.assign(static_cast<size_t>(d), CMat::Zero(0, mC));
    } else {
        p.B = matrices_from_json(j, "B", static_cast<size_t>(d), mA, mC);
    }
    return p;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string dump_json(const json& j, int indent) {
    std::ostringstream os;
    dump_rec(os, j, indent, 0);
    return os.str();
}

}  // namespace fockdil
