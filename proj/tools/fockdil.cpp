// Batch front-end: reads tuple, lifting and symbol files, runs one analysis
// per subcommand and writes a report with named assertions.
//
// Exit codes: 0 when every assertion passes, 1 when one fails (the failing
// assertion is named on stderr), 2 for unreadable or malformed input.

#include "fockdil/charfn.hpp"
#include "fockdil/cpmaps.hpp"
#include "fockdil/dilation.hpp"
#include "fockdil/invariants.hpp"
#include "fockdil/io.hpp"
#include "fockdil/liftings.hpp"
#include "fockdil/random.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

using namespace fockdil;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
    int trunc = 8;
    bool trunc_set = false;
    double tol = 1e-9;
    double rank_tol = 1e-9;
    double tol_inner = 1e-8;
    std::string report = "json";
    std::uint64_t seed = 1;
    std::string out;
    int steps = 0;
    bool allow_nonreduced = false;
    bool richardson = false;
};

struct Input {
    std::string path;
    std::string bytes;
    json doc;
};

struct Assertion {
    std::string name;
    bool pass;
    double residual;
    double bound;
    std::string detail;
};

// Stops a command after a library error, reported as a failed assertion.
struct Halt {
    std::string name;
    std::string detail;
};

struct Report {
    json outputs = json::object();
    std::vector<Assertion> assertions;
    // Sequences written as CSV files.
    std::vector<InvariantTrace> traces;

    void check(const std::string& name, double residual, double bound) {
        assertions.push_back({name, residual <= bound, residual, bound, ""});
    }
    void flag(const std::string& name, bool pass, const std::string& detail = "") {
        assertions.push_back({name, pass, pass ? 0.0 : 1.0, 0.0, detail});
    }
};

using Handler = std::function<void(const std::vector<Input>&, const RunConfig&, Report&)>;

struct Command {
    std::string name;
    std::string help;
    int arity;  // inputs per report; 1 means each input file gets its own report
    Handler run;
};

json vector_to_json(const CVec& v) {
    json out = json::array();
    for (Index k = 0; k < v.size(); ++k) out.push_back(json::array({v(k).real(), v(k).imag()}));
    return out;
}

json trace_to_json(const InvariantTrace& t) {
    return json{{"statistic", t.statistic}, {"normalization", t.normalization}, {"n", t.n},
                {"sequence", t.sequence},   {"estimate", t.estimate},           {"method", t.method}};
}

CMat identity(Index n) { return CMat::Identity(n, n); }

double phi_tail(const OperatorTuple& T, long n) {
    if (T.dim() == 0) return 0.0;
    return op_norm(CPMap(T).apply(identity(T.dim()), n));
}

bool is_lifting_doc(const json& doc) { return doc.is_object() && doc.contains("C"); }

OperatorTuple load_tuple(const Input& in) {
    if (is_lifting_doc(in.doc)) throw InputError(in.path + ": expected a tuple file, found a lifting");
    return tuple_from_json(in.doc);
}

Lifting load_lifting(const Input& in) {
    if (!is_lifting_doc(in.doc)) throw InputError(in.path + ": expected a lifting file");
    const LiftingParts p = lifting_parts_from_json(in.doc);
    if (p.A.d() != p.C.d()) throw InputError(in.path + ": C and A have different d");
    try {
        return recover_gamma(p.C, p.A, p.B);
    } catch (const InputError&) {
        throw;
    } catch (const FockdilError& e) {
        throw Halt{"lifting_consistent", e.what()};
    }
}

MultiAnalyticSymbol load_symbol(const Input& in) { return symbol_from_json(in.doc); }

// max(0, |sum T_i T_i^*| - 1).
double row_excess(const OperatorTuple& T) {
    if (T.dim() == 0) return 0.0;
    return std::max(0.0, op_norm(T.row_gram()) - 1.0);
}

json symbol_json(const MultiAnalyticSymbol& s) { return symbol_to_json(s, 1e-14); }

// Largest eigenvalue of the Gram sum minus one, clipped at zero.
double gram_excess(const MultiAnalyticSymbol& s) {
    if (s.dom_dim() == 0) return 0.0;
    const GramDefect g = gram_defect(s);
    return std::max(0.0, op_norm(g.gram0) - 1.0);
}

// ---------------------------------------------------------------------------
// Subcommands.

void cmd_validate(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    OperatorTuple T;
    if (is_lifting_doc(in[0].doc)) {
        const LiftingParts p = lifting_parts_from_json(in[0].doc);
        r.check("row_contraction_C", row_excess(p.C), cfg.tol);
        r.check("row_contraction_A", row_excess(p.A), cfg.tol);
        try {
            const Lifting L = recover_gamma(p.C, p.A, p.B);
            r.check("gamma_fit", L.residual, config().tol_fit * std::max(1.0, L.Bstar_stacked().norm()));
            r.check("gamma_contraction", std::max(0.0, op_norm(L.gamma) - 1.0), 1e-8);
            r.outputs["gamma"] = matrix_to_json(L.gamma);
            T = L.E();
        } catch (const InputError&) {
            throw;
        } catch (const FockdilError& e) {
            r.flag("lifting_consistent", false, e.what());
            return;
        }
        r.outputs["dim_C"] = p.C.dim();
        r.outputs["dim_A"] = p.A.dim();
    } else {
        T = load_tuple(in[0]);
    }
    const double excess = row_excess(T);
    r.outputs["d"] = T.d();
    r.outputs["dim"] = T.dim();
    r.outputs["row_norm_squared"] = T.dim() ? op_norm(T.row_gram()) : 0.0;
    r.outputs["coisometric"] = T.dim() ? is_coisometric(T) : true;
    r.outputs["commuting"] = T.dim() ? is_commuting(T) : true;
    r.check("row_contraction", excess, cfg.tol);
    // Seeded probe of |sum T_i x_i| <= |x| on random vectors.
    Rng rng(cfg.seed);
    double worst = 0.0;
    if (T.dim() > 0) {
        const CMat row = T.row();
        for (int k = 0; k < 16; ++k) {
            const CVec x = random_gaussian(row.cols(), 1, rng).col(0);
            worst = std::max(worst, (row * x).norm() / x.norm() - 1.0);
        }
    }
    r.check("random_probe", std::max(0.0, worst), cfg.tol);
}

void cmd_defects(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple T = load_tuple(in[0]);
    r.check("row_contraction", row_excess(T), cfg.tol);
    const DefectData dd = defects(T, cfg.rank_tol);
    const Index m = T.dim();
    const CMat row = T.row();
    r.check("defect_star_square", (dd.Dstar * dd.Dstar - (identity(m) - T.row_gram())).norm(), 1e-8);
    r.check("defect_square", (dd.Dfull * dd.Dfull - (identity(row.cols()) - row.adjoint() * row)).norm(), 1e-8);
    r.outputs["rank_defect_star"] = dd.defect_star.dim();
    r.outputs["rank_defect"] = dd.defect.dim();
    r.outputs["Dstar"] = matrix_to_json(dd.Dstar);
    r.outputs["defect_star_basis"] = matrix_to_json(dd.defect_star.basis);
    r.outputs["defect_basis"] = matrix_to_json(dd.defect.basis);
}

void cmd_stability(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple T = load_tuple(in[0]);
    r.check("row_contraction", row_excess(T), cfg.tol);
    const StabilityReport s = stability_report(T, cfg.tol);
    r.outputs["star_stable"] = s.star_stable;
    r.outputs["cnc"] = s.cnc;
    r.outputs["limit_norm"] = op_norm(s.Q);
    r.outputs["coisometric_part_dim"] = s.H1.dim();
    r.outputs["iterations"] = s.iterations;
    r.outputs["limit"] = matrix_to_json(s.Q);
    // The limit of Phi^n(1) is a fixed point of Phi.
    r.check("limit_fixed", (CPMap(T).apply(s.Q) - s.Q).norm(), 1e-8);
}

void cmd_dilate(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple T = load_tuple(in[0]);
    r.check("row_contraction", row_excess(T), cfg.tol);
    const int d = T.d(), N = cfg.trunc;
    const Index n = T.dim();
    const MidRealization m = mid(T, N);
    const Index dom = m.domain_dim();
    double iso = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const CMat G = m.V[static_cast<size_t>(i)].adjoint() * m.V[static_cast<size_t>(j)];
            iso = std::max(iso, (G - (i == j ? 1.0 : 0.0) * identity(dom)).norm());
        }
    r.check("row_isometry", iso, 1e-9);
    // P_H W_alpha |_H = T_alpha for words up to length min(N, 3).
    const OperatorTuple W = m.compressed();
    const TruncatedFock F(d, std::min(N, 3));
    double comp = 0.0;
    for (Index a = 1; a < F.total_dim(); ++a) {
        CMat X = CMat::Identity(dom, n), Ta = identity(n);
        const Word& w = F.word(a);
        for (auto it = w.rbegin(); it != w.rend(); ++it) X = W[*it - 1] * X;
        for (int letter : w) Ta = Ta * T[letter - 1];
        comp = std::max(comp, (X.topRows(n) - Ta).norm());
    }
    r.check("dilation_property", comp, 1e-9);
    r.outputs["N"] = N;
    r.outputs["domain_dim"] = dom;
    r.outputs["target_dim"] = m.target_dim();
    r.outputs["defect_dim"] = m.defect.defect.dim();
}

void cmd_poisson(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple T = load_tuple(in[0]);
    r.check("row_contraction", row_excess(T), cfg.tol);
    const int d = T.d(), N = cfg.trunc;
    const Index n = T.dim();
    const CMat K = poisson_kernel(T, N);
    const CMat tail = CPMap(T).apply(identity(n), N + 1);
    r.check("telescoping", (K.adjoint() * K - (identity(n) - tail)).norm(), 1e-9);
    const Index u = n ? K.rows() / fock_dim(d, N) : 0;
    double inter = 0.0;
    if (u > 0) {
        const OperatorTuple L = shifted_creation(d, N, u);
        const Index below = fock_dim(d, N - 1) * u;
        for (int i = 0; i < d; ++i)
            inter = std::max(inter, (L[i].adjoint() * K - K * T[i].adjoint()).topRows(below).norm());
    }
    r.check("intertwining", inter, 1e-9);
    r.outputs["N"] = N;
    r.outputs["rows"] = K.rows();
    r.outputs["cols"] = K.cols();
    r.outputs["defect_trace"] = (identity(n) - K.adjoint() * K).trace().real();
    r.outputs["kernel"] = matrix_to_json(K);
}

void cmd_charfn(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple T = load_tuple(in[0]);
    r.check("row_contraction", row_excess(T), cfg.tol);
    const MultiAnalyticSymbol theta = popescu_char(T, cfg.trunc);
    const GramDefect g = gram_defect(theta, cfg.tol_inner);
    r.check("gram_bounded", gram_excess(theta), 1e-9);
    r.outputs["gram0_defect"] = g.gram0_defect;
    r.outputs["worst_cross"] = g.worst_cross;
    r.outputs["inner"] = g.inner;
    r.outputs["theta"] = symbol_json(theta);
}

void cmd_lift_charfn(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const Lifting L = load_lifting(in[0]);
    const int N = cfg.trunc, levels = std::max(0, N / 2);
    const LiftingChar lc = lifting_char_full(L, N, cfg.allow_nonreduced);
    r.check("factors_through_defect", lc.kernel_leak, 1e-8);
    r.check("gram_bounded", gram_excess(lc.theta), 1e-9);
    const double unit = unitarity_residual(lc, N, levels);
    const double tail = phi_tail(L.A, levels);
    r.outputs["unitarity_residual"] = unit;
    r.outputs["unitarity_levels"] = levels;
    r.outputs["tail"] = tail;
    if (classify(L).is_subisometric) r.check("unitarity", unit, std::max(1e-8, tail));
    r.outputs["theta"] = symbol_json(lc.theta);
    r.outputs["dom_basis"] = matrix_to_json(lc.dom_basis);
    r.outputs["cod_basis"] = matrix_to_json(lc.cod_basis);
}

void cmd_ext_charfn(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple A = load_tuple(in[0]);
    std::optional<CVec> hint;
    if (in[0].doc.contains("Omega")) {
        const CMat O = matrix_from_json(in[0].doc.at("Omega"));
        if (O.cols() != 1 || O.rows() != A.dim()) throw InputError("'Omega' must be a column of length dim");
        hint = CVec(O.col(0));
    }
    r.check("coisometric", A.dim() ? op_norm(A.row_gram() - identity(A.dim())) : 0.0, cfg.tol);
    r.flag("ergodic", is_ergodic(A));
    const ExtendedChar ec = extended_char(A, eigen_frame(A, hint), cfg.trunc);
    const int d = A.d();
    const CVec Omega = ec.frame.col(0);
    r.outputs["omega"] = vector_to_json(ec.ef.omega);
    r.outputs["Omega"] = vector_to_json(Omega);
    r.outputs["eps"] = matrix_to_json(ec.eps);
    r.outputs["gamma"] = matrix_to_json(ec.gamma_eps);
    // Values at d^i_Omega = e_i (x) Omega, written back in C^d.
    json vals = json::array();
    const TruncatedFock& F = ec.raw.fock();
    for (int i = 0; i < d; ++i) {
        json per = json::object();
        const CVec x = kron(CVec::Unit(d, i), Omega);
        for (Index a = 0; a < F.total_dim(); ++a) {
            const CVec v = ec.eps * ec.raw.coeff(a) * x;
            if (v.norm() > 1e-14) per[word_to_string(F.word(a))] = vector_to_json(v);
        }
        vals.push_back(per);
    }
    r.outputs["d_Omega"] = vals;
    r.outputs["theta"] = symbol_json(ec.theta);
    r.check("gram_bounded", gram_excess(ec.theta), 1e-9);
}

ConstraintSet commutators_for(int d) { return ConstraintSet::commutators(d); }

void cmd_constrained_charfn(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const Lifting L = load_lifting(in[0]);
    const ConstraintSet J = commutators_for(L.d());
    const int N = cfg.trunc, levels = std::max(0, N / 2);
    r.check("constraints_satisfied", constraint_residual(L.E(), J), 1e-8);
    const ConstrainedChar cc = constrained_char(L, J, N, cfg.allow_nonreduced);
    // Part of the free symbol outside the constrained subspace.
    r.outputs["projection_leak"] = cc.leak;
    const double unit = constrained_unitarity_residual(cc, N, levels);
    const double tail = phi_tail(L.A, levels);
    r.outputs["unitarity_residual"] = unit;
    r.outputs["unitarity_levels"] = levels;
    if (classify(L).is_subisometric) r.check("unitarity", unit, std::max(1e-8, tail));
    r.outputs["constrained_dim"] = cc.gamma_J.dim();
    r.outputs["theta"] = symbol_json(cc.theta);
}

void cmd_equiv(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const MultiAnalyticSymbol a = load_symbol(in[0]), b = load_symbol(in[1]);
    const Equivalence e = equivalent(a, b, cfg.tol);
    r.outputs["residual"] = e.residual;
    if (e.v) r.outputs["v"] = matrix_to_json(*e.v);
    r.check("equivalent", e.residual, cfg.tol);
}

void cmd_compose(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const MultiAnalyticSymbol a = load_symbol(in[0]), b = load_symbol(in[1]);
    const int No = cfg.trunc_set ? cfg.trunc : a.N() + b.N();
    MultiAnalyticSymbol c = [&] {
        try {
            return compose(a, b, No);
        } catch (const DimensionMismatch& e) {
            throw Halt{"dimensions_compatible", e.what()};
        }
    }();
    const CMat prod = extend(a.resized(std::max(a.N(), No)), No) * extend(b.resized(std::max(b.N(), No)), No);
    const double scale = std::max(1.0, prod.norm());
    r.check("extension_product", (extend(c, No) - prod).norm() / scale, 1e-12);
    r.outputs["N"] = No;
    r.outputs["theta"] = symbol_json(c);
}

void cmd_model(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple C = load_tuple(in[0]);
    const MultiAnalyticSymbol theta = load_symbol(in[1]);
    r.check("row_contraction_C", row_excess(C), cfg.tol);
    r.check("symbol_contractive", gram_excess(theta), 1e-9);
    const int N = cfg.trunc;
    const Lifting L = [&] {
        try {
            return functional_model(C, theta, N);
        } catch (const BufferTooSmall& e) {
            throw Halt{"buffer_sufficient", e.what()};
        }
    }();
    r.check("row_contraction", row_excess(L.E()), 1e-8);
    r.outputs["dim_A"] = L.mA();
    r.outputs["lifting"] = lifting_to_json(L);
    // The model's characteristic function reproduces theta when the whole
    // symbol fits below the buffer.
    const int deg = theta.degree(1e-12);
    if (2 * std::max(deg, 1) <= N && L.mA() > 0) {
        const Equivalence e = equivalent(lifting_char(L, theta.N(), true), theta, 1e-6);
        r.outputs["roundtrip_residual"] = e.residual;
        r.check("model_roundtrip", e.residual, 1e-6);
    }
}

void cmd_classify(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const Lifting L = load_lifting(in[0]);
    r.check("row_contraction", row_excess(L.E()), 1e-8);
    const Classification c = classify(L);
    r.outputs["coisometric_lifting"] = c.is_coisometric_lifting;
    r.outputs["subisometric"] = c.is_subisometric;
    r.outputs["resolving"] = c.is_resolving;
    r.outputs["reduced"] = c.is_reduced;
    r.outputs["gamma_isometric"] = c.gamma_isometric;
    r.outputs["star_stable_A"] = c.star_stable_A;
    r.outputs["cnc_A"] = c.cnc_A;
    r.outputs["unresolved_dim"] = c.unresolved_dim;
    r.outputs["gamma"] = matrix_to_json(L.gamma);
    r.check("gamma_fit", L.residual, config().tol_fit * std::max(1.0, L.Bstar_stacked().norm()));
}

void cmd_fixpoints(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple T = load_tuple(in[0]);
    r.check("row_contraction", row_excess(T), cfg.tol);
    const CPMap phi(T);
    const std::vector<CMat> fp = fixed_points(phi);
    double fixed = 0.0, orth = 0.0;
    json mats = json::array();
    for (size_t a = 0; a < fp.size(); ++a) {
        fixed = std::max(fixed, (phi.apply(fp[a]) - fp[a]).norm());
        for (size_t b = 0; b < fp.size(); ++b) {
            const cplx ip = (fp[a].adjoint() * fp[b]).trace();
            orth = std::max(orth, std::abs(ip - (a == b ? 1.0 : 0.0)));
        }
        mats.push_back(matrix_to_json(fp[a]));
    }
    r.check("fixed", fixed, 1e-7);
    r.check("orthonormal", orth, 1e-9);
    r.outputs["dim"] = fp.size();
    r.outputs["ergodic"] = fp.size() == 1;
    r.outputs["basis"] = mats;
}

void cmd_kappa_inv(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const Lifting L = load_lifting(in[0]);
    const std::vector<CMat> fp = fixed_points(CPMap(L.C));
    const CPMap phiE(L.E());
    double roundtrip = 0.0, fixed = 0.0;
    json per = json::array();
    for (const CMat& x : fp) {
        const KappaInverse k = [&] {
            try {
                return kappa_inverse(L, x);
            } catch (const ConvergenceFailure& e) {
                throw Halt{"kappa_inverse_converged", e.what()};
            }
        }();
        roundtrip = std::max(roundtrip, (kappa(k.limit, L.mC()) - x).norm());
        fixed = std::max(fixed, (phiE.apply(k.limit) - k.limit).norm());
        per.push_back(json{{"iterations", k.iterations}, {"residual", k.residual}});
    }
    r.check("kappa_roundtrip", roundtrip, 1e-6);
    r.check("limit_fixed", fixed, 1e-6);
    r.outputs["fixed_point_dim_C"] = fp.size();
    r.outputs["fixed_point_dim_E"] = fixed_points(phiE).size();
    r.outputs["limits"] = per;
}

void invariants_common(const OperatorTuple& T, const RunConfig& cfg, Report& r, bool euler) {
    r.check("row_contraction", row_excess(T), cfg.tol);
    const int n_max = cfg.trunc;
    const FreeInvariants f = curvature_free(T, n_max, cfg.rank_tol);
    r.check("kernel_trace_agreement", f.worst_gap, 1e-9);
    const double rank = static_cast<double>(defects(T, cfg.rank_tol).defect_star.dim());
    const InvariantTrace& main = euler ? f.euler : f.curvature;
    double below = 0.0, above = 0.0;
    for (double v : f.curvature.sequence) {
        below = std::max(below, -v);
        above = std::max(above, v - rank);
    }
    r.check("curvature_nonnegative", below, 1e-12);
    r.check("curvature_below_rank", above, 1e-12);
    if (euler) {
        // rank(1 - Phi^n(1)) is nondecreasing in n.
        const int d = T.d();
        double drop = 0.0, prev = 0.0;
        for (size_t k = 0; k < f.euler.n.size(); ++k) {
            const int n = f.euler.n[k];
            const double levels = d == 1 ? n : (std::pow(d, n) - 1.0) / (d - 1.0);
            const double rk = f.euler.sequence[k] * levels;
            if (k > 0) drop = std::max(drop, prev - rk);
            prev = rk;
        }
        r.check("rank_monotone", drop, 1e-9);
    }
    r.outputs["free"] = trace_to_json(main);
    r.traces.push_back(main);
    if (!euler) {
        r.outputs["free_kernel"] = trace_to_json(f.curvature_kernel);
        r.traces.push_back(f.curvature_kernel);
    }
    if (T.dim() > 0 && is_commuting(T)) {
        const SymInvariants s = curvature_sym(T, n_max, cfg.richardson);
        const InvariantTrace& sm = euler ? s.euler : s.curvature;
        r.outputs["symmetric"] = trace_to_json(sm);
        r.traces.push_back(sm);
        if (!euler && !s.compressed.n.empty()) {
            r.outputs["symmetric_compressed"] = trace_to_json(s.compressed);
            r.traces.push_back(s.compressed);
        }
        r.outputs["normalization_note"] =
            "symmetric statistics use d!/n^d; the compressed statistic uses (d-1)!/d^n and is reported separately";
    }
}

void cmd_curv(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    invariants_common(load_tuple(in[0]), cfg, r, false);
}

void cmd_euler(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    invariants_common(load_tuple(in[0]), cfg, r, true);
}

void cmd_trace_identity(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const Lifting L = load_lifting(in[0]);
    const int N = cfg.trunc, n_max = std::max(1, N / 2);
    const MultiAnalyticSymbol theta = lifting_char(L, N, true);
    const TraceIdentityReport rep = trace_identity_check(L, theta, n_max);
    r.outputs["n"] = rep.n;
    r.outputs["lhs"] = rep.lhs;
    r.outputs["rhs_rank"] = rep.rhs_rank;
    r.outputs["rhs_exact"] = rep.rhs_exact;
    r.outputs["rank_DC"] = rep.rank_DC;
    r.outputs["difference"] = rep.difference;
    r.check("row_contraction", row_excess(L.E()), 1e-8);
    // The identity is exact up to the truncation tail when gamma is isometric.
    if (classify(L).gamma_isometric) {
        double worst = 0.0;
        for (size_t k = 0; k < rep.n.size(); ++k) worst = std::max(worst, std::abs(rep.lhs[k] - rep.rhs_exact[k]));
        r.check("trace_identity", worst, 4.0 * phi_tail(L.A, N - n_max) + 1e-10);
    }
}

void cmd_constrain(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple T = load_tuple(in[0]);
    r.check("row_contraction", row_excess(T), cfg.tol);
    const int d = T.d(), N = cfg.trunc;
    const ConstraintSet J = commutators_for(d);
    const SubspaceBasis P = maximal_constrained_piece(T, J, cfg.rank_tol);
    double coinv = 0.0, killed = 0.0;
    for (int i = 0; i < d; ++i) coinv = std::max(coinv, containment_residual(P, T[i].adjoint() * P.basis));
    for (const Polynomial& p : J.polynomials) killed = std::max(killed, (eval_poly(p, T).adjoint() * P.basis).norm());
    r.check("piece_coinvariant", coinv, 1e-8);
    r.check("piece_annihilated", killed, 1e-8);
    const TruncatedFock F(d, N);
    const std::vector<Index> dims = level_dims(F, constrained_fock(F, J, cfg.rank_tol));
    // Commuting words of length n: binomial(n + d - 1, d - 1).
    double wrong = 0.0;
    for (int n = 0; n <= N; ++n) {
        double binom = 1.0;
        for (int k = 1; k < d; ++k) binom = binom * (n + k) / k;
        wrong = std::max(wrong, std::abs(static_cast<double>(dims[static_cast<size_t>(n)]) - binom));
    }
    r.check("level_dims", wrong, 0.0);
    r.outputs["piece_dim"] = P.dim();
    r.outputs["piece_basis"] = matrix_to_json(P.basis);
    r.outputs["level_dims"] = dims;
}

void cmd_cocycle(const std::vector<Input>& in, const RunConfig& cfg, Report& r) {
    const OperatorTuple T = load_tuple(in[0]);
    r.check("row_contraction", row_excess(T), cfg.tol);
    const int N = cfg.trunc;
    const int steps = cfg.steps > 0 ? cfg.steps : N;
    const CMat K = poisson_kernel(T, N);
    json errs = json::array(), bounds = json::array();
    double worst = 0.0;
    for (int k = 1; k <= steps; ++k) {
        const CMat P = [&] {
            try {
                return cocycle_product(T, k, N);
            } catch (const BufferTooSmall& e) {
                throw Halt{"buffer_sufficient", e.what()};
            }
        }();
        const double err = op_norm(P - K);
        const double bound = std::sqrt(phi_tail(T, k));
        errs.push_back(err);
        bounds.push_back(bound);
        worst = std::max(worst, err - bound * (1.0 + 1e-12));
    }
    r.outputs["N"] = N;
    r.outputs["errors"] = errs;
    r.outputs["bounds"] = bounds;
    r.check("error_below_tail_bound", std::max(0.0, worst), 0.0);
}

const std::vector<Command>& commands() {
    static const std::vector<Command> list = {
        {"validate", "check a tuple or lifting file", 1, cmd_validate},
        {"defects", "defect operators and their ranges", 1, cmd_defects},
        {"stability", "limit of Phi^n(1), *-stability and c.n.c. part", 1, cmd_stability},
        {"dilate", "minimal isometric dilation on truncated Fock space", 1, cmd_dilate},
        {"poisson", "Poisson kernel", 1, cmd_poisson},
        {"charfn", "characteristic function of a row contraction", 1, cmd_charfn},
        {"lift-charfn", "characteristic function of a lifting", 1, cmd_lift_charfn},
        {"ext-charfn", "extended characteristic function of an ergodic coisometric tuple", 1, cmd_ext_charfn},
        {"constrained-charfn", "characteristic function under commutator constraints", 1, cmd_constrained_charfn},
        {"equiv", "unitary equivalence of two symbols", 2, cmd_equiv},
        {"compose", "product of two symbols", 2, cmd_compose},
        {"model", "functional model lifting of a tuple from a symbol", 2, cmd_model},
        {"classify", "classification predicates of a lifting", 1, cmd_classify},
        {"fixpoints", "fixed points of the CP map", 1, cmd_fixpoints},
        {"kappa-inv", "lift fixed points of C to fixed points of the lifting", 1, cmd_kappa_inv},
        {"curv", "curvature statistics", 1, cmd_curv},
        {"euler", "Euler statistics", 1, cmd_euler},
        {"trace-identity", "curvature of A against the characteristic function", 1, cmd_trace_identity},
        {"constrain", "maximal commuting piece and constrained Fock dimensions", 1, cmd_constrain},
        {"cocycle", "cocycle products against the Poisson kernel", 1, cmd_cocycle},
    };
    return list;
}

// ---------------------------------------------------------------------------
// Running and reporting.

struct Job {
    std::vector<Input> inputs;
    Report report;
    bool parse_error = false;
    std::string error;
};

json config_json(const RunConfig& cfg) {
    return json{{"trunc", cfg.trunc},        {"tol", cfg.tol},       {"rank_tol", cfg.rank_tol},
                {"tol_inner", cfg.tol_inner}, {"tol_fit", config().tol_fit}, {"seed", cfg.seed},
                {"steps", cfg.steps},        {"allow_nonreduced", cfg.allow_nonreduced},
                {"richardson", cfg.richardson}};
}

json report_json(const Command& c, const Job& job, const RunConfig& cfg) {
    json inputs = json::array();
    for (const Input& in : job.inputs) inputs.push_back(json{{"path", in.path}, {"fnv1a", fnv1a_hex(in.bytes)}});
    json asserts = json::array();
    bool all = true;
    for (const Assertion& a : job.report.assertions) {
        json j{{"name", a.name}, {"pass", a.pass}, {"residual", a.residual}, {"bound", a.bound}};
        if (!a.detail.empty()) j["detail"] = a.detail;
        asserts.push_back(j);
        all = all && a.pass;
    }
    return json{{"command", c.name}, {"inputs", inputs},  {"config", config_json(cfg)},
                {"outputs", job.report.outputs}, {"assertions", asserts}, {"status", all ? "pass" : "fail"}};
}

std::string text_report(const json& rep) {
    std::ostringstream os;
    os << "command " << rep.at("command").get<std::string>() << "\n";
    for (const json& in : rep.at("inputs"))
        os << "input " << in.at("path").get<std::string>() << " fnv1a " << in.at("fnv1a").get<std::string>() << "\n";
    for (const json& a : rep.at("assertions")) {
        os << (a.at("pass").get<bool>() ? "PASS " : "FAIL ") << a.at("name").get<std::string>() << " residual "
           << dump_json(a.at("residual"), 0) << " bound " << dump_json(a.at("bound"), 0);
        if (a.contains("detail")) os << " (" << a.at("detail").get<std::string>() << ")";
        os << "\n";
    }
    for (auto it = rep.at("outputs").begin(); it != rep.at("outputs").end(); ++it)
        os << it.key() << " = " << dump_json(it.value(), 0) << "\n";
    return os.str();
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string number(double v) { return dump_json(json(v), 0); }

std::string trace_csv(const InvariantTrace& t) {
    std::ostringstream os;
    os << "n,statistic,normalization,estimate\n";
    for (size_t k = 0; k < t.n.size(); ++k)
        os << t.n[k] << ',' << csv_quote(t.statistic) << ',' << csv_quote(t.normalization) << ','
           << number(t.sequence[k]) << "\n";
    return os.str();
}

std::string assertions_csv(const Report& r) {
    std::ostringstream os;
    os << "name,pass,residual,bound\n";
    for (const Assertion& a : r.assertions)
        os << csv_quote(a.name) << ',' << (a.pass ? "true" : "false") << ',' << number(a.residual) << ','
           << number(a.bound) << "\n";
    return os.str();
}

void write_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
    }
    fs::rename(tmp, path);
}

std::string safe_name(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
    return s;
}

// (file name, contents) pairs for one finished job.
std::vector<std::pair<std::string, std::string>> render(const Command& c, const Job& job, const RunConfig& cfg) {
    const std::string stem = fs::path(job.inputs.front().path).stem().string() + "." + c.name;
    const json rep = report_json(c, job, cfg);
    if (cfg.report == "text") return {{stem + ".txt", text_report(rep)}};
    if (cfg.report == "csv") {
        std::vector<std::pair<std::string, std::string>> files;
        for (const InvariantTrace& t : job.report.traces)
            files.push_back({stem + "." + safe_name(t.statistic) + ".csv", trace_csv(t)});
        files.push_back({stem + ".assertions.csv", assertions_csv(job.report)});
        return files;
    }
    return {{stem + ".json", dump_json(rep) + "\n"}};
}

Input read_input(const std::string& path) {
    Input in;
    in.path = path;
    in.bytes = read_file(path);
    try {
        in.doc = json::parse(in.bytes);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    return in;
}

void run_job(const Command& c, const std::vector<std::string>& paths, const RunConfig& cfg, Job& job) {
    try {
        for (const std::string& p : paths) job.inputs.push_back(read_input(p));
        c.run(job.inputs, cfg, job.report);
    } catch (const InputError& e) {
        job.parse_error = true;
        job.error = e.what();
    } catch (const Halt& h) {
        job.report.flag(h.name, false, h.detail);
    } catch (const FockdilError& e) {
        job.report.flag("completed", false, e.what());
    }
    if (job.inputs.size() < paths.size()) {
        job.inputs.clear();
        for (const std::string& p : paths) job.inputs.push_back(Input{p, "", json()});
    }
}

int thread_cap() {
    int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("FOCKDIL_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) cap = v;
    }
    return cap;
}

int execute(const Command& c, const std::vector<std::string>& files, const RunConfig& cfg) {
    if (c.arity > 1 && static_cast<int>(files.size()) != c.arity) {
        std::cerr << "fockdil " << c.name << ": expected " << c.arity << " input files\n";
        return 2;
    }
    std::vector<std::vector<std::string>> groups;
    if (c.arity > 1)
        groups.push_back(files);
    else
        for (const std::string& f : files) groups.push_back({f});

    std::vector<Job> jobs(groups.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t k = next++; k < groups.size(); k = next++) run_job(c, groups[k], cfg, jobs[k]);
    };
    const int n_threads = std::min<int>(thread_cap(), static_cast<int>(groups.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    int code = 0;
    for (const Job& job : jobs) {
        if (job.parse_error) {
            std::cerr << "fockdil " << c.name << ": " << job.error << "\n";
            code = 2;
            continue;
        }
        for (const Assertion& a : job.report.assertions)
            if (!a.pass) {
                std::cerr << "fockdil " << c.name << ": assertion '" << a.name << "' failed for "
                          << job.inputs.front().path << "\n";
                code = std::max(code, 1);
            }
        const auto files_out = render(c, job, cfg);
        if (!cfg.out.empty()) {
            fs::create_directories(cfg.out);
            for (const auto& [name, text] : files_out) write_atomic(fs::path(cfg.out) / name, text);
        } else {
            for (size_t k = 0; k < files_out.size(); ++k) {
                if (files_out.size() > 1) std::cout << "# " << files_out[k].first << "\n";
                std::cout << files_out[k].second;
            }
        }
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fockdil: row contractions, liftings and characteristic functions on truncated Fock space"};
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_option("--trunc", cfg.trunc, "truncation level N")->check(CLI::PositiveNumber);
    app.add_option("--tol", cfg.tol, "generic predicate tolerance")->check(CLI::PositiveNumber);
    app.add_option("--rank-tol", cfg.rank_tol, "relative singular-value cutoff")->check(CLI::PositiveNumber);
    app.add_option("--tol-inner", cfg.tol_inner, "innerness tolerance")->check(CLI::PositiveNumber);
    app.add_option("--report", cfg.report, "report format")->check(CLI::IsMember({"json", "text", "csv"}));
    app.add_option("--seed", cfg.seed, "seed for randomized probes");
    app.add_option("--out", cfg.out, "directory for report files");
    app.add_option("--steps", cfg.steps, "cocycle steps (default: --trunc)")->check(CLI::NonNegativeNumber);
    app.add_flag("--allow-nonreduced", cfg.allow_nonreduced, "accept liftings that are not reduced");
    app.add_flag("--richardson", cfg.richardson, "Richardson-extrapolate the symmetric statistics");

    std::map<std::string, std::vector<std::string>> files;
    for (const Command& c : commands()) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("inputs", files[c.name], "input files")->required();
        sub->fallthrough();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    cfg.trunc_set = app.count("--trunc") > 0;
    config().tol = cfg.tol;
    config().rank_tol = cfg.rank_tol;
    config().tol_inner = cfg.tol_inner;

    for (const Command& c : commands())
        if (app.got_subcommand(c.name)) {
            try {
                return execute(c, files[c.name], cfg);
            } catch (const std::exception& e) {
                std::cerr << "fockdil " << c.name << ": " << e.what() << "\n";
                return 2;
            }
        }
    return 2;
}
