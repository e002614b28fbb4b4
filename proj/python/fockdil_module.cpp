// Python bindings for the fockdil core.  Matrices cross the boundary as
// complex NumPy arrays; words are dot-joined strings ("0" is the empty word).

#include "fockdil/charfn.hpp"
#include "fockdil/cpmaps.hpp"
#include "fockdil/dilation.hpp"
#include "fockdil/instances.hpp"
#include "fockdil/invariants.hpp"
#include "fockdil/io.hpp"
#include "fockdil/liftings.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fockdil;

namespace {

py::dict trace_dict(const InvariantTrace& t) {
    py::dict out;
    out["statistic"] = t.statistic;
    out["normalization"] = t.normalization;
    out["n"] = t.n;
    out["sequence"] = t.sequence;
    out["estimate"] = t.estimate;
    out["method"] = t.method;
    return out;
}

py::dict symbol_coeffs(const MultiAnalyticSymbol& s) {
    py::dict out;
    const TruncatedFock& F = s.fock();
    for (Index a = 0; a < F.total_dim(); ++a) out[py::str(word_to_string(F.word(a)))] = s.coeff(a);
    return out;
}

}  // namespace

PYBIND11_MODULE(_fockdil, m) {
    m.doc() = "Row contractions, liftings and characteristic functions on truncated Fock space";

    static py::exception<FockdilError> error(m, "FockdilError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const FockdilError& e) {
            py::set_error(error, e.what());
        }
    });

    py::class_<Config>(m, "Config")
        .def_readwrite("rank_tol", &Config::rank_tol)
        .def_readwrite("tol_fix", &Config::tol_fix)
        .def_readwrite("tol_fit", &Config::tol_fit)
        .def_readwrite("tol_inner", &Config::tol_inner)
        .def_readwrite("tol", &Config::tol);
    m.def("config", &config, py::return_value_policy::reference);

    py::class_<OperatorTuple>(m, "OperatorTuple")
        .def(py::init<std::vector<CMat>>(), py::arg("mats"))
        .def_static("empty", &OperatorTuple::empty, py::arg("d"))
        .def_property_readonly("d", &OperatorTuple::d)
        .def_property_readonly("dim", &OperatorTuple::dim)
        .def_property_readonly("mats", &OperatorTuple::mats)
        .def("row", &OperatorTuple::row)
        .def("row_gram", &OperatorTuple::row_gram)
        .def("__getitem__", [](const OperatorTuple& T, int i) {
            if (i < 0 || i >= T.d()) throw py::index_error();
            return T[i];
        })
        .def("__len__", &OperatorTuple::d);

    m.def("is_row_contraction", &is_row_contraction, py::arg("T"), py::arg("tol") = 1e-9);
    m.def("is_coisometric", [](const OperatorTuple& T) { return is_coisometric(T); }, py::arg("T"));
    m.def("is_commuting", [](const OperatorTuple& T) { return is_commuting(T); }, py::arg("T"));
    m.def("is_ergodic", &is_ergodic, py::arg("T"));
    m.def("defects", [](const OperatorTuple& T) {
        const DefectData dd = defects(T);
        py::dict out;
        out["Dstar"] = dd.Dstar;
        out["Dfull"] = dd.Dfull;
        out["defect_star_basis"] = dd.defect_star.basis;
        out["defect_basis"] = dd.defect.basis;
        return out;
    }, py::arg("T"));
    m.def("cp_apply", [](const OperatorTuple& T, const CMat& X, long n) { return CPMap(T).apply(X, n); },
          py::arg("T"), py::arg("X"), py::arg("n") = 1);
    m.def("fixed_points", [](const OperatorTuple& T) { return fixed_points(CPMap(T)); }, py::arg("T"));
    m.def("poisson_kernel", py::overload_cast<const OperatorTuple&, int>(&poisson_kernel), py::arg("T"),
          py::arg("N"));
    m.def("creation_ops", [](int d, int N) { return creation_ops(TruncatedFock(d, N)); }, py::arg("d"),
          py::arg("N"));
    m.def("fock_dim", &fock_dim, py::arg("d"), py::arg("N"));

    py::class_<MultiAnalyticSymbol>(m, "Symbol")
        .def(py::init<int, int, Index, Index>(), py::arg("d"), py::arg("N"), py::arg("dom_dim"), py::arg("cod_dim"))
        .def_static("from_stacked", &MultiAnalyticSymbol::from_stacked, py::arg("d"), py::arg("N"),
                    py::arg("stacked"), py::arg("cod_dim"))
        .def_property_readonly("d", &MultiAnalyticSymbol::d)
        .def_property_readonly("N", &MultiAnalyticSymbol::N)
        .def_property_readonly("dom_dim", &MultiAnalyticSymbol::dom_dim)
        .def_property_readonly("cod_dim", &MultiAnalyticSymbol::cod_dim)
        .def("coeff", [](const MultiAnalyticSymbol& s, const std::string& w) { return s.coeff(word_from_string(w)); },
             py::arg("word"))
        .def("set", [](MultiAnalyticSymbol& s, const std::string& w, const CMat& c) { s.set(word_from_string(w), c); },
             py::arg("word"), py::arg("matrix"))
        .def("coeffs", &symbol_coeffs)
        .def("stacked", &MultiAnalyticSymbol::stacked)
        .def("resized", &MultiAnalyticSymbol::resized, py::arg("N_out"))
        .def("times", &MultiAnalyticSymbol::times, py::arg("v"))
        .def("degree", &MultiAnalyticSymbol::degree, py::arg("tol") = 1e-14)
        .def("to_json", [](const MultiAnalyticSymbol& s) { return dump_json(symbol_to_json(s)); })
        .def_static("from_json", [](const std::string& text) { return symbol_from_json(json::parse(text)); });

    m.def("extend", &extend, py::arg("theta"), py::arg("N_out"));
    m.def("compose", &compose, py::arg("theta"), py::arg("eta"), py::arg("N_out") = std::nullopt);
    m.def("equivalent", [](const MultiAnalyticSymbol& a, const MultiAnalyticSymbol& b, double tol) {
        const Equivalence e = equivalent(a, b, tol);
        return py::make_tuple(e.equivalent, e.residual, e.v ? py::cast(*e.v) : py::none());
    }, py::arg("theta"), py::arg("theta_p"), py::arg("tol") = 1e-6);
    m.def("gram_defect", [](const MultiAnalyticSymbol& s) {
        const GramDefect g = gram_defect(s);
        py::dict out;
        out["gram0"] = g.gram0;
        out["gram0_defect"] = g.gram0_defect;
        out["worst_cross"] = g.worst_cross;
        out["inner"] = g.inner;
        return out;
    }, py::arg("theta"));
    m.def("popescu_char", &popescu_char, py::arg("T"), py::arg("N"));

    py::class_<Lifting>(m, "Lifting")
        .def_readonly("C", &Lifting::C)
        .def_readonly("A", &Lifting::A)
        .def_readonly("B", &Lifting::B)
        .def_readonly("gamma", &Lifting::gamma)
        .def_readonly("residual", &Lifting::residual)
        .def("E", &Lifting::E)
        .def("to_json", [](const Lifting& L) { return dump_json(lifting_to_json(L)); });

    m.def("lift_from_gamma", &lift_from_gamma, py::arg("C"), py::arg("A"), py::arg("gamma"));
    m.def("recover_gamma", [](const OperatorTuple& C, const OperatorTuple& A, const std::vector<CMat>& B) {
        return recover_gamma(C, A, B);
    }, py::arg("C"), py::arg("A"), py::arg("B"));
    m.def("classify", [](const Lifting& L) {
        const Classification c = classify(L);
        py::dict out;
        out["coisometric_lifting"] = c.is_coisometric_lifting;
        out["subisometric"] = c.is_subisometric;
        out["resolving"] = c.is_resolving;
        out["reduced"] = c.is_reduced;
        out["gamma_isometric"] = c.gamma_isometric;
        out["star_stable_A"] = c.star_stable_A;
        out["cnc_A"] = c.cnc_A;
        return out;
    }, py::arg("L"));
    m.def("lifting_char", &lifting_char, py::arg("L"), py::arg("N"), py::arg("allow_nonreduced") = false);
    m.def("functional_model", &functional_model, py::arg("C"), py::arg("theta"), py::arg("N"));
    m.def("extended_char_values", [](const OperatorTuple& A, const CVec& Omega, int N) {
        // Values at e_i (x) Omega written back in C^d, keyed by word.
        const ExtendedChar ec = extended_char(A, eigen_frame(A, Omega), N);
        const CVec O = ec.frame.col(0);
        py::list out;
        for (int i = 0; i < A.d(); ++i) {
            py::dict per;
            const CVec x = kron(CVec::Unit(A.d(), i), O);
            const TruncatedFock& F = ec.raw.fock();
            for (Index a = 0; a < F.total_dim(); ++a)
                per[py::str(word_to_string(F.word(a)))] = CVec(ec.eps * ec.raw.coeff(a) * x);
            out.append(per);
        }
        return out;
    }, py::arg("A"), py::arg("Omega"), py::arg("N"));

    m.def("curvature_free", [](const OperatorTuple& T, int n_max) {
        const FreeInvariants f = curvature_free(T, n_max);
        py::dict out;
        out["curvature"] = trace_dict(f.curvature);
        out["curvature_kernel"] = trace_dict(f.curvature_kernel);
        out["euler"] = trace_dict(f.euler);
        out["worst_gap"] = f.worst_gap;
        return out;
    }, py::arg("T"), py::arg("n_max"));
    m.def("curvature_sym", [](const OperatorTuple& T, int n_max, bool richardson) {
        const SymInvariants s = curvature_sym(T, n_max, richardson, nullptr, false);
        py::dict out;
        out["curvature"] = trace_dict(s.curvature);
        out["euler"] = trace_dict(s.euler);
        out["raw_trace"] = s.raw_trace;
        return out;
    }, py::arg("T"), py::arg("n_max"), py::arg("richardson") = false);

    m.def("ergodic_pair_3d", [] {
        const ErgodicPair p = ergodic_pair_3d();
        return py::make_tuple(p.A, p.Omega, p.omega);
    });
    m.def("weighted_shift_lifting", &weighted_shift_lifting, py::arg("lam"), py::arg("K"), py::arg("M"));
    m.def("scaled_shift_lifting", &scaled_shift_lifting, py::arg("t"), py::arg("K"));
    m.def("creation_lifting", &creation_lifting, py::arg("M"));

    m.def("tuple_from_json", [](const std::string& text) { return tuple_from_json(json::parse(text)); });
    m.def("tuple_to_json", [](const OperatorTuple& T) { return dump_json(tuple_to_json(T)); });
}
