#include "fockdil/fock.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace fockdil {

std::string word_to_string(const Word& w) {
    if (w.empty()) return "0";
    std::ostringstream os;
    for (size_t k = 0; k < w.size(); ++k) {
        if (k) os << '.';
        os << w[k];
    }
    return os.str();
}

Word word_from_string(const std::string& s) {
    if (s == "0" || s.empty()) return {};
    Word w;
    std::istringstream is(s);
    std::string part;
    while (std::getline(is, part, '.')) {
        if (part.empty()) throw DimensionMismatch("malformed word '" + s + "'");
        size_t used = 0;
        const int letter = std::stoi(part, &used);
        if (used != part.size() || letter < 1) throw DimensionMismatch("malformed word '" + s + "'");
        w.push_back(letter);
    }
    return w;
}

Index fock_dim(int d, int N) {
    Index total = 0, p = 1;
    for (int n = 0; n <= N; ++n) {
        total += p;
        p *= d;
    }
    return total;
}

TruncatedFock::TruncatedFock(int d, int N) : d_(d), N_(N) {
    if (d < 1 || N < 0) throw DimensionMismatch("truncated Fock space needs d >= 1 and N >= 0");
    Index p = 1, off = 0;
    for (int n = 0; n <= N; ++n) {
        offsets_.push_back(off);
        pow_.push_back(p);
        off += p;
        p *= d;
    }
    offsets_.push_back(off);
    pow_.push_back(p);
    words_.reserve(static_cast<size_t>(off));
    words_.push_back({});
    for (int n = 1; n <= N; ++n) {
        // Level n is level n-1 extended by one letter on the right, in lex order:
        // word with prefix block (first letter) varying slowest.
        const Index prev_off = offsets_[static_cast<size_t>(n - 1)];
        const Index prev_size = pow_[static_cast<size_t>(n - 1)];
        for (Index k = 0; k < prev_size; ++k) {
            for (int a = 1; a <= d; ++a) {
                Word w = words_[static_cast<size_t>(prev_off + k)];
                w.push_back(a);
                words_.push_back(std::move(w));
            }
        }
    }
}

std::shared_ptr<const TruncatedFock> TruncatedFock::shared(int d, int N) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const TruncatedFock>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{d, N}];
    if (!slot) slot = std::make_shared<const TruncatedFock>(d, N);
    return slot;
}

Index TruncatedFock::index(const Word& w) const {
    const int n = static_cast<int>(w.size());
    if (n > N_) return -1;
    Index within = 0;
    for (int a : w) {
        if (a < 1 || a > d_) throw DimensionMismatch("word letter out of range");
        within = within * d_ + (a - 1);
    }
    return offsets_[static_cast<size_t>(n)] + within;
}

Index TruncatedFock::concat(Index a, Index b) const {
    const int la = length(a), lb = length(b);
    if (la + lb > N_) return -1;
    const Index wa = a - offsets_[static_cast<size_t>(la)];
    const Index wb = b - offsets_[static_cast<size_t>(lb)];
    return offsets_[static_cast<size_t>(la + lb)] + wa * pow_[static_cast<size_t>(lb)] + wb;
}

OperatorTuple creation_ops(const TruncatedFock& F) {
    const Index n = F.total_dim();
    std::vector<CMat> L;
    for (int i = 1; i <= F.d(); ++i) {
        CMat Li = CMat::Zero(n, n);
        for (Index a = 0; a < n; ++a) {
            const Index b = F.prepend(i, a);
            if (b >= 0) Li(b, a) = 1.0;
        }
        L.push_back(std::move(Li));
    }
    return OperatorTuple(std::move(L));
}

ConstraintSet ConstraintSet::commutators(int d) {
    ConstraintSet J;
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
            J.polynomials.push_back({{cplx(1.0), {i, j}}, {cplx(-1.0), {j, i}}});
    return J;
}

ConstraintSet ConstraintSet::q_commutators(int d, const CMat& q) {
    ConstraintSet J;
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
            J.polynomials.push_back({{cplx(1.0), {i, j}}, {-q(j - 1, i - 1), {j, i}}});
    return J;
}

CMat eval_poly(const Polynomial& p, const OperatorTuple& T) {
    CMat out = CMat::Zero(T.dim(), T.dim());
    for (const Monomial& m : p) out += m.coeff * T.word(m.word);
    return out;
}

SubspaceBasis maximal_constrained_piece(const OperatorTuple& T, const ConstraintSet& J,
                                        double rank_tol) {
    const Index n = T.dim();
    SubspaceBasis K = SubspaceBasis::whole(n);
    if (!J.empty() && n > 0) {
        CMat stacked(static_cast<Index>(J.polynomials.size()) * n, n);
        for (size_t k = 0; k < J.polynomials.size(); ++k)
            stacked.middleRows(static_cast<Index>(k) * n, n) = eval_poly(J.polynomials[k], T).adjoint();
        K = kernel_basis(stacked, rank_tol, 1e-10);
    }
    return largest_coinvariant_in(K, T.adjoints(), rank_tol);
}

SubspaceBasis constrained_fock(const TruncatedFock& F, const ConstraintSet& J, double rank_tol) {
    if (J.empty()) return SubspaceBasis::whole(F.total_dim());
    return maximal_constrained_piece(creation_ops(F), J, rank_tol);
}

std::vector<Index> level_dims(const TruncatedFock& F, const SubspaceBasis& S, double) {
    std::vector<Index> dims;
    for (int n = 0; n <= F.N(); ++n) {
        const CMat block = S.basis.middleRows(F.level_offset(n), F.level_size(n));
        if (block.size() == 0) {
            dims.push_back(0);
            continue;
        }
        const SvdResult d = svd(block);
        Index r = 0;
        while (r < d.s.size() && d.s(r) > 1e-6) ++r;
        dims.push_back(r);
    }
    return dims;
}

CMat fock_embedding(int d, int N, int M) {
    const Index a = fock_dim(d, N), b = fock_dim(d, M);
    CMat E = CMat::Zero(b, a);
    E.topRows(a).setIdentity();
    return E;
}

}  // namespace fockdil
