#pragma once

// The Deligne bigrading of a mixed Hodge structure, the grading of W it
// induces, and the induced bigrading of gl(V) with its distinguished
// subalgebras.

#include "lmhs/filtration.hpp"
#include "lmhs/subspace.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lmhs {

struct Bigrading {
    size_t ambient_dim = 0;
    std::map<std::pair<int, int>, Subspace> pieces;  // (p,q) -> I^{p,q}, nonzero only

    const Subspace piece(int p, int q) const {
        auto it = pieces.find({p, q});
        if (it == pieces.end()) return Subspace::zero(ambient_dim);
        return it->second;
    }

    std::vector<std::pair<int, int>> types() const {
        std::vector<std::pair<int, int>> out;
        for (const auto& [pq, s] : pieces) out.push_back(pq);
        return out;
    }

    /// Exact direct-sum certificate.
    bool is_direct_sum() const {
        std::vector<Subspace> parts;
        for (const auto& [pq, s] : pieces) parts.push_back(s);
        return is_direct_sum_of(Subspace::full(ambient_dim), parts);
    }

    /// Decompose v into its (p,q) components.  Requires the direct-sum
    /// certificate to hold.
    std::map<std::pair<int, int>, Vec> decompose(const Vec& v) const {
        // stack all bases as columns and solve
        size_t n = ambient_dim;
        std::vector<std::pair<std::pair<int, int>, size_t>> offsets;
        size_t total = 0;
        for (const auto& [pq, s] : pieces) {
            offsets.push_back({pq, total});
            total += s.dim();
        }
        Mat sys(n, total);
        size_t col = 0;
        for (const auto& [pq, s] : pieces)
            for (size_t j = 0; j < s.dim(); ++j, ++col)
                for (size_t i = 0; i < n; ++i) sys(i, col) = s.basis()(j, i);
        LinearSolution sol = solve_linear(sys, v);
        if (!sol.particular) throw std::logic_error("Bigrading::decompose: not spanning");
        std::map<std::pair<int, int>, Vec> out;
        for (const auto& [pq, off] : offsets) {
            const Subspace& s = pieces.at(pq);
            Vec comp(n);
            for (size_t j = 0; j < s.dim(); ++j) {
                GQ c = (*sol.particular)[off + j];
                if (c.is_zero()) continue;
                comp = comp + c * s.basis().row(j);
            }
            out[pq] = std::move(comp);
        }
        return out;
    }
};

/// I^{p,q} by the closed formula
///   F^p cap W_{p+q} cap ( conj(F)^q cap W_{p+q} +
///                         sum_{j>0} conj(F)^{q-j} cap W_{p+q-1-j} ).
inline Subspace bigrading_piece(const DecreasingFiltration& f, const DecreasingFiltration& fbar,
                                const IncreasingFiltration& w, int p, int q) {
    Subspace tail = intersect(fbar.step(q), w.step(p + q));
    int depth = (w.highest_weight() - w.lowest_weight()) + 2;
    for (int j = 1; j <= depth; ++j) tail = tail + intersect(fbar.step(q - j), w.step(p + q - 1 - j));
    return intersect(intersect(f.step(p), w.step(p + q)), tail);
}

struct BigradingError {
    std::string message;
};

/// The unique functorial bigrading of a mixed Hodge structure (F, W).
/// Fails (direct-sum certificate) exactly when (F, W) is not a MHS.
inline std::optional<Bigrading> try_deligne_bigrading(const DecreasingFiltration& f,
                                                      const IncreasingFiltration& w) {
    if (f.ambient_dim() != w.ambient_dim()) throw std::invalid_argument("bigrading: ambient mismatch");
    Bigrading bg;
    bg.ambient_dim = f.ambient_dim();
    if (w.empty() || f.empty()) return std::nullopt;
    DecreasingFiltration fbar = f.conj();

    int pmin = f.lowest_level() - 1, pmax = f.highest_level() + 1;
    int kmin = w.lowest_weight(), kmax = w.highest_weight();
    for (int p = pmin; p <= pmax; ++p)
        for (int q = pmin; q <= pmax; ++q) {
            if (p + q < kmin || p + q > kmax) continue;
            Subspace s = bigrading_piece(f, fbar, w, p, q);
            if (!s.is_zero()) bg.pieces[{p, q}] = s;
        }
    if (!bg.is_direct_sum()) return std::nullopt;
    // compatibility with F and W
    for (int p = pmin; p <= pmax; ++p) {
        Subspace acc = Subspace::zero(bg.ambient_dim);
        for (const auto& [pq, s] : bg.pieces)
            if (pq.first >= p) acc = acc + s;
        if (acc != f.step(p)) return std::nullopt;
    }
    for (int k = kmin - 1; k <= kmax; ++k) {
        Subspace acc = Subspace::zero(bg.ambient_dim);
        for (const auto& [pq, s] : bg.pieces)
            if (pq.first + pq.second <= k) acc = acc + s;
        if (acc != w.step(k)) return std::nullopt;
    }
    return bg;
}

inline Bigrading deligne_bigrading(const DecreasingFiltration& f, const IncreasingFiltration& w) {
    auto bg = try_deligne_bigrading(f, w);
    if (!bg) throw std::domain_error("deligne_bigrading: (F, W) is not a mixed Hodge structure");
    return *bg;
}

/// conj(I^{p,q}) == I^{q,p} modulo the lower-order part (+)_{r<q,s<p} I^{r,s}.
inline bool bigrading_conjugation_congruence(const Bigrading& bg) {
    for (const auto& [pq, s] : bg.pieces) {
        auto [p, q] = pq;
        Subspace allowed = bg.piece(q, p);
        for (const auto& [rs, t] : bg.pieces)
            if (rs.first < q && rs.second < p) allowed = allowed + t;
        if (!allowed.contains(s.conj())) return false;
    }
    return true;
}

/// True iff conj(I^{p,q}) = I^{q,p} exactly (the structure is split over R).
inline bool bigrading_split_over_r(const Bigrading& bg) {
    for (const auto& [pq, s] : bg.pieces)
        if (s.conj() != bg.piece(pq.second, pq.first)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Gradings of an increasing filtration.

/// A semisimple endomorphism Y with integer eigenvalues whose eigenspaces
/// split W: W_k = W_{k-1} (+) E_k(Y).
struct Grading {
    Mat matrix;
    std::map<int, Subspace> eigenspaces;  // k -> E_k(Y), nonzero only

    Subspace eigenspace(int k) const {
        auto it = eigenspaces.find(k);
        if (it == eigenspaces.end()) return Subspace::zero(matrix.rows());
        return it->second;
    }

    std::vector<long long> eigenvalues() const {
        std::vector<long long> out;
        for (const auto& [k, s] : eigenspaces) out.push_back(k);
        return out;
    }

    bool is_real() const { return matrix.conj() == matrix; }

    /// Builds Y from a list of (weight, eigenspace) pairs forming a direct
    /// sum decomposition of the full space.
    static Grading from_eigenspaces(const std::map<int, Subspace>& spaces) {
        size_t n = 0;
        for (const auto& [k, s] : spaces) n = s.ambient_dim();
        std::vector<Subspace> parts;
        for (const auto& [k, s] : spaces) parts.push_back(s);
        if (!is_direct_sum_of(Subspace::full(n), parts))
            throw std::invalid_argument("Grading: eigenspaces do not form a direct sum");
        // Y = B diag(k) B^{-1} with B columns the concatenated bases
        Mat b(n, n);
        std::vector<long long> diag;
        size_t col = 0;
        for (const auto& [k, s] : spaces)
            for (size_t j = 0; j < s.dim(); ++j, ++col) {
                for (size_t i = 0; i < n; ++i) b(i, col) = s.basis()(j, i);
                diag.push_back(k);
            }
        Mat d(n, n);
        for (size_t j = 0; j < n; ++j) d(j, j) = GQ(static_cast<long long>(diag[j]));
        Grading y;
        y.matrix = b * d * *inverse(b);
        for (const auto& [k, s] : spaces)
            if (!s.is_zero()) y.eigenspaces[k] = s;
        return y;
    }

    /// Recovers the eigenspace decomposition from a matrix known to be a
    /// grading of w.
    static Grading from_matrix(const Mat& y, const IncreasingFiltration& w) {
        Grading g;
        g.matrix = y;
        size_t n = y.rows();
        for (int k : w.jumps()) {
            Mat shifted = y;
            for (size_t j = 0; j < n; ++j) shifted(j, j) -= GQ(k);
            Subspace e = Subspace::span(n, kernel_basis(shifted));
            if (!e.is_zero()) g.eigenspaces[k] = e;
        }
        return g;
    }

    /// Checks W_k = W_{k-1} (+) E_k(Y) for every k.
    bool grades(const IncreasingFiltration& w) const {
        std::vector<Subspace> parts;
        size_t n = matrix.rows();
        for (const auto& [k, s] : eigenspaces) parts.push_back(s);
        if (!is_direct_sum_of(Subspace::full(n), parts)) return false;
        for (int k : w.jumps()) {
            Subspace sum = w.step(k - 1) + eigenspace(k);
            if (sum != w.step(k)) return false;
            if (intersect(w.step(k - 1), eigenspace(k)).dim() != 0) return false;
        }
        size_t total = 0;
        for (const auto& [k, s] : eigenspaces) total += s.dim();
        return total == n;
    }
};

/// The grading of W defined by E_k(Y) = (+)_{p+q=k} I^{p,q}.
inline Grading weight_grading(const Bigrading& bg) {
    std::map<int, Subspace> spaces;
    for (const auto& [pq, s] : bg.pieces) {
        int k = pq.first + pq.second;
        auto it = spaces.find(k);
        if (it == spaces.end())
            spaces[k] = s;
        else
            it->second = it->second + s;
    }
    return Grading::from_eigenspaces(spaces);
}

inline Grading grading_of(const DecreasingFiltration& f, const IncreasingFiltration& w) {
    return weight_grading(deligne_bigrading(f, w));
}

// ---------------------------------------------------------------------------
// Induced bigrading of gl(V).

/// gl(V)^{r,s} = { X : X I^{p,q} <= I^{p+r,q+s} }, together with the
/// distinguished subalgebras entering the curvature tensor and the flow
/// operator:
///   n_plus  = (+)_{r>=0, s<0},   n_zero = gl^{0,0},
///   n_minus = (+)_{r<0, s>=0},   lambda = (+)_{r,s<0},
///   t       = (+)_{r<0} (the tangent-space complement).
struct GlBigrading {
    size_t n = 0;                                    // dim V
    std::map<std::pair<int, int>, Subspace> pieces;  // subspaces of flattened gl(V)

    Subspace piece(int r, int s) const {
        auto it = pieces.find({r, s});
        if (it == pieces.end()) return Subspace::zero(n * n);
        return it->second;
    }

    Subspace sum_where(const std::function<bool(int, int)>& pred) const {
        Subspace acc = Subspace::zero(n * n);
        for (const auto& [rs, s] : pieces)
            if (pred(rs.first, rs.second)) acc = acc + s;
        return acc;
    }

    Subspace n_plus() const {
        return sum_where([](int r, int s) { return r >= 0 && s < 0; });
    }
    Subspace n_zero() const { return piece(0, 0); }
    Subspace n_minus() const {
        return sum_where([](int r, int s) { return r < 0 && s >= 0; });
    }
    Subspace lambda() const {
        return sum_where([](int r, int s) { return r < 0 && s < 0; });
    }
    Subspace horizontal_tangent() const {
        return sum_where([](int r, int) { return r < 0; });
    }

    /// Component of x of type (r, s).
    Mat component(const Mat& x, int r, int s) const {
        auto comps = decompose(x);
        auto it = comps.find({r, s});
        if (it == comps.end()) return Mat::zero(x.rows(), x.cols());
        return it->second;
    }

    std::map<std::pair<int, int>, Mat> decompose(const Mat& x) const {
        Bigrading flat;
        flat.ambient_dim = n * n;
        flat.pieces = pieces;
        auto d = flat.decompose(flatten(x));
        std::map<std::pair<int, int>, Mat> out;
        for (auto& [rs, v] : d)
            if (!is_zero(v)) out[rs] = unflatten(v, n, n);
        return out;
    }
};

/// The bigrading of gl(V) induced by a bigrading of V: for adapted basis
/// vectors, the matrix units sending the I^{p,q} slot to the I^{p+r,q+s}
/// slot span gl^{r,s}.  This agrees with applying the closed formula to the
/// induced filtrations on gl(V) (asserted in the test suite).
inline GlBigrading gl_bigrading(const Bigrading& bg) {
    size_t n = bg.ambient_dim;
    GlBigrading out;
    out.n = n;

    // adapted column basis and the type of each basis vector
    Mat b(n, n);
    std::vector<std::pair<int, int>> type_of;
    size_t col = 0;
    for (const auto& [pq, s] : bg.pieces)
        for (size_t j = 0; j < s.dim(); ++j, ++col) {
            for (size_t i = 0; i < n; ++i) b(i, col) = s.basis()(j, i);
            type_of.push_back(pq);
        }
    Mat binv = *inverse(b);

    std::map<std::pair<int, int>, std::vector<Vec>> spans;
    for (size_t u = 0; u < n; ++u)
        for (size_t v = 0; v < n; ++v) {
            // E_uv in adapted coordinates, mapped back: b E_uv b^{-1}
            Mat e(n, n);
            e(u, v) = GQ(1);
            Mat x = b * e * binv;
            int r = type_of[u].first - type_of[v].first;
            int s = type_of[u].second - type_of[v].second;
            spans[{r, s}].push_back(flatten(x));
        }
    for (auto& [rs, vs] : spans) {
        Subspace sp = Subspace::span(n * n, vs);
        if (!sp.is_zero()) out.pieces[rs] = sp;
    }
    return out;
}

}  // namespace lmhs
