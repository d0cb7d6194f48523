#pragma once

// Isotypical decompositions of gl(V) under an sl2-triple, the Casimir
// machinery, and the decomposition of the weight -1 part of gl into
// irreducible Hodge summands in normal form.

#include "lmhs/bigrading.hpp"
#include "lmhs/eigenprojection.hpp"
#include "lmhs/sl2.hpp"

#include <map>
#include <string>
#include <vector>

namespace lmhs {

/// The Hodge-homogeneous basis of the same sl2: X+- of types (+-1, -+1), Z
/// of type (0,0) at a split base point.
struct XzBasis {
    Mat xplus, z, xminus;

    static XzBasis from_triple(const Sl2Triple& t) {
        GQ half(Rational(1, 2));
        GQ i = GQ::i();
        XzBasis b;
        b.xplus = half * (t.h + i * (t.n0 + t.n0p));
        b.xminus = half * (t.h - i * (t.n0 + t.n0p));
        b.z = i * (t.n0 - t.n0p);
        return b;
    }

    /// (x+, z, x-) is again a standard raising/Cartan/lowering triple.
    bool relations_hold() const {
        return bracket(z, xplus) == GQ(2) * xplus && bracket(z, xminus) == GQ(-2) * xminus &&
               bracket(xplus, xminus) == z;
    }
};

/// Casimir 2 x+ x- + 2 x- x+ + z^2 in a given representation of the basis.
inline Mat casimir_matrix(const Mat& rx_plus, const Mat& rz, const Mat& rx_minus) {
    return GQ(2) * (rx_plus * rx_minus) + GQ(2) * (rx_minus * rx_plus) + rz * rz;
}

/// Isotypical pieces of gl(V) under ad of the triple: g(r) is the span of
/// the irreducibles of highest weight r, cut out by the Casimir eigenvalue
/// r(r+2).
struct IsotypicalDecomposition {
    size_t n = 0;
    std::map<long long, Subspace> components;        // r -> g(r), flattened
    std::map<long long, Subspace> highest_weights;   // r -> ker(ad x+) cap E_r(ad z)

    Subspace component(long long r) const {
        auto it = components.find(r);
        return it == components.end() ? Subspace::zero(n * n) : it->second;
    }

    long long top() const { return components.empty() ? 0 : components.rbegin()->first; }

    bool spans_gl() const {
        std::vector<Subspace> parts;
        for (const auto& [r, s] : components) parts.push_back(s);
        return is_direct_sum_of(Subspace::full(n * n), parts);
    }
};

inline IsotypicalDecomposition isotypical(const Sl2Triple& t) {
    size_t n = t.n0.rows();
    IsotypicalDecomposition out;
    out.n = n;
    XzBasis xz = XzBasis::from_triple(t);
    Mat adxp = ad_matrix(xz.xplus), adxm = ad_matrix(xz.xminus), adz = ad_matrix(xz.z);
    Mat omega = casimir_matrix(adxp, adz, adxm);

    // candidate highest weights: bounded by the spread of the H spectrum,
    // found by exact kernel ranks
    long long rmax = 0;
    for (long long w = -static_cast<long long>(n); w <= static_cast<long long>(n); ++w) {
        Mat shifted = t.h;
        for (size_t j = 0; j < n; ++j) shifted(j, j) -= GQ(w);
        if (!kernel_basis(shifted).empty()) rmax = std::max(rmax, 2 * std::max(w, -w));
    }
    std::vector<long long> casimir_eigs;
    std::vector<long long> weights;
    for (long long r = 0; r <= rmax; ++r) {
        casimir_eigs.push_back(r * (r + 2));
        weights.push_back(r);
        if (r > 0) weights.push_back(-r);
    }
    for (long long r = 0; r <= rmax; ++r) {
        Mat p = eigen_projection(omega, casimir_eigs, r * (r + 2));
        if (p.is_zero()) continue;
        Subspace comp = Subspace::span(n * n, [&] {
            std::vector<Vec> cols;
            for (size_t j = 0; j < n * n; ++j) {
                Vec e(n * n);
                e[j] = GQ(1);
                Vec img = p * e;
                if (!is_zero(img)) cols.push_back(img);
            }
            return cols;
        }());
        out.components[r] = comp;
        Subspace ker_raise = Subspace::span(n * n, kernel_basis(adxp));
        Mat shifted = adz;
        for (size_t j = 0; j < n * n; ++j) shifted(j, j) -= GQ(r);
        Subspace weight_r = Subspace::span(n * n, kernel_basis(shifted));
        out.highest_weights[r] = intersect(intersect(ker_raise, weight_r), comp);
    }
    if (!out.spans_gl()) throw std::domain_error("isotypical: Casimir is not semisimple over r(r+2)");
    return out;
}

// ---------------------------------------------------------------------------
// Irreducible Hodge summands of the weight -1 part.

/// One irreducible summand of the weight -1 Hodge module: either
/// H(d) (x) S(n) with n = 2d-1 (self-conjugate), or E(p,q) (x) S(n) with
/// p + q + n = -1, p > q.  Basis vectors are the elements eps (x) nu_k,
/// nu_k of Hodge type (k, n-k).
struct IrreducibleHodgeSummand {
    enum class Kind { TateTensor, PairTensor } kind;
    int d = 0;      // TateTensor: eps of type (-d,-d)
    int p = 0, q = 0;  // PairTensor: eps types (p,q) and (q,p)
    long long n = 0;   // S(n) factor
    std::vector<Mat> basis_first;   // eps^{p,q} (x) nu_k, k = n..0
    std::vector<Mat> basis_second;  // eps^{q,p} (x) nu_k (PairTensor only)

    std::string label() const {
        if (kind == Kind::TateTensor) return "H(" + std::to_string(d) + ") (x) S(" + std::to_string(n) + ")";
        return "E(" + std::to_string(p) + "," + std::to_string(q) + ") (x) S(" + std::to_string(n) + ")";
    }
};

/// Decomposes the weight -1 part of gl(V) (with respect to the grading
/// entering the triple) into irreducible Hodge summands.  The module must
/// be Hodge: highest-weight spaces refine along the gl bigrading; any
/// leftover means mixed types within one irreducible and is an error.
inline std::vector<IrreducibleHodgeSummand> decompose_weight_minus_one(const Sl2Triple& t,
                                                                       const GlBigrading& gl,
                                                                       const Grading& y) {
    size_t n = t.n0.rows();
    size_t nn = n * n;
    std::vector<IrreducibleHodgeSummand> out;

    Subspace module = Subspace::zero(nn);
    Mat ady = ad_matrix(y.matrix);
    std::vector<long long> ad_eigs = detail::grading_ad_eigs(y);
    {
        Mat pm1 = eigen_projection(ady, ad_eigs, -1);
        std::vector<Vec> vs;
        for (size_t j = 0; j < nn; ++j) {
            Vec e(nn);
            e[j] = GQ(1);
            Vec img = pm1 * e;
            if (!is_zero(img)) vs.push_back(img);
        }
        module = Subspace::span(nn, vs);
    }
    if (module.is_zero()) return out;

    XzBasis xz = XzBasis::from_triple(t);
    Mat adxp = ad_matrix(xz.xplus), adxm = ad_matrix(xz.xminus), adz = ad_matrix(xz.z);
    Subspace ker_raise = Subspace::span(nn, kernel_basis(adxp));

    size_t covered = 0;
    for (long long m = 0; m <= static_cast<long long>(2 * n); ++m) {
        Mat shifted = adz;
        for (size_t j = 0; j < nn; ++j) shifted(j, j) -= GQ(m);
        Subspace hw = intersect(intersect(ker_raise, Subspace::span(nn, kernel_basis(shifted))), module);
        if (hw.is_zero()) continue;

        // refine by Hodge type; the nu_m slot of eps^{p,q} (x) S(m) has
        // type (p+m, q)
        size_t found = 0;
        for (const auto& [rs, piece] : gl.pieces) {
            Subspace part = intersect(hw, piece);
            if (part.is_zero()) continue;
            found += part.dim();
            int ptype = rs.first - static_cast<int>(m);
            int qtype = rs.second;
            if (ptype == qtype) {
                for (const auto& wvec : part.basis_vectors()) {
                    IrreducibleHodgeSummand s;
                    s.kind = IrreducibleHodgeSummand::Kind::TateTensor;
                    s.d = -ptype;
                    s.n = m;
                    // eps (x) nu_k = (k!/m!) (ad x-)^{m-k} hw
                    Mat v = unflatten(wvec, n, n);
                    for (long long k = m; k >= 0; --k) {
                        Rational c(1);
                        for (long long j = k + 1; j <= m; ++j) c /= Rational(j);
                        s.basis_first.push_back(GQ(c) * v);
                        v = bracket(xz.xminus, v);
                    }
                    out.push_back(std::move(s));
                    covered += m + 1;
                }
            } else if (ptype > qtype) {
                for (const auto& wvec : part.basis_vectors()) {
                    IrreducibleHodgeSummand s;
                    s.kind = IrreducibleHodgeSummand::Kind::PairTensor;
                    s.p = ptype;
                    s.q = qtype;
                    s.n = m;
                    Mat v = unflatten(wvec, n, n);
                    Mat vb = v.conj();  // lowest-weight vector of the partner string
                    // partner highest weight: (ad x+)^m conj(w) / m!
                    Mat w2 = vb;
                    Rational mfact(1);
                    for (long long j = 1; j <= m; ++j) {
                        w2 = bracket(xz.xplus, w2);
                        mfact *= Rational(j);
                    }
                    w2 = GQ(Rational(1) / mfact) * w2;
                    Mat a = v, b2 = w2;
                    for (long long k = m; k >= 0; --k) {
                        Rational c(1);
                        for (long long j = k + 1; j <= m; ++j) c /= Rational(j);
                        s.basis_first.push_back(GQ(c) * a);
                        s.basis_second.push_back(GQ(c) * b2);
                        a = bracket(xz.xminus, a);
                        b2 = bracket(xz.xminus, b2);
                    }
                    out.push_back(std::move(s));
                    covered += 2 * (m + 1);
                }
            }
            // strings with ptype < qtype are emitted by their conjugates
        }
        if (found != hw.dim())
            throw std::domain_error("decompose_weight_minus_one: highest-weight space not Hodge-graded");
    }
    std::vector<Vec> all;
    for (const auto& s : out) {
        for (const auto& m : s.basis_first) all.push_back(flatten(m));
        for (const auto& m : s.basis_second) all.push_back(flatten(m));
    }
    if (covered != module.dim() || Subspace::span(nn, all) != module)
        throw std::domain_error("decompose_weight_minus_one: summands do not reassemble the module");
    return out;
}

}  // namespace lmhs
