#pragma once

// The mixed Hodge metric: on a bigraded (F, W) the decomposition is
// orthogonal and  h(u, v) = i^{p-q} Q_{p+q}([u], [conj v])  on I^{p,q}.
// The induced metric on gl(V) is h(A, B) = Tr(A B*) with the adjoint taken
// with respect to the metric on V.

#include "lmhs/bigrading.hpp"
#include "lmhs/mhs.hpp"

namespace lmhs {

struct HermitianForm {
    Mat gram;       // G_{ab} = h(e_a, e_b); h(u, v) = u^T G conj(v)
    Mat gram_t;     // cached transpose
    Mat gram_t_inv; // cached inverse of the transpose

    static HermitianForm from_gram(Mat g) {
        HermitianForm h;
        h.gram = std::move(g);
        h.gram_t = h.gram.transpose();
        auto inv = inverse(h.gram_t);
        if (!inv) throw std::domain_error("hermitian form is degenerate");
        h.gram_t_inv = *inv;
        return h;
    }

    bool is_hermitian() const { return gram.conj_transpose() == gram; }

    GQ value(const Vec& u, const Vec& v) const {
        Vec gv = gram_t * u;  // (u^T G)^T
        GQ acc;
        Vec vc = lmhs::conj(v);
        for (size_t j = 0; j < vc.size(); ++j) acc += gv[j] * vc[j];
        return acc;
    }

    /// |v|^2; exact nonnegative rational for valid data.
    Rational norm2(const Vec& v) const {
        GQ x = value(v, v);
        if (!x.is_real()) throw std::logic_error("hermitian norm has nonzero imaginary part");
        return x.re;
    }

    /// Metric adjoint: h(X u, v) = h(u, adjoint(X) v).
    Mat adjoint(const Mat& x) const { return gram_t_inv * x.conj().transpose() * gram_t; }

    /// Induced inner product on gl(V): Tr(A B*).
    GQ gl_value(const Mat& a, const Mat& b) const { return (a * adjoint(b)).trace(); }

    Rational gl_norm2(const Mat& a) const {
        GQ x = gl_value(a, a);
        if (!x.is_real()) throw std::logic_error("gl norm has nonzero imaginary part");
        return x.re;
    }

    /// Exact positivity by leading principal minors (all real > 0).
    bool positive_definite() const {
        size_t n = gram.rows();
        for (size_t lead = 1; lead <= n; ++lead) {
            Mat sub(lead, lead);
            for (size_t a = 0; a < lead; ++a)
                for (size_t b = 0; b < lead; ++b) sub(a, b) = gram(a, b);
            GQ d = det(sub);
            if (!d.is_real() || d.re <= 0) return false;
        }
        return true;
    }
};

/// Mixed Hodge metric of (W, Q) at the point described by the bigrading
/// (which need not be the data's own F; the orbit engine evaluates the
/// metric at rotated points).
inline HermitianForm mixed_hodge_metric(const MixedHodgeData& d, const Bigrading& bg) {
    size_t n = d.dim;
    // component decomposition of the standard basis
    std::vector<std::map<std::pair<int, int>, Vec>> comps(n);
    for (size_t a = 0; a < n; ++a) comps[a] = bg.decompose(unit_vector(n, a));
    Mat g(n, n);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            GQ acc;
            for (const auto& [pq, ua] : comps[a]) {
                auto it = comps[b].find(pq);
                if (it == comps[b].end()) continue;
                int k = pq.first + pq.second;
                Vec cls_u = d.graded_class(ua, k);
                Vec cls_v = d.graded_class(lmhs::conj(it->second), k);
                acc += i_power(pq.first - pq.second) * d.q_value(k, cls_u, cls_v);
            }
            g(a, b) = acc;
        }
    HermitianForm h = HermitianForm::from_gram(std::move(g));
    if (!h.is_hermitian()) throw std::logic_error("mixed Hodge metric is not hermitian");
    return h;
}

inline HermitianForm mixed_hodge_metric(const MixedHodgeData& d, const DecreasingFiltration& f) {
    return mixed_hodge_metric(d, deligne_bigrading(f, d.W));
}

}  // namespace lmhs
