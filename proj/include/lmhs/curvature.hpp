#pragma once

// Holomorphic curvature of the classifying space in the mixed Hodge metric.
// With the decomposition gl = n_plus (+) n_zero (+) n_minus (+) lambda at F
// and t = (+)_{r<0} gl^{r,s},
//
//   R(u, v) = S(u, conj v) - S(v, conj u),
//   S(u, conj v) = P_t ad( (P_+[conj v, u] + 1/2 P_0[conj v, u])
//                        + (P_+[conj u, v] + 1/2 P_0[conj u, v])^* )
//                 + [ P_t ad P_+(conj v), P_t ad (P_+(conj u))^* ],
//
// where ^* is the metric adjoint on V.  The bigraded pieces of gl are
// mutually orthogonal, so P_t, P_+, P_0 are the bigraded component sums.

#include "lmhs/bigrading.hpp"
#include "lmhs/metric.hpp"

namespace lmhs {

struct CurvatureContext {
    size_t n = 0;
    GlBigrading gl;
    HermitianForm metric;  // on V
    Mat p_plus, p_zero, p_tangent;  // projectors on flattened gl(V)

    static CurvatureContext make(const MixedHodgeData& d, const Bigrading& bg) {
        CurvatureContext ctx;
        ctx.n = d.dim;
        ctx.gl = gl_bigrading(bg);
        ctx.metric = mixed_hodge_metric(d, bg);
        ctx.p_plus = ctx.component_projector([](int r, int s) { return r >= 0 && s < 0; });
        ctx.p_zero = ctx.component_projector([](int r, int s) { return r == 0 && s == 0; });
        ctx.p_tangent = ctx.component_projector([](int r, int) { return r < 0; });
        return ctx;
    }

    /// Projector (on flattened gl) onto the sum of pieces selected by pred.
    Mat component_projector(const std::function<bool(int, int)>& pred) const {
        size_t nn = n * n;
        // Build change of basis: columns grouped by (r,s) pieces.
        Mat b(nn, nn);
        std::vector<bool> keep(nn, false);
        size_t col = 0;
        for (const auto& [rs, s] : gl.pieces)
            for (size_t j = 0; j < s.dim(); ++j, ++col) {
                for (size_t i = 0; i < nn; ++i) b(i, col) = s.basis()(j, i);
                keep[col] = pred(rs.first, rs.second);
            }
        if (col != nn) throw std::logic_error("gl bigrading does not span gl(V)");
        Mat binv = *inverse(b);
        Mat diag(nn, nn);
        for (size_t j = 0; j < nn; ++j) diag(j, j) = keep[j] ? GQ(1) : GQ(0);
        return b * diag * binv;
    }

    Mat project(const Mat& p, const Mat& x) const { return unflatten(p * flatten(x), n, n); }

    bool in_tangent(const Mat& u) const {
        return (flatten(project(p_tangent, u)) == flatten(u));
    }

    /// S(u, conj v) as an operator on flattened gl.
    Mat s_operator(const Mat& u, const Mat& v) const {
        Mat vb = v.conj(), ub = u.conj();
        Mat inner = project(p_plus, bracket(vb, u)) + GQ(Rational(1, 2)) * project(p_zero, bracket(vb, u));
        Mat inner2 = project(p_plus, bracket(ub, v)) + GQ(Rational(1, 2)) * project(p_zero, bracket(ub, v));
        Mat elem = inner + metric.adjoint(inner2);
        Mat first = p_tangent * ad_matrix(elem);
        Mat a1 = p_tangent * ad_matrix(project(p_plus, vb));
        Mat a2 = p_tangent * ad_matrix(metric.adjoint(project(p_plus, ub)));
        return first + (a1 * a2 - a2 * a1);
    }

    /// R(u, v) = S(u, conj v) - S(v, conj u), an endomorphism of t.
    Mat curvature_operator(const Mat& u, const Mat& v) const {
        if (!in_tangent(u) || !in_tangent(v))
            throw std::invalid_argument("curvature: direction not in the horizontal tangent space");
        return s_operator(u, v) - s_operator(v, u);
    }

    /// Holomorphic sectional curvature h(S(u, conj u) u, u) / h(u, u)^2.
    Rational sectional(const Mat& u) const {
        if (!in_tangent(u)) throw std::invalid_argument("curvature: direction not in the horizontal tangent space");
        Mat su = unflatten(s_operator(u, u) * flatten(u), n, n);
        GQ num = metric.gl_value(su, u);
        Rational den = metric.gl_norm2(u);
        if (den == 0) throw std::invalid_argument("curvature: zero direction");
        if (!num.is_real()) throw std::logic_error("sectional curvature is not real");
        return num.re / (den * den);
    }
};

}  // namespace lmhs
