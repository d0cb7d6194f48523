#pragma once

// sl2-triples, the canonical grading Y attached to (N, relY, W) for short
// weight filtrations, and the splitting N = N_0 + N_{-2}.

#include "lmhs/bigrading.hpp"
#include "lmhs/eigenprojection.hpp"

namespace lmhs {

/// Triple with the lower-triangular convention: [H, N0] = -2 N0,
/// [H, N0p] = 2 N0p, [N0p, N0] = H.
struct Sl2Triple {
    Mat n0, h, n0p;

    bool relations_hold() const {
        return bracket(h, n0) == GQ(-2) * n0 && bracket(h, n0p) == GQ(2) * n0p && bracket(n0p, n0) == h;
    }
    bool is_zero() const { return n0.is_zero() && h.is_zero() && n0p.is_zero(); }
};

/// Completes (N0, H) with [H, N0] = -2 N0 to a triple.  The completion is
/// unique when it exists (the difference of two candidates would be a
/// lowest-weight vector of positive weight).
inline Mat sl2_complete(const Mat& n0, const Mat& h) {
    size_t n = n0.rows();
    if (bracket(h, n0) != GQ(-2) * n0) throw std::invalid_argument("sl2_complete: [H, N0] != -2 N0");
    // unknown X: [H, X] = 2X  and  [X, N0] = H
    Mat adh = ad_matrix(h), adn0 = ad_matrix(n0);
    size_t nn = n * n;
    Mat sys(2 * nn, nn);
    Vec rhs(2 * nn);
    for (size_t i = 0; i < nn; ++i)
        for (size_t j = 0; j < nn; ++j) {
            sys(i, j) = adh(i, j) - (i == j ? GQ(2) : GQ(0));
            sys(nn + i, j) = -adn0(i, j);  // [X, N0] = -ad(N0) X
        }
    Vec fh = flatten(h);
    for (size_t i = 0; i < nn; ++i) rhs[nn + i] = fh[i];
    LinearSolution sol = solve_linear(sys, rhs);
    if (!sol.particular) throw std::domain_error("sl2_complete: (N0, H) is not part of an sl2-triple");
    Mat x = unflatten(*sol.particular, n, n);
    Sl2Triple t{n0, h, x};
    if (!t.relations_hold()) throw std::logic_error("sl2_complete: completed triple fails its relations");
    return x;
}

struct Sl2Data {
    Grading rel_y;       // grading of the relative weight filtration
    Grading y;           // the canonical grading of W
    Sl2Triple triple;    // (N0, H, N0p) with H = relY - Y
    Mat n0;              // = triple.n0
    Mat n_minus2;        // the depth-2 component of N
};

namespace detail {

/// The relY-compatible base grading: E_k = (+)_a complement of
/// E_a(relY) cap W_{k-1} inside E_a(relY) cap W_k.
inline Grading base_grading(const Grading& rel_y, const IncreasingFiltration& w) {
    size_t n = w.ambient_dim();
    std::map<int, Subspace> spaces;
    for (int k : w.jumps()) {
        Subspace acc = Subspace::zero(n);
        for (const auto& [a, ea] : rel_y.eigenspaces) {
            Subspace hi = intersect(ea, w.step(k));
            Subspace lo = intersect(ea, w.step(k - 1));
            for (const auto& v : hi.complement_in(lo)) acc = acc + Subspace::span(n, {v});
        }
        spaces[k] = acc;
    }
    return Grading::from_eigenspaces(spaces);
}

inline std::vector<long long> grading_ad_eigs(const Grading& y) {
    std::vector<long long> eigs;
    for (long long a : y.eigenvalues())
        for (long long b : y.eigenvalues()) eigs.push_back(a - b);
    return eigs;
}

}  // namespace detail

/// Component of x of ad-Y weight k.
inline Mat grading_component(const Grading& y, const Mat& x, long long k) {
    return ad_component(y.matrix, detail::grading_ad_eigs(y), k, x);
}

/// N = N_0 + N_{-1} + N_{-2} with respect to ad Y; the sum must
/// reconstruct N (weight filtrations of length at most three).
inline std::tuple<Mat, Mat, Mat> split_nilpotent(const Mat& n, const Grading& y) {
    Mat n0 = grading_component(y, n, 0);
    Mat nm1 = grading_component(y, n, -1);
    Mat nm2 = grading_component(y, n, -2);
    if (n0 + nm1 + nm2 != n)
        throw std::domain_error("split_nilpotent: N has components outside ad-Y weights 0, -1, -2");
    return {n0, nm1, nm2};
}

/// The unique grading Y of W with [relY, Y] = 0 and
/// [N - N_0, N_0^+] = 0, for W of the two supported short shapes.
/// Computed by a staged linear solve and post-verified against all of the
/// defining conditions; failure of the verification throws.
inline Grading deligne_grading(const Mat& n, const Grading& rel_y, const IncreasingFiltration& w) {
    size_t dim = w.ambient_dim();
    if (bracket(rel_y.matrix, n) != GQ(-2) * n)
        throw std::invalid_argument("deligne_grading: [relY, N] != -2N");
    if (!w.preserved_by(rel_y.matrix)) throw std::invalid_argument("deligne_grading: relY does not preserve W");
    {
        auto js = w.jumps();
        int spread = js.back() - js.front();
        if (js.size() > 3 || spread > 2)
            throw std::domain_error("deligne_grading: weight filtration longer than the supported shapes");
    }

    Grading yb = detail::base_grading(rel_y, w);
    if (bracket(rel_y.matrix, yb.matrix) != Mat::zero(dim, dim))
        throw std::logic_error("deligne_grading: base grading does not commute with relY");
    if (n.is_zero()) return yb;

    std::vector<long long> ad_eigs = detail::grading_ad_eigs(yb);
    Mat adyb = ad_matrix(yb.matrix);
    size_t nn = dim * dim;

    // Stage 1: alpha in E_{-1}(ad Yb), [relY, alpha] = 0,
    //          [alpha, N0] = N_{-1}  (kills the depth-1 component of N).
    Mat n0b = unflatten(eigen_projection(adyb, ad_eigs, 0) * flatten(n), dim, dim);
    Mat nm1b = unflatten(eigen_projection(adyb, ad_eigs, -1) * flatten(n), dim, dim);
    Mat y1 = yb.matrix;
    {
        Mat p_not_m1 = Mat::identity(nn) - eigen_projection(adyb, ad_eigs, -1);
        Mat adrel = ad_matrix(rel_y.matrix);
        Mat adn0 = ad_matrix(n0b);
        // rows: (1 - P_{-1}) alpha = 0 ; ad(relY) alpha = 0 ; -ad(N0) alpha = flatten(N_{-1})
        Mat sys(3 * nn, nn);
        Vec rhs(3 * nn);
        for (size_t i = 0; i < nn; ++i)
            for (size_t j = 0; j < nn; ++j) {
                sys(i, j) = p_not_m1(i, j);
                sys(nn + i, j) = adrel(i, j);
                sys(2 * nn + i, j) = -adn0(i, j);
            }
        Vec fn = flatten(nm1b);
        for (size_t i = 0; i < nn; ++i) rhs[2 * nn + i] = fn[i];
        LinearSolution sol = solve_linear(sys, rhs);
        if (!sol.particular) throw std::domain_error("deligne_grading: stage-1 system inconsistent");
        Mat alpha = unflatten(*sol.particular, dim, dim);
        Mat g = Mat::identity(dim) + alpha;
        y1 = g * yb.matrix * *inverse(g);
    }
    Grading y1g = Grading::from_matrix(y1, w);

    // Stage 2: alpha2 in E_{-2}(ad Y1), [relY, alpha2] = 0,
    //          [N_{-2} - [alpha2, N0], N0p] = 0.
    Mat ady1 = ad_matrix(y1);
    Mat n0_1 = unflatten(eigen_projection(ady1, ad_eigs, 0) * flatten(n), dim, dim);
    Mat nm2_1 = unflatten(eigen_projection(ady1, ad_eigs, -2) * flatten(n), dim, dim);
    Mat h1 = rel_y.matrix - y1;
    Mat n0p_1 = n0_1.is_zero() && h1.is_zero() ? Mat::zero(dim, dim) : sl2_complete(n0_1, h1);
    Mat y_final = y1;
    {
        Mat p_not_m2 = Mat::identity(nn) - eigen_projection(ady1, ad_eigs, -2);
        Mat adrel = ad_matrix(rel_y.matrix);
        Mat adn0 = ad_matrix(n0_1);
        Mat adn0p = ad_matrix(n0p_1);
        Mat cond = adn0p * adn0;  // alpha2 -> [[alpha2, N0], N0p] = -ad(N0p) ad(N0) ... sign below
        Mat sys(3 * nn, nn);
        Vec rhs(3 * nn);
        // [N_{-2}, N0p] - [[alpha2, N0], N0p] = 0
        //   [[alpha2,N0],N0p] = -ad(N0p)( [alpha2,N0] ) = -ad(N0p)( -ad(N0) alpha2 )
        Vec target = flatten(bracket(nm2_1, n0p_1));
        for (size_t i = 0; i < nn; ++i)
            for (size_t j = 0; j < nn; ++j) {
                sys(i, j) = p_not_m2(i, j);
                sys(nn + i, j) = adrel(i, j);
                sys(2 * nn + i, j) = cond(i, j);
            }
        for (size_t i = 0; i < nn; ++i) rhs[2 * nn + i] = target[i];
        LinearSolution sol = solve_linear(sys, rhs);
        if (!sol.particular) throw std::domain_error("deligne_grading: stage-2 system inconsistent");
        Mat alpha2 = unflatten(*sol.particular, dim, dim);
        y_final = y1 + GQ(2) * alpha2;
    }

    Grading y = Grading::from_matrix(y_final, w);
    // Post-verification: all conditions of the canonical grading.
    if (!y.grades(w)) throw std::logic_error("deligne_grading: output does not grade W");
    if (!bracket(rel_y.matrix, y.matrix).is_zero())
        throw std::logic_error("deligne_grading: [relY, Y] != 0");
    auto [n0, nm1, nm2] = split_nilpotent(n, y);
    if (!nm1.is_zero()) throw std::logic_error("deligne_grading: depth-1 component of N survives");
    Mat h = rel_y.matrix - y.matrix;
    Mat n0p = (n0.is_zero() && h.is_zero()) ? Mat::zero(dim, dim) : sl2_complete(n0, h);
    if (!bracket(n - n0, n0p).is_zero())
        throw std::logic_error("deligne_grading: [N - N0, N0p] != 0");
    if (!bracket(n0, nm2).is_zero()) throw std::logic_error("deligne_grading: [N0, N_{-2}] != 0");
    return y;
}

/// Full sl2 data for an orbit: canonical grading, triple, and splitting.
inline Sl2Data make_sl2_data(const Mat& n, const Grading& rel_y, const IncreasingFiltration& w) {
    Sl2Data out;
    out.rel_y = rel_y;
    out.y = deligne_grading(n, rel_y, w);
    auto [n0, nm1, nm2] = split_nilpotent(n, out.y);
    out.n0 = n0;
    out.n_minus2 = nm2;
    Mat h = rel_y.matrix - out.y.matrix;
    size_t dim = w.ambient_dim();
    Mat n0p = (n0.is_zero() && h.is_zero()) ? Mat::zero(dim, dim) : sl2_complete(n0, h);
    out.triple = Sl2Triple{n0, h, n0p};
    if (!out.triple.is_zero() && !out.triple.relations_hold())
        throw std::logic_error("make_sl2_data: triple relations fail");
    return out;
}

}  // namespace lmhs
