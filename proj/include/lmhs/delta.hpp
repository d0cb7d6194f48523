#pragma once

// The splitting of a mixed Hodge structure: the unique real
// delta in (+)_{r,s<0} gl^{r,s} with  Ad(e^{-2i delta}) Y = conj(Y),
// so that (e^{-i delta}.F, W) is split over R.

#include "lmhs/bigrading.hpp"
#include "lmhs/eigenprojection.hpp"

namespace lmhs {

struct DeltaSplitting {
    Mat delta;
    DecreasingFiltration f_hat;  // e^{-i delta}.F
};

/// Solved degree-by-degree in the ad Y weight: with delta = sum_{k>=2}
/// delta_{-k}, the equation is triangular and each stage is one graded
/// extraction.  Post-verified: delta real, delta in Lambda, the defining
/// equation exact, and (F_hat, W) split over R.
inline DeltaSplitting delta_splitting(const DecreasingFiltration& f, const IncreasingFiltration& w) {
    size_t n = w.ambient_dim();
    DeltaSplitting out;

    Bigrading bg = deligne_bigrading(f, w);
    if (w.jumps().size() <= 1) {  // single weight: already split
        out.delta = Mat::zero(n, n);
        out.f_hat = f;
        return out;
    }

    Grading y = weight_grading(bg);
    Mat ybar = y.matrix.conj();

    // ad Y eigenvalues on gl(V): differences of occurring weights
    std::vector<long long> weights = y.eigenvalues();
    std::vector<long long> ad_eigs;
    for (long long a : weights)
        for (long long b : weights) ad_eigs.push_back(a - b);
    Mat ady = ad_matrix(y.matrix);

    int spread = static_cast<int>(weights.back() - weights.front());
    Mat delta = Mat::zero(n, n);
    GQ minus2i = GQ(Rational(0), Rational(-2));
    for (int k = 2; k <= spread; ++k) {
        Mat current = exp_nilpotent(minus2i * delta) * y.matrix * exp_nilpotent(-(minus2i * delta));
        Mat residual = ybar - current;
        Mat proj = eigen_projection(ady, ad_eigs, -k);
        Mat comp = unflatten(proj * flatten(residual), n, n);
        // -2ik delta_{-k} = residual_{-k}
        delta += (GQ(1) / (minus2i * GQ(k))) * comp;
    }
    // verify the defining equation exactly
    Mat e = exp_nilpotent(minus2i * delta);
    Mat e_inv = exp_nilpotent(-(minus2i * delta));
    if (e * y.matrix * e_inv != ybar)
        throw std::logic_error("delta_splitting: solved delta fails Ad(e^{-2i delta}) Y = conj(Y)");
    if (delta.conj() != delta) throw std::logic_error("delta_splitting: delta is not real");

    GlBigrading gl = gl_bigrading(bg);
    if (!gl.lambda().contains(flatten(delta)))
        throw std::logic_error("delta_splitting: delta is not of Hodge type (<0, <0)");

    GQ minus_i = -GQ::i();
    Mat rot = exp_nilpotent(minus_i * delta);
    out.delta = delta;
    out.f_hat = f.apply(rot);

    Bigrading split_bg = deligne_bigrading(out.f_hat, w);
    if (!bigrading_split_over_r(split_bg))
        throw std::logic_error("delta_splitting: (F_hat, W) is not split over R");
    return out;
}

}  // namespace lmhs
