#pragma once

// Exact spectral projectors for semisimple operators with known integer
// eigenvalues.  The caller supplies the eigenvalue list; semisimplicity over
// that list is verified by the annihilating polynomial.

#include "lmhs/matrix.hpp"

#include <algorithm>
#include <vector>

namespace lmhs {

/// True iff prod_i (s - lambda_i) = 0, i.e. s is semisimple with spectrum
/// contained in eigs.
inline bool annihilated_by(const Mat& s, const std::vector<long long>& eigs) {
    if (!s.is_square()) return false;
    Mat p = Mat::identity(s.rows());
    for (long long l : eigs) {
        Mat f = s;
        Mat shift = Mat::identity(s.rows());
        shift *= GQ(l);
        p = (f - shift) * p;
    }
    return p.is_zero();
}

/// Lagrange projector onto the lambda-eigenspace of s.  Projectors over a
/// supplied list are idempotent, mutually orthogonal and sum to the
/// identity; lambda outside the list (or not an actual eigenvalue) yields
/// the zero projector.
inline Mat eigen_projection(const Mat& s, const std::vector<long long>& eigs_in, long long lambda) {
    if (!s.is_square()) throw std::invalid_argument("eigen_projection: non-square operator");
    std::vector<long long> eigs = eigs_in;
    std::sort(eigs.begin(), eigs.end());
    eigs.erase(std::unique(eigs.begin(), eigs.end()), eigs.end());
    if (!annihilated_by(s, eigs))
        throw std::domain_error("eigen_projection: operator not semisimple over the supplied eigenvalues");
    if (std::find(eigs.begin(), eigs.end(), lambda) == eigs.end()) return Mat::zero(s.rows(), s.rows());

    Mat p = Mat::identity(s.rows());
    GQ denom(1);
    for (long long mu : eigs) {
        if (mu == lambda) continue;
        Mat shift = Mat::identity(s.rows());
        shift *= GQ(mu);
        p = (s - shift) * p;
        denom *= GQ(lambda - mu);
    }
    p *= GQ(1) / denom;
    return p;
}

/// Eigenvalues actually occurring, filtered from the candidate list by
/// nonzero projector rank.
inline std::vector<long long> occurring_eigenvalues(const Mat& s, const std::vector<long long>& candidates) {
    std::vector<long long> out;
    for (long long l : candidates)
        if (!eigen_projection(s, candidates, l).is_zero()) out.push_back(l);
    return out;
}

/// Component of x in the lambda-eigenspace of ad(y), for y semisimple with
/// the given integer ad-eigenvalues.  This is the workhorse behind all
/// [.]_k graded-component extractions.
inline Mat ad_component(const Mat& y, const std::vector<long long>& ad_eigs, long long lambda, const Mat& x) {
    Mat ady = ad_matrix(y);
    Mat proj = eigen_projection(ady, ad_eigs, lambda);
    return unflatten(proj * flatten(x), x.rows(), x.cols());
}

}  // namespace lmhs
