#pragma once

// Shared fixtures.  Naming convention for basis vectors follows the height
// examples: (e0, e, f, em2) for the rank-4 families, (a, b, c) for the
// three-dimensional two-weight family.

#include "lmhs/mhs.hpp"

namespace fixtures {

using namespace lmhs;

/// dim 1, pure type (0,0), Q = (1).
inline MixedHodgeData dim1_trivial() {
    MixedHodgeData d;
    d.dim = 1;
    d.W = IncreasingFiltration::single_weight(1, 0);
    d.F = DecreasingFiltration(1);
    d.F.set_step(0, Subspace::full(1));
    d.F.set_step(1, Subspace::zero(1));
    d.Q.forms[0] = Mat{{GQ(1)}};
    return d;
}

/// dim 2 Hodge-Tate: weights 0 and -2, F^0 = span(e0 + c em2).
inline MixedHodgeData hodge_tate(const GQ& c) {
    MixedHodgeData d;
    d.dim = 2;
    d.basis_names = {"e0", "em2"};
    d.W = IncreasingFiltration(2);
    d.W.set_step(0, Subspace::full(2));
    d.W.set_step(-2, Subspace::span(2, {unit_vector(2, 1)}));
    d.F = DecreasingFiltration(2);
    d.F.set_step(-1, Subspace::full(2));
    Vec v = {GQ(1), c};
    d.F.set_step(0, Subspace::span(2, {v}));
    d.F.set_step(1, Subspace::zero(2));
    d.Q.forms[0] = Mat{{GQ(1)}};
    d.Q.forms[-2] = Mat{{GQ(1)}};
    return d;
}

/// Adds the nilpotent e0 -> em2 (times mu) to the Hodge-Tate fixture.
inline MixedHodgeData hodge_tate_orbit(const GQ& c, const Rational& mu = Rational(1)) {
    MixedHodgeData d = hodge_tate(c);
    Mat n(2, 2);
    n(1, 0) = GQ(mu);
    d.nilpotents = {n};
    return d;
}

/// dim 3 two-weight family (weights 1, 0): basis (a, b, c),
/// N: a -> b, Q_1(a, b) = 1, Q_0(c, c) = 1.  The split Hodge filtration is
/// F^1 = span(a); an optional twist replaces F by e^{i t (a -> c)}.F with
/// the map phi1 : a -> c.
inline MixedHodgeData type_one(const GQ& twist = GQ(0)) {
    MixedHodgeData d;
    d.dim = 3;
    d.basis_names = {"a", "b", "c"};
    d.W = IncreasingFiltration(3);
    d.W.set_step(1, Subspace::full(3));
    d.W.set_step(0, Subspace::span(3, {unit_vector(3, 2)}));
    d.F = DecreasingFiltration(3);
    d.F.set_step(0, Subspace::full(3));
    // F^1 = span(a - i*twist*c): e^{-i twist phi1}.span(a) with phi1: a -> c
    Vec top = {GQ(1), GQ(0), -GQ::i() * twist};
    d.F.set_step(1, Subspace::span(3, {top}));
    d.F.set_step(2, Subspace::zero(3));
    d.Q.forms[1] = Mat{{GQ(0), GQ(1)}, {GQ(-1), GQ(0)}};
    d.Q.forms[0] = Mat{{GQ(1)}};
    Mat n(3, 3);
    n(1, 0) = GQ(1);
    d.nilpotents = {n};
    return d;
}

/// The rotated point e^{iyN}.F of a one-nilpotent fixture, exact for
/// rational y.
inline DecreasingFiltration rotate(const MixedHodgeData& d, const Rational& y) {
    Mat iyn = GQ(Rational(0), y) * d.combined_nilpotent();
    return d.F.apply(exp_nilpotent(iyn));
}

/// Rank-4 height example with nonlinear slope: mu = 4 a1 a2 / (a1 + a2).
/// Basis (e0, e, f, em2), weights 0 / -1 / -2.
inline MixedHodgeData rank4_nonlinear() {
    MixedHodgeData d;
    d.dim = 4;
    d.basis_names = {"e0", "e", "f", "em2"};
    d.W = IncreasingFiltration(4);
    d.W.set_step(0, Subspace::full(4));
    d.W.set_step(-1, Subspace::span(4, {unit_vector(4, 1), unit_vector(4, 2), unit_vector(4, 3)}));
    d.W.set_step(-2, Subspace::span(4, {unit_vector(4, 3)}));
    d.F = DecreasingFiltration(4);
    d.F.set_step(-1, Subspace::full(4));
    d.F.set_step(0, Subspace::span(4, {unit_vector(4, 0), unit_vector(4, 1)}));
    d.F.set_step(1, Subspace::zero(4));
    d.Q.forms[0] = Mat{{GQ(1)}};
    d.Q.forms[-1] = Mat{{GQ(0), GQ(1)}, {GQ(-1), GQ(0)}};
    d.Q.forms[-2] = Mat{{GQ(1)}};
    Mat n1(4, 4), n2(4, 4);
    n1(2, 0) = GQ(1);
    n1(2, 1) = GQ(1);
    n1(3, 0) = GQ(1);
    n1(3, 1) = GQ(1);
    n2(2, 0) = GQ(-1);
    n2(2, 1) = GQ(1);
    n2(3, 0) = GQ(1);
    n2(3, 1) = GQ(-1);
    d.nilpotents = {n1, n2};
    return d;
}

/// Rank-4 height example with linear slope: mu = a1 + a2.
inline MixedHodgeData rank4_linear() {
    MixedHodgeData d = rank4_nonlinear();
    Mat n1(4, 4), n2(4, 4);
    n1(2, 1) = GQ(1);
    n1(3, 0) = GQ(1);
    n1(3, 1) = GQ(1);
    n2(2, 1) = GQ(1);
    n2(3, 0) = GQ(1);
    n2(3, 1) = GQ(-1);
    d.nilpotents = {n1, n2};
    return d;
}

/// rank4_nonlinear at fixed cone coefficients (a1, a2): single nilpotent.
inline MixedHodgeData rank4_at(const MixedHodgeData& base, long long a1, long long a2) {
    MixedHodgeData d = base;
    d.nilpotents = {GQ(a1) * base.nilpotents[0] + GQ(a2) * base.nilpotents[1]};
    return d;
}

}  // namespace fixtures
