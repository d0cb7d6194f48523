#include <catch2/catch_amalgamated.hpp>

#include "lmhs/eigenprojection.hpp"
#include "lmhs/matrix.hpp"
#include "lmhs/scalar.hpp"
#include "lmhs/subspace.hpp"

#include <random>

using namespace lmhs;

namespace {

std::mt19937 rng(20260810);

GQ random_gq(int span = 3) {
    std::uniform_int_distribution<int> num(-span, span);
    std::uniform_int_distribution<int> den(1, 3);
    return GQ(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
}

Mat random_mat(size_t r, size_t c, int span = 3) {
    Mat m(r, c);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) m(i, j) = random_gq(span);
    return m;
}

Vec random_vec(size_t n, int span = 3) {
    Vec v(n);
    for (auto& x : v) x = random_gq(span);
    return v;
}

}  // namespace

TEST_CASE("Gaussian rational arithmetic is exact") {
    for (int t = 0; t < 200; ++t) {
        GQ a = random_gq(20), b = random_gq(20);
        REQUIRE((a + b) - b == a);
        REQUIRE(a.conj().conj() == a);
        if (!b.is_zero()) REQUIRE((a / b) * b == a);
        REQUIRE((a * b).conj() == a.conj() * b.conj());
    }
    REQUIRE(GQ::i() * GQ::i() == GQ(-1));
    REQUIRE(i_power(-1) == -GQ::i());
    REQUIRE(i_power(2) == GQ(-1));
}

TEST_CASE("Gaussian rational literals parse and round-trip") {
    REQUIRE(parse_gq("1/2+3/4*i") == GQ(Rational(1, 2), Rational(3, 4)));
    REQUIRE(parse_gq("-i") == -GQ::i());
    REQUIRE(parse_gq("2-i") == GQ(Rational(2), Rational(-1)));
    REQUIRE(parse_gq(" 7 ") == GQ(7));
    REQUIRE(parse_gq("-3/4") == GQ(Rational(-3, 4)));
    REQUIRE_THROWS_AS(parse_gq("1//2"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_gq("1/0"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_gq(""), std::invalid_argument);
    for (int t = 0; t < 50; ++t) {
        GQ z = random_gq(9);
        REQUIRE(parse_gq(to_string(z)) == z);
    }
}

TEST_CASE("matrix multiplication is associative with neutral identity") {
    for (int t = 0; t < 25; ++t) {
        Mat a = random_mat(3, 3), b = random_mat(3, 3), c = random_mat(3, 3);
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(Mat::identity(3) * a == a);
        REQUIRE(a * Mat::identity(3) == a);
    }
}

TEST_CASE("solve_linear: identity, inconsistent, invertible") {
    SECTION("identity") {
        Vec b = random_vec(4);
        auto sol = solve_linear(Mat::identity(4), b);
        REQUIRE(sol.particular.has_value());
        REQUIRE(*sol.particular == b);
        REQUIRE(sol.kernel.empty());
    }
    SECTION("zero matrix with nonzero rhs") {
        Vec b = {GQ(1), GQ(0)};
        auto sol = solve_linear(Mat::zero(2, 2), b);
        REQUIRE(!sol.particular.has_value());
        REQUIRE(sol.kernel.size() == 2);
    }
    SECTION("2x2 invertible Gaussian-rational system, verified by substitution") {
        Mat a{{GQ(Rational(1), Rational(1)), GQ(2)}, {GQ(0), GQ(Rational(1, 2), Rational(-1))}};
        Vec b = {GQ(Rational(3), Rational(1, 2)), GQ(1)};
        auto sol = solve_linear(a, b);
        REQUIRE(sol.particular.has_value());
        REQUIRE(sol.kernel.empty());
        REQUIRE(a * *sol.particular == b);
    }
    SECTION("random consistent systems substitute back") {
        for (int t = 0; t < 30; ++t) {
            Mat a = random_mat(3, 4);
            Vec x = random_vec(4);
            Vec b = a * x;
            auto sol = solve_linear(a, b);
            REQUIRE(sol.particular.has_value());
            REQUIRE(a * *sol.particular == b);
            for (const auto& k : sol.kernel) REQUIRE(is_zero(a * k));
        }
    }
}

TEST_CASE("subspace canonical form and lattice operations") {
    SECTION("intersection: containment case") {
        Subspace e1 = Subspace::span(3, {unit_vector(3, 0)});
        Subspace e12 = Subspace::span(3, {unit_vector(3, 0), unit_vector(3, 1)});
        REQUIRE(intersect(e1, e12) == e1);
    }
    SECTION("intersection: transverse case") {
        Subspace e1 = Subspace::span(2, {unit_vector(2, 0)});
        Subspace e2 = Subspace::span(2, {unit_vector(2, 1)});
        REQUIRE(intersect(e1, e2).is_zero());
    }
    SECTION("span(e1 + i e2) cap span(e1 - i e2) = 0 in dim 2") {
        Vec v1 = {GQ(1), GQ::i()};
        Vec v2 = {GQ(1), -GQ::i()};
        Subspace a = Subspace::span(2, {v1});
        Subspace b = Subspace::span(2, {v2});
        REQUIRE(intersect(a, b).is_zero());
        REQUIRE((a + b).is_full());
    }
    SECTION("ambient mismatch is an error") {
        REQUIRE_THROWS_AS(intersect(Subspace::full(2), Subspace::full(3)), std::invalid_argument);
    }
    SECTION("dimension formula dim(A cap B) + dim(A + B) = dim A + dim B") {
        for (int t = 0; t < 40; ++t) {
            Subspace a = Subspace::span_rows(random_mat(2, 4));
            Subspace b = Subspace::span_rows(random_mat(2, 4));
            REQUIRE(intersect(a, b).dim() + (a + b).dim() == a.dim() + b.dim());
        }
    }
    SECTION("canonical form is stable under basis permutation and rescaling") {
        for (int t = 0; t < 20; ++t) {
            Mat m = random_mat(3, 5);
            Mat p(3, 5);
            p.set_row(0, GQ(Rational(2, 3)) * m.row(2));
            p.set_row(1, m.row(0) + m.row(1));
            p.set_row(2, m.row(1));
            Subspace a = Subspace::span_rows(m);
            Subspace b = Subspace::span_rows(p);
            if (a.dim() == b.dim()) REQUIRE(a == b);
        }
    }
    SECTION("modular law: C <= A implies A cap (B + C) = (A cap B) + C") {
        for (int t = 0; t < 30; ++t) {
            Subspace a = Subspace::span_rows(random_mat(3, 5));
            Subspace b = Subspace::span_rows(random_mat(2, 5));
            if (a.is_zero()) continue;
            Subspace c = Subspace::span(5, {a.basis().row(0)});
            REQUIRE(intersect(a, b + c) == intersect(a, b) + c);
        }
    }
}

TEST_CASE("eigen projections") {
    SECTION("diag(1,-1), lambda = 1") {
        Mat s{{GQ(1), GQ(0)}, {GQ(0), GQ(-1)}};
        Mat p = eigen_projection(s, {1, -1}, 1);
        Mat expect{{GQ(1), GQ(0)}, {GQ(0), GQ(0)}};
        REQUIRE(p == expect);
    }
    SECTION("lambda not an eigenvalue gives the zero projector") {
        Mat s{{GQ(1), GQ(0)}, {GQ(0), GQ(-1)}};
        REQUIRE(eigen_projection(s, {1, -1, 5}, 5).is_zero());
    }
    SECTION("ad(H) on gl(2), lambda = 2: strictly upper triangular part") {
        Mat h{{GQ(1), GQ(0)}, {GQ(0), GQ(-1)}};
        Mat adh = ad_matrix(h);
        Mat p = eigen_projection(adh, {2, 0, -2}, 2);
        Mat e12{{GQ(0), GQ(1)}, {GQ(0), GQ(0)}};
        Mat e21{{GQ(0), GQ(0)}, {GQ(1), GQ(0)}};
        REQUIRE(unflatten(p * flatten(e12), 2, 2) == e12);
        REQUIRE(unflatten(p * flatten(e21), 2, 2).is_zero());
        REQUIRE(unflatten(p * flatten(h), 2, 2).is_zero());
    }
    SECTION("projectors are idempotent, orthogonal, and sum to the identity") {
        Mat h{{GQ(2), GQ(0), GQ(0)}, {GQ(0), GQ(0), GQ(0)}, {GQ(0), GQ(0), GQ(-2)}};
        std::vector<long long> eigs = {2, 0, -2};
        Mat sum = Mat::zero(3, 3);
        for (long long l : eigs) {
            Mat p = eigen_projection(h, eigs, l);
            REQUIRE(p * p == p);
            sum += p;
            for (long long m : eigs)
                if (m != l) REQUIRE((p * eigen_projection(h, eigs, m)).is_zero());
        }
        REQUIRE(sum == Mat::identity(3));
    }
    SECTION("non-semisimple operator is rejected") {
        Mat nilp{{GQ(0), GQ(1)}, {GQ(0), GQ(0)}};
        REQUIRE_THROWS_AS(eigen_projection(nilp, {0}, 0), std::domain_error);
    }
}

TEST_CASE("nilpotent exponentials and ad matrices") {
    Mat n{{GQ(0), GQ(1)}, {GQ(0), GQ(0)}};
    Mat e = exp_nilpotent(n);
    Mat expect{{GQ(1), GQ(1)}, {GQ(0), GQ(1)}};
    REQUIRE(e == expect);
    REQUIRE_THROWS_AS(exp_nilpotent(Mat::identity(2)), std::domain_error);

    for (int t = 0; t < 10; ++t) {
        Mat x = random_mat(3, 3), y = random_mat(3, 3);
        REQUIRE(unflatten(ad_matrix(x) * flatten(y), 3, 3) == bracket(x, y));
    }
}

TEST_CASE("preimage and complement") {
    Mat m{{GQ(1), GQ(0), GQ(0)}, {GQ(0), GQ(0), GQ(0)}, {GQ(0), GQ(0), GQ(1)}};
    Subspace target = Subspace::span(3, {unit_vector(3, 0)});
    Subspace pre = target.preimage(m);
    // m(v) in span(e1)  <=>  v3 = 0
    REQUIRE(pre.dim() == 2);
    REQUIRE(pre.contains(unit_vector(3, 0)));
    REQUIRE(pre.contains(unit_vector(3, 1)));
    REQUIRE(!pre.contains(unit_vector(3, 2)));

    Subspace sub = Subspace::span(4, {unit_vector(4, 1)});
    auto comp = Subspace::full(4).complement_in(sub);
    REQUIRE(comp.size() == 3);
}
