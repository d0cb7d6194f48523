#include <catch2/catch_amalgamated.hpp>

#include "lmhs/heights.hpp"

#include "fixtures.hpp"

using namespace lmhs;

namespace {

HeightProblem problem_from(const MixedHodgeData& d, bool closed_form = false) {
    HeightProblem p(d.W, MonodromyCone(d.nilpotents), unit_vector(4, 0), unit_vector(4, 3));
    p.closed_form_tag = closed_form;
    return p;
}

Rational mu_formula_nonlinear(long long a1, long long a2) { return Rational(4 * a1 * a2, a1 + a2); }

}  // namespace

TEST_CASE("mu on the nonlinear rank-4 family") {
    auto p = problem_from(fixtures::rank4_nonlinear(), true);
    SECTION("slope values at fixed exponents") {
        REQUIRE(mu_curve(p, {Rational(1), Rational(1)}) == Rational(2));
        REQUIRE(mu_curve(p, {Rational(1), Rational(2)}) == Rational(8, 3));
        REQUIRE(mu_curve(p, {Rational(2), Rational(3)}) == Rational(24, 5));
    }
    SECTION("matches the closed formula on a sample grid") {
        for (long long a1 = 1; a1 <= 4; ++a1)
            for (long long a2 = 1; a2 <= 4; ++a2)
                REQUIRE(mu_curve(p, {Rational(a1), Rational(a2)}) == mu_formula_nonlinear(a1, a2));
    }
    SECTION("zero endomorphism has zero slope") {
        REQUIRE(mu_single(p, Mat::zero(4, 4)) == Rational(0));
    }
    SECTION("homogeneity of degree one") {
        Rational base = mu_curve(p, {Rational(1), Rational(1)});
        REQUIRE(mu_curve(p, {Rational(2), Rational(2)}) == base * 2);
        REQUIRE(mu_curve(p, {Rational(3, 2), Rational(3, 2)}) == base * Rational(3, 2));
    }
    SECTION("positivity of exponents is enforced") {
        REQUIRE_THROWS_AS(mu_curve(p, {Rational(0), Rational(1)}), std::invalid_argument);
        REQUIRE_THROWS_AS(mu_curve(p, {Rational(-1), Rational(1)}), std::invalid_argument);
    }
}

TEST_CASE("mu on the linear rank-4 family") {
    auto p = problem_from(fixtures::rank4_linear());
    for (auto [a1, a2] : std::vector<std::pair<long long, long long>>{{1, 1}, {1, 2}, {2, 3}})
        REQUIRE(mu_curve(p, {Rational(a1), Rational(a2)}) == Rational(a1 + a2));
}

TEST_CASE("jump detection") {
    SECTION("nonlinear family jumps") {
        auto p = problem_from(fixtures::rank4_nonlinear());
        auto rep = jump_detect(p);
        REQUIRE(rep.jumps);
        REQUIRE(!rep.linear_on_samples);
        REQUIRE(!rep.simultaneous_grading);
        REQUIRE(!rep.dims_criterion);
    }
    SECTION("linear family has no jumps with a grading certificate") {
        auto p = problem_from(fixtures::rank4_linear());
        auto rep = jump_detect(p);
        REQUIRE(!rep.jumps);
        REQUIRE(rep.linear_on_samples);
        REQUIRE(rep.simultaneous_grading);
    }
    SECTION("trivial graded monodromy certifies no jumps") {
        // generators acting only W_0 -> W_{-2}
        MixedHodgeData d = fixtures::rank4_nonlinear();
        Mat n1(4, 4), n2(4, 4);
        n1(3, 0) = GQ(1);
        n2(3, 0) = GQ(2);
        d.nilpotents = {n1, n2};
        auto p = problem_from(d);
        auto rep = jump_detect(p);
        REQUIRE(rep.graded_monodromy_trivial);
        REQUIRE(rep.dims_criterion);  // both graded dims vanish
        REQUIRE(!rep.jumps);
        REQUIRE(mu_curve(p, {Rational(1), Rational(1)}) == Rational(3));
    }
}

TEST_CASE("height of a single structure") {
    SECTION("split structures have height zero") {
        auto h = height_of_mhs(fixtures::hodge_tate(GQ(3)));
        REQUIRE(h.norm2_delta == Rational(0));
        REQUIRE(h.height == 0.0);
    }
    SECTION("the imaginary twist has positive height") {
        auto h = height_of_mhs(fixtures::hodge_tate(GQ::i()));
        REQUIRE(h.norm2_delta > 0);
        REQUIRE(h.height > 0);
        // |delta|^2 = Tr(delta delta^*) for delta = (e0 -> em2), computed
        // against the metric at F
        auto d = fixtures::hodge_tate(GQ::i());
        auto split = delta_splitting(d.F, d.W);
        auto metric = mixed_hodge_metric(d, d.F);
        REQUIRE(h.norm2_delta == metric.gl_norm2(split.delta));
    }
    SECTION("real twists still split trivially") {
        auto h = height_of_mhs(fixtures::hodge_tate(GQ(Rational(-7, 3))));
        REQUIRE(h.norm2_delta == Rational(0));
    }
}

TEST_CASE("asymptote table") {
    auto p = problem_from(fixtures::rank4_nonlinear(), true);
    SECTION("diagonal curve: closed form equals the asymptote exactly") {
        auto rows = asymptote_table(p, {Rational(1), Rational(1)}, {1e-2, 1e-4, 1e-6});
        for (const auto& r : rows) {
            REQUIRE(r.has_closed_form);
            REQUIRE(std::abs(r.closed_form - r.asymptote) < 1e-9);
        }
    }
    SECTION("asymmetric curve: the difference stays bounded as t -> 0") {
        auto rows = asymptote_table(p, {Rational(1), Rational(2)}, {1e-2, 1e-4, 1e-6, 1e-8});
        double prev = 1e300;
        for (const auto& r : rows) {
            double diff = std::abs(r.closed_form - r.asymptote);
            REQUIRE(diff < 10.0);
            prev = diff;
        }
        (void)prev;
    }
    SECTION("linear family asymptote along (t, t^2)") {
        auto pl = problem_from(fixtures::rank4_linear());
        auto rows = asymptote_table(pl, {Rational(1), Rational(2)}, {1e-3});
        REQUIRE(rows.front().asymptote == Catch::Approx(-3.0 * std::log(1e-3)));
        REQUIRE(!rows.front().has_closed_form);
    }
    SECTION("zero slope gives the constant zero asymptote") {
        MixedHodgeData d = fixtures::rank4_nonlinear();
        Mat n1(4, 4);
        n1(2, 1) = GQ(1);  // e -> f only: slope zero
        d.nilpotents = {n1};
        auto pz = problem_from(d);
        auto rows = asymptote_table(pz, {Rational(1)}, {1e-2, 1e-5});
        for (const auto& r : rows) REQUIRE(r.asymptote == 0.0);
    }
    SECTION("samples outside (0,1) are rejected") {
        REQUIRE_THROWS_AS(asymptote_table(p, {Rational(1), Rational(1)}, {1.5}), std::invalid_argument);
    }
}

TEST_CASE("height problem validation") {
    auto d = fixtures::rank4_nonlinear();
    SECTION("wrong generator lifts are rejected") {
        REQUIRE_THROWS_AS(HeightProblem(d.W, MonodromyCone(d.nilpotents), unit_vector(4, 1), unit_vector(4, 3)),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(HeightProblem(d.W, MonodromyCone(d.nilpotents), unit_vector(4, 0), unit_vector(4, 2)),
                          std::invalid_argument);
    }
}
