#include "doctest.h"
#include "fedosov/lie_pair.hpp"
#include "fixtures.hpp"

using namespace fedosov;
using namespace fedosov::testing;

TEST_CASE("validation accepts the shipped presentations") {
    CHECK(validate(abelian_point()).ok());
    CHECK(validate(solvable_point()).ok());
    CHECK(validate(heisenberg_point()).ok());
    CHECK(validate(chart_1d()).ok());
    CHECK(validate(chart_2d()).ok());
    CHECK(validate(chart_mixed()).ok());
}

TEST_CASE("validation reports A-closure violations") {
    // rank-2 A with [a1, a2] = b: the bracket of two A-letters leaves A
    Frame f{1, 2, BaseMode::Point, 0};
    LiePairPresentation p(f, 4);
    p.set_bracket(2, 3, 1, f.cconst(1));
    auto rep = validate(p);
    CHECK_FALSE(rep.ok());
    bool found = false;
    for (auto& v : rep.violations) found |= v.find("A-closure") != std::string::npos;
    CHECK(found);
}

TEST_CASE("validation reports Jacobi violations with the frame triple") {
    Frame f{2, 1, BaseMode::Point, 0};
    LiePairPresentation p(f, 4);
    p.set_bracket(3, 1, 2, f.cconst(1));
    p.set_bracket(1, 2, 1, f.cconst(1));  // [b1,b2] = b1 breaks Jacobi with [a,b1] = b2
    auto rep = validate(p);
    CHECK_FALSE(rep.ok());
    bool found = false;
    for (auto& v : rep.violations) found |= v.find("Jacobi") != std::string::npos;
    CHECK(found);
}

TEST_CASE("exterior differential on the shipped examples") {
    auto ab = abelian_point();
    Rng rng(5);
    for (int it = 0; it < 20; ++it)
        CHECK(ce_differential(ab, rng.function(ab.frame(), 4)).is_zero());

    auto so = solvable_point();
    auto xi1 = FormalFunction::exterior(so.frame(), 6, 1);
    auto zeta1 = FormalFunction::exterior(so.frame(), 6, 2);
    CHECK(ce_differential(so, xi1) == -(zeta1 * xi1));

    auto ch = chart_1d();
    auto x = FormalFunction::constant(ch.frame(), 6, Coefficient::coordinate(1, 1));
    CHECK(ce_differential(ch, x) == FormalFunction::exterior(ch.frame(), 6, 1));
}

TEST_CASE("exterior differential squares to zero") {
    Rng rng(6);
    for (auto p : {solvable_point(), heisenberg_point(), chart_2d(), chart_mixed()}) {
        for (int it = 0; it < 30; ++it) {
            auto f = rng.function(p.frame(), 4);
            CHECK(ce_differential(p, ce_differential(p, f)).is_zero());
        }
    }
}

TEST_CASE("covariant derivative of B-valued forms") {
    auto ab = abelian_point();
    BForm one_b1(ab.frame(), 4);
    one_b1.comp(1) = FormalFunction::one(ab.frame(), 4);
    CHECK(cov_derivative_bform(ab, ab.connection(1), one_b1).is_zero());

    auto so = solvable_point();  // nabla_a b = b, nabla_b b = u b with u = 1
    BForm w(so.frame(), 6);
    w.comp(1) = FormalFunction::one(so.frame(), 6);
    auto dw = cov_derivative_bform(so, so.connection(1), w);
    auto expected = FormalFunction::exterior(so.frame(), 6, 2) +
                    FormalFunction::exterior(so.frame(), 6, 1);
    CHECK(dw.comp(1) == expected);
}

TEST_CASE("curvature equals the squared covariant derivative") {
    Rng rng(7);
    for (auto p : {solvable_point(), heisenberg_point(), chart_2d()}) {
        const Frame& f = p.frame();
        for (int which : {1, 2}) {
            const Connection& conn = p.connection(which);
            BForm r = curvature(p, conn, 4);
            for (int i = 1; i <= f.r; ++i) {
                BForm unit(f, 4);
                unit.comp(i) = FormalFunction::one(f, 4);
                BForm dd = cov_derivative_bform(p, conn,
                                                cov_derivative_bform(p, conn, unit));
                auto eta_i = FormalFunction::eta_monomial(f, 4, MultiIndex::unit(f.r, i - 1));
                for (int j = 1; j <= f.r; ++j) {
                    // the eta^i slice of the curvature field is exactly dd
                    FormalFunction slice(f, 4);
                    for (auto& [key, c] : r.comp(j).terms())
                        if (key.second == MultiIndex::unit(f.r, i - 1))
                            slice.add_term(key.first, MultiIndex(f.r), c);
                    CHECK(slice == dd.comp(j));
                }
            }
        }
    }
}

TEST_CASE("curvature examples") {
    CHECK(curvature(abelian_point(), abelian_point().connection(1), 4).is_zero());
    auto ch = chart_1d(0, 1);  // rank one: no 2-forms at all
    CHECK(curvature(ch, ch.connection(2), 4).is_zero());

    auto so = solvable_point();  // R_{b a, 1}^1 = u = 1, stored on xi1^zeta1
    auto r = curvature(so, so.connection(1), 4);
    FormalFunction expected(so.frame(), 4);
    expected.add_term(0b11, MultiIndex{1}, so.frame().cconst(1));
    CHECK(r.comp(1) == expected);
}

TEST_CASE("torsion examples and the Bott extension") {
    CHECK(is_torsion_free(abelian_point(), abelian_point().connection(1)));
    CHECK(is_torsion_free(solvable_point(), solvable_point().connection(1)));

    auto so = solvable_point();
    so.connection(1).at(so.frame(), 2, 1, 1) = so.frame().cconst(2);  // nabla_a b = 2b
    auto t = torsion(so, so.connection(1));
    FormalFunction expected(so.frame(), 6);
    expected.add_term(0b11, MultiIndex{0}, so.frame().cconst(-1));  // 1 - t on xi1^zeta1
    CHECK(t.comp(1) == expected);
    CHECK_FALSE(bott_check(so, so.connection(1)).empty());

    auto ch = chart_1d(rat(1, 2), 0);
    CHECK(is_torsion_free(ch, ch.connection(1)));

    CHECK(bott_check(solvable_point(), solvable_point().connection(1)).empty());
    CHECK(bott_check(abelian_point(), abelian_point().connection(1)).empty());
}

TEST_CASE("make_torsion_free produces validated connections") {
    Rng rng(8);
    for (auto p : {solvable_point(), heisenberg_point(), chart_2d()}) {
        const Frame& f = p.frame();
        Connection raw = Connection::zero(f);
        for (int u = 1; u <= f.rank_total(); ++u)
            for (int i = 1; i <= f.r; ++i)
                for (int j = 1; j <= f.r; ++j) raw.at(f, u, i, j) = rng.coefficient(f, 1);
        Connection fixed = make_torsion_free(p, raw);
        CHECK(is_torsion_free(p, fixed));
        CHECK(bott_check(p, fixed).empty());
    }
}

TEST_CASE("frame change rewrites the A-type coframe") {
    auto so = solvable_point();  // offset s = 1
    const Frame& f = so.frame();
    auto xi1 = FormalFunction::exterior(f, 6, 1);
    auto zeta1 = FormalFunction::exterior(f, 6, 2);
    CHECK(frame_change(so, zeta1) == zeta1 - xi1);
    CHECK(frame_change(so, xi1) == xi1);

    auto ab = abelian_point();  // zero offset: identity
    Rng rng(9);
    for (int it = 0; it < 10; ++it) {
        auto g = rng.function(ab.frame(), 5);
        CHECK(frame_change(ab, g) == g);
    }
}

TEST_CASE("frame change is an algebra isomorphism preserving filtration") {
    Rng rng(10);
    for (auto p : {solvable_point(), heisenberg_point(), chart_mixed()}) {
        for (int it = 0; it < 60; ++it) {
            auto a = rng.function(p.frame(), 5);
            auto b = rng.function(p.frame(), 5);
            CHECK(frame_change(p, a * b) == frame_change(p, a) * frame_change(p, b));
            CHECK(frame_change_inverse(p, frame_change(p, a)) == a);
            CHECK(frame_change(p, a).filtration_order() == a.filtration_order());
        }
    }
}

TEST_CASE("the dual-action covariant derivative is the operator commutator") {
    // for an odd vertical field the componentwise covariant derivative with
    // the dual action on the fiber factor equals [d, X] computed on generators
    Rng rng(12);
    for (auto p : {solvable_point(), heisenberg_point(), chart_2d()}) {
        const Frame& f = p.frame();
        int n = 4;
        for (int which : {1, 2}) {
            const Connection& conn = p.connection(which);
            for (int it = 0; it < 10; ++it) {
                BForm x(f, n);
                for (int j = 1; j <= f.r; ++j)
                    x.comp(j) = rng.function(f, n, 3, 0, n - 1).form_part(1);
                BForm lhs(f, n);
                for (int j = 1; j <= f.r; ++j) {
                    FormalFunction gen =
                        FormalFunction::eta_monomial(f, n, MultiIndex::unit(f.r, j - 1));
                    lhs.comp(j) = cov_derivative_function(p, conn, apply_field(x, gen)) +
                                  apply_field(x, cov_derivative_function(p, conn, gen));
                }
                CHECK(lhs == cov_derivative_bform(p, conn, x, true));
            }
        }
    }
}
