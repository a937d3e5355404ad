#include "doctest.h"
#include "fedosov/formal_function.hpp"
#include "fixtures.hpp"

using namespace fedosov;

namespace {
const Frame kF{2, 1, BaseMode::Point, 0};  // xi1, xi2 B-type; zeta1 A-type
constexpr int kN = 6;

FormalFunction xi(int i) { return FormalFunction::exterior(kF, kN, i); }
FormalFunction eta(const MultiIndex& j) { return FormalFunction::eta_monomial(kF, kN, j); }
} // namespace

TEST_CASE("odd generators square to zero and anticommute") {
    CHECK((xi(1) * xi(1)).is_zero());
    CHECK(xi(1) * xi(2) == -(xi(2) * xi(1)));
    CHECK(xi(1) * xi(3) == -(xi(3) * xi(1)));
}

TEST_CASE("fiber truncation drops high symmetric degree silently") {
    Frame f{1, 0, BaseMode::Point, 0};
    auto e = FormalFunction::eta_monomial(f, 1, MultiIndex{1});
    CHECK((e * e).is_zero());  // degree 2 > N = 1
    auto e2 = FormalFunction::eta_monomial(f, 2, MultiIndex{1});
    CHECK(e2 * e2 == FormalFunction::eta_monomial(f, 2, MultiIndex{2}));
}

TEST_CASE("mixed-order operands are rejected") {
    Frame f{1, 0, BaseMode::Point, 0};
    auto a = FormalFunction::one(f, 2);
    auto b = FormalFunction::one(f, 3);
    CHECK_THROWS_AS(a * b, StructuralError);
}

TEST_CASE("duality pairing follows the shuffle normalization") {
    auto b1 = PolySection::generator(kF, 1);
    CHECK(pair(b1, eta(MultiIndex{1, 0})).value() == 1);
    PolySection b1b1 = PolySection::basis(kF, MultiIndex{2, 0});
    CHECK(pair(b1b1, eta(MultiIndex{2, 0})).value() == 2);
    PolySection b1b2 = PolySection::basis(kF, MultiIndex{1, 1});
    CHECK(pair(b1b2, eta(MultiIndex{2, 0})).value() == 0);
}

TEST_CASE("pairing matrix is diagonal with entries J!") {
    for (int k = 0; k <= kN; ++k) {
        for_each_of_degree(kF.r, k, [&](const MultiIndex& j) {
            for_each_of_degree(kF.r, k, [&](const MultiIndex& jp) {
                auto v = pair(PolySection::basis(kF, j), eta(jp)).value();
                CHECK(v == (j == jp ? j.fact() : Rational(0)));
            });
        });
    }
}

TEST_CASE("contraction is the fiber derivation") {
    auto b1 = PolySection::generator(kF, 1);
    CHECK(contract(b1, eta(MultiIndex{1, 0})) == FormalFunction::one(kF, kN));
    CHECK(contract(b1, eta(MultiIndex{2, 0})) == eta(MultiIndex{1, 0}) * Rational(2));
    CHECK(contract(b1, xi(1)).is_zero());
}

TEST_CASE("contraction commutes with exterior multiplication and satisfies Leibniz") {
    testing::Rng rng(11);
    auto b = PolySection::generator(kF, 1) + PolySection::generator(kF, 2) * rat(1, 2);
    for (int it = 0; it < 100; ++it) {
        auto f = rng.function(kF, kN);
        auto g = rng.function(kF, kN);
        CHECK(contract(b, xi(3) * f) == xi(3) * contract(b, f));
        // Leibniz holds below the truncation boundary, where the product is exact
        auto lhs = contract(b, f * g).truncated(kN - 1);
        auto rhs = (contract(b, f) * g + f * contract(b, g)).truncated(kN - 1);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("filtration order") {
    CHECK(FormalFunction::one(kF, kN).filtration_order() == 0);
    auto t = xi(1) * eta(MultiIndex{3, 0});
    CHECK(t.filtration_order() == 3);
    CHECK(FormalFunction::zero(kF, kN).filtration_order() == kInfiniteOrder);
}

TEST_CASE("graded product is associative and graded-commutative") {
    testing::Rng rng(42);
    for (int it = 0; it < 120; ++it) {
        auto f = rng.function(kF, kN, 4);
        auto g = rng.function(kF, kN, 4);
        auto h = rng.function(kF, kN, 4);
        CHECK((f * g) * h == f * (g * h));
        // graded commutativity per homogeneous form degrees
        for (int pf = 0; pf <= 3; ++pf)
            for (int pg = 0; pg <= 3; ++pg) {
                auto a = f.form_part(pf);
                auto b = g.form_part(pg);
                int sign = (pf * pg) % 2 ? -1 : 1;
                CHECK(a * b == (b * a) * Rational(sign));
            }
    }
}

TEST_CASE("filtration order is superadditive under products") {
    testing::Rng rng(43);
    for (int it = 0; it < 120; ++it) {
        auto f = rng.function(kF, kN, 4);
        auto g = rng.function(kF, kN, 4);
        auto fg = f * g;
        if (fg.is_zero()) continue;
        CHECK(fg.filtration_order() >= f.filtration_order() + g.filtration_order());
    }
}

TEST_CASE("formwise pairing keeps the exterior factor") {
    auto b1b1 = PolySection::basis(kF, MultiIndex{2, 0});
    auto f = xi(3) * eta(MultiIndex{2, 0}) + xi(1) * eta(MultiIndex{1, 1});
    auto paired = pair_formwise(b1b1, f);
    CHECK(paired == xi(3) * Rational(2));
    CHECK_THROWS_AS(pair(b1b1, f), StructuralError);
}

TEST_CASE("the filtration metric separates functions by fiber order") {
    auto f = FormalFunction::one(kF, kN);
    CHECK(iadic_distance(f, f) == 0);
    CHECK(iadic_distance(f, FormalFunction::zero(kF, kN)) == 1);
    auto g = f + eta(MultiIndex{3, 0});
    CHECK(iadic_distance(f, g) == rat(1, 4));
}
