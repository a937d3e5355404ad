#include "doctest.h"
#include "fedosov/vertical_operator.hpp"
#include "fixtures.hpp"

using namespace fedosov;
using namespace fedosov::testing;

namespace {

VerticalOperator random_shifting_operator(Rng& rng, const Frame& f, int trunc, int shift) {
    VerticalOperator op(f, trunc, shift);
    int entries = rng.uniform(1, 4);
    for (int t = 0; t < entries; ++t) {
        MultiIndex k = rng.multi_index(f.r, rng.uniform(0, 2));
        int lo = std::max(k.degree() + shift, 0);
        if (lo > trunc - 1) continue;
        FormalFunction slice = rng.function(f, trunc, 3, lo, trunc - 1);
        op.add_slice(k, slice);
    }
    return op;
}

BForm random_flow_field(Rng& rng, const Frame& f, int trunc) {
    BForm y(f, trunc);
    for (int j = 1; j <= f.r; ++j) {
        FormalFunction g = rng.function(f, trunc, 3, 2, trunc).form_part(0);
        y.comp(j) = g;
    }
    return y;
}

} // namespace

TEST_CASE("operator application on the displayed cases") {
    Frame f{1, 1, BaseMode::Point, 0};
    int n = 5;
    auto id = VerticalOperator::identity(f, n);
    Rng rng(51);
    for (int it = 0; it < 20; ++it) {
        auto g = rng.function(f, n);
        CHECK(id.apply(g) == g);
    }

    VerticalOperator iota(f, n, -1);
    iota.add_slice(MultiIndex{1}, FormalFunction::one(f, n));
    auto eta2 = FormalFunction::eta_monomial(f, n, MultiIndex{2});
    CHECK(iota.apply(eta2) == FormalFunction::eta_monomial(f, n, MultiIndex{1}) * Rational(2));

    VerticalOperator d(f, n, 1);
    d.add_slice(MultiIndex{1}, eta2);
    CHECK(d.apply(FormalFunction::eta_monomial(f, n, MultiIndex{1})) == eta2);
}

TEST_CASE("decomposition recovers the displayed slice families") {
    Frame f{1, 1, BaseMode::Point, 0};
    int n = 5;
    auto id = VerticalOperator::identity(f, n);
    auto dec = decompose(f, n, 0, [&](const MultiIndex& k) {
        return FormalFunction::eta_monomial(f, n, k);
    });
    CHECK(dec == id);

    auto iota_values = [&](const MultiIndex& k) {
        return FormalFunction::eta_monomial(f, n, k).eta_partial(1);
    };
    auto iota = decompose(f, n, -1, iota_values);
    VerticalOperator expected(f, n, -1);
    expected.add_slice(MultiIndex{1}, FormalFunction::one(f, n));
    CHECK(iota == expected);

    // a shift violation is rejected with the witness monomial
    CHECK_THROWS_WITH_AS(decompose(f, n, 0, iota_values), doctest::Contains("shift violation"),
                         StructuralError);
}

TEST_CASE("flow operators decompose and rebuild against the series") {
    Frame f{1, 0, BaseMode::Point, 0};
    int n = 6;
    BForm y(f, n);
    y.comp(1) = FormalFunction::eta_monomial(f, n, MultiIndex{2});
    auto e = exp_field(y, n);
    // eta |-> eta + eta^2 + ... + eta^N, the flow eta/(1 - eta)
    FormalFunction img = e.apply(FormalFunction::eta_monomial(f, n, MultiIndex{1}));
    FormalFunction expected(f, n);
    for (int k = 1; k <= n; ++k) expected.add_term(0, MultiIndex{k}, f.cconst(1));
    CHECK(img == expected);

    auto rebuilt = decompose(f, n, 0, [&](const MultiIndex& k) {
        return e.apply(FormalFunction::eta_monomial(f, n, k));
    });
    CHECK(rebuilt == e);
}

TEST_CASE("slicewise structure operators on the displayed cases") {
    auto p = solvable_point();
    const Frame& f = p.frame();
    int n = 5;
    Contraction ctx(p, 1);

    VerticalOperator constant(f, n, -1);
    constant.add_slice(MultiIndex{1}, FormalFunction::one(f, n));
    CHECK(delta_op(constant).is_zero());

    VerticalOperator d(f, n, 0);
    d.add_slice(MultiIndex{1}, FormalFunction::eta_monomial(f, n, MultiIndex{1}));
    VerticalOperator expected(f, n, -1);
    expected.add_slice(MultiIndex{1}, FormalFunction::exterior(f, n, 1));
    CHECK(delta_op(d) == expected);

    CHECK(h_op(expected, ctx) == d);

    VerticalOperator zslice(f, n, -1);
    zslice.add_slice(MultiIndex{1}, FormalFunction::exterior(f, n, 2));
    CHECK(sigma0_op(zslice, ctx) == zslice);
    CHECK(sigma0_op(d, ctx).is_zero());
}

TEST_CASE("operator homotopy identities on random shifting operators") {
    Rng rng(52);
    for (auto pr : {solvable_point(), heisenberg_point()}) {
        const Frame& f = pr.frame();
        for (int splitting : {1, 2}) {
            Contraction ctx(pr, splitting);
            for (int it = 0; it < 25; ++it) {
                auto op = random_shifting_operator(rng, f, 5, rng.uniform(-1, 1));
                CHECK(delta_op(delta_op(op)).is_zero());
                CHECK(h_op(h_op(op, ctx), ctx).is_zero());
                CHECK(h_op(delta_op(h_op(op, ctx)), ctx) == h_op(op, ctx));
                auto lhs = delta_op(h_op(op, ctx)) + h_op(delta_op(op), ctx);
                CHECK(lhs == op - sigma0_op(op, ctx));
            }
        }
    }
}

TEST_CASE("intertwiner derivative on the displayed cases") {
    auto p = solvable_point();  // u1 = 1, u2 = 0: nonzero connection difference
    int n = 5;
    auto q1 = make_fedosov_field(p, 1, 1, n);
    auto q2 = make_fedosov_field(p, 2, 1, n);
    auto dq = delta_q(q1, q2);
    auto one = VerticalOperator::identity(p.frame(), n);

    auto zero_dq = BForm::zero(p.frame(), n);
    CHECK(eth(one, zero_dq, q2).is_zero());

    auto e1 = eth(one, dq, q2);
    auto dq_as_op = decompose(p.frame(), n, 0, [&](const MultiIndex& k) {
        return apply_field(dq, FormalFunction::eta_monomial(p.frame(), n, k));
    });
    CHECK(e1 == dq_as_op);
    CHECK(e1.shift_lower_bound() >= 0);
}

TEST_CASE("the homotopy composed with the derivative raises the shift") {
    Rng rng(53);
    auto p = solvable_point();
    int n = 5;
    auto q1 = make_fedosov_field(p, 1, 1, n);
    auto q2 = make_fedosov_field(p, 2, 1, n);
    auto dq = delta_q(q1, q2);
    Contraction ctx(p, 1);
    for (int it = 0; it < 20; ++it) {
        auto op = random_shifting_operator(rng, p.frame(), n, 0);
        int before = op.shift_lower_bound();
        if (before >= kInfiniteOrder) continue;
        auto moved = h_op(eth(op, dq, q2), ctx);
        if (moved.is_zero()) continue;
        CHECK(moved.shift_lower_bound() >= before + 1);
    }
}

TEST_CASE("identical Fedosov fields give the identity intertwiner") {
    auto p = solvable_point();
    auto q1 = make_fedosov_field(p, 1, 1, 5);
    Contraction ctx(p, 1);
    CHECK(solve_phi(q1, q1, ctx) == VerticalOperator::identity(p.frame(), 5));
}

TEST_CASE("intertwiner for the line pair matches the closed-form jets") {
    auto p = chart_1d(0, 1);  // flat against constant Christoffel c = 1
    int n = 5;
    auto q1 = make_fedosov_field(p, 1, 1, n);
    auto q2 = make_fedosov_field(p, 2, 1, n);
    Contraction ctx(p, 1);
    auto phi = solve_phi(q1, q2, ctx);

    const Frame& f = p.frame();
    FormalFunction img = phi.apply(FormalFunction::eta_monomial(f, n, MultiIndex{1}));
    // trivial linear component
    CHECK(img.symmetric_part(1) == FormalFunction::eta_monomial(f, n, MultiIndex{1}));
    // second jet of (e^{cv} - 1)/c at c = 1: <phi(eta), d(.)d> = c
    CHECK(pair(PolySection::basis(f, MultiIndex{2}), img.form_part(0)).value() == 1);
    // and the full expansion matches sum c^{k-1} v^k / k!
    for (int k = 1; k <= n; ++k)
        CHECK(img.fiber_coefficient(MultiIndex{k}).value() == Rational(1) / factorial(k));

    auto rep = check_intertwining(phi, q1, q2);
    CHECK_MESSAGE(rep.ok, rep.witness);
}

TEST_CASE("solving with either splitting homotopy returns the identical operator") {
    for (auto pr : {solvable_point(), heisenberg_point()}) {
        int n = 5;
        auto q1 = make_fedosov_field(pr, 1, 1, n);
        auto q2 = make_fedosov_field(pr, 2, 2, n);
        auto phi_a = solve_phi(q1, q2, Contraction(pr, 1));
        auto phi_b = solve_phi(q1, q2, Contraction(pr, 2));
        CHECK(phi_a == phi_b);
        CHECK(phi_a.pure_even());
        auto rep = check_intertwining(phi_a, q1, q2);
        CHECK_MESSAGE(rep.ok, rep.witness);
    }
}

TEST_CASE("perturbed candidates are separated by the fixed-point map") {
    Rng rng(54);
    auto p = solvable_point();
    int n = 5;
    auto q1 = make_fedosov_field(p, 1, 1, n);
    auto q2 = make_fedosov_field(p, 2, 1, n);
    auto dq = delta_q(q1, q2);
    Contraction ctx(p, 1);
    for (int it = 0; it < 20; ++it) {
        auto e = random_shifting_operator(rng, p.frame(), n, 1);
        if (e.is_zero()) continue;
        CHECK_FALSE((e - h_op(eth(e, dq, q2), ctx)).is_zero());
    }
}

TEST_CASE("flow and logarithm are mutually inverse on admissible inputs") {
    Rng rng(55);
    Frame f2{2, 0, BaseMode::Point, 0};
    Frame f1{1, 1, BaseMode::Point, 0};
    int n = 5;
    for (const Frame& f : {f2, f1}) {
        for (int it = 0; it < 25; ++it) {
            BForm y = random_flow_field(rng, f, n);
            auto e = exp_field(y, n);
            BForm back = log_operator(e);
            CHECK(back == y);
            CHECK(exp_field(back, n) == e);
        }
    }
}

TEST_CASE("logarithm of the identity and of the displayed flow") {
    Frame f{1, 0, BaseMode::Point, 0};
    int n = 6;
    CHECK(log_operator(VerticalOperator::identity(f, n)).is_zero());

    BForm y(f, n);
    y.comp(1) = FormalFunction::eta_monomial(f, n, MultiIndex{2});
    CHECK(log_operator(exp_field(y, n)) == y);
}

TEST_CASE("logarithm rejects a nontrivial linear component") {
    Frame f{1, 0, BaseMode::Point, 0};
    int n = 4;
    auto doubled = decompose(f, n, 0, [&](const MultiIndex& k) {
        return FormalFunction::eta_monomial(f, n, k) * rat(1 << k.degree());
    });
    CHECK_THROWS_WITH_AS(log_operator(doubled), doctest::Contains("unitriangular"),
                         StructuralError);
}

TEST_CASE("intertwiner logarithm starts at the connection difference") {
    auto p = chart_1d(0, 1);
    int n = 5;
    auto q1 = make_fedosov_field(p, 1, 1, n);
    auto q2 = make_fedosov_field(p, 2, 1, n);
    auto phi = solve_phi(q1, q2, Contraction(p, 1));
    BForm y = log_operator(phi);
    CHECK(y.filtration_order() >= 2);
    FormalFunction lead = y.comp(1).symmetric_part(2);
    FormalFunction expected(p.frame(), n);
    expected.add_term(0, MultiIndex{2}, p.frame().cconst(rat(1, 2)));  // c/2 at c = 1
    CHECK(lead == expected);
}

TEST_CASE("pairing transpose of the identity coalgebra map") {
    Frame f{2, 0, BaseMode::Point, 0};
    int n = 4;
    auto id = dual_of_coalgebra_map(
        f, n, [&](const MultiIndex& k) { return PolySection::basis(f, k); });
    CHECK(id == VerticalOperator::identity(f, n));
}

TEST_CASE("abelian pairs with offset splittings still transpose to the identity") {
    auto p = abelian_point();
    p.offset().at(p.frame(), 1, 1) = p.frame().cconst(1);
    int n = 4;
    PbwContext c1(p, 1, 1, n + 1);
    PbwContext c2(p, 2, 2, n + 1);
    auto phi = dual_of_coalgebra_map(p.frame(), n, [&](const MultiIndex& k) {
        return c2.pbw_inverse(c1.pbw_basis(k));
    });
    CHECK(phi == VerticalOperator::identity(p.frame(), n));
}

TEST_CASE("the transpose of the composed isomorphisms is the intertwiner") {
    for (auto pr : {chart_1d(0, 1), solvable_point(), heisenberg_point(), chart_2d(4),
                    chart_mixed(4)}) {
        int n = 4;
        auto q1 = make_fedosov_field(pr, 1, 1, n);
        auto q2 = make_fedosov_field(pr, 2, pr.frame().rp > 0 ? 2 : 1, n);
        auto phi = solve_phi(q1, q2, Contraction(pr, 1));

        PbwContext c1(pr, 1, 1, n + 1);
        PbwContext c2(pr, pr.frame().rp > 0 ? 2 : 1, 2, n + 1);
        auto dual = dual_of_coalgebra_map(pr.frame(), n, [&](const MultiIndex& k) {
            return c2.pbw_inverse(c1.pbw(PolySection::basis(pr.frame(), k)));
        });
        CHECK(phi == dual);
    }
}

TEST_CASE("pushforward by the identity returns the operator with no remainder") {
    Frame f{2, 0, BaseMode::Point, 0};
    int n = 4;
    auto id = VerticalOperator::identity(f, n);
    PolyDiffOp p{MultiIndex{1, 0}, {MultiIndex{1, 1}, MultiIndex{0, 1}}};
    auto pushed = pushforward_polydiff(id, id, p);
    auto lead = pushforward_leading_term(id, p);
    CHECK(pushed == lead);
    PolyDiffTensor expected{f, n, {}};
    expected.add({MultiIndex{1, 1}, MultiIndex{0, 1}},
                 FormalFunction::eta_monomial(f, n, MultiIndex{1, 0}));
    CHECK(pushed == expected);
}

TEST_CASE("single-leg pushforward along the displayed flow") {
    Frame f{1, 0, BaseMode::Point, 0};
    int n = 4;
    BForm y(f, n);
    y.comp(1) = FormalFunction::eta_monomial(f, n, MultiIndex{2});
    auto phi = exp_field(y, n);
    auto phi_inv = exp_field(-y, n);
    CHECK((phi.apply(phi_inv.apply(FormalFunction::eta_monomial(f, n, MultiIndex{1})))) ==
          FormalFunction::eta_monomial(f, n, MultiIndex{1}));

    PolyDiffOp p{MultiIndex{0}, {MultiIndex{1}}};
    auto pushed = pushforward_polydiff(phi, phi_inv, p);
    auto lead = pushforward_leading_term(phi_inv, p);
    auto remainder = pushed;
    for (auto& [k, c] : lead.terms) remainder.add(k, -c);
    CHECK(remainder.filtration_order() > 0);
}

TEST_CASE("pushforward remainders sit above the source fiber degree") {
    Rng rng(56);
    Frame f{2, 0, BaseMode::Point, 0};
    int n = 5;
    for (int it = 0; it < 25; ++it) {
        BForm y = random_flow_field(rng, f, n);
        auto phi = exp_field(y, n);
        auto phi_inv = exp_field(-y, n);
        PolyDiffOp p;
        p.eta_power = rng.multi_index(f.r, rng.uniform(0, 2));
        int legs = rng.uniform(1, 2);
        int budget = 2;
        for (int l = 0; l < legs; ++l) {
            int d = rng.uniform(1, std::max(1, budget - (legs - 1 - l)));
            budget -= d;
            p.legs.push_back(rng.multi_index(f.r, d));
        }
        int weight = 0;
        for (auto& leg : p.legs) weight += leg.degree();
        int horizon = n - weight;  // validity window of the extraction
        REQUIRE(p.eta_power.degree() < horizon);

        auto pushed = pushforward_polydiff(phi, phi_inv, p);
        auto lead = pushforward_leading_term(phi_inv, p);
        auto remainder = pushed;
        for (auto& [k, c] : lead.terms) remainder.add(k, -c);
        if (!remainder.terms.empty())
            CHECK(remainder.filtration_order() > p.eta_power.degree());

        // extraction consistency on tuples past the claimed support
        for (int probe = 0; probe < 3; ++probe) {
            std::vector<MultiIndex> args;
            for (int l = 0; l < legs; ++l)
                args.push_back(rng.multi_index(f.r, p.legs[l].degree() + rng.uniform(0, 1)));
            FormalFunction g = FormalFunction::eta_monomial(f, n, p.eta_power);
            for (int l = 0; l < legs; ++l) {
                FormalFunction h =
                    phi_inv.apply(FormalFunction::eta_monomial(f, n, args[l]));
                for (int i = 1; i <= f.r; ++i)
                    for (int rep = 0; rep < p.legs[l][i - 1]; ++rep) h = h.eta_partial(i);
                g = g * h;
            }
            FormalFunction direct = phi.apply(g).truncated(horizon);
            FormalFunction from_tensor(f, n);
            for (auto& [k, c] : pushed.terms) {
                bool dom = true;
                Rational fall = 1;
                MultiIndex total(f.r);
                for (int l = 0; l < legs && dom; ++l) {
                    if (!args[l].contains(k[l])) dom = false;
                    else {
                        fall *= args[l].falling(k[l]);
                        total = total + (args[l] - k[l]);
                    }
                }
                if (!dom) continue;
                from_tensor +=
                    (c * FormalFunction::monomial(f, n, 0, total, f.cconst(fall)))
                        .truncated(horizon);
            }
            CHECK(direct == from_tensor);
        }
    }
}

TEST_CASE("slice families rebuild from their black-box action") {
    Rng rng(57);
    Frame f{2, 1, BaseMode::Point, 0};
    int n = 4;
    for (int it = 0; it < 40; ++it) {
        int shift = rng.uniform(-1, 1);
        auto op = random_shifting_operator(rng, f, n, shift);
        auto rebuilt = decompose(f, n, shift, [&](const MultiIndex& k) {
            return op.apply(FormalFunction::eta_monomial(f, n, k));
        });
        CHECK(rebuilt == op);
    }
}

TEST_CASE("the intertwiner is an algebra morphism degreewise") {
    Rng rng(58);
    for (auto pr : {solvable_point(), chart_1d(0, 1)}) {
        int n = 5;
        auto q1 = make_fedosov_field(pr, 1, 1, n);
        auto q2 = make_fedosov_field(pr, 2, pr.frame().rp > 0 ? 2 : 1, n);
        auto phi = solve_phi(q1, q2, Contraction(pr, 1));
        for (int it = 0; it < 30; ++it) {
            auto f = rng.function(pr.frame(), n);
            auto g = rng.function(pr.frame(), n);
            CHECK(phi.apply(f * g) == phi.apply(f) * phi.apply(g));
        }
    }
}

TEST_CASE("inadmissible flow arguments are rejected") {
    Frame f{1, 1, BaseMode::Point, 0};
    int n = 4;
    BForm low(f, n);
    low.comp(1) = FormalFunction::eta_monomial(f, n, MultiIndex{1});
    CHECK_THROWS_WITH_AS(exp_field(low, n), doctest::Contains("order at least two"),
                         StructuralError);
    BForm formful(f, n);
    formful.comp(1) =
        FormalFunction::exterior(f, n, 2) * FormalFunction::eta_monomial(f, n, MultiIndex{2});
    CHECK_THROWS_WITH_AS(exp_field(formful, n), doctest::Contains("exterior degree"),
                         StructuralError);
}
