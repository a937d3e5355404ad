#include "fedosov/fedosov_field.hpp"

namespace fedosov {

FormalFunction FedosovField::apply(const FormalFunction& f) const {
    return apply_tail(f) - koszul(f);
}

FormalFunction FedosovField::apply_connection_part(const FormalFunction& f) const {
    return cov_derivative_function(*p_, connection(), f);
}

FormalFunction FedosovField::apply_tail(const FormalFunction& f) const {
    return apply_connection_part(f) + apply_field(x_, f);
}

BForm fedosov_vector_field(const LiePairPresentation& p, int connection_choice,
                           const Contraction& hctx, int trunc) {
    const Frame& fr = p.frame();
    const Connection& conn = p.connection(connection_choice);

    BForm t = torsion(p, conn);
    if (!t.is_zero())
        throw StructuralError("connection has torsion: " + t.str());

    auto eta_gen = [&](int j) {
        return FormalFunction::eta_monomial(fr, trunc, MultiIndex::unit(fr.r, j - 1));
    };
    auto d = [&](const FormalFunction& f) { return cov_derivative_function(p, conn, f); };

    // d^nabla squared acts vertically; its generator values give the seed.
    BForm seed(fr, trunc);
    for (int j = 1; j <= fr.r; ++j) seed.comp(j) = d(d(eta_gen(j)));

    std::vector<BForm> xs(trunc + 1, BForm::zero(fr, trunc));
    if (trunc >= 2) xs[2] = hctx.h_nat(seed);

    for (int k = 2; k + 1 <= trunc; ++k) {
        BForm w(fr, trunc);
        for (int j = 1; j <= fr.r; ++j)
            w.comp(j) = d(apply_field(xs[k], eta_gen(j))) + apply_field(xs[k], d(eta_gen(j)));
        Rational half(1, 2);
        for (int a = 2; a <= k - 1; ++a) {
            int b = k + 1 - a;
            if (b < 2 || b > k - 1) continue;
            w += field_commutator(xs[a], xs[b]) * half;
        }
        xs[k + 1] = hctx.h_nat(w);
    }

    BForm x(fr, trunc);
    for (int k = 2; k <= trunc; ++k) x += xs[k];
    return x;
}

FedosovField assemble_q(const LiePairPresentation& p, int connection_choice, BForm x) {
    return FedosovField(p, connection_choice, std::move(x));
}

FedosovField make_fedosov_field(const LiePairPresentation& p, int connection_choice,
                                int splitting, int trunc) {
    Contraction hctx(p, splitting);
    return assemble_q(p, connection_choice,
                      fedosov_vector_field(p, connection_choice, hctx, trunc));
}

BForm delta_q(const FedosovField& q1, const FedosovField& q2) {
    const Frame& fr = q1.presentation().frame();
    if (&q1.presentation() != &q2.presentation() || q1.trunc() != q2.trunc())
        throw StructuralError("Fedosov fields live on different presentations");
    int trunc = q1.trunc();
    BForm dq(fr, trunc);
    for (int j = 1; j <= fr.r; ++j) {
        FormalFunction gen =
            FormalFunction::eta_monomial(fr, trunc, MultiIndex::unit(fr.r, j - 1));
        dq.comp(j) = cov_derivative_function(q1.presentation(), q1.connection(), gen) -
                     cov_derivative_function(q2.presentation(), q2.connection(), gen);
    }
    return dq + q1.x() - q2.x();
}

FlatnessReport check_q_squared(const FedosovField& q) {
    const Frame& fr = q.presentation().frame();
    int trunc = q.trunc();
    FlatnessReport rep;
    int limit = trunc - 1;  // one symmetric degree is lost to truncation
    for (ExtMask m = 0; m < (ExtMask(1) << fr.rank_total()); ++m) {
        bool done = false;
        for_each_up_to_degree(fr.r, limit, [&](const MultiIndex& j) {
            if (done) return;
            FormalFunction f =
                FormalFunction::monomial(fr, trunc, m, j, fr.cconst(1));
            FormalFunction qq = q.apply(q.apply(f)).truncated(limit);
            if (!qq.is_zero()) {
                rep.ok = false;
                rep.witness = "Q^2 != 0 on " + f.str() + " -> " + qq.str();
                done = true;
            }
        });
        if (!rep.ok) break;
    }
    return rep;
}

} // namespace fedosov
