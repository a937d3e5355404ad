#include "fedosov/lie_pair.hpp"

#include <functional>

namespace fedosov {

Connection Connection::zero(const Frame& f) {
    Connection c;
    c.gamma.assign(size_t(f.rank_total()) * f.r * f.r, f.czero());
    return c;
}

SplittingOffset SplittingOffset::zero(const Frame& f) {
    SplittingOffset s;
    s.s.assign(size_t(f.r) * f.rp, f.czero());
    return s;
}

LiePairPresentation::LiePairPresentation(Frame frame, int default_trunc)
    : frame_(frame), trunc_(default_trunc) {
    int k = frame.rank_total();
    c_.assign(size_t(k) * k * k, frame.czero());
    rho_.assign(size_t(k) * frame.n, frame.czero());
    offset_ = SplittingOffset::zero(frame);
    conn1_ = Connection::zero(frame);
    conn2_ = Connection::zero(frame);
}

Coefficient LiePairPresentation::anchor_apply(int u, const Coefficient& f) const {
    if (frame_.mode == BaseMode::Point || f.is_constant()) return frame_.czero();
    Coefficient out = frame_.czero();
    for (int mu = 1; mu <= frame_.n; ++mu) {
        const Coefficient& r = rho(u, mu);
        if (!r.is_zero()) out += r * f.partial(mu);
    }
    return out;
}

ValidationReport validate(const LiePairPresentation& p) {
    ValidationReport rep;
    const Frame& f = p.frame();
    int k = f.rank_total();
    auto tuple = [](std::initializer_list<int> xs) {
        std::string s = "(";
        bool first = true;
        for (int x : xs) {
            if (!first) s += ",";
            s += std::to_string(x);
            first = false;
        }
        return s + ")";
    };

    for (int u = 1; u <= k; ++u)
        for (int v = 1; v <= k; ++v)
            for (int w = 1; w <= k; ++w)
                if (p.c(u, v, w) != -p.c(v, u, w)) {
                    rep.violations.push_back("antisymmetry fails at " + tuple({u, v, w}));
                }

    // A is closed under the bracket: no B-components of [a, a'].
    for (int u = f.r + 1; u <= k; ++u)
        for (int v = f.r + 1; v <= k; ++v)
            for (int w = 1; w <= f.r; ++w)
                if (!p.c(u, v, w).is_zero())
                    rep.violations.push_back("A-closure fails at " + tuple({u, v, w}));

    // Jacobi with anchor corrections on structure functions.
    for (int u = 1; u <= k; ++u)
        for (int v = u + 1; v <= k; ++v)
            for (int w = v + 1; w <= k; ++w)
                for (int t = 1; t <= k; ++t) {
                    auto term = [&](int a, int b, int d) {
                        Coefficient sum = f.czero();
                        for (int s = 1; s <= k; ++s) sum += p.c(a, b, s) * p.c(s, d, t);
                        sum -= p.anchor_apply(d, p.c(a, b, t));
                        return sum;
                    };
                    Coefficient jac = term(u, v, w) + term(v, w, u) + term(w, u, v);
                    if (!jac.is_zero())
                        rep.violations.push_back("Jacobi fails at " + tuple({u, v, w, t}));
                }

    if (f.mode == BaseMode::Chart) {
        for (int u = 1; u <= k; ++u)
            for (int v = u + 1; v <= k; ++v)
                for (int mu = 1; mu <= f.n; ++mu) {
                    Coefficient lhs = f.czero();
                    for (int s = 1; s <= k; ++s) lhs += p.c(u, v, s) * p.rho(s, mu);
                    Coefficient rhs =
                        p.anchor_apply(u, p.rho(v, mu)) - p.anchor_apply(v, p.rho(u, mu));
                    if (lhs != rhs)
                        rep.violations.push_back("anchor compatibility fails at " +
                                                 tuple({u, v, mu}));
                }
    }
    return rep;
}

namespace {

// Leibniz evaluation of an odd derivation given its generator images.
FormalFunction apply_odd_derivation(
    const FormalFunction& f,
    const std::function<FormalFunction(const Coefficient&)>& coeff_image,
    const std::function<const FormalFunction&(int)>& ext_image,
    const std::function<const FormalFunction&(int)>& eta_image) {
    const Frame& fr = f.frame();
    int trunc = f.trunc();
    FormalFunction out(fr, trunc);
    for (auto& [key, c] : f.terms()) {
        ExtMask mask = key.first;
        const MultiIndex& j = key.second;

        FormalFunction dc = coeff_image(c);
        if (!dc.is_zero())
            out += dc * FormalFunction::monomial(fr, trunc, mask, j, fr.cconst(1));

        // exterior factors, ascending; the position signs come out of the
        // graded product of prefix * image * suffix
        for (ExtMask t = mask; t;) {
            int bit = __builtin_ctz(t);
            t &= t - 1;
            const FormalFunction& img = ext_image(bit + 1);
            if (img.is_zero()) continue;
            ExtMask prefix = mask & ((ExtMask(1) << bit) - 1);
            ExtMask suffix = mask & ~((ExtMask(1) << (bit + 1)) - 1);
            FormalFunction part =
                FormalFunction::monomial(fr, trunc, prefix, MultiIndex(fr.r), c) * img;
            part = part * FormalFunction::monomial(fr, trunc, suffix, j, fr.cconst(1));
            out += part;
        }

        // fiber factors; the derivation passes the whole exterior block first
        int sgn = (ext_degree(mask) & 1) ? -1 : 1;
        for (int m = 1; m <= fr.r; ++m) {
            if (j[m - 1] == 0) continue;
            const FormalFunction& img = eta_image(m);
            if (img.is_zero()) continue;
            MultiIndex jj = j;
            jj[m - 1] -= 1;
            FormalFunction part =
                FormalFunction::monomial(fr, trunc, mask, jj, c * Rational(sgn * j[m - 1])) *
                img;
            out += part;
        }
    }
    return out;
}

struct ExtImages {
    std::vector<FormalFunction> img;
    const FormalFunction& operator()(int u) const { return img.at(u - 1); }
};

ExtImages ce_ext_images(const LiePairPresentation& p, int trunc) {
    const Frame& f = p.frame();
    int k = f.rank_total();
    ExtImages e;
    e.img.reserve(k);
    for (int w = 1; w <= k; ++w) {
        FormalFunction d(f, trunc);
        for (int u = 1; u <= k; ++u)
            for (int v = u + 1; v <= k; ++v) {
                const Coefficient& cv = p.c(u, v, w);
                if (cv.is_zero()) continue;
                d.add_term((ExtMask(1) << (u - 1)) | (ExtMask(1) << (v - 1)), MultiIndex(f.r),
                           -cv);
            }
        e.img.push_back(std::move(d));
    }
    return e;
}

} // namespace

FormalFunction ce_differential(const LiePairPresentation& p, const FormalFunction& f) {
    const Frame& fr = p.frame();
    int trunc = f.trunc();
    ExtImages ext = ce_ext_images(p, trunc);
    FormalFunction zero(fr, trunc);
    auto coeff_image = [&](const Coefficient& c) {
        FormalFunction d(fr, trunc);
        if (fr.mode == BaseMode::Chart)
            for (int u = 1; u <= fr.rank_total(); ++u)
                d.add_term(ExtMask(1) << (u - 1), MultiIndex(fr.r), p.anchor_apply(u, c));
        return d;
    };
    return apply_odd_derivation(
        f, coeff_image, [&](int u) -> const FormalFunction& { return ext(u); },
        [&](int) -> const FormalFunction& { return zero; });
}

FormalFunction cov_derivative_eta_image(const LiePairPresentation& p, const Connection& conn,
                                        int j, int trunc) {
    const Frame& fr = p.frame();
    FormalFunction d(fr, trunc);
    for (int u = 1; u <= fr.rank_total(); ++u)
        for (int i = 1; i <= fr.r; ++i) {
            const Coefficient& g = conn.at(fr, u, i, j);
            if (g.is_zero()) continue;
            d.add_term(ExtMask(1) << (u - 1), MultiIndex::unit(fr.r, i - 1), -g);
        }
    return d;
}

FormalFunction cov_derivative_function(const LiePairPresentation& p, const Connection& conn,
                                       const FormalFunction& f) {
    const Frame& fr = p.frame();
    int trunc = f.trunc();
    ExtImages ext = ce_ext_images(p, trunc);
    ExtImages eta;
    eta.img.reserve(fr.r);
    for (int j = 1; j <= fr.r; ++j) eta.img.push_back(cov_derivative_eta_image(p, conn, j, trunc));
    auto coeff_image = [&](const Coefficient& c) {
        FormalFunction d(fr, trunc);
        if (fr.mode == BaseMode::Chart)
            for (int u = 1; u <= fr.rank_total(); ++u)
                d.add_term(ExtMask(1) << (u - 1), MultiIndex(fr.r), p.anchor_apply(u, c));
        return d;
    };
    return apply_odd_derivation(
        f, coeff_image, [&](int u) -> const FormalFunction& { return ext(u); },
        [&](int j) -> const FormalFunction& { return eta(j); });
}

BForm cov_derivative_bform(const LiePairPresentation& p, const Connection& conn,
                           const BForm& omega, bool dual_on_fiber) {
    const Frame& fr = p.frame();
    BForm out(fr, omega.trunc());
    for (int e = 1; e <= fr.r; ++e) {
        const FormalFunction& w = omega.comp(e);
        FormalFunction dw =
            dual_on_fiber ? cov_derivative_function(p, conn, w) : ce_differential(p, w);
        out.comp(e) += dw;
        // connection term sum_u (nu^u ^ w) (x) nabla_u b_e
        for (int u = 1; u <= fr.rank_total(); ++u) {
            FormalFunction nu = FormalFunction::exterior(fr, omega.trunc(), u);
            FormalFunction wedge = nu * w;
            if (wedge.is_zero()) continue;
            for (int j = 1; j <= fr.r; ++j) {
                const Coefficient& g = conn.at(fr, u, e, j);
                if (!g.is_zero()) out.comp(j) += wedge * g;
            }
        }
    }
    return out;
}

BForm torsion(const LiePairPresentation& p, const Connection& conn) {
    const Frame& fr = p.frame();
    BForm t(fr, p.default_trunc());
    int k = fr.rank_total();
    for (int u = 1; u <= k; ++u)
        for (int v = u + 1; v <= k; ++v) {
            ExtMask m = (ExtMask(1) << (u - 1)) | (ExtMask(1) << (v - 1));
            for (int j = 1; j <= fr.r; ++j) {
                Coefficient val = fr.czero();
                if (v <= fr.r) val += conn.at(fr, u, v, j);
                if (u <= fr.r) val -= conn.at(fr, v, u, j);
                val -= p.c(u, v, j);
                if (!val.is_zero()) t.comp(j).add_term(m, MultiIndex(fr.r), val);
            }
        }
    return t;
}

bool is_torsion_free(const LiePairPresentation& p, const Connection& conn) {
    return torsion(p, conn).is_zero();
}

BForm curvature(const LiePairPresentation& p, const Connection& conn, int trunc) {
    const Frame& fr = p.frame();
    BForm rc(fr, trunc);
    int k = fr.rank_total();
    for (int u = 1; u <= k; ++u)
        for (int v = u + 1; v <= k; ++v) {
            ExtMask m = (ExtMask(1) << (u - 1)) | (ExtMask(1) << (v - 1));
            for (int i = 1; i <= fr.r; ++i)
                for (int j = 1; j <= fr.r; ++j) {
                    Coefficient val = p.anchor_apply(u, conn.at(fr, v, i, j)) -
                                      p.anchor_apply(v, conn.at(fr, u, i, j));
                    for (int s = 1; s <= fr.r; ++s)
                        val += conn.at(fr, v, i, s) * conn.at(fr, u, s, j) -
                               conn.at(fr, u, i, s) * conn.at(fr, v, s, j);
                    for (int w = 1; w <= k; ++w) val -= p.c(u, v, w) * conn.at(fr, w, i, j);
                    if (!val.is_zero())
                        rc.comp(j).add_term(m, MultiIndex::unit(fr.r, i - 1), val);
                }
        }
    return rc;
}

std::vector<std::string> bott_check(const LiePairPresentation& p, const Connection& conn) {
    const Frame& fr = p.frame();
    std::vector<std::string> bad;
    for (int alpha = 1; alpha <= fr.rp; ++alpha)
        for (int i = 1; i <= fr.r; ++i)
            for (int j = 1; j <= fr.r; ++j)
                if (conn.at(fr, fr.r + alpha, i, j) != p.c(fr.r + alpha, i, j)) {
                    bad.push_back("Bott extension fails at (a" + std::to_string(alpha) + ",b" +
                                  std::to_string(i) + ")");
                }
    return bad;
}

namespace {

FormalFunction substitute_exterior(const LiePairPresentation& p, const FormalFunction& f,
                                   const Rational& offset_sign) {
    const Frame& fr = p.frame();
    int trunc = f.trunc();
    std::vector<FormalFunction> gen;
    gen.reserve(fr.rank_total());
    for (int u = 1; u <= fr.rank_total(); ++u) {
        FormalFunction g = FormalFunction::exterior(fr, trunc, u);
        if (u > fr.r) {
            int alpha = u - fr.r;
            for (int i = 1; i <= fr.r; ++i) {
                const Coefficient& s = p.offset().at(fr, i, alpha);
                if (!s.is_zero())
                    g += FormalFunction::exterior(fr, trunc, i) * (s * offset_sign);
            }
        }
        gen.push_back(std::move(g));
    }
    FormalFunction out(fr, trunc);
    for (auto& [key, c] : f.terms()) {
        FormalFunction part =
            FormalFunction::monomial(fr, trunc, 0, key.second, c);
        for (ExtMask t = key.first; t;) {
            int bit = __builtin_ctz(t);
            t &= t - 1;
            part = part * gen[bit];
        }
        out += part;
    }
    return out;
}

} // namespace

FormalFunction frame_change(const LiePairPresentation& p, const FormalFunction& f) {
    return substitute_exterior(p, f, Rational(-1));
}

FormalFunction frame_change_inverse(const LiePairPresentation& p, const FormalFunction& f) {
    return substitute_exterior(p, f, Rational(1));
}

PolySection nabla_poly(const LiePairPresentation& p, const Connection& conn, int u,
                       const PolySection& sec) {
    const Frame& fr = p.frame();
    PolySection out(fr);
    for (auto& [j, c] : sec.terms()) {
        out.add_term(j, p.anchor_apply(u, c));
        for (int m = 1; m <= fr.r; ++m) {
            if (j[m - 1] == 0) continue;
            for (int t = 1; t <= fr.r; ++t) {
                const Coefficient& g = conn.at(fr, u, m, t);
                if (g.is_zero()) continue;
                MultiIndex jj = j;
                jj[m - 1] -= 1;
                jj[t - 1] += 1;
                out.add_term(jj, (c * g) * Rational(j[m - 1]));
            }
        }
    }
    return out;
}

Connection make_torsion_free(const LiePairPresentation& p, const Connection& conn) {
    const Frame& fr = p.frame();
    Connection out = conn;
    Rational half(1, 2);
    for (int u = 1; u <= fr.r; ++u)
        for (int v = 1; v <= fr.r; ++v)
            for (int j = 1; j <= fr.r; ++j)
                out.at(fr, u, v, j) =
                    (conn.at(fr, u, v, j) + conn.at(fr, v, u, j) + p.c(u, v, j)) * half;
    for (int alpha = 1; alpha <= fr.rp; ++alpha)
        for (int i = 1; i <= fr.r; ++i)
            for (int j = 1; j <= fr.r; ++j)
                out.at(fr, fr.r + alpha, i, j) = p.c(fr.r + alpha, i, j);
    return out;
}

} // namespace fedosov
