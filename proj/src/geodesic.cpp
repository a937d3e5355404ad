#include "fedosov/geodesic.hpp"
#include "fedosov/lie_pair.hpp"

#include <cmath>

namespace fedosov {

ChristoffelData ChristoffelData::zero(int dim) {
    ChristoffelData g;
    g.dim = dim;
    g.gamma.assign(size_t(dim) * dim * dim, Coefficient::zero(BaseMode::Chart, dim));
    return g;
}

bool ChristoffelData::symmetric() const {
    for (int k = 1; k <= dim; ++k)
        for (int i = 1; i <= dim; ++i)
            for (int j = i + 1; j <= dim; ++j)
                if (at(k, i, j) != at(k, j, i)) return false;
    return true;
}

ChristoffelData christoffel_from_presentation(const LiePairPresentation& p, int which) {
    const Frame& fr = p.frame();
    if (fr.mode != BaseMode::Chart || fr.rp != 0 || fr.r != fr.n)
        throw StructuralError("geodesic oracle requires a tangent pair over a chart");
    ChristoffelData g = ChristoffelData::zero(fr.n);
    const Connection& conn = p.connection(which);
    for (int k = 1; k <= fr.n; ++k)
        for (int i = 1; i <= fr.n; ++i)
            for (int j = 1; j <= fr.n; ++j) g.at(k, i, j) = conn.at(fr, i, j, k);
    return g;
}

JetMap JetMap::identity(int dim, int order, std::vector<Rational> base) {
    JetMap f;
    f.dim = dim;
    f.order = order;
    f.base = std::move(base);
    for (int k = 1; k <= dim; ++k) f.comps.push_back(Coefficient::coordinate(dim, k));
    return f;
}

bool JetMap::linear_part_is_identity() const {
    for (int k = 1; k <= dim; ++k)
        for (int i = 1; i <= dim; ++i) {
            auto it = comps[k - 1].terms().find(MultiIndex::unit(dim, i - 1));
            Rational got = (it == comps[k - 1].terms().end()) ? Rational(0) : it->second;
            if (got != Rational(k == i ? 1 : 0)) return false;
        }
    return true;
}

Rational JetMap::coefficient(int k, const MultiIndex& j) const {
    auto it = comps.at(k - 1).terms().find(j);
    return it == comps[k - 1].terms().end() ? Rational(0) : it->second;
}

std::vector<Rational> JetMap::eval(const std::vector<Rational>& v) const {
    std::vector<Rational> out(base);
    for (int k = 1; k <= dim; ++k) out[k - 1] += comps[k - 1].eval(v);
    return out;
}

namespace {

Coefficient poly_truncate(const Coefficient& c, int max_degree) {
    Coefficient out = Coefficient::zero(c.mode(), c.chart_dim());
    for (auto& [j, q] : c.terms())
        if (j.degree() <= max_degree) out += Coefficient::monomial(c.chart_dim(), j, q);
    return out;
}

Coefficient poly_degree_part(const Coefficient& c, int degree) {
    Coefficient out = Coefficient::zero(c.mode(), c.chart_dim());
    for (auto& [j, q] : c.terms())
        if (j.degree() == degree) out += Coefficient::monomial(c.chart_dim(), j, q);
    return out;
}

/// Substitute images into a polynomial, truncating the total fiber degree.
Coefficient poly_subst(const Coefficient& poly, const std::vector<Coefficient>& images,
                       int max_degree) {
    int dim = poly.chart_dim();
    Coefficient out = Coefficient::zero(BaseMode::Chart, images.empty() ? dim : images[0].chart_dim());
    for (auto& [e, q] : poly.terms()) {
        Coefficient term = Coefficient::constant(out.mode(), out.chart_dim(), q);
        for (int a = 0; a < dim; ++a)
            for (int rep = 0; rep < e[a]; ++rep)
                term = poly_truncate(term * images[a], max_degree);
        out += term;
    }
    return out;
}

using TSeries = std::vector<Coefficient>;  // index = power of the curve parameter

TSeries tseries_mul(const TSeries& a, const TSeries& b, int order) {
    int dim = a.empty() ? 0 : a[0].chart_dim();
    TSeries out(order + 1, Coefficient::zero(BaseMode::Chart, dim));
    for (int i = 0; i < static_cast<int>(a.size()); ++i)
        for (int j = 0; j < static_cast<int>(b.size()); ++j)
            if (i + j <= order) out[i + j] += a[i] * b[j];
    return out;
}

double eval_d(const Coefficient& c, const std::vector<double>& x) {
    double sum = 0;
    for (auto& [j, q] : c.terms()) {
        double t = q.get_d();
        for (int i = 0; i < j.width(); ++i)
            for (int k = 0; k < j[i]; ++k) t *= x[i];
        sum += t;
    }
    return sum;
}

} // namespace

JetMap geodesic_jet(const ChristoffelData& g, const std::vector<Rational>& base, int order) {
    if (!g.symmetric()) throw StructuralError("geodesic flow needs symmetric Christoffels");
    int n = g.dim;
    if (static_cast<int>(base.size()) != n)
        throw StructuralError("base point dimension mismatch");

    // displacement series u^k(t) = v_k t + sum_{m>=2} u^k_m t^m, coefficients
    // polynomials in v, homogeneous of degree m by the flow scaling
    std::vector<TSeries> u(n, TSeries(order + 1, Coefficient::zero(BaseMode::Chart, n)));
    for (int k = 0; k < n; ++k) u[k][1] = Coefficient::coordinate(n, k + 1);

    for (int m = 0; m + 2 <= order; ++m) {
        // x-images at this stage: p_a + u^a(t); only t-degrees <= m matter
        std::vector<TSeries> xdot(n, TSeries(order + 1, Coefficient::zero(BaseMode::Chart, n)));
        for (int a = 0; a < n; ++a)
            for (int t = 0; t <= order - 1; ++t) xdot[a][t] = u[a][t + 1] * Rational(t + 1);

        for (int k = 0; k < n; ++k) {
            Coefficient acc = Coefficient::zero(BaseMode::Chart, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const Coefficient& gam = g.at(k + 1, i + 1, j + 1);
                    if (gam.is_zero()) continue;
                    // gamma(p + u) as a truncated series in the parameter
                    TSeries gs(order + 1, Coefficient::zero(BaseMode::Chart, n));
                    for (auto& [e, q] : gam.terms()) {
                        TSeries term(order + 1, Coefficient::zero(BaseMode::Chart, n));
                        term[0] = Coefficient::constant(BaseMode::Chart, n, q);
                        for (int a = 0; a < n; ++a)
                            for (int rep = 0; rep < e[a]; ++rep) {
                                TSeries factor(order + 1,
                                               Coefficient::zero(BaseMode::Chart, n));
                                factor[0] =
                                    Coefficient::constant(BaseMode::Chart, n, base[a]);
                                for (int t = 1; t <= order; ++t) factor[t] = u[a][t];
                                term = tseries_mul(term, factor, m);
                            }
                        for (int t = 0; t <= m; ++t) gs[t] += term[t];
                    }
                    TSeries prod = tseries_mul(tseries_mul(gs, xdot[i], m), xdot[j], m);
                    acc += prod[m];
                }
            u[k][m + 2] = acc * rat(-1, (m + 2) * (m + 1));
        }
    }

    JetMap out;
    out.dim = n;
    out.order = order;
    out.base = base;
    for (int k = 0; k < n; ++k) {
        Coefficient d = Coefficient::zero(BaseMode::Chart, n);
        for (int t = 1; t <= order; ++t) d += u[k][t];
        out.comps.push_back(poly_truncate(d, order));
    }
    if (!out.linear_part_is_identity())
        throw StructuralError("geodesic jet lost its identity linear part");
    return out;
}

JetMap invert_jet(const JetMap& f) {
    if (!f.linear_part_is_identity())
        throw StructuralError("jet inversion requires an identity linear part");
    JetMap g = JetMap::identity(f.dim, f.order, f.base);
    for (int d = 2; d <= f.order; ++d) {
        for (int k = 0; k < f.dim; ++k) {
            Coefficient err = poly_degree_part(poly_subst(g.comps[k], f.comps, f.order), d);
            g.comps[k] -= err;
        }
    }
    return g;
}

JetMap compose_jets(const JetMap& f, const JetMap& g) {
    JetMap out;
    out.dim = f.dim;
    out.order = f.order;
    out.base = g.base;
    for (int k = 0; k < f.dim; ++k)
        out.comps.push_back(poly_truncate(poly_subst(f.comps[k], g.comps, f.order), f.order));
    return out;
}

JetMap transition_jet(const ChristoffelData& g1, const ChristoffelData& g2,
                      const std::vector<Rational>& base, int order) {
    JetMap d1 = geodesic_jet(g1, base, order);
    JetMap d2 = geodesic_jet(g2, base, order);
    return compose_jets(invert_jet(d2), d1);
}

std::vector<double> geodesic_rk4(const ChristoffelData& g, const std::vector<double>& base,
                                 const std::vector<double>& v, double step) {
    int n = g.dim;
    std::vector<double> x = base, xd = v;
    auto accel = [&](const std::vector<double>& px, const std::vector<double>& pv) {
        std::vector<double> a(n, 0.0);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const Coefficient& gam = g.at(k + 1, i + 1, j + 1);
                    if (!gam.is_zero()) a[k] -= eval_d(gam, px) * pv[i] * pv[j];
                }
        return a;
    };
    int steps = static_cast<int>(std::llround(1.0 / step));
    for (int s = 0; s < steps; ++s) {
        std::vector<double> k1x = xd, k1v = accel(x, xd);
        std::vector<double> x2(n), v2(n);
        for (int i = 0; i < n; ++i) {
            x2[i] = x[i] + 0.5 * step * k1x[i];
            v2[i] = xd[i] + 0.5 * step * k1v[i];
        }
        std::vector<double> k2x = v2, k2v = accel(x2, v2);
        std::vector<double> x3(n), v3(n);
        for (int i = 0; i < n; ++i) {
            x3[i] = x[i] + 0.5 * step * k2x[i];
            v3[i] = xd[i] + 0.5 * step * k2v[i];
        }
        std::vector<double> k3x = v3, k3v = accel(x3, v3);
        std::vector<double> x4(n), v4(n);
        for (int i = 0; i < n; ++i) {
            x4[i] = x[i] + step * k3x[i];
            v4[i] = xd[i] + step * k3v[i];
        }
        std::vector<double> k4x = v4, k4v = accel(x4, v4);
        for (int i = 0; i < n; ++i) {
            x[i] += step / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
            xd[i] += step / 6.0 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
        }
    }
    return x;
}

std::vector<double> geodesic_rk4_inverse(const ChristoffelData& g,
                                         const std::vector<double>& base,
                                         const std::vector<double>& target, double step) {
    int n = g.dim;
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = target[i] - base[i];
    for (int iter = 0; iter < 40; ++iter) {
        std::vector<double> fx = geodesic_rk4(g, base, w, step);
        double residual = 0;
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) {
            rhs[i] = target[i] - fx[i];
            residual += std::abs(rhs[i]);
        }
        if (residual < 1e-13) break;
        // Jacobian by central differences
        double eps = 1e-6;
        std::vector<std::vector<double>> jac(n, std::vector<double>(n));
        for (int c = 0; c < n; ++c) {
            std::vector<double> wp = w, wm = w;
            wp[c] += eps;
            wm[c] -= eps;
            auto fp = geodesic_rk4(g, base, wp, step);
            auto fm = geodesic_rk4(g, base, wm, step);
            for (int r = 0; r < n; ++r) jac[r][c] = (fp[r] - fm[r]) / (2 * eps);
        }
        // Gaussian elimination on the small system
        for (int c = 0; c < n; ++c) {
            int piv = c;
            for (int r = c + 1; r < n; ++r)
                if (std::abs(jac[r][c]) > std::abs(jac[piv][c])) piv = r;
            std::swap(jac[c], jac[piv]);
            std::swap(rhs[c], rhs[piv]);
            for (int r = c + 1; r < n; ++r) {
                double m = jac[r][c] / jac[c][c];
                for (int cc = c; cc < n; ++cc) jac[r][cc] -= m * jac[c][cc];
                rhs[r] -= m * rhs[c];
            }
        }
        for (int r = n - 1; r >= 0; --r) {
            for (int cc = r + 1; cc < n; ++cc) rhs[r] -= jac[r][cc] * rhs[cc];
            rhs[r] /= jac[r][r];
        }
        for (int i = 0; i < n; ++i) w[i] += rhs[i];
    }
    return w;
}

ThreeWayReport compare_with_pbw(const LiePairPresentation& p,
                                const std::vector<Rational>& base, int order) {
    ThreeWayReport rep;
    const Frame& fr = p.frame();
    ChristoffelData g1 = christoffel_from_presentation(p, 1);
    ChristoffelData g2 = christoffel_from_presentation(p, 2);
    int n = fr.n;

    // route one: jets of the geodesic coordinate change
    JetMap psi = transition_jet(g1, g2, base, order);

    using Matrix = std::map<std::pair<MultiIndex, MultiIndex>, Rational>;
    Matrix t1, t2, t3;

    for_each_up_to_degree(n, order, [&](const MultiIndex& k) {
        // psi^K as a fiber polynomial
        Coefficient power = Coefficient::constant(BaseMode::Chart, n, 1);
        for (int a = 0; a < n; ++a)
            for (int rep2 = 0; rep2 < k[a]; ++rep2)
                power = poly_truncate(power * psi.comps[a], order);
        for (auto& [j, q] : power.terms())
            if (q != 0) t1[{j, k}] = q * (j.fact() / k.fact());
    });

    // route two: composed coalgebra isomorphisms with coefficients at the point
    PbwContext c1(p, 1, 1, order);
    PbwContext c2(p, 1, 2, order);
    std::vector<Rational> pt = base;
    for_each_up_to_degree(n, order, [&](const MultiIndex& j) {
        PolySection im = c2.pbw_inverse(c1.pbw_basis(j));
        for (auto& [k, c] : im.terms()) {
            Rational v = c.eval(pt);
            if (v != 0) t2[{j, k}] = v;
        }
    });

    // route three: the intertwiner flow read through the pairing
    auto q1 = make_fedosov_field(p, 1, 1, order);
    auto q2 = make_fedosov_field(p, 2, 1, order);
    auto phi = solve_phi(q1, q2, Contraction(p, 1));
    for_each_up_to_degree(n, order, [&](const MultiIndex& k) {
        FormalFunction img = phi.apply(FormalFunction::eta_monomial(fr, order, k));
        for_each_up_to_degree(n, order, [&](const MultiIndex& j) {
            Rational v = img.fiber_coefficient(j).eval(pt);
            if (v != 0) t3[{j, k}] = v * (j.fact() / k.fact());
        });
    });

    auto mismatch = [&](const Matrix& a, const Matrix& b, const std::string& names) {
        for (auto& [key, v] : a) {
            auto it = b.find(key);
            Rational w = (it == b.end()) ? Rational(0) : it->second;
            if (v != w) {
                rep.ok = false;
                rep.witness = names + " differ at d" + key.first.str() + " <- d" +
                              key.second.str() + ": " + rat_to_string(v) + " vs " +
                              rat_to_string(w);
                return true;
            }
        }
        for (auto& [key, v] : b) {
            if (!a.count(key)) {
                rep.ok = false;
                rep.witness = names + " differ at d" + key.first.str() + " <- d" +
                              key.second.str() + ": 0 vs " + rat_to_string(v);
                return true;
            }
        }
        return false;
    };
    if (mismatch(t1, t2, "jet and coalgebra routes")) return rep;
    if (mismatch(t1, t3, "jet and flow routes")) return rep;
    return rep;
}

} // namespace fedosov
