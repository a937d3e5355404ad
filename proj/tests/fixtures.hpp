#pragma once

#include "fedosov/lie_pair.hpp"

#include <random>

namespace fedosov::testing {

/// Abelian point pair, r = rp = 1: all brackets, anchors and Christoffels zero.
inline LiePairPresentation abelian_point(int trunc = 6) {
    Frame f{1, 1, BaseMode::Point, 0};
    return LiePairPresentation(f, trunc);
}

/// Solvable point pair, r = rp = 1: [a, b] = b, Bott-forced nabla_a b = b,
/// nabla_b b = u_k b for connection k, second splitting offset by s.
inline LiePairPresentation solvable_point(const Rational& u1 = 1, const Rational& u2 = 0,
                                          const Rational& s = 1, int trunc = 6) {
    Frame f{1, 1, BaseMode::Point, 0};
    LiePairPresentation p(f, trunc);
    p.set_bracket(2, 1, 1, f.cconst(1));  // [a, b] = b
    p.connection(1).at(f, 2, 1, 1) = f.cconst(1);
    p.connection(1).at(f, 1, 1, 1) = f.cconst(u1);
    p.connection(2).at(f, 2, 1, 1) = f.cconst(1);
    p.connection(2).at(f, 1, 1, 1) = f.cconst(u2);
    p.offset().at(f, 1, 1) = f.cconst(s);
    return p;
}

/// Point pair with r = 2, rp = 1: [a, b1] = b2 and nothing else; two distinct
/// symmetric connections and a nonzero second splitting.
inline LiePairPresentation heisenberg_point(int trunc = 6) {
    Frame f{2, 1, BaseMode::Point, 0};
    LiePairPresentation p(f, trunc);
    p.set_bracket(3, 1, 2, f.cconst(1));
    for (int which : {1, 2}) {
        p.connection(which).at(f, 3, 1, 2) = f.cconst(1);  // Bott values
    }
    p.connection(1).at(f, 1, 1, 2) = f.cconst(1);
    p.connection(1).at(f, 2, 2, 1) = f.cconst(Rational(1, 2));
    p.connection(2).at(f, 1, 1, 1) = f.cconst(1);
    p.connection(2).at(f, 1, 2, 1) = f.cconst(Rational(1, 3));
    p.connection(2).at(f, 2, 1, 1) = f.cconst(Rational(1, 3));
    p.offset().at(f, 1, 1) = f.cconst(1);
    p.offset().at(f, 2, 1) = f.cconst(Rational(-1, 2));
    return p;
}

/// Tangent pair of the line: L = T_M on a 1-d chart, A = 0, constant
/// Christoffels c1, c2 for the two connections.
inline LiePairPresentation chart_1d(const Rational& c1 = 0, const Rational& c2 = 1,
                                    int trunc = 6) {
    Frame f{1, 0, BaseMode::Chart, 1};
    LiePairPresentation p(f, trunc);
    p.rho(1, 1) = Coefficient::constant(BaseMode::Chart, 1, 1);
    p.connection(1).at(f, 1, 1, 1) = f.cconst(c1);
    p.connection(2).at(f, 1, 1, 1) = f.cconst(c2);
    return p;
}

/// Chart pair with a nontrivial A-part on a line: [a, b] = x a, anchor d/dx
/// on the B-letter only, position-dependent second splitting and connections.
inline LiePairPresentation chart_mixed(int trunc = 5) {
    Frame f{1, 1, BaseMode::Chart, 1};
    LiePairPresentation p(f, trunc);
    auto x = Coefficient::coordinate(1, 1);
    p.rho(1, 1) = Coefficient::constant(BaseMode::Chart, 1, 1);
    p.set_bracket(2, 1, 2, x);  // [a, b] = x a
    p.offset().at(f, 1, 1) = x;
    p.connection(2).at(f, 1, 1, 1) = x;
    return p;
}

/// Tangent pair of the plane: coordinate frame, flat first connection, second
/// connection with a position-dependent symmetric Christoffel symbol.
inline LiePairPresentation chart_2d(int trunc = 5) {
    Frame f{2, 0, BaseMode::Chart, 2};
    LiePairPresentation p(f, trunc);
    for (int i = 1; i <= 2; ++i) p.rho(i, i) = Coefficient::constant(BaseMode::Chart, 2, 1);
    // Gamma^1_{11} = x2, Gamma^2_{12} = Gamma^2_{21} = x1
    p.connection(2).at(f, 1, 1, 1) = Coefficient::coordinate(2, 2);
    p.connection(2).at(f, 1, 2, 2) = Coefficient::coordinate(2, 1);
    p.connection(2).at(f, 2, 1, 2) = Coefficient::coordinate(2, 1);
    return p;
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(unsigned long seed) : gen(seed) {}

    int uniform(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(gen);
    }
    Rational rational() {
        int num = uniform(-6, 6);
        int den = uniform(1, 4);
        return rat(num, den);
    }
    Rational nonzero_rational() {
        Rational q = rational();
        return q == 0 ? Rational(1) : q;
    }
    Coefficient coefficient(const Frame& f, int max_x_degree = 2) {
        if (f.mode == BaseMode::Point) return f.cconst(rational());
        Coefficient c = f.czero();
        int terms = uniform(0, 2);
        for (int t = 0; t < terms; ++t) {
            MultiIndex j(f.n);
            int d = uniform(0, max_x_degree);
            for (int k = 0; k < d; ++k) j[uniform(0, f.n - 1)] += 1;
            c += Coefficient::monomial(f.n, j, rational());
        }
        return c;
    }
    MultiIndex multi_index(int width, int degree) {
        MultiIndex j(width);
        for (int k = 0; k < degree; ++k) j[uniform(0, width - 1)] += 1;
        return j;
    }
    FormalFunction function(const Frame& f, int trunc, int max_terms = 5,
                            int min_sym_degree = 0, int max_sym_degree = -1) {
        if (max_sym_degree < 0) max_sym_degree = trunc;
        FormalFunction r(f, trunc);
        int terms = uniform(1, max_terms);
        for (int t = 0; t < terms; ++t) {
            ExtMask m = ExtMask(uniform(0, (1 << f.rank_total()) - 1));
            int d = uniform(min_sym_degree, max_sym_degree);
            r.add_term(m, multi_index(f.r, d), coefficient(f));
        }
        return r;
    }
    BForm vertical_field(const Frame& f, int trunc, int min_order = 0, bool pure_fiber = false) {
        BForm x(f, trunc);
        for (int j = 1; j <= f.r; ++j) {
            FormalFunction g = function(f, trunc, 4, min_order);
            if (pure_fiber) g = g.form_part(0);
            // enforce the requested minimal symmetric degree
            FormalFunction clipped(f, trunc);
            for (auto& [key, c] : g.terms())
                if (key.second.degree() >= min_order) clipped.add_term(key.first, key.second, c);
            x.comp(j) = clipped;
        }
        return x;
    }
};

} // namespace fedosov::testing
