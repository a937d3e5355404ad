#pragma once

#include "fedosov/coefficient.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>

namespace fedosov {

/// Frame data shared by all graded values: ranks of the quotient and
/// subalgebroid factors and the chart dimension (0 over a point).
struct Frame {
    int r = 0;   // rank of B; fiber coordinates eta^1..eta^r, exterior xi^1..xi^r
    int rp = 0;  // rank of A; exterior zeta^1..zeta^rp stored as indices r+1..r+rp
    BaseMode mode = BaseMode::Point;
    int n = 0;  // chart dimension

    int rank_total() const { return r + rp; }
    bool operator==(const Frame& o) const {
        return r == o.r && rp == o.rp && mode == o.mode && n == o.n;
    }
    bool operator!=(const Frame& o) const { return !(*this == o); }
    Coefficient czero() const { return Coefficient::zero(mode, n); }
    Coefficient cconst(const Rational& v) const { return Coefficient::constant(mode, n, v); }
};

/// Squarefree exterior monomial as a bitmask over the frame indices 1..r+rp.
/// Bit i-1 set means generator i is present; generators appear in increasing
/// index order, which fixes the sign normalization globally.
using ExtMask = std::uint32_t;

inline int ext_degree(ExtMask m) { return __builtin_popcount(m); }
inline ExtMask b_type_bits(const Frame& f) {
    return f.r >= 32 ? ~ExtMask(0) : ((ExtMask(1) << f.r) - 1);
}
inline int b_type_degree(const Frame& f, ExtMask m) {
    return __builtin_popcount(m & b_type_bits(f));
}

/// Koszul sign of merging two sorted squarefree monomials a ^ b; 0 if they overlap.
inline int wedge_sign(ExtMask a, ExtMask b) {
    if (a & b) return 0;
    int inversions = 0;
    for (ExtMask t = b; t;) {
        int i = __builtin_ctz(t);
        t &= t - 1;
        inversions += __builtin_popcount(a >> (i + 1));
    }
    return (inversions & 1) ? -1 : 1;
}

constexpr int kInfiniteOrder = std::numeric_limits<int>::max();

/// Element of the truncated function algebra of the formal fiber bundle
/// L[1] + B: finite sum of coefficient * xi^I * eta^J with |J| <= trunc.
class FormalFunction {
public:
    using Key = std::pair<ExtMask, MultiIndex>;

    FormalFunction() = default;
    FormalFunction(Frame frame, int trunc) : frame_(frame), trunc_(trunc) {}

    static FormalFunction zero(const Frame& f, int trunc) { return FormalFunction(f, trunc); }
    static FormalFunction one(const Frame& f, int trunc) {
        return constant(f, trunc, f.cconst(1));
    }
    static FormalFunction constant(const Frame& f, int trunc, const Coefficient& c) {
        FormalFunction r(f, trunc);
        r.add_term(0, MultiIndex(f.r), c);
        return r;
    }
    /// xi^i or zeta^(i-r), 1-based frame index.
    static FormalFunction exterior(const Frame& f, int trunc, int i) {
        FormalFunction r(f, trunc);
        r.add_term(ExtMask(1) << (i - 1), MultiIndex(f.r), f.cconst(1));
        return r;
    }
    static FormalFunction eta_monomial(const Frame& f, int trunc, const MultiIndex& j) {
        FormalFunction r(f, trunc);
        r.add_term(0, j, f.cconst(1));
        return r;
    }
    static FormalFunction monomial(const Frame& f, int trunc, ExtMask m, const MultiIndex& j,
                                   const Coefficient& c) {
        FormalFunction r(f, trunc);
        r.add_term(m, j, c);
        return r;
    }

    const Frame& frame() const { return frame_; }
    int trunc() const { return trunc_; }
    const std::map<Key, Coefficient>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(ExtMask m, const MultiIndex& j, const Coefficient& c) {
        if (c.is_zero() || j.degree() > trunc_) return;
        Key k{m, j};
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool operator==(const FormalFunction& o) const {
        return frame_ == o.frame_ && trunc_ == o.trunc_ && terms_ == o.terms_;
    }
    bool operator!=(const FormalFunction& o) const { return !(*this == o); }

    FormalFunction operator+(const FormalFunction& o) const;
    FormalFunction operator-(const FormalFunction& o) const;
    FormalFunction operator*(const FormalFunction& o) const;  // graded product
    FormalFunction operator*(const Coefficient& c) const;
    FormalFunction operator*(const Rational& s) const;
    FormalFunction operator-() const { return *this * Rational(-1); }
    FormalFunction& operator+=(const FormalFunction& o) { return *this = *this + o; }
    FormalFunction& operator-=(const FormalFunction& o) { return *this = *this - o; }

    /// Minimal symmetric degree of the support; infinity for zero.
    int filtration_order() const;
    /// Keeps terms of symmetric degree <= d.
    FormalFunction truncated(int d) const;
    /// Keeps terms of symmetric degree exactly d.
    FormalFunction symmetric_part(int d) const;
    /// Keeps terms of exterior form degree exactly p.
    FormalFunction form_part(int p) const;
    int max_form_degree() const;
    bool pure_fiber() const;  // no exterior part anywhere

    /// Derivative d/d eta^j, 1-based; the fiber variables are even.
    FormalFunction eta_partial(int j) const;

    /// Coefficient of the pure-fiber monomial eta^J.
    Coefficient fiber_coefficient(const MultiIndex& j) const;

    std::string str() const;

    void check_compatible(const FormalFunction& o) const {
        if (frame_ != o.frame_ || trunc_ != o.trunc_)
            throw StructuralError("formal function frame/truncation mismatch");
    }

private:
    Frame frame_;
    int trunc_ = 0;
    std::map<Key, Coefficient> terms_;
};

/// Element of the symmetric algebra of B in the monomial basis b^(. J): the
/// coalgebra side of the duality pairing.
class PolySection {
public:
    PolySection() = default;
    PolySection(Frame frame) : frame_(frame) {}

    static PolySection zero(const Frame& f) { return PolySection(f); }
    static PolySection one(const Frame& f) {
        PolySection r(f);
        r.add_term(MultiIndex(f.r), f.cconst(1));
        return r;
    }
    static PolySection generator(const Frame& f, int i) {
        PolySection r(f);
        r.add_term(MultiIndex::unit(f.r, i - 1), f.cconst(1));
        return r;
    }
    static PolySection basis(const Frame& f, const MultiIndex& j) {
        PolySection r(f);
        r.add_term(j, f.cconst(1));
        return r;
    }

    const Frame& frame() const { return frame_; }
    const std::map<MultiIndex, Coefficient>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const MultiIndex& j, const Coefficient& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(j);
        if (it == terms_.end()) {
            terms_.emplace(j, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool operator==(const PolySection& o) const {
        return frame_ == o.frame_ && terms_ == o.terms_;
    }
    bool operator!=(const PolySection& o) const { return !(*this == o); }

    PolySection operator+(const PolySection& o) const;
    PolySection operator-(const PolySection& o) const;
    PolySection operator*(const Coefficient& c) const;
    PolySection operator*(const Rational& s) const;
    PolySection operator-() const { return *this * Rational(-1); }
    PolySection& operator+=(const PolySection& o) { return *this = *this + o; }

    int max_degree() const;
    PolySection degree_part(int d) const;
    Coefficient coefficient(const MultiIndex& j) const;

    std::string str() const;

private:
    Frame frame_;
    std::map<MultiIndex, Coefficient> terms_;
};

/// Duality pairing <b^(. J), eta^(J')> = J! delta_{J J'}, extended bilinearly;
/// the shuffle-sum normalization. The function argument must be pure fiber.
Coefficient pair(const PolySection& theta, const FormalFunction& f);

/// Formwise extension: pairs the fiber part of every exterior monomial.
FormalFunction pair_formwise(const PolySection& theta, const FormalFunction& f);

/// Contraction by a degree-one section: the derivation sum_i c_i d/d eta^i.
FormalFunction contract(const PolySection& b, const FormalFunction& f);

/// Metric of the fiber-order filtration, 1/(order(f - g) + 1); zero when the
/// difference vanishes at truncation.
inline Rational iadic_distance(const FormalFunction& f, const FormalFunction& g) {
    int ord = (f - g).filtration_order();
    return ord == kInfiniteOrder ? Rational(0) : Rational(1, ord + 1);
}

} // namespace fedosov
