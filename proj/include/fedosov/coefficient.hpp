#pragma once

#include "fedosov/multi_index.hpp"
#include "fedosov/rational.hpp"

#include <map>
#include <string>

namespace fedosov {

enum class BaseMode { Point, Chart };

/// Scalar of the base ring: an exact rational over a point, or a polynomial
/// function of the chart coordinates with exact rational coefficients.
/// Normal form: no zero entries in the association.
class Coefficient {
public:
    Coefficient() : mode_(BaseMode::Point), dim_(0) {}

    static Coefficient zero(BaseMode mode, int chart_dim) {
        Coefficient c;
        c.mode_ = mode;
        c.dim_ = (mode == BaseMode::Point) ? 0 : chart_dim;
        return c;
    }
    static Coefficient constant(BaseMode mode, int chart_dim, const Rational& v) {
        Coefficient c = zero(mode, chart_dim);
        if (v != 0) c.terms_[MultiIndex(c.dim_)] = v;
        return c;
    }
    static Coefficient scalar(const Rational& v) { return constant(BaseMode::Point, 0, v); }
    /// Chart monomial v * x^J.
    static Coefficient monomial(int chart_dim, const MultiIndex& j, const Rational& v) {
        Coefficient c = zero(BaseMode::Chart, chart_dim);
        if (v != 0) c.terms_[j] = v;
        return c;
    }
    /// Chart coordinate function x^axis (1-based).
    static Coefficient coordinate(int chart_dim, int axis) {
        return monomial(chart_dim, MultiIndex::unit(chart_dim, axis - 1), 1);
    }

    BaseMode mode() const { return mode_; }
    int chart_dim() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_zero());
    }
    /// The rational value of a constant; throws on non-constant chart polynomials.
    Rational value() const {
        if (terms_.empty()) return 0;
        if (!is_constant()) throw StructuralError("coefficient is not constant");
        return terms_.begin()->second;
    }
    const std::map<MultiIndex, Rational>& terms() const { return terms_; }

    bool operator==(const Coefficient& o) const {
        return mode_ == o.mode_ && dim_ == o.dim_ && terms_ == o.terms_;
    }
    bool operator!=(const Coefficient& o) const { return !(*this == o); }

    Coefficient operator+(const Coefficient& o) const;
    Coefficient operator-(const Coefficient& o) const;
    Coefficient operator*(const Coefficient& o) const;
    Coefficient operator*(const Rational& s) const;
    Coefficient operator-() const { return *this * Rational(-1); }
    Coefficient& operator+=(const Coefficient& o) { return *this = *this + o; }
    Coefficient& operator-=(const Coefficient& o) { return *this = *this - o; }

    /// d/dx^axis (1-based). Chart mode only: over a point the anchor vanishes.
    Coefficient partial(int axis) const;

    /// Evaluation at a chart point (Point mode ignores the argument).
    Rational eval(const std::vector<Rational>& x) const;

    int total_degree() const {
        int d = 0;
        for (auto& [j, v] : terms_) d = std::max(d, j.degree());
        return d;
    }

    std::string str() const;

    void check_compatible(const Coefficient& o) const {
        if (mode_ != o.mode_ || dim_ != o.dim_)
            throw StructuralError("coefficient mode/chart dimension mismatch");
    }

private:
    BaseMode mode_;
    int dim_;
    std::map<MultiIndex, Rational> terms_;
};

inline Coefficient operator*(const Rational& s, const Coefficient& c) { return c * s; }

} // namespace fedosov
