#pragma once

#include "fedosov/formal_function.hpp"

#include <vector>

namespace fedosov {

/// B-valued element of the function algebra: one FormalFunction per B-frame
/// component. Read either as a form with values in B or as the vertical
/// vector field sum_j comp_j d/d eta^j.
class BForm {
public:
    BForm() = default;
    BForm(Frame frame, int trunc) : frame_(frame), trunc_(trunc) {
        comps_.assign(frame.r, FormalFunction(frame, trunc));
    }

    static BForm zero(const Frame& f, int trunc) { return BForm(f, trunc); }

    const Frame& frame() const { return frame_; }
    int trunc() const { return trunc_; }
    int rank() const { return static_cast<int>(comps_.size()); }

    FormalFunction& comp(int j) { return comps_.at(j - 1); }  // 1-based B index
    const FormalFunction& comp(int j) const { return comps_.at(j - 1); }

    bool is_zero() const {
        for (auto& c : comps_)
            if (!c.is_zero()) return false;
        return true;
    }

    bool operator==(const BForm& o) const {
        return frame_ == o.frame_ && trunc_ == o.trunc_ && comps_ == o.comps_;
    }
    bool operator!=(const BForm& o) const { return !(*this == o); }

    BForm operator+(const BForm& o) const;
    BForm operator-(const BForm& o) const;
    BForm operator*(const Rational& s) const;
    BForm operator-() const { return *this * Rational(-1); }
    BForm& operator+=(const BForm& o) { return *this = *this + o; }
    BForm& operator-=(const BForm& o) { return *this = *this - o; }

    /// Minimal symmetric degree across components.
    int filtration_order() const;
    /// Components restricted to symmetric degree exactly d.
    BForm symmetric_part(int d) const;
    /// Components restricted to exterior degree exactly p.
    BForm form_part(int p) const;
    int max_form_degree() const;

    std::string str() const;

    void check_compatible(const BForm& o) const {
        if (frame_ != o.frame_ || trunc_ != o.trunc_)
            throw StructuralError("vertical field frame/truncation mismatch");
    }

private:
    Frame frame_;
    int trunc_ = 0;
    std::vector<FormalFunction> comps_;
};

/// Vertical vector fields are BForms acting as derivations. The action and
/// the graded commutator; a vertical field is determined by its values on
/// the fiber generators eta^j.
FormalFunction apply_field(const BForm& x, const FormalFunction& f);

/// Graded commutator [x, y] of vertical vector fields, split over the
/// exterior-degree homogeneous pieces of both arguments.
BForm field_commutator(const BForm& x, const BForm& y);

} // namespace fedosov
