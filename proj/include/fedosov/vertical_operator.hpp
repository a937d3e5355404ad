#pragma once

#include "fedosov/enveloping.hpp"

#include <functional>

namespace fedosov {

/// Filtration-shifting vertical operator in its unique expansion by vertical
/// differential operators: slice_K acts as f |-> slice_K * d_K(f), so the
/// q-th summand collects the slices with |K| = q and the declared shift
/// bounds the fiber order of slice_K from below by |K| + shift.
class VerticalOperator {
public:
    VerticalOperator() = default;
    VerticalOperator(Frame frame, int trunc, int shift)
        : frame_(frame), trunc_(trunc), shift_(shift) {}

    static VerticalOperator identity(const Frame& f, int trunc) {
        VerticalOperator op(f, trunc, 0);
        op.add_slice(MultiIndex(f.r), FormalFunction::one(f, trunc));
        return op;
    }

    const Frame& frame() const { return frame_; }
    int trunc() const { return trunc_; }
    int declared_shift() const { return shift_; }
    const std::map<MultiIndex, FormalFunction>& slices() const { return slices_; }
    bool is_zero() const { return slices_.empty(); }

    void add_slice(const MultiIndex& k, const FormalFunction& slice) {
        if (slice.is_zero()) return;
        auto it = slices_.find(k);
        if (it == slices_.end()) {
            slices_.emplace(k, slice);
        } else {
            it->second += slice;
            if (it->second.is_zero()) slices_.erase(it);
        }
    }
    FormalFunction slice(const MultiIndex& k) const {
        auto it = slices_.find(k);
        return it == slices_.end() ? FormalFunction::zero(frame_, trunc_) : it->second;
    }

    FormalFunction apply(const FormalFunction& f) const;

    /// Smallest ord(slice_K) - |K| over the support; the sharp shift.
    int shift_lower_bound() const;
    /// Keeps slices whose exterior degree has the given parity everywhere.
    VerticalOperator parity_part(int parity) const;
    bool pure_even() const;

    bool operator==(const VerticalOperator& o) const {
        return frame_ == o.frame_ && trunc_ == o.trunc_ && slices_ == o.slices_;
    }
    bool operator!=(const VerticalOperator& o) const { return !(*this == o); }

    VerticalOperator operator+(const VerticalOperator& o) const;
    VerticalOperator operator-(const VerticalOperator& o) const;
    VerticalOperator operator*(const Rational& s) const;
    VerticalOperator operator-() const { return *this * Rational(-1); }

    std::string str() const;

private:
    Frame frame_;
    int trunc_ = 0;
    int shift_ = 0;
    std::map<MultiIndex, FormalFunction> slices_;
};

/// Unique slice family of a vertical operator given as a black box on the
/// fiber monomials; rejects samples violating the declared shift, naming the
/// witness monomial.
VerticalOperator decompose(const Frame& frame, int trunc, int declared_shift,
                           const std::function<FormalFunction(const MultiIndex&)>& values);

/// Structure operators acting sliceweise: the commutator with the Koszul
/// field, the weighted homotopy and the projection.
VerticalOperator delta_op(const VerticalOperator& op);
VerticalOperator h_op(const VerticalOperator& op, const Contraction& ctx);
VerticalOperator sigma0_op(const VerticalOperator& op, const Contraction& ctx);

/// The intertwiner derivative: dq o phi + [k + Q2, phi], where k + Q2 is the
/// Koszul-free tail of the second Fedosov field.
VerticalOperator eth(const VerticalOperator& phi, const BForm& dq, const FedosovField& q2);

/// Unique vertical automorphism with phi o Q2 = Q1 o phi, computed by the
/// fixed-point accumulation phi <- 1 + h eth(phi) with the chosen homotopy.
/// Verifies the fixed-point equation and the intertwining residual up to one
/// degree below truncation; any leftover is a hard failure.
VerticalOperator solve_phi(const FedosovField& q1, const FedosovField& q2,
                           const Contraction& hctx);

struct IntertwinerReport {
    bool ok = true;
    std::string witness;
};
IntertwinerReport check_intertwining(const VerticalOperator& phi, const FedosovField& q1,
                                     const FedosovField& q2);

/// Time-one flow of a vertical field of fiber order >= 2 and form degree 0.
VerticalOperator exp_field(const BForm& y, int trunc);

/// Logarithm of a vertical automorphism with trivial linear component,
/// computed by two independent backends (componentwise recursion and the
/// operator logarithm series) which must agree exactly.
BForm log_operator(const VerticalOperator& phi);

/// Pairing transpose of a filtered coalgebra endomorphism of the symmetric
/// algebra, given degreewise: <phi(f), theta> = <f, psi(theta)>.
VerticalOperator dual_of_coalgebra_map(
    const Frame& frame, int trunc,
    const std::function<PolySection(const MultiIndex&)>& psi);

/// Fiberwise polydifferential operator eta^I (x) d_{J_0} (x) ... (x) d_{J_k}
/// and its tensor form with function coefficients per derivative tuple.
struct PolyDiffOp {
    MultiIndex eta_power;
    std::vector<MultiIndex> legs;
};
struct PolyDiffTensor {
    Frame frame;
    int trunc = 0;
    std::map<std::vector<MultiIndex>, FormalFunction> terms;

    void add(const std::vector<MultiIndex>& key, const FormalFunction& c);
    int filtration_order() const;
    bool operator==(const PolyDiffTensor& o) const { return terms == o.terms; }
};

/// Conjugated operator phi o P(phi^{-1} -, ..., phi^{-1} -) extracted as a
/// tensor by triangular evaluation sweeps.
PolyDiffTensor pushforward_polydiff(const VerticalOperator& phi,
                                    const VerticalOperator& phi_inverse, const PolyDiffOp& p);

/// The order-zero tensor eta^I (x) psi^{-1}(d_{J_0}) (x) ... built from the
/// transpose of phi^{-1}; pushforward minus this is the remainder whose fiber
/// order exceeds |I|.
PolyDiffTensor pushforward_leading_term(const VerticalOperator& phi_inverse,
                                        const PolyDiffOp& p);

} // namespace fedosov
