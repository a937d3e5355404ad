#pragma once

#include "fedosov/lie_pair.hpp"

#include <mutex>

namespace fedosov {

/// Koszul vector field k = sum_i xi^i d/d eta^i: degree +1, squares to zero.
FormalFunction koszul(const FormalFunction& f);

/// Degree -1 companion sum_i eta^i d/d xi^i acting on B-type exterior
/// generators only; A-type generators are untouched.
FormalFunction hat_koszul(const FormalFunction& f);

/// Euler scaling [k, hat k]: multiplies each monomial by (#B-type exterior
/// factors + symmetric degree).
FormalFunction euler(const FormalFunction& f);

/// Koszul contraction data for one choice of splitting. For the second
/// splitting the operators are conjugated by the coframe rewriting, since the
/// B/A-type decomposition of the exterior variables depends on the splitting.
class Contraction {
public:
    Contraction(const LiePairPresentation& p, int splitting)
        : p_(&p), splitting_(splitting) {
        if (splitting != 1 && splitting != 2)
            throw StructuralError("splitting choice must be 1 or 2");
    }
    Contraction(const Contraction&) = delete;
    Contraction& operator=(const Contraction&) = delete;

    int splitting() const { return splitting_; }
    const LiePairPresentation& presentation() const { return *p_; }

    /// Weighted homotopy: (1/(p2+q)) hat k per monomial, zero when p2 = q = 0.
    FormalFunction h(const FormalFunction& f) const;
    /// Projection to the A-type exterior part with trivial fiber degree.
    FormalFunction sigma0(const FormalFunction& f) const;

    BForm h_nat(const BForm& x) const;      // h (x) id_B
    BForm sigma0_nat(const BForm& x) const;
    BForm delta_nat(const BForm& x) const;  // [k,-] = k (x) id_B on vertical fields

private:
    FormalFunction conjugated(FormalFunction (*op)(const FormalFunction&),
                              const FormalFunction& f) const;
    FormalFunction change(const FormalFunction& f, bool inverse) const;
    const std::map<ExtMask, Coefficient>& mask_expansion(ExtMask m, bool inverse,
                                                         int trunc) const;

    const LiePairPresentation* p_;
    int splitting_;
    // write-once cache of coframe rewritings per exterior monomial
    mutable std::mutex cache_mutex_;
    mutable std::map<ExtMask, std::map<ExtMask, Coefficient>> fwd_cache_, inv_cache_;
};

} // namespace fedosov
