#pragma once

#include "fedosov/vertical_operator.hpp"

#include <vector>

namespace fedosov {

/// Christoffel data of a connection on the tangent bundle of a chart:
/// polynomial entries gamma^k_{ij}(x), symmetric in the lower pair.
struct ChristoffelData {
    int dim = 0;
    std::vector<Coefficient> gamma;  // dense [k][i][j]

    static ChristoffelData zero(int dim);
    Coefficient& at(int k, int i, int j) {
        return gamma.at(((k - 1) * dim + (i - 1)) * dim + (j - 1));
    }
    const Coefficient& at(int k, int i, int j) const {
        return gamma.at(((k - 1) * dim + (i - 1)) * dim + (j - 1));
    }
    bool symmetric() const;
};

/// The tangent-pair presentation of a chart stores its Christoffel data as a
/// frame connection; this extracts it back for the oracle.
ChristoffelData christoffel_from_presentation(const LiePairPresentation& p, int which);

/// Fiberwise polynomial map at a base point: constant part base, displacement
/// per axis a polynomial in the fiber coordinates with zero constant term.
struct JetMap {
    int dim = 0;
    int order = 0;
    std::vector<Rational> base;
    std::vector<Coefficient> comps;  // width-dim polynomials in v

    static JetMap identity(int dim, int order, std::vector<Rational> base);
    bool linear_part_is_identity() const;
    /// Coefficient of v^J in component k (1-based).
    Rational coefficient(int k, const MultiIndex& j) const;
    bool operator==(const JetMap& o) const {
        return dim == o.dim && order == o.order && base == o.base && comps == o.comps;
    }
    /// Evaluates base + displacement at a rational fiber point.
    std::vector<Rational> eval(const std::vector<Rational>& v) const;
};

/// Taylor coefficients of the time-one geodesic flow from the base point,
/// solved degree by degree from x'' + gamma(x) x' x' = 0. Exact.
JetMap geodesic_jet(const ChristoffelData& g, const std::vector<Rational>& base, int order);

/// Formal inverse of a displacement jet with identity linear part.
JetMap invert_jet(const JetMap& f);
/// Composition f(g(v)) of displacement jets at the same base point.
JetMap compose_jets(const JetMap& f, const JetMap& g);

/// Coordinate transformation between two geodesic charts around one point:
/// the inverse of the second flow composed with the first.
JetMap transition_jet(const ChristoffelData& g1, const ChristoffelData& g2,
                      const std::vector<Rational>& base, int order);

/// Fixed-step fourth-order integration of the geodesic equation to time one;
/// the floating sanity layer next to the exact jets.
std::vector<double> geodesic_rk4(const ChristoffelData& g, const std::vector<double>& base,
                                 const std::vector<double>& v, double step = 1e-3);

/// Newton inversion of the integrated flow, for the numeric cross-check of
/// transition jets.
std::vector<double> geodesic_rk4_inverse(const ChristoffelData& g,
                                         const std::vector<double>& base,
                                         const std::vector<double>& target,
                                         double step = 1e-3);

struct ThreeWayReport {
    bool ok = true;
    std::string witness;
};

/// Exact three-way comparison at the base point between the transition jet,
/// the composed coalgebra isomorphisms, and the intertwiner flow, all read in
/// the factorial-weighted monomial bases.
ThreeWayReport compare_with_pbw(const LiePairPresentation& p,
                                const std::vector<Rational>& base, int order);

} // namespace fedosov
