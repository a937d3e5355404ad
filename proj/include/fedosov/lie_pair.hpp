#pragma once

#include "fedosov/vertical_field.hpp"

#include <string>
#include <vector>

namespace fedosov {

/// L-connection on B in Christoffel form: nabla_{v_u}(b_i) = gamma[u][i][j] b_j,
/// u ranging over the full adapted L-frame (B letters first, then A letters).
struct Connection {
    std::vector<Coefficient> gamma;  // dense (r+rp) x r x r

    static Connection zero(const Frame& f);
    Coefficient& at(const Frame& f, int u, int i, int j) {
        return gamma.at(((u - 1) * f.r + (i - 1)) * f.r + (j - 1));
    }
    const Coefficient& at(const Frame& f, int u, int i, int j) const {
        return gamma.at(((u - 1) * f.r + (i - 1)) * f.r + (j - 1));
    }
};

/// Second splitting relative to the reference one: iota_B2(b_i) = bt_i + s[i][alpha] a_alpha.
struct SplittingOffset {
    std::vector<Coefficient> s;  // dense r x rp

    static SplittingOffset zero(const Frame& f);
    bool is_zero() const {
        for (auto& c : s)
            if (!c.is_zero()) return false;
        return true;
    }
    Coefficient& at(const Frame& f, int i, int alpha) {
        return s.at((i - 1) * f.rp + (alpha - 1));
    }
    const Coefficient& at(const Frame& f, int i, int alpha) const {
        return s.at((i - 1) * f.rp + (alpha - 1));
    }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// A Lie pair (L, A) presented by structure functions on an adapted frame
/// (bt_1..bt_r, a_1..a_rp) of L, an anchor matrix, a second splitting offset
/// and two torsion-free connections on B = L/A.
class LiePairPresentation {
public:
    LiePairPresentation() = default;
    LiePairPresentation(Frame frame, int default_trunc);

    const Frame& frame() const { return frame_; }
    int default_trunc() const { return trunc_; }
    void set_default_trunc(int n) { trunc_ = n; }

    /// Structure function c_{uv}^w of [v_u, v_v] = c_{uv}^w v_w.
    Coefficient& c(int u, int v, int w) {
        int k = frame_.rank_total();
        return c_.at(((u - 1) * k + (v - 1)) * k + (w - 1));
    }
    const Coefficient& c(int u, int v, int w) const {
        int k = frame_.rank_total();
        return c_.at(((u - 1) * k + (v - 1)) * k + (w - 1));
    }
    /// Sets c_{uv}^w and c_{vu}^w = -c_{uv}^w.
    void set_bracket(int u, int v, int w, const Coefficient& value) {
        c(u, v, w) = value;
        c(v, u, w) = -value;
    }

    /// Anchor component rho_u^mu (chart mode; zero over a point).
    Coefficient& rho(int u, int mu) { return rho_.at((u - 1) * frame_.n + (mu - 1)); }
    const Coefficient& rho(int u, int mu) const {
        return rho_.at((u - 1) * frame_.n + (mu - 1));
    }

    /// Anchor applied to a base coefficient: rho(v_u)(f).
    Coefficient anchor_apply(int u, const Coefficient& f) const;

    SplittingOffset& offset() { return offset_; }
    const SplittingOffset& offset() const { return offset_; }
    Connection& connection(int which) { return which == 1 ? conn1_ : conn2_; }
    const Connection& connection(int which) const { return which == 1 ? conn1_ : conn2_; }

    bool is_a_type(int u) const { return u > frame_.r; }

private:
    Frame frame_;
    int trunc_ = 4;
    std::vector<Coefficient> c_;
    std::vector<Coefficient> rho_;
    SplittingOffset offset_;
    Connection conn1_, conn2_;
};

/// Antisymmetry, A-closure, Jacobi (with anchor corrections) and anchor
/// compatibility, each violation reported with the offending frame tuple.
ValidationReport validate(const LiePairPresentation& p);

/// Exterior differential of the algebroid acting on functions with the fiber
/// variables inert: raises form degree by one, squares to zero.
FormalFunction ce_differential(const LiePairPresentation& p, const FormalFunction& f);

/// Full covariant derivative on the function algebra: exterior differential
/// plus the dual-connection action on the fiber variables. The dual rule is
/// the negative transpose, d(eta^j) = -gamma_{u,i}^j nu^u eta^i.
FormalFunction cov_derivative_function(const LiePairPresentation& p, const Connection& conn,
                                       const FormalFunction& f);

/// Image of a single fiber generator under the derivative above.
FormalFunction cov_derivative_eta_image(const LiePairPresentation& p, const Connection& conn,
                                        int j, int trunc);

/// Covariant derivative of a B-valued form; fiber variables stay inert unless
/// dual_on_fiber requests the dual-connection action on them as well.
BForm cov_derivative_bform(const LiePairPresentation& p, const Connection& conn,
                           const BForm& omega, bool dual_on_fiber = false);

/// Torsion tensor as a B-valued 2-form.
BForm torsion(const LiePairPresentation& p, const Connection& conn);
bool is_torsion_free(const LiePairPresentation& p, const Connection& conn);

/// Curvature as the fiber-linear slice of a vertical field:
/// comp_j = sum_{u<v,i} R_{uv,i}^j nu^u nu^v eta^i.
BForm curvature(const LiePairPresentation& p, const Connection& conn, int trunc);

/// Checks that the connection restricted to A-directions is the quotient
/// bracket action; expects a torsion-free connection.
std::vector<std::string> bott_check(const LiePairPresentation& p, const Connection& conn);

/// Rewrites a function expressed in the splitting-2 adapted coframe into the
/// reference coframe: zeta^alpha |-> zeta^alpha - s_i^alpha xi^i. Invertible.
FormalFunction frame_change(const LiePairPresentation& p, const FormalFunction& f);
FormalFunction frame_change_inverse(const LiePairPresentation& p, const FormalFunction& f);

/// nabla_{v_u} on the symmetric algebra of B, Leibniz over factors with the
/// anchor acting on coefficients.
PolySection nabla_poly(const LiePairPresentation& p, const Connection& conn, int u,
                       const PolySection& s);

/// Torsion-free companion of an arbitrary connection, for test generation;
/// output must be re-validated by the caller.
Connection make_torsion_free(const LiePairPresentation& p, const Connection& conn);

} // namespace fedosov
