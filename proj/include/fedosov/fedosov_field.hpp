#pragma once

#include "fedosov/contraction.hpp"

namespace fedosov {

/// Homological vector field Q = -k + d^nabla + X on the formal fiber bundle,
/// stored compositionally: the connection reference plus the vertical tail X.
class FedosovField {
public:
    FedosovField(const LiePairPresentation& p, int connection_choice, BForm x)
        : p_(&p), conn_choice_(connection_choice), x_(std::move(x)) {}

    const LiePairPresentation& presentation() const { return *p_; }
    const Connection& connection() const { return p_->connection(conn_choice_); }
    int connection_choice() const { return conn_choice_; }
    const BForm& x() const { return x_; }
    int trunc() const { return x_.trunc(); }

    /// Q applied as a degree +1 derivation.
    FormalFunction apply(const FormalFunction& f) const;
    /// The d^nabla summand alone.
    FormalFunction apply_connection_part(const FormalFunction& f) const;
    /// d^nabla + X, the non-Koszul part (used by the intertwiner machinery).
    FormalFunction apply_tail(const FormalFunction& f) const;

private:
    const LiePairPresentation* p_;
    int conn_choice_;
    BForm x_;
};

/// Fedosov's iteration: the unique vertical field X of filtration order >= 2
/// with h_nat(X) = 0 making Q = -k + d^nabla + X square to zero. The gauge
/// h_nat is the one of the contraction passed in; degreewise the recursion is
///   X_2 = h_nat(d^nabla o d^nabla),
///   X_{k+1} = h_nat([d^nabla, X_k] + 1/2 sum_{p+q=k+1} [X_p, X_q]).
/// Rejects connections with nonzero torsion.
BForm fedosov_vector_field(const LiePairPresentation& p, int connection_choice,
                           const Contraction& hctx, int trunc);

FedosovField assemble_q(const LiePairPresentation& p, int connection_choice, BForm x);

/// Builds the Fedosov field for one choice in one call.
FedosovField make_fedosov_field(const LiePairPresentation& p, int connection_choice,
                                int splitting, int trunc);

/// Q1 - Q2 as a vertical vector field (the Koszul parts cancel).
BForm delta_q(const FedosovField& q1, const FedosovField& q2);

/// Largest symmetric degree d <= max_degree such that Q(Q(f)) vanishes up to
/// degree limit for all basis monomials f; returns a witness on failure.
struct FlatnessReport {
    bool ok = true;
    std::string witness;
};
FlatnessReport check_q_squared(const FedosovField& q);

} // namespace fedosov
