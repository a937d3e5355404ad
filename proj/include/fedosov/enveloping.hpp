#pragma once

#include "fedosov/fedosov_field.hpp"

#include <map>
#include <utility>
#include <vector>

namespace fedosov {

/// Word in the frame letters, kept in normal order: non-decreasing letter
/// indices, which puts all B-letters before all A-letters.
using Word = std::vector<int>;

/// Element of the universal enveloping algebra in the normal-ordered basis:
/// finite association word -> base coefficient. Quotient classes by the left
/// ideal generated by the A-letters are represented by pure-B words.
class EnvelopingElement {
public:
    EnvelopingElement() = default;
    explicit EnvelopingElement(Frame frame) : frame_(frame) {}

    static EnvelopingElement zero(const Frame& f) { return EnvelopingElement(f); }
    static EnvelopingElement unit(const Frame& f) {
        EnvelopingElement e(f);
        e.add_term({}, f.cconst(1));
        return e;
    }
    static EnvelopingElement letter(const Frame& f, int u) {
        EnvelopingElement e(f);
        e.add_term({u}, f.cconst(1));
        return e;
    }

    const Frame& frame() const { return frame_; }
    const std::map<Word, Coefficient>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Word& w, const Coefficient& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            terms_.emplace(w, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    Coefficient coefficient(const Word& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? frame_.czero() : it->second;
    }
    int max_word_length() const {
        size_t n = 0;
        for (auto& [w, c] : terms_) n = std::max(n, w.size());
        return static_cast<int>(n);
    }

    bool operator==(const EnvelopingElement& o) const {
        return frame_ == o.frame_ && terms_ == o.terms_;
    }
    bool operator!=(const EnvelopingElement& o) const { return !(*this == o); }

    EnvelopingElement operator+(const EnvelopingElement& o) const;
    EnvelopingElement operator-(const EnvelopingElement& o) const;
    EnvelopingElement operator*(const Rational& s) const;
    EnvelopingElement operator-() const { return *this * Rational(-1); }
    EnvelopingElement& operator+=(const EnvelopingElement& o) { return *this = *this + o; }
    EnvelopingElement& operator-=(const EnvelopingElement& o) { return *this = *this - o; }

    /// Left multiplication by a coefficient commutes with everything.
    EnvelopingElement scaled(const Coefficient& c) const;

    std::string str() const;

private:
    Frame frame_;
    std::map<Word, Coefficient> terms_;
};

class LiePairPresentation;

/// Right multiplication primitives; rewriting uses the defining relations
/// v u = u v + [v, u] and u f = f u + rho_u(f).
EnvelopingElement mul_letter_right(const LiePairPresentation& p, const EnvelopingElement& e,
                                   int u);
EnvelopingElement mul_coeff_right(const LiePairPresentation& p, const EnvelopingElement& e,
                                  const Coefficient& g);
EnvelopingElement env_product(const LiePairPresentation& p, const EnvelopingElement& a,
                              const EnvelopingElement& b);

/// Confluent normal form of an arbitrary word.
EnvelopingElement normal_form(const LiePairPresentation& p, const Word& w);

/// Projection onto the quotient by the left ideal of the A-letters: drops
/// every normal word whose rightmost letter is an A-letter.
EnvelopingElement quotient_project(const EnvelopingElement& e);

/// Tensor squares over the base ring, coefficients collected bilinearly.
struct PolyTensorSquare {
    std::map<std::pair<MultiIndex, MultiIndex>, Coefficient> terms;
    void add(const MultiIndex& a, const MultiIndex& b, const Coefficient& c);
    bool operator==(const PolyTensorSquare& o) const { return terms == o.terms; }
};
struct EnvTensorSquare {
    std::map<std::pair<Word, Word>, Coefficient> terms;
    void add(const Word& a, const Word& b, const Coefficient& c);
    bool operator==(const EnvTensorSquare& o) const { return terms == o.terms; }
};

/// Shuffle comultiplication of the symmetric coalgebra.
PolyTensorSquare comultiply(const PolySection& s);
/// Comultiplication of a quotient class given by its pure-B representative.
EnvTensorSquare comultiply(const EnvelopingElement& e);

/// One choice of splitting and torsion-free connection: the induced
/// coalgebra isomorphism onto the quotient, computed by the symmetric
/// iteration and inverted by back-substitution on the word-length filtration.
class PbwContext {
public:
    PbwContext(const LiePairPresentation& p, int splitting, int connection_choice,
               int max_degree);

    const LiePairPresentation& presentation() const { return *p_; }
    int splitting() const { return splitting_; }
    int max_degree() const { return max_degree_; }

    /// Image of the basis monomial b^(. J), as a quotient representative.
    const EnvelopingElement& pbw_basis(const MultiIndex& j);
    EnvelopingElement pbw(const PolySection& s);
    PolySection pbw_inverse(const EnvelopingElement& quotient_class);

    /// Flat connection pulled back through the isomorphism:
    /// value = pbw^-1(v_u . pbw(s)); raises the degree by at most one.
    PolySection lightning(int u, const PolySection& s);
    /// A-action by coderivations, alpha indexing the A-frame.
    PolySection kapranov(int alpha, const PolySection& s);

    /// The splitting embeds b_i as bt_i + s_i^alpha a_alpha.
    EnvelopingElement iota_b(int i) const;

    /// Fiber generator image of the dual covariant derivative, assembled from
    /// the pairing transpose of the connection above.
    FormalFunction dual_eta_image(int j, int trunc);
    /// Covariant derivative of the dual connection on the function algebra.
    FormalFunction dual_derivative(const FormalFunction& f);

private:
    PolySection nabla_iota(int i, const PolySection& s) const;

    const LiePairPresentation* p_;
    int splitting_;
    int conn_choice_;
    int max_degree_;
    std::map<MultiIndex, EnvelopingElement> memo_;
    std::map<std::tuple<int, int, int>, FormalFunction> eta_image_memo_;
};

struct ConsistencyReport {
    bool ok = true;
    std::string witness;
};

/// Cross-module gate: the Fedosov field of a choice equals the covariant
/// derivative of the dual flat connection, checked on every basis monomial of
/// symmetric degree < trunc.
ConsistencyReport verify_q_equals_lightning(const LiePairPresentation& p,
                                            int connection_choice, int splitting, int trunc);

} // namespace fedosov
