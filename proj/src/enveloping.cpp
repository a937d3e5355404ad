#include "fedosov/enveloping.hpp"
#include "fedosov/lie_pair.hpp"

namespace fedosov {

EnvelopingElement EnvelopingElement::operator+(const EnvelopingElement& o) const {
    if (frame_ != o.frame_) throw StructuralError("enveloping frame mismatch");
    EnvelopingElement r = *this;
    for (auto& [w, c] : o.terms_) r.add_term(w, c);
    return r;
}

EnvelopingElement EnvelopingElement::operator-(const EnvelopingElement& o) const {
    return *this + (-o);
}

EnvelopingElement EnvelopingElement::operator*(const Rational& s) const {
    EnvelopingElement r(frame_);
    if (s == 0) return r;
    for (auto& [w, c] : terms_) r.add_term(w, c * s);
    return r;
}

EnvelopingElement EnvelopingElement::scaled(const Coefficient& c) const {
    EnvelopingElement r(frame_);
    for (auto& [w, v] : terms_) r.add_term(w, c * v);
    return r;
}

std::string EnvelopingElement::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [w, c] : terms_) {
        if (!s.empty()) s += " + ";
        s += "(" + c.str() + ")";
        for (int u : w) {
            s += (u <= frame_.r) ? "*b" + std::to_string(u)
                                 : "*a" + std::to_string(u - frame_.r);
        }
    }
    return s;
}

namespace {

// w . u for a single normal word, recursing on (length, inversions)
EnvelopingElement word_mul_letter(const LiePairPresentation& p, const Word& w,
                                  const Coefficient& c, int u) {
    const Frame& fr = p.frame();
    EnvelopingElement out(fr);
    if (w.empty() || w.back() <= u) {
        Word ww = w;
        ww.push_back(u);
        out.add_term(ww, c);
        return out;
    }
    int v = w.back();
    Word w0(w.begin(), w.end() - 1);
    // (w0 v) u = (w0 u) v + w0 [v, u]
    EnvelopingElement left = word_mul_letter(p, w0, c, u);
    out += mul_letter_right(p, left, v);
    for (int t = 1; t <= fr.rank_total(); ++t) {
        const Coefficient& cc = p.c(v, u, t);
        if (cc.is_zero()) continue;
        EnvelopingElement base(fr);
        base.add_term(w0, c);
        out += mul_letter_right(p, mul_coeff_right(p, base, cc), t);
    }
    return out;
}

// w . g for a coefficient g: prefixes of w stay sorted, so appends suffice
EnvelopingElement word_mul_coeff(const LiePairPresentation& p, const Word& w,
                                 const Coefficient& c, const Coefficient& g) {
    const Frame& fr = p.frame();
    EnvelopingElement out(fr);
    if (g.is_zero()) return out;
    if (fr.mode == BaseMode::Point || w.empty()) {
        Word ww = w;
        out.add_term(ww, c * g);
        return out;
    }
    int v = w.back();
    Word w0(w.begin(), w.end() - 1);
    // (w0 v) g = (w0 g) v + w0 rho_v(g)
    EnvelopingElement head = word_mul_coeff(p, w0, c, g);
    for (auto& [hw, hc] : head.terms()) {
        Word ww = hw;
        ww.push_back(v);
        out.add_term(ww, hc);
    }
    out += word_mul_coeff(p, w0, c, p.anchor_apply(v, g));
    return out;
}

} // namespace

EnvelopingElement mul_letter_right(const LiePairPresentation& p, const EnvelopingElement& e,
                                   int u) {
    EnvelopingElement out(p.frame());
    for (auto& [w, c] : e.terms()) out += word_mul_letter(p, w, c, u);
    return out;
}

EnvelopingElement mul_coeff_right(const LiePairPresentation& p, const EnvelopingElement& e,
                                  const Coefficient& g) {
    EnvelopingElement out(p.frame());
    for (auto& [w, c] : e.terms()) out += word_mul_coeff(p, w, c, g);
    return out;
}

EnvelopingElement env_product(const LiePairPresentation& p, const EnvelopingElement& a,
                              const EnvelopingElement& b) {
    EnvelopingElement out(p.frame());
    for (auto& [w, c] : b.terms()) {
        EnvelopingElement part = mul_coeff_right(p, a, c);
        for (int u : w) part = mul_letter_right(p, part, u);
        out += part;
    }
    return out;
}

EnvelopingElement normal_form(const LiePairPresentation& p, const Word& w) {
    EnvelopingElement out = EnvelopingElement::unit(p.frame());
    for (int u : w) out = mul_letter_right(p, out, u);
    return out;
}

EnvelopingElement quotient_project(const EnvelopingElement& e) {
    EnvelopingElement out(e.frame());
    int r = e.frame().r;
    for (auto& [w, c] : e.terms())
        if (w.empty() || w.back() <= r) out.add_term(w, c);
    return out;
}

void PolyTensorSquare::add(const MultiIndex& a, const MultiIndex& b, const Coefficient& c) {
    if (c.is_zero()) return;
    auto key = std::make_pair(a, b);
    auto it = terms.find(key);
    if (it == terms.end()) {
        terms.emplace(key, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

void EnvTensorSquare::add(const Word& a, const Word& b, const Coefficient& c) {
    if (c.is_zero()) return;
    auto key = std::make_pair(a, b);
    auto it = terms.find(key);
    if (it == terms.end()) {
        terms.emplace(key, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

PolyTensorSquare comultiply(const PolySection& s) {
    PolyTensorSquare out;
    int r = s.frame().r;
    for (auto& [j, c] : s.terms()) {
        // shuffles of a multiset: product of binomials per letter
        std::function<void(int, MultiIndex&, Rational)> rec = [&](int pos, MultiIndex& k,
                                                                  Rational mult) {
            if (pos == r) {
                out.add(k, j - k, c * mult);
                return;
            }
            for (int t = 0; t <= j[pos]; ++t) {
                k[pos] = t;
                Rational binom = 1;
                for (int a = 0; a < t; ++a) binom = binom * Rational(j[pos] - a) / Rational(a + 1);
                rec(pos + 1, k, mult * binom);
            }
            k[pos] = 0;
        };
        MultiIndex k(r);
        rec(0, k, 1);
    }
    return out;
}

EnvTensorSquare comultiply(const EnvelopingElement& e) {
    EnvTensorSquare out;
    for (auto& [w, c] : e.terms()) {
        int n = static_cast<int>(w.size());
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            Word a, b;
            for (int i = 0; i < n; ++i) ((mask >> i) & 1u ? a : b).push_back(w[i]);
            out.add(a, b, c);
        }
    }
    return out;
}

PbwContext::PbwContext(const LiePairPresentation& p, int splitting, int connection_choice,
                       int max_degree)
    : p_(&p), splitting_(splitting), conn_choice_(connection_choice), max_degree_(max_degree) {
    if (splitting != 1 && splitting != 2)
        throw StructuralError("splitting choice must be 1 or 2");
    const Connection& conn = p.connection(connection_choice);
    if (!is_torsion_free(p, conn))
        throw StructuralError("connection has torsion: " + torsion(p, conn).str());
}

EnvelopingElement PbwContext::iota_b(int i) const {
    const Frame& fr = p_->frame();
    EnvelopingElement e = EnvelopingElement::letter(fr, i);
    if (splitting_ == 2)
        for (int alpha = 1; alpha <= fr.rp; ++alpha) {
            const Coefficient& s = p_->offset().at(fr, i, alpha);
            if (!s.is_zero())
                e += EnvelopingElement::letter(fr, fr.r + alpha).scaled(s);
        }
    return e;
}

PolySection PbwContext::nabla_iota(int i, const PolySection& s) const {
    const Frame& fr = p_->frame();
    const Connection& conn = p_->connection(conn_choice_);
    PolySection out = nabla_poly(*p_, conn, i, s);
    if (splitting_ == 2)
        for (int alpha = 1; alpha <= fr.rp; ++alpha) {
            const Coefficient& off = p_->offset().at(fr, i, alpha);
            if (!off.is_zero()) out += nabla_poly(*p_, conn, fr.r + alpha, s) * off;
        }
    return out;
}

const EnvelopingElement& PbwContext::pbw_basis(const MultiIndex& j) {
    auto it = memo_.find(j);
    if (it != memo_.end()) return it->second;
    if (j.degree() > max_degree_)
        throw StructuralError("pbw degree overflow at " + j.str());

    const Frame& fr = p_->frame();
    EnvelopingElement out(fr);
    int n = j.degree();
    if (n == 0) {
        out = EnvelopingElement::unit(fr);
    } else if (n == 1) {
        int i = 0;
        while (j[i] == 0) ++i;
        out = quotient_project(iota_b(i + 1));
    } else {
        for (int i = 1; i <= fr.r; ++i) {
            if (j[i - 1] == 0) continue;
            MultiIndex jm = j;
            jm[i - 1] -= 1;
            EnvelopingElement head =
                quotient_project(env_product(*p_, iota_b(i), pbw_basis(jm)));
            EnvelopingElement tail = pbw(nabla_iota(i, PolySection::basis(fr, jm)));
            out += (head - tail) * Rational(j[i - 1]);
        }
        out = out * rat(1, n);
    }
    return memo_.emplace(j, std::move(out)).first->second;
}

EnvelopingElement PbwContext::pbw(const PolySection& s) {
    EnvelopingElement out(p_->frame());
    for (auto& [j, c] : s.terms()) out += pbw_basis(j).scaled(c);
    return out;
}

PolySection PbwContext::pbw_inverse(const EnvelopingElement& quotient_class) {
    const Frame& fr = p_->frame();
    PolySection out(fr);
    EnvelopingElement rest = quotient_class;
    for (int len = rest.max_word_length(); len >= 0; --len) {
        std::vector<std::pair<Word, Coefficient>> layer;
        for (auto& [w, c] : rest.terms())
            if (static_cast<int>(w.size()) == len) layer.emplace_back(w, c);
        for (auto& [w, c] : layer) {
            if (!w.empty() && w.back() > fr.r)
                throw StructuralError("pbw_inverse expects a quotient representative");
            MultiIndex j(fr.r);
            for (int u : w) j[u - 1] += 1;
            out.add_term(j, c);
            rest -= pbw_basis(j).scaled(c);
        }
    }
    if (!rest.is_zero())
        throw StructuralError("pbw_inverse back-substitution left a remainder");
    return out;
}

PolySection PbwContext::lightning(int u, const PolySection& s) {
    if (s.max_degree() + 1 > max_degree_)
        throw StructuralError("lightning degree overflow: raise the context order");
    EnvelopingElement image =
        quotient_project(env_product(*p_, EnvelopingElement::letter(p_->frame(), u), pbw(s)));
    return pbw_inverse(image);
}

PolySection PbwContext::kapranov(int alpha, const PolySection& s) {
    return lightning(p_->frame().r + alpha, s);
}

FormalFunction PbwContext::dual_eta_image(int j, int trunc) {
    const Frame& fr = p_->frame();
    FormalFunction img(fr, trunc);
    for (int u = 1; u <= fr.rank_total(); ++u) {
        auto key = std::make_tuple(u, j, trunc);
        auto it = eta_image_memo_.find(key);
        if (it == eta_image_memo_.end()) {
            // <nabla_u d_J, eta^{e_j}> transposes to a -1/J! weight on eta^J
            FormalFunction entry(fr, trunc);
            for_each_up_to_degree(fr.r, trunc, [&](const MultiIndex& jj) {
                PolySection im = lightning(u, PolySection::basis(fr, jj));
                Coefficient c = im.coefficient(MultiIndex::unit(fr.r, j - 1));
                if (!c.is_zero()) entry.add_term(0, jj, c * (Rational(-1) / jj.fact()));
            });
            it = eta_image_memo_.emplace(key, std::move(entry)).first;
        }
        FormalFunction nu = FormalFunction::exterior(fr, trunc, u);
        img += nu * it->second;
    }
    return img;
}

FormalFunction PbwContext::dual_derivative(const FormalFunction& f) {
    const Frame& fr = p_->frame();
    int trunc = f.trunc();
    // same Leibniz walk as the plain covariant derivative, with the
    // pairing-transposed fiber images
    std::vector<FormalFunction> eta_imgs;
    eta_imgs.reserve(fr.r);
    for (int j = 1; j <= fr.r; ++j) eta_imgs.push_back(dual_eta_image(j, trunc));

    FormalFunction out(fr, trunc);
    for (auto& [key, c] : f.terms()) {
        FormalFunction mono_d =
            ce_differential(*p_, FormalFunction::monomial(fr, trunc, key.first, key.second,
                                                          c));
        out += mono_d;
        int sgn = (ext_degree(key.first) & 1) ? -1 : 1;
        for (int m = 1; m <= fr.r; ++m) {
            if (key.second[m - 1] == 0) continue;
            MultiIndex jj = key.second;
            jj[m - 1] -= 1;
            out += FormalFunction::monomial(fr, trunc, key.first, jj,
                                            c * Rational(sgn * key.second[m - 1])) *
                   eta_imgs[m - 1];
        }
    }
    return out;
}

ConsistencyReport verify_q_equals_lightning(const LiePairPresentation& p,
                                            int connection_choice, int splitting, int trunc) {
    ConsistencyReport rep;
    FedosovField q = make_fedosov_field(p, connection_choice, splitting, trunc);
    PbwContext ctx(p, splitting, connection_choice, trunc + 1);
    const Frame& fr = p.frame();
    for (ExtMask m = 0; m < (ExtMask(1) << fr.rank_total()) && rep.ok; ++m) {
        for_each_up_to_degree(fr.r, trunc - 1, [&](const MultiIndex& j) {
            if (!rep.ok) return;
            FormalFunction f = FormalFunction::monomial(fr, trunc, m, j, fr.cconst(1));
            FormalFunction lhs = q.apply(f);
            FormalFunction rhs = ctx.dual_derivative(f);
            if (lhs != rhs) {
                rep.ok = false;
                rep.witness = "Q != dual covariant derivative on " + f.str() + ": " +
                              (lhs - rhs).str();
            }
        });
    }
    return rep;
}

} // namespace fedosov
