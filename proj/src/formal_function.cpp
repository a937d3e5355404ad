#include "fedosov/formal_function.hpp"

namespace fedosov {

FormalFunction FormalFunction::operator+(const FormalFunction& o) const {
    check_compatible(o);
    FormalFunction r = *this;
    for (auto& [k, c] : o.terms_) r.add_term(k.first, k.second, c);
    return r;
}

FormalFunction FormalFunction::operator-(const FormalFunction& o) const {
    return *this + (-o);
}

FormalFunction FormalFunction::operator*(const FormalFunction& o) const {
    check_compatible(o);
    FormalFunction r(frame_, trunc_);
    for (auto& [ka, ca] : terms_)
        for (auto& [kb, cb] : o.terms_) {
            int sign = wedge_sign(ka.first, kb.first);
            if (sign == 0) continue;
            MultiIndex j = ka.second + kb.second;
            if (j.degree() > trunc_) continue;  // fiber truncation
            r.add_term(ka.first | kb.first, j, (ca * cb) * Rational(sign));
        }
    return r;
}

FormalFunction FormalFunction::operator*(const Coefficient& c) const {
    FormalFunction r(frame_, trunc_);
    for (auto& [k, v] : terms_) r.add_term(k.first, k.second, v * c);
    return r;
}

FormalFunction FormalFunction::operator*(const Rational& s) const {
    FormalFunction r(frame_, trunc_);
    if (s == 0) return r;
    for (auto& [k, v] : terms_) r.add_term(k.first, k.second, v * s);
    return r;
}

int FormalFunction::filtration_order() const {
    int ord = kInfiniteOrder;
    for (auto& [k, v] : terms_) ord = std::min(ord, k.second.degree());
    return ord;
}

FormalFunction FormalFunction::truncated(int d) const {
    FormalFunction r(frame_, trunc_);
    for (auto& [k, v] : terms_)
        if (k.second.degree() <= d) r.add_term(k.first, k.second, v);
    return r;
}

FormalFunction FormalFunction::symmetric_part(int d) const {
    FormalFunction r(frame_, trunc_);
    for (auto& [k, v] : terms_)
        if (k.second.degree() == d) r.add_term(k.first, k.second, v);
    return r;
}

FormalFunction FormalFunction::form_part(int p) const {
    FormalFunction r(frame_, trunc_);
    for (auto& [k, v] : terms_)
        if (ext_degree(k.first) == p) r.add_term(k.first, k.second, v);
    return r;
}

int FormalFunction::max_form_degree() const {
    int p = 0;
    for (auto& [k, v] : terms_) p = std::max(p, ext_degree(k.first));
    return p;
}

bool FormalFunction::pure_fiber() const {
    for (auto& [k, v] : terms_)
        if (k.first != 0) return false;
    return true;
}

FormalFunction FormalFunction::eta_partial(int j) const {
    FormalFunction r(frame_, trunc_);
    for (auto& [k, v] : terms_) {
        int m = k.second[j - 1];
        if (m == 0) continue;
        MultiIndex jj = k.second;
        jj[j - 1] = m - 1;
        r.add_term(k.first, jj, v * Rational(m));
    }
    return r;
}

Coefficient FormalFunction::fiber_coefficient(const MultiIndex& j) const {
    auto it = terms_.find(Key{0, j});
    return it == terms_.end() ? frame_.czero() : it->second;
}

std::string FormalFunction::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [k, v] : terms_) {
        if (!s.empty()) s += " + ";
        s += "(" + v.str() + ")";
        for (ExtMask t = k.first; t;) {
            int i = __builtin_ctz(t);
            t &= t - 1;
            s += (i < frame_.r) ? "*xi" + std::to_string(i + 1)
                                : "*zeta" + std::to_string(i + 1 - frame_.r);
        }
        for (int i = 0; i < frame_.r; ++i) {
            if (k.second[i] == 0) continue;
            s += "*eta" + std::to_string(i + 1);
            if (k.second[i] > 1) s += "^" + std::to_string(k.second[i]);
        }
    }
    return s;
}

PolySection PolySection::operator+(const PolySection& o) const {
    if (frame_ != o.frame_) throw StructuralError("poly section frame mismatch");
    PolySection r = *this;
    for (auto& [j, c] : o.terms_) r.add_term(j, c);
    return r;
}

PolySection PolySection::operator-(const PolySection& o) const { return *this + (-o); }

PolySection PolySection::operator*(const Coefficient& c) const {
    PolySection r(frame_);
    for (auto& [j, v] : terms_) r.add_term(j, v * c);
    return r;
}

PolySection PolySection::operator*(const Rational& s) const {
    PolySection r(frame_);
    if (s == 0) return r;
    for (auto& [j, v] : terms_) r.add_term(j, v * s);
    return r;
}

int PolySection::max_degree() const {
    int d = 0;
    for (auto& [j, v] : terms_) d = std::max(d, j.degree());
    return d;
}

PolySection PolySection::degree_part(int d) const {
    PolySection r(frame_);
    for (auto& [j, v] : terms_)
        if (j.degree() == d) r.add_term(j, v);
    return r;
}

Coefficient PolySection::coefficient(const MultiIndex& j) const {
    auto it = terms_.find(j);
    return it == terms_.end() ? frame_.czero() : it->second;
}

std::string PolySection::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [j, v] : terms_) {
        if (!s.empty()) s += " + ";
        s += "(" + v.str() + ")*d" + j.str();
    }
    return s;
}

Coefficient pair(const PolySection& theta, const FormalFunction& f) {
    if (theta.frame() != f.frame()) throw StructuralError("pairing frame mismatch");
    if (!f.pure_fiber())
        throw StructuralError("scalar pairing requires a pure fiber function");
    Coefficient sum = f.frame().czero();
    for (auto& [j, c] : theta.terms()) {
        Coefficient fc = f.fiber_coefficient(j);
        if (!fc.is_zero()) sum += (c * fc) * j.fact();
    }
    return sum;
}

FormalFunction pair_formwise(const PolySection& theta, const FormalFunction& f) {
    if (theta.frame() != f.frame()) throw StructuralError("pairing frame mismatch");
    FormalFunction r(f.frame(), f.trunc());
    for (auto& [k, c] : f.terms())
        for (auto& [j, tc] : theta.terms())
            if (k.second == j) r.add_term(k.first, MultiIndex(f.frame().r), (tc * c) * j.fact());
    return r;
}

FormalFunction contract(const PolySection& b, const FormalFunction& f) {
    if (b.frame() != f.frame()) throw StructuralError("contraction frame mismatch");
    FormalFunction r(f.frame(), f.trunc());
    for (auto& [j, c] : b.terms()) {
        if (j.degree() != 1) throw StructuralError("contraction requires a degree-one section");
        int i = 0;
        while (j[i] == 0) ++i;
        r += f.eta_partial(i + 1) * c;
    }
    return r;
}

} // namespace fedosov
