#include "fedosov/vertical_field.hpp"

namespace fedosov {

BForm BForm::operator+(const BForm& o) const {
    check_compatible(o);
    BForm r = *this;
    for (int j = 1; j <= rank(); ++j) r.comp(j) += o.comp(j);
    return r;
}

BForm BForm::operator-(const BForm& o) const { return *this + (-o); }

BForm BForm::operator*(const Rational& s) const {
    BForm r = *this;
    for (int j = 1; j <= rank(); ++j) r.comp(j) = r.comp(j) * s;
    return r;
}

int BForm::filtration_order() const {
    int ord = kInfiniteOrder;
    for (auto& c : comps_) ord = std::min(ord, c.filtration_order());
    return ord;
}

BForm BForm::symmetric_part(int d) const {
    BForm r(frame_, trunc_);
    for (int j = 1; j <= rank(); ++j) r.comp(j) = comp(j).symmetric_part(d);
    return r;
}

BForm BForm::form_part(int p) const {
    BForm r(frame_, trunc_);
    for (int j = 1; j <= rank(); ++j) r.comp(j) = comp(j).form_part(p);
    return r;
}

int BForm::max_form_degree() const {
    int p = 0;
    for (auto& c : comps_) p = std::max(p, c.max_form_degree());
    return p;
}

std::string BForm::str() const {
    std::string s;
    for (int j = 1; j <= rank(); ++j) {
        if (comp(j).is_zero()) continue;
        if (!s.empty()) s += " ; ";
        s += "[" + comp(j).str() + "] d/deta" + std::to_string(j);
    }
    return s.empty() ? "0" : s;
}

FormalFunction apply_field(const BForm& x, const FormalFunction& f) {
    if (x.frame() != f.frame() || x.trunc() != f.trunc())
        throw StructuralError("vertical field application mismatch");
    FormalFunction r(f.frame(), f.trunc());
    for (int j = 1; j <= x.rank(); ++j) {
        if (x.comp(j).is_zero()) continue;
        r += x.comp(j) * f.eta_partial(j);
    }
    return r;
}

BForm field_commutator(const BForm& x, const BForm& y) {
    x.check_compatible(y);
    BForm r(x.frame(), x.trunc());
    int px = x.max_form_degree(), py = y.max_form_degree();
    for (int p = 0; p <= px; ++p) {
        BForm xp = x.form_part(p);
        if (xp.is_zero()) continue;
        for (int q = 0; q <= py; ++q) {
            BForm yq = y.form_part(q);
            if (yq.is_zero()) continue;
            int sign = ((p * q) & 1) ? -1 : 1;
            for (int j = 1; j <= x.rank(); ++j) {
                FormalFunction gen = FormalFunction::eta_monomial(
                    x.frame(), x.trunc(), MultiIndex::unit(x.frame().r, j - 1));
                r.comp(j) += apply_field(xp, apply_field(yq, gen)) -
                             apply_field(yq, apply_field(xp, gen)) * Rational(sign);
            }
        }
    }
    return r;
}

} // namespace fedosov
