#include "fedosov/coefficient.hpp"

namespace fedosov {

Coefficient Coefficient::operator+(const Coefficient& o) const {
    check_compatible(o);
    Coefficient r = *this;
    for (auto& [j, v] : o.terms_) {
        auto it = r.terms_.find(j);
        if (it == r.terms_.end()) {
            r.terms_[j] = v;
        } else {
            it->second += v;
            if (it->second == 0) r.terms_.erase(it);
        }
    }
    return r;
}

Coefficient Coefficient::operator-(const Coefficient& o) const { return *this + (-o); }

Coefficient Coefficient::operator*(const Coefficient& o) const {
    check_compatible(o);
    Coefficient r = zero(mode_, dim_);
    for (auto& [ja, va] : terms_)
        for (auto& [jb, vb] : o.terms_) {
            MultiIndex j = ja + jb;
            Rational v = va * vb;
            auto it = r.terms_.find(j);
            if (it == r.terms_.end()) {
                if (v != 0) r.terms_[j] = v;
            } else {
                it->second += v;
                if (it->second == 0) r.terms_.erase(it);
            }
        }
    return r;
}

Coefficient Coefficient::operator*(const Rational& s) const {
    Coefficient r = zero(mode_, dim_);
    if (s == 0) return r;
    for (auto& [j, v] : terms_) r.terms_[j] = v * s;
    return r;
}

Coefficient Coefficient::partial(int axis) const {
    if (mode_ == BaseMode::Point)
        throw StructuralError("partial derivative over a point base");
    if (axis < 1 || axis > dim_) throw StructuralError("chart axis out of range");
    Coefficient r = zero(mode_, dim_);
    for (auto& [j, v] : terms_) {
        int k = j[axis - 1];
        if (k == 0) continue;
        MultiIndex jj = j;
        jj[axis - 1] = k - 1;
        r.terms_[jj] = v * k;
    }
    return r;
}

Rational Coefficient::eval(const std::vector<Rational>& x) const {
    Rational sum = 0;
    for (auto& [j, v] : terms_) {
        Rational t = v;
        for (int i = 0; i < j.width(); ++i)
            for (int k = 0; k < j[i]; ++k) t *= x.at(i);
        sum += t;
    }
    return sum;
}

std::string Coefficient::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [j, v] : terms_) {
        if (!s.empty()) s += " + ";
        s += rat_to_string(v);
        for (int i = 0; i < j.width(); ++i) {
            if (j[i] == 0) continue;
            s += "*x" + std::to_string(i + 1);
            if (j[i] > 1) s += "^" + std::to_string(j[i]);
        }
    }
    return s;
}

} // namespace fedosov
