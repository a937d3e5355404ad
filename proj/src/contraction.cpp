#include "fedosov/contraction.hpp"

namespace fedosov {

FormalFunction koszul(const FormalFunction& f) {
    const Frame& fr = f.frame();
    FormalFunction r(fr, f.trunc());
    for (auto& [key, c] : f.terms()) {
        for (int i = 1; i <= fr.r; ++i) {
            int m = key.second[i - 1];
            if (m == 0) continue;
            ExtMask bit = ExtMask(1) << (i - 1);
            int sign = wedge_sign(bit, key.first);
            if (sign == 0) continue;
            MultiIndex j = key.second;
            j[i - 1] = m - 1;
            r.add_term(key.first | bit, j, c * Rational(sign * m));
        }
    }
    return r;
}

FormalFunction hat_koszul(const FormalFunction& f) {
    const Frame& fr = f.frame();
    FormalFunction r(fr, f.trunc());
    for (auto& [key, c] : f.terms()) {
        ExtMask btype = key.first & b_type_bits(fr);
        for (ExtMask t = btype; t;) {
            int bit = __builtin_ctz(t);
            t &= t - 1;
            // position of the removed factor inside the sorted monomial
            int pos = __builtin_popcount(key.first & ((ExtMask(1) << bit) - 1));
            MultiIndex j = key.second;
            j[bit] += 1;
            r.add_term(key.first & ~(ExtMask(1) << bit), j,
                       c * Rational((pos & 1) ? -1 : 1));
        }
    }
    return r;
}

FormalFunction euler(const FormalFunction& f) {
    const Frame& fr = f.frame();
    FormalFunction r(fr, f.trunc());
    for (auto& [key, c] : f.terms()) {
        int weight = b_type_degree(fr, key.first) + key.second.degree();
        if (weight != 0) r.add_term(key.first, key.second, c * Rational(weight));
    }
    return r;
}

namespace {

FormalFunction h_plain(const FormalFunction& f) {
    const Frame& fr = f.frame();
    FormalFunction r(fr, f.trunc());
    for (auto& [key, c] : f.terms()) {
        int p2 = b_type_degree(fr, key.first);
        int q = key.second.degree();
        if (p2 + q == 0) continue;
        FormalFunction mono = FormalFunction::monomial(fr, f.trunc(), key.first, key.second,
                                                       c * Rational(1, p2 + q));
        r += hat_koszul(mono);
    }
    return r;
}

FormalFunction sigma0_plain(const FormalFunction& f) {
    const Frame& fr = f.frame();
    FormalFunction r(fr, f.trunc());
    for (auto& [key, c] : f.terms())
        if (b_type_degree(fr, key.first) == 0 && key.second.is_zero())
            r.add_term(key.first, key.second, c);
    return r;
}

} // namespace

const std::map<ExtMask, Coefficient>& Contraction::mask_expansion(ExtMask m, bool inverse,
                                                                  int trunc) const {
    auto& cache = inverse ? inv_cache_ : fwd_cache_;
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache.find(m);
        if (it != cache.end()) return it->second;
    }
    FormalFunction mono =
        FormalFunction::monomial(p_->frame(), trunc, m, MultiIndex(p_->frame().r),
                                 p_->frame().cconst(1));
    FormalFunction expanded =
        inverse ? frame_change_inverse(*p_, mono) : frame_change(*p_, mono);
    std::map<ExtMask, Coefficient> entry;
    for (auto& [key, c] : expanded.terms()) entry.emplace(key.first, c);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    return cache.emplace(m, std::move(entry)).first->second;
}

FormalFunction Contraction::change(const FormalFunction& f, bool inverse) const {
    FormalFunction out(f.frame(), f.trunc());
    for (auto& [key, c] : f.terms())
        for (auto& [m, cm] : mask_expansion(key.first, inverse, f.trunc()))
            out.add_term(m, key.second, c * cm);
    return out;
}

FormalFunction Contraction::conjugated(FormalFunction (*op)(const FormalFunction&),
                                       const FormalFunction& f) const {
    if (splitting_ == 1 || p_->offset().is_zero()) return op(f);
    return change(op(change(f, true)), false);
}

FormalFunction Contraction::h(const FormalFunction& f) const { return conjugated(&h_plain, f); }

FormalFunction Contraction::sigma0(const FormalFunction& f) const {
    return conjugated(&sigma0_plain, f);
}

BForm Contraction::h_nat(const BForm& x) const {
    BForm r(x.frame(), x.trunc());
    for (int j = 1; j <= x.rank(); ++j) r.comp(j) = h(x.comp(j));
    return r;
}

BForm Contraction::sigma0_nat(const BForm& x) const {
    BForm r(x.frame(), x.trunc());
    for (int j = 1; j <= x.rank(); ++j) r.comp(j) = sigma0(x.comp(j));
    return r;
}

BForm Contraction::delta_nat(const BForm& x) const {
    BForm r(x.frame(), x.trunc());
    for (int j = 1; j <= x.rank(); ++j) r.comp(j) = koszul(x.comp(j));
    return r;
}

} // namespace fedosov
