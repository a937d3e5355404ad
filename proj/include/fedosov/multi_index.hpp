#pragma once

#include "fedosov/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace fedosov {

/// Multi-index in N_0^width. Used for symmetric fiber monomials, chart
/// monomials, derivative letters of enveloping elements and operator symbols.
struct MultiIndex {
    std::vector<int> e;

    MultiIndex() = default;
    explicit MultiIndex(int width) : e(width, 0) {}
    MultiIndex(std::initializer_list<int> init) : e(init) {}

    static MultiIndex unit(int width, int pos) {
        MultiIndex j(width);
        j.e.at(pos) = 1;
        return j;
    }

    int width() const { return static_cast<int>(e.size()); }
    int degree() const { return std::accumulate(e.begin(), e.end(), 0); }
    bool is_zero() const { return degree() == 0; }

    int operator[](int i) const { return e[i]; }
    int& operator[](int i) { return e[i]; }

    bool operator==(const MultiIndex& o) const { return e == o.e; }
    bool operator<(const MultiIndex& o) const {
        if (e.size() != o.e.size()) return e.size() < o.e.size();
        return e < o.e;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (int i = 0; i < width(); ++i) r.e[i] += o.e[i];
        return r;
    }
    /// Componentwise difference; caller guarantees o <= *this.
    MultiIndex operator-(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (int i = 0; i < width(); ++i) r.e[i] -= o.e[i];
        return r;
    }
    bool contains(const MultiIndex& o) const {
        for (int i = 0; i < width(); ++i)
            if (o.e[i] > e[i]) return false;
        return true;
    }

    /// Product of componentwise factorials, the pairing normalization <b^J, eta^J>.
    Rational fact() const {
        Rational r = 1;
        for (int ji : e) r *= factorial(ji);
        return r;
    }
    /// Falling factorial J!/(J-K)!; caller guarantees K <= J.
    Rational falling(const MultiIndex& k) const {
        Rational r = 1;
        for (int i = 0; i < width(); ++i)
            for (int m = e[i]; m > e[i] - k.e[i]; --m) r *= m;
        return r;
    }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < width(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
        return s + ")";
    }
};

/// All multi-indices of the given width and exact total degree, in lexicographic order.
inline void for_each_of_degree(int width, int degree,
                               const std::function<void(const MultiIndex&)>& fn) {
    MultiIndex j(width);
    std::function<void(int, int)> rec = [&](int pos, int rest) {
        if (pos == width - 1) {
            j[pos] = rest;
            fn(j);
            j[pos] = 0;
            return;
        }
        for (int v = 0; v <= rest; ++v) {
            j[pos] = v;
            rec(pos + 1, rest - v);
        }
        j[pos] = 0;
    };
    if (width == 0) {
        if (degree == 0) fn(j);
        return;
    }
    rec(0, degree);
}

/// All multi-indices of total degree <= max_degree, ordered by degree.
inline void for_each_up_to_degree(int width, int max_degree,
                                  const std::function<void(const MultiIndex&)>& fn) {
    for (int d = 0; d <= max_degree; ++d) for_each_of_degree(width, d, fn);
}

} // namespace fedosov
