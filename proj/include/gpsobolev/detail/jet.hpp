#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace gpsobolev::detail {

// Truncated univariate Taylor series: c[k] is the coefficient of eps^k.
template <std::size_t N>
struct Jet {
    std::array<double, N + 1> c{};

    static Jet variable(double x0) {
        Jet j;
        j.c[0] = x0;
        if constexpr (N >= 1) j.c[1] = 1.0;
        return j;
    }

    // k-th derivative at the expansion point.
    double derivative(std::size_t k) const {
        double f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
        return c[k] * f;
    }

    friend Jet operator+(Jet a, const Jet& b) {
        for (std::size_t i = 0; i <= N; ++i) a.c[i] += b.c[i];
        return a;
    }
    friend Jet operator*(double s, Jet a) {
        for (auto& v : a.c) v *= s;
        return a;
    }
    friend Jet operator+(double s, Jet a) {
        a.c[0] += s;
        return a;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (std::size_t i = 0; i <= N; ++i)
            for (std::size_t j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
        return r;
    }
};

template <std::size_t N>
Jet<N> reciprocal(const Jet<N>& a) {
    Jet<N> r;
    r.c[0] = 1.0 / a.c[0];
    for (std::size_t k = 1; k <= N; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
        r.c[k] = -s / a.c[0];
    }
    return r;
}

template <std::size_t N>
Jet<N> exp(const Jet<N>& a) {
    // r' = a' r, solved coefficient by coefficient.
    Jet<N> r;
    r.c[0] = std::exp(a.c[0]);
    for (std::size_t k = 1; k <= N; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c[j] * r.c[k - j];
        r.c[k] = s / static_cast<double>(k);
    }
    return r;
}

}  // namespace gpsobolev::detail
