#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

namespace gpsobolev::detail {

inline constexpr int kMaxRadialOrder = 8;

// Partial derivative d^gamma of f(t) = G(|t|^2 / 2), given the derivatives
// G^{(k)} evaluated at |t|^2/2. Since d_i s = t_i and d_i d_j s = delta_ij,
// Faa di Bruno reduces to a sum over the ways of pairing equal coordinates:
// each pair contributes delta_ij, each unpaired index a factor t_i, and a term
// with j pairs carries G^{(|gamma| - j)}.
//
// `derivative(k)` may be singular at t = 0 for large k as long as the matching
// monomial vanishes there; zero monomials are skipped before evaluation.
template <class DerivativeFn>
double radial_partial(std::span<const int> gamma, std::span<const double> t, DerivativeFn&& derivative) {
    const std::size_t d = gamma.size();
    std::array<double, kMaxRadialOrder + 1> cache{};
    std::array<bool, kMaxRadialOrder + 1> cached{};
    auto g = [&](int k) {
        if (!cached[k]) {
            cache[k] = derivative(k);
            cached[k] = true;
        }
        return cache[k];
    };

    static constexpr std::array<double, 9> factorial{1, 1, 2, 6, 24, 120, 720, 5040, 40320};

    std::array<int, 3> pairs{};
    double total = 0.0;
    // Odometer over pairs[a] in [0, gamma[a]/2].
    while (true) {
        double ways = 1.0;
        double monomial = 1.0;
        int k = 0;
        for (std::size_t a = 0; a < d; ++a) {
            const int c = gamma[a];
            const int p = pairs[a];
            ways *= factorial[c] / (factorial[p] * std::ldexp(1.0, p) * factorial[c - 2 * p]);
            monomial *= std::pow(t[a], c - 2 * p);
            k += c - p;
        }
        if (monomial != 0.0) total += ways * monomial * g(k);

        std::size_t a = 0;
        for (; a < d; ++a) {
            if (pairs[a] < gamma[a] / 2) {
                ++pairs[a];
                break;
            }
            pairs[a] = 0;
        }
        if (a == d) break;
    }
    return total;
}

}  // namespace gpsobolev::detail
