#include "gpsobolev/finitediff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gpsobolev/detail/jet.hpp"
#include "gpsobolev/detail/radial.hpp"
#include "gpsobolev/errors.hpp"
#include "gpsobolev/parallel.hpp"

namespace gpsobolev {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// Offsets and coefficients of prod_i (Delta_{h_i e_i})^{alpha_i} without the
// 1/h scaling; `sign` = +1 for forward shifts, -1 for the adjoint.
void tensor_stencil(const MultiIndex& alpha, int sign, std::vector<std::vector<int>>& offsets,
                    std::vector<double>& coefficients) {
    offsets = {std::vector<int>(alpha.dim(), 0)};
    coefficients = {1.0};
    for (std::size_t a = 0; a < alpha.dim(); ++a) {
        const int order = alpha[a];
        if (order == 0) continue;
        std::vector<std::vector<int>> next_off;
        std::vector<double> next_coef;
        for (std::size_t t = 0; t < offsets.size(); ++t) {
            for (int j = 0; j <= order; ++j) {
                auto off = offsets[t];
                off[a] = sign * j;
                next_off.push_back(std::move(off));
                next_coef.push_back(coefficients[t] * binomial(order, j) * (((order - j) % 2) ? -1.0 : 1.0));
            }
        }
        offsets = std::move(next_off);
        coefficients = std::move(next_coef);
    }
}

std::vector<int> resolve_steps(const Grid& g, std::vector<int> steps) {
    if (steps.empty()) steps.assign(g.dim(), 1);
    if (steps.size() != g.dim()) throw ConfigError("one step multiple per axis is required");
    for (int s : steps) {
        if (s < 1) throw ConfigError("step multiples must be positive");
    }
    return steps;
}

GridFunction apply_stencil(const GridFunction& u, const MultiIndex& alpha, std::vector<int> steps, int sign,
                           bool zero_extend) {
    const Grid& g = u.grid();
    if (!g.uniform()) throw ConfigError("grid differences require a uniform (midpoint) grid");
    if (alpha.dim() != g.dim()) throw ConfigError("multi-index dimension does not match grid");
    steps = resolve_steps(g, std::move(steps));

    std::vector<std::vector<int>> offsets;
    std::vector<double> coefs;
    tensor_stencil(alpha, sign, offsets, coefs);
    double scale = 1.0;
    for (std::size_t a = 0; a < g.dim(); ++a) scale *= std::pow(steps[a] * g.spacing(a), -alpha[a]);

    std::vector<double> out(g.size(), kNaN);
    std::vector<char> fits(g.size(), 0);
    parallel_for(0, g.size(), [&](std::size_t i) {
        double s = 0.0;
        bool ok = true;
        for (std::size_t t = 0; t < offsets.size(); ++t) {
            std::size_t idx = i;
            bool inside = true;
            for (std::size_t a = 0; a < g.dim() && inside; ++a) {
                if (offsets[t][a] == 0) continue;
                auto next = g.shifted(idx, a, static_cast<long>(offsets[t][a]) * steps[a]);
                if (next) {
                    idx = *next;
                } else {
                    inside = false;
                }
            }
            if (inside) {
                s += coefs[t] * u[idx];
            } else if (!zero_extend) {
                ok = false;
                break;
            }
        }
        if (ok) {
            out[i] = s * scale;
            fits[i] = 1;
        }
    });

    if (!zero_extend) {
        for (std::size_t i : g.nodes_in(Region::interior)) {
            if (!fits[i]) {
                throw MarginTooSmall("difference stencil " + alpha.to_string() + " with step multiple " +
                                     std::to_string(steps[0]) + " leaves the grid from an interior node; margin " +
                                     std::to_string(g.margin()) + " is too small");
            }
        }
    }
    return GridFunction(u.grid_ptr(), std::move(out));
}

}  // namespace

DifferenceStencil DifferenceStencil::forward(const MultiIndex& alpha, std::span<const double> h) {
    if (h.size() != alpha.dim()) throw ConfigError("one step per axis is required");
    DifferenceStencil s;
    s.alpha = alpha;
    s.h.assign(h.begin(), h.end());
    for (double v : s.h) {
        if (!(v > 0.0)) throw ConfigError("difference steps must be positive");
    }
    tensor_stencil(alpha, +1, s.offsets, s.coefficients);
    double scale = 1.0;
    for (std::size_t a = 0; a < alpha.dim(); ++a) scale *= std::pow(s.h[a], -alpha[a]);
    for (double& c : s.coefficients) c *= scale;
    return s;
}

GridFunction apply_delta_alpha(const GridFunction& u, const MultiIndex& alpha, std::vector<int> steps) {
    return apply_stencil(u, alpha, std::move(steps), +1, false);
}

GridFunction apply_delta_alpha_adjoint(const GridFunction& v, const MultiIndex& alpha, std::vector<int> steps) {
    return apply_stencil(v, alpha, std::move(steps), -1, true);
}

double fd_cross_derivative(const Kernel& k, const MultiIndex& alpha, const MultiIndex& beta, std::span<const double> h,
                           PointView x, PointView y) {
    const std::size_t d = k.dim();
    if (x.size() != d || y.size() != d) throw ConfigError("point dimension does not match kernel");
    const auto sa = DifferenceStencil::forward(alpha, h);
    const auto sb = DifferenceStencil::forward(beta, h);
    std::array<double, kMaxDimension> xs{}, ys{};
    const std::span<const double> xv(xs.data(), d), yv(ys.data(), d);

    auto place = [&](std::array<double, kMaxDimension>& out, PointView base, const std::vector<int>& off) {
        for (std::size_t a = 0; a < d; ++a) out[a] = base[a] + off[a] * h[a];
        if (k.domain() && !k.domain()->contains(std::span<const double>(out.data(), d))) {
            throw MarginTooSmall(k.name() + ": difference stencil leaves the kernel domain");
        }
    };

    double s = 0.0;
    for (std::size_t i = 0; i < sa.offsets.size(); ++i) {
        place(xs, x, sa.offsets[i]);
        double inner = 0.0;
        for (std::size_t j = 0; j < sb.offsets.size(); ++j) {
            place(ys, y, sb.offsets[j]);
            inner += sb.coefficients[j] * k.eval(xv, yv);
        }
        s += sa.coefficients[i] * inner;
    }
    return s;
}

std::vector<SobolevRatio> finite_difference_sobolev_ratio(const GridFunction& u, int m, double p,
                                                          const std::vector<int>& steps) {
    if (m < 0) throw ConfigError("Sobolev order must be non-negative");
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("L^p exponent must be finite and >= 1");
    const Grid& g = u.grid();
    std::vector<SobolevRatio> out;
    for (int step : steps) {
        for (const auto& alpha : enumerate_multi_indices(g.dim(), m)) {
            if (alpha.is_zero()) continue;
            const auto du = apply_delta_alpha(u, alpha, std::vector<int>(g.dim(), step));
            out.push_back({alpha, step, step * g.spacing(0), lp_norm(du, p, Region::interior)});
        }
    }
    return out;
}

double bump_derivative(const MultiIndex& alpha, PointView z) {
    double s0 = 0.0;
    for (double v : z) s0 += v * v;
    if (s0 >= 1.0) return 0.0;
    s0 *= 0.5;
    if (alpha.order() > detail::kMaxRadialOrder) throw ConfigError("bump derivative order too high");
    // G(s) = exp(-1 / (1 - 2 s)) expanded around s0.
    using J = detail::Jet<detail::kMaxRadialOrder>;
    J t;
    t.c[0] = 1.0 - 2.0 * s0;
    t.c[1] = -2.0;
    const J g = detail::exp(-1.0 * detail::reciprocal(t));
    return detail::radial_partial(alpha.entries(), z, [&](int k) { return g.derivative(static_cast<std::size_t>(k)); });
}

VariationalResult variational_derivative_test(const GridFunction& u, const MultiIndex& alpha, std::size_t battery_size,
                                              double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("variational test needs 1 < p < inf");
    const Grid& g = u.grid();
    const std::size_t d = g.dim();
    if (alpha.dim() != d) throw ConfigError("multi-index dimension does not match grid");
    battery_size = std::clamp<std::size_t>(battery_size, 3, kMaxBatterySize);
    const double q = p / (p - 1.0);

    std::vector<double> lo(d), hi(d);
    double span_min = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < d; ++a) {
        lo[a] = g.box().lower()[a] + g.margin();
        hi[a] = g.box().upper()[a] - g.margin();
        span_min = std::min(span_min, hi[a] - lo[a]);
    }

    VariationalResult result;
    const std::size_t quota = battery_size / 3;
    for (int scale = 0; scale < 3; ++scale) {
        const double r = span_min / 4.0 / std::ldexp(1.0, scale);
        // Lattice of centers with spacing r keeping each ball inside the interior box.
        std::vector<std::vector<double>> axis_centers(d);
        for (std::size_t a = 0; a < d; ++a) {
            for (double c = lo[a] + r; c + r <= hi[a] + 1e-12 * (hi[a] - lo[a]); c += r) axis_centers[a].push_back(c);
        }
        std::vector<std::vector<double>> centers{{}};
        for (std::size_t a = 0; a < d; ++a) {
            std::vector<std::vector<double>> next;
            for (const auto& partial : centers)
                for (double c : axis_centers[a]) {
                    auto e = partial;
                    e.push_back(c);
                    next.push_back(std::move(e));
                }
            centers = std::move(next);
        }
        const std::size_t take = std::min(quota + (scale == 2 ? battery_size % 3 : 0), centers.size());
        double scale_max = 0.0;
        for (std::size_t t = 0; t < take; ++t) {
            const auto& c = centers[t * centers.size() / take];
            double integral = 0.0, norm_q = 0.0;
            std::array<double, kMaxDimension> z{};
            for (std::size_t i = 0; i < g.size(); ++i) {
                const auto x = g.node(i);
                double s = 0.0;
                for (std::size_t a = 0; a < d; ++a) {
                    z[a] = (x[a] - c[a]) / r;
                    s += z[a] * z[a];
                }
                if (s >= 1.0) continue;
                const std::span<const double> zv(z.data(), d);
                const double phi = bump_derivative(MultiIndex::zero(d), zv);
                const double dphi = bump_derivative(alpha, zv) * std::pow(r, -alpha.order());
                integral += g.weight(i) * u[i] * dphi;
                norm_q += g.weight(i) * std::pow(phi, q);
            }
            if (norm_q <= 0.0) continue;
            const double ratio = std::abs(integral) / std::pow(norm_q, 1.0 / q);
            scale_max = std::max(scale_max, ratio);
            ++result.bumps;
        }
        result.per_scale_max.push_back(scale_max);
        result.max_ratio = std::max(result.max_ratio, scale_max);
    }
    return result;
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::convergent: return "CONVERGENT";
        case Classification::divergent: return "DIVERGENT";
        case Classification::inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

Classification parse_classification(const std::string& s) {
    if (s == "CONVERGENT") return Classification::convergent;
    if (s == "DIVERGENT") return Classification::divergent;
    if (s == "INCONCLUSIVE") return Classification::inconclusive;
    throw ConfigError("unknown classification '" + s + "'");
}

Classification classify_refinement(std::span<const double> series, const RefinementThresholds& t) {
    if (series.size() < 2) return Classification::inconclusive;
    const double first = series.front();
    const double last = series.back();
    if (!std::isfinite(first) || !std::isfinite(last)) return Classification::inconclusive;
    const double scale = std::max(std::abs(first), std::abs(last));
    if (scale == 0.0) return Classification::convergent;
    if (first <= 0.0) return Classification::inconclusive;
    const double ratio = last / first;
    // A pure c/h series hits the divergence factor exactly; allow rounding.
    constexpr double rounding = 1e-12;
    if (ratio >= t.diverge_factor * (1.0 - rounding)) return Classification::divergent;
    if (ratio <= t.bound_factor && ratio >= 1.0 / t.bound_factor) return Classification::convergent;
    return Classification::inconclusive;
}

}  // namespace gpsobolev
