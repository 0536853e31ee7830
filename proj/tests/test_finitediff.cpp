#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gpsobolev/errors.hpp"
#include "gpsobolev/finitediff.hpp"

using namespace gpsobolev;

namespace {

using P = std::vector<double>;

double sup_interior(const GridFunction& u, const std::function<double(PointView)>& exact) {
    double e = 0.0;
    for (std::size_t i : u.grid().nodes_in(Region::interior)) e = std::max(e, std::abs(u[i] - exact(u.grid().node(i))));
    return e;
}

}  // namespace

TEST_CASE("stencil algebra") {
    for (std::size_t d = 1; d <= 3; ++d) {
        for (const auto& alpha : enumerate_multi_indices(d, 4)) {
            const std::vector<double> h(d, 0.01);
            const auto s = DifferenceStencil::forward(alpha, h);
            const double sum = std::accumulate(s.coefficients.begin(), s.coefficients.end(), 0.0);
            if (alpha.order() >= 1) {
                CHECK(std::abs(sum) <= 1e-9 * std::pow(100.0, alpha.order()));
            } else {
                CHECK(sum == 1.0);
            }
            // the monomial x^alpha / alpha! maps to 1 + O(h) at x = 0.3
            double val = 0.0, fact = 1.0;
            for (std::size_t a = 0; a < d; ++a) fact *= std::tgamma(alpha[a] + 1.0);
            for (std::size_t t = 0; t < s.offsets.size(); ++t) {
                double mono = 1.0;
                for (std::size_t a = 0; a < d; ++a) mono *= std::pow(0.3 + s.offsets[t][a] * h[a], alpha[a]);
                val += s.coefficients[t] * mono;
            }
            CHECK(val / fact == doctest::Approx(1.0).epsilon(0.01 * std::max(1, alpha.order()) + 1e-6));
        }
    }
}

TEST_CASE("grid differences: exact on polynomials, O(h) on sin") {
    auto g = build_grid(Box::unit(1), 100);
    auto x = GridFunction::sample(g, [](PointView v) { return v[0]; });
    CHECK(sup_interior(apply_delta_alpha(x, {1}), [](PointView) { return 1.0; }) < 1e-12);
    CHECK(sup_interior(apply_delta_alpha(x, {1}, {2}), [](PointView) { return 1.0; }) < 1e-12);
    auto x2 = GridFunction::sample(g, [](PointView v) { return v[0] * v[0]; });
    CHECK(sup_interior(apply_delta_alpha(x2, {2}), [](PointView) { return 2.0; }) < 1e-8);

    auto fine = build_grid(Box::unit(1), 1000);
    auto s = GridFunction::sample(fine, [](PointView v) { return std::sin(v[0]); });
    CHECK(sup_interior(apply_delta_alpha(s, {1}), [](PointView v) { return std::cos(v[0]); }) <= 1e-3);

    // mixed partial on a 2-d grid
    auto g2 = build_grid(Box::unit(2), 40);
    auto xy = GridFunction::sample(g2, [](PointView v) { return v[0] * v[1]; });
    CHECK(sup_interior(apply_delta_alpha(xy, {1, 1}), [](PointView) { return 1.0; }) < 1e-10);
}

TEST_CASE("stencils that leave the grid") {
    auto g = build_grid(Box::unit(1), 50, QuadratureRule::midpoint, 0.0);
    auto u = GridFunction::sample(g, [](PointView v) { return v[0]; });
    CHECK_THROWS_AS(apply_delta_alpha(u, {1}), MarginTooSmall);
    auto g2 = build_grid(Box::unit(1), 50);  // margin 2 spacings
    auto u2 = GridFunction::sample(g2, [](PointView v) { return v[0]; });
    CHECK_NOTHROW(apply_delta_alpha(u2, {2}));
    CHECK_THROWS_AS(apply_delta_alpha(u2, {3}), MarginTooSmall);
    CHECK(std::isnan(apply_delta_alpha(u2, {1})[49]));
    auto gl = build_grid(Box::unit(1), 50, QuadratureRule::gauss_legendre);
    CHECK_THROWS_AS(apply_delta_alpha(GridFunction::zeros(gl), {1}), ConfigError);
}

TEST_CASE("discrete integration by parts") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (std::size_t d = 1; d <= 2; ++d) {
        auto g = build_grid(Box::unit(d), d == 1 ? 200 : 30);
        for (const auto& alpha : enumerate_multi_indices(d, 2)) {
            // v vanishes on the margin band, so delta^alpha u is only needed where it is defined
            std::vector<double> uv(g->size()), vv(g->size(), 0.0);
            for (auto& x : uv) x = nd(rng);
            for (std::size_t i : g->nodes_in(Region::interior)) vv[i] = nd(rng);
            GridFunction u(g, uv), v(g, vv);
            const auto du = apply_delta_alpha(u, alpha);
            const auto dv = apply_delta_alpha_adjoint(v, alpha);
            double lhs = 0.0, rhs = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) {
                if (vv[i] != 0.0) lhs += g->weight(i) * du[i] * vv[i];
                rhs += g->weight(i) * uv[i] * dv[i];
                scale += g->weight(i) * std::abs(uv[i] * dv[i]);
            }
            CAPTURE(alpha.to_string());
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("finite-difference cross derivatives of kinked kernels") {
    for (double h : {1e-2, 1e-3}) {
        const std::vector<double> hv{h};
        CHECK(fd_cross_derivative(kernels::brownian(), {1}, hv, P{0.5}, P{0.5}) == doctest::Approx(1.0 / h));
        CHECK(fd_cross_derivative(kernels::matern(0.5, 1.0, 1), {1}, hv, P{0.3}, P{0.3}) ==
              doctest::Approx(2 * (1 - std::exp(-h)) / (h * h)).epsilon(1e-9));
    }
    CHECK(std::abs(fd_cross_derivative(kernels::squared_exponential(1, 1.0), {1}, std::vector<double>{1e-3}, P{0.5},
                                       P{0.5}) -
                   1.0) < 1e-2);
    CHECK_THROWS_AS(fd_cross_derivative(kernels::brownian(), {1}, std::vector<double>{0.1}, P{0.95}, P{0.5}),
                    MarginTooSmall);
}

TEST_CASE("Sobolev difference ratios") {
    auto g = build_grid(Box::unit(1), 400, QuadratureRule::midpoint, 0.05);
    auto s = GridFunction::sample(g, [](PointView v) { return std::sin(3 * v[0]); });
    const auto smooth = finite_difference_sobolev_ratio(s, 1, 2.0, {1, 2, 4});
    REQUIRE(smooth.size() == 3);
    for (const auto& r : smooth) CHECK(r.ratio == doctest::Approx(smooth.front().ratio).epsilon(0.02));

    auto step = GridFunction::sample(g, [](PointView v) { return v[0] < 0.5 ? 0.0 : 1.0; });
    const auto rough = finite_difference_sobolev_ratio(step, 1, 2.0, {4, 2, 1});
    CHECK(rough[1].ratio > 1.3 * rough[0].ratio);
    CHECK(rough[2].ratio > 1.3 * rough[1].ratio);
}

TEST_CASE("bump derivatives match finite differences") {
    const double h = 1e-5;
    for (double z : {-0.6, 0.1, 0.45}) {
        const double fd = (bump_derivative({0}, P{z + h}) - bump_derivative({0}, P{z - h})) / (2 * h);
        CHECK(bump_derivative({1}, P{z}) == doctest::Approx(fd).epsilon(1e-6));
    }
    CHECK(bump_derivative({0}, P{0.0}) == doctest::Approx(std::exp(-1.0)));
    CHECK(bump_derivative({2}, P{1.2}) == 0.0);
    const double fd2 = (bump_derivative({1, 0}, P{0.2, 0.3 + h}) - bump_derivative({1, 0}, P{0.2, 0.3 - h})) / (2 * h);
    CHECK(bump_derivative({1, 1}, P{0.2, 0.3}) == doctest::Approx(fd2).epsilon(1e-6));
}

TEST_CASE("variational test separates smooth and jump functions") {
    auto g = build_grid(Box::unit(1), 2000, QuadratureRule::midpoint, 0.05);
    auto s = GridFunction::sample(g, [](PointView v) { return std::sin(2 * M_PI * v[0]); });
    const auto smooth = variational_derivative_test(s, {1}, 60, 2.0);
    CHECK(smooth.bumps > 0);
    CHECK(smooth.max_ratio <= 2 * M_PI * 1.01);  // <= ||u'||_inf
    auto jump = GridFunction::sample(g, [](PointView v) { return v[0] < 0.5 ? 0.0 : 1.0; });
    const auto rough = variational_derivative_test(jump, {1}, 60, 2.0);
    REQUIRE(rough.per_scale_max.size() == 3);
    CHECK(rough.per_scale_max[1] > 1.3 * rough.per_scale_max[0]);
    CHECK(rough.per_scale_max[2] > 1.3 * rough.per_scale_max[1]);
}

TEST_CASE("refinement classification") {
    CHECK(classify_refinement(std::vector<double>{1, 2, 4}) == Classification::divergent);
    CHECK(classify_refinement(std::vector<double>{124, 248, 495.99999999999994}) == Classification::divergent);
    CHECK(classify_refinement(std::vector<double>{1, 1, 1}) == Classification::convergent);
    CHECK(classify_refinement(std::vector<double>{0, 0, 0}) == Classification::convergent);
    CHECK(classify_refinement(std::vector<double>{1, 1.6, 2.5}) == Classification::inconclusive);
    CHECK(classify_refinement(std::vector<double>{1}) == Classification::inconclusive);
    CHECK(classify_refinement(std::vector<double>{-1, 3}) == Classification::inconclusive);
    CHECK(parse_classification(to_string(Classification::divergent)) == Classification::divergent);
}
