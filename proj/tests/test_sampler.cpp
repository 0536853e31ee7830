#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpsobolev/errors.hpp"
#include "gpsobolev/parallel.hpp"
#include "gpsobolev/sampler.hpp"

using namespace gpsobolev;

namespace {

// E|X|^p by composite Simpson on [-40, 40] (independent of the Gamma formula).
double moment_by_quadrature(double p) {
    const int n = 200000;
    const double a = -40, b = 40, h = (b - a) / n;
    auto f = [p](double x) { return std::pow(std::abs(x), p) * std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); };
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

SpectralDecomposition decompose(const Kernel& k, const GridPtr& g) {
    NystromOptions o;
    o.truncation = {1.0 - 1e-9, 1u << 20};
    return nystrom_decompose(k, MultiIndex::zero(g->dim()), g, o);
}

}  // namespace

TEST_CASE("Gaussian absolute moments C_p") {
    CHECK(c_p(2.0) == 1.0);
    CHECK(std::abs(c_p(1.0) - std::sqrt(2.0 / std::numbers::pi)) < 1e-12);
    CHECK(std::abs(c_p(4.0) - moment_by_quadrature(4.0)) < 1e-10);
    CHECK(c_p(4.0) == 3.0);
    for (double p : {1.5, 3.0, 5.5})  // smooth enough for Simpson CHECK(c_p(p) == doctest::Approx(moment_by_quadrature(p)).epsilon(1e-9));
    CHECK_THROWS_AS(c_p(0.0), ConfigError);
    CHECK_THROWS_AS(c_p(-1.0), ConfigError);
}

TEST_CASE("asymptotics of C_p^{-2/p}") {
    CHECK(c_p_asymptotic_ratio(2.0) == doctest::Approx(1.0 / std::numbers::e).epsilon(1e-12));
    CHECK(std::abs(c_p_asymptotic_ratio(200.0) - 1.0) <= 0.05);
    CHECK(std::abs(c_p_asymptotic_ratio(1000.0) - 1.0) <= 0.01);
    CHECK_THROWS_AS(c_p_asymptotic_ratio(1.0), ConfigError);
}

TEST_CASE("normal variates are functions of (seed, path, mode)") {
    const auto xs = path_normals(42, 7, 10);
    for (std::size_t n = 0; n < 10; ++n) CHECK(standard_normal(42, 7, n) == xs[n]);
    CHECK(path_normals(42, 8, 10) != xs);
    CHECK(path_normals(43, 7, 10) != xs);
}

TEST_CASE("paths are the Karhunen-Loeve sums and deterministic") {
    auto g = build_grid(Box::unit(1), 64);
    const auto dec = decompose(kernels::matern(1.5, 0.3, 1), g);
    set_thread_count(1);
    const auto a = sample_paths(dec, 50, 9, dec.truncation);
    set_thread_count(4);
    const auto b = sample_paths(dec, 50, 9, dec.truncation);
    set_thread_count(1);
    for (std::size_t j = 0; j < 50; ++j) {
        CHECK(std::equal(a.paths[j].values().begin(), a.paths[j].values().end(), b.paths[j].values().begin()));
    }
    const auto xi = path_normals(9, 3, dec.truncation);
    for (std::size_t i = 0; i < g->size(); i += 7) {
        double u = 0.0;
        for (std::size_t n = 0; n < dec.truncation; ++n)
            u += std::sqrt(dec.eigenvalues[n]) * xi[n] * dec.eigenfunctions[n][i];
        CHECK(a.paths[3][i] == doctest::Approx(u).epsilon(1e-12));
    }
    CHECK_THROWS_AS(sample_paths(dec, 5, 1, dec.truncation + 1), ConfigError);
    CHECK_THROWS_AS(sample_paths(dec, 0, 1, 1), ConfigError);
}

TEST_CASE("zero covariance gives zero paths and a zero moment") {
    auto g = build_grid(Box::unit(1), 32);
    const auto dec = decompose(kernels::zero(1), g);
    const auto batch = sample_paths(dec, 10, 1, 0);
    for (const auto& p : batch.paths)
        for (double v : p.values()) CHECK(v == 0.0);
    const auto m = empirical_sobolev_moment(batch, 1, 2.0);
    CHECK(m.mean == 0.0);
    CHECK(m.std_error == 0.0);
}

TEST_CASE("rank-one paths: variance at the right end") {
    auto g = build_grid(Box::unit(1), 100);
    const auto dec = decompose(kernels::finite_rank({BasisFunction::polynomial_1d({0, 1})}, 1), g);
    REQUIRE(dec.truncation == 1);
    const std::size_t n = 10000;
    const auto batch = sample_paths(dec, n, 5, 1);
    const std::size_t last = g->size() - 1;
    const double x = g->node(last)[0];
    double s2 = 0.0;
    for (const auto& p : batch.paths) {
        CHECK(p[last] / x == doctest::Approx(p[0] / g->node(0)[0]).epsilon(1e-9));  // xi * x
        s2 += p[last] * p[last];
    }
    const double var = s2 / n;
    const double se = x * x * std::sqrt(2.0 / n);
    CHECK(std::abs(var - x * x) <= 3 * se);
    CHECK(std::abs(var - 1.0) <= 3 * se + (1 - x * x));
}

TEST_CASE("moment identity on the interior (0.05, 0.95)") {
    auto g = build_grid(Box::unit(1), 100, QuadratureRule::midpoint, 0.05);
    REQUIRE(g->measure(Region::interior) == doctest::Approx(0.9).epsilon(1e-12));
    const auto dec = decompose(kernels::squared_exponential(1, 1.0), g);
    const auto batch = sample_paths(dec, 10000, 2024, dec.truncation);
    for (double p : {2.0, 4.0}) {
        const auto m = empirical_sobolev_moment(batch, 0, p);
        CAPTURE(p);
        CHECK(std::abs(m.mean - c_p(p) * 0.9) <= 3 * m.std_error);
        CHECK(m.n_paths == 10000);
    }
    CHECK_THROWS_AS(empirical_sobolev_moment(sample_paths(dec, 1, 0, 1), 0, 2.0), ConfigError);
}

TEST_CASE("second moment grows with the number of modes") {
    // margin 0: the interior is the whole grid, where the modes are orthogonal
    auto g = build_grid(Box::unit(1), 80, QuadratureRule::midpoint, 0.0);
    const auto dec = decompose(kernels::brownian(), g);
    double prev = -1.0;
    for (std::size_t N : {1u, 2u, 5u, 20u, 80u}) {
        const auto m = empirical_sobolev_moment(sample_paths(dec, 500, 3, std::min(N, dec.truncation)), 0, 2.0);
        CHECK(m.mean >= prev);
        prev = m.mean;
    }
}
