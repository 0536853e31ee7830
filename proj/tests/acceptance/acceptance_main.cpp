// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [unit-test executables...]
//
// Criterion 9 runs the given unit-test executables (the invariant suites).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gpsobolev/errors.hpp"
#include "gpsobolev/kernel_spec.hpp"
#include "gpsobolev/parallel.hpp"
#include "gpsobolev/report_io.hpp"
#include "gpsobolev/sampler.hpp"
#include "gpsobolev/verdict.hpp"

using namespace gpsobolev;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

// Collects sub-checks of one criterion; every failing one is printed.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
        detail_ << "\n    " << (ok ? "ok   " : "FAIL ") << what;
    }
    bool ok() const { return failures_.empty(); }
    std::string detail() const { return detail_.str(); }

private:
    std::vector<std::string> failures_;
    std::ostringstream detail_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// (16/3)(1 - 2^-20) for twenty dyadic hats with weights 2^-n, n = 0..19.
void hat_series_trace(Checks& c) {
    const auto t0 = Clock::now();
    const auto spec = KernelSpec::from_json(
        Json::parse(R"({"name": "hat_series", "params": {"dyadic_count": 20, "dyadic_radius": 4}})"));
    const Kernel k = spec.build();
    const auto grid = build_grid(spec.default_domain(), 4096, QuadratureRule::midpoint, 0.0);
    const double tr = rkhs_imbedding_trace(k, 1, *grid).total;
    const double want = 16.0 / 3.0 * (1.0 - std::ldexp(1.0, -20));
    const double t = seconds_since(t0);
    c.expect(rel(tr, want) <= 0.01, fmt("Tr(ii*) = %.8f vs %.8f (rel %.2e <= 1e-2)", tr, want, rel(tr, want)));
    c.expect(tr <= 10.0, fmt("Tr(ii*) = %.6f <= 10", tr));
    c.expect(t < 10.0, fmt("runtime %.2f s < 10 s", t));
}

void brownian_trace_and_spectrum(Checks& c) {
    const auto t0 = Clock::now();
    const Kernel k = kernels::brownian();
    const auto grid = build_grid(Box::unit(1), 2000, QuadratureRule::midpoint, 0.0);
    const auto zero = MultiIndex::zero(1);
    const double diag = trace_diagonal(k, zero, *grid);
    NystromOptions opts;
    opts.eigenfunctions = false;
    opts.truncation = {1.0, grid->size()};
    const auto dec = nystrom_decompose(k, zero, grid, opts);
    double sum = 0.0;
    for (double l : dec.eigenvalues) sum += l;
    const double t = seconds_since(t0);
    c.expect(std::abs(diag - 0.5) <= 1e-3, fmt("diagonal trace %.12f vs 0.5 (abs %.2e <= 1e-3)", diag, std::abs(diag - 0.5)));
    c.expect(rel(sum, diag) <= 1e-10, fmt("sum of eigenvalues %.15f vs diagonal (rel %.2e <= 1e-10)", sum, rel(sum, diag)));
    for (int n = 1; n <= 5; ++n) {
        const double want = 1.0 / std::pow((n - 0.5) * std::numbers::pi, 2);
        const double got = dec.eigenvalues[n - 1];
        c.expect(rel(got, want) <= 0.01, fmt("lambda_%.0f = %.10f vs %.10f", n, got, want) +
                                             fmt(" (rel %.2e <= 1e-2)", rel(got, want)));
    }
    c.expect(t < 30.0, fmt("runtime %.2f s < 30 s", t));
}

void differentiated_mercer(Checks& c) {
    const Kernel k = kernels::squared_exponential(1, 1.0);
    const auto grid = build_grid(Box::unit(1), 400, QuadratureRule::midpoint, 0.05);
    NystromOptions opts;
    opts.truncation = {0.9999, grid->size()};
    const auto dec = nystrom_decompose(k, MultiIndex::zero(1), grid, opts);
    const MultiIndex a1({1});
    const auto mercer = differentiated_mercer_trace(dec, a1);
    const double diag = trace_diagonal(k, a1, *grid, DerivativeSource::analytic(), Region::interior);
    const double interior = grid->measure(Region::interior);
    c.expect(rel(diag, interior) <= 1e-12, fmt("diagonal route %.10f = interior length %.10f", diag, interior));
    c.expect(rel(mercer.value, diag) <= 0.02,
             fmt("Mercer route %.8f with %.0f modes (rel %.2e <= 2e-2)", mercer.value, double(mercer.modes),
                 rel(mercer.value, diag)));
    c.expect(mercer.discarded_mass <= 1e-4 * dec.matrix_trace * (1 + 1e-12),
             fmt("retained mass %.8f >= 0.9999", 1.0 - mercer.discarded_mass / dec.matrix_trace));
}

void moment_identity(Checks& c) {
    const auto t0 = Clock::now();
    const Kernel k = kernels::squared_exponential(1, 1.0);
    const auto grid = build_grid(Box::unit(1), 100, QuadratureRule::midpoint, 0.05);
    c.expect(std::abs(grid->measure(Region::interior) - 0.9) <= 1e-12, "interior is (0.05, 0.95)");
    NystromOptions opts;
    opts.truncation = {1.0 - 1e-9, grid->size()};
    const auto dec = nystrom_decompose(k, MultiIndex::zero(1), grid, opts);
    const auto batch = sample_paths(dec, 10000, 20240601, dec.truncation);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const auto est = empirical_sobolev_moment(batch, 0, p);
        const double want = c_p(p) * 0.9;
        const double z = (est.mean - want) / est.std_error;
        c.expect(std::abs(z) <= 3.0, fmt("p = %.1f: E||U||_p^p = %.5f vs C_p 0.9 = %.5f", p, est.mean, want) +
                                         fmt(" (z = %.2f)", z));
    }
    const auto est = empirical_sobolev_moment(batch, 1, 2.0);
    double want = 0.0;
    for (const auto& alpha : enumerate_multi_indices(1, 1))
        want += c_p(2.0) * sigma_power_integral(k, alpha, *grid, DerivativeSource::analytic(), 2.0, Region::interior);
    const double z = (est.mean - want) / est.std_error;
    c.expect(std::abs(z) <= 3.0, fmt("m = 1, p = 2: %.5f vs C_p sum ||sigma_a||^2 = %.5f (z = %.2f)", est.mean, want, z));
    const double t = seconds_since(t0);
    c.expect(t < 120.0, fmt("runtime %.2f s < 120 s", t));
}

void gaussian_constant(Checks& c) {
    // E|X|^4 by composite Simpson on [-40, 40]
    auto simpson = [](double p) {
        const int n = 200000;
        const double a = -40, b = 40, h = (b - a) / n;
        auto f = [p](double x) { return std::pow(std::abs(x), p) * std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); };
        double s = f(a) + f(b);
        for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
        return s * h / 3;
    };
    c.expect(c_p(2.0) == 1.0, fmt("C_2 = %.17g", c_p(2.0)));
    const double c1 = std::sqrt(2.0 / std::numbers::pi);
    c.expect(std::abs(c_p(1.0) - c1) <= 1e-12, fmt("C_1 = %.17g (abs %.1e <= 1e-12)", c_p(1.0), std::abs(c_p(1.0) - c1)));
    const double c4 = simpson(4.0);
    c.expect(std::abs(c_p(4.0) - c4) <= 1e-10 && std::abs(c_p(4.0) - 3.0) <= 1e-10,
             fmt("C_4 = %.15f, quadrature %.15f", c_p(4.0), c4));
    const double r = c_p_asymptotic_ratio(200.0);
    c.expect(std::abs(r - 1.0) <= 0.05, fmt("C_p^{-2/p} / (e/(p-1)) at p = 200: %.5f", r));
}

void negative_detection(Checks& c) {
    AnalysisConfig cfg;
    cfg.monte_carlo = false;
    const std::vector<std::pair<std::string, Kernel>> ks = {{"brownian", kernels::brownian()},
                                                            {"matern-1/2", kernels::matern(0.5, 1.0, 1)}};
    for (const auto& [name, k] : ks) {
        const auto r = analyze(k, 1, 2.0, cfg);
        c.expect(r.overall == Verdict::fail, name + ": verdict " + to_string(r.overall));
        for (const auto& a : r.alphas) {
            if (a.alpha.is_zero()) continue;
            c.expect(a.classification == Classification::divergent,
                     name + ": alpha=" + a.alpha.to_string() + " " + to_string(a.classification));
            const auto& s = a.trace->refinement_series;
            for (std::size_t j = 1; j < s.size(); ++j)
                c.expect(s[j] / s[j - 1] >= 1.8, name + fmt(": trace %.4f -> %.4f, factor %.4f >= 1.8", s[j - 1], s[j], s[j] / s[j - 1]));
        }
    }
}

void nuclear_sandwich(Checks& c) {
    const auto grid = build_grid(Box::unit(1), 200, QuadratureRule::midpoint, 0.0);
    const std::vector<std::pair<std::string, Kernel>> ks = {{"squared_exponential", kernels::squared_exponential(1, 1.0)},
                                                            {"brownian", kernels::brownian()}};
    for (const auto& [name, k] : ks) {
        for (double p : {2.0, 3.0, 4.0}) {
            const auto r = nuclear_bound_report(k, p, grid);
            c.expect(r.sigma_p_sq <= r.nu_upper * (1 + 1e-10),
                     name + fmt(" p=%.0f: ||sigma||_p^2 = %.6f <= sum lambda ||phi||_p^2 = %.6f", p, r.sigma_p_sq, r.nu_upper));
            c.expect(r.c_p_factor * r.opnorm_lower <= r.sigma_p_sq * (1 + 1e-10),
                     name + fmt(" p=%.0f: C_p^{-2/p} opnorm = %.6f <= %.6f", p, r.c_p_factor * r.opnorm_lower, r.sigma_p_sq));
            if (p == 2.0)
                c.expect(rel(r.sigma_p_sq, r.trace) <= 1e-3,
                         name + fmt(": ||sigma||_2^2 = %.10f vs sum lambda = %.10f", r.sigma_p_sq, r.trace));
            c.expect(r.all_passed(), name + fmt(" p=%.0f: report checks", p));
        }
    }
}

void finite_rank_example(Checks& c) {
    const auto spec = KernelSpec::from_json(Json::parse(R"({"name": "finite_rank", "dimension": 1,
        "functions": [{"type": "poly", "coefficients": [0, 1]}, {"type": "sin", "frequency_pi": [1]}]})"));
    const Kernel k = spec.build();
    AnalysisConfig cfg;
    cfg.n_paths = 2000;
    for (double p : {2.0, 3.0}) {
        const auto r = analyze(k, 1, p, cfg);
        c.expect(r.overall == Verdict::pass, fmt("m = 1, p = %.0f: ", p) + to_string(r.overall));
    }
    const auto grid = build_grid(Box::unit(1), 1024, QuadratureRule::midpoint, 0.0);
    const double tr = rkhs_imbedding_trace(k, 1, *grid).total;
    const double pi = std::numbers::pi;
    const double want = 1.0 / 3.0 + 1.0 + 0.5 + pi * pi / 2.0;
    c.expect(rel(tr, want) <= 0.01, fmt("Tr(ii*) = %.8f vs %.8f (rel %.2e <= 1e-2)", tr, want, rel(tr, want)));
}

void determinism_and_invariants(Checks& c, const std::vector<std::string>& suites, Clock::time_point start) {
    AnalysisConfig cfg;
    cfg.n_paths = 2000;
    const std::vector<std::pair<std::string, Kernel>> ks = {{"matern-3/2", kernels::matern(1.5, 0.5, 1)},
                                                            {"brownian", kernels::brownian()},
                                                            {"squared_exponential 2d", kernels::squared_exponential(2, 0.7)}};
    for (const auto& [name, k] : ks) {
        std::vector<std::string> dumps;
        for (std::size_t threads : {1, 2, 4}) {
            set_thread_count(threads);
            dumps.push_back(to_json(analyze(k, 1, 2.0, cfg)).dump(2));
        }
        set_thread_count(1);
        c.expect(dumps[0] == dumps[1] && dumps[0] == dumps[2], name + ": identical reports with 1, 2, 4 threads");
    }
    for (const auto& exe : suites) {
        const int rc = std::system(("\"" + exe + "\" --minimal > /dev/null 2>&1").c_str());
        c.expect(rc == 0, "invariant suite " + exe.substr(exe.find_last_of('/') + 1));
    }
    const double t = seconds_since(start);
    c.expect(t < 300.0, fmt("full acceptance run %.1f s < 300 s", t));
}

}  // namespace

int main(int argc, char** argv) {
    const auto start = Clock::now();
    const std::vector<std::string> suites(argv + 1, argv + argc);
    const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria = {
        {"hat-series imbedding trace", hat_series_trace},
        {"trace formula vs Brownian spectrum", brownian_trace_and_spectrum},
        {"differentiated Mercer identity", differentiated_mercer},
        {"Gaussian moment identity", moment_identity},
        {"constant C_p", gaussian_constant},
        {"negative detection", negative_detection},
        {"nuclear sandwich checks", nuclear_sandwich},
        {"finite-rank example", finite_rank_example},
        {"determinism and invariant suites", [&](Checks& c) { determinism_and_invariants(c, suites, start); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Checks c;
        const auto t0 = Clock::now();
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.ok() ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first
                  << fmt(" (%.2f s)", seconds_since(t0)) << c.detail() << "\n";
        failed += !c.ok();
    }
    std::cout << (failed ? "FAILED " : "all ") << criteria.size() - failed << "/" << criteria.size()
              << " criteria passed\n";
    return failed ? 1 : 0;
}
