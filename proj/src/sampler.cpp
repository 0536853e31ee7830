#include "gpsobolev/sampler.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gpsobolev/errors.hpp"
#include "gpsobolev/finitediff.hpp"
#include "gpsobolev/parallel.hpp"

namespace gpsobolev {

double log_c_p(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("C_p needs a positive finite exponent");
    return 0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi);
}

double c_p(double p) {
    const double lc = log_c_p(p);
    // even moments are the odd double factorials; keep them exact
    if (p == std::floor(p) && static_cast<long>(p) % 2 == 0 && p <= 300.0) {
        double r = 1.0;
        for (long k = static_cast<long>(p) - 1; k > 1; k -= 2) r *= static_cast<double>(k);
        return r;
    }
    return std::exp(lc);
}

double c_p_asymptotic_ratio(double p) {
    if (!(p > 1.0)) throw ConfigError("asymptotic ratio needs p > 1");
    return std::exp(-2.0 / p * log_c_p(p)) / (std::numbers::e / (p - 1.0));
}

std::vector<double> path_normals(std::uint64_t seed, std::uint64_t path, std::size_t count) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal;
    std::vector<double> xi(count);
    for (auto& v : xi) v = normal(gen);
    return xi;
}

double standard_normal(std::uint64_t seed, std::uint64_t path, std::size_t mode) {
    return path_normals(seed, path, mode + 1).back();
}

PathBatch sample_paths(const SpectralDecomposition& dec, std::size_t n_paths, std::uint64_t seed,
                       std::size_t n_modes) {
    if (!dec.alpha.is_zero()) throw ConfigError("sampling needs an alpha = 0 decomposition");
    if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
    if (n_modes > dec.eigenfunctions.size()) {
        throw ConfigError("truncation " + std::to_string(n_modes) + " exceeds the " +
                          std::to_string(dec.eigenfunctions.size()) + " retained modes");
    }
    PathBatch batch;
    batch.grid = dec.grid;
    batch.seed = seed;
    batch.truncation = n_modes;
    const std::size_t size = dec.grid->size();
    std::vector<double> scale(n_modes);
    for (std::size_t n = 0; n < n_modes; ++n) scale[n] = std::sqrt(dec.eigenvalues[n]);

    std::vector<std::vector<double>> values(n_paths);
    parallel_for(0, n_paths, [&](std::size_t j) {
        const auto xi = path_normals(seed, j, n_modes);
        std::vector<double> u(size, 0.0);
        for (std::size_t n = 0; n < n_modes; ++n) {
            const double c = scale[n] * xi[n];
            const auto phi = dec.eigenfunctions[n].values();
            for (std::size_t i = 0; i < size; ++i) u[i] += c * phi[i];
        }
        values[j] = std::move(u);
    });
    batch.paths.reserve(n_paths);
    for (auto& v : values) batch.paths.emplace_back(dec.grid, std::move(v));
    return batch;
}

MomentEstimate empirical_sobolev_moment(const PathBatch& batch, int m, double p) {
    if (batch.paths.size() < 2) throw ConfigError("moment estimates need at least 2 paths");
    if (m < 0) throw ConfigError("m must be non-negative");
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("p must be finite and >= 1");
    const auto alphas = enumerate_multi_indices(batch.grid->dim(), m);
    const std::size_t n = batch.paths.size();
    std::vector<double> per_path(n);
    parallel_for(0, n, [&](std::size_t j) {
        double s = 0.0;
        for (const auto& alpha : alphas) {
            if (alpha.is_zero()) {
                s += lp_norm_pow(batch.paths[j], p, Region::interior);
            } else {
                s += lp_norm_pow(apply_delta_alpha(batch.paths[j], alpha), p, Region::interior);
            }
        }
        per_path[j] = s;
    });
    // fixed-order accumulation
    double mean = 0.0;
    for (double v : per_path) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : per_path) ss += (v - mean) * (v - mean);
    MomentEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    est.n_paths = n;
    est.p = p;
    est.m = m;
    return est;
}

}  // namespace gpsobolev
