#pragma once

#include <cstdint>
#include <vector>

#include "gpsobolev/grid.hpp"
#include "gpsobolev/spectral.hpp"

namespace gpsobolev {

/// E|X|^p for X ~ N(0, 1): 2^{p/2} Gamma((p + 1) / 2) / sqrt(pi).
double c_p(double p);
double log_c_p(double p);

/// C_p^{-2/p} / (e / (p - 1)); tends to 1 as p grows.
double c_p_asymptotic_ratio(double p);

/// Standard normal variate for one (seed, path, mode) triple. Mode n of a
/// path is the n-th draw of a generator seeded from (seed, path) only, so the
/// value does not depend on how paths are split between threads.
double standard_normal(std::uint64_t seed, std::uint64_t path, std::size_t mode);

/// All normals of one path, modes 0..count-1.
std::vector<double> path_normals(std::uint64_t seed, std::uint64_t path, std::size_t count);

struct PathBatch {
    GridPtr grid;
    std::vector<GridFunction> paths;
    std::uint64_t seed = 0;
    std::size_t truncation = 0;
};

/// U_j = sum_{n < N} sqrt(lambda_n) xi_{j,n} phi_n from an alpha = 0 decomposition.
PathBatch sample_paths(const SpectralDecomposition& dec, std::size_t n_paths, std::uint64_t seed, std::size_t n_modes);

struct MomentEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double p = 2.0;
    int m = 0;
    bool operator==(const MomentEstimate&) const = default;
};

/// Mean over paths of sum_{|alpha| <= m} ||delta_h^alpha U||^p_{L^p(interior)}.
MomentEstimate empirical_sobolev_moment(const PathBatch& batch, int m, double p);

}  // namespace gpsobolev
