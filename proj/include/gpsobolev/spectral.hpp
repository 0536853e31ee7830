#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpsobolev/finitediff.hpp"
#include "gpsobolev/grid.hpp"
#include "gpsobolev/kernels.hpp"

namespace gpsobolev {

/// Where d^{alpha,alpha} k comes from.
struct DerivativeSource {
    enum class Kind { automatic, analytic, finite_difference };
    Kind kind = Kind::automatic;
    int step_multiple = 1;  ///< finite differences use h = step_multiple * spacing

    static DerivativeSource automatic() { return {}; }
    static DerivativeSource analytic() { return {Kind::analytic, 1}; }
    static DerivativeSource finite_difference(int steps = 1) { return {Kind::finite_difference, steps}; }

    /// Replaces `automatic` by the concrete source for this kernel and alpha.
    DerivativeSource resolve(const Kernel& k, const MultiIndex& alpha) const;
    bool operator==(const DerivativeSource&) const = default;
};

std::string to_string(DerivativeSource::Kind kind);

/// Per-node diagonal d^{alpha,alpha} k(x_i, x_i) over a region; NaN outside it.
std::vector<double> diagonal_values(const Kernel& k, const MultiIndex& alpha, const Grid& grid,
                                    DerivativeSource source, Region region);

/// Entry d^{alpha,alpha} k(x, y) from the chosen (resolved) source.
double kernel_entry(const Kernel& k, const MultiIndex& alpha, DerivativeSource source, std::span<const double> h,
                    PointView x, PointView y);

struct TruncationPolicy {
    double mass_fraction = 0.9999;  ///< retain modes until this share of the trace
    std::size_t max_modes = 500;
    bool operator==(const TruncationPolicy&) const = default;
};

inline constexpr double kPsdTolerance = 1e-8;

struct NystromOptions {
    DerivativeSource source;
    Region region = Region::full;
    TruncationPolicy truncation;
    bool eigenfunctions = true;  ///< eigenvalues-only solves are several times faster
};

/// Eigenpairs of the Nystrom discretization of E_k^alpha restricted to a
/// region: M_ij = sqrt(w_i) d^{alpha,alpha} k(x_i, x_j) sqrt(w_j), with
/// phi_n(x_i) = v_n(i) / sqrt(w_i) (zero outside the region).
struct SpectralDecomposition {
    MultiIndex alpha;
    GridPtr grid;
    Region region = Region::full;
    DerivativeSource source;
    std::vector<std::size_t> support;     ///< grid nodes of the region
    std::vector<double> eigenvalues;      ///< all of them, descending, negatives clipped
    std::vector<GridFunction> eigenfunctions;  ///< retained modes (if requested)
    std::size_t truncation = 0;           ///< N retained modes
    double matrix_trace = 0.0;            ///< trace of M
    double discarded_mass = 0.0;          ///< matrix_trace - sum of retained eigenvalues
    double min_raw_eigenvalue = 0.0;      ///< before clipping
};

SpectralDecomposition nystrom_decompose(const Kernel& k, const MultiIndex& alpha, const GridPtr& grid,
                                        const NystromOptions& options = {});

/// Number of leading modes holding `mass_fraction` of the total, capped.
std::size_t truncation_for(std::span<const double> eigenvalues, double total, const TruncationPolicy& policy);

/// sum_i w_i d^{alpha,alpha} k(x_i, x_i) over a region. Finite-difference
/// sources need the interior region (forward stencils reach past the node).
double trace_diagonal(const Kernel& k, const MultiIndex& alpha, const Grid& grid,
                      DerivativeSource source = DerivativeSource::automatic(), Region region = Region::full);

/// sum_i w_i sigma_alpha(x_i)^p over a region.
double sigma_power_integral(const Kernel& k, const MultiIndex& alpha, const Grid& grid, DerivativeSource source,
                            double p, Region region);

struct MercerTrace {
    double value = 0.0;
    std::size_t modes = 0;
    double discarded_mass = 0.0;
};

/// sum_{n <= N} lambda_n ||delta_h^alpha phi_n||^2_{L^2(interior)} from an
/// alpha = 0 decomposition with eigenfunctions.
MercerTrace differentiated_mercer_trace(const SpectralDecomposition& dec, const MultiIndex& alpha,
                                        std::optional<std::size_t> modes = std::nullopt);

struct ImbeddingTrace {
    double total = 0.0;
    std::vector<std::pair<MultiIndex, double>> per_alpha;
};

/// sum over |alpha| <= m of trace_diagonal; failures name the offending alpha.
ImbeddingTrace rkhs_imbedding_trace(const Kernel& k, int m, const Grid& grid,
                                    DerivativeSource source = DerivativeSource::automatic(),
                                    Region region = Region::full);

struct TraceEstimate {
    MultiIndex alpha;
    std::string source;                    ///< "analytic" | "finite_difference"
    double diagonal_value = 0.0;           ///< finest ladder grid
    std::optional<double> spectral_value;  ///< sum of Nystrom eigenvalues
    std::optional<std::size_t> spectral_grid_n;
    std::optional<double> spectral_check_diagonal;  ///< diagonal on the spectral grid
    std::vector<double> refinement_series; ///< one value per ladder grid
    Classification classification = Classification::inconclusive;
    bool operator==(const TraceEstimate&) const = default;
};

struct NuclearCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = false;
    bool operator==(const NuclearCheck&) const = default;
};

struct NuclearReport {
    double p = 2.0;
    double sigma_p_sq = 0.0;      ///< ||sigma||_p^2
    double nu_upper = 0.0;        ///< sum_n lambda_n ||phi_n||_p^2
    double opnorm_lower = 0.0;    ///< lower estimate of ||E_k||_{L^q -> L^p}
    double c_p_factor = 1.0;      ///< C_p^{-2/p}
    double trace = 0.0;           ///< sum_n lambda_n
    std::optional<double> factorized_bound;  ///< ||A||^2 nu(S) through L^2 (p <= 2)
    std::vector<NuclearCheck> checks;
    bool operator==(const NuclearReport&) const = default;

    bool all_passed() const;
};

/// Computable inequalities around the nuclear norm of E_k : L^q -> L^p.
NuclearReport nuclear_bound_report(const Kernel& k, double p, const GridPtr& grid);

}  // namespace gpsobolev
