#pragma once

#include <string>
#include <vector>

#include "gpsobolev/grid.hpp"
#include "gpsobolev/kernels.hpp"

namespace gpsobolev {

/// Forward-difference stencil of delta_h^alpha = prod_i (Delta_{h_i e_i} / h_i)^{alpha_i},
/// stored as integer offsets (in units of h_i) and scaled coefficients.
struct DifferenceStencil {
    MultiIndex alpha;
    std::vector<double> h;
    std::vector<std::vector<int>> offsets;
    std::vector<double> coefficients;

    static DifferenceStencil forward(const MultiIndex& alpha, std::span<const double> h);
    /// Largest offset along each axis (equal to alpha_i).
    int reach(std::size_t axis) const { return alpha[axis]; }
};

/// delta_h^alpha u on a uniform grid, with h_i = steps[i] * spacing(i).
/// Values are defined wherever the stencil fits inside the grid and NaN
/// elsewhere. Throws MarginTooSmall if any interior node lacks room and
/// ConfigError on non-uniform grids. Empty `steps` means one spacing per axis.
GridFunction apply_delta_alpha(const GridFunction& u, const MultiIndex& alpha, std::vector<int> steps = {});

/// Adjoint (backward) operator prod_i ((tau_{-h_i e_i} - Id) / h_i)^{alpha_i},
/// extending v by zero outside the grid.
GridFunction apply_delta_alpha_adjoint(const GridFunction& v, const MultiIndex& alpha, std::vector<int> steps = {});

/// (delta_h^alpha (x) delta_h^beta) k (x, y). Throws MarginTooSmall if the
/// stencil leaves the kernel's domain.
double fd_cross_derivative(const Kernel& k, const MultiIndex& alpha, const MultiIndex& beta, std::span<const double> h,
                           PointView x, PointView y);

inline double fd_cross_derivative(const Kernel& k, const MultiIndex& alpha, std::span<const double> h, PointView x,
                                  PointView y) {
    return fd_cross_derivative(k, alpha, alpha, h, x, y);
}

struct SobolevRatio {
    MultiIndex alpha;
    int step = 1;       ///< h = step * grid spacing
    double h = 0.0;     ///< step length along the first axis
    double ratio = 0.0; ///< ||Delta_h u||_{L^p(interior)} / (h_1 ... h_l)
};

/// Difference quotients ||delta_h^alpha u||_{L^p(interior)} for every
/// 1 <= |alpha| <= m and every step in `steps` (multiples of the spacing).
std::vector<SobolevRatio> finite_difference_sobolev_ratio(const GridFunction& u, int m, double p,
                                                          const std::vector<int>& steps);

struct VariationalResult {
    double max_ratio = 0.0;
    std::vector<double> per_scale_max;  ///< coarse to fine
    std::size_t bumps = 0;
};

/// Battery of smooth bumps phi(x) = exp(-1/(1 - |x - c|^2 / r^2)) at three
/// dyadic radii, translated across the interior; returns
/// max_j |sum_i w_i u_i d^alpha phi_j(x_i)| / ||phi_j||_q. A finite battery
/// only provides supporting evidence for d^alpha u in L^p.
VariationalResult variational_derivative_test(const GridFunction& u, const MultiIndex& alpha, std::size_t battery_size,
                                              double p);

/// Bump exp(-1/(1 - |z|^2)) on the unit ball and its partial derivatives.
double bump_derivative(const MultiIndex& alpha, PointView z);

inline constexpr std::size_t kMaxBatterySize = 200;

enum class Classification { convergent, divergent, inconclusive };

std::string to_string(Classification c);
Classification parse_classification(const std::string& s);

/// Ratio test on a refinement series: last/first >= diverge_factor is
/// divergent, within [1/bound_factor, bound_factor] convergent.
struct RefinementThresholds {
    double diverge_factor = 4.0;
    double bound_factor = 1.5;
    bool operator==(const RefinementThresholds&) const = default;
};

Classification classify_refinement(std::span<const double> series, const RefinementThresholds& t = {});

}  // namespace gpsobolev
