#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpsobolev/grid.hpp"

namespace gpsobolev {

/// Largest derivative order (per argument) any closed form is provided for.
inline constexpr int kMaxAnalyticOrder = 4;

using KernelFn = std::function<double(PointView, PointView)>;
/// (alpha, beta, x, y) -> d^alpha_x d^beta_y k(x, y)
using CrossDerivativeFn = std::function<double(const MultiIndex&, const MultiIndex&, PointView, PointView)>;

/// A covariance function k(x, y) together with closed-form cross derivatives
/// up to `analytic_derivative_order()` in each argument.
///
/// Kernels are immutable value objects; copies share their evaluators.
class Kernel {
public:
    Kernel(std::string name, std::size_t dim, std::map<std::string, double> params, int analytic_order,
           KernelFn evaluator, CrossDerivativeFn cross_derivative, std::optional<Box> domain = std::nullopt);

    const std::string& name() const { return name_; }
    std::size_t dim() const { return dim_; }
    const std::map<std::string, double>& params() const { return params_; }
    int analytic_derivative_order() const { return analytic_order_; }
    /// Set for kernels only defined on a bounded region (Brownian motion).
    const std::optional<Box>& domain() const { return domain_; }

    bool has_analytic(const MultiIndex& alpha) const { return alpha.order() <= analytic_order_; }

    /// k(x, y). Throws DomainError outside the declared domain.
    double eval(PointView x, PointView y) const;

    /// d^alpha_x d^beta_y k(x, y). Throws UnsupportedDerivative when either
    /// order exceeds the analytic order; the zero multi-index always works.
    double cross_derivative(const MultiIndex& alpha, const MultiIndex& beta, PointView x, PointView y) const;

private:
    void check_point(PointView x) const;

    std::string name_;
    std::size_t dim_;
    std::map<std::string, double> params_;
    int analytic_order_;
    KernelFn evaluator_;
    CrossDerivativeFn cross_;
    std::optional<Box> domain_;
};

inline double eval(const Kernel& k, PointView x, PointView y) { return k.eval(x, y); }

inline double eval_cross_derivative(const Kernel& k, const MultiIndex& alpha, const MultiIndex& beta, PointView x,
                                    PointView y) {
    return k.cross_derivative(alpha, beta, x, y);
}

/// Clip level for slightly negative diagonals before the square root.
inline constexpr double kDiagonalTolerance = 1e-10;

/// sigma_alpha(x) = sqrt(d^{alpha,alpha} k(x, x)).
double sigma_alpha(const Kernel& k, const MultiIndex& alpha, PointView x);

/// Square root of a diagonal covariance value; values in [-tol*scale, 0) are
/// clipped, anything more negative raises NotPositiveDefinite.
double checked_sqrt_diagonal(double value, double scale, const std::string& context);

/// Building block of finite-rank kernels: k(x, y) = sum_i f_i(x) f_i(y).
struct BasisFunction {
    enum class Type { poly, sin, hat };

    struct Term {
        double coefficient = 0.0;
        std::vector<int> powers;
        bool operator==(const Term&) const = default;
    };

    Type type = Type::poly;
    std::vector<Term> terms;          // poly: sum of c * prod x_i^{p_i}
    double amplitude = 1.0;           // sin: A sin(omega . x + phase)
    std::vector<double> frequency;    // sin
    double phase = 0.0;               // sin
    std::vector<double> center;       // hat: prod_i max(0, 1 - |x_i - c_i|)

    static BasisFunction polynomial_1d(std::vector<double> coefficients);
    static BasisFunction sine(double amplitude, std::vector<double> frequency, double phase);
    static BasisFunction hat(std::vector<double> center);

    std::size_t dim() const;
    /// Closed-form derivatives are available up to this total order.
    int analytic_order() const;
    double value(PointView x) const;
    double derivative(const MultiIndex& alpha, PointView x) const;

    bool operator==(const BasisFunction&) const = default;
};

namespace kernels {

/// exp(-|x - y|^2 / (2 l^2)); analytic order 2.
Kernel squared_exponential(std::size_t dim, double lengthscale);

/// Matern with half-integer nu in {1/2, 3/2, 5/2}; analytic order 0, 1, 2.
Kernel matern(double nu, double lengthscale, std::size_t dim);

/// min(x, y) on [0, 1]; no classical derivative on the diagonal.
Kernel brownian();

/// sum_i f_i(x) f_i(y) with derivatives of the f_i.
Kernel finite_rank(std::vector<BasisFunction> functions, std::size_t dim, int max_order = kMaxAnalyticOrder);

/// sum_n w_n h_{q_n}(x) h_{q_n}(y) with h_a(x) = max(0, 1 - |x - a|); d = 1.
Kernel hat_series(std::vector<double> centers, std::vector<double> weights);

/// Identically zero covariance.
Kernel zero(std::size_t dim);

/// First `count` dyadic rationals of (-radius, radius), enumerated by level
/// (integers first, then odd multiples of 1/2, 1/4, ...), alternating sign
/// within a level: 0, 1, -1, 2, -2, ..., 1/2, -1/2, 3/2, ...
std::vector<double> dyadic_centers(std::size_t count, double radius);

}  // namespace kernels

/// Smallest and largest eigenvalue of the Gram matrix [k(x_i, x_j)].
std::pair<double, double> gram_eigenvalue_range(const Kernel& k, const std::vector<std::vector<double>>& points);

}  // namespace gpsobolev
