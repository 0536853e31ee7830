#include "gpsobolev/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "gpsobolev/detail/radial.hpp"
#include "gpsobolev/errors.hpp"

namespace gpsobolev {

Kernel::Kernel(std::string name, std::size_t dim, std::map<std::string, double> params, int analytic_order,
               KernelFn evaluator, CrossDerivativeFn cross_derivative, std::optional<Box> domain)
    : name_(std::move(name)),
      dim_(dim),
      params_(std::move(params)),
      analytic_order_(analytic_order),
      evaluator_(std::move(evaluator)),
      cross_(std::move(cross_derivative)),
      domain_(std::move(domain)) {
    if (dim_ < 1 || dim_ > kMaxDimension) throw ConfigError("kernel dimension must be 1, 2 or 3");
    if (!evaluator_) throw ConfigError("kernel needs an evaluator");
    if (domain_ && domain_->dim() != dim_) throw ConfigError("kernel domain dimension mismatch");
}

void Kernel::check_point(PointView x) const {
    if (x.size() != dim_) {
        throw DomainError(name_ + ": point of dimension " + std::to_string(x.size()) + ", expected " +
                          std::to_string(dim_));
    }
    if (domain_ && !domain_->contains(x)) {
        std::ostringstream os;
        os << name_ << ": point (";
        for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
        os << ") outside the kernel domain";
        throw DomainError(os.str());
    }
}

double Kernel::eval(PointView x, PointView y) const {
    check_point(x);
    check_point(y);
    return evaluator_(x, y);
}

double Kernel::cross_derivative(const MultiIndex& alpha, const MultiIndex& beta, PointView x, PointView y) const {
    if (alpha.dim() != dim_ || beta.dim() != dim_) throw ConfigError("multi-index dimension does not match kernel");
    if (alpha.is_zero() && beta.is_zero()) return eval(x, y);
    if (alpha.order() > analytic_order_ || beta.order() > analytic_order_ || !cross_) {
        throw UnsupportedDerivative(name_ + ": no closed-form derivative for alpha=" + alpha.to_string() +
                                    ", beta=" + beta.to_string());
    }
    check_point(x);
    check_point(y);
    return cross_(alpha, beta, x, y);
}

double checked_sqrt_diagonal(double value, double scale, const std::string& context) {
    if (std::isnan(value)) throw NumericError(context + ": diagonal value is NaN");
    if (value < 0.0) {
        if (value < -kDiagonalTolerance * std::max(1.0, std::abs(scale))) {
            throw NotPositiveDefinite(context + ": negative diagonal value " + std::to_string(value));
        }
        return 0.0;
    }
    return std::sqrt(value);
}

double sigma_alpha(const Kernel& k, const MultiIndex& alpha, PointView x) {
    const double v = k.cross_derivative(alpha, alpha, x, x);
    return checked_sqrt_diagonal(v, v, k.name() + " sigma" + alpha.to_string());
}

// ---------------------------------------------------------------------------
// BasisFunction

namespace {

double falling_factorial(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= static_cast<double>(n - i);
    return r;
}

double hat_1d(double u) { return std::max(0.0, 1.0 - std::abs(u)); }

// Derivative of the hat, averaging the one-sided values at the three kinks.
double hat_1d_derivative(double u) {
    if (u < -1.0 || u > 1.0) return 0.0;
    if (u == -1.0) return 0.5;
    if (u == 1.0) return -0.5;
    if (u == 0.0) return 0.0;
    return u < 0.0 ? 1.0 : -1.0;
}

}  // namespace

BasisFunction BasisFunction::polynomial_1d(std::vector<double> coefficients) {
    BasisFunction f;
    f.type = Type::poly;
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        f.terms.push_back({coefficients[j], {static_cast<int>(j)}});
    }
    return f;
}

BasisFunction BasisFunction::sine(double amplitude, std::vector<double> frequency, double phase) {
    BasisFunction f;
    f.type = Type::sin;
    f.amplitude = amplitude;
    f.frequency = std::move(frequency);
    f.phase = phase;
    return f;
}

BasisFunction BasisFunction::hat(std::vector<double> center) {
    BasisFunction f;
    f.type = Type::hat;
    f.center = std::move(center);
    return f;
}

std::size_t BasisFunction::dim() const {
    switch (type) {
        case Type::poly: return terms.empty() ? 0 : terms.front().powers.size();
        case Type::sin: return frequency.size();
        case Type::hat: return center.size();
    }
    return 0;
}

int BasisFunction::analytic_order() const { return type == Type::hat ? 1 : kMaxAnalyticOrder; }

double BasisFunction::value(PointView x) const { return derivative(MultiIndex::zero(x.size()), x); }

double BasisFunction::derivative(const MultiIndex& alpha, PointView x) const {
    if (alpha.order() > analytic_order()) {
        throw UnsupportedDerivative("basis function: derivative " + alpha.to_string() + " not available");
    }
    switch (type) {
        case Type::poly: {
            double s = 0.0;
            for (const auto& t : terms) {
                double v = t.coefficient;
                for (std::size_t a = 0; a < x.size() && v != 0.0; ++a) {
                    const int p = t.powers[a];
                    const int q = alpha[a];
                    if (q > p) {
                        v = 0.0;
                    } else {
                        v *= falling_factorial(p, q) * std::pow(x[a], p - q);
                    }
                }
                s += v;
            }
            return s;
        }
        case Type::sin: {
            double arg = phase;
            double scale = amplitude;
            for (std::size_t a = 0; a < x.size(); ++a) {
                arg += frequency[a] * x[a];
                scale *= std::pow(frequency[a], alpha[a]);
            }
            return scale * std::sin(arg + 0.5 * std::numbers::pi * alpha.order());
        }
        case Type::hat: {
            double v = 1.0;
            for (std::size_t a = 0; a < x.size(); ++a) {
                const double u = x[a] - center[a];
                v *= alpha[a] == 0 ? hat_1d(u) : hat_1d_derivative(u);
            }
            return v;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Built-in kernels

namespace kernels {

namespace {

double distance(PointView x, PointView y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

// Stationary isotropic kernel F(|x - y|). `h(k, r)` returns the k-th
// derivative of G(s) = F(sqrt(2 s)) with respect to s.
template <class Value, class Derivative>
Kernel radial_kernel(std::string name, std::size_t dim, std::map<std::string, double> params, int order,
                     Value value, Derivative h) {
    KernelFn eval = [value](PointView x, PointView y) { return value(distance(x, y)); };
    CrossDerivativeFn cross = [h, dim](const MultiIndex& a, const MultiIndex& b, PointView x, PointView y) {
        std::array<double, kMaxDimension> tau{};
        for (std::size_t i = 0; i < dim; ++i) tau[i] = x[i] - y[i];
        const double r = distance(x, y);
        const MultiIndex g = a + b;
        const double v = detail::radial_partial(g.entries(), std::span<const double>(tau.data(), dim),
                                                [&](int k) { return h(k, r); });
        return (b.order() % 2 == 0) ? v : -v;
    };
    return Kernel(std::move(name), dim, std::move(params), order, std::move(eval), std::move(cross));
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive and finite");
}

}  // namespace

Kernel squared_exponential(std::size_t dim, double lengthscale) {
    require_positive(lengthscale, "squared_exponential lengthscale");
    const double inv = 1.0 / (lengthscale * lengthscale);
    auto value = [inv](double r) { return std::exp(-0.5 * r * r * inv); };
    auto h = [inv](int k, double r) { return std::pow(-inv, k) * std::exp(-0.5 * r * r * inv); };
    return radial_kernel("squared_exponential", dim, {{"lengthscale", lengthscale}}, 2, value, h);
}

Kernel matern(double nu, double lengthscale, std::size_t dim) {
    require_positive(lengthscale, "matern lengthscale");
    const double a = std::sqrt(2.0 * nu) / lengthscale;
    std::map<std::string, double> params{{"lengthscale", lengthscale}, {"nu", nu}};
    if (std::abs(nu - 0.5) < 1e-12) {
        auto value = [a](double r) { return std::exp(-a * r); };
        auto h = [a](int, double r) { return std::exp(-a * r); };  // only k = 0 is ever requested
        return radial_kernel("matern", dim, params, 0, value, h);
    }
    if (std::abs(nu - 1.5) < 1e-12) {
        auto value = [a](double r) { return (1.0 + a * r) * std::exp(-a * r); };
        auto h = [a](int k, double r) {
            const double e = std::exp(-a * r);
            switch (k) {
                case 0: return (1.0 + a * r) * e;
                case 1: return -a * a * e;
                default: return a * a * a * e / r;  // k = 2, paired with a vanishing monomial at r = 0
            }
        };
        return radial_kernel("matern", dim, params, 1, value, h);
    }
    if (std::abs(nu - 2.5) < 1e-12) {
        auto value = [a](double r) { return (1.0 + a * r + a * a * r * r / 3.0) * std::exp(-a * r); };
        auto h = [a](int k, double r) {
            const double e = std::exp(-a * r);
            const double a2 = a * a, a4 = a2 * a2, a5 = a4 * a;
            switch (k) {
                case 0: return (1.0 + a * r + a2 * r * r / 3.0) * e;
                case 1: return -(a2 / 3.0) * (1.0 + a * r) * e;
                case 2: return (a4 / 3.0) * e;
                case 3: return -(a5 / 3.0) * e / r;
                default: return (a5 / 3.0) * e * (a * r + 1.0) / (r * r * r);
            }
        };
        return radial_kernel("matern", dim, params, 2, value, h);
    }
    throw ConfigError("matern nu must be one of 0.5, 1.5, 2.5");
}

Kernel brownian() {
    KernelFn eval = [](PointView x, PointView y) { return std::min(x[0], y[0]); };
    return Kernel("brownian", 1, {}, 0, std::move(eval), nullptr, Box::unit(1));
}

Kernel finite_rank(std::vector<BasisFunction> functions, std::size_t dim, int max_order) {
    if (functions.empty()) throw ConfigError("finite_rank needs at least one function");
    int order = std::min(max_order, kMaxAnalyticOrder);
    for (const auto& f : functions) {
        if (f.dim() != dim) throw ConfigError("finite_rank function dimension does not match kernel dimension");
        if (f.type == BasisFunction::Type::poly) {
            for (const auto& t : f.terms) {
                if (t.powers.size() != dim) throw ConfigError("finite_rank poly term has wrong number of powers");
            }
        }
        order = std::min(order, f.analytic_order());
    }
    auto fs = std::make_shared<const std::vector<BasisFunction>>(std::move(functions));
    KernelFn eval = [fs](PointView x, PointView y) {
        double s = 0.0;
        for (const auto& f : *fs) s += f.value(x) * f.value(y);
        return s;
    };
    CrossDerivativeFn cross = [fs](const MultiIndex& a, const MultiIndex& b, PointView x, PointView y) {
        double s = 0.0;
        for (const auto& f : *fs) s += f.derivative(a, x) * f.derivative(b, y);
        return s;
    };
    std::map<std::string, double> params{{"rank", static_cast<double>(fs->size())}};
    return Kernel("finite_rank", dim, std::move(params), order, std::move(eval), std::move(cross));
}

Kernel hat_series(std::vector<double> centers, std::vector<double> weights) {
    if (centers.empty()) throw ConfigError("hat_series needs at least one center");
    if (centers.size() != weights.size()) throw ConfigError("hat_series needs one weight per center");
    double weight_sum = 0.0;
    for (double w : weights) {
        require_positive(w, "hat_series weight");
        weight_sum += w;
    }
    auto cs = std::make_shared<const std::vector<double>>(std::move(centers));
    auto ws = std::make_shared<const std::vector<double>>(std::move(weights));
    KernelFn eval = [cs, ws](PointView x, PointView y) {
        double s = 0.0;
        for (std::size_t n = 0; n < cs->size(); ++n) s += (*ws)[n] * hat_1d(x[0] - (*cs)[n]) * hat_1d(y[0] - (*cs)[n]);
        return s;
    };
    CrossDerivativeFn cross = [cs, ws](const MultiIndex& a, const MultiIndex& b, PointView x, PointView y) {
        double s = 0.0;
        for (std::size_t n = 0; n < cs->size(); ++n) {
            const double u = x[0] - (*cs)[n];
            const double v = y[0] - (*cs)[n];
            s += (*ws)[n] * (a[0] == 0 ? hat_1d(u) : hat_1d_derivative(u)) *
                 (b[0] == 0 ? hat_1d(v) : hat_1d_derivative(v));
        }
        return s;
    };
    std::map<std::string, double> params{{"centers", static_cast<double>(cs->size())}, {"weight_sum", weight_sum}};
    return Kernel("hat_series", 1, std::move(params), 1, std::move(eval), std::move(cross));
}

Kernel zero(std::size_t dim) {
    KernelFn eval = [](PointView, PointView) { return 0.0; };
    CrossDerivativeFn cross = [](const MultiIndex&, const MultiIndex&, PointView, PointView) { return 0.0; };
    return Kernel("zero", dim, {}, kMaxAnalyticOrder, std::move(eval), std::move(cross));
}

std::vector<double> dyadic_centers(std::size_t count, double radius) {
    require_positive(radius, "dyadic radius");
    std::vector<double> out;
    for (int level = 0; out.size() < count && level < 40; ++level) {
        const double step = std::ldexp(1.0, -level);
        if (level == 0) {
            out.push_back(0.0);
        }
        // Positive odd multiples of step (all positive integers at level 0).
        for (long j = 1; out.size() < count; j += (level == 0 ? 1 : 2)) {
            const double q = static_cast<double>(j) * step;
            if (q >= radius) break;
            out.push_back(q);
            if (out.size() < count) out.push_back(-q);
        }
    }
    out.resize(std::min(out.size(), count));
    if (out.size() < count) throw ConfigError("not enough dyadic rationals inside the radius");
    return out;
}

}  // namespace kernels

std::pair<double, double> gram_eigenvalue_range(const Kernel& k, const std::vector<std::vector<double>>& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) g(i, j) = g(j, i) = k.eval(points[i], points[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(n - 1)};
}

}  // namespace gpsobolev
