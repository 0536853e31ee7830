#include "gpsobolev/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "gpsobolev/errors.hpp"
#include "gpsobolev/parallel.hpp"
#include "gpsobolev/sampler.hpp"

namespace gpsobolev {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> grid_steps(const Grid& g, int multiple) {
    std::vector<double> h(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) h[a] = multiple * g.spacing(a);
    return h;
}

// Forward stencils must stay inside the analysis box.
void check_stencil_room(const Grid& g, const MultiIndex& alpha, std::span<const double> h,
                        std::span<const std::size_t> nodes) {
    for (std::size_t i : nodes) {
        const auto x = g.node(i);
        for (std::size_t a = 0; a < g.dim(); ++a) {
            const double reach = x[a] + alpha[a] * h[a];
            if (reach > g.box().upper()[a] + 1e-12 * g.box().edge(a)) {
                throw MarginTooSmall("difference stencil " + alpha.to_string() +
                                     " leaves the box; use the interior region or a wider margin (margin " +
                                     std::to_string(g.margin()) + ")");
            }
        }
    }
}

template <class Fn>
auto with_alpha_context(const MultiIndex& alpha, Fn&& fn) -> decltype(fn()) {
    const std::string prefix = "alpha=" + alpha.to_string() + ": ";
    try {
        return fn();
    } catch (const UnsupportedDerivative& e) {
        throw UnsupportedDerivative(prefix + e.what());
    } catch (const MarginTooSmall& e) {
        throw MarginTooSmall(prefix + e.what());
    } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(prefix + e.what());
    } catch (const DomainError& e) {
        throw DomainError(prefix + e.what());
    }
}

}  // namespace

DerivativeSource DerivativeSource::resolve(const Kernel& k, const MultiIndex& alpha) const {
    if (step_multiple < 1) throw ConfigError("finite-difference step multiple must be positive");
    if (kind != Kind::automatic) return *this;
    return k.has_analytic(alpha) ? DerivativeSource{Kind::analytic, step_multiple}
                                 : DerivativeSource{Kind::finite_difference, step_multiple};
}

std::string to_string(DerivativeSource::Kind kind) {
    switch (kind) {
        case DerivativeSource::Kind::automatic: return "automatic";
        case DerivativeSource::Kind::analytic: return "analytic";
        case DerivativeSource::Kind::finite_difference: return "finite_difference";
    }
    return "automatic";
}

double kernel_entry(const Kernel& k, const MultiIndex& alpha, DerivativeSource source, std::span<const double> h,
                    PointView x, PointView y) {
    if (source.kind == DerivativeSource::Kind::finite_difference && !alpha.is_zero()) {
        return fd_cross_derivative(k, alpha, h, x, y);
    }
    return k.cross_derivative(alpha, alpha, x, y);
}

std::vector<double> diagonal_values(const Kernel& k, const MultiIndex& alpha, const Grid& grid,
                                    DerivativeSource source, Region region) {
    if (k.dim() != grid.dim()) throw ConfigError("kernel and grid dimensions differ");
    source = source.resolve(k, alpha);
    const auto h = grid_steps(grid, source.step_multiple);
    const auto nodes = grid.nodes_in(region);
    if (source.kind == DerivativeSource::Kind::finite_difference) check_stencil_room(grid, alpha, h, nodes);
    std::vector<double> diag(grid.size(), kNaN);
    parallel_for(0, nodes.size(), [&](std::size_t t) {
        const auto x = grid.node(nodes[t]);
        diag[nodes[t]] = kernel_entry(k, alpha, source, h, x, x);
    });
    return diag;
}

double trace_diagonal(const Kernel& k, const MultiIndex& alpha, const Grid& grid, DerivativeSource source,
                      Region region) {
    const auto diag = diagonal_values(k, alpha, grid, source, region);
    double s = 0.0;
    for (std::size_t i : grid.nodes_in(region)) s += grid.weight(i) * diag[i];
    return s;
}

double sigma_power_integral(const Kernel& k, const MultiIndex& alpha, const Grid& grid, DerivativeSource source,
                            double p, Region region) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("exponent must be positive and finite");
    const auto diag = diagonal_values(k, alpha, grid, source, region);
    double s = 0.0;
    for (std::size_t i : grid.nodes_in(region)) {
        const double sigma = checked_sqrt_diagonal(diag[i], diag[i], k.name() + " sigma" + alpha.to_string());
        s += grid.weight(i) * (p == 2.0 ? sigma * sigma : std::pow(sigma, p));
    }
    return s;
}

std::size_t truncation_for(std::span<const double> eigenvalues, double total, const TruncationPolicy& policy) {
    if (!(policy.mass_fraction > 0.0) || policy.mass_fraction > 1.0) {
        throw ConfigError("truncation mass fraction must lie in (0, 1]");
    }
    if (total <= 0.0) return 0;
    const double target = policy.mass_fraction * total;
    double cum = 0.0;
    std::size_t n = 0;
    std::size_t positive = 0;
    for (double l : eigenvalues) positive += l > 0.0 ? 1 : 0;
    while (n < eigenvalues.size() && cum < target) cum += eigenvalues[n++];
    if (cum < target) n = positive;  // rounding kept the target out of reach
    return std::min({n, policy.max_modes, positive});
}

SpectralDecomposition nystrom_decompose(const Kernel& k, const MultiIndex& alpha, const GridPtr& grid,
                                        const NystromOptions& options) {
    if (k.dim() != grid->dim()) throw ConfigError("kernel and grid dimensions differ");
    const Grid& g = *grid;
    SpectralDecomposition dec;
    dec.alpha = alpha;
    dec.grid = grid;
    dec.region = options.region;
    dec.source = options.source.resolve(k, alpha);
    const auto nodes = g.nodes_in(options.region);
    dec.support.assign(nodes.begin(), nodes.end());
    const auto h = grid_steps(g, dec.source.step_multiple);
    if (dec.source.kind == DerivativeSource::Kind::finite_difference) check_stencil_room(g, alpha, h, nodes);

    const auto n = static_cast<Eigen::Index>(dec.support.size());
    Eigen::MatrixXd m(n, n);
    std::vector<double> sqrt_w(dec.support.size());
    for (std::size_t i = 0; i < sqrt_w.size(); ++i) sqrt_w[i] = std::sqrt(g.weight(dec.support[i]));
    parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t i) {
        const auto xi = g.node(dec.support[i]);
        for (std::size_t j = 0; j <= i; ++j) {
            const auto xj = g.node(dec.support[j]);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                sqrt_w[i] * kernel_entry(k, alpha, dec.source, h, xi, xj) * sqrt_w[j];
        }
    });
    m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    dec.matrix_trace = m.trace();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        m, options.eigenfunctions ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");

    const auto& ev = es.eigenvalues();
    dec.eigenvalues.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) dec.eigenvalues[static_cast<std::size_t>(i)] = ev(n - 1 - i);
    if (n > 0) {
        dec.min_raw_eigenvalue = ev(0);
        const double scale = std::max(ev(n - 1), m.diagonal().cwiseAbs().maxCoeff());
        if (ev(0) < -kPsdTolerance * scale) {
            throw NotPositiveDefinite(k.name() + ": Nystrom matrix for alpha=" + alpha.to_string() +
                                      " has eigenvalue " + std::to_string(ev(0)) + " below -tol * " +
                                      std::to_string(scale));
        }
    }
    for (double& l : dec.eigenvalues) l = std::max(l, 0.0);

    dec.truncation = truncation_for(dec.eigenvalues, dec.matrix_trace, options.truncation);
    double retained = 0.0;
    for (std::size_t i = 0; i < dec.truncation; ++i) retained += dec.eigenvalues[i];
    dec.discarded_mass = dec.matrix_trace - retained;

    if (options.eigenfunctions) {
        const auto& vecs = es.eigenvectors();
        for (std::size_t mode = 0; mode < dec.truncation; ++mode) {
            const Eigen::Index col = n - 1 - static_cast<Eigen::Index>(mode);
            Eigen::VectorXd v = vecs.col(col);
            const double vmax = v.cwiseAbs().maxCoeff();
            for (Eigen::Index i = 0; i < n; ++i) {
                if (std::abs(v(i)) > 1e-10 * vmax) {
                    if (v(i) < 0.0) v = -v;
                    break;
                }
            }
            std::vector<double> phi(g.size(), 0.0);
            for (Eigen::Index i = 0; i < n; ++i) {
                phi[dec.support[static_cast<std::size_t>(i)]] = v(i) / sqrt_w[static_cast<std::size_t>(i)];
            }
            dec.eigenfunctions.emplace_back(grid, std::move(phi));
        }
    }
    return dec;
}

MercerTrace differentiated_mercer_trace(const SpectralDecomposition& dec, const MultiIndex& alpha,
                                        std::optional<std::size_t> modes) {
    if (!dec.alpha.is_zero()) throw ConfigError("differentiated Mercer trace needs an alpha = 0 decomposition");
    const std::size_t n = std::min(modes.value_or(dec.truncation), dec.truncation);
    if (n > dec.eigenfunctions.size()) throw ConfigError("decomposition was computed without eigenfunctions");
    MercerTrace out;
    out.modes = n;
    double retained = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        retained += dec.eigenvalues[i];
        if (alpha.is_zero()) {
            out.value += dec.eigenvalues[i] * lp_norm_pow(dec.eigenfunctions[i], 2.0, dec.region);
        } else {
            const auto d = apply_delta_alpha(dec.eigenfunctions[i], alpha);
            out.value += dec.eigenvalues[i] * lp_norm_pow(d, 2.0, Region::interior);
        }
    }
    out.discarded_mass = dec.matrix_trace - retained;
    return out;
}

ImbeddingTrace rkhs_imbedding_trace(const Kernel& k, int m, const Grid& grid, DerivativeSource source,
                                    Region region) {
    ImbeddingTrace out;
    for (const auto& alpha : enumerate_multi_indices(grid.dim(), m)) {
        const double t = with_alpha_context(alpha, [&] { return trace_diagonal(k, alpha, grid, source, region); });
        out.per_alpha.emplace_back(alpha, t);
        out.total += t;
    }
    return out;
}

bool NuclearReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const NuclearCheck& c) { return c.passed; });
}

NuclearReport nuclear_bound_report(const Kernel& k, double p, const GridPtr& grid) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("nuclear bounds need 1 < p < inf");
    const Grid& g = *grid;
    const auto zero = MultiIndex::zero(g.dim());
    NystromOptions opts;
    opts.source = DerivativeSource::analytic();
    opts.truncation = {1.0, g.size()};
    const auto dec = nystrom_decompose(k, zero, grid, opts);

    NuclearReport r;
    r.p = p;
    r.c_p_factor = std::pow(c_p(p), -2.0 / p);

    const std::size_t size = g.size();
    std::vector<double> sigma(size);
    double sigma_p = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double v = k.eval(g.node(i), g.node(i));
        sigma[i] = checked_sqrt_diagonal(v, v, k.name() + " sigma");
        sigma_p += g.weight(i) * std::pow(sigma[i], p);
    }
    r.sigma_p_sq = std::pow(sigma_p, 2.0 / p);

    for (std::size_t n = 0; n < dec.truncation; ++n) {
        r.trace += dec.eigenvalues[n];
        r.nu_upper += dec.eigenvalues[n] * std::pow(lp_norm(dec.eigenfunctions[n], p), 2.0);
    }

    // Lower estimate of ||E_k||_{q->p}: ratios ||E f||_p / ||f||_q over the
    // leading eigenfunctions, the constant, and a p-norm power iteration.
    const auto n = static_cast<Eigen::Index>(size);
    Eigen::MatrixXd kw(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = k.eval(g.node(static_cast<std::size_t>(i)), g.node(static_cast<std::size_t>(j)));
            kw(i, j) = v;
            kw(j, i) = v;
        }
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = g.weight(static_cast<std::size_t>(i));
    const double q = p / (p - 1.0);
    auto norm = [&](const Eigen::VectorXd& f, double e) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += w(i) * std::pow(std::abs(f(i)), e);
        return std::pow(s, 1.0 / e);
    };
    auto apply = [&](const Eigen::VectorXd& f) -> Eigen::VectorXd { return kw * w.cwiseProduct(f); };
    auto ratio = [&](const Eigen::VectorXd& f) {
        const double fq = norm(f, q);
        return fq > 0.0 ? norm(apply(f), p) / fq : 0.0;
    };
    std::vector<Eigen::VectorXd> starts;
    for (std::size_t mode = 0; mode < std::min<std::size_t>(5, dec.truncation); ++mode) {
        starts.push_back(Eigen::Map<const Eigen::VectorXd>(dec.eigenfunctions[mode].values().data(), n));
    }
    starts.push_back(Eigen::VectorXd::Ones(n));
    for (const auto& s : starts) r.opnorm_lower = std::max(r.opnorm_lower, ratio(s));
    if (!starts.empty()) {
        Eigen::VectorXd f = starts.front();
        for (int it = 0; it < 30; ++it) {
            const Eigen::VectorXd gvec = apply(f);
            for (Eigen::Index i = 0; i < n; ++i) f(i) = std::copysign(std::pow(std::abs(gvec(i)), p - 1.0), gvec(i));
            const double fn = norm(f, q);
            if (!(fn > 0.0)) break;
            f /= fn;
            r.opnorm_lower = std::max(r.opnorm_lower, ratio(f));
        }
    }

    constexpr double rounding = 1e-10;
    auto add = [&](std::string name, double lhs, double rhs) {
        r.checks.push_back({std::move(name), lhs, rhs, lhs <= rhs * (1.0 + rounding) + rounding * 1e-300});
    };
    if (p >= 2.0) {
        add("sigma_p_sq <= nu_upper", r.sigma_p_sq, r.nu_upper);
        add("c_p_factor * opnorm_lower <= sigma_p_sq", r.c_p_factor * r.opnorm_lower, r.sigma_p_sq);
    }
    if (p == 2.0) {
        const double rel = std::abs(r.sigma_p_sq - r.trace) / std::max(r.trace, std::numeric_limits<double>::min());
        r.checks.push_back({"|sigma_2_sq - trace| / trace <= 1e-3", rel, 1e-3, r.trace == 0.0 ? r.sigma_p_sq == 0.0 : rel <= 1e-3});
    }
    if (p <= 2.0) {
        // E_k = A E_{k0} A* with A f = f sigma^{1-p/2}, ||A||^2 <= ||sigma||_p^{2-p},
        // k0(x, y) = k(x, y) sigma(x)^{p/2-1} sigma(y)^{p/2-1}.
        std::vector<std::size_t> live;
        for (std::size_t i = 0; i < size; ++i)
            if (sigma[i] > 0.0) live.push_back(i);
        const auto nl = static_cast<Eigen::Index>(live.size());
        Eigen::MatrixXd k0(nl, nl);
        for (Eigen::Index i = 0; i < nl; ++i)
            for (Eigen::Index j = 0; j < nl; ++j) {
                const std::size_t a = live[static_cast<std::size_t>(i)], b = live[static_cast<std::size_t>(j)];
                k0(i, j) = std::sqrt(w(static_cast<Eigen::Index>(a)) * w(static_cast<Eigen::Index>(b))) *
                           kw(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                           std::pow(sigma[a], p / 2.0 - 1.0) * std::pow(sigma[b], p / 2.0 - 1.0);
            }
        double nu_s = 0.0;
        if (nl > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k0, Eigen::EigenvaluesOnly);
            for (Eigen::Index i = 0; i < nl; ++i) nu_s += std::max(es.eigenvalues()(i), 0.0);
        }
        const double a_norm_sq = std::pow(std::sqrt(std::max(sigma_p, 0.0) == 0.0 ? 0.0 : r.sigma_p_sq), 2.0 - p);
        r.factorized_bound = a_norm_sq * nu_s;
        add("sigma_p_sq <= c_p_factor * factorized_bound", r.sigma_p_sq, r.c_p_factor * *r.factorized_bound);
        add("opnorm_lower <= factorized_bound", r.opnorm_lower, *r.factorized_bound);
    }
    return r;
}

}  // namespace gpsobolev
