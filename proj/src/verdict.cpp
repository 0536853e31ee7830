#include "gpsobolev/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpsobolev/errors.hpp"

namespace gpsobolev {

namespace {

double relative(double value, double reference) {
    const double diff = std::abs(value - reference);
    if (diff == 0.0) return 0.0;
    return diff / std::max(std::abs(reference), std::numeric_limits<double>::min());
}

double weighted_sum(const Grid& g, const std::vector<double>& diag, Region region) {
    double s = 0.0;
    for (std::size_t i : g.nodes_in(region)) s += g.weight(i) * diag[i];
    return s;
}

double sigma_power_sum(const Kernel& k, const MultiIndex& alpha, const Grid& g, const std::vector<double>& diag,
                       double p, Region region) {
    double s = 0.0;
    for (std::size_t i : g.nodes_in(region)) {
        const double sigma = checked_sqrt_diagonal(diag[i], diag[i], k.name() + " sigma" + alpha.to_string());
        s += g.weight(i) * (p == 2.0 ? sigma * sigma : std::pow(sigma, p));
    }
    return s;
}

const char* region_name(Region r) { return r == Region::full ? "full" : "interior"; }

// Finest ladder grid within the node budget (the coarsest one otherwise).
std::size_t spectral_level(const std::vector<GridPtr>& grids, std::size_t cap) {
    std::size_t level = 0;
    for (std::size_t j = 0; j < grids.size(); ++j)
        if (grids[j]->size() <= cap) level = j;
    return level;
}

void check_common(const Kernel& k, int m, const Box& box) {
    if (m < 0) throw ConfigError("m must be non-negative");
    if (box.dim() != k.dim()) throw ConfigError("domain dimension does not match the kernel");
    if (k.dim() < 1 || k.dim() > kMaxDimension) throw ConfigError("dimension must be 1, 2 or 3");
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        case Verdict::inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

Verdict parse_verdict(const std::string& s) {
    if (s == "PASS") return Verdict::pass;
    if (s == "FAIL") return Verdict::fail;
    if (s == "INCONCLUSIVE") return Verdict::inconclusive;
    throw ConfigError("unknown verdict '" + s + "'");
}

Box AnalysisConfig::resolved_domain(const Kernel& k) const {
    if (domain) return *domain;
    if (k.domain()) return *k.domain();
    return Box::unit(k.dim());
}

std::size_t AnalysisConfig::resolved_base_n(std::size_t dim) const {
    if (base_n) return *base_n;
    switch (dim) {
        case 1: return 128;
        case 2: return 32;
        default: return 12;
    }
}

std::vector<std::size_t> AnalysisConfig::ladder(std::size_t dim) const {
    if (levels < 1 || levels > 8) throw ConfigError("grid levels must lie in [1, 8]");
    std::vector<std::size_t> ns;
    std::size_t n = resolved_base_n(dim);
    for (int j = 0; j < levels; ++j, n *= 2) ns.push_back(n);
    return ns;
}

double AnalysisConfig::resolved_margin(const Box& box, std::size_t dim, int m) const {
    if (margin) return *margin;
    double h = 0.0;
    for (std::size_t a = 0; a < dim; ++a) h = std::max(h, box.edge(a) / static_cast<double>(resolved_base_n(dim)));
    return std::max(2, m) * h;
}

RegularityReport analyze(const Kernel& k, int m, double p, const AnalysisConfig& config) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("p must be finite and >= 1");
    const Box box = config.resolved_domain(k);
    check_common(k, m, box);
    const std::size_t d = k.dim();
    const auto ns = config.ladder(d);
    const double margin = config.resolved_margin(box, d, m);
    std::vector<GridPtr> grids;
    for (std::size_t n : ns) grids.push_back(build_grid(box, n, config.rule, margin));
    const std::size_t spec_level = spectral_level(grids, config.spectral_node_cap);
    const bool spectral_fits = grids[spec_level]->size() <= config.spectral_node_cap;

    RegularityReport rep;
    rep.kernel = k.name();
    rep.kernel_params = k.params();
    rep.dimension = d;
    rep.m = m;
    rep.p = p;
    rep.domain = box;

    for (const auto& alpha : enumerate_multi_indices(d, m)) {
        AlphaRecord rec;
        rec.alpha = alpha;
        try {
            const DerivativeSource src = config.source.resolve(k, alpha);
            const bool analytic = src.kind != DerivativeSource::Kind::finite_difference || alpha.is_zero();
            const Region region = analytic ? Region::full : Region::interior;
            rec.derivative_source = analytic ? "analytic" : "finite_difference";
            rec.region = region_name(region);

            TraceEstimate te;
            te.alpha = alpha;
            te.source = rec.derivative_source;
            for (const auto& g : grids) {
                const auto diag = diagonal_values(k, alpha, *g, src, region);
                te.refinement_series.push_back(weighted_sum(*g, diag, region));
                rec.sigma_p_series.push_back(sigma_power_sum(k, alpha, *g, diag, p, region));
            }
            te.diagonal_value = te.refinement_series.back();
            te.classification = classify_refinement(te.refinement_series, config.thresholds);
            rec.sigma_alpha_lp = rec.sigma_p_series.back();
            rec.classification =
                p == 2.0 ? te.classification : classify_refinement(rec.sigma_p_series, config.thresholds);
            if (rec.sigma_p_series.size() >= 2) {
                const double prev = rec.sigma_p_series[rec.sigma_p_series.size() - 2];
                rec.sigma_relative_change = relative(rec.sigma_p_series.back(), prev);
                rec.sigma_stabilized = rec.sigma_relative_change < config.stabilization_tolerance;
            }

            if (p == 2.0 && spectral_fits) {
                NystromOptions opts;
                opts.source = src;
                opts.region = region;
                opts.truncation = {1.0, std::numeric_limits<std::size_t>::max()};
                opts.eigenfunctions = false;
                const auto dec = nystrom_decompose(k, alpha, grids[spec_level], opts);
                double sum = 0.0;
                for (double l : dec.eigenvalues) sum += l;
                te.spectral_value = sum;
                te.spectral_grid_n = ns[spec_level];
                te.spectral_check_diagonal = dec.matrix_trace;
            }
            rec.trace = te;

            if (analytic && !alpha.is_zero()) {
                const Grid& fine = *grids.back();
                SourceReconciliation r;
                r.analytic = trace_diagonal(k, alpha, fine, DerivativeSource::analytic(), Region::interior);
                r.finite_difference = trace_diagonal(
                    k, alpha, fine, DerivativeSource::finite_difference(config.source.step_multiple), Region::interior);
                r.relative_difference = relative(r.finite_difference, r.analytic);
                rec.reconciliation = r;
            }
        } catch (const Error& e) {
            if (alpha.is_zero()) throw;
            rec.error = e.what();
            rec.classification = Classification::inconclusive;
        }
        rep.alphas.push_back(std::move(rec));
    }

    const bool any_error =
        std::any_of(rep.alphas.begin(), rep.alphas.end(), [](const AlphaRecord& r) { return r.error.has_value(); });
    if (!config.monte_carlo) {
        rep.mc_skipped = "disabled by configuration";
    } else if (m >= 1 && !grids.front()->uniform()) {
        rep.mc_skipped = "finite differences of sampled paths need a midpoint grid";
    } else if (any_error) {
        rep.mc_skipped = "not every alpha could be evaluated";
    } else {
        try {
            const GridPtr& g = grids.front();
            NystromOptions opts;
            opts.truncation = config.mc_truncation;
            const auto dec = nystrom_decompose(k, MultiIndex::zero(d), g, opts);
            const auto batch = sample_paths(dec, config.n_paths, config.seed, dec.truncation);
            McCrosscheck mc;
            mc.grid_n = ns.front();
            mc.truncation = dec.truncation;
            mc.discarded_mass = dec.discarded_mass;
            mc.empirical = empirical_sobolev_moment(batch, m, p);
            const double cp = c_p(p);
            const auto interior = g->nodes_in(Region::interior);
            for (const auto& alpha : enumerate_multi_indices(d, m)) {
                const auto src = config.source.resolve(k, alpha);
                const auto diag = diagonal_values(k, alpha, *g, src, Region::interior);
                const double s = sigma_power_sum(k, alpha, *g, diag, p, Region::interior);
                mc.sigma_p_interior.push_back(s);
                mc.predicted += cp * s;

                std::vector<double> var(g->size(), 0.0);
                for (std::size_t n = 0; n < dec.truncation; ++n) {
                    const auto& phi = dec.eigenfunctions[n];
                    const GridFunction dphi = alpha.is_zero() ? phi : apply_delta_alpha(phi, alpha);
                    for (std::size_t i : interior) var[i] += dec.eigenvalues[n] * dphi[i] * dphi[i];
                }
                double sd = 0.0;
                for (std::size_t i : interior) sd += g->weight(i) * std::pow(var[i], 0.5 * p);
                mc.predicted_discrete += cp * sd;
            }
            auto z = [&](double target) {
                const double diff = mc.empirical.mean - target;
                if (mc.empirical.std_error > 0.0) return diff / mc.empirical.std_error;
                return std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(target)) ? 0.0 : std::copysign(1e300, diff);
            };
            mc.z_score = z(mc.predicted);
            mc.z_score_discrete = z(mc.predicted_discrete);
            mc.agree = std::abs(mc.z_score_discrete) <= 3.0;
            rep.mc_crosscheck = mc;
        } catch (const Error& e) {
            rep.mc_skipped = e.what();
        }
    }

    if (p > 1.0) {
        try {
            rep.nuclear_report = nuclear_bound_report(k, p, grids.front());
        } catch (const Error& e) {
            rep.nuclear_skipped = e.what();
        }
    } else {
        rep.nuclear_skipped = "nuclear bounds need p > 1";
    }

    const bool any_divergent = std::any_of(rep.alphas.begin(), rep.alphas.end(), [](const AlphaRecord& r) {
        return r.classification == Classification::divergent;
    });
    const bool all_good = std::all_of(rep.alphas.begin(), rep.alphas.end(), [](const AlphaRecord& r) {
        return !r.error && r.classification == Classification::convergent && r.sigma_stabilized;
    });
    rep.overall = any_divergent ? Verdict::fail : all_good ? Verdict::pass : Verdict::inconclusive;

    auto& pv = rep.provenance;
    pv.ladder = ns;
    pv.rule = to_string(config.rule);
    pv.margin = margin;
    pv.seed = config.seed;
    pv.n_paths = config.n_paths;
    pv.mc_mass_fraction = config.mc_truncation.mass_fraction;
    pv.spectral_node_cap = config.spectral_node_cap;
    pv.diverge_factor = config.thresholds.diverge_factor;
    pv.bound_factor = config.thresholds.bound_factor;
    pv.stabilization_tolerance = config.stabilization_tolerance;
    pv.notes = {
        "numerical evidence, not proof: classification samples a finite refinement ladder",
        "assumes a measurable process with sigma in L^1_loc, which holds for continuous kernels",
        "the Monte Carlo cross-check is advisory and never changes the verdict",
    };
    if (k.name() == "hat_series") {
        pv.notes.push_back("hat series truncated to the listed centers; the omitted tail adds at most "
                           "(sum of omitted weights) * 8/3 to the m = 1 trace");
    }
    return rep;
}

IdentityReport verify_identities(const Kernel& k, int m, const AnalysisConfig& config,
                                 const TruncationPolicy& mercer_truncation) {
    AnalysisConfig cfg = config;
    cfg.monte_carlo = false;
    const auto pre = analyze(k, m, 2.0, cfg);
    if (pre.overall != Verdict::pass) {
        throw PreconditionError("identities need a PASS at (m=" + std::to_string(m) + ", p=2); analysis gave " +
                                to_string(pre.overall));
    }
    const Box box = cfg.resolved_domain(k);
    const std::size_t d = k.dim();
    const auto ns = cfg.ladder(d);
    const double margin = cfg.resolved_margin(box, d, m);
    std::vector<GridPtr> grids;
    for (std::size_t n : ns) grids.push_back(build_grid(box, n, cfg.rule, margin));
    const std::size_t level = spectral_level(grids, cfg.spectral_node_cap);
    const GridPtr& g = grids[level];

    IdentityReport rep;
    rep.kernel = k.name();
    rep.m = m;
    rep.grid_n = ns[level];
    rep.domain = box;
    rep.margin = margin;

    const auto alphas = enumerate_multi_indices(d, m);
    bool all_analytic = true;
    for (const auto& a : alphas)
        all_analytic = all_analytic && (a.is_zero() || cfg.source.resolve(k, a).kind != DerivativeSource::Kind::finite_difference);
    const Region imbed_region = all_analytic ? Region::full : Region::interior;
    rep.imbedding_region = region_name(imbed_region);

    NystromOptions mercer_opts;
    mercer_opts.truncation = mercer_truncation;
    const auto dec0 = nystrom_decompose(k, MultiIndex::zero(d), g, mercer_opts);
    rep.mercer_discarded_mass = dec0.discarded_mass;
    rep.mercer_mass_fraction = mercer_truncation.mass_fraction;

    for (const auto& alpha : alphas) {
        IdentityRow row;
        row.alpha = alpha;
        const auto src = cfg.source.resolve(k, alpha);
        row.derivative_source =
            src.kind == DerivativeSource::Kind::finite_difference && !alpha.is_zero() ? "finite_difference" : "analytic";
        row.diagonal = trace_diagonal(k, alpha, *g, src, imbed_region);
        row.diagonal_interior = trace_diagonal(k, alpha, *g, src, Region::interior);

        NystromOptions opts;
        opts.source = src;
        opts.region = Region::interior;
        opts.truncation = {1.0, std::numeric_limits<std::size_t>::max()};
        opts.eigenfunctions = false;
        const auto dec = nystrom_decompose(k, alpha, g, opts);
        for (double l : dec.eigenvalues) row.spectral_interior += l;

        // The alpha = 0 route integrates over the interior as well.
        double mercer = 0.0;
        for (std::size_t n = 0; n < dec0.truncation; ++n) {
            const auto& phi = dec0.eigenfunctions[n];
            const GridFunction dphi = alpha.is_zero() ? phi : apply_delta_alpha(phi, alpha);
            mercer += dec0.eigenvalues[n] * lp_norm_pow(dphi, 2.0, Region::interior);
        }
        row.mercer_interior = mercer;
        row.mercer_modes = dec0.truncation;
        row.spectral_relative = relative(row.spectral_interior, row.diagonal_interior);
        row.mercer_relative = relative(row.mercer_interior, row.diagonal_interior);
        rep.sum_of_traces += row.diagonal;
        rep.rows.push_back(std::move(row));
    }
    rep.imbedding_trace = rkhs_imbedding_trace(k, m, *g, cfg.source, imbed_region).total;
    rep.imbedding_relative = relative(rep.imbedding_trace, rep.sum_of_traces);
    return rep;
}

}  // namespace gpsobolev
