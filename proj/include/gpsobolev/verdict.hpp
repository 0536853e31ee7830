#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpsobolev/finitediff.hpp"
#include "gpsobolev/grid.hpp"
#include "gpsobolev/kernels.hpp"
#include "gpsobolev/sampler.hpp"
#include "gpsobolev/spectral.hpp"

namespace gpsobolev {

inline constexpr const char* kReportSchema = "gp-sobolev-report/1";
inline constexpr const char* kIdentitySchema = "gp-sobolev-identities/1";

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

struct AnalysisConfig {
    std::optional<Box> domain;          ///< kernel domain or the unit box when empty
    QuadratureRule rule = QuadratureRule::midpoint;
    std::optional<std::size_t> base_n;  ///< 128 (d=1), 32 (d=2), 12 (d=3)
    int levels = 3;                     ///< ladder base_n * 2^j, j < levels
    std::optional<double> margin;       ///< max(2, m) spacings of the coarsest grid
    std::uint64_t seed = 42;
    std::size_t n_paths = 10000;
    bool monte_carlo = true;
    TruncationPolicy mc_truncation{1.0 - 1e-9, 1u << 20};
    std::size_t spectral_node_cap = 2048;
    RefinementThresholds thresholds;
    double stabilization_tolerance = 0.005;
    DerivativeSource source;

    bool operator==(const AnalysisConfig&) const = default;

    Box resolved_domain(const Kernel& k) const;
    std::size_t resolved_base_n(std::size_t dim) const;
    std::vector<std::size_t> ladder(std::size_t dim) const;
    double resolved_margin(const Box& box, std::size_t dim, int m) const;
};

/// FD-source and analytic-source traces of one alpha on the same interior.
struct SourceReconciliation {
    double analytic = 0.0;
    double finite_difference = 0.0;
    double relative_difference = 0.0;
    bool operator==(const SourceReconciliation&) const = default;
};

struct AlphaRecord {
    MultiIndex alpha;
    std::string derivative_source;
    std::string region;                   ///< "full" | "interior"
    std::optional<TraceEstimate> trace;
    std::vector<double> sigma_p_series;   ///< int sigma_alpha^p per ladder grid
    std::optional<double> sigma_alpha_lp; ///< finest ladder value
    bool sigma_stabilized = false;
    double sigma_relative_change = 0.0;
    Classification classification = Classification::inconclusive;
    std::optional<SourceReconciliation> reconciliation;
    std::optional<std::string> error;
    bool operator==(const AlphaRecord&) const = default;
};

struct McCrosscheck {
    std::size_t grid_n = 0;
    std::size_t truncation = 0;
    double discarded_mass = 0.0;
    std::vector<double> sigma_p_interior;  ///< per alpha, source as in the records
    double predicted = 0.0;                ///< C_p sum_alpha ||sigma_alpha||_p^p on the interior
    double predicted_discrete = 0.0;       ///< same under the truncated discrete law
    MomentEstimate empirical;
    double z_score = 0.0;
    double z_score_discrete = 0.0;
    bool agree = false;                    ///< |z_score_discrete| <= 3
    bool operator==(const McCrosscheck&) const = default;
};

struct Provenance {
    std::vector<std::size_t> ladder;
    std::string rule;
    double margin = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    double mc_mass_fraction = 0.0;
    std::size_t spectral_node_cap = 0;
    double psd_tolerance = kPsdTolerance;
    double diverge_factor = 4.0;
    double bound_factor = 1.5;
    double stabilization_tolerance = 0.005;
    double mc_z_threshold = 3.0;
    std::vector<std::string> notes;
    bool operator==(const Provenance&) const = default;
};

struct RegularityReport {
    std::string schema = kReportSchema;
    std::string kernel;
    std::map<std::string, double> kernel_params;
    std::size_t dimension = 1;
    int m = 0;
    double p = 2.0;
    Box domain;
    std::vector<AlphaRecord> alphas;
    std::optional<McCrosscheck> mc_crosscheck;
    std::optional<std::string> mc_skipped;
    std::optional<NuclearReport> nuclear_report;
    std::optional<std::string> nuclear_skipped;
    Verdict overall = Verdict::inconclusive;
    Provenance provenance;
    bool operator==(const RegularityReport&) const = default;
};

/// Decides W^{m,p} sample-path regularity numerically. Per-alpha failures
/// are recorded in the report; a failure at alpha = 0 is rethrown.
RegularityReport analyze(const Kernel& k, int m, double p, const AnalysisConfig& config = {});

struct IdentityRow {
    MultiIndex alpha;
    std::string derivative_source;
    double diagonal = 0.0;           ///< over the imbedding region
    double diagonal_interior = 0.0;
    double spectral_interior = 0.0;
    double mercer_interior = 0.0;
    std::size_t mercer_modes = 0;
    double spectral_relative = 0.0;  ///< vs diagonal_interior
    double mercer_relative = 0.0;    ///< vs diagonal_interior
    bool operator==(const IdentityRow&) const = default;
};

struct IdentityReport {
    std::string schema = kIdentitySchema;
    std::string kernel;
    int m = 0;
    std::size_t grid_n = 0;
    Box domain;
    double margin = 0.0;
    std::string imbedding_region;  ///< "full" unless some alpha needs finite differences
    std::vector<IdentityRow> rows;
    double sum_of_traces = 0.0;
    double imbedding_trace = 0.0;
    double imbedding_relative = 0.0;
    double mercer_discarded_mass = 0.0;
    double mercer_mass_fraction = 0.0;
    bool operator==(const IdentityReport&) const = default;
};

/// Diagonal, spectral and differentiated-Mercer traces per alpha and their sum
/// against the RKHS imbedding trace. Requires a PASS at (m, 2).
IdentityReport verify_identities(const Kernel& k, int m, const AnalysisConfig& config = {},
                                 const TruncationPolicy& mercer_truncation = {});

}  // namespace gpsobolev
