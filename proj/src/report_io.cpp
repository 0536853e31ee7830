#include "gpsobolev/report_io.hpp"

#include <cmath>

#include "gpsobolev/errors.hpp"

namespace gpsobolev {

namespace {

double finite(double v, const char* key) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite value for '") + key + "'");
    return v;
}

template <class T>
void put_opt(Json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <class T>
std::optional<T> get_opt(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

Json doubles(const std::vector<double>& v, const char* key) {
    Json a = Json::array();
    for (double x : v) a.push_back(finite(x, key));
    return a;
}

Json to_json(const TraceEstimate& t) {
    Json j;
    j["alpha"] = t.alpha.to_string();
    j["source"] = t.source;
    j["diagonal_value"] = finite(t.diagonal_value, "diagonal_value");
    if (t.spectral_value) j["spectral_value"] = finite(*t.spectral_value, "spectral_value");
    put_opt(j, "spectral_grid_n", t.spectral_grid_n);
    if (t.spectral_check_diagonal) j["spectral_check_diagonal"] = finite(*t.spectral_check_diagonal, "spectral_check_diagonal");
    j["refinement_series"] = doubles(t.refinement_series, "refinement_series");
    j["classification"] = to_string(t.classification);
    return j;
}

TraceEstimate trace_from_json(const Json& j) {
    TraceEstimate t;
    t.alpha = MultiIndex::parse(j.at("alpha").get<std::string>());
    t.source = j.at("source").get<std::string>();
    t.diagonal_value = j.at("diagonal_value").get<double>();
    t.spectral_value = get_opt<double>(j, "spectral_value");
    t.spectral_grid_n = get_opt<std::size_t>(j, "spectral_grid_n");
    t.spectral_check_diagonal = get_opt<double>(j, "spectral_check_diagonal");
    t.refinement_series = j.at("refinement_series").get<std::vector<double>>();
    t.classification = parse_classification(j.at("classification").get<std::string>());
    return t;
}

Json to_json(const AlphaRecord& r) {
    Json j;
    j["alpha"] = r.alpha.to_string();
    j["derivative_source"] = r.derivative_source;
    j["region"] = r.region;
    if (r.trace) j["trace"] = to_json(*r.trace);
    j["sigma_p_series"] = doubles(r.sigma_p_series, "sigma_p_series");
    if (r.sigma_alpha_lp) j["sigma_alpha_lp"] = finite(*r.sigma_alpha_lp, "sigma_alpha_lp");
    j["sigma_stabilized"] = r.sigma_stabilized;
    j["sigma_relative_change"] = finite(r.sigma_relative_change, "sigma_relative_change");
    j["classification"] = to_string(r.classification);
    if (r.reconciliation) {
        j["reconciliation"] = {
            {"analytic", finite(r.reconciliation->analytic, "analytic")},
            {"finite_difference", finite(r.reconciliation->finite_difference, "finite_difference")},
            {"relative_difference", finite(r.reconciliation->relative_difference, "relative_difference")},
        };
    }
    put_opt(j, "error", r.error);
    return j;
}

AlphaRecord alpha_from_json(const Json& j) {
    AlphaRecord r;
    r.alpha = MultiIndex::parse(j.at("alpha").get<std::string>());
    r.derivative_source = j.at("derivative_source").get<std::string>();
    r.region = j.at("region").get<std::string>();
    if (j.contains("trace")) r.trace = trace_from_json(j.at("trace"));
    r.sigma_p_series = j.at("sigma_p_series").get<std::vector<double>>();
    r.sigma_alpha_lp = get_opt<double>(j, "sigma_alpha_lp");
    r.sigma_stabilized = j.at("sigma_stabilized").get<bool>();
    r.sigma_relative_change = j.at("sigma_relative_change").get<double>();
    r.classification = parse_classification(j.at("classification").get<std::string>());
    if (j.contains("reconciliation")) {
        const auto& c = j.at("reconciliation");
        r.reconciliation = SourceReconciliation{c.at("analytic").get<double>(), c.at("finite_difference").get<double>(),
                                                c.at("relative_difference").get<double>()};
    }
    r.error = get_opt<std::string>(j, "error");
    return r;
}

Json to_json(const MomentEstimate& e) {
    return {{"mean", finite(e.mean, "mean")},
            {"std_error", finite(e.std_error, "std_error")},
            {"n_paths", e.n_paths},
            {"p", finite(e.p, "p")},
            {"m", e.m}};
}

MomentEstimate moment_from_json(const Json& j) {
    MomentEstimate e;
    e.mean = j.at("mean").get<double>();
    e.std_error = j.at("std_error").get<double>();
    e.n_paths = j.at("n_paths").get<std::size_t>();
    e.p = j.at("p").get<double>();
    e.m = j.at("m").get<int>();
    return e;
}

Json to_json(const McCrosscheck& mc) {
    Json j;
    j["grid_n"] = mc.grid_n;
    j["truncation"] = mc.truncation;
    j["discarded_mass"] = finite(mc.discarded_mass, "discarded_mass");
    j["sigma_p_interior"] = doubles(mc.sigma_p_interior, "sigma_p_interior");
    j["predicted"] = finite(mc.predicted, "predicted");
    j["predicted_discrete"] = finite(mc.predicted_discrete, "predicted_discrete");
    j["empirical"] = to_json(mc.empirical);
    j["z_score"] = finite(mc.z_score, "z_score");
    j["z_score_discrete"] = finite(mc.z_score_discrete, "z_score_discrete");
    j["agree"] = mc.agree;
    return j;
}

McCrosscheck mc_from_json(const Json& j) {
    McCrosscheck mc;
    mc.grid_n = j.at("grid_n").get<std::size_t>();
    mc.truncation = j.at("truncation").get<std::size_t>();
    mc.discarded_mass = j.at("discarded_mass").get<double>();
    mc.sigma_p_interior = j.at("sigma_p_interior").get<std::vector<double>>();
    mc.predicted = j.at("predicted").get<double>();
    mc.predicted_discrete = j.at("predicted_discrete").get<double>();
    mc.empirical = moment_from_json(j.at("empirical"));
    mc.z_score = j.at("z_score").get<double>();
    mc.z_score_discrete = j.at("z_score_discrete").get<double>();
    mc.agree = j.at("agree").get<bool>();
    return mc;
}

Json to_json(const Provenance& p) {
    Json j;
    j["ladder"] = p.ladder;
    j["rule"] = p.rule;
    j["margin"] = finite(p.margin, "margin");
    j["seed"] = p.seed;
    j["n_paths"] = p.n_paths;
    j["mc_mass_fraction"] = p.mc_mass_fraction;
    j["spectral_node_cap"] = p.spectral_node_cap;
    j["psd_tolerance"] = p.psd_tolerance;
    j["diverge_factor"] = p.diverge_factor;
    j["bound_factor"] = p.bound_factor;
    j["stabilization_tolerance"] = p.stabilization_tolerance;
    j["mc_z_threshold"] = p.mc_z_threshold;
    j["notes"] = p.notes;
    return j;
}

Provenance provenance_from_json(const Json& j) {
    Provenance p;
    p.ladder = j.at("ladder").get<std::vector<std::size_t>>();
    p.rule = j.at("rule").get<std::string>();
    p.margin = j.at("margin").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.n_paths = j.at("n_paths").get<std::size_t>();
    p.mc_mass_fraction = j.at("mc_mass_fraction").get<double>();
    p.spectral_node_cap = j.at("spectral_node_cap").get<std::size_t>();
    p.psd_tolerance = j.at("psd_tolerance").get<double>();
    p.diverge_factor = j.at("diverge_factor").get<double>();
    p.bound_factor = j.at("bound_factor").get<double>();
    p.stabilization_tolerance = j.at("stabilization_tolerance").get<double>();
    p.mc_z_threshold = j.at("mc_z_threshold").get<double>();
    p.notes = j.at("notes").get<std::vector<std::string>>();
    return p;
}

}  // namespace

Json to_json(const Box& b) { return {{"lower", b.lower()}, {"upper", b.upper()}}; }

Box box_from_json(const Json& j) {
    return Box(j.at("lower").get<std::vector<double>>(), j.at("upper").get<std::vector<double>>());
}

Json to_json(const NuclearReport& r) {
    Json j;
    j["p"] = finite(r.p, "p");
    j["sigma_p_sq"] = finite(r.sigma_p_sq, "sigma_p_sq");
    j["nu_upper"] = finite(r.nu_upper, "nu_upper");
    j["opnorm_lower"] = finite(r.opnorm_lower, "opnorm_lower");
    j["c_p_factor"] = finite(r.c_p_factor, "c_p_factor");
    j["trace"] = finite(r.trace, "trace");
    if (r.factorized_bound) j["factorized_bound"] = finite(*r.factorized_bound, "factorized_bound");
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"lhs", finite(c.lhs, "lhs")}, {"rhs", finite(c.rhs, "rhs")},
                          {"passed", c.passed}});
    }
    j["checks"] = checks;
    return j;
}

NuclearReport nuclear_report_from_json(const Json& j) {
    NuclearReport r;
    r.p = j.at("p").get<double>();
    r.sigma_p_sq = j.at("sigma_p_sq").get<double>();
    r.nu_upper = j.at("nu_upper").get<double>();
    r.opnorm_lower = j.at("opnorm_lower").get<double>();
    r.c_p_factor = j.at("c_p_factor").get<double>();
    r.trace = j.at("trace").get<double>();
    r.factorized_bound = get_opt<double>(j, "factorized_bound");
    for (const auto& c : j.at("checks")) {
        r.checks.push_back({c.at("name").get<std::string>(), c.at("lhs").get<double>(), c.at("rhs").get<double>(),
                            c.at("passed").get<bool>()});
    }
    return r;
}

Json to_json(const RegularityReport& r) {
    Json j;
    j["schema"] = r.schema;
    j["kernel"] = {{"name", r.kernel}, {"params", r.kernel_params}, {"dimension", r.dimension}};
    j["m"] = r.m;
    j["p"] = finite(r.p, "p");
    j["domain"] = to_json(r.domain);
    j["overall"] = to_string(r.overall);
    Json alphas = Json::array();
    for (const auto& a : r.alphas) alphas.push_back(to_json(a));
    j["alphas"] = alphas;
    if (r.mc_crosscheck) j["mc_crosscheck"] = to_json(*r.mc_crosscheck);
    put_opt(j, "mc_skipped", r.mc_skipped);
    if (r.nuclear_report) j["nuclear_report"] = to_json(*r.nuclear_report);
    put_opt(j, "nuclear_skipped", r.nuclear_skipped);
    j["provenance"] = to_json(r.provenance);
    return j;
}

RegularityReport regularity_report_from_json(const Json& j) {
    RegularityReport r;
    r.schema = j.at("schema").get<std::string>();
    if (r.schema != kReportSchema) throw ConfigError("unsupported report schema '" + r.schema + "'");
    const auto& k = j.at("kernel");
    r.kernel = k.at("name").get<std::string>();
    r.kernel_params = k.at("params").get<std::map<std::string, double>>();
    r.dimension = k.at("dimension").get<std::size_t>();
    r.m = j.at("m").get<int>();
    r.p = j.at("p").get<double>();
    r.domain = box_from_json(j.at("domain"));
    r.overall = parse_verdict(j.at("overall").get<std::string>());
    for (const auto& a : j.at("alphas")) r.alphas.push_back(alpha_from_json(a));
    if (j.contains("mc_crosscheck")) r.mc_crosscheck = mc_from_json(j.at("mc_crosscheck"));
    r.mc_skipped = get_opt<std::string>(j, "mc_skipped");
    if (j.contains("nuclear_report")) r.nuclear_report = nuclear_report_from_json(j.at("nuclear_report"));
    r.nuclear_skipped = get_opt<std::string>(j, "nuclear_skipped");
    r.provenance = provenance_from_json(j.at("provenance"));
    return r;
}

Json to_json(const IdentityReport& r) {
    Json j;
    j["schema"] = r.schema;
    j["kernel"] = r.kernel;
    j["m"] = r.m;
    j["grid_n"] = r.grid_n;
    j["domain"] = to_json(r.domain);
    j["margin"] = finite(r.margin, "margin");
    j["imbedding_region"] = r.imbedding_region;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"alpha", row.alpha.to_string()},
                        {"derivative_source", row.derivative_source},
                        {"diagonal", finite(row.diagonal, "diagonal")},
                        {"diagonal_interior", finite(row.diagonal_interior, "diagonal_interior")},
                        {"spectral_interior", finite(row.spectral_interior, "spectral_interior")},
                        {"mercer_interior", finite(row.mercer_interior, "mercer_interior")},
                        {"mercer_modes", row.mercer_modes},
                        {"spectral_relative", finite(row.spectral_relative, "spectral_relative")},
                        {"mercer_relative", finite(row.mercer_relative, "mercer_relative")}});
    }
    j["rows"] = rows;
    j["sum_of_traces"] = finite(r.sum_of_traces, "sum_of_traces");
    j["imbedding_trace"] = finite(r.imbedding_trace, "imbedding_trace");
    j["imbedding_relative"] = finite(r.imbedding_relative, "imbedding_relative");
    j["mercer_discarded_mass"] = finite(r.mercer_discarded_mass, "mercer_discarded_mass");
    j["mercer_mass_fraction"] = finite(r.mercer_mass_fraction, "mercer_mass_fraction");
    return j;
}

IdentityReport identity_report_from_json(const Json& j) {
    IdentityReport r;
    r.schema = j.at("schema").get<std::string>();
    if (r.schema != kIdentitySchema) throw ConfigError("unsupported identity schema '" + r.schema + "'");
    r.kernel = j.at("kernel").get<std::string>();
    r.m = j.at("m").get<int>();
    r.grid_n = j.at("grid_n").get<std::size_t>();
    r.domain = box_from_json(j.at("domain"));
    r.margin = j.at("margin").get<double>();
    r.imbedding_region = j.at("imbedding_region").get<std::string>();
    for (const auto& row : j.at("rows")) {
        IdentityRow x;
        x.alpha = MultiIndex::parse(row.at("alpha").get<std::string>());
        x.derivative_source = row.at("derivative_source").get<std::string>();
        x.diagonal = row.at("diagonal").get<double>();
        x.diagonal_interior = row.at("diagonal_interior").get<double>();
        x.spectral_interior = row.at("spectral_interior").get<double>();
        x.mercer_interior = row.at("mercer_interior").get<double>();
        x.mercer_modes = row.at("mercer_modes").get<std::size_t>();
        x.spectral_relative = row.at("spectral_relative").get<double>();
        x.mercer_relative = row.at("mercer_relative").get<double>();
        r.rows.push_back(std::move(x));
    }
    r.sum_of_traces = j.at("sum_of_traces").get<double>();
    r.imbedding_trace = j.at("imbedding_trace").get<double>();
    r.imbedding_relative = j.at("imbedding_relative").get<double>();
    r.mercer_discarded_mass = j.at("mercer_discarded_mass").get<double>();
    r.mercer_mass_fraction = j.at("mercer_mass_fraction").get<double>();
    return r;
}

}  // namespace gpsobolev
