#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gpsobolev/errors.hpp"

namespace gpsobolev::cli {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.contains(it.key())) {
            throw ConfigError("unknown key '" + (where.empty() ? it.key() : where + "." + it.key()) + "'");
        }
    }
}

double number(const Json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
    return x;
}

std::int64_t integer(const Json& v, const std::string& key, std::int64_t lo, std::int64_t hi) {
    if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) {
        throw ConfigError("'" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
}

std::string string(const Json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> vector(const Json& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, key));
    return out;
}

}  // namespace

Box RunConfig::resolved_domain() const { return domain ? *domain : kernel.default_domain(); }

AnalysisConfig RunConfig::analysis(std::uint64_t run_seed) const {
    AnalysisConfig c;
    c.domain = resolved_domain();
    c.rule = rule;
    c.base_n = base_n;
    c.levels = levels;
    c.margin = margin;
    c.seed = run_seed;
    c.n_paths = n_paths;
    c.monte_carlo = monte_carlo;
    return c;
}

GridPtr RunConfig::single_grid() const {
    const std::size_t dim = kernel.dimension;
    const std::size_t n = grid_n.value_or(base_n.value_or(AnalysisConfig{}.resolved_base_n(dim)));
    return build_grid(resolved_domain(), n, rule, margin);
}

RunConfig parse_run_config(const std::string& text, const std::string& source_name) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        // byte offset -> line:column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(source_name + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": malformed JSON: " + e.what());
    }
    reject_unknown(j, {"kernel", "m", "p", "domain", "grid", "seed", "n_paths", "monte_carlo", "truncation", "spectrum",
                       "outputs"},
                   "");
    RunConfig c;
    if (!j.contains("kernel")) throw ConfigError("missing required key 'kernel'");
    try {
        c.kernel = KernelSpec::from_json(j.at("kernel"), "kernel");
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("invalid 'kernel': ") + e.what());
    }
    if (j.contains("m")) c.m = static_cast<int>(integer(j.at("m"), "m", 0, 6));
    if (j.contains("p")) {
        c.p = number(j.at("p"), "p");
        if (c.p < 1.0) throw ConfigError("'p' must be >= 1");
    }
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        reject_unknown(d, {"lower", "upper"}, "domain");
        if (!d.contains("lower") || !d.contains("upper")) throw ConfigError("'domain' needs 'lower' and 'upper'");
        auto lo = vector(d.at("lower"), "domain.lower");
        auto hi = vector(d.at("upper"), "domain.upper");
        if (lo.size() != c.kernel.dimension || hi.size() != c.kernel.dimension) {
            throw ConfigError("'domain' bounds must have one entry per kernel dimension");
        }
        c.domain = Box(std::move(lo), std::move(hi));
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        reject_unknown(g, {"rule", "base_n", "levels", "margin", "n"}, "grid");
        if (g.contains("rule")) c.rule = parse_quadrature_rule(string(g.at("rule"), "grid.rule"));
        if (g.contains("base_n")) c.base_n = static_cast<std::size_t>(integer(g.at("base_n"), "grid.base_n", 2, 100000));
        if (g.contains("levels")) c.levels = static_cast<int>(integer(g.at("levels"), "grid.levels", 1, 8));
        if (g.contains("margin")) {
            c.margin = number(g.at("margin"), "grid.margin");
            if (*c.margin < 0.0) throw ConfigError("'grid.margin' must be non-negative");
        }
        if (g.contains("n")) c.grid_n = static_cast<std::size_t>(integer(g.at("n"), "grid.n", 2, 100000));
    }
    if (j.contains("seed")) {
        const auto& s = j.at("seed");
        if (!s.is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    if (j.contains("n_paths")) c.n_paths = static_cast<std::size_t>(integer(j.at("n_paths"), "n_paths", 2, 10000000));
    if (j.contains("monte_carlo")) {
        if (!j.at("monte_carlo").is_boolean()) throw ConfigError("'monte_carlo' must be a boolean");
        c.monte_carlo = j.at("monte_carlo").get<bool>();
    }
    if (j.contains("truncation")) {
        const auto& t = j.at("truncation");
        reject_unknown(t, {"mass_fraction", "max_modes"}, "truncation");
        if (t.contains("mass_fraction")) {
            c.truncation.mass_fraction = number(t.at("mass_fraction"), "truncation.mass_fraction");
            if (!(c.truncation.mass_fraction > 0.0) || c.truncation.mass_fraction > 1.0) {
                throw ConfigError("'truncation.mass_fraction' must lie in (0, 1]");
            }
        }
        if (t.contains("max_modes")) {
            c.truncation.max_modes = static_cast<std::size_t>(integer(t.at("max_modes"), "truncation.max_modes", 1, 1000000));
        }
    }
    if (j.contains("spectrum")) {
        const auto& s = j.at("spectrum");
        reject_unknown(s, {"eigenfunctions"}, "spectrum");
        if (s.contains("eigenfunctions")) {
            c.eigenfunctions = static_cast<std::size_t>(integer(s.at("eigenfunctions"), "spectrum.eigenfunctions", 0, 1000));
        }
    }
    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        reject_unknown(o, {"report", "eigenvalues", "eigenfunctions", "samples"}, "outputs");
        if (o.contains("report")) c.report_path = string(o.at("report"), "outputs.report");
        if (o.contains("eigenvalues")) c.eigenvalues_path = string(o.at("eigenvalues"), "outputs.eigenvalues");
        if (o.contains("eigenfunctions")) c.eigenfunctions_path = string(o.at("eigenfunctions"), "outputs.eigenfunctions");
        if (o.contains("samples")) c.samples_path = string(o.at("samples"), "outputs.samples");
    }
    // fail early on an unusable grid or kernel
    const Box box = c.resolved_domain();
    if (box.dim() != c.kernel.dimension) throw ConfigError("'domain' dimension does not match the kernel");
    (void)c.kernel.build();
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path);
}

}  // namespace gpsobolev::cli
