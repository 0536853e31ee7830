#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gpsobolev/errors.hpp"
#include "gpsobolev/parallel.hpp"
#include "gpsobolev/report_io.hpp"
#include "gpsobolev/sampler.hpp"
#include "run_config.hpp"

namespace gpsobolev::cli {

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

void write_text(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
    if (!path) {
        out << text;
        return;
    }
    std::ofstream f(*path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + *path + "'");
    f << text;
    if (!f) throw ConfigError("failed writing '" + *path + "'");
}

std::optional<std::string> choose(const std::string& flag, const std::optional<std::string>& configured) {
    if (!flag.empty()) return flag;
    return configured;
}

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

void coordinate_header(std::ostringstream& csv, std::size_t dim) {
    if (dim == 1) {
        csv << "x";
    } else {
        for (std::size_t a = 0; a < dim; ++a) csv << (a ? "," : "") << "x" << a + 1;
    }
}

void apply_threads(const Options& o) {
    std::size_t n = 0;
    if (o.threads) {
        n = *o.threads;
    } else if (const char* env = std::getenv("GPSOBOLEV_THREADS")) {
        try {
            n = static_cast<std::size_t>(std::stoul(env));
        } catch (const std::exception&) {
            throw ConfigError(std::string("GPSOBOLEV_THREADS must be a positive integer, got '") + env + "'");
        }
    } else {
        n = std::max(1u, std::thread::hardware_concurrency());
    }
    if (n < 1) throw ConfigError("thread count must be positive");
    set_thread_count(n);
}

std::uint64_t resolve_seed(const Options& o, const RunConfig& c) {
    if (o.seed) return *o.seed;
    return c.seed.value_or(kDefaultSeed);
}

int cmd_analyze(const Options& o, std::ostream& out) {
    const RunConfig c = load_run_config(o.config);
    const Kernel k = c.kernel.build();
    auto report = analyze(k, c.m, c.p, c.analysis(resolve_seed(o, c)));
    write_text(choose(o.out, c.report_path), to_json(report).dump(2) + "\n", out);
    switch (report.overall) {
        case Verdict::pass: return kExitPass;
        case Verdict::fail: return kExitFail;
        case Verdict::inconclusive: return kExitInconclusive;
    }
    return kExitError;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
    const RunConfig c = load_run_config(o.config);
    const Kernel k = c.kernel.build();
    const GridPtr g = c.single_grid();
    NystromOptions opts;
    opts.truncation = {1.0, c.eigenfunctions};
    opts.eigenfunctions = c.eigenfunctions > 0;
    const auto dec = nystrom_decompose(k, MultiIndex::zero(g->dim()), g, opts);

    // Eigenvalues below the PSD tolerance are rounding noise; so are their modes.
    const double top = dec.eigenvalues.empty() ? 0.0 : dec.eigenvalues.front();
    std::size_t listed = 0;
    while (listed < dec.eigenvalues.size() && dec.eigenvalues[listed] > kPsdTolerance * top) ++listed;
    std::ostringstream ev;
    ev << "index,eigenvalue\n";
    for (std::size_t n = 0; n < listed; ++n) ev << n + 1 << "," << num(dec.eigenvalues[n]) << "\n";
    const std::size_t modes = std::min(listed, dec.eigenfunctions.size());
    const auto ev_path = choose(o.out, c.eigenvalues_path);
    write_text(ev_path, ev.str(), out);

    if (modes > 0) {
        std::optional<std::string> ef_path = c.eigenfunctions_path;
        if (!ef_path && ev_path) {
            std::filesystem::path p(*ev_path);
            ef_path = (p.parent_path() / (p.stem().string() + "_eigenfunctions.csv")).string();
        }
        if (ef_path) {
            std::ostringstream ef;
            coordinate_header(ef, g->dim());
            for (std::size_t n = 0; n < modes; ++n) ef << ",phi_" << n + 1;
            ef << "\n";
            for (std::size_t i = 0; i < g->size(); ++i) {
                const auto x = g->node(i);
                for (std::size_t a = 0; a < x.size(); ++a) ef << (a ? "," : "") << num(x[a]);
                for (std::size_t n = 0; n < modes; ++n) ef << "," << num(dec.eigenfunctions[n][i]);
                ef << "\n";
            }
            write_text(ef_path, ef.str(), out);
        }
    }
    return kExitPass;
}

int cmd_sample(const Options& o, std::ostream& out) {
    const RunConfig c = load_run_config(o.config);
    const Kernel k = c.kernel.build();
    const GridPtr g = c.single_grid();
    NystromOptions opts;
    opts.truncation = c.truncation;
    const auto dec = nystrom_decompose(k, MultiIndex::zero(g->dim()), g, opts);
    const auto batch = sample_paths(dec, c.n_paths, resolve_seed(o, c), dec.truncation);

    std::ostringstream csv;
    coordinate_header(csv, g->dim());
    for (std::size_t j = 0; j < batch.paths.size(); ++j) csv << ",path_" << j + 1;
    csv << "\n";
    for (std::size_t i = 0; i < g->size(); ++i) {
        const auto x = g->node(i);
        for (std::size_t a = 0; a < x.size(); ++a) csv << (a ? "," : "") << num(x[a]);
        for (const auto& path : batch.paths) csv << "," << num(path[i]);
        csv << "\n";
    }
    write_text(choose(o.out, c.samples_path), csv.str(), out);
    return kExitPass;
}

int cmd_verify(const Options& o, std::ostream& out) {
    const RunConfig c = load_run_config(o.config);
    const Kernel k = c.kernel.build();
    const auto rep = verify_identities(k, c.m, c.analysis(resolve_seed(o, c)), c.truncation);
    write_text(choose(o.out, c.report_path), to_json(rep).dump(2) + "\n", out);
    return kExitPass;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sample-path Sobolev regularity of Gaussian processes"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "run configuration (JSON)")->required();
        sub->add_option("--out", o.out, "output file (default: config outputs, else stdout)");
        sub->add_option("--seed", o.seed, "random seed; overrides the config");
        sub->add_option("--threads", o.threads, "worker threads (env GPSOBOLEV_THREADS)")->check(CLI::PositiveNumber);
    };
    auto* analyze_cmd = app.add_subcommand("analyze", "decide W^{m,p} regularity; exit 0 PASS, 10 FAIL, 11 INCONCLUSIVE");
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Nystrom eigenvalues and eigenfunctions as CSV");
    auto* sample_cmd = app.add_subcommand("sample", "Karhunen-Loeve sample paths as CSV");
    auto* verify_cmd = app.add_subcommand("verify-identities", "trace identities as JSON");
    for (auto* sub : {analyze_cmd, spectrum_cmd, sample_cmd, verify_cmd}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitError;
    }

    try {
        apply_threads(o);
        if (analyze_cmd->parsed()) return cmd_analyze(o, out);
        if (spectrum_cmd->parsed()) return cmd_spectrum(o, out);
        if (sample_cmd->parsed()) return cmd_sample(o, out);
        return cmd_verify(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
    } catch (const nlohmann::json::exception& e) {
        err << "error: invalid configuration: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitError;
}

}  // namespace gpsobolev::cli
