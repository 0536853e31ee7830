#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gpsobolev/kernel_spec.hpp"
#include "gpsobolev/spectral.hpp"
#include "gpsobolev/verdict.hpp"

namespace gpsobolev::cli {

// Run configuration file:
//
//   {
//     "kernel": {"name": "brownian"},
//     "m": 1, "p": 2,
//     "domain": {"lower": [0], "upper": [1]},
//     "grid": {"rule": "midpoint", "base_n": 128, "levels": 3, "margin": 0.05, "n": 2000},
//     "seed": 42, "n_paths": 10000, "monte_carlo": true,
//     "truncation": {"mass_fraction": 0.9999, "max_modes": 500},
//     "spectrum": {"eigenfunctions": 5},
//     "outputs": {"report": "r.json", "eigenvalues": "ev.csv",
//                 "eigenfunctions": "ef.csv", "samples": "paths.csv"}
//   }
//
// Only "kernel" is required. grid.n is the single grid used by spectrum and
// sample (default: grid.base_n).
struct RunConfig {
    KernelSpec kernel;
    int m = 0;
    double p = 2.0;
    std::optional<Box> domain;
    QuadratureRule rule = QuadratureRule::midpoint;
    std::optional<std::size_t> base_n;
    int levels = 3;
    std::optional<double> margin;
    std::optional<std::size_t> grid_n;
    std::optional<std::uint64_t> seed;
    std::size_t n_paths = 10000;
    bool monte_carlo = true;
    TruncationPolicy truncation;
    std::size_t eigenfunctions = 5;
    std::optional<std::string> report_path;
    std::optional<std::string> eigenvalues_path;
    std::optional<std::string> eigenfunctions_path;
    std::optional<std::string> samples_path;

    Box resolved_domain() const;
    AnalysisConfig analysis(std::uint64_t seed) const;
    /// Grid for spectrum and sample.
    GridPtr single_grid() const;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Parses and validates; errors name the offending key or the line/column.
RunConfig parse_run_config(const std::string& text, const std::string& source_name = "config");
RunConfig load_run_config(const std::string& path);

}  // namespace gpsobolev::cli
