#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resvort/contour.hpp"
#include "resvort/types.hpp"

namespace resvort {

// Strict INI-style config: [section] headers, key = value lines, '#'
// comments.  Unknown sections or keys abort with a line/column diagnostic;
// every numeric field is validated against its type's invariants before any
// computation starts.

struct SweepBlock {
    double field_min = 0.02;
    double field_max = 0.30;
    double initial_step = 0.01;
    double max_step = 0.02;
};

struct WindowBlock {
    double xmin = -5.0, xmax = 5.0, ymin = -5.0, ymax = 5.0;
    int nx = 201, ny = 201;
};

struct StabilizationBlock {
    double bracket_lo = 0.0;  // lo < hi enables the stabilization search
    double bracket_hi = 0.0;
    double tol_field = 1e-6;
};

struct RunConfig {
    ModelParams model;
    ContourSpec contour;
    std::vector<double> seeds_re;     // explicit seed energies (real parts)
    double seed_im = -1e-3;
    int level_index = 3;              // n, used when seeds are not explicit
    SweepBlock sweep;
    WindowBlock window;
    StabilizationBlock stabilization;
    double overlap_tol = 1e-6;
    std::string out_dir = ".";
    unsigned long long rng_seed = 20240101ULL;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace resvort
