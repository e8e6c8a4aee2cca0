#pragma once

#include <vector>

#include "resvort/greens.hpp"

namespace resvort {

constexpr double kWidthFloor = 1e-10;

// A converged complex zero of the resonance function.
struct Resonance {
    Complex energy{0.0, 0.0};
    ModelParams params;
    double residual = 0.0;  // |D(E_r)| at acceptance
    int iterations = 0;
    bool degenerate_flag = false;  // |D'| suspiciously small at the root

    double width() const { return -2.0 * energy.imag(); }
    double lifetime() const {
        double w = width();
        return w >= kWidthFloor ? 1.0 / w : std::numeric_limits<double>::infinity();
    }
};

struct TrajectoryPoint {
    double field = 0.0;
    Resonance resonance;
    double step_used = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    bool branch_collision_flag = false;
};

struct StepControl {
    double initial_step = 0.01;
    double min_step = 1e-6;
    double max_step = 0.02;
    double grow_factor = 1.4;
};

// Damped complex Newton iteration on D(E) with a Muller fallback when the
// Newton step stalls.  Accepted when |D| <= tol and the last step is small.
Resonance refine_root(Complex guess, const ModelParams& params,
                      const ContourSpec& contour, double tol = 1e-11);

// Initial guesses for the n field-induced states emerging from the Landau
// level at E = 2n+1: fanned just below the level with small negative
// imaginary parts.  n = 0 rejected (no states emerge from the lowest level).
std::vector<Complex> seed_guesses(int n, const ModelParams& params);

// Predictor-corrector continuation of one resonance over a field range.
Trajectory sweep_field(const Resonance& seed, double field_min, double field_max,
                       const StepControl& ctrl, const ContourSpec& contour);

struct Stabilization {
    double field = 0.0;
    Resonance resonance;
    bool edge_minimum = false;
};

// Locates the field where |Im E_r| attains its interior minimum, by a coarse
// pre-scan (verifying the bracket holds a sign change of d|Im|/dF) followed
// by golden-section minimization.  Each probe is a continuation-refined root
// warm-started from the nearest previously solved field.
Stabilization find_stabilization(const Resonance& seed, double field_lo,
                                 double field_hi, double tol_field,
                                 const ContourSpec& contour);

}  // namespace resvort
