#pragma once

#include <optional>
#include <vector>

#include "resvort/grid_eval.hpp"
#include "resvort/solver.hpp"

namespace resvort {

constexpr double kOriginGuardRadius = 0.05;

// Symmetric-gauge coupling e*A(r) = (sigma/2)(-y, x).  The sign consistent
// with the Green's function's phase convention is fixed once by the
// divergence-free-current test in the suite and hard-coded here.
struct GaugePotential {
    int sigma = -1;

    Point2 vector_at(const Point2& r) const {
        return {0.5 * sigma * (-r.y), 0.5 * sigma * r.x};
    }
};

// Isolated zero of the wavefunction with integer circulation charge.
struct Vortex {
    Point2 position;
    int charge = 0;
    double refine_residual = 0.0;  // |psi| at the refined zero
    double field = 0.0;
    bool cluster_unresolved = false;  // |N| >= 2 or merged refinements
};

// Principal-value phase of a wavefunction sample, range (-pi, pi].
double phase_at(Complex psi_value);

enum class GradMode { analytic, finite_difference };

// Scaled probability current j = Im[psi* (grad - i eA) psi].
Point2 current_at(const Point2& r, Complex E_r, const ModelParams& params,
                  const ContourSpec& contour, const GaugePotential& gauge,
                  GradMode mode = GradMode::analytic);

// Scaled probability velocity v = j/|psi|^2 + eA.  Throws
// VortexProximityError when |psi|^2 is below floor (v diverges at zeros).
Point2 velocity_at(const Point2& r, Complex E_r, const ModelParams& params,
                   const ContourSpec& contour, const GaugePotential& gauge,
                   double psi2_floor = 1e-20);

enum class CirculationMethod { phase_winding, velocity_line_integral };

struct CirculationResult {
    double gamma_over_2pi = 0.0;
    int nearest_integer = 0;
    double deviation = 0.0;
};

// Circulation around a closed polyline (last vertex joins the first).
// The winding method sums wrapped phase increments of psi; the velocity
// method integrates v . dr by per-edge Gauss quadrature.  Throws
// UndersampledContourError when adjacent phase jumps reach pi, and
// GuardDistanceError when a vertex is inside the origin guard disk or on
// top of a zero.
CirculationResult circulation(const std::vector<Point2>& contour_pts, Complex E_r,
                              const ModelParams& params, const ContourSpec& contour,
                              const GaugePotential& gauge, CirculationMethod method);

struct VortexScanOptions {
    double zero_tol_rel = 1e-10;      // |psi| <= rel * grid max |psi|
    double merge_distance = 1e-6;
    double charge_circle_radius = 0.15;
    int max_newton_iter = 60;
};

// Three-stage vortex search: plaquette phase-winding scan on a coarse grid,
// damped 2D Newton refinement of flagged cells, then charge assignment by
// small-circle circulation.  Cells touching the origin guard disk are
// skipped.  Non-convergent cells are dropped, not fatal.
std::vector<Vortex> locate_vortices(const Rect& window, int nx, int ny, Complex E_r,
                                    const ModelParams& params, const ContourSpec& contour,
                                    const VortexScanOptions& opts = {});

struct VortexTrackPoint {
    double field = 0.0;
    Vortex vortex;
    Complex resonance_energy;
    bool charge_changed = false;
};

using VortexPath = std::vector<VortexTrackPoint>;

// Continues each initial vortex across a resonance trajectory: the previous
// position seeds Newton refinement at the next field; the charge is
// re-verified each step.  A lost vortex ends its path (track-lost).
std::vector<VortexPath> track_vortices(const std::vector<Vortex>& initial,
                                       const Trajectory& trajectory,
                                       const ModelParams& params,
                                       const ContourSpec& contour,
                                       const VortexScanOptions& opts = {});

struct DiscontinuityEdge {
    int ix0, iy0, ix1, iy1;  // adjacent grid samples with |dS| > pi
};

enum class LineEndpoint { vortex, antivortex, boundary, unresolved };

struct DiscontinuityLine {
    std::vector<DiscontinuityEdge> edges;
    LineEndpoint end_a = LineEndpoint::unresolved;
    LineEndpoint end_b = LineEndpoint::unresolved;
};

struct PhaseMap {
    FieldGrid grid;                  // psi samples
    std::vector<double> phase;       // S layer, masked entries = NaN
    std::vector<DiscontinuityEdge> edges;
    std::vector<DiscontinuityLine> lines;
};

// Samples the phase on a grid, marks edges where |dS| > pi, groups the
// connected edges into branch-discontinuity lines and classifies each
// line's two endpoints against the supplied vortex list and the window
// boundary.
PhaseMap phase_map(const Rect& window, int nx, int ny, Complex E_r,
                   const ModelParams& params, const ContourSpec& contour,
                   const std::vector<Vortex>& vortices);

}  // namespace resvort
