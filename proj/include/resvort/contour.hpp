#pragma once

#include <functional>
#include <vector>

#include "resvort/types.hpp"

namespace resvort {

// Deformation of the semi-infinite integration path plus quadrature
// tolerances.  The original +i0 integral runs along the real axis passing
// below the integrand poles at s = k*pi; the paths built here realize that
// prescription with finite, absolutely convergent legs.
struct ContourSpec {
    double rotation_angle = 1.0471975511965976;  // pi/3, ascent/ray angle
    double trench_depth = 0.5;                   // depth below the real axis
    double near_origin_split = 1.0;              // fine panels before, geometric growth after
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int max_panels = 20000;
    double truncation_bound = 0.0;  // 0 = choose adaptively from decay rates

    void validate() const;
};

enum class SegmentKind {
    origin_fine,  // geometric ladder toward the start point
    oscillatory,  // uniform panels sized to the local oscillation
    growing,      // geometric panel growth toward the far end
};

struct Segment {
    Complex a;
    Complex b;
    SegmentKind kind = SegmentKind::oscillatory;
    double osc_rate = 1.0;  // radians per unit arc length, panel sizing hint
};

using Path = std::vector<Segment>;

struct QuadratureResult {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
    int panels = 0;
    double max_abs_integrand = 0.0;
};

// Adaptive Gauss-Kronrod (7,15) panel quadrature along a polyline path.
// error_estimate bounds quadrature error on the path; callers add their own
// truncation estimate.  Throws QuadratureError when max_panels is exhausted
// before the tolerance is met.
QuadratureResult integrate_deformed(const std::function<Complex(Complex)>& integrand,
                                    const Path& path, const ContourSpec& spec);

// Single rotated ray s = t e^{i theta}, t in [0, length]: the classic
// deformation, valid for integrands with no essential growth at the origin
// or at infinity in the upper sector.
Path make_ray_path(double theta, double length, double osc_rate);

// Trench below the real axis: 0 -> (h, -h) -> (x_end, -h).  Passes under
// every pole s = k*pi; the field-dependent exponent decays like a Gaussian
// there, so the path can be truncated at x_end.
Path make_trench_path(double depth, double x_end, double osc_rate);

// Dip-then-ray for integrands with an essential singularity at the origin
// that decays only below the axis: 0 -> d e^{-i alpha} -> anchor -> ray.
Path make_dip_ray_path(double dip_len, double theta, double length, double osc_rate);

}  // namespace resvort
