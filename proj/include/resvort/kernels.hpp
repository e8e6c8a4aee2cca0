#pragma once

#include "resvort/types.hpp"

namespace resvort {

// Numerically stable elementary kernels for the oscillatory integrands.
// cot and csc are evaluated through e^{2is} on the half plane where that
// factor stays bounded, so large |Im s| never overflows.

Complex cot_stable(Complex s);
Complex csc_stable(Complex s);

// e^z - 1 without cancellation for small |z|.
Complex expm1_complex(Complex z);

// s*cot(s) - 1, series below |s| = 0.5 (cancellation-free); relative
// error <= 1e-14 away from the poles s = k*pi, k != 0.
Complex scot_m1(Complex s);

// 1/sin(s) - 1/s, series below |s| = 0.5.
Complex csc_minus_inv(Complex s);

// Distance from s to the nearest pole k*pi (k >= 1) of cot/csc.
double pole_distance(Complex s);

// Throws PoleProximityError when s is too close to a nonzero pole of cot.
void check_pole_guard(Complex s);

constexpr double kOverflowBound = 200.0;  // on Re(exponent), natural log scale

struct GreensGeometry {
    double quad_coeff = 0.0;   // |r - r'|^2 / 4
    double cross_phase = 0.0;  // (x y' - x' y) / 2
    double x_sum = 0.0;        // x + x'
    double dy = 0.0;           // y - y'
};

inline GreensGeometry greens_geometry(const Point2& r, const Point2& rp) {
    GreensGeometry g;
    g.quad_coeff = 0.25 * dist2(r, rp);
    g.cross_phase = 0.5 * (r.x * rp.y - rp.x * r.y);
    g.x_sum = r.x + rp.x;
    g.dy = r.y - rp.y;
    return g;
}

// Exponent of the free Green's function integrand:
//   i E s + i a cot(s) + i c - i F s (x+x') + i F (s cot s - 1)(dy + F s)
Complex g0_exponent(Complex s, const GreensGeometry& g, Complex E, double F);

// Full integrand of the free Green's function: exp(exponent)/sin(s).
// The leading minus sign is applied at integration level, not here.
Complex g0_integrand(Complex s, const Point2& r, const Point2& rp, Complex E,
                     const ModelParams& params);

// Gradient factors d(exponent)/dx, d(exponent)/dy at fixed r' for the
// analytic derivative of the Green's function under the integral sign.
struct ExponentGradient {
    Complex ddx;
    Complex ddy;
};
ExponentGradient g0_exponent_gradient(Complex s, const Point2& r, Complex E, double F);

// Non-subtracted part of the resonance-function integrand:
//   e^{iEs} exp(i F^2 s (s cot s - 1)) / sin(s)
Complex d_integrand_a(Complex s, Complex E, double F);

// Bracketed integrand of the resonance function:
//   e^{iEs} [ exp(i F^2 s (s cot s - 1))/sin(s) - 1/s ]
// Near s = 0 a series branch removes the 1/sin - 1/s cancellation.
Complex d_integrand(Complex s, Complex E, const ModelParams& params);

}  // namespace resvort
