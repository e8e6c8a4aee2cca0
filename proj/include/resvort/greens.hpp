#pragma once

#include "resvort/contour.hpp"
#include "resvort/kernels.hpp"
#include "resvort/types.hpp"

namespace resvort {

struct EvalResult {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
};

// Free Green's function of the electron in crossed magnetic and electric
// fields, G0(r, r'; E).  Throws CoincidentPointsError at r == r' where the
// value diverges logarithmically.
EvalResult g0_ex(const Point2& r, const Point2& rp, Complex E,
                 const ModelParams& params, const ContourSpec& contour);
Complex g0(const Point2& r, const Point2& rp, Complex E,
           const ModelParams& params, const ContourSpec& contour);

// Resonance function D(E) = ln(E_B/E) + integral and its E-derivative.
// The log branch continues the principal value from the upper half plane
// through the positive real axis (second sheet below it).
struct DParts {
    Complex value;
    Complex derivative;
    double error_estimate = 0.0;
};
DParts d_parts(Complex E, const ModelParams& params, const ContourSpec& contour);
Complex d_value(Complex E, const ModelParams& params, const ContourSpec& contour);
Complex d_derivative(Complex E, const ModelParams& params, const ContourSpec& contour);

// Test hook: the pure log-derivative term -1/E (integral disabled).
inline Complex d_derivative_log_term(Complex E) { return -1.0 / E; }

// Full Green's function G = G0 + G0(r,0) G0(0,r') / D(E).
// Throws PoleProximityError when |D| < min_d_abs.
Complex g_full(const Point2& r, const Point2& rp, Complex E,
               const ModelParams& params, const ContourSpec& contour,
               double min_d_abs = 1e-10);

// Un-normalized resonance wavefunctions built from G0 evaluated against the
// impurity site: retarded -i G0(r, 0; E_r), advanced conj(i G0(0, r; E_r)).
Complex psi(const Point2& r, Complex E_r, WavefunctionKind kind,
            const ModelParams& params, const ContourSpec& contour);

// Wavefunction value together with its spatial gradient, evaluated by
// differentiating the integrand; one path traversal for all three numbers.
struct PsiGrad {
    Complex value;
    Complex dx;
    Complex dy;
};
PsiGrad psi_and_grad(const Point2& r, Complex E_r, const ModelParams& params,
                     const ContourSpec& contour);

struct Rect {
    double xmin = -5.0, xmax = 5.0;
    double ymin = -5.0, ymax = 5.0;
};

// 2D overlap of the retarded and advanced wavefunctions over the window,
// in the measure that makes it equal D'(E_r) at a resonance (a factor
// 1/(4 pi) relative to the plain dx dy integral).  Polar panels refine the
// integrable log^2 singularity at the impurity.  Throws WindowTooSmallError
// when the boundary tail estimate exceeds grid_tol.
Complex overlap_norm(Complex E_r, const ModelParams& params, const Rect& window,
                     double grid_tol, const ContourSpec& contour);

// Unit conversions between laboratory and scaled quantities.
enum class Quantity { energy, field, length };
double to_scaled(double physical, Quantity q, const PhysicalScales& scales);
double from_scaled(double scaled, Quantity q, const PhysicalScales& scales);

}  // namespace resvort
