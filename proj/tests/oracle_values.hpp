#pragma once

// Frozen expected values for the quadrature and solver tests.
//
// "mp" entries were computed with an independent 40-digit multiprecision
// evaluation (mpmath) of the corresponding closed form or integral on an
// independently parameterized contour.  "tool" entries are converged outputs
// of this library, frozen as regression baselines after cross-validation.

#include <complex>

namespace oracle {

using C = std::complex<double>;

// mp: s*cot(s) - 1 at s = 1 + 2i
inline const C scot_m1_1_2i{1.001456208450134653, -0.91873371539068584135};

// mp: free-Green's-function integrand at s = 0.8(1+i), r = (0.5, -0.3),
// r' = 0, E = 7, field = 0.1555
inline const C g0_integrand_pt{0.0010605688106670936198, -0.0035231689593420006775};

// mp: resonance-function integrand at s = 1.2(1+i), E = 6.5+0.1i, field = 0.1
inline const C d_integrand_pt{-8.0931680055046370563e-5, 6.0934907879748842265e-5};

// closed form: int_0^inf e^{iEs^2} ds at E = 3
inline const C fresnel_3{0.36180062727913382968, 0.36180062727913382968};

// mp: resonance function and derivative at E = 6.5+0.1i, E_B = -6.4, field = 0.1
inline const C d_value_pt{3.07947665096179207, 4.55078401226526862};
inline const C d_derivative_pt{-10.6316166346774862, 20.1242429966113777};

// mp: free Green's function at r = (0.5,-0.3), r' = 0, E = 6.5+0.05i,
// field = 0.1555 (independent-contour oracle)
inline const C g0_pt{0.384600670498742778, -4.36281317210878441};

// mp: zero-field resonance function, closed form ln(-E_B/2) - psi((1-E)/2),
// E_B = -6.4
inline constexpr double d0_at_2_3 = 2.59576014117008784;
inline constexpr double d0_at_4 = 0.459994169160437676;
inline constexpr double d0_at_6 = 0.0599941691604376758;
inline constexpr double d0_at_6_5 = 3.12220607478367787;

// mp: zero-field bound states of the E_B = -6.4 configuration
inline constexpr double gap_root_5_7 = 5.98742285680826775;
inline constexpr double gap_root_7_9 = 8.0468326213281903;

// tool: stabilizing n = 3 state at E_B = -6.4
inline constexpr double stab_field_n3 = 0.1554494;        // minimizer of |Im E_r|
inline constexpr double res_energy_at_01555 = 7.024179107;  // Re E_r at field 0.1555

// tool: converged zeros of the stable-state wavefunction on the x axis at
// (E_B, field) = (-6.4, 0.1555)
inline constexpr double vortex_x[5] = {-3.942964, -1.138333, 0.204321, 1.352554, 3.605595};
inline constexpr int vortex_charge[5] = {-1, +1, +1, +1, -1};

// tool: stabilized analog states for the lower levels
inline constexpr double n1_binding = -3.0;
inline constexpr double n1_stab_field = 0.0759030;
inline constexpr double n1_energy = 3.005761273;
inline constexpr double n2_binding = -6.4;
inline constexpr double n2_stab_field = 0.1319606;
inline constexpr double n2_energy = 4.830793163;

}  // namespace oracle
