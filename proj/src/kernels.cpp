#include "resvort/kernels.hpp"

#include <cmath>

namespace resvort {

namespace {

constexpr double kPi = 3.14159265358979323846;

// s*cot(s) - 1 = sum c_n s^(2n),  c_n = -2 zeta(2n)/pi^(2n)
constexpr double kScotCoef[] = {
    -0.3333333333333333333,
    -0.02222222222222222222,
    -0.002116402116402116402,
    -0.0002116402116402116402,
    -0.00002137779915557693335,
    -2.164404280806397209e-6,
    -2.19259478518737778e-7,
    -2.221460878997967908e-8,
    -2.250784651680899285e-9,
    -2.280515120459218287e-10,
};

// 1/sin(s) - 1/s = sum d_n s^(2n-1)
constexpr double kCscCoef[] = {
    0.1666666666666666667,
    0.01944444444444444444,
    0.002050264550264550265,
    0.0002099867724867724868,
    0.00002133604564160119716,
    2.16334744277865971e-6,
    2.192327134456764086e-7,
    2.221393085392041456e-8,
    2.25076747955678673e-9,
    2.28051077072182117e-10,
};

constexpr double kSeriesRadius = 0.5;

}  // namespace

Complex cot_stable(Complex s) {
    if (s.imag() >= 0.0) {
        const Complex w = std::exp(Complex(0, 2) * s);
        return Complex(0, 1) * (w + 1.0) / (w - 1.0);
    }
    const Complex w = std::exp(Complex(0, -2) * s);
    return Complex(0, 1) * (1.0 + w) / (1.0 - w);
}

Complex csc_stable(Complex s) {
    if (s.imag() >= 0.0) {
        const Complex w = std::exp(Complex(0, 2) * s);
        return Complex(0, 2) * std::exp(Complex(0, 1) * s) / (w - 1.0);
    }
    const Complex w = std::exp(Complex(0, -2) * s);
    return Complex(0, 2) * std::exp(Complex(0, -1) * s) / (1.0 - w);
}

Complex expm1_complex(Complex z) {
    if (std::abs(z) > 0.5) return std::exp(z) - 1.0;
    // e^x cos y - 1 = expm1(x) cos y + (cos y - 1); cos y - 1 = -2 sin^2(y/2)
    const double x = z.real(), y = z.imag();
    const double sh = std::sin(0.5 * y);
    return Complex(std::expm1(x) * std::cos(y) - 2.0 * sh * sh,
                   std::exp(x) * std::sin(y));
}

double pole_distance(Complex s) {
    const double k = std::round(s.real() / kPi);
    if (k < 0.5) return std::abs(s - Complex(kPi, 0.0));
    return std::abs(s - Complex(k * kPi, 0.0));
}

void check_pole_guard(Complex s) {
    const double guard = 1e-8 * (1.0 + std::abs(s));
    if (pole_distance(s) < guard)
        throw PoleProximityError("evaluation point within guard radius of a pole s = k*pi");
}

Complex scot_m1(Complex s) {
    if (std::abs(s) < kSeriesRadius) {
        const Complex s2 = s * s;
        Complex acc = 0.0, p = s2;
        for (double c : kScotCoef) {
            acc += c * p;
            p *= s2;
        }
        return acc;
    }
    check_pole_guard(s);
    return s * cot_stable(s) - 1.0;
}

Complex csc_minus_inv(Complex s) {
    if (std::abs(s) < kSeriesRadius) {
        const Complex s2 = s * s;
        Complex acc = 0.0, p = s;
        for (double d : kCscCoef) {
            acc += d * p;
            p *= s2;
        }
        return acc;
    }
    check_pole_guard(s);
    return csc_stable(s) - 1.0 / s;
}

Complex g0_exponent(Complex s, const GreensGeometry& g, Complex E, double F) {
    const Complex cot = cot_stable(s);
    const Complex scm1 = scot_m1(s);
    return Complex(0, 1) * (E * s + g.quad_coeff * cot + g.cross_phase -
                            F * s * g.x_sum + F * scm1 * (g.dy + F * s));
}

Complex g0_integrand(Complex s, const Point2& r, const Point2& rp, Complex E,
                     const ModelParams& params) {
    check_pole_guard(s);
    const GreensGeometry g = greens_geometry(r, rp);
    const Complex phi = g0_exponent(s, g, E, params.field);
    if (phi.real() > kOverflowBound)
        throw OverflowGuardError("integrand exponent exceeds the overflow bound");
    return std::exp(phi) * csc_stable(s);
}

ExponentGradient g0_exponent_gradient(Complex s, const Point2& r, Complex E, double F) {
    (void)E;
    const Complex cot = cot_stable(s);
    ExponentGradient out;
    out.ddx = Complex(0, 0.5) * r.x * cot - Complex(0, 1) * F * s;
    out.ddy = Complex(0, 0.5) * r.y * cot + Complex(0, 1) * F * scot_m1(s);
    return out;
}

Complex d_integrand_a(Complex s, Complex E, double F) {
    const Complex q = Complex(0, 1) * F * F * s * scot_m1(s);
    const Complex phi = Complex(0, 1) * E * s + q;
    if (phi.real() > kOverflowBound)
        throw OverflowGuardError("integrand exponent exceeds the overflow bound");
    return std::exp(phi) * csc_stable(s);
}

Complex d_integrand(Complex s, Complex E, const ModelParams& params) {
    const double F = params.field;
    if (std::abs(s) < kSeriesRadius) {
        if (s == Complex(0.0, 0.0)) return 0.0;
        // (1/sin - 1/s) + (e^{iq} - 1)/sin, both cancellation-free
        const Complex q = Complex(0, 1) * F * F * s * scot_m1(s);
        const Complex v = csc_minus_inv(s) + expm1_complex(q) * csc_stable(s);
        return std::exp(Complex(0, 1) * E * s) * v;
    }
    check_pole_guard(s);
    return d_integrand_a(s, E, F) - std::exp(Complex(0, 1) * E * s) / s;
}

void ModelParams::validate() const {
    if (!(binding_energy < 0.0))
        throw DomainError("binding_energy must be strictly negative");
    if (!(field >= 0.0)) throw DomainError("field must be non-negative");
}

void PhysicalScales::validate() const {
    if (!(effective_mass > 0.0 && magnetic_field > 0.0 && charge > 0.0))
        throw DomainError("physical scale parameters must be strictly positive");
}

}  // namespace resvort
