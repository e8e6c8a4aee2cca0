#include <doctest.h>

#include <cmath>
#include <random>

#include "resvort/kernels.hpp"
#include "oracle_values.hpp"

using namespace resvort;

namespace {
constexpr double kPi = 3.14159265358979323846;

double rel_err(Complex got, Complex want) {
    return std::abs(got - want) / std::abs(want);
}
}  // namespace

TEST_CASE("scot_m1 series limit and special points") {
    // leading behavior -s^2/3
    const Complex tiny(1e-4, 0.0);
    CHECK(rel_err(scot_m1(tiny), -tiny * tiny / 3.0) < 1e-7);
    // cot(pi/2) = 0
    CHECK(std::abs(scot_m1(Complex(kPi / 2, 0)) - Complex(-1.0, 0.0)) < 1e-14);
    // multiprecision point
    CHECK(rel_err(scot_m1(Complex(1, 2)), oracle::scot_m1_1_2i) < 1e-13);
}

TEST_CASE("scot_m1 series agrees with the direct route across the switch") {
    // two independent evaluation routes must coincide below |s| = 0.5
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rad(0.05, 0.499), ang(0.0, 2 * kPi);
    for (int i = 0; i < 200; ++i) {
        const Complex s = std::polar(rad(rng), ang(rng));
        const Complex direct = s * cot_stable(s) - 1.0;
        CHECK(rel_err(scot_m1(s), direct) < 1e-12);
    }
}

TEST_CASE("csc_minus_inv continuity at the series switch") {
    for (double phi : {0.1, 1.3, 2.8, 4.4, 5.9}) {
        const Complex a = std::polar(0.4999, phi);
        const Complex b = std::polar(0.5001, phi);
        CHECK(std::abs(csc_minus_inv(a) - csc_minus_inv(b)) < 1e-12);
    }
}

TEST_CASE("stable cot and csc match naive formulas at moderate arguments") {
    for (Complex s : {Complex(0.7, 0.3), Complex(2.0, -0.8), Complex(4.0, 1.5)}) {
        CHECK(rel_err(cot_stable(s), std::cos(s) / std::sin(s)) < 1e-14);
        CHECK(rel_err(csc_stable(s), 1.0 / std::sin(s)) < 1e-14);
    }
    // no overflow far from the axis
    CHECK(std::abs(cot_stable(Complex(1.0, 400.0)) - Complex(0, -1)) < 1e-300);
    CHECK(std::abs(csc_stable(Complex(1.0, -400.0))) < 1e-100);
}

TEST_CASE("pole guard raises near nonzero poles only") {
    CHECK_THROWS_AS(scot_m1(Complex(kPi + 1e-12, 0.0)), PoleProximityError);
    CHECK_THROWS_AS(scot_m1(Complex(3 * kPi, 1e-12)), PoleProximityError);
    CHECK_NOTHROW(scot_m1(Complex(1e-9, 0.0)));  // origin handled by the series
}

TEST_CASE("free Green's function integrand examples") {
    ModelParams zero_field;
    zero_field.field = 0.0;
    zero_field.binding_energy = -1.0;

    // all position terms vanish: e^{iE s}/sin(s) at s = pi/2, E = 1 gives i
    const Complex v1 = g0_integrand(Complex(kPi / 2, 0), {0, 0}, {0, 0}, Complex(1, 0),
                                    zero_field);
    CHECK(std::abs(v1 - Complex(0, 1)) < 1e-14);

    // cot(pi/2) = 0, sin(pi/2) = 1: only the gauge cross phase survives
    const Complex v2 = g0_integrand(Complex(kPi / 2, 0), {1, 0}, {0, 1}, Complex(0, 0),
                                    zero_field);
    CHECK(std::abs(v2 - std::exp(Complex(0, 0.5))) < 1e-14);

    // multiprecision point
    ModelParams p;
    p.field = 0.1555;
    p.binding_energy = -6.4;
    const Complex v3 =
        g0_integrand(Complex(0.8, 0.8), {0.5, -0.3}, {0, 0}, Complex(7, 0), p);
    CHECK(rel_err(v3, oracle::g0_integrand_pt) < 1e-12);
}

TEST_CASE("free Green's function integrand overflow guard") {
    ModelParams p;
    p.field = 0.0;
    p.binding_energy = -1.0;
    // quad term i*a*cot -> +a for large positive Im(s); a = 225 > 200
    CHECK_THROWS_AS(g0_integrand(Complex(0.5, 40.0), {30.0, 0.0}, {0.0, 0.0},
                                 Complex(1, 0), p),
                    OverflowGuardError);
}

TEST_CASE("resonance-function integrand examples") {
    ModelParams p;
    p.field = 0.1;
    p.binding_energy = -6.4;

    // vanishes linearly at the origin with slope 1/6
    const Complex small = d_integrand(Complex(1e-6, 0), Complex(5, 0), p);
    CHECK(rel_err(small, Complex(1e-6 / 6.0, 0)) < 1e-5);
    CHECK(std::abs(d_integrand(Complex(0, 0), Complex(5, 0), p)) == 0.0);

    // s = pi/2 at zero field: e^{iE pi/2} (1 - 2/pi)
    ModelParams p0;
    p0.field = 0.0;
    p0.binding_energy = -6.4;
    for (double e : {0.7, 3.2}) {
        const Complex want = std::exp(Complex(0, e * kPi / 2)) * (1.0 - 2.0 / kPi);
        CHECK(rel_err(d_integrand(Complex(kPi / 2, 0), Complex(e, 0), p0), want) < 1e-14);
    }

    // multiprecision point
    const Complex v = d_integrand(Complex(1.2, 1.2), Complex(6.5, 0.1), p);
    CHECK(rel_err(v, oracle::d_integrand_pt) < 1e-12);
}

TEST_CASE("domain type invariants") {
    ModelParams bad;
    bad.binding_energy = 0.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad.binding_energy = -1.0;
    bad.field = -0.1;
    CHECK_THROWS_AS(bad.validate(), DomainError);

    PhysicalScales s;
    s.magnetic_field = 0.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
}
