#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "resvort/vortex.hpp"
#include "oracle_values.hpp"

using namespace resvort;

namespace {

constexpr double kPi = 3.14159265358979323846;

ModelParams params_at(double field, double binding = -6.4) {
    ModelParams p;
    p.field = field;
    p.binding_energy = binding;
    return p;
}

const Resonance& stable_state() {
    static const Resonance r = [] {
        ContourSpec contour;
        Resonance seed = refine_root(Complex(7.02, -1e-4), params_at(0.15), contour);
        return find_stabilization(seed, 0.150, 0.160, 1e-7, contour).resonance;
    }();
    return r;
}

const std::vector<Vortex>& stable_vortices() {
    static const std::vector<Vortex> vs = [] {
        ContourSpec contour;
        const Resonance& res = stable_state();
        return locate_vortices({-5.0, 5.0, -5.0, 5.0}, 61, 61, res.energy, res.params,
                               contour);
    }();
    return vs;
}

std::vector<Point2> circle(double cx, double cy, double rad, int n) {
    std::vector<Point2> pts;
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * i / n;
        pts.push_back({cx + rad * std::cos(th), cy + rad * std::sin(th)});
    }
    return pts;
}

}  // namespace

TEST_CASE("phase convention") {
    CHECK(phase_at(Complex(2.5, 0.0)) == 0.0);
    CHECK(phase_at(Complex(0.0, 0.3)) == doctest::Approx(kPi / 2));
    CHECK(phase_at(Complex(-1.0, 0.0)) == doctest::Approx(kPi));  // half-open at -pi
    CHECK(phase_at(Complex(-1.0, -1e-300)) > 0.0);
    CHECK_THROWS_AS(phase_at(Complex(0, 0)), DomainError);
}

TEST_CASE("gauge sign is fixed by the divergence-free current") {
    ContourSpec contour;
    const Resonance& res = stable_state();
    const ModelParams p = res.params;
    const GaugePotential gauge;  // hard-coded sign
    const double h = 1e-4;
    for (Point2 r : {Point2{1.0, 0.7}, Point2{2.0, -0.5}}) {
        auto jx = [&](double x, double y) {
            return current_at({x, y}, res.energy, p, contour, gauge).x;
        };
        auto jy = [&](double x, double y) {
            return current_at({x, y}, res.energy, p, contour, gauge).y;
        };
        const double div = (jx(r.x + h, r.y) - jx(r.x - h, r.y)) / (2 * h) +
                           (jy(r.x, r.y + h) - jy(r.x, r.y - h)) / (2 * h);
        CHECK(std::abs(div) < 1e-5);

        // flipped sign violates the continuity equation by an O(1) amount
        GaugePotential flipped;
        flipped.sigma = -gauge.sigma;
        auto jx2 = [&](double x, double y) {
            return current_at({x, y}, res.energy, p, contour, flipped).x;
        };
        auto jy2 = [&](double x, double y) {
            return current_at({x, y}, res.energy, p, contour, flipped).y;
        };
        const double div2 = (jx2(r.x + h, r.y) - jx2(r.x - h, r.y)) / (2 * h) +
                            (jy2(r.x, r.y + h) - jy2(r.x, r.y - h)) / (2 * h);
        CHECK(std::abs(div2) > 1.0);
    }
}

TEST_CASE("gauge consistency: circulation on vortex-free contours") {
    ContourSpec contour;
    const Resonance& res = stable_state();
    const ModelParams p = res.params;
    const GaugePotential gauge;

    // velocity reconstructed with the consistent sign: quantized (N = 0 here)
    const auto pts = circle(2.5, 1.5, 0.3, 96);
    const CirculationResult ok = circulation(pts, res.energy, p, contour, gauge,
                                             CirculationMethod::velocity_line_integral);
    CHECK(ok.nearest_integer == 0);
    CHECK(ok.deviation <= 1e-3);

    // velocity reassembled with the opposite sign in the gauge term picks up
    // an area-proportional spurious circulation 2 * sigma * area
    double spurious = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Point2& a = pts[i];
        const Point2& b = pts[(i + 1) % pts.size()];
        const Point2 m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        const Point2 j = current_at(m, res.energy, p, contour, gauge);
        const Complex v = psi(m, res.energy, WavefunctionKind::retarded, p, contour);
        const double rho2 = std::norm(v);
        GaugePotential flipped;
        flipped.sigma = -gauge.sigma;
        const Point2 aflip = flipped.vector_at(m);
        const double vx = j.x / rho2 + aflip.x, vy = j.y / rho2 + aflip.y;
        spurious += vx * (b.x - a.x) + vy * (b.y - a.y);
    }
    const double area = kPi * 0.3 * 0.3;
    CHECK(std::abs(std::abs(spurious) - 2.0 * area) < 0.1 * area);
}

TEST_CASE("table of vortices at the stable resonance") {
    const std::vector<Vortex>& vs = stable_vortices();
    REQUIRE(vs.size() == 5);
    for (size_t i = 0; i < 5; ++i) {
        CHECK(std::abs(vs[i].position.y) <= 1e-3);          // aligned on the axis
        CHECK(std::abs(vs[i].position.x - oracle::vortex_x[i]) < 1e-3);
        CHECK(vs[i].charge == oracle::vortex_charge[i]);
        CHECK(!vs[i].cluster_unresolved);
    }
}

TEST_CASE("every reported vortex is a numerical zero") {
    ContourSpec contour;
    const Resonance& res = stable_state();
    double grid_max = 0.0;
    for (double x = -5.0; x <= 5.0; x += 0.5)
        for (double y = -5.0; y <= 5.0; y += 0.5) {
            if (x * x + y * y < 0.01) continue;
            grid_max = std::max(grid_max, std::abs(psi({x, y}, res.energy,
                                                       WavefunctionKind::retarded,
                                                       res.params, contour)));
        }
    for (const Vortex& v : stable_vortices()) CHECK(v.refine_residual <= 1e-10 * grid_max);
}

TEST_CASE("circulation quantization and additivity") {
    ContourSpec contour;
    const Resonance& res = stable_state();
    const ModelParams p = res.params;
    const GaugePotential gauge;
    const std::vector<Vortex>& vs = stable_vortices();

    // small circles around each vortex reproduce the charges, both methods
    for (size_t i = 0; i < vs.size(); ++i) {
        const auto pts = circle(vs[i].position.x, vs[i].position.y, 0.2, 128);
        const CirculationResult w =
            circulation(pts, res.energy, p, contour, gauge, CirculationMethod::phase_winding);
        CHECK(w.nearest_integer == oracle::vortex_charge[i]);
        CHECK(w.deviation <= 1e-3);
        const CirculationResult v = circulation(pts, res.energy, p, contour, gauge,
                                                CirculationMethod::velocity_line_integral);
        CHECK(v.nearest_integer == oracle::vortex_charge[i]);
        CHECK(v.deviation <= 1e-3);
    }

    // no enclosed vortex
    const CirculationResult none = circulation(circle(2.5, 2.5, 0.4, 128), res.energy, p,
                                               contour, gauge, CirculationMethod::phase_winding);
    CHECK(none.nearest_integer == 0);
    CHECK(none.deviation <= 1e-3);

    // rectangle enclosing all five: charges add
    std::vector<Point2> rect;
    const double y0 = 0.8;
    for (int i = 0; i < 160; ++i) rect.push_back({-4.5 + 9.0 * i / 160, -y0});
    for (int i = 0; i < 40; ++i) rect.push_back({4.5, -y0 + 2 * y0 * i / 40});
    for (int i = 0; i < 160; ++i) rect.push_back({4.5 - 9.0 * i / 160, y0});
    for (int i = 0; i < 40; ++i) rect.push_back({-4.5, y0 - 2 * y0 * i / 40});
    const CirculationResult all =
        circulation(rect, res.energy, p, contour, gauge, CirculationMethod::phase_winding);
    CHECK(all.nearest_integer == 1);
    CHECK(all.deviation <= 1e-3);
}

TEST_CASE("circulation guard and sampling errors") {
    ContourSpec contour;
    const Resonance& res = stable_state();
    const ModelParams p = res.params;
    const GaugePotential gauge;
    CHECK_THROWS_AS(circulation(circle(0.0, 0.0, 0.03, 64), res.energy, p, contour, gauge,
                                CirculationMethod::phase_winding),
                    GuardDistanceError);
    // eight vertices around a unit-charge vortex cannot keep jumps below pi
    const std::vector<Vortex>& vs = stable_vortices();
    CHECK_THROWS_AS(circulation(circle(vs[2].position.x, vs[2].position.y, 0.02, 8),
                                res.energy, p, contour, gauge,
                                CirculationMethod::phase_winding),
                    UndersampledContourError);
}

TEST_CASE("current vanishes at vortices and matches finite differences") {
    ContourSpec contour;
    const Resonance& res = stable_state();
    const ModelParams p = res.params;
    const GaugePotential gauge;
    const std::vector<Vortex>& vs = stable_vortices();

    double jmax = 0.0;
    for (double x = -4.0; x <= 4.0; x += 1.0)
        for (double y : {-1.0, 0.5, 2.0}) {
            if (x * x + y * y < 0.04) continue;
            const Point2 j = current_at({x, y}, res.energy, p, contour, gauge);
            jmax = std::max(jmax, std::hypot(j.x, j.y));
        }
    const Point2 jv = current_at(vs[3].position, res.energy, p, contour, gauge);
    CHECK(std::hypot(jv.x, jv.y) <= 1e-8 * jmax);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 10; ++k) {
        Point2 r{u(rng), u(rng)};
        if (dist2(r, {0, 0}) < 0.1) {
            --k;
            continue;
        }
        const Point2 a = current_at(r, res.energy, p, contour, gauge, GradMode::analytic);
        const Point2 b =
            current_at(r, res.energy, p, contour, gauge, GradMode::finite_difference);
        const double scale = std::hypot(a.x, a.y) + 1e-12;
        CHECK(std::hypot(a.x - b.x, a.y - b.y) / scale < 1e-5);
    }
}

TEST_CASE("velocity grows like 1/rho toward a vortex and is finite far away") {
    ContourSpec contour;
    const Resonance& res = stable_state();
    const ModelParams p = res.params;
    const GaugePotential gauge;
    const Vortex& v3 = stable_vortices()[2];

    double mean[3] = {0, 0, 0};
    const double radii[3] = {0.1, 0.05, 0.025};
    for (int ri = 0; ri < 3; ++ri) {
        for (int k = 0; k < 16; ++k) {
            const double th = 2.0 * kPi * k / 16;
            const Point2 q{v3.position.x + radii[ri] * std::cos(th),
                           v3.position.y + radii[ri] * std::sin(th)};
            const Point2 vel = velocity_at(q, res.energy, p, contour, gauge);
            mean[ri] += std::hypot(vel.x, vel.y) / 16.0;
        }
    }
    CHECK(std::abs(mean[1] / mean[0] - 2.0) < 0.4);  // 1/rho law within 20%
    CHECK(std::abs(mean[2] / mean[1] - 2.0) < 0.4);

    CHECK_THROWS_AS(velocity_at(v3.position, res.energy, p, contour, gauge),
                    VortexProximityError);

    double vmax = 0.0, vmin = 1e300;
    for (int k = 0; k < 12; ++k) {
        const double th = 2.0 * kPi * k / 12;
        const Point2 q{2.6 + 0.25 * std::cos(th), 2.1 + 0.25 * std::sin(th)};
        const Point2 vel = velocity_at(q, res.energy, p, contour, gauge);
        const double m = std::hypot(vel.x, vel.y);
        vmax = std::max(vmax, m);
        vmin = std::min(vmin, m);
    }
    CHECK(vmax / vmin < 50.0);  // smooth, no spurious spikes
}

TEST_CASE("vortex tracking crosses the axis at the stabilization field") {
    ContourSpec contour;
    const Resonance& res = stable_state();
    StepControl ctrl;
    ctrl.initial_step = 0.002;
    ctrl.max_step = 0.002;
    const Trajectory traj = sweep_field(res, 0.150, 0.160, ctrl, contour);
    const auto paths = track_vortices(stable_vortices(), traj, res.params, contour);
    REQUIRE(paths.size() == 5);
    for (const VortexPath& path : paths) {
        REQUIRE(path.size() >= 4);
        // y changes sign across the path and the crossing is near the
        // stabilization field
        double cross = -1.0;
        for (size_t i = 0; i + 1 < path.size(); ++i) {
            const double y0 = path[i].vortex.position.y, y1 = path[i + 1].vortex.position.y;
            if (y0 == 0.0 || y0 * y1 < 0.0) {
                const double w = y0 / (y0 - y1);
                cross = path[i].field + w * (path[i + 1].field - path[i].field);
                break;
            }
        }
        REQUIRE(cross > 0.0);
        CHECK(std::abs(cross - oracle::stab_field_n3) < 1e-3);
        for (size_t i = 0; i + 1 < path.size(); ++i) {
            CHECK(std::hypot(path[i + 1].vortex.position.x - path[i].vortex.position.x,
                             path[i + 1].vortex.position.y - path[i].vortex.position.y) < 0.2);
            CHECK(!path[i].charge_changed);
        }
    }
}

TEST_CASE("vortex count law for the lower-level analogs") {
    ContourSpec contour;
    // n = 1, one vortex
    {
        ModelParams p = params_at(oracle::n1_stab_field, oracle::n1_binding);
        const Resonance r = refine_root(Complex(oracle::n1_energy, -1e-6), p, contour);
        const auto vs = locate_vortices({-4.0, 4.0, -4.0, 4.0}, 41, 41, r.energy, p, contour);
        CHECK(vs.size() == 1);
    }
    // n = 2, three vortices
    {
        ModelParams p = params_at(oracle::n2_stab_field, oracle::n2_binding);
        const Resonance r = refine_root(Complex(oracle::n2_energy, -1e-6), p, contour);
        const auto vs = locate_vortices({-5.0, 5.0, -5.0, 5.0}, 51, 51, r.energy, p, contour);
        CHECK(vs.size() == 3);
    }
}

TEST_CASE("phase map shows three discontinuity lines at the stable state") {
    ContourSpec contour;
    const Resonance& res = stable_state();
    const PhaseMap pm = phase_map({-5.0, 5.0, -5.0, 5.0}, 101, 101, res.energy, res.params,
                                  contour, stable_vortices());
    CHECK(pm.lines.size() == 3);

    int boundary_lines = 0, paired_lines = 0;
    for (const DiscontinuityLine& l : pm.lines) {
        const bool has_boundary =
            l.end_a == LineEndpoint::boundary || l.end_b == LineEndpoint::boundary;
        const bool vortex_pair = (l.end_a == LineEndpoint::vortex &&
                                  l.end_b == LineEndpoint::antivortex) ||
                                 (l.end_a == LineEndpoint::antivortex &&
                                  l.end_b == LineEndpoint::vortex);
        if (has_boundary) ++boundary_lines;
        if (vortex_pair) ++paired_lines;
    }
    CHECK(paired_lines == 2);   // each anti-vortex pairs with a vortex
    CHECK(boundary_lines == 1); // the remaining line escapes the window
}

TEST_CASE("phase map of a smooth region is empty") {
    ContourSpec contour;
    const ModelParams p = params_at(0.0);
    const Resonance r = refine_root(Complex(5.99, -1e-4), p, contour);
    const PhaseMap pm = phase_map({1.0, 3.0, 1.0, 3.0}, 41, 41, r.energy, p, contour, {});
    CHECK(pm.edges.empty());
    CHECK(pm.lines.empty());
}
