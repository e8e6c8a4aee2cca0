#include "resvort/greens.hpp"

#include <algorithm>
#include <cmath>

namespace resvort {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTailBudget = 40.0;    // -ln of the target tail magnitude
constexpr double kCancelBudget = 45.0;  // max tolerated ln of the integrand bump

// ln(E_B/E) continued from the upper half plane through the positive real
// axis: ln(-E_B) - Log(E) + i pi.  The only remaining cut (negative real E)
// stays far from the resonance region.
Complex log_branch(Complex E, double binding_energy) {
    return std::log(-binding_energy) - std::log(E) + Complex(0, kPi);
}

// sum_{k>=1} z^k = z/(1-z) with z = -e^{i pi E}: the poles swept when the
// original path (which passes below the real-axis poles) is deformed onto
// the rotated ray at zero field.  Analytic continuation in E is automatic.
Complex geom_pole_sum(Complex E) {
    const Complex z = -std::exp(Complex(0, kPi) * E);
    return z / (1.0 - z);
}

Complex geom_pole_sum_derivative(Complex E) {
    const Complex z = -std::exp(Complex(0, kPi) * E);
    const Complex d = 1.0 - z;
    return Complex(0, kPi) * z / (d * d);
}

struct TrenchGeometry {
    double x_end = 0.0;
    double osc_rate = 1.0;
};

// Truncation point: the field-dependent exponent decays like
// exp(gamma x - F^2 x^2) at depth -h, so run past the bump until the
// magnitude budget is spent.
TrenchGeometry plan_trench(Complex E, double F, const ContourSpec& spec, double extra) {
    const double h = spec.trench_depth;
    // Gaussian decay at depth -h is modulated by Im cot(x - ih), whose
    // minimum over x (mid-gap crests) sets the worst-case rate.
    const double crest = std::sinh(2.0 * h) / (2.0 * (1.0 + std::sinh(h) * std::sinh(h)));
    const double g = F * F * crest;
    const double gamma = std::max(-E.imag(), 0.0);

    const double bump = gamma * gamma / (4.0 * g) + std::max(E.real(), 0.0) * h + extra;
    if (bump > kCancelBudget)
        throw ValiditySectorError(
            "resonance width too large for the trench contour at this field");

    TrenchGeometry t;
    const double x_star = gamma / (2.0 * g);
    t.x_end = x_star + std::sqrt((kTailBudget + std::max(E.real(), 1.0) * h +
                                  gamma * x_star + extra) /
                                 g);
    t.x_end = std::max(t.x_end, 12.0);
    if (spec.truncation_bound > 0.0) t.x_end = spec.truncation_bound;

    t.osc_rate = std::abs(E.real()) + std::abs(E.imag()) + 2.0 * F * F * t.x_end + 2.0;
    return t;
}

double ray_decay_rate(Complex E, const ContourSpec& spec) {
    return E.real() * std::sin(spec.rotation_angle) +
           E.imag() * std::cos(spec.rotation_angle);
}

void check_ray_validity(Complex E, const ContourSpec& spec) {
    if (ray_decay_rate(E, spec) < 0.15)
        throw ValiditySectorError(
            "energy outside the rotated-ray validity sector; request a larger rotation angle");
}

double ray_length(Complex E, const ContourSpec& spec, double extra) {
    double L = (kTailBudget + extra) / ray_decay_rate(E, spec);
    if (spec.truncation_bound > 0.0) L = spec.truncation_bound;
    return L;
}

void check_tail(const std::function<Complex(Complex)>& f, Complex endpoint,
                const ContourSpec& spec) {
    // probe two points about half a pole period apart so a trough of the
    // oscillating magnitude cannot hide a live tail
    const double m = std::max(std::abs(f(endpoint)), std::abs(f(endpoint - Complex(1.6, 0))));
    if (m > spec.abs_tol * 1e3)
        throw TailNotDecayingError("integrand tail above tolerance at the truncation point");
}

// Residue factor of the zero-field integrand at any pole s = k*pi, computed
// on a unit circle in the local variable; the k-dependence is the geometric
// phase handled by geom_pole_sum.
Complex pole_residue_factor(Complex E, double quad_coeff, double cross_phase) {
    constexpr int kN = 256;
    Complex acc = 0.0;
    for (int j = 0; j < kN; ++j) {
        const double th = (j + 0.5) * (2.0 * kPi / kN);
        const Complex d = std::polar(1.0, th);
        const Complex v =
            std::exp(Complex(0, 1) * (E * d + quad_coeff * cot_stable(d))) * csc_stable(d);
        acc += v * d;
    }
    return acc / double(kN) * std::exp(Complex(0, 1) * cross_phase);
}

// Start of the ascent ray carrying the pole-free 1/s piece of the
// resonance-function integrand.
Complex split_point(const ContourSpec& spec) {
    return Complex(4.5, -spec.trench_depth);
}

Path one_segment(Complex a, Complex b, SegmentKind kind, double osc_rate) {
    Segment s;
    s.a = a;
    s.b = b;
    s.kind = kind;
    s.osc_rate = osc_rate;
    return {s};
}

}  // namespace

EvalResult g0_ex(const Point2& r, const Point2& rp, Complex E,
                 const ModelParams& params, const ContourSpec& contour) {
    params.validate();
    contour.validate();
    const GreensGeometry g = greens_geometry(r, rp);
    if (g.quad_coeff < 1e-18 * (1.0 + dist2(r, {0, 0})))
        throw CoincidentPointsError("free Green's function diverges at coincident points");

    auto f = [&](Complex s) { return g0_integrand(s, r, rp, E, params); };
    EvalResult out;

    if (params.field == 0.0) {
        check_ray_validity(E, contour);
        const double dip = std::clamp(g.quad_coeff / 25.0, 0.05, 1.0);
        const double osc = std::abs(E.real()) + std::abs(E.imag()) + 2.0;
        const Path path = make_dip_ray_path(
            dip, contour.rotation_angle,
            ray_length(E, contour, g.quad_coeff + std::abs(g.cross_phase)), osc);
        const QuadratureResult q = integrate_deformed(f, path, contour);
        const Complex corr = 2.0 * kPi * Complex(0, 1) *
                             pole_residue_factor(E, g.quad_coeff, g.cross_phase) *
                             geom_pole_sum(E);
        out.value = -(q.value + corr);
        out.error_estimate = q.error_estimate + contour.abs_tol;
        return out;
    }

    const double extra = g.quad_coeff + std::abs(g.cross_phase) +
                         3.0 * params.field * (std::abs(g.x_sum) + std::abs(g.dy));
    const TrenchGeometry t = plan_trench(E, params.field, contour, extra);
    const Path path = make_trench_path(contour.trench_depth, t.x_end, t.osc_rate);
    check_tail(f, Complex(t.x_end, -contour.trench_depth), contour);
    const QuadratureResult q = integrate_deformed(f, path, contour);
    out.value = -q.value;
    out.error_estimate = q.error_estimate + contour.abs_tol;
    return out;
}

Complex g0(const Point2& r, const Point2& rp, Complex E, const ModelParams& params,
           const ContourSpec& contour) {
    return g0_ex(r, rp, E, params, contour).value;
}

DParts d_parts(Complex E, const ModelParams& params, const ContourSpec& contour) {
    params.validate();
    contour.validate();
    if (std::abs(E) < 1e-12)
        throw DomainError("resonance function has a branch point at E = 0");

    DParts out;
    const Complex i1(0, 1);

    if (params.field == 0.0) {
        check_ray_validity(E, contour);
        const double L = ray_length(E, contour, 0.0);
        const Path path = make_ray_path(contour.rotation_angle, L,
                                        std::abs(E.real()) + std::abs(E.imag()) + 2.0);
        auto f = [&](Complex s) { return d_integrand(s, E, params); };
        auto fp = [&](Complex s) { return i1 * s * d_integrand(s, E, params); };
        const QuadratureResult qv = integrate_deformed(f, path, contour);
        const QuadratureResult qd = integrate_deformed(fp, path, contour);
        out.value = log_branch(E, params.binding_energy) + qv.value +
                    2.0 * kPi * i1 * geom_pole_sum(E);
        out.derivative = -1.0 / E + qd.value + 2.0 * kPi * i1 * geom_pole_sum_derivative(E);
        out.error_estimate = qv.error_estimate + qd.error_estimate + contour.abs_tol;
        return out;
    }

    const double F = params.field;
    const TrenchGeometry t = plan_trench(E, F, contour, 0.0);
    const double h = contour.trench_depth;
    const Complex s0 = split_point(contour);

    // decay of e^{iEs} along the ascent ray carrying the 1/s piece
    const double up_rate = ray_decay_rate(E, contour);
    if (up_rate < 0.15)
        throw ValiditySectorError(
            "energy outside the ascent-ray validity sector; request a larger rotation angle");
    const double up_len = (kTailBudget + 5.0) / up_rate;
    const Complex up_dir = std::polar(1.0, contour.rotation_angle);

    Path head = one_segment(0.0, Complex(h, -h), SegmentKind::origin_fine, t.osc_rate);
    head.push_back({Complex(h, -h), s0, SegmentKind::oscillatory, t.osc_rate});
    const Path run = one_segment(s0, Complex(t.x_end, -h), SegmentKind::oscillatory, t.osc_rate);
    const Path up = one_segment(s0, s0 + up_len * up_dir, SegmentKind::growing,
                                std::abs(E.real()) + std::abs(E.imag()) + 2.0);

    auto f_head = [&](Complex s) { return d_integrand(s, E, params); };
    auto f_run = [&](Complex s) { return d_integrand_a(s, E, F); };
    auto f_up = [&](Complex s) { return -std::exp(i1 * E * s) / s; };

    check_tail(f_run, Complex(t.x_end, -h), contour);

    const QuadratureResult q1 = integrate_deformed(f_head, head, contour);
    const QuadratureResult q2 = integrate_deformed(f_run, run, contour);
    const QuadratureResult q3 = integrate_deformed(f_up, up, contour);

    auto fp_head = [&](Complex s) { return i1 * s * d_integrand(s, E, params); };
    auto fp_run = [&](Complex s) { return i1 * s * d_integrand_a(s, E, F); };
    auto fp_up = [&](Complex s) { return -i1 * std::exp(i1 * E * s); };

    const QuadratureResult p1 = integrate_deformed(fp_head, head, contour);
    const QuadratureResult p2 = integrate_deformed(fp_run, run, contour);
    const QuadratureResult p3 = integrate_deformed(fp_up, up, contour);

    out.value = log_branch(E, params.binding_energy) + q1.value + q2.value + q3.value;
    out.derivative = -1.0 / E + p1.value + p2.value + p3.value;
    out.error_estimate = q1.error_estimate + q2.error_estimate + q3.error_estimate +
                         p1.error_estimate + p2.error_estimate + p3.error_estimate +
                         contour.abs_tol;
    return out;
}

Complex d_value(Complex E, const ModelParams& params, const ContourSpec& contour) {
    return d_parts(E, params, contour).value;
}

Complex d_derivative(Complex E, const ModelParams& params, const ContourSpec& contour) {
    return d_parts(E, params, contour).derivative;
}

Complex g_full(const Point2& r, const Point2& rp, Complex E, const ModelParams& params,
               const ContourSpec& contour, double min_d_abs) {
    const Complex d = d_value(E, params, contour);
    if (std::abs(d) < min_d_abs)
        throw PoleProximityError("full Green's function evaluated too close to a resonance pole");
    const Complex base = g0(r, rp, E, params, contour);
    const Complex a = g0(r, {0.0, 0.0}, E, params, contour);
    const Complex b = g0({0.0, 0.0}, rp, E, params, contour);
    return base + a * b / d;
}

Complex psi(const Point2& r, Complex E_r, WavefunctionKind kind,
            const ModelParams& params, const ContourSpec& contour) {
    if (dist2(r, {0.0, 0.0}) < 1e-24)
        throw OriginSingularityError("wavefunction is logarithmically singular at the impurity");
    const Complex i1(0, 1);
    if (kind == WavefunctionKind::retarded)
        return -i1 * g0(r, {0.0, 0.0}, E_r, params, contour);
    return std::conj(i1 * g0({0.0, 0.0}, r, E_r, params, contour));
}

PsiGrad psi_and_grad(const Point2& r, Complex E_r, const ModelParams& params,
                     const ContourSpec& contour) {
    if (dist2(r, {0.0, 0.0}) < 1e-24)
        throw OriginSingularityError("wavefunction is logarithmically singular at the impurity");
    const Complex i1(0, 1);
    PsiGrad out;
    out.value = -i1 * g0(r, {0.0, 0.0}, E_r, params, contour);

    auto fdx = [&](Complex s) {
        return g0_integrand(s, r, {0.0, 0.0}, E_r, params) *
               g0_exponent_gradient(s, r, E_r, params.field).ddx;
    };
    auto fdy = [&](Complex s) {
        return g0_integrand(s, r, {0.0, 0.0}, E_r, params) *
               g0_exponent_gradient(s, r, E_r, params.field).ddy;
    };

    if (params.field == 0.0) {
        const GreensGeometry g = greens_geometry(r, {0.0, 0.0});
        check_ray_validity(E_r, contour);
        const double dip = std::clamp(g.quad_coeff / 25.0, 0.05, 1.0);
        const double osc = std::abs(E_r.real()) + std::abs(E_r.imag()) + 2.0;
        const Path path = make_dip_ray_path(
            dip, contour.rotation_angle,
            ray_length(E_r, contour, g.quad_coeff + std::abs(g.cross_phase)), osc);
        // pole corrections for the gradient integrands: same geometric sum,
        // residue factors carry the gradient of the exponent
        const Complex zsum = geom_pole_sum(E_r);
        auto corr_for = [&](bool wrt_x) {
            constexpr int kN = 256;
            Complex acc = 0.0;
            for (int j = 0; j < kN; ++j) {
                const double th = (j + 0.5) * (2.0 * kPi / kN);
                const Complex d = std::polar(1.0, th);
                const Complex grad = wrt_x ? Complex(0, 0.5) * r.x * cot_stable(d)
                                           : Complex(0, 0.5) * r.y * cot_stable(d);
                acc += std::exp(Complex(0, 1) * (E_r * d + g.quad_coeff * cot_stable(d))) *
                       csc_stable(d) * grad * d;
            }
            return acc / double(kN);
        };
        const QuadratureResult qx = integrate_deformed(fdx, path, contour);
        const QuadratureResult qy = integrate_deformed(fdy, path, contour);
        out.dx = -i1 * -(qx.value + 2.0 * kPi * i1 * corr_for(true) * zsum);
        out.dy = -i1 * -(qy.value + 2.0 * kPi * i1 * corr_for(false) * zsum);
        return out;
    }

    const GreensGeometry g = greens_geometry(r, {0.0, 0.0});
    const double extra = g.quad_coeff + std::abs(g.cross_phase) +
                         3.0 * params.field * (std::abs(g.x_sum) + std::abs(g.dy));
    const TrenchGeometry t = plan_trench(E_r, params.field, contour, extra);
    const Path path = make_trench_path(contour.trench_depth, t.x_end, t.osc_rate);
    const QuadratureResult qx = integrate_deformed(fdx, path, contour);
    const QuadratureResult qy = integrate_deformed(fdy, path, contour);
    out.dx = -i1 * -qx.value;
    out.dy = -i1 * -qy.value;
    return out;
}

Complex overlap_norm(Complex E_r, const ModelParams& params, const Rect& window,
                     double grid_tol, const ContourSpec& contour) {
    params.validate();
    if (!(grid_tol > 0.0)) throw DomainError("grid_tol must be positive");
    const double R = std::min({-window.xmin, window.xmax, -window.ymin, window.ymax});
    if (!(R > 1.0)) throw WindowTooSmallError("overlap window must contain the impurity with margin");

    // radial panels: geometric through the log^2 region, then uniform
    std::vector<double> edges;
    edges.push_back(0.0);
    for (double e = 0.002; e < 0.4; e *= 1.6) edges.push_back(e);
    for (double e = 0.4; e < R - 1e-12; e += 0.35) edges.push_back(e);
    edges.push_back(R);

    constexpr int kNTheta = 72;
    static const double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                  0.5384693101056831, 0.9061798459386640};
    static const double kGw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                  0.4786286704993665, 0.2369268850561891};

    auto integrand = [&](double x, double y) {
        const Point2 r{x, y};
        return g0(r, {0.0, 0.0}, E_r, params, contour) *
               g0({0.0, 0.0}, r, E_r, params, contour);
    };

    const size_t np = edges.size() - 1;
    std::vector<Complex> partial(np, Complex(0, 0));
    std::vector<double> ring_mean(np, 0.0);
    std::vector<std::exception_ptr> errors(np);

#pragma omp parallel for schedule(dynamic)
    for (long long pi = 0; pi < (long long)np; ++pi) {
        try {
            const double r0 = edges[pi], r1 = edges[pi + 1];
            Complex acc = 0.0;
            double mean = 0.0;
            for (int gq = 0; gq < 5; ++gq) {
                const double rr = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * kGx[gq];
                const double wr = 0.5 * (r1 - r0) * kGw[gq];
                Complex ring = 0.0;
                for (int j = 0; j < kNTheta; ++j) {
                    const double th = (j + 0.5) * (2.0 * kPi / kNTheta);
                    const Complex v = integrand(rr * std::cos(th), rr * std::sin(th));
                    ring += v;
                    mean += std::abs(v);
                }
                acc += wr * rr * ring * (2.0 * kPi / kNTheta);
            }
            partial[pi] = acc;
            ring_mean[pi] = mean / (5.0 * kNTheta);
        } catch (...) {
            errors[pi] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    // tail estimate: exponential fit of the outer ring means
    const double f_out = ring_mean[np - 1];
    const double f_in = ring_mean[np - 2];
    double lambda = 0.5;
    if (f_in > 0.0 && f_out > 0.0 && f_out < f_in) {
        const double dr = 0.5 * (edges[np] - edges[np - 2]);
        lambda = dr / std::log(f_in / f_out);
    }
    const double tail = f_out * 2.0 * kPi * R * std::max(lambda, 0.05);
    if (tail > grid_tol)
        throw WindowTooSmallError("overlap tail estimate above grid_tol; enlarge the window");

    Complex total = 0.0;
    for (const Complex& p : partial) total += p;
    // measure convention that makes the overlap equal D'(E_r) at a resonance
    return total / (4.0 * kPi);
}

double to_scaled(double physical, Quantity q, const PhysicalScales& scales) {
    scales.validate();
    switch (q) {
        case Quantity::energy: return physical * scales.energy_scale();
        case Quantity::field: return physical * scales.field_scale();
        case Quantity::length: return physical * scales.length_scale();
    }
    throw DomainError("unknown quantity");
}

double from_scaled(double scaled, Quantity q, const PhysicalScales& scales) {
    scales.validate();
    switch (q) {
        case Quantity::energy: return scaled / scales.energy_scale();
        case Quantity::field: return scaled / scales.field_scale();
        case Quantity::length: return scaled / scales.length_scale();
    }
    throw DomainError("unknown quantity");
}

}  // namespace resvort
