#include "resvort/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace resvort {

namespace {

Complex muller_step(const std::array<std::pair<Complex, Complex>, 3>& h) {
    const auto& [x0, f0] = h[0];
    const auto& [x1, f1] = h[1];
    const auto& [x2, f2] = h[2];
    const Complex q = (x2 - x1) / (x1 - x0);
    const Complex a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
    const Complex b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
    const Complex c = (1.0 + q) * f2;
    const Complex disc = std::sqrt(b * b - 4.0 * a * c);
    const Complex den = (std::abs(b + disc) > std::abs(b - disc)) ? b + disc : b - disc;
    if (std::abs(den) == 0.0) return x2;
    return x2 - (x2 - x1) * 2.0 * c / den;
}

}  // namespace

Resonance refine_root(Complex guess, const ModelParams& params,
                      const ContourSpec& contour, double tol) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    params.validate();

    constexpr int kMaxIter = 80;
    Complex E = guess;
    DParts d = d_parts(E, params, contour);
    std::array<std::pair<Complex, Complex>, 3> history{
        {{E, d.value}, {E, d.value}, {E, d.value}}};

    Resonance res;
    res.params = params;
    for (int it = 1; it <= kMaxIter; ++it) {
        const Complex newton = -d.value / d.derivative;
        double lambda = 1.0;
        bool accepted = false;
        Complex En = E;
        DParts dn = d;
        for (int half = 0; half < 10; ++half) {
            En = E + lambda * newton;
            try {
                dn = d_parts(En, params, contour);
                if (std::abs(dn.value) < std::abs(d.value)) {
                    accepted = true;
                    break;
                }
            } catch (const Error&) {
                // step left the contour validity region; shrink it
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // Newton stalled: quadratic step through the last three iterates
            const Complex Em = muller_step(history);
            try {
                const DParts dm = d_parts(Em, params, contour);
                if (std::abs(dm.value) < std::abs(d.value)) {
                    En = Em;
                    dn = dm;
                    accepted = true;
                }
            } catch (const Error&) {
            }
        }
        if (!accepted)
            throw ConvergenceError("root refinement stalled; no step reduces |D|");

        const double step = std::abs(En - E);
        E = En;
        d = dn;
        history = {history[1], history[2], {E, d.value}};
        res.iterations = it;
        if (std::abs(d.value) <= tol && step <= tol * std::max(1.0, std::abs(E))) {
            if (E.imag() > 1e-8)
                throw ConvergenceError("converged to a zero above the real axis");
            res.energy = E;
            res.residual = std::abs(d.value);
            res.degenerate_flag = std::abs(d.derivative) < 1e-6;
            return res;
        }
    }
    throw ConvergenceError("root refinement did not converge within the iteration budget");
}

std::vector<Complex> seed_guesses(int n, const ModelParams& params) {
    params.validate();
    if (n < 1)
        throw DomainError("no field-induced states emerge from the lowest Landau level");
    std::vector<Complex> seeds;
    const double level = 2.0 * n + 1.0;
    for (int k = 1; k <= n; ++k) seeds.emplace_back(level - 0.05 * k, -1e-3);
    return seeds;
}

namespace {

// One continuation step: predict linearly, refine, halving the field step on
// corrector failure or on a continuity violation.
struct Stepper {
    ModelParams params;
    const ContourSpec* contour;
    double tol = 1e-11;

    Resonance advance(double f_from, Complex e_from, Complex slope, double& step,
                      double f_target, double min_step, Resonance* out_field) {
        (void)out_field;
        double dir = (f_target > f_from) ? 1.0 : -1.0;
        while (true) {
            const double df = dir * std::min(step, std::abs(f_target - f_from));
            ModelParams p = params;
            p.field = f_from + df;
            const Complex guess = e_from + slope * df;
            try {
                Resonance r = refine_root(guess, p, *contour, tol);
                const double bound = 10.0 * (std::abs(slope * df) + 1e-3);
                if (std::abs(r.energy - e_from) > bound) throw LostTrackError("branch jump");
                return r;
            } catch (const Error&) {
                step *= 0.5;
                if (step < min_step)
                    throw LostTrackError("continuation corrector failed at minimum step");
            }
        }
    }
};

}  // namespace

Trajectory sweep_field(const Resonance& seed, double field_min, double field_max,
                       const StepControl& ctrl, const ContourSpec& contour) {
    if (!(field_min < field_max)) throw DomainError("field range must be increasing");
    Trajectory traj;
    Stepper st{seed.params, &contour};

    // walk the seed to the start of the range (not emitted)
    double f = seed.params.field;
    Complex e = seed.energy;
    Complex slope = 0.0;
    double step = ctrl.initial_step;
    while (std::abs(f - field_min) > 1e-15) {
        const double dir = (field_min > f) ? 1.0 : -1.0;
        const double df = dir * std::min(step, std::abs(field_min - f));
        Resonance r = st.advance(f, e, slope, step, f + df, ctrl.min_step, nullptr);
        slope = (r.energy - e) / (r.params.field - f);
        f = r.params.field;
        e = r.energy;
    }
    {
        ModelParams p = seed.params;
        p.field = field_min;
        Resonance r0 = refine_root(e, p, contour);
        traj.points.push_back({field_min, r0, 0.0});
        e = r0.energy;
        f = field_min;
    }

    step = ctrl.initial_step;
    while (f < field_max - 1e-15) {
        const double want = std::min(f + step, field_max);
        Resonance r = st.advance(f, e, slope, step, want, ctrl.min_step, nullptr);
        const double used = r.params.field - f;
        slope = (r.energy - e) / used;
        f = r.params.field;
        e = r.energy;
        traj.points.push_back({f, r, used});
        if (r.iterations <= 5) step = std::min(step * ctrl.grow_factor, ctrl.max_step);
    }
    return traj;
}

Stabilization find_stabilization(const Resonance& seed, double field_lo, double field_hi,
                                 double tol_field, const ContourSpec& contour) {
    if (!(field_lo < field_hi)) throw DomainError("stabilization bracket must be increasing");
    if (!(tol_field > 0.0)) throw DomainError("tol_field must be positive");

    std::map<double, Complex> cache;
    cache[seed.params.field] = seed.energy;

    auto root_at = [&](double f) -> Resonance {
        auto it = cache.lower_bound(f);
        double best_f = 0.0;
        Complex best_e;
        double best_d = 1e300;
        auto consider = [&](std::map<double, Complex>::iterator j) {
            if (j == cache.end()) return;
            if (std::abs(j->first - f) < best_d) {
                best_d = std::abs(j->first - f);
                best_f = j->first;
                best_e = j->second;
            }
        };
        consider(it);
        if (it != cache.begin()) consider(std::prev(it));
        // walk from the nearest solved field in bounded steps
        double cur_f = best_f;
        Complex cur_e = best_e;
        while (std::abs(cur_f - f) > 1e-15) {
            const double dir = (f > cur_f) ? 1.0 : -1.0;
            const double df = dir * std::min(0.01, std::abs(f - cur_f));
            ModelParams p = seed.params;
            p.field = cur_f + df;
            Resonance r = refine_root(cur_e, p, contour);
            cur_f = p.field;
            cur_e = r.energy;
            cache[cur_f] = cur_e;
        }
        ModelParams p = seed.params;
        p.field = f;
        Resonance r = refine_root(cur_e, p, contour);
        cache[f] = r.energy;
        return r;
    };

    // coarse pre-scan: the bracket must hold an interior minimum of |Im E_r|
    constexpr int kScan = 9;
    std::array<double, kScan> fs{}, ims{};
    for (int i = 0; i < kScan; ++i) {
        fs[i] = field_lo + (field_hi - field_lo) * i / (kScan - 1);
        ims[i] = std::abs(root_at(fs[i]).energy.imag());
    }
    int k = int(std::min_element(ims.begin(), ims.end()) - ims.begin());
    if (k == 0 || k == kScan - 1) {
        Stabilization out;
        out.field = fs[k];
        out.resonance = root_at(fs[k]);
        out.edge_minimum = true;
        return out;
    }

    double a = fs[k - 1], b = fs[k + 1];
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = std::abs(root_at(c).energy.imag());
    double fd = std::abs(root_at(d).energy.imag());
    while (b - a > tol_field) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = std::abs(root_at(c).energy.imag());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = std::abs(root_at(d).energy.imag());
        }
    }
    Stabilization out;
    out.field = 0.5 * (a + b);
    out.resonance = root_at(out.field);
    return out;
}

}  // namespace resvort
