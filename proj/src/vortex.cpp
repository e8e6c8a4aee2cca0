#include "resvort/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace resvort {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_pi(double d) {
    while (d > kPi) d -= 2.0 * kPi;
    while (d < -kPi) d += 2.0 * kPi;
    return d;
}

Complex psi_r(const Point2& r, Complex E_r, const ModelParams& params,
              const ContourSpec& contour) {
    return psi(r, E_r, WavefunctionKind::retarded, params, contour);
}

// Damped 2D Newton on (Re psi, Im psi) with a finite-difference Jacobian.
// Returns true when |psi| dropped below tol at the refined point.
bool newton_zero(Point2& p, Complex E_r, const ModelParams& params,
                 const ContourSpec& contour, double tol, int max_iter) {
    constexpr double kFd = 1e-6;
    Complex f = psi_r(p, E_r, params, contour);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(f) <= tol) return true;
        const Complex fx =
            (psi_r({p.x + kFd, p.y}, E_r, params, contour) -
             psi_r({p.x - kFd, p.y}, E_r, params, contour)) / (2.0 * kFd);
        const Complex fy =
            (psi_r({p.x, p.y + kFd}, E_r, params, contour) -
             psi_r({p.x, p.y - kFd}, E_r, params, contour)) / (2.0 * kFd);
        const double det = fx.real() * fy.imag() - fy.real() * fx.imag();
        if (det == 0.0) return false;
        const double dx = (-f.real() * fy.imag() + f.imag() * fy.real()) / det;
        const double dy = (-fx.real() * f.imag() + fx.imag() * f.real()) / det;
        double lambda = 1.0;
        for (int half = 0; half < 8; ++half) {
            const Point2 cand{p.x + lambda * dx, p.y + lambda * dy};
            if (dist2(cand, {0, 0}) >= kOriginGuardRadius * kOriginGuardRadius) {
                const Complex fc = psi_r(cand, E_r, params, contour);
                if (std::abs(fc) < std::abs(f)) {
                    p = cand;
                    f = fc;
                    break;
                }
            }
            lambda *= 0.5;
            if (half == 7) return false;
        }
    }
    return std::abs(f) <= tol;
}

std::vector<Point2> circle_points(const Point2& c, double radius, int n) {
    std::vector<Point2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * i / n;
        pts.push_back({c.x + radius * std::cos(th), c.y + radius * std::sin(th)});
    }
    return pts;
}

// Charge by small-circle phase winding, doubling the sampling on
// undersampling until it resolves.
int charge_of(const Point2& c, double radius, Complex E_r, const ModelParams& params,
              const ContourSpec& contour, const GaugePotential& gauge, double* deviation) {
    int n = std::max(64, int(64 * std::ceil(2.0 * kPi * radius)));
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            const CirculationResult cr =
                circulation(circle_points(c, radius, n), E_r, params, contour, gauge,
                            CirculationMethod::phase_winding);
            if (deviation) *deviation = cr.deviation;
            return cr.nearest_integer;
        } catch (const UndersampledContourError&) {
            n *= 2;
        }
    }
    throw UndersampledContourError("charge circle undersampled after refinement");
}

}  // namespace

double phase_at(Complex v) {
    if (v == Complex(0, 0)) throw DomainError("phase undefined at a zero of the wavefunction");
    double s = std::arg(v);
    if (s <= -kPi) s = kPi;
    return s;
}

Point2 current_at(const Point2& r, Complex E_r, const ModelParams& params,
                  const ContourSpec& contour, const GaugePotential& gauge, GradMode mode) {
    if (dist2(r, {0, 0}) < 1e-24)
        throw OriginSingularityError("current undefined at the impurity site");
    Complex v, gx, gy;
    if (mode == GradMode::analytic) {
        const PsiGrad pg = psi_and_grad(r, E_r, params, contour);
        v = pg.value;
        gx = pg.dx;
        gy = pg.dy;
    } else {
        constexpr double kFd = 1e-5;
        v = psi_r(r, E_r, params, contour);
        gx = (psi_r({r.x + kFd, r.y}, E_r, params, contour) -
              psi_r({r.x - kFd, r.y}, E_r, params, contour)) / (2.0 * kFd);
        gy = (psi_r({r.x, r.y + kFd}, E_r, params, contour) -
              psi_r({r.x, r.y - kFd}, E_r, params, contour)) / (2.0 * kFd);
    }
    const double rho2 = std::norm(v);
    const Point2 a = gauge.vector_at(r);
    return {std::imag(std::conj(v) * gx) - a.x * rho2,
            std::imag(std::conj(v) * gy) - a.y * rho2};
}

Point2 velocity_at(const Point2& r, Complex E_r, const ModelParams& params,
                   const ContourSpec& contour, const GaugePotential& gauge,
                   double psi2_floor) {
    const PsiGrad pg = psi_and_grad(r, E_r, params, contour);
    const double rho2 = std::norm(pg.value);
    if (rho2 < psi2_floor)
        throw VortexProximityError("probability velocity diverges at a wavefunction zero");
    const Point2 a = gauge.vector_at(r);
    const double jx = std::imag(std::conj(pg.value) * pg.dx) - a.x * rho2;
    const double jy = std::imag(std::conj(pg.value) * pg.dy) - a.y * rho2;
    return {jx / rho2 + a.x, jy / rho2 + a.y};
}

CirculationResult circulation(const std::vector<Point2>& pts, Complex E_r,
                              const ModelParams& params, const ContourSpec& contour,
                              const GaugePotential& gauge, CirculationMethod method) {
    if (pts.size() < 8) throw DomainError("circulation contour needs at least 8 vertices");
    for (const Point2& p : pts)
        if (dist2(p, {0, 0}) < kOriginGuardRadius * kOriginGuardRadius)
            throw GuardDistanceError("circulation contour enters the origin guard disk");

    CirculationResult out;
    if (method == CirculationMethod::phase_winding) {
        std::vector<double> ph(pts.size());
        double max_abs = 0.0;
        std::vector<double> mags(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) {
            const Complex v = psi_r(pts[i], E_r, params, contour);
            mags[i] = std::abs(v);
            max_abs = std::max(max_abs, mags[i]);
            ph[i] = phase_at(v);
        }
        for (double m : mags)
            if (m < 1e-9 * max_abs)
                throw GuardDistanceError("circulation contour passes over a wavefunction zero");
        double total = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            const double d = wrap_pi(ph[(i + 1) % pts.size()] - ph[i]);
            if (std::abs(d) > kPi - 1e-9)
                throw UndersampledContourError("adjacent phase jump reached pi");
            total += d;
        }
        out.gamma_over_2pi = total / (2.0 * kPi);
    } else {
        static const double kGx[4] = {-0.8611363115940526, -0.3399810435848563,
                                      0.3399810435848563, 0.8611363115940526};
        static const double kGw[4] = {0.3478548451374538, 0.6521451548625461,
                                      0.6521451548625461, 0.3478548451374538};
        double total = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            const Point2& a = pts[i];
            const Point2& b = pts[(i + 1) % pts.size()];
            const double ex = b.x - a.x, ey = b.y - a.y;
            for (int gq = 0; gq < 4; ++gq) {
                const double t = 0.5 + 0.5 * kGx[gq];
                const Point2 p{a.x + t * ex, a.y + t * ey};
                const Point2 v = velocity_at(p, E_r, params, contour, gauge);
                total += 0.5 * kGw[gq] * (v.x * ex + v.y * ey);
            }
        }
        out.gamma_over_2pi = total / (2.0 * kPi);
    }
    out.nearest_integer = int(std::lround(out.gamma_over_2pi));
    out.deviation = std::abs(out.gamma_over_2pi - out.nearest_integer);
    return out;
}

std::vector<Vortex> locate_vortices(const Rect& window, int nx, int ny, Complex E_r,
                                    const ModelParams& params, const ContourSpec& contour,
                                    const VortexScanOptions& opts) {
    const FieldGrid grid = sample_grid(
        window, nx, ny,
        [&](double x, double y) {
            return psi({x, y}, E_r, WavefunctionKind::retarded, params, contour);
        },
        kOriginGuardRadius, ExecPolicy::parallel);

    double grid_max = 0.0;
    for (const Complex& v : grid.values) grid_max = std::max(grid_max, std::abs(v));
    const double zero_tol = opts.zero_tol_rel * grid_max;

    // stage 1: plaquette phase winding flags cells containing a zero
    std::vector<std::pair<int, int>> flagged;
    for (int iy = 0; iy + 1 < ny; ++iy) {
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const Complex c00 = grid.at(ix, iy), c10 = grid.at(ix + 1, iy);
            const Complex c11 = grid.at(ix + 1, iy + 1), c01 = grid.at(ix, iy + 1);
            if (c00 == Complex(0, 0) || c10 == Complex(0, 0) || c11 == Complex(0, 0) ||
                c01 == Complex(0, 0))
                continue;  // masked near the impurity
            const double w = wrap_pi(phase_at(c10) - phase_at(c00)) +
                             wrap_pi(phase_at(c11) - phase_at(c10)) +
                             wrap_pi(phase_at(c01) - phase_at(c11)) +
                             wrap_pi(phase_at(c00) - phase_at(c01));
            if (std::abs(w) > kPi) flagged.emplace_back(ix, iy);
        }
    }

    // stage 2: Newton refinement of each flagged cell
    std::vector<Vortex> found;
    for (auto [ix, iy] : flagged) {
        Point2 p{0.5 * (grid.x_at(ix) + grid.x_at(ix + 1)),
                 0.5 * (grid.y_at(iy) + grid.y_at(iy + 1))};
        if (!newton_zero(p, E_r, params, contour, zero_tol, opts.max_newton_iter))
            continue;  // reported by omission, not fatal
        if (p.x < window.xmin || p.x > window.xmax || p.y < window.ymin || p.y > window.ymax)
            continue;
        bool merged = false;
        for (Vortex& v : found) {
            if (dist2(v.position, p) < opts.merge_distance * opts.merge_distance) {
                merged = true;
                break;
            }
        }
        if (merged) continue;
        Vortex v;
        v.position = p;
        v.refine_residual = std::abs(psi_r(p, E_r, params, contour));
        v.field = params.field;
        found.push_back(v);
    }

    // stage 3: charge by small-circle circulation
    GaugePotential gauge;
    for (Vortex& v : found) {
        double radius = opts.charge_circle_radius;
        for (const Vortex& other : found) {
            if (&other == &v) continue;
            const double d = std::sqrt(dist2(v.position, other.position));
            radius = std::min(radius, 0.4 * d);
        }
        radius = std::max(radius, 8.0 * opts.merge_distance);
        double dev = 0.0;
        v.charge = charge_of(v.position, radius, E_r, params, contour, gauge, &dev);
        if (std::abs(v.charge) >= 2) v.cluster_unresolved = true;
    }

    std::sort(found.begin(), found.end(),
              [](const Vortex& a, const Vortex& b) { return a.position.x < b.position.x; });
    return found;
}

std::vector<VortexPath> track_vortices(const std::vector<Vortex>& initial,
                                       const Trajectory& trajectory,
                                       const ModelParams& params,
                                       const ContourSpec& contour,
                                       const VortexScanOptions& opts) {
    std::vector<VortexPath> paths(initial.size());
    GaugePotential gauge;
    for (size_t vi = 0; vi < initial.size(); ++vi) {
        Point2 p = initial[vi].position;
        int charge = initial[vi].charge;
        for (const TrajectoryPoint& tp : trajectory.points) {
            ModelParams mp = params;
            mp.field = tp.field;
            const Complex E_r = tp.resonance.energy;
            Point2 cand = p;
            if (!newton_zero(cand, E_r, mp, contour, 1e-9, opts.max_newton_iter)) break;
            if (std::sqrt(dist2(cand, {0, 0})) > 25.0) break;  // left the tracked region
            double dev = 0.0;
            int c = 0;
            try {
                c = charge_of(cand, opts.charge_circle_radius, E_r, mp, contour, gauge, &dev);
            } catch (const Error&) {
                break;
            }
            VortexTrackPoint pt;
            pt.field = tp.field;
            pt.vortex.position = cand;
            pt.vortex.charge = c;
            pt.vortex.refine_residual = std::abs(psi_r(cand, E_r, mp, contour));
            pt.vortex.field = tp.field;
            pt.resonance_energy = E_r;
            pt.charge_changed = (c != charge);
            paths[vi].push_back(pt);
            p = cand;
            charge = c;
        }
    }
    return paths;
}

PhaseMap phase_map(const Rect& window, int nx, int ny, Complex E_r,
                   const ModelParams& params, const ContourSpec& contour,
                   const std::vector<Vortex>& vortices) {
    PhaseMap out;
    out.grid = sample_grid(
        window, nx, ny,
        [&](double x, double y) {
            return psi({x, y}, E_r, WavefunctionKind::retarded, params, contour);
        },
        kOriginGuardRadius, ExecPolicy::parallel);

    out.phase.assign(out.grid.values.size(), std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < out.grid.values.size(); ++i)
        if (out.grid.values[i] != Complex(0, 0)) out.phase[i] = phase_at(out.grid.values[i]);

    auto S = [&](int ix, int iy) { return out.phase[size_t(iy) * nx + ix]; };
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            if (ix + 1 < nx && std::isfinite(S(ix, iy)) && std::isfinite(S(ix + 1, iy)) &&
                std::abs(S(ix + 1, iy) - S(ix, iy)) > kPi)
                out.edges.push_back({ix, iy, ix + 1, iy});
            if (iy + 1 < ny && std::isfinite(S(ix, iy)) && std::isfinite(S(ix, iy + 1)) &&
                std::abs(S(ix, iy + 1) - S(ix, iy)) > kPi)
                out.edges.push_back({ix, iy, ix, iy + 1});
        }
    }

    // group cut edges into lines by midpoint adjacency
    const size_t ne = out.edges.size();
    std::vector<int> parent(ne);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    auto mid = [&](const DiscontinuityEdge& e) {
        return Point2{0.5 * (out.grid.x_at(e.ix0) + out.grid.x_at(e.ix1)),
                      0.5 * (out.grid.y_at(e.iy0) + out.grid.y_at(e.iy1))};
    };
    const double link2 = 2.5 * (out.grid.dx() * out.grid.dx() + out.grid.dy() * out.grid.dy());
    for (size_t i = 0; i < ne; ++i)
        for (size_t j = i + 1; j < ne; ++j)
            if (dist2(mid(out.edges[i]), mid(out.edges[j])) <= link2)
                parent[find(int(i))] = find(int(j));

    std::map<int, std::vector<size_t>> groups;
    for (size_t i = 0; i < ne; ++i) groups[find(int(i))].push_back(i);

    for (auto& [root, idxs] : groups) {
        DiscontinuityLine line;
        for (size_t i : idxs) line.edges.push_back(out.edges[i]);
        // endpoints: the two most distant midpoints of the component
        Point2 pa = mid(line.edges.front()), pb = pa;
        double best = -1.0;
        for (size_t i = 0; i < line.edges.size(); ++i) {
            for (size_t j = i; j < line.edges.size(); ++j) {
                const double d = dist2(mid(line.edges[i]), mid(line.edges[j]));
                if (d > best) {
                    best = d;
                    pa = mid(line.edges[i]);
                    pb = mid(line.edges[j]);
                }
            }
        }
        auto classify = [&](const Point2& p) {
            const double cell = 3.0 * std::max(out.grid.dx(), out.grid.dy());
            for (const Vortex& v : vortices)
                if (std::sqrt(dist2(p, v.position)) < cell)
                    return v.charge > 0 ? LineEndpoint::vortex : LineEndpoint::antivortex;
            if (p.x < window.xmin + cell || p.x > window.xmax - cell ||
                p.y < window.ymin + cell || p.y > window.ymax - cell)
                return LineEndpoint::boundary;
            return LineEndpoint::unresolved;
        };
        line.end_a = classify(pa);
        line.end_b = classify(pb);
        out.lines.push_back(std::move(line));
    }
    return out;
}

}  // namespace resvort
