#include "resvort/grid_eval.hpp"

#include <cmath>
#include <exception>

namespace resvort {

namespace {

FieldGrid make_grid(const Rect& window, int nx, int ny) {
    if (nx < 2 || ny < 2) throw DomainError("grid needs nx, ny >= 2");
    if (!(window.xmin < window.xmax && window.ymin < window.ymax))
        throw DomainError("grid window must have positive extent");
    FieldGrid g;
    g.window = window;
    g.nx = nx;
    g.ny = ny;
    g.values.assign(size_t(nx) * ny, Complex(0, 0));
    return g;
}

}  // namespace

// Serial reference implementation.  The parallel kernel below must produce
// bitwise-identical values; the consistency test compares them directly.
static void fill_serial(FieldGrid& g, const std::function<Complex(double, double)>& fn,
                        double origin_guard) {
    const double guard2 = origin_guard * origin_guard;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const double x = g.x_at(ix), y = g.y_at(iy);
            if (x * x + y * y < guard2) continue;
            g.values[size_t(iy) * g.nx + ix] = fn(x, y);
        }
    }
}

static void fill_parallel(FieldGrid& g, const std::function<Complex(double, double)>& fn,
                          double origin_guard) {
    const double guard2 = origin_guard * origin_guard;
    const long long total = (long long)g.nx * g.ny;
    std::vector<std::exception_ptr> errs;
    errs.resize(size_t(total));
    bool failed = false;

#pragma omp parallel for schedule(dynamic, 8)
    for (long long idx = 0; idx < total; ++idx) {
        const int iy = int(idx / g.nx), ix = int(idx % g.nx);
        const double x = g.x_at(ix), y = g.y_at(iy);
        if (x * x + y * y < guard2) continue;
        try {
            g.values[size_t(idx)] = fn(x, y);
        } catch (...) {
            errs[size_t(idx)] = std::current_exception();
#pragma omp atomic write
            failed = true;
        }
    }
    if (failed)
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
}

FieldGrid sample_grid(const Rect& window, int nx, int ny,
                      const std::function<Complex(double, double)>& fn,
                      double origin_guard, ExecPolicy policy) {
    FieldGrid g = make_grid(window, nx, ny);
    if (policy == ExecPolicy::serial)
        fill_serial(g, fn, origin_guard);
    else
        fill_parallel(g, fn, origin_guard);
    return g;
}

FieldGrid sample_psi_grid(const Rect& window, int nx, int ny, Complex E_r,
                          const ModelParams& params, const ContourSpec& contour,
                          double origin_guard, ExecPolicy policy) {
    auto fn = [&](double x, double y) {
        return psi({x, y}, E_r, WavefunctionKind::retarded, params, contour);
    };
    return sample_grid(window, nx, ny, fn, origin_guard, policy);
}

}  // namespace resvort
