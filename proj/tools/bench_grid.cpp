// Benchmark comparing the serial reference grid kernels against the
// OpenMP-parallel ones, and verifying they produce identical samples.

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "resvort/grid_eval.hpp"
#include "resvort/vortex.hpp"

using namespace resvort;

namespace {

double wall_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

int main(int argc, char** argv) {
    int n = (argc > 1) ? std::atoi(argv[1]) : 61;

    ModelParams params;
    params.field = 0.1555;
    params.binding_energy = -6.4;
    ContourSpec contour;
    const Complex E_r(7.0241791, -2.6e-11);
    const Rect window{-5.0, 5.0, -5.0, 5.0};

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled\n");
#endif
    std::printf("grid: %d x %d\n", n, n);

    double t0 = wall_ms();
    FieldGrid serial = sample_psi_grid(window, n, n, E_r, params, contour,
                                       kOriginGuardRadius, ExecPolicy::serial);
    double t_serial = wall_ms() - t0;

    t0 = wall_ms();
    FieldGrid parallel = sample_psi_grid(window, n, n, E_r, params, contour,
                                         kOriginGuardRadius, ExecPolicy::parallel);
    double t_parallel = wall_ms() - t0;

    const bool identical =
        serial.values.size() == parallel.values.size() &&
        std::memcmp(serial.values.data(), parallel.values.data(),
                    serial.values.size() * sizeof(Complex)) == 0;

    std::printf("psi grid   serial:   %9.1f ms\n", t_serial);
    std::printf("psi grid   parallel: %9.1f ms   speedup %.2fx\n", t_parallel,
                t_serial / t_parallel);
    std::printf("bitwise identical: %s\n", identical ? "yes" : "NO");

    t0 = wall_ms();
    std::vector<Vortex> vs = locate_vortices(window, n, n, E_r, params, contour);
    double t_vortex = wall_ms() - t0;
    std::printf("vortex scan (parallel grid + serial refine): %9.1f ms, %zu vortices\n",
                t_vortex, vs.size());

    return identical ? 0 : 1;
}
