#pragma once

#include <functional>
#include <vector>

#include "resvort/greens.hpp"

namespace resvort {

enum class ExecPolicy {
    serial,    // reference implementation, kept for testing
    parallel,  // OpenMP over grid points; bitwise-identical to serial
};

// Rectangular sample grid of wavefunction values with optional derived
// layers.  Row-major, index = iy * nx + ix; x varies fastest.
struct FieldGrid {
    Rect window;
    int nx = 0, ny = 0;
    std::vector<Complex> values;

    double x_at(int ix) const { return window.xmin + (window.xmax - window.xmin) * ix / (nx - 1); }
    double y_at(int iy) const { return window.ymin + (window.ymax - window.ymin) * iy / (ny - 1); }
    double dx() const { return (window.xmax - window.xmin) / (nx - 1); }
    double dy() const { return (window.ymax - window.ymin) / (ny - 1); }
    const Complex& at(int ix, int iy) const { return values[size_t(iy) * nx + ix]; }
};

// Samples an arbitrary point function over the grid.  Points inside the
// origin guard disk are left at the masked value (0,0) and flagged.
FieldGrid sample_grid(const Rect& window, int nx, int ny,
                      const std::function<Complex(double, double)>& fn,
                      double origin_guard, ExecPolicy policy);

// Convenience wrapper sampling the retarded wavefunction.
FieldGrid sample_psi_grid(const Rect& window, int nx, int ny, Complex E_r,
                          const ModelParams& params, const ContourSpec& contour,
                          double origin_guard, ExecPolicy policy);

}  // namespace resvort
