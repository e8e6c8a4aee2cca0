#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace resvort {

using Complex = std::complex<double>;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dist2(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// One physical configuration in scaled units: electric field strength and
// the bound-state energy of the attractive point interaction.
struct ModelParams {
    double field = 0.0;            // >= 0
    double binding_energy = -1.0;  // < 0

    void validate() const;
};

// Scale factors between laboratory and dimensionless quantities.
// omega = |e| B / m*.  Energies scale with 2/omega, fields with
// |e|/sqrt(m* omega^3), lengths with sqrt(m* omega).
struct PhysicalScales {
    double effective_mass = 1.0;
    double magnetic_field = 1.0;
    double charge = 1.0;

    double omega() const { return charge * magnetic_field / effective_mass; }
    double energy_scale() const { return 2.0 / omega(); }
    double field_scale() const {
        double w = omega();
        return charge / std::sqrt(effective_mass * w * w * w);
    }
    double length_scale() const { return std::sqrt(effective_mass * omega()); }

    void validate() const;
};

enum class WavefunctionKind { retarded, advanced };

// ---- error taxonomy ----

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct PoleProximityError : Error { using Error::Error; };
struct OverflowGuardError : Error { using Error::Error; };
struct CoincidentPointsError : Error { using Error::Error; };
struct OriginSingularityError : Error { using Error::Error; };
struct QuadratureError : Error { using Error::Error; };
struct TailNotDecayingError : Error { using Error::Error; };
struct ValiditySectorError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct LostTrackError : Error { using Error::Error; };
struct NoMinimumError : Error { using Error::Error; };
struct WindowTooSmallError : Error { using Error::Error; };
struct VortexProximityError : Error { using Error::Error; };
struct UndersampledContourError : Error { using Error::Error; };
struct GuardDistanceError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

struct ConfigError : Error {
    int line = 0;
    int col = 0;
    ConfigError(const std::string& msg, int line_, int col_)
        : Error(msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
          line(line_), col(col_) {}
};

}  // namespace resvort
