#include "fermidyn/pulse.hpp"
#include "fermidyn/constants.hpp"

#include <cmath>

namespace fermidyn {

void FieldPulse::validate() const {
    if (omega <= 0) throw std::invalid_argument("pulse frequency must be positive");
    const double n2 = polarization[0] * polarization[0] + polarization[1] * polarization[1] +
                      polarization[2] * polarization[2];
    if (std::abs(n2 - 1.0) > 1e-12)
        throw std::invalid_argument("pulse polarization must be a unit vector");
}

double field_amplitude(double t, const FieldPulse& pulse) {
    const double cycle = 2 * kPi / pulse.omega;
    if (t <= 0 || t >= 3 * cycle) return 0.0;
    const double carrier = std::sin(pulse.omega * t) * pulse.e_max;
    if (t <= cycle) return (t / cycle) * carrier;
    if (t <= 2 * cycle) return carrier;
    return (3.0 - t / cycle) * carrier;
}

} // namespace fermidyn
