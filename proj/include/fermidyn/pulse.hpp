#pragma once

#include <array>
#include <stdexcept>

namespace fermidyn {

/// Ramp / plateau / ramp envelope, one cycle each, zero outside.
struct FieldPulse {
    double e_max = 0.07;                       // a.u.
    double omega = 0.10;                       // a.u.
    std::array<double, 3> polarization{0, 0, 1}; // unit vector

    void validate() const;
};

/// E(t): (wt/2pi) sin(wt) E_max on [0, 2pi/w]; sin(wt) E_max on the second
/// cycle; (3 - wt/2pi) sin(wt) E_max on the third; 0 elsewhere.
double field_amplitude(double t, const FieldPulse& pulse);

} // namespace fermidyn
