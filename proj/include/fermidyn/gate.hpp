#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace fermidyn {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

enum class GateKind { RX, RZ, CX, PHASE, MATCH_BLOCK, FSWAP };

/// Exchange-phase convention for the FSWAP gate: "paper" keeps +1 on |11>,
/// "strict" carries the fermionic -1 there.
enum class FswapVariant { paper, strict };

/// One gate of the match-block/FSWAP family plus the primitive rotations.
/// Wires are 1-based; two-qubit gates store q1 < q2 except CX, where q1 is
/// the control. Angles are radians.
struct Gate {
    GateKind kind = GateKind::PHASE;
    int q1 = 1;
    int q2 = 0;         // 0 for one-qubit gates
    double a1 = 0;      // RX/RZ/PHASE/FSWAP angle, MATCH_BLOCK theta_x
    double a2 = 0;      // MATCH_BLOCK theta_z
    FswapVariant fswap_variant = FswapVariant::paper;

    int n_wires() const { return q2 == 0 ? 1 : 2; }

    static Gate rx(int q, double theta) { return {GateKind::RX, q, 0, theta, 0}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, q, 0, theta, 0}; }
    static Gate cx(int control, int target) { return {GateKind::CX, control, target, 0, 0}; }
    static Gate phase(int q, double phi) { return {GateKind::PHASE, q, 0, phi, 0}; }
    static Gate match_block(int q1, int q2, double theta_x, double theta_z) {
        return {GateKind::MATCH_BLOCK, q1, q2, theta_x, theta_z};
    }
    static Gate fswap(int q1, int q2, double theta,
                      FswapVariant variant = FswapVariant::paper) {
        return {GateKind::FSWAP, q1, q2, theta, 0, variant};
    }
};

/// Dense unitary of a single gate: 2x2 for one-qubit kinds, 4x4 in the
/// |q1 q2> basis for two-qubit kinds. MATCH_BLOCK expands the sequence
/// [Rx(pi/2) x Rx(pi/2)] CX [Rx(tx) x Rz(tz)] CX [Rx(-pi/2) x Rx(-pi/2)]
/// with control on the lower wire.
Eigen::MatrixXcd gate_unitary(const Gate& g);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double theta);

struct GateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace fermidyn
