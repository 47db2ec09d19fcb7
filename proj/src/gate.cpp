#include "fermidyn/gate.hpp"
#include "fermidyn/constants.hpp"

#include <cmath>

namespace fermidyn {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

Matrix2c rx_matrix(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Matrix2c m;
    m << c, -I * s, -I * s, c;
    return m;
}

Matrix2c rz_matrix(double theta) {
    Matrix2c m = Matrix2c::Zero();
    m(0, 0) = std::exp(-I * (theta / 2));
    m(1, 1) = std::exp(I * (theta / 2));
    return m;
}

Matrix4c kron2(const Matrix2c& a, const Matrix2c& b) {
    Matrix4c m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return m;
}

// Control on the first (upper) wire, target on the second.
Matrix4c cx_matrix() {
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(2, 3) = 1;
    m(3, 2) = 1;
    return m;
}

Matrix4c match_block_matrix(double tx, double tz) {
    const Matrix2c w = rx_matrix(kPi / 2);
    const Matrix4c wrap = kron2(w, w);
    const Matrix4c mid = kron2(rx_matrix(tx), rz_matrix(tz));
    return wrap.adjoint() * cx_matrix() * mid * cx_matrix() * wrap;
}

Matrix4c fswap_matrix(double theta, FswapVariant variant) {
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = 1;
    m(1, 2) = std::exp(I * theta);
    m(2, 1) = std::exp(I * theta);
    m(3, 3) = variant == FswapVariant::paper ? cd(1.0) : cd(-1.0);
    return m;
}

} // namespace

double wrap_angle(double theta) {
    double t = std::fmod(theta, 2 * kPi);
    if (t > kPi) t -= 2 * kPi;
    if (t <= -kPi) t += 2 * kPi;
    return t;
}

Eigen::MatrixXcd gate_unitary(const Gate& g) {
    switch (g.kind) {
    case GateKind::RX:
        return rx_matrix(g.a1);
    case GateKind::RZ:
        return rz_matrix(g.a1);
    case GateKind::PHASE: {
        // P(phi) = diag(1, e^{-i phi}), so P(t G_pp) realizes e^{-i t G_pp n}.
        Matrix2c m = Matrix2c::Zero();
        m(0, 0) = 1;
        m(1, 1) = std::exp(-I * g.a1);
        return m;
    }
    case GateKind::CX:
        return cx_matrix();
    case GateKind::MATCH_BLOCK:
        return match_block_matrix(g.a1, g.a2);
    case GateKind::FSWAP:
        return fswap_matrix(g.a1, g.fswap_variant);
    }
    throw GateError("unknown gate kind");
}

} // namespace fermidyn
