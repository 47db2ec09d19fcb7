#include "fermidyn/statevector.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <random>

namespace fermidyn {

namespace {
constexpr int kWidthCap = 12;
}

Statevector::Statevector(int n_qubits, std::vector<std::complex<double>> amps)
    : n_(n_qubits), amps_(std::move(amps)) {
    if (n_ < 1 || n_ > kWidthCap) throw SimError("statevector width out of range");
    if (amps_.size() != (1ULL << n_)) throw SimError("amplitude vector length mismatch");
}

double Statevector::norm() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

void Statevector::dump(std::ostream& out) const {
    for (size_t x = 0; x < amps_.size(); ++x) {
        if (std::abs(amps_[x]) <= 1e-12) continue;
        for (int q = 1; q <= n_; ++q) out << ((x >> (n_ - q)) & 1);
        char buf[64];
        std::snprintf(buf, sizeof(buf), " %.17g %.17g\n", amps_[x].real(), amps_[x].imag());
        out << buf;
    }
}

Statevector init_state(int n_qubits, const std::set<int>& occupied) {
    if (n_qubits < 1 || n_qubits > kWidthCap) throw SimError("init_state width out of range");
    size_t index = 0;
    for (int q : occupied) {
        if (q < 1 || q > n_qubits) throw SimError("init_state: occupied index out of range");
        index |= 1ULL << (n_qubits - q);
    }
    std::vector<std::complex<double>> amps(1ULL << n_qubits, 0.0);
    amps[index] = 1.0;
    return Statevector(n_qubits, std::move(amps));
}

Statevector apply_gate(const Statevector& s, const Gate& g) {
    const int n = s.n_;
    if (g.q1 < 1 || g.q1 > n || (g.n_wires() == 2 && (g.q2 < 1 || g.q2 > n)))
        throw SimError("apply_gate: wire out of range");
    Statevector out = s;
    const Eigen::MatrixXcd gm = gate_unitary(g);
    auto& a = out.amps_;
    const size_t dim = a.size();

    if (g.n_wires() == 1) {
        const size_t stride = 1ULL << (n - g.q1);
        for (size_t base = 0; base < dim; ++base) {
            if (base & stride) continue;
            const auto a0 = a[base], a1 = a[base | stride];
            a[base] = gm(0, 0) * a0 + gm(0, 1) * a1;
            a[base | stride] = gm(1, 0) * a0 + gm(1, 1) * a1;
        }
        return out;
    }

    const size_t s1 = 1ULL << (n - g.q1);
    const size_t s2 = 1ULL << (n - g.q2);
    for (size_t base = 0; base < dim; ++base) {
        if ((base & s1) || (base & s2)) continue;
        const size_t i1 = base | s2, i2 = base | s1, i3 = base | s1 | s2;
        const Eigen::Vector4cd v{a[base], a[i1], a[i2], a[i3]};
        const Eigen::Vector4cd w = gm * v;
        a[base] = w(0);
        a[i1] = w(1);
        a[i2] = w(2);
        a[i3] = w(3);
    }
    return out;
}

Statevector run_circuit(const Statevector& s, const Circuit& c) {
    if (c.n_qubits != s.n_qubits()) throw SimError("run_circuit: width mismatch");
    Statevector out = s;
    for (const auto& g : c.gates) out = apply_gate(out, g);
    return out;
}

std::vector<double> z_expectations(const Statevector& s) {
    const int n = s.n_qubits();
    std::vector<double> z(n, 0.0);
    const auto& a = s.amplitudes();
    for (size_t x = 0; x < a.size(); ++x) {
        const double w = std::norm(a[x]);
        if (w == 0.0) continue;
        for (int q = 1; q <= n; ++q)
            z[q - 1] += ((x >> (n - q)) & 1) ? -w : w;
    }
    return z;
}

namespace {

std::vector<int> inverse_permutation(const std::vector<int>& perm, int n) {
    if (static_cast<int>(perm.size()) != n)
        throw SimError("permutation length does not match width");
    std::vector<int> inv(n, 0);
    for (int w = 1; w <= n; ++w) {
        const int label = perm[w - 1];
        if (label < 1 || label > n || inv[label - 1] != 0)
            throw SimError("permutation is not a bijection");
        inv[label - 1] = w;
    }
    return inv;
}

} // namespace

std::vector<double> occupations(const Statevector& s, const std::vector<int>& perm) {
    const auto z = z_expectations(s);
    const auto wire_of = inverse_permutation(perm, s.n_qubits());
    std::vector<double> occ(s.n_qubits());
    for (int p = 1; p <= s.n_qubits(); ++p) occ[p - 1] = 0.5 * (1.0 - z[wire_of[p - 1] - 1]);
    return occ;
}

Eigen::MatrixXcd one_rdm(const Statevector& s, const std::vector<int>& perm) {
    const int n = s.n_qubits();
    const auto& a = s.amplitudes();
    Eigen::MatrixXcd rho_wire = Eigen::MatrixXcd::Zero(n, n);

    const auto occ_wire = [&](size_t x, int q) { return (x >> (n - q)) & 1ULL; };
    for (size_t x = 0; x < a.size(); ++x) {
        if (a[x] == std::complex<double>(0.0)) continue;
        const double w = std::norm(a[x]);
        for (int q = 1; q <= n; ++q)
            if (occ_wire(x, q)) rho_wire(q - 1, q - 1) += w;
        // <a_w! a_v> with w < v: remove at v, add at w, Jordan-Wigner parity
        // counted over modes strictly between them.
        for (int v = 1; v <= n; ++v) {
            if (!occ_wire(x, v)) continue;
            for (int w2 = 1; w2 <= n; ++w2) {
                if (w2 == v || occ_wire(x, w2)) continue;
                int between = 0;
                for (int m = std::min(w2, v) + 1; m < std::max(w2, v); ++m)
                    if (occ_wire(x, m)) ++between;
                const size_t y = (x ^ (1ULL << (n - v))) | (1ULL << (n - w2));
                const double sign = (between % 2 == 0) ? 1.0 : -1.0;
                rho_wire(w2 - 1, v - 1) += sign * std::conj(a[y]) * a[x];
            }
        }
    }

    const auto wire_of = inverse_permutation(perm, n);
    Eigen::MatrixXcd rho(n, n);
    for (int p = 1; p <= n; ++p)
        for (int q = 1; q <= n; ++q)
            rho(p - 1, q - 1) = rho_wire(wire_of[p - 1] - 1, wire_of[q - 1] - 1);
    return rho;
}

std::vector<double> sample_z(const Statevector& s, long shots, unsigned long long rng_seed) {
    if (shots < 1) throw SimError("sample_z: shots must be >= 1");
    const int n = s.n_qubits();
    const auto& a = s.amplitudes();

    std::vector<double> cdf(a.size());
    double acc = 0;
    for (size_t x = 0; x < a.size(); ++x) {
        acc += std::norm(a[x]);
        cdf[x] = acc;
    }

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<long> ones(n, 0);
    for (long shot = 0; shot < shots; ++shot) {
        const double r = unit(rng) * acc;
        const size_t x = std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin();
        for (int q = 1; q <= n; ++q)
            if ((x >> (n - q)) & 1) ++ones[q - 1];
    }
    std::vector<double> z(n);
    for (int q = 0; q < n; ++q)
        z[q] = 1.0 - 2.0 * static_cast<double>(ones[q]) / static_cast<double>(shots);
    return z;
}

} // namespace fermidyn
