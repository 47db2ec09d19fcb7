#include "fermidyn/circuit.hpp"
#include "fermidyn/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace fermidyn {

void Circuit::validate() const {
    if (static_cast<int>(permutation.size()) != n_qubits)
        throw CircuitError("permutation length does not match width");
    for (const auto& g : gates) {
        if (g.q1 < 1 || g.q1 > n_qubits) throw CircuitError("gate wire out of range");
        if (g.n_wires() == 2) {
            if (g.q2 < 1 || g.q2 > n_qubits) throw CircuitError("gate wire out of range");
            if (g.q1 == g.q2) throw CircuitError("two-qubit gate with identical wires");
        }
    }
}

PairSchedule pair_schedule(int n, bool odd_first) {
    if (n < 2) throw CircuitError("pair_schedule needs n >= 2");
    PairSchedule sched;
    sched.n = n;
    sched.final_permutation = Circuit::identity_permutation(n);
    auto& perm = sched.final_permutation;

    std::set<std::pair<int, int>> seen;
    for (int row = 0; row < n; ++row) {
        const bool odd_row = (row % 2 == 0) == odd_first;
        std::vector<std::pair<int, int>> layer;
        for (int w = odd_row ? 1 : 2; w + 1 <= n; w += 2) {
            layer.emplace_back(w, w + 1);
            int a = perm[w - 1], b = perm[w];
            if (a > b) std::swap(a, b);
            if (!seen.insert({a, b}).second)
                throw CircuitError("pair schedule revisited a label pair");
            sched.realized_pairs.emplace_back(a, b);
            std::swap(perm[w - 1], perm[w]);
        }
        if (!layer.empty()) sched.layers.push_back(std::move(layer));
    }
    return sched;
}

Circuit trotter_step(const Eigen::MatrixXd& g, double dt, const std::vector<int>& perm_in) {
    const int n = static_cast<int>(g.rows());
    if (g.cols() != n || n < 2) throw CircuitError("trotter_step: G must be square, n >= 2");
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw CircuitError("trotter_step: G must be symmetric");
    if (dt <= 0) throw CircuitError("trotter_step: dt must be positive");
    if (static_cast<int>(perm_in.size()) != n)
        throw CircuitError("trotter_step: permutation length mismatch");

    // Mirror the row order when the incoming labels are reversed, so that
    // consecutive steps traverse the pair sequence in opposite directions.
    const bool odd_first = perm_in.front() < perm_in.back();
    const PairSchedule sched = pair_schedule(n, odd_first);

    Circuit c(n);
    c.permutation = perm_in;
    for (const auto& layer : sched.layers)
        for (const auto& [w1, w2] : layer) {
            const int p = c.permutation[w1 - 1];
            const int q = c.permutation[w2 - 1];
            const double theta =
                wrap_angle(kHoppingAngleScale * g(p - 1, q - 1) * dt + kPi / 2);
            c.gates.push_back(Gate::match_block(w1, w2, theta, theta));
            std::swap(c.permutation[w1 - 1], c.permutation[w2 - 1]);
        }
    for (int w = 1; w <= n; ++w) {
        const int p = c.permutation[w - 1];
        c.gates.push_back(Gate::phase(w, g(p - 1, p - 1) * dt));
    }

    // Routing over the full brickwork must reverse the incoming labels.
    std::vector<int> expected(perm_in.rbegin(), perm_in.rend());
    if (c.permutation != expected) throw CircuitError("trotter_step: routing check failed");
    return c;
}

namespace {

void apply_to_columns(Eigen::MatrixXcd& u, const Gate& g, int n) {
    const Eigen::MatrixXcd gm = gate_unitary(g);
    const long dim = u.rows();
    if (g.n_wires() == 1) {
        const long stride = 1L << (n - g.q1);
        for (long base = 0; base < dim; ++base) {
            if (base & stride) continue;
            for (long col = 0; col < dim; ++col) {
                const auto a0 = u(base, col);
                const auto a1 = u(base | stride, col);
                u(base, col) = gm(0, 0) * a0 + gm(0, 1) * a1;
                u(base | stride, col) = gm(1, 0) * a0 + gm(1, 1) * a1;
            }
        }
        return;
    }
    const long s1 = 1L << (n - g.q1);
    const long s2 = 1L << (n - g.q2);
    for (long base = 0; base < dim; ++base) {
        if ((base & s1) || (base & s2)) continue;
        const long i0 = base, i1 = base | s2, i2 = base | s1, i3 = base | s1 | s2;
        for (long col = 0; col < dim; ++col) {
            const Eigen::Vector4cd v{u(i0, col), u(i1, col), u(i2, col), u(i3, col)};
            const Eigen::Vector4cd w = gm * v;
            u(i0, col) = w(0);
            u(i1, col) = w(1);
            u(i2, col) = w(2);
            u(i3, col) = w(3);
        }
    }
}

} // namespace

Eigen::MatrixXcd circuit_unitary(const Circuit& c) {
    if (c.n_qubits > 10) throw CircuitError("circuit_unitary capped at 10 qubits");
    if (c.n_qubits < 1) throw CircuitError("circuit_unitary: empty register");
    c.validate();
    const long dim = 1L << c.n_qubits;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& g : c.gates) apply_to_columns(u, g, c.n_qubits);
    return u;
}

std::string serialize_circuit(const Circuit& c) {
    std::ostringstream out;
    out << "QUBITS " << c.n_qubits << "\n";
    char buf[128];
    auto num = [&buf](double x) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return std::string(buf);
    };
    for (const auto& g : c.gates) {
        switch (g.kind) {
        case GateKind::MATCH_BLOCK:
            out << "MB " << g.q1 << " " << g.q2 << " " << num(g.a1) << " " << num(g.a2)
                << "\n";
            break;
        case GateKind::FSWAP:
            out << "FSWAP " << g.q1 << " " << g.q2 << " " << num(g.a1) << "\n";
            break;
        case GateKind::PHASE:
            out << "P " << g.q1 << " " << num(g.a1) << "\n";
            break;
        case GateKind::CX:
            out << "CX " << g.q1 << " " << g.q2 << "\n";
            break;
        case GateKind::RX:
            out << "RX " << g.q1 << " " << num(g.a1) << "\n";
            break;
        case GateKind::RZ:
            out << "RZ " << g.q1 << " " << num(g.a1) << "\n";
            break;
        }
    }
    return out.str();
}

Circuit deserialize_circuit(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    Circuit c;

    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;

        if (!have_header) {
            int n = 0;
            if (tag != "QUBITS" || !(ls >> n) || n < 1)
                throw CircuitError("circuit file must start with 'QUBITS <n>'");
            c = Circuit(n);
            have_header = true;
            continue;
        }

        auto read_two_qubit = [&](double* a1, double* a2) {
            int q1, q2;
            if (!(ls >> q1 >> q2)) throw CircuitError("bad wire indices in: " + line);
            if (a1 && !(ls >> *a1)) throw CircuitError("missing angle in: " + line);
            if (a2 && !(ls >> *a2)) throw CircuitError("missing angle in: " + line);
            return std::pair{q1, q2};
        };

        if (tag == "MB") {
            double tx, tz;
            auto [q1, q2] = read_two_qubit(&tx, &tz);
            c.gates.push_back(Gate::match_block(q1, q2, tx, tz));
        } else if (tag == "FSWAP") {
            double t;
            auto [q1, q2] = read_two_qubit(&t, nullptr);
            c.gates.push_back(Gate::fswap(q1, q2, t));
        } else if (tag == "CX") {
            auto [q1, q2] = read_two_qubit(nullptr, nullptr);
            c.gates.push_back(Gate::cx(q1, q2));
        } else if (tag == "P" || tag == "RX" || tag == "RZ") {
            int q;
            double a;
            if (!(ls >> q >> a)) throw CircuitError("bad one-qubit gate line: " + line);
            if (tag == "P")
                c.gates.push_back(Gate::phase(q, a));
            else if (tag == "RX")
                c.gates.push_back(Gate::rx(q, a));
            else
                c.gates.push_back(Gate::rz(q, a));
        } else {
            throw CircuitError("unsupported gate tag '" + tag + "'");
        }
    }
    if (!have_header) throw CircuitError("empty circuit file");
    c.validate();
    return c;
}

} // namespace fermidyn
