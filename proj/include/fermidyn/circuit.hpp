#pragma once

#include "fermidyn/gate.hpp"

#include <string>
#include <vector>

namespace fermidyn {

/// Ordered gate list over n qubits. `permutation[w-1]` is the orbital label
/// currently carried by wire w; constructors that route labels keep it in
/// sync, deserialized circuits start from the identity labeling.
struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::vector<int> permutation; // wire position (1-based) -> orbital label

    explicit Circuit(int n = 0) : n_qubits(n), permutation(identity_permutation(n)) {}

    static std::vector<int> identity_permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i + 1;
        return p;
    }

    void validate() const; // wire bounds, distinct wires
};

/// Brickwork rows of adjacent position pairs covering all C(n,2) label pairs
/// in n rows, ending in the full reversal.
struct PairSchedule {
    int n = 0;
    std::vector<std::vector<std::pair<int, int>>> layers; // position pairs, 1-based
    std::vector<std::pair<int, int>> realized_pairs;      // label pairs, each once
    std::vector<int> final_permutation;                   // wire -> label
};

/// Builds the alternating odd/even brickwork. odd_first selects whether the
/// first row pairs positions (1,2),(3,4),... or (2,3),(4,5),...
PairSchedule pair_schedule(int n, bool odd_first = true);

/// One propagation step for the one-body matrix G (indexed by orbital label,
/// n x n, real symmetric): FSWAP-merged hopping blocks over the brickwork,
/// each followed by the strict-swap phase pair, then one phase gate per
/// qubit carrying dt*G_pp. perm_in gives the label on each wire before the
/// step; the returned circuit's permutation is its reversal. The row parity
/// alternates with the routing direction so that consecutive steps mirror
/// each other.
Circuit trotter_step(const Eigen::MatrixXd& g, double dt, const std::vector<int>& perm_in);

/// Dense 2^n x 2^n unitary of the circuit; capped at n <= 10.
Eigen::MatrixXcd circuit_unitary(const Circuit& c);

/// Line-oriented text format: "QUBITS <n>" header, then one gate per line
/// (MB/FSWAP/P/CX/RX/RZ) with angles at 17 significant digits.
std::string serialize_circuit(const Circuit& c);
Circuit deserialize_circuit(const std::string& text);

/// Hopping-angle map for trotter_step: a pair with coupling G_pq evolved for
/// dt gets MATCH_BLOCK angles kHoppingAngleScale * G_pq * dt + pi/2 on both
/// axes (the pi/2 is the merged fermionic swap). The calibration unit test
/// pins this against the exact pair propagator.
inline constexpr double kHoppingAngleScale = 1.0;

struct CircuitError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace fermidyn
