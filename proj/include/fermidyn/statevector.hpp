#pragma once

#include "fermidyn/circuit.hpp"

#include <complex>
#include <iosfwd>
#include <set>
#include <vector>

namespace fermidyn {

/// Dense state over n <= 12 qubits; qubit 1 is the most significant bit of
/// the basis index.
class Statevector {
  public:
    Statevector() = default;
    Statevector(int n_qubits, std::vector<std::complex<double>> amps);

    int n_qubits() const { return n_; }
    const std::vector<std::complex<double>>& amplitudes() const { return amps_; }
    std::complex<double> amplitude(long basis_index) const { return amps_[basis_index]; }
    double norm() const;

    /// Writes "<binary index> <re> <im>" for amplitudes above 1e-12.
    void dump(std::ostream& out) const;

    friend Statevector apply_gate(const Statevector& s, const Gate& g);

  private:
    int n_ = 0;
    std::vector<std::complex<double>> amps_;
};

/// Computational basis state with |1> on the given wires.
Statevector init_state(int n_qubits, const std::set<int>& occupied);

Statevector apply_gate(const Statevector& s, const Gate& g);
Statevector run_circuit(const Statevector& s, const Circuit& c);

/// Exact <Z_k> per qubit, ordered by wire.
std::vector<double> z_expectations(const Statevector& s);

/// Occupations n_p = (1 - <Z>)/2 reported in orbital-label order; perm maps
/// wire position -> label.
std::vector<double> occupations(const Statevector& s, const std::vector<int>& perm);

/// One-particle reduced density matrix rho_pq = <a_p! a_q> under the
/// Jordan-Wigner encoding, reported in orbital-label order.
Eigen::MatrixXcd one_rdm(const Statevector& s, const std::vector<int>& perm);

/// Finite-shot <Z> estimates from full-register sampling; deterministic for
/// a fixed seed.
std::vector<double> sample_z(const Statevector& s, long shots, unsigned long long rng_seed);

struct SimError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace fermidyn
