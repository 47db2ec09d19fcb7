#pragma once

#include "fermidyn/integrals.hpp"

#include <functional>

namespace fermidyn {

struct ScfResult {
    Eigen::MatrixXd c;     // MO coefficients, columns = orbitals
    Eigen::VectorXd eps;   // orbital energies (hartree)
    Eigen::MatrixXd p_ao;  // closed-shell spatial density, Tr(P S) = n_elec
    double e_hf = 0;       // total HF energy (hartree)
    int n_elec = 0;
    int iterations = 0;
};

struct ScfOptions {
    int max_iter = 200;
    double e_tol = 1e-10;
    double p_tol = 1e-8;
    double damping = 0.3; // applied for the first damping_iters iterations
    int damping_iters = 5;
    // Receives "iter=<n> E=<val> dE=<val> dP=<val>" per iteration when set.
    std::function<void(const std::string&)> log;
};

struct ScfError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symmetric orthogonalizer X = S^(-1/2); throws on eigenvalues below 1e-10.
Eigen::MatrixXd orthogonalizer(const Eigen::MatrixXd& s);

/// Closed-shell Fock matrix: F_pq = h_pq + sum_rs P_rs [(pq|sr) - (pr|sq)/2].
Eigen::MatrixXd fock_from_density(const Eigen::MatrixXd& hcore, const EriTensor& eri,
                                  const Eigen::MatrixXd& p_ao);

/// E = 1/2 sum_pq P_pq (h_pq + F_pq) + e_nuc.
double total_energy(const Eigen::MatrixXd& p_ao, const Eigen::MatrixXd& hcore,
                    const Eigen::MatrixXd& f_ao, double e_nuc);

/// Fixed-point restricted Hartree-Fock with optional linear density damping.
ScfResult run_rhf(const IntegralSet& ints, int n_elec, const ScfOptions& opts = {});

} // namespace fermidyn
