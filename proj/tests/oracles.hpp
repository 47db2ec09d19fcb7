// Test-only reference implementations, independent of the library's closed
// forms: brute-force quadrature for the Gaussian integrals, a dense
// Jordan-Wigner Hamiltonian, and a generalized-eigenvalue SCF route.
#pragma once

#include "fermidyn/dynamics.hpp"
#include "fermidyn/integrals.hpp"
#include "fermidyn/scf.hpp"

#include <Eigen/Dense>

namespace oracles {

/// Adaptive Simpson quadrature of integral_0^1 exp(-x t^2) dt.
double boys_f0(double x);

/// Box Gauss-Legendre quadrature of <a| op |b> for contracted s shells with
/// op = 1 (overlap), r_c (dipole component), or the kinetic operator.
double overlap(const fermidyn::Shell& a, const fermidyn::Shell& b);
double kinetic(const fermidyn::Shell& a, const fermidyn::Shell& b);
double dipole(const fermidyn::Shell& a, const fermidyn::Shell& b, int axis);

/// Spherical-grid quadrature of -sum_i Z_i <a| 1/|r-R_i| |b>.
double attraction(const fermidyn::Shell& a, const fermidyn::Shell& b,
                  const fermidyn::Molecule& mol);

/// (ab|cd) by the 1/r12 Gaussian transform with per-axis 2D quadrature.
double eri(const fermidyn::Shell& a, const fermidyn::Shell& b, const fermidyn::Shell& c,
           const fermidyn::Shell& d);

fermidyn::IntegralSet integral_set(const fermidyn::Molecule& mol,
                                   const fermidyn::BasisSet& basis);

/// Independent RHF: generalized eigenproblem, J/K-format Fock build,
/// energy-only convergence.
double rhf_energy(const fermidyn::IntegralSet& ints, int n_elec);

/// Dense 2^n JW matrix of sum_pq G_pq a_p! a_q (qubit 1 = most significant).
Eigen::MatrixXcd jw_one_body_hamiltonian(const Eigen::MatrixXd& g);

/// exp(i scale H) for Hermitian H via eigendecomposition.
Eigen::MatrixXcd exp_hermitian(const Eigen::MatrixXcd& h, std::complex<double> scale);

/// Max-abs deviation between unitaries after aligning the global phase on
/// the largest-magnitude entry of a.
double phase_dist(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

} // namespace oracles
