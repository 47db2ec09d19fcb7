#pragma once

#include "fermidyn/basis.hpp"
#include "fermidyn/molecule.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace fermidyn {

/// Dense two-electron tensor in chemist convention (pq|rs).
class EriTensor {
  public:
    EriTensor() = default;
    explicit EriTensor(int m) : m_(m), data_(static_cast<size_t>(m) * m * m * m, 0.0) {}

    int dim() const { return m_; }
    double& operator()(int p, int q, int r, int s) { return data_[index(p, q, r, s)]; }
    double operator()(int p, int q, int r, int s) const { return data_[index(p, q, r, s)]; }

  private:
    size_t index(int p, int q, int r, int s) const {
        return ((static_cast<size_t>(p) * m_ + q) * m_ + r) * m_ + s;
    }
    int m_ = 0;
    std::vector<double> data_;
};

struct IntegralSet {
    int m = 0;                            // basis dimension
    int n_elec = 0;                       // electron count (used by FCIDUMP files)
    Eigen::MatrixXd s;                    // overlap
    Eigen::MatrixXd hcore;                // kinetic + nuclear attraction
    EriTensor eri;                        // (pq|rs)
    std::array<Eigen::MatrixXd, 3> dipole; // <p| x,y,z |q>
    double e_nuc = 0.0;
};

/// Boys function F0(x); series branch below x = 1e-7, closed form above.
double boys_f0(double x);

Eigen::MatrixXd overlap_matrix(const BasisSet& basis);
Eigen::MatrixXd kinetic_matrix(const BasisSet& basis);
Eigen::MatrixXd nuclear_attraction_matrix(const BasisSet& basis, const Molecule& mol);
Eigen::MatrixXd core_hamiltonian(const BasisSet& basis, const Molecule& mol);
EriTensor eri_tensor(const BasisSet& basis);
std::array<Eigen::MatrixXd, 3> dipole_matrices(const BasisSet& basis);

/// All integrals for a molecule/basis pair in one pass.
IntegralSet compute_integrals(const Molecule& mol, const BasisSet& basis);

/// Reads the labeled integral file format (header "M= NELEC= ENUC=",
/// "<value> p q r s" records, optional "DIPOLE x|y|z" sections).
/// The overlap of a loaded set is the identity (orthonormal convention).
IntegralSet load_fcidump(const std::string& text);

/// Writes the same format; only representable fields are stored, so sets
/// should be orthonormalized (s = identity) before a lossless round trip.
std::string save_fcidump(const IntegralSet& ints);

/// Congruence-transforms every integral by x (columns = new basis vectors):
/// s -> x^T s x, hcore -> x^T hcore x, 4-index transform for the ERI.
IntegralSet transform_integrals(const IntegralSet& ints, const Eigen::MatrixXd& x);

} // namespace fermidyn
