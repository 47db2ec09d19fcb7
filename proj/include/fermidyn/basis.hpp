#pragma once

#include "fermidyn/molecule.hpp"

#include <string>
#include <vector>

namespace fermidyn {

struct Primitive {
    double exponent = 0;
    double coeff = 0; // contraction coefficient, normalization folded in
};

/// One contracted s-type Gaussian; self-overlap is 1 after normalize().
struct Shell {
    std::array<double, 3> center{0, 0, 0}; // bohr
    std::vector<Primitive> primitives;

    void normalize();
};

struct BasisSet {
    std::vector<Shell> shells;

    int size() const { return static_cast<int>(shells.size()); }
};

/// Builds an s-only basis for an all-hydrogen molecule.
/// name is "sto-3g" or "6-31g"; constants come from the data files under
/// data_dir (defaults to the directory shipped with the project).
BasisSet build_basis(const Molecule& mol, const std::string& name,
                     const std::string& data_dir = "");

struct BasisError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace fermidyn
