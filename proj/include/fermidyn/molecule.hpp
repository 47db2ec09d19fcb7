#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace fermidyn {

struct Atom {
    int z = 0;                          // nuclear charge
    std::array<double, 3> pos{0, 0, 0}; // bohr
};

struct Molecule {
    std::vector<Atom> atoms;

    int total_charge_electrons() const; // sum of Z
    void validate() const;              // Z >= 1, no coincident nuclei
};

/// Parses the geometry text format: first non-comment line is the unit tag
/// ("angstrom" or "bohr"), then one "<symbol> <x> <y> <z>" line per atom.
/// Lines starting with '#' are comments. Positions are stored in bohr.
Molecule load_geometry(const std::string& text);

/// Sum of Z_i Z_j / |R_i - R_j| over nuclear pairs, in hartree.
double nuclear_repulsion(const Molecule& mol);

/// Maps an element symbol ("H", "He", ...) to its atomic number.
/// Throws std::invalid_argument for unknown symbols.
int element_number(const std::string& symbol);

struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace fermidyn
