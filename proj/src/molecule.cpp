#include "fermidyn/molecule.hpp"
#include "fermidyn/constants.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace fermidyn {

int element_number(const std::string& symbol) {
    static const std::map<std::string, int> table = {
        {"H", 1},   {"He", 2},  {"Li", 3},  {"Be", 4},  {"B", 5},
        {"C", 6},   {"N", 7},   {"O", 8},   {"F", 9},   {"Ne", 10},
        {"Na", 11}, {"Mg", 12}, {"Al", 13}, {"Si", 14}, {"P", 15},
        {"S", 16},  {"Cl", 17}, {"Ar", 18}};
    auto it = table.find(symbol);
    if (it == table.end())
        throw ParseError("unknown element symbol: '" + symbol + "'");
    return it->second;
}

int Molecule::total_charge_electrons() const {
    int n = 0;
    for (const auto& a : atoms) n += a.z;
    return n;
}

void Molecule::validate() const {
    if (atoms.empty()) throw ParseError("molecule has no atoms");
    for (const auto& a : atoms)
        if (a.z < 1) throw ParseError("atomic number below 1");
    for (size_t i = 0; i < atoms.size(); ++i)
        for (size_t j = i + 1; j < atoms.size(); ++j) {
            double d2 = 0;
            for (int c = 0; c < 3; ++c) {
                const double d = atoms[i].pos[c] - atoms[j].pos[c];
                d2 += d * d;
            }
            if (d2 < 1e-20) throw ParseError("two atoms at identical positions");
        }
}

Molecule load_geometry(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool have_units = false;
    double to_bohr = 1.0;
    Molecule mol;

    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue; // blank line

        if (!have_units) {
            if (first == "angstrom")
                to_bohr = kAngstromToBohr;
            else if (first == "bohr")
                to_bohr = 1.0;
            else
                throw ParseError("geometry must start with unit tag 'angstrom' or 'bohr', got '" +
                                 first + "'");
            have_units = true;
            continue;
        }

        Atom a;
        a.z = element_number(first);
        if (!(ls >> a.pos[0] >> a.pos[1] >> a.pos[2]))
            throw ParseError("malformed atom line: '" + line + "'");
        std::string trailing;
        if (ls >> trailing)
            throw ParseError("unexpected trailing token '" + trailing + "' in atom line");
        for (int c = 0; c < 3; ++c) a.pos[c] *= to_bohr;
        mol.atoms.push_back(a);
    }

    if (!have_units) throw ParseError("empty geometry file");
    mol.validate();
    return mol;
}

double nuclear_repulsion(const Molecule& mol) {
    if (mol.atoms.empty()) throw ParseError("nuclear_repulsion: no atoms");
    double e = 0;
    for (size_t i = 0; i < mol.atoms.size(); ++i)
        for (size_t j = i + 1; j < mol.atoms.size(); ++j) {
            double d2 = 0;
            for (int c = 0; c < 3; ++c) {
                const double d = mol.atoms[i].pos[c] - mol.atoms[j].pos[c];
                d2 += d * d;
            }
            if (d2 < 1e-20) throw std::domain_error("coincident atoms in nuclear repulsion");
            e += mol.atoms[i].z * mol.atoms[j].z / std::sqrt(d2);
        }
    return e;
}

} // namespace fermidyn
