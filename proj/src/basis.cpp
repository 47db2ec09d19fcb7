#include "fermidyn/basis.hpp"
#include "fermidyn/constants.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fermidyn {

namespace {

// Self-overlap of a contracted s function with primitive-normalized
// coefficients folded in.
double self_overlap(const Shell& sh) {
    double s = 0;
    for (const auto& a : sh.primitives)
        for (const auto& b : sh.primitives) {
            const double p = a.exponent + b.exponent;
            s += a.coeff * b.coeff * std::pow(kPi / p, 1.5);
        }
    return s;
}

struct ShellData {
    std::vector<Primitive> primitives; // raw exponents/coefficients
};

std::vector<ShellData> read_hydrogen_shells(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BasisError("cannot open basis data file: " + path);

    std::vector<ShellData> shells;
    std::string line;
    bool in_shell = false;
    int expected = 0;
    ShellData current;

    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;

        if (tok == "element") {
            std::string sym;
            ls >> sym;
            if (sym != "H") throw BasisError("basis data file is not for hydrogen: " + path);
        } else if (tok == "shell") {
            std::string am;
            ls >> am >> expected;
            if (am != "S") throw BasisError("only s shells supported, got " + am);
            in_shell = true;
            current.primitives.clear();
        } else if (tok == "end") {
            if (!in_shell || static_cast<int>(current.primitives.size()) != expected)
                throw BasisError("malformed shell block in " + path);
            shells.push_back(current);
            in_shell = false;
        } else if (in_shell) {
            Primitive p;
            p.exponent = std::stod(tok);
            if (!(ls >> p.coeff)) throw BasisError("malformed primitive line in " + path);
            if (p.exponent <= 0) throw BasisError("nonpositive exponent in " + path);
            current.primitives.push_back(p);
        } else {
            throw BasisError("unexpected token '" + tok + "' in " + path);
        }
    }
    if (shells.empty()) throw BasisError("no shells found in " + path);
    return shells;
}

} // namespace

void Shell::normalize() {
    // Fold the primitive norms into the coefficients, then scale the whole
    // contraction to unit self-overlap.
    for (auto& p : primitives) p.coeff *= std::pow(2.0 * p.exponent / kPi, 0.75);
    const double s = self_overlap(*this);
    if (s <= 0) throw BasisError("degenerate contraction");
    const double scale = 1.0 / std::sqrt(s);
    for (auto& p : primitives) p.coeff *= scale;
}

BasisSet build_basis(const Molecule& mol, const std::string& name,
                     const std::string& data_dir) {
    if (name != "sto-3g" && name != "6-31g")
        throw BasisError("unsupported basis '" + name + "' (expected sto-3g or 6-31g)");
    for (const auto& a : mol.atoms)
        if (a.z != 1)
            throw BasisError("unsupported element Z=" + std::to_string(a.z) +
                             " (s-only engine handles hydrogen)");

    const std::string dir = data_dir.empty() ? std::string(FERMIDYN_DATA_DIR) + "/basis"
                                             : data_dir;
    const auto shell_data = read_hydrogen_shells(dir + "/" + name + ".dat");

    BasisSet basis;
    for (const auto& atom : mol.atoms)
        for (const auto& sd : shell_data) {
            Shell sh;
            sh.center = atom.pos;
            sh.primitives = sd.primitives;
            sh.normalize();
            if (std::abs(self_overlap(sh) - 1.0) > 1e-10)
                throw BasisError("shell failed normalization check");
            basis.shells.push_back(sh);
        }
    return basis;
}

} // namespace fermidyn
