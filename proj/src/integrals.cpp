#include "fermidyn/integrals.hpp"
#include "fermidyn/constants.hpp"

#include <cmath>
#include <sstream>

namespace fermidyn {

double boys_f0(double x) {
    if (x < 0) throw std::domain_error("boys_f0: negative argument");
    if (x < 1e-7) return 1.0 - x / 3.0 + x * x / 10.0;
    const double sx = std::sqrt(x);
    return 0.5 * std::sqrt(kPi / x) * std::erf(sx);
}

namespace {

struct PrimitivePair {
    double p;                 // a + b
    double k;                 // exp(-mu |A-B|^2)
    std::array<double, 3> pc; // product center
};

PrimitivePair pair_data(double a, const std::array<double, 3>& ca,
                        double b, const std::array<double, 3>& cb) {
    PrimitivePair pp;
    pp.p = a + b;
    double ab2 = 0;
    for (int c = 0; c < 3; ++c) {
        const double d = ca[c] - cb[c];
        ab2 += d * d;
        pp.pc[c] = (a * ca[c] + b * cb[c]) / pp.p;
    }
    pp.k = std::exp(-a * b / pp.p * ab2);
    return pp;
}

double dist2(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double d2 = 0;
    for (int c = 0; c < 3; ++c) {
        const double d = a[c] - b[c];
        d2 += d * d;
    }
    return d2;
}

// Accumulates f(primA, primB, pair) over the contraction.
template <typename F>
double contract_pairs(const Shell& sa, const Shell& sb, F&& f) {
    double acc = 0;
    for (const auto& a : sa.primitives)
        for (const auto& b : sb.primitives) {
            const auto pp = pair_data(a.exponent, sa.center, b.exponent, sb.center);
            acc += a.coeff * b.coeff * f(a.exponent, b.exponent, pp);
        }
    return acc;
}

} // namespace

Eigen::MatrixXd overlap_matrix(const BasisSet& basis) {
    if (basis.shells.empty()) throw BasisError("overlap_matrix: empty basis");
    const int m = basis.size();
    Eigen::MatrixXd s(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            s(i, j) = contract_pairs(basis.shells[i], basis.shells[j],
                                     [](double, double, const PrimitivePair& pp) {
                                         return std::pow(kPi / pp.p, 1.5) * pp.k;
                                     });
            s(j, i) = s(i, j);
        }
    return s;
}

Eigen::MatrixXd kinetic_matrix(const BasisSet& basis) {
    const int m = basis.size();
    Eigen::MatrixXd t(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const auto& sa = basis.shells[i];
            const auto& sb = basis.shells[j];
            const double ab2 = dist2(sa.center, sb.center);
            t(i, j) = contract_pairs(sa, sb, [ab2](double a, double b, const PrimitivePair& pp) {
                const double mu = a * b / pp.p;
                return mu * (3.0 - 2.0 * mu * ab2) * std::pow(kPi / pp.p, 1.5) * pp.k;
            });
            t(j, i) = t(i, j);
        }
    return t;
}

Eigen::MatrixXd nuclear_attraction_matrix(const BasisSet& basis, const Molecule& mol) {
    const int m = basis.size();
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double vij = 0;
            for (const auto& atom : mol.atoms) {
                vij -= atom.z * contract_pairs(
                                    basis.shells[i], basis.shells[j],
                                    [&atom](double, double, const PrimitivePair& pp) {
                                        const double r2 = dist2(pp.pc, atom.pos);
                                        return 2.0 * kPi / pp.p * pp.k * boys_f0(pp.p * r2);
                                    });
            }
            v(i, j) = vij;
            v(j, i) = vij;
        }
    return v;
}

Eigen::MatrixXd core_hamiltonian(const BasisSet& basis, const Molecule& mol) {
    return kinetic_matrix(basis) + nuclear_attraction_matrix(basis, mol);
}

EriTensor eri_tensor(const BasisSet& basis) {
    const int m = basis.size();
    EriTensor g(m);
    // Unique (pq|rs) with 8-fold symmetry; the loop fills every copy.
    for (int p = 0; p < m; ++p)
        for (int q = 0; q <= p; ++q)
            for (int r = 0; r <= p; ++r)
                for (int s = 0; s <= (r == p ? q : r); ++s) {
                    double val = 0;
                    const auto& sp = basis.shells[p];
                    const auto& sq = basis.shells[q];
                    const auto& sr = basis.shells[r];
                    const auto& ss = basis.shells[s];
                    for (const auto& a : sp.primitives)
                        for (const auto& b : sq.primitives) {
                            const auto ab = pair_data(a.exponent, sp.center, b.exponent, sq.center);
                            for (const auto& c : sr.primitives)
                                for (const auto& d : ss.primitives) {
                                    const auto cd = pair_data(c.exponent, sr.center,
                                                              d.exponent, ss.center);
                                    const double alpha = ab.p * cd.p / (ab.p + cd.p);
                                    const double pq2 = dist2(ab.pc, cd.pc);
                                    val += a.coeff * b.coeff * c.coeff * d.coeff *
                                           2.0 * std::pow(kPi, 2.5) /
                                           (ab.p * cd.p * std::sqrt(ab.p + cd.p)) *
                                           ab.k * cd.k * boys_f0(alpha * pq2);
                                }
                        }
                    g(p, q, r, s) = val;
                    g(q, p, r, s) = val;
                    g(p, q, s, r) = val;
                    g(q, p, s, r) = val;
                    g(r, s, p, q) = val;
                    g(s, r, p, q) = val;
                    g(r, s, q, p) = val;
                    g(s, r, q, p) = val;
                }
    return g;
}

std::array<Eigen::MatrixXd, 3> dipole_matrices(const BasisSet& basis) {
    const int m = basis.size();
    std::array<Eigen::MatrixXd, 3> d;
    for (auto& mat : d) mat = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            for (int c = 0; c < 3; ++c) {
                // <G_A| r_c |G_B> = P_c * S_AB for s functions.
                d[c](i, j) = contract_pairs(basis.shells[i], basis.shells[j],
                                            [c](double, double, const PrimitivePair& pp) {
                                                return pp.pc[c] * std::pow(kPi / pp.p, 1.5) * pp.k;
                                            });
                d[c](j, i) = d[c](i, j);
            }
    return d;
}

IntegralSet compute_integrals(const Molecule& mol, const BasisSet& basis) {
    IntegralSet ints;
    ints.m = basis.size();
    ints.n_elec = mol.total_charge_electrons();
    ints.s = overlap_matrix(basis);
    ints.hcore = core_hamiltonian(basis, mol);
    ints.eri = eri_tensor(basis);
    ints.dipole = dipole_matrices(basis);
    ints.e_nuc = nuclear_repulsion(mol);
    return ints;
}

IntegralSet load_fcidump(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    IntegralSet ints;
    bool have_header = false;
    int dipole_axis = -1;

    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;

        if (!have_header) {
            // Header: M=<int> NELEC=<int> ENUC=<real>
            auto parse_kv = [](const std::string& kv, const std::string& key) {
                if (kv.rfind(key + "=", 0) != 0)
                    throw ParseError("integral file header: expected " + key + "=, got " + kv);
                return kv.substr(key.size() + 1);
            };
            std::string nelec_kv, enuc_kv;
            if (!(ls >> nelec_kv >> enuc_kv))
                throw ParseError("integral file: missing header fields");
            ints.m = std::stoi(parse_kv(tok, "M"));
            ints.n_elec = std::stoi(parse_kv(nelec_kv, "NELEC"));
            ints.e_nuc = std::stod(parse_kv(enuc_kv, "ENUC"));
            if (ints.m <= 0) throw ParseError("integral file: M must be positive");
            ints.s = Eigen::MatrixXd::Identity(ints.m, ints.m);
            ints.hcore = Eigen::MatrixXd::Zero(ints.m, ints.m);
            ints.eri = EriTensor(ints.m);
            for (auto& d : ints.dipole) d = Eigen::MatrixXd::Zero(ints.m, ints.m);
            have_header = true;
            continue;
        }

        if (tok == "DIPOLE") {
            std::string axis;
            if (!(ls >> axis) || axis.size() != 1 || axis[0] < 'x' || axis[0] > 'z')
                throw ParseError("integral file: bad DIPOLE section tag");
            dipole_axis = axis[0] - 'x';
            continue;
        }

        const double value = std::stod(tok);
        auto check = [&](int idx) {
            if (idx < 0 || idx > ints.m)
                throw ParseError("integral file: orbital index out of range");
        };

        if (dipole_axis >= 0) {
            int p, q;
            if (!(ls >> p >> q)) throw ParseError("integral file: bad dipole record");
            check(p); check(q);
            if (p == 0 || q == 0) throw ParseError("integral file: dipole index must be 1-based");
            ints.dipole[dipole_axis](p - 1, q - 1) = value;
            ints.dipole[dipole_axis](q - 1, p - 1) = value;
            continue;
        }

        int p, q, r, s;
        if (!(ls >> p >> q >> r >> s)) throw ParseError("integral file: bad record");
        check(p); check(q); check(r); check(s);
        if (p == 0) throw ParseError("integral file: record with p=0");
        if (r == 0 && s == 0) {
            if (q == 0) throw ParseError("integral file: reserved record shape (q=r=s=0)");
            ints.hcore(p - 1, q - 1) = value;
            ints.hcore(q - 1, p - 1) = value;
        } else if (r > 0 && s > 0 && q > 0) {
            const int a = p - 1, b = q - 1, c = r - 1, d = s - 1;
            auto& g = ints.eri;
            g(a, b, c, d) = value; g(b, a, c, d) = value;
            g(a, b, d, c) = value; g(b, a, d, c) = value;
            g(c, d, a, b) = value; g(d, c, a, b) = value;
            g(c, d, b, a) = value; g(d, c, b, a) = value;
        } else {
            throw ParseError("integral file: malformed index pattern");
        }
    }

    if (!have_header) throw ParseError("integral file: missing header");
    return ints;
}

std::string save_fcidump(const IntegralSet& ints) {
    std::ostringstream out;
    out.precision(16);
    out << "M=" << ints.m << " NELEC=" << ints.n_elec << " ENUC=" << ints.e_nuc << "\n";
    for (int p = 0; p < ints.m; ++p)
        for (int q = 0; q <= p; ++q)
            for (int r = 0; r <= p; ++r)
                for (int s = 0; s <= (r == p ? q : r); ++s)
                    if (ints.eri(p, q, r, s) != 0.0)
                        out << ints.eri(p, q, r, s) << " " << p + 1 << " " << q + 1 << " "
                            << r + 1 << " " << s + 1 << "\n";
    for (int p = 0; p < ints.m; ++p)
        for (int q = 0; q <= p; ++q)
            if (ints.hcore(p, q) != 0.0)
                out << ints.hcore(p, q) << " " << p + 1 << " " << q + 1 << " 0 0\n";
    for (int c = 0; c < 3; ++c) {
        if (ints.dipole[c].size() == 0 || ints.dipole[c].isZero(0.0)) continue;
        out << "DIPOLE " << static_cast<char>('x' + c) << "\n";
        for (int p = 0; p < ints.m; ++p)
            for (int q = 0; q <= p; ++q)
                if (ints.dipole[c](p, q) != 0.0)
                    out << ints.dipole[c](p, q) << " " << p + 1 << " " << q + 1 << "\n";
    }
    return out.str();
}

IntegralSet transform_integrals(const IntegralSet& ints, const Eigen::MatrixXd& x) {
    IntegralSet out;
    const int m = static_cast<int>(x.cols());
    out.m = m;
    out.n_elec = ints.n_elec;
    out.e_nuc = ints.e_nuc;
    out.s = x.transpose() * ints.s * x;
    out.hcore = x.transpose() * ints.hcore * x;
    for (int c = 0; c < 3; ++c) out.dipole[c] = x.transpose() * ints.dipole[c] * x;

    // Four quarter transforms.
    const int n = ints.m;
    std::vector<double> t1(static_cast<size_t>(m) * n * n * n, 0.0);
    auto idx = [](int a, int b, int c, int d, int B, int C, int D) {
        return ((static_cast<size_t>(a) * B + b) * C + c) * D + d;
    };
    for (int p = 0; p < m; ++p)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double acc = 0;
                    for (int a = 0; a < n; ++a) acc += x(a, p) * ints.eri(a, b, c, d);
                    t1[idx(p, b, c, d, n, n, n)] = acc;
                }
    std::vector<double> t2(static_cast<size_t>(m) * m * n * n, 0.0);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double acc = 0;
                    for (int b = 0; b < n; ++b) acc += x(b, q) * t1[idx(p, b, c, d, n, n, n)];
                    t2[idx(p, q, c, d, m, n, n)] = acc;
                }
    std::vector<double> t3(static_cast<size_t>(m) * m * m * n, 0.0);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (int r = 0; r < m; ++r)
                for (int d = 0; d < n; ++d) {
                    double acc = 0;
                    for (int c = 0; c < n; ++c) acc += x(c, r) * t2[idx(p, q, c, d, m, n, n)];
                    t3[idx(p, q, r, d, m, m, n)] = acc;
                }
    out.eri = EriTensor(m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (int r = 0; r < m; ++r)
                for (int s = 0; s < m; ++s) {
                    double acc = 0;
                    for (int d = 0; d < n; ++d) acc += x(d, s) * t3[idx(p, q, r, d, m, m, n)];
                    out.eri(p, q, r, s) = acc;
                }
    return out;
}

} // namespace fermidyn
