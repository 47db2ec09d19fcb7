#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

using fermidyn::BasisSet;
using fermidyn::IntegralSet;
using fermidyn::Molecule;
using fermidyn::Shell;

namespace {

constexpr double kPi = 3.14159265358979323846;

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, tol, 48);
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

struct Grid1d {
    std::vector<double> x, w;
    Grid1d(int n, double a, double b) {
        gauss_legendre(n, x, w);
        for (int i = 0; i < n; ++i) {
            x[i] = 0.5 * (b - a) * x[i] + 0.5 * (a + b);
            w[i] *= 0.5 * (b - a);
        }
    }
};

double prim_value(double exponent, const std::array<double, 3>& center, double rx, double ry,
                  double rz) {
    const double dx = rx - center[0], dy = ry - center[1], dz = rz - center[2];
    return std::exp(-exponent * (dx * dx + dy * dy + dz * dz));
}

double contracted_value(const Shell& s, double rx, double ry, double rz) {
    double v = 0;
    for (const auto& p : s.primitives) v += p.coeff * prim_value(p.exponent, s.center, rx, ry, rz);
    return v;
}

// Box quadrature over the region covering both contracted shells.
double box_quadrature(const Shell& a, const Shell& b,
                      const std::function<double(double, double, double)>& f) {
    double lo[3], hi[3];
    for (int c = 0; c < 3; ++c) {
        lo[c] = std::min(a.center[c], b.center[c]) - 9.0;
        hi[c] = std::max(a.center[c], b.center[c]) + 9.0;
    }
    const int n = 72;
    Grid1d gx(n, lo[0], hi[0]), gy(n, lo[1], hi[1]), gz(n, lo[2], hi[2]);
    double acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double inner = 0;
            for (int k = 0; k < n; ++k) inner += gz.w[k] * f(gx.x[i], gy.x[j], gz.x[k]);
            acc += gx.w[i] * gy.w[j] * inner;
        }
    return acc;
}

} // namespace

double boys_f0(double x) {
    return adaptive_simpson([x](double t) { return std::exp(-x * t * t); }, 0.0, 1.0, 1e-13);
}

double overlap(const Shell& a, const Shell& b) {
    return box_quadrature(a, b, [&](double x, double y, double z) {
        return contracted_value(a, x, y, z) * contracted_value(b, x, y, z);
    });
}

double dipole(const Shell& a, const Shell& b, int axis) {
    return box_quadrature(a, b, [&](double x, double y, double z) {
        const double r[3] = {x, y, z};
        return contracted_value(a, x, y, z) * r[axis] * contracted_value(b, x, y, z);
    });
}

double kinetic(const Shell& a, const Shell& b) {
    // Ket under -1/2 laplacian: -(4 b^2 |r-B|^2 - 6 b) g_b / 2.
    return box_quadrature(a, b, [&](double x, double y, double z) {
        double ket = 0;
        for (const auto& p : b.primitives) {
            const double dx = x - b.center[0], dy = y - b.center[1], dz = z - b.center[2];
            const double r2 = dx * dx + dy * dy + dz * dz;
            ket += p.coeff * (-0.5) * (4 * p.exponent * p.exponent * r2 - 6 * p.exponent) *
                   prim_value(p.exponent, b.center, x, y, z);
        }
        return contracted_value(a, x, y, z) * ket;
    });
}

double attraction(const Shell& a, const Shell& b, const Molecule& mol) {
    // Spherical grid centered at each nucleus; the radial Jacobian cancels
    // the singularity (r^2 dr / r = r dr).
    double total = 0;
    const int nr = 140, nt = 40, np = 40;
    for (const auto& atom : mol.atoms) {
        Grid1d gr(nr, 0.0, 18.0);
        Grid1d gt(nt, 0.0, kPi);
        Grid1d gp(np, 0.0, 2 * kPi);
        double acc = 0;
        for (int i = 0; i < nr; ++i) {
            const double r = gr.x[i];
            double theta_acc = 0;
            for (int j = 0; j < nt; ++j) {
                const double st = std::sin(gt.x[j]), ct = std::cos(gt.x[j]);
                double phi_acc = 0;
                for (int k = 0; k < np; ++k) {
                    const double x = atom.pos[0] + r * st * std::cos(gp.x[k]);
                    const double y = atom.pos[1] + r * st * std::sin(gp.x[k]);
                    const double z = atom.pos[2] + r * ct;
                    phi_acc +=
                        gp.w[k] * contracted_value(a, x, y, z) * contracted_value(b, x, y, z);
                }
                theta_acc += gt.w[j] * st * phi_acc;
            }
            acc += gr.w[i] * r * theta_acc;
        }
        total -= atom.z * acc;
    }
    return total;
}

double eri(const Shell& a, const Shell& b, const Shell& c, const Shell& d) {
    // 1/r12 = (2/sqrt(pi)) integral_0^inf exp(-u^2 r12^2) du; for fixed u the
    // 6D integral factors into per-axis 2D Gauss-Legendre integrals.
    const int n2 = 48;
    auto axis_integral = [&](double pa, double ca, double pb, double cb, double pc, double cc,
                             double pd, double cd_, double u) {
        const double lo1 = std::min(ca, cb) - 7.5, hi1 = std::max(ca, cb) + 7.5;
        const double lo2 = std::min(cc, cd_) - 7.5, hi2 = std::max(cc, cd_) + 7.5;
        Grid1d g1(n2, lo1, hi1), g2(n2, lo2, hi2);
        double acc = 0;
        for (int i = 0; i < n2; ++i) {
            const double x1 = g1.x[i];
            const double f1 =
                std::exp(-pa * (x1 - ca) * (x1 - ca) - pb * (x1 - cb) * (x1 - cb));
            double inner = 0;
            for (int j = 0; j < n2; ++j) {
                const double x2 = g2.x[j];
                const double f2 =
                    std::exp(-pc * (x2 - cc) * (x2 - cc) - pd * (x2 - cd_) * (x2 - cd_));
                inner += g2.w[j] * f2 * std::exp(-u * u * (x1 - x2) * (x1 - x2));
            }
            acc += g1.w[i] * f1 * inner;
        }
        return acc;
    };

    double total = 0;
    const int nu = 40;
    Grid1d gu(nu, 0.0, 1.0); // u = s/(1-s)
    for (const auto& pa : a.primitives)
        for (const auto& pb : b.primitives)
            for (const auto& pc : c.primitives)
                for (const auto& pd : d.primitives) {
                    double u_acc = 0;
                    for (int t = 0; t < nu; ++t) {
                        const double s = gu.x[t];
                        const double u = s / (1.0 - s);
                        const double jac = 1.0 / ((1.0 - s) * (1.0 - s));
                        double prod = 1.0;
                        for (int axis = 0; axis < 3; ++axis)
                            prod *= axis_integral(pa.exponent, a.center[axis], pb.exponent,
                                                  b.center[axis], pc.exponent, c.center[axis],
                                                  pd.exponent, d.center[axis], u);
                        u_acc += gu.w[t] * jac * prod;
                    }
                    total += pa.coeff * pb.coeff * pc.coeff * pd.coeff *
                             (2.0 / std::sqrt(kPi)) * u_acc;
                }
    return total;
}

IntegralSet integral_set(const Molecule& mol, const BasisSet& basis) {
    IntegralSet ints;
    const int m = basis.size();
    ints.m = m;
    ints.n_elec = mol.total_charge_electrons();
    ints.e_nuc = fermidyn::nuclear_repulsion(mol);
    ints.s.resize(m, m);
    ints.hcore.resize(m, m);
    for (auto& dmat : ints.dipole) dmat.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            ints.s(i, j) = ints.s(j, i) = overlap(basis.shells[i], basis.shells[j]);
            const double t = kinetic(basis.shells[i], basis.shells[j]);
            const double v = attraction(basis.shells[i], basis.shells[j], mol);
            ints.hcore(i, j) = ints.hcore(j, i) = t + v;
            for (int c = 0; c < 3; ++c)
                ints.dipole[c](i, j) = ints.dipole[c](j, i) =
                    dipole(basis.shells[i], basis.shells[j], c);
        }
    ints.eri = fermidyn::EriTensor(m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q <= p; ++q)
            for (int r = 0; r <= p; ++r)
                for (int s = 0; s <= (r == p ? q : r); ++s) {
                    const double val =
                        eri(basis.shells[p], basis.shells[q], basis.shells[r], basis.shells[s]);
                    auto& g = ints.eri;
                    g(p, q, r, s) = g(q, p, r, s) = g(p, q, s, r) = g(q, p, s, r) = val;
                    g(r, s, p, q) = g(s, r, p, q) = g(r, s, q, p) = g(s, r, q, p) = val;
                }
    return ints;
}

double rhf_energy(const IntegralSet& ints, int n_elec) {
    const int m = ints.m;
    const int nocc = n_elec / 2;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    double e_prev = 1e9;
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::MatrixXd jmat = Eigen::MatrixXd::Zero(m, m);
        Eigen::MatrixXd kmat = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int r = 0; r < m; ++r)
                    for (int s = 0; s < m; ++s) {
                        jmat(i, j) += ints.eri(i, j, r, s) * p(s, r);
                        kmat(i, j) += ints.eri(i, r, j, s) * p(s, r);
                    }
        const Eigen::MatrixXd f = ints.hcore + jmat - 0.5 * kmat;
        const double e = 0.5 * (p.cwiseProduct(ints.hcore + f)).sum() + ints.e_nuc;
        if (std::abs(e - e_prev) < 1e-12 && iter > 1) return e;
        e_prev = e;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(f, ints.s);
        const Eigen::MatrixXd c_occ = ges.eigenvectors().leftCols(nocc);
        p = 2.0 * c_occ * c_occ.transpose();
    }
    return e_prev;
}

Eigen::MatrixXcd jw_one_body_hamiltonian(const Eigen::MatrixXd& g) {
    const int n = static_cast<int>(g.rows());
    const long dim = 1L << n;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    auto bit = [n](long x, int mode) { return (x >> (n - mode)) & 1L; };
    for (long x = 0; x < dim; ++x)
        for (int q = 1; q <= n; ++q) {
            if (!bit(x, q)) continue;
            int sign_q = 0;
            for (int mm = 1; mm < q; ++mm) sign_q += static_cast<int>(bit(x, mm));
            const long x1 = x ^ (1L << (n - q));
            for (int p = 1; p <= n; ++p) {
                if (g(p - 1, q - 1) == 0.0 || bit(x1, p)) continue;
                int sign_p = 0;
                for (int mm = 1; mm < p; ++mm) sign_p += static_cast<int>(bit(x1, mm));
                const long y = x1 | (1L << (n - p));
                const double sign = ((sign_q + sign_p) % 2 == 0) ? 1.0 : -1.0;
                h(y, x) += sign * g(p - 1, q - 1);
            }
        }
    return h;
}

Eigen::MatrixXcd exp_hermitian(const Eigen::MatrixXcd& h, std::complex<double> scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXcd ph =
        (scale * es.eigenvalues().cast<std::complex<double>>().array()).exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

double phase_dist(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::Index imax = 0, jmax = 0;
    a.cwiseAbs().maxCoeff(&imax, &jmax);
    if (std::abs(b(imax, jmax)) < 1e-300) return (a - b).cwiseAbs().maxCoeff();
    const std::complex<double> phase = a(imax, jmax) / b(imax, jmax);
    const std::complex<double> unit = phase / std::abs(phase);
    return (a - unit * b).cwiseAbs().maxCoeff();
}

} // namespace oracles
