#include "fermidyn/scf.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

namespace fermidyn {

Eigen::MatrixXd orthogonalizer(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) throw ScfError("overlap eigendecomposition failed");
    const auto& vals = es.eigenvalues();
    if (vals.minCoeff() < 1e-10)
        throw ScfError("overlap matrix is near-singular (linear dependence)");
    return es.eigenvectors() * vals.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

Eigen::MatrixXd fock_from_density(const Eigen::MatrixXd& hcore, const EriTensor& eri,
                                  const Eigen::MatrixXd& p_ao) {
    const int m = static_cast<int>(hcore.rows());
    if (p_ao.rows() != m || p_ao.cols() != m || eri.dim() != m)
        throw std::invalid_argument("fock_from_density: dimension mismatch");
    Eigen::MatrixXd f = hcore;
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            double acc = 0;
            for (int r = 0; r < m; ++r)
                for (int s = 0; s < m; ++s)
                    acc += p_ao(r, s) * (eri(p, q, s, r) - 0.5 * eri(p, r, s, q));
            f(p, q) += acc;
        }
    return f;
}

double total_energy(const Eigen::MatrixXd& p_ao, const Eigen::MatrixXd& hcore,
                    const Eigen::MatrixXd& f_ao, double e_nuc) {
    return 0.5 * (p_ao.cwiseProduct(hcore + f_ao)).sum() + e_nuc;
}

ScfResult run_rhf(const IntegralSet& ints, int n_elec, const ScfOptions& opts) {
    if (n_elec < 0 || n_elec % 2 != 0)
        throw std::invalid_argument("run_rhf: n_elec must be even and nonnegative");
    if (n_elec > 2 * ints.m)
        throw std::invalid_argument("run_rhf: more electrons than spin orbitals");

    const int m = ints.m;
    const int n_occ = n_elec / 2;
    const Eigen::MatrixXd x = orthogonalizer(ints.s);

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd c;
    Eigen::VectorXd eps;
    double e_prev = 0;
    bool warned_degenerate = false;

    auto solve_fock = [&](const Eigen::MatrixXd& f) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * f * x);
        if (es.info() != Eigen::Success) throw ScfError("Fock diagonalization failed");
        eps = es.eigenvalues();
        c = x * es.eigenvectors();
    };

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const Eigen::MatrixXd f = fock_from_density(ints.hcore, ints.eri, p);
        const double e = total_energy(p, ints.hcore, f, ints.e_nuc);
        solve_fock(f);

        Eigen::MatrixXd p_new = Eigen::MatrixXd::Zero(m, m);
        if (n_occ > 0) {
            if (!warned_degenerate && n_occ < m && std::abs(eps(n_occ) - eps(n_occ - 1)) < 1e-9) {
                std::cerr << "warning: degenerate HOMO/LUMO at aufbau occupation\n";
                warned_degenerate = true;
            }
            const auto c_occ = c.leftCols(n_occ);
            p_new = 2.0 * c_occ * c_occ.transpose();
        }
        if (iter <= opts.damping_iters && opts.damping > 0)
            p_new = (1.0 - opts.damping) * p_new + opts.damping * p;

        const double de = e - e_prev;
        const double dp = (p_new - p).cwiseAbs().maxCoeff();
        if (opts.log) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "iter=%d E=%.12f dE=%.3e dP=%.3e", iter, e,
                          de, dp);
            opts.log(buf);
        }

        if (iter > 1 && std::abs(de) < opts.e_tol && dp < opts.p_tol) {
            ScfResult res;
            res.c = c;
            res.eps = eps;
            res.p_ao = p;
            res.e_hf = e;
            res.n_elec = n_elec;
            res.iterations = iter;
            return res;
        }
        p = p_new;
        e_prev = e;
    }
    throw ScfError("SCF failed to converge in " + std::to_string(opts.max_iter) +
                   " iterations");
}

} // namespace fermidyn
