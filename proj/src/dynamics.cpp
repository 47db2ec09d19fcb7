#include "fermidyn/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace fermidyn {

namespace {
using cd = std::complex<double>;
}

Eigen::MatrixXd MeanFieldFrame::dipole_along(const std::array<double, 3>& pol) const {
    return pol[0] * dipole[0] + pol[1] * dipole[1] + pol[2] * dipole[2];
}

MeanFieldFrame make_frame(const IntegralSet& ints, const ScfResult& scf) {
    MeanFieldFrame f;
    f.c = scf.c;
    f.hcore = ints.hcore;
    f.eri = ints.eri;
    f.dipole = ints.dipole;
    f.e_nuc = ints.e_nuc;
    f.m = ints.m;
    f.n_elec = scf.n_elec;
    if (f.n_elec % 2 != 0) throw std::invalid_argument("frame needs an even electron count");
    if (2 * f.m > 12)
        throw std::invalid_argument("spin-orbital register exceeds the 12-qubit simulator cap");
    return f;
}

std::vector<int> initial_permutation(const MeanFieldFrame& frame) {
    const int m = frame.m;
    std::vector<int> perm(2 * m);
    for (int w = 1; w <= m; ++w) perm[w - 1] = w;              // alpha_k on wire k
    for (int k = 1; k <= m; ++k) perm[2 * m - k] = m + k;      // beta_k on wire 2m+1-k
    return perm;
}

Statevector hf_state(const MeanFieldFrame& frame) {
    const int m = frame.m, nocc = frame.n_elec / 2;
    std::set<int> occ;
    for (int k = 1; k <= nocc; ++k) {
        occ.insert(k);             // alpha_k
        occ.insert(2 * m + 1 - k); // beta_k (mirrored wire)
    }
    return init_state(2 * m, occ);
}

Eigen::MatrixXd assemble_g_mo(const MeanFieldFrame& frame, const Eigen::MatrixXcd& rho_mo,
                              double e_field, const FieldPulse& pulse) {
    const int m = frame.m;
    if (rho_mo.rows() != m || rho_mo.cols() != m)
        throw std::invalid_argument("assemble_g_mo: density dimension mismatch");
    if ((rho_mo - rho_mo.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("assemble_g_mo: density is not Hermitian");

    const Eigen::MatrixXd rho_re = rho_mo.real();
    const Eigen::MatrixXd p_ao = frame.c * (2.0 * rho_re) * frame.c.transpose();
    const Eigen::MatrixXd f_ao = fock_from_density(frame.hcore, frame.eri, p_ao);
    const Eigen::MatrixXd h_ao = f_ao + e_field * frame.dipole_along(pulse.polarization);
    Eigen::MatrixXd g = frame.c.transpose() * h_ao * frame.c;
    g = 0.5 * (g + g.transpose()).eval(); // scrub roundoff asymmetry
    return g;
}

Eigen::MatrixXd assemble_g(const MeanFieldFrame& frame, const Eigen::MatrixXcd& rho_mo,
                           double e_field, const FieldPulse& pulse) {
    const int m = frame.m;
    const Eigen::MatrixXd g_mo = assemble_g_mo(frame, rho_mo, e_field, pulse);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    g.topLeftCorner(m, m) = g_mo;
    g.bottomRightCorner(m, m) = g_mo;
    return g;
}

namespace {

// Spatial density from the mode-dependent measurement of the spin register.
Eigen::MatrixXcd measure_density(const Statevector& state, const std::vector<int>& perm,
                                 int m, MeasureMode mode, long shots,
                                 unsigned long long seed) {
    if (mode == MeasureMode::z_only) {
        std::vector<double> occ;
        if (shots > 0) {
            const auto z = sample_z(state, shots, seed);
            std::vector<int> wire_of(2 * m);
            for (int w = 1; w <= 2 * m; ++w) wire_of[perm[w - 1] - 1] = w;
            occ.resize(2 * m);
            for (int p = 1; p <= 2 * m; ++p) occ[p - 1] = 0.5 * (1.0 - z[wire_of[p - 1] - 1]);
        } else {
            occ = occupations(state, perm);
        }
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(m, m);
        for (int p = 0; p < m; ++p) rho(p, p) = occ[p]; // alpha block
        return rho;
    }
    const Eigen::MatrixXcd rho_spin = one_rdm(state, perm);
    return rho_spin.topLeftCorner(m, m);
}

TrajectoryRow make_row(const MeanFieldFrame& frame, double t, double e_field_now,
                       const Eigen::MatrixXcd& rho_meas, const std::vector<double>& occ,
                       double norm, const FieldPulse& pulse) {
    const Eigen::MatrixXd p_ao = frame.c * (2.0 * rho_meas.real()) * frame.c.transpose();
    const Eigen::MatrixXd f_ao = fock_from_density(frame.hcore, frame.eri, p_ao);
    TrajectoryRow row;
    row.t = t;
    row.e_field = e_field_now;
    row.energy = total_energy(p_ao, frame.hcore, f_ao, frame.e_nuc);
    row.energy_with_field =
        row.energy +
        e_field_now * (p_ao.cwiseProduct(frame.dipole_along(pulse.polarization))).sum();
    row.norm = norm;
    row.occupations = occ;
    return row;
}

std::vector<double> reference_occupations(const Eigen::MatrixXcd& rho, int m) {
    std::vector<double> occ(2 * m);
    for (int p = 0; p < m; ++p) {
        occ[p] = rho(p, p).real();
        occ[m + p] = rho(p, p).real();
    }
    return occ;
}

long step_count(const RunOptions& opts) {
    if (opts.dt <= 0) throw std::invalid_argument("dt must be positive");
    if (opts.t_final < opts.dt) throw std::invalid_argument("t_final must be at least dt");
    return std::llround(opts.t_final / opts.dt);
}

} // namespace

StepResult hybrid_step(const Statevector& state, const std::vector<int>& perm,
                       const MeanFieldFrame& frame, const Eigen::MatrixXcd& rho_prev,
                       double t, double dt, const FieldPulse& pulse, const StepOptions& opts) {
    const double e_field = field_amplitude(t, pulse);
    const Eigen::MatrixXd g = assemble_g(frame, rho_prev, e_field, pulse);

    Circuit circ = trotter_step(g, dt, perm);
    if (opts.compress) circ = compress_ybe(circ);

    StepResult res;
    res.state = run_circuit(state, circ);
    res.permutation = circ.permutation;
    res.rho_measured =
        measure_density(res.state, res.permutation, frame.m, opts.mode, opts.shots, opts.seed);
    for (const auto& gate : circ.gates)
        (gate.kind == GateKind::PHASE ? res.phases : res.blocks) += 1;
    return res;
}

Trajectory run_tdhf(const MeanFieldFrame& frame, const RunOptions& opts) {
    opts.pulse.validate();
    const long steps = step_count(opts);
    if (opts.shots > 0 && opts.mode != MeasureMode::z_only)
        throw std::invalid_argument("finite-shot sampling is defined for z-only measurement");

    Statevector state = hf_state(frame);
    std::vector<int> perm = initial_permutation(frame);
    Eigen::MatrixXcd rho =
        measure_density(state, perm, frame.m, opts.mode, 0, opts.seed);

    Trajectory traj;
    traj.rows.reserve(steps + 1);
    traj.rows.push_back(make_row(frame, 0.0, field_amplitude(0.0, opts.pulse), rho,
                                 occupations(state, perm), state.norm(), opts.pulse));

    StepOptions sopts;
    sopts.mode = opts.mode;
    sopts.compress = opts.compress;
    sopts.shots = opts.shots;
    for (long k = 1; k <= steps; ++k) {
        const double t_prev = (k - 1) * opts.dt;
        const double t_field = opts.field_midpoint ? t_prev + 0.5 * opts.dt : t_prev;
        sopts.seed = opts.seed + static_cast<unsigned long long>(k);
        const auto step = hybrid_step(state, perm, frame, rho, t_field, opts.dt, opts.pulse, sopts);
        state = step.state;
        perm = step.permutation;
        rho = step.rho_measured;

        const double t_now = k * opts.dt;
        auto row = make_row(frame, t_now, field_amplitude(t_now, opts.pulse), rho,
                            occupations(state, perm), state.norm(), opts.pulse);
        traj.rows.push_back(std::move(row));
        if (!std::isfinite(traj.rows.back().energy))
            throw std::runtime_error("dynamics produced a non-finite energy at t=" +
                                     std::to_string(t_now));
    }
    return traj;
}

Trajectory reference_propagate(const MeanFieldFrame& frame, const RunOptions& opts) {
    opts.pulse.validate();
    const long steps = step_count(opts);
    const int m = frame.m;

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(m, m);
    for (int p = 0; p < frame.n_elec / 2; ++p) rho(p, p) = 1.0;

    auto feedback = [&](const Eigen::MatrixXcd& full) {
        if (opts.mode == MeasureMode::z_only) {
            Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(m, m);
            for (int p = 0; p < m; ++p) diag(p, p) = full(p, p).real();
            return diag;
        }
        return Eigen::MatrixXcd(full.real().cast<cd>());
    };

    Trajectory traj;
    traj.rows.reserve(steps + 1);
    Eigen::MatrixXcd rho_fb = feedback(rho);
    traj.rows.push_back(make_row(frame, 0.0, field_amplitude(0.0, opts.pulse), rho_fb,
                                 reference_occupations(rho, m), 1.0, opts.pulse));

    for (long k = 1; k <= steps; ++k) {
        const double t_prev = (k - 1) * opts.dt;
        const double t_field = opts.field_midpoint ? t_prev + 0.5 * opts.dt : t_prev;
        const double e_field = field_amplitude(t_field, opts.pulse);
        const Eigen::MatrixXd g = assemble_g_mo(frame, rho_fb, e_field, opts.pulse);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
        const Eigen::VectorXcd ph =
            (cd{0, -opts.dt} * es.eigenvalues().cast<cd>().array()).exp();
        const Eigen::MatrixXcd u =
            es.eigenvectors().cast<cd>() * ph.asDiagonal() * es.eigenvectors().transpose().cast<cd>();
        rho = u * rho * u.adjoint();
        rho_fb = feedback(rho);

        const double t_now = k * opts.dt;
        const double trace_norm = rho.real().trace() / (frame.n_elec / 2.0);
        traj.rows.push_back(make_row(frame, t_now, field_amplitude(t_now, opts.pulse), rho_fb,
                                     reference_occupations(rho, m), trace_norm, opts.pulse));
    }
    return traj;
}

TrajectoryComparison compare_trajectories(const Trajectory& a, const Trajectory& b) {
    if (a.rows.size() != b.rows.size())
        throw std::invalid_argument("trajectory grids differ in length");
    TrajectoryComparison cmp;
    double se = 0, sef = 0, socc = 0;
    long nocc = 0;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const auto& ra = a.rows[i];
        const auto& rb = b.rows[i];
        if (std::abs(ra.t - rb.t) > 1e-9)
            throw std::invalid_argument("trajectory time grids do not match");
        if (ra.occupations.size() != rb.occupations.size())
            throw std::invalid_argument("trajectory occupation columns do not match");
        const double de = std::abs(ra.energy - rb.energy);
        const double def = std::abs(ra.energy_with_field - rb.energy_with_field);
        cmp.max_energy = std::max(cmp.max_energy, de);
        cmp.max_energy_with_field = std::max(cmp.max_energy_with_field, def);
        cmp.max_e_field = std::max(cmp.max_e_field, std::abs(ra.e_field - rb.e_field));
        cmp.max_norm = std::max(cmp.max_norm, std::abs(ra.norm - rb.norm));
        se += de * de;
        sef += def * def;
        for (size_t p = 0; p < ra.occupations.size(); ++p) {
            const double d = std::abs(ra.occupations[p] - rb.occupations[p]);
            cmp.max_occupation = std::max(cmp.max_occupation, d);
            socc += d * d;
            ++nocc;
        }
    }
    const double n = static_cast<double>(a.rows.size());
    cmp.rms_energy = std::sqrt(se / n);
    cmp.rms_energy_with_field = std::sqrt(sef / n);
    cmp.rms_occupation = nocc ? std::sqrt(socc / nocc) : 0.0;
    return cmp;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    const size_t k = traj.rows.empty() ? 0 : traj.rows.front().occupations.size();
    out << "t,e_field,energy,energy_with_field,norm";
    for (size_t p = 1; p <= k; ++p) out << ",occ_" << p;
    out << "\n";
    char buf[64];
    auto put = [&](double x, char sep) {
        std::snprintf(buf, sizeof(buf), "%.12g", x);
        out << buf << sep;
    };
    for (const auto& r : traj.rows) {
        put(r.t, ',');
        put(r.e_field, ',');
        put(r.energy, ',');
        put(r.energy_with_field, ',');
        put(r.norm, k ? ',' : '\n');
        for (size_t p = 0; p < r.occupations.size(); ++p)
            put(r.occupations[p], p + 1 == r.occupations.size() ? '\n' : ',');
    }
    return out.str();
}

} // namespace fermidyn
