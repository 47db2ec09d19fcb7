#pragma once

#include "fermidyn/constants.hpp"
#include "fermidyn/pulse.hpp"
#include "fermidyn/scf.hpp"
#include "fermidyn/statevector.hpp"
#include "fermidyn/ybe.hpp"

namespace fermidyn {

/// Fixed ground-state MO frame for the dynamics. Spin orbitals are labeled
/// [alpha_1..alpha_M, beta_1..beta_M]; on the wire register the beta sector
/// is laid out mirrored (beta_k starts on wire 2M+1-k) so that both spin
/// sectors see identical brickwork orderings.
struct MeanFieldFrame {
    Eigen::MatrixXd c;
    Eigen::MatrixXd hcore;
    EriTensor eri;
    std::array<Eigen::MatrixXd, 3> dipole;
    double e_nuc = 0;
    int m = 0;      // spatial orbitals
    int n_elec = 0; // even

    int n_spin_orbitals() const { return 2 * m; }
    Eigen::MatrixXd dipole_along(const std::array<double, 3>& pol) const;
};

MeanFieldFrame make_frame(const IntegralSet& ints, const ScfResult& scf);

/// Initial wire->label permutation of the mirrored spin layout.
std::vector<int> initial_permutation(const MeanFieldFrame& frame);

/// HF statevector on 2M wires (lowest n_elec/2 orbitals doubly occupied).
Statevector hf_state(const MeanFieldFrame& frame);

enum class MeasureMode { z_only, full_rdm };

/// Spatial mean-field matrix in the fixed MO frame:
/// G = C^T (F[P_ao] + e_field * D_pol) C with P_ao = C (2 Re rho) C^T.
/// The real part keeps G symmetric; both propagation paths share it.
Eigen::MatrixXd assemble_g_mo(const MeanFieldFrame& frame, const Eigen::MatrixXcd& rho_mo,
                              double e_field, const FieldPulse& pulse);

/// Spin-orbital block diagonal of assemble_g_mo over the 2M labels.
Eigen::MatrixXd assemble_g(const MeanFieldFrame& frame, const Eigen::MatrixXcd& rho_mo,
                           double e_field, const FieldPulse& pulse);

struct StepOptions {
    MeasureMode mode = MeasureMode::full_rdm;
    bool compress = true;
    long shots = 0; // 0 = exact expectations (z_only mode only)
    unsigned long long seed = 0;
};

struct StepResult {
    Statevector state;
    std::vector<int> permutation;  // wire -> label after the step
    Eigen::MatrixXcd rho_measured; // spatial M x M, mode-truncated
    int blocks = 0;                // gate count diagnostics
    int phases = 0;
};

/// One measure-rebuild-propagate cycle: builds G from rho_prev and the field
/// at time t, emits (optionally compressed) trotter circuit, runs it, and
/// measures per mode.
StepResult hybrid_step(const Statevector& state, const std::vector<int>& perm,
                       const MeanFieldFrame& frame, const Eigen::MatrixXcd& rho_prev,
                       double t, double dt, const FieldPulse& pulse, const StepOptions& opts);

struct TrajectoryRow {
    double t = 0;
    double e_field = 0;
    double energy = 0;            // field-free HF functional of the measured density
    double energy_with_field = 0; // plus e_field * Tr(P D_pol)
    double norm = 1;
    std::vector<double> occupations; // spin-orbital labels alpha_1..M, beta_1..M
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
};

struct RunOptions {
    FieldPulse pulse;
    double dt = 0.05;
    double t_final = 6 * kPi / 0.10;
    MeasureMode mode = MeasureMode::full_rdm;
    bool compress = true;
    bool field_midpoint = false; // evaluate E(t) at the step midpoint
    long shots = 0;
    unsigned long long seed = 0;
};

/// Hybrid quantum/classical propagation loop on the statevector simulator.
Trajectory run_tdhf(const MeanFieldFrame& frame, const RunOptions& opts);

/// Exact dense reference: rho(t+dt) = u rho u^T* with u = exp(-i G dt) by
/// eigendecomposition; the feedback density is truncated per mode exactly as
/// in the hybrid loop, the propagated density keeps full coherence.
Trajectory reference_propagate(const MeanFieldFrame& frame, const RunOptions& opts);

struct TrajectoryComparison {
    double max_energy = 0, rms_energy = 0;
    double max_energy_with_field = 0, rms_energy_with_field = 0;
    double max_occupation = 0, rms_occupation = 0;
    double max_e_field = 0;
    double max_norm = 0;
};

/// Per-column deviations; throws on mismatched time grids.
TrajectoryComparison compare_trajectories(const Trajectory& a, const Trajectory& b);

/// CSV with header t,e_field,energy,energy_with_field,norm,occ_1,...,occ_k
/// at 12 significant digits.
std::string trajectory_csv(const Trajectory& traj);

} // namespace fermidyn
