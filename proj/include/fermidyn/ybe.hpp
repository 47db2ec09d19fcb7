#pragma once

#include "fermidyn/circuit.hpp"

#include <array>

namespace fermidyn {

struct YbeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CompressError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Product of two same-pair match blocks is the angle-sum block
/// (angles wrapped to (-pi, pi]).
Gate merge_blocks(const Gate& b1, const Gate& b2);

struct ReflectResult {
    std::array<Gate, 3> gates;
    double residual = 0;     // max-abs deviation of the 8x8 unitaries
    double global_phase = 0; // e^{i phase} relating output to input
};

/// Rewrites a triple [g on (q1,q2), g' on (q2,q3), g'' on (q1,q2)] as
/// [h on (q2,q3), h' on (q1,q2), h'' on (q2,q3)] with the same 8x8 unitary
/// up to a global phase. Solved by damped least squares over the six block
/// angles plus one phase, multi-started from 8 fixed seeds. The mirrored
/// input pattern is accepted and reflects the other way.
ReflectResult ybe_reflect(const std::array<Gate, 3>& triple);

/// One-body image of a number-conserving free-fermion circuit: the mode
/// rotation v with v_pq = <p|U|q> on the single-particle sector, indexed by
/// wire. Throws if a gate is outside the free-fermion family or breaks
/// number conservation.
Eigen::MatrixXcd one_body_of_circuit(const Circuit& c);

struct CompressStats {
    int blocks_in = 0;
    int blocks_out = 0;
    int phases_out = 0;
    int reflections = 0;
    int merges = 0;
};

/// Canonicalizes a match-block/phase circuit by merge and YBE rewrites:
/// at most n(n-1)/2 blocks followed by at most n phase gates. Exact (up to
/// global phase); inputs whose phase layers cannot be commuted to the tail
/// exactly are rejected with CompressError.
Circuit compress_ybe(const Circuit& c, CompressStats* stats = nullptr);

/// Builds the canonical triangle directly from a one-body unitary: exactly
/// m(m-1)/2 blocks plus m phase gates whose one-body image reproduces u.
/// The permutation argument only tags the output circuit.
Circuit resynthesize(const Eigen::MatrixXcd& u, const std::vector<int>& perm);

} // namespace fermidyn
