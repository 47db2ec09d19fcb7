#include "fermidyn/ybe.hpp"
#include "fermidyn/constants.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace fermidyn;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd triple_unitary_of(const std::array<Gate, 3>& triple, int n) {
    Circuit c(n);
    c.gates = {triple[0], triple[1], triple[2]};
    return circuit_unitary(c);
}

Eigen::MatrixXd random_symmetric(int n, unsigned seed, bool uniform_diag) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Eigen::MatrixXd g(n, n);
    const double diag = val(rng);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) g(i, j) = g(j, i) = (i == j && uniform_diag) ? diag : val(rng);
    return g;
}

Circuit trotter_chain(const Eigen::MatrixXd& g, double dt, int steps) {
    const int n = static_cast<int>(g.rows());
    Circuit all(n);
    std::vector<int> perm = Circuit::identity_permutation(n);
    for (int k = 0; k < steps; ++k) {
        const auto step = trotter_step(g, dt, perm);
        all.gates.insert(all.gates.end(), step.gates.begin(), step.gates.end());
        perm = step.permutation;
    }
    all.permutation = perm;
    return all;
}

int count_blocks(const Circuit& c) {
    int blocks = 0;
    for (const auto& g : c.gates)
        if (g.kind != GateKind::PHASE) ++blocks;
    return blocks;
}

} // namespace

TEST_CASE("merge identity") {
    const auto b = merge_blocks(Gate::match_block(1, 2, 0.4, -0.9),
                                Gate::match_block(1, 2, 0.0, 0.0));
    CHECK(b.a1 == 0.4);
    CHECK(b.a2 == -0.9);

    const auto inv = merge_blocks(Gate::match_block(1, 2, 0.4, -0.9),
                                  Gate::match_block(1, 2, -0.4, 0.9));
    CHECK(std::abs(inv.a1) < 1e-15);
    CHECK(std::abs(inv.a2) < 1e-15);

    const auto sum = merge_blocks(Gate::match_block(1, 2, 0.3, 0.7),
                                  Gate::match_block(1, 2, 0.5, 0.1));
    CHECK_THAT(sum.a1, Catch::Matchers::WithinAbs(0.8, 1e-15));
    CHECK_THAT(sum.a2, Catch::Matchers::WithinAbs(0.8, 1e-15));

    // Dense product oracle over random draws (up to global phase).
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int draw = 0; draw < 200; ++draw) {
        const Gate b1 = Gate::match_block(1, 2, ang(rng), ang(rng));
        const Gate b2 = Gate::match_block(1, 2, ang(rng), ang(rng));
        const Gate merged = merge_blocks(b1, b2);
        const Eigen::MatrixXcd prod = gate_unitary(b2) * gate_unitary(b1);
        CHECK(oracles::phase_dist(prod, gate_unitary(merged)) < 1e-12);
    }

    CHECK_THROWS_AS(merge_blocks(Gate::match_block(1, 2, 0.1, 0.1),
                                 Gate::match_block(2, 3, 0.1, 0.1)),
                    YbeError);
}

TEST_CASE("ybe reflection") {
    // Identity triple stays an identity operation.
    const std::array<Gate, 3> ident{Gate::match_block(1, 2, 0, 0),
                                    Gate::match_block(2, 3, 0, 0),
                                    Gate::match_block(1, 2, 0, 0)};
    const auto rid = ybe_reflect(ident);
    CHECK(rid.residual < 1e-10);
    CHECK(oracles::phase_dist(triple_unitary_of(ident, 3),
                              triple_unitary_of(rid.gates, 3)) < 1e-10);

    // Braid relation of fermionic swaps.
    const std::array<Gate, 3> braid{Gate::fswap(1, 2, kPi / 2), Gate::fswap(2, 3, kPi / 2),
                                    Gate::fswap(1, 2, kPi / 2)};
    const auto rb = ybe_reflect(braid);
    CHECK(rb.residual < 1e-10);
    CHECK(oracles::phase_dist(triple_unitary_of(braid, 3),
                              triple_unitary_of(rb.gates, 3)) < 1e-10);

    // Random swap-merged (locked) blocks.
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int draw = 0; draw < 30; ++draw) {
        const double t1 = ang(rng), t2 = ang(rng), t3 = ang(rng);
        const std::array<Gate, 3> triple{Gate::match_block(1, 2, t1, t1),
                                         Gate::match_block(2, 3, t2, t2),
                                         Gate::match_block(1, 2, t3, t3)};
        const auto r = ybe_reflect(triple);
        CHECK(r.residual < 1e-10);
        CHECK(r.gates[0].q1 == 2);
        CHECK(r.gates[1].q1 == 1);
        CHECK(oracles::phase_dist(triple_unitary_of(triple, 3),
                                  triple_unitary_of(r.gates, 3)) < 1e-10);
    }

    // Full two-angle family and the mirrored pattern.
    for (int draw = 0; draw < 10; ++draw) {
        const std::array<Gate, 3> triple{Gate::match_block(2, 3, ang(rng), ang(rng)),
                                         Gate::match_block(1, 2, ang(rng), ang(rng)),
                                         Gate::match_block(2, 3, ang(rng), ang(rng))};
        const auto r = ybe_reflect(triple);
        CHECK(r.residual < 1e-10);
        CHECK(r.gates[0].q1 == 1);
        CHECK(oracles::phase_dist(triple_unitary_of(triple, 3),
                                  triple_unitary_of(r.gates, 3)) < 1e-10);
    }

    CHECK_THROWS_AS(ybe_reflect({Gate::match_block(1, 2, 0.1, 0.1),
                                 Gate::match_block(3, 4, 0.1, 0.1),
                                 Gate::match_block(1, 2, 0.1, 0.1)}),
                    YbeError);
    CHECK_THROWS_AS(ybe_reflect({Gate::cx(1, 2), Gate::match_block(2, 3, 0.1, 0.1),
                                 Gate::cx(1, 2)}),
                    YbeError);
}

TEST_CASE("one-body image") {
    Circuit empty(3);
    CHECK((one_body_of_circuit(empty) - Eigen::MatrixXcd::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    Circuit fs(2);
    fs.gates.push_back(Gate::fswap(1, 2, kPi / 2));
    const auto v = one_body_of_circuit(fs);
    CHECK(std::abs(v(0, 1) - cd(0, 1)) < 1e-14);
    CHECK(std::abs(v(1, 0) - cd(0, 1)) < 1e-14);
    CHECK(std::abs(v(0, 0)) < 1e-14);

    // Full unitary is the unique number-conserving lift of the image: check
    // through a statevector evolution of a single-mode excitation.
    Circuit c(3);
    c.gates.push_back(Gate::match_block(1, 2, 0.7, 0.7));
    c.gates.push_back(Gate::phase(2, -0.4));
    c.gates.push_back(Gate::match_block(2, 3, -1.1, -1.1));
    const auto vc = one_body_of_circuit(c);
    const auto u = circuit_unitary(c);
    for (int q = 1; q <= 3; ++q) {
        Eigen::VectorXcd col = Eigen::VectorXcd::Zero(8);
        col(1 << (3 - q)) = 1.0;
        const Eigen::VectorXcd evolved = u * col;
        for (int p = 1; p <= 3; ++p)
            CHECK(std::abs(evolved(1 << (3 - p)) - vc(p - 1, q - 1)) < 1e-13);
    }

    Circuit bad(2);
    bad.gates.push_back(Gate::match_block(1, 2, 0.3, 0.4));
    CHECK_THROWS_AS(one_body_of_circuit(bad), YbeError);
    Circuit bad2(2);
    bad2.gates.push_back(Gate::cx(1, 2));
    CHECK_THROWS_AS(one_body_of_circuit(bad2), YbeError);
}

TEST_CASE("trotter one-body image approximates the mode exponential") {
    const int n = 4;
    const auto g = random_symmetric(n, 5, false);
    const double dt = 0.01;
    const auto step = trotter_step(g, dt, Circuit::identity_permutation(n));
    const auto v = one_body_of_circuit(step);
    const auto v_rev = one_body_of_circuit(
        trotter_step(Eigen::MatrixXd::Zero(n, n), dt, Circuit::identity_permutation(n)));
    const Eigen::MatrixXcd expect =
        v_rev * oracles::exp_hermitian(g.cast<cd>(), cd(0, -dt));
    CHECK((v - expect).cwiseAbs().maxCoeff() < 10 * dt * dt);
}

TEST_CASE("compression of trotter chains") {
    const int n = 4;
    const auto g = random_symmetric(n, 13, /*uniform_diag=*/true);

    // A single step is already canonical.
    const auto one = trotter_chain(g, 0.05, 1);
    CompressStats st1;
    const auto c1 = compress_ybe(one, &st1);
    CHECK(count_blocks(c1) == 6);
    CHECK(st1.reflections == 0);
    CHECK(oracles::phase_dist(circuit_unitary(one), circuit_unitary(c1)) < 1e-10);

    // Multi-step chains collapse to the same canonical size.
    for (int steps : {2, 5, 10}) {
        const auto chain = trotter_chain(g, 0.05, steps);
        CompressStats st;
        const auto canon = compress_ybe(chain, &st);
        CHECK(count_blocks(canon) == 6);
        CHECK(st.phases_out <= 4);
        CHECK(oracles::phase_dist(circuit_unitary(chain), circuit_unitary(canon)) < 1e-8);
    }

    // Idempotence.
    const auto chain = trotter_chain(g, 0.05, 6);
    const auto canon = compress_ybe(chain);
    const auto canon2 = compress_ybe(canon);
    CHECK(count_blocks(canon2) == count_blocks(canon));
    CHECK(oracles::phase_dist(circuit_unitary(canon), circuit_unitary(canon2)) < 1e-10);
}

TEST_CASE("compression beyond four qubits") {
    for (int n : {5, 6}) {
        const auto g = random_symmetric(n, 40 + n, /*uniform_diag=*/true);
        const auto chain = trotter_chain(g, 0.04, 3);
        const auto canon = compress_ybe(chain);
        CHECK(count_blocks(canon) == n * (n - 1) / 2);
        CHECK(oracles::phase_dist(circuit_unitary(chain), circuit_unitary(canon)) < 1e-8);
    }
}

TEST_CASE("compression rejects what it cannot preserve") {
    const int n = 4;
    // Non-uniform diagonal: phase layers cannot cross later blocks exactly.
    const auto g = random_symmetric(n, 19, /*uniform_diag=*/false);
    const auto chain = trotter_chain(g, 0.05, 2);
    CHECK_THROWS_AS(compress_ybe(chain), CompressError);

    Circuit cx(2);
    cx.gates.push_back(Gate::cx(1, 2));
    CHECK_THROWS_AS(compress_ybe(cx), CompressError);

    Circuit nonadjacent(4);
    nonadjacent.gates.push_back(Gate::match_block(1, 3, 0.2, 0.2));
    CHECK_THROWS_AS(compress_ybe(nonadjacent), CompressError);
}

TEST_CASE("resynthesis from the one-body image") {
    // Identity input.
    const auto ident = resynthesize(Eigen::MatrixXcd::Identity(3, 3),
                                    Circuit::identity_permutation(3));
    CHECK((one_body_of_circuit(ident) - Eigen::MatrixXcd::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-10);

    // The family's own Givens maps to a single active block.
    Eigen::MatrixXcd giv(2, 2);
    const double phi = 0.6;
    giv << std::cos(phi), cd(0, -1) * std::sin(phi), cd(0, -1) * std::sin(phi), std::cos(phi);
    const auto circ = resynthesize(giv, Circuit::identity_permutation(2));
    CHECK((one_body_of_circuit(circ) - giv).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE(circ.gates.size() >= 1);
    CHECK(circ.gates[0].kind == GateKind::MATCH_BLOCK);
    CHECK_THAT(circ.gates[0].a1, Catch::Matchers::WithinAbs(phi, 1e-9));

    CHECK_THROWS_AS(resynthesize(2.0 * Eigen::MatrixXcd::Identity(2, 2), {1, 2}),
                    std::invalid_argument);

    // Round trip through trotter circuits, including the full-unitary match
    // (the lift of the image is unique for number-conserving circuits).
    for (int n : {3, 4}) {
        const auto g = random_symmetric(n, 60 + n, /*uniform_diag=*/true);
        const auto chain = trotter_chain(g, 0.06, 2);
        const auto v = one_body_of_circuit(chain);
        const auto circ2 = resynthesize(v, chain.permutation);
        CHECK((one_body_of_circuit(circ2) - v).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(oracles::phase_dist(circuit_unitary(chain), circuit_unitary(circ2)) < 1e-8);
        CHECK(count_blocks(circ2) == n * (n - 1) / 2);
    }
}

TEST_CASE("route equivalence of compression and resynthesis") {
    for (int n : {4, 6}) {
        for (int draw = 0; draw < 3; ++draw) {
            const auto g = random_symmetric(n, 100 + 10 * n + draw, /*uniform_diag=*/true);
            const auto chain = trotter_chain(g, 0.05, 2);
            const auto canon = compress_ybe(chain);
            const auto resyn = resynthesize(one_body_of_circuit(chain), chain.permutation);
            CHECK(oracles::phase_dist(circuit_unitary(canon), circuit_unitary(resyn)) < 1e-8);
        }
    }
}
