#include "fermidyn/ybe.hpp"
#include "fermidyn/constants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <unordered_set>

namespace fermidyn {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

Matrix4c mb4(double tx, double tz) {
    return gate_unitary(Gate::match_block(1, 2, tx, tz));
}

Eigen::MatrixXcd embed_low(const Matrix4c& g) {
    Eigen::MatrixXcd m(8, 8);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m.block<2, 2>(2 * i, 2 * j) = g(i, j) * Matrix2c::Identity();
    return m;
}

Eigen::MatrixXcd embed_high(const Matrix4c& g) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8, 8);
    m.block<4, 4>(0, 0) = g;
    m.block<4, 4>(4, 4) = g;
    return m;
}

// Three-gate ladder on a 3-qubit register. lower_first selects the pattern
// [(q1,q2), (q2,q3), (q1,q2)]; gates are applied in list order.
Eigen::MatrixXcd triple_unitary(bool lower_first, const std::array<double, 6>& a) {
    const Matrix4c g1 = mb4(a[0], a[1]);
    const Matrix4c g2 = mb4(a[2], a[3]);
    const Matrix4c g3 = mb4(a[4], a[5]);
    auto e1 = lower_first ? embed_low(g1) : embed_high(g1);
    auto e2 = lower_first ? embed_high(g2) : embed_low(g2);
    auto e3 = lower_first ? embed_low(g3) : embed_high(g3);
    return e3 * (e2 * e1);
}

struct SolveResult {
    std::array<double, 6> angles{};
    double phase = 0;
    double residual = 1e30;
};

void pack_residual(const Eigen::MatrixXcd& diff, Eigen::VectorXd& r) {
    int k = 0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            r(k++) = diff(i, j).real();
            r(k++) = diff(i, j).imag();
        }
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Damped least squares over the six block angles plus a global phase.
SolveResult solve_one_seed(bool out_lower_first, const Eigen::MatrixXcd& target,
                           std::array<double, 7> x) {
    constexpr int kMaxIter = 200;
    constexpr double kDiffStep = 1e-7;

    auto build = [&](const std::array<double, 7>& p) {
        std::array<double, 6> a;
        std::copy_n(p.begin(), 6, a.begin());
        return (std::exp(I * p[6]) * triple_unitary(out_lower_first, a)).eval();
    };

    Eigen::VectorXd r(128), r_trial(128);
    pack_residual(build(x) - target, r);
    double cost = r.squaredNorm();
    double lambda = 1e-3;

    for (int iter = 0; iter < kMaxIter; ++iter) {
        if (max_abs(build(x) - target) < 1e-13) break;

        Eigen::MatrixXd jac(128, 7);
        for (int p = 0; p < 7; ++p) {
            auto xp = x;
            xp[p] += kDiffStep;
            Eigen::VectorXd rp(128);
            pack_residual(build(xp) - target, rp);
            jac.col(p) = (rp - r) / kDiffStep;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;

        bool stepped = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal().array() += lambda;
            const Eigen::VectorXd delta = lhs.ldlt().solve(-jtr);
            auto x_trial = x;
            for (int p = 0; p < 7; ++p) x_trial[p] += delta(p);
            pack_residual(build(x_trial) - target, r_trial);
            const double cost_trial = r_trial.squaredNorm();
            if (cost_trial < cost) {
                x = x_trial;
                r = r_trial;
                cost = cost_trial;
                lambda = std::max(lambda / 3.0, 1e-14);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) break;
    }

    SolveResult res;
    std::copy_n(x.begin(), 6, res.angles.begin());
    for (auto& a : res.angles) a = wrap_angle(a);
    res.phase = wrap_angle(x[6]);
    res.residual = max_abs(build(x) - target);
    return res;
}

// Reflects the ladder orientation of a block triple; in_lower_first is the
// input pattern, the output uses the opposite one.
SolveResult solve_reflection(bool in_lower_first, const std::array<double, 6>& in) {
    const Eigen::MatrixXcd target = triple_unitary(in_lower_first, in);

    const std::array<std::array<double, 6>, 8> seeds = {{
        {in[2], in[3], in[0], in[1], in[4], in[5]},
        {in[0], in[1], in[2], in[3], in[4], in[5]},
        {0, 0, 0, 0, 0, 0},
        {kPi / 2, kPi / 2, kPi / 2, kPi / 2, kPi / 2, kPi / 2},
        {-kPi / 2, -kPi / 2, -kPi / 2, -kPi / 2, -kPi / 2, -kPi / 2},
        {kPi / 2, kPi / 2, 0, 0, kPi / 2, kPi / 2},
        {0.3, 0.3, 0.3, 0.3, 0.3, 0.3},
        {1.2, -0.7, 0.4, 2.0, -1.5, 0.9},
    }};

    SolveResult best;
    for (const auto& seed : seeds) {
        std::array<double, 7> x{};
        std::copy_n(seed.begin(), 6, x.begin());
        x[6] = 0;
        const auto res = solve_one_seed(!in_lower_first, target, x);
        if (res.residual < best.residual) best = res;
        if (best.residual < 1e-12) break;
    }
    if (best.residual > 1e-8)
        throw YbeError("YBE reflection failed: best residual " +
                       std::to_string(best.residual));
    return best;
}

bool is_match_family(const Gate& g) {
    return g.kind == GateKind::MATCH_BLOCK || g.kind == GateKind::FSWAP;
}

// Reduces FSWAP gates at their free-fermion angles to match blocks plus
// trailing per-wire phases.
struct MbEquivalent {
    double tx, tz;
    double phase_each_wire; // PHASE angle applied after the block on both wires
};

MbEquivalent as_match_block(const Gate& g) {
    if (g.kind == GateKind::MATCH_BLOCK) return {g.a1, g.a2, 0.0};
    if (g.kind != GateKind::FSWAP) throw YbeError("gate outside the match-block family");
    const double t = wrap_angle(g.a1);
    if (g.fswap_variant == FswapVariant::paper) {
        if (std::abs(t - kPi / 2) < 1e-12) return {-kPi / 2, -kPi / 2, 0.0};
        if (std::abs(t + kPi / 2) < 1e-12) return {kPi / 2, kPi / 2, 0.0};
        throw YbeError("paper FSWAP is free-fermionic only at theta = +-pi/2");
    }
    if (std::abs(t) < 1e-12) return {kPi / 2, kPi / 2, -kPi / 2};
    if (std::abs(std::abs(t) - kPi) < 1e-12) return {kPi / 2, kPi / 2, kPi / 2};
    throw YbeError("strict FSWAP is free-fermionic only at theta = 0 or pi");
}

} // namespace

Gate merge_blocks(const Gate& b1, const Gate& b2) {
    if (b1.kind != GateKind::MATCH_BLOCK || b2.kind != GateKind::MATCH_BLOCK)
        throw YbeError("merge_blocks expects match blocks");
    const int a1 = std::min(b1.q1, b1.q2), a2 = std::max(b1.q1, b1.q2);
    const int c1 = std::min(b2.q1, b2.q2), c2 = std::max(b2.q1, b2.q2);
    if (a1 != c1 || a2 != c2) throw YbeError("merge_blocks: wire pair mismatch");
    return Gate::match_block(a1, a2, wrap_angle(b1.a1 + b2.a1), wrap_angle(b1.a2 + b2.a2));
}

ReflectResult ybe_reflect(const std::array<Gate, 3>& triple) {
    for (const auto& g : triple)
        if (!is_match_family(g)) throw YbeError("ybe_reflect: gate outside the block family");

    std::array<MbEquivalent, 3> mb{as_match_block(triple[0]), as_match_block(triple[1]),
                                   as_match_block(triple[2])};
    for (const auto& m : mb)
        if (m.phase_each_wire != 0.0)
            throw YbeError("ybe_reflect: strict FSWAP carries phases, not a bare block");

    auto pair_of = [](const Gate& g) {
        return std::pair{std::min(g.q1, g.q2), std::max(g.q1, g.q2)};
    };
    const auto p0 = pair_of(triple[0]);
    const auto p1 = pair_of(triple[1]);
    const auto p2 = pair_of(triple[2]);
    if (p0 != p2 || p0 == p1) throw YbeError("ybe_reflect: wires must follow (a,b),(b,c),(a,b)");
    const int lo = std::min(p0.first, p1.first);
    const bool contiguous = (p0.first + 1 == p0.second) && (p1.first + 1 == p1.second) &&
                            (std::abs(p0.first - p1.first) == 1);
    if (!contiguous) throw YbeError("ybe_reflect: wires must form a contiguous 3-qubit ladder");

    const bool in_lower_first = p0.first == lo;
    const std::array<double, 6> in{mb[0].tx, mb[0].tz, mb[1].tx, mb[1].tz, mb[2].tx, mb[2].tz};
    const auto sol = solve_reflection(in_lower_first, in);

    const std::pair<int, int> out_first = in_lower_first ? std::pair{lo + 1, lo + 2}
                                                         : std::pair{lo, lo + 1};
    const std::pair<int, int> out_mid = in_lower_first ? std::pair{lo, lo + 1}
                                                       : std::pair{lo + 1, lo + 2};
    ReflectResult res;
    res.gates = {Gate::match_block(out_first.first, out_first.second, sol.angles[0], sol.angles[1]),
                 Gate::match_block(out_mid.first, out_mid.second, sol.angles[2], sol.angles[3]),
                 Gate::match_block(out_first.first, out_first.second, sol.angles[4], sol.angles[5])};
    res.residual = sol.residual;
    res.global_phase = sol.phase;
    return res;
}

Eigen::MatrixXcd one_body_of_circuit(const Circuit& c) {
    const int n = c.n_qubits;
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
    auto apply_pair = [&](int q1, int q2, const Matrix2c& u) {
        const Eigen::MatrixXcd r1 = u(0, 0) * v.row(q1 - 1) + u(0, 1) * v.row(q2 - 1);
        const Eigen::MatrixXcd r2 = u(1, 0) * v.row(q1 - 1) + u(1, 1) * v.row(q2 - 1);
        v.row(q1 - 1) = r1;
        v.row(q2 - 1) = r2;
    };

    for (const auto& g : c.gates) {
        switch (g.kind) {
        case GateKind::PHASE:
            v.row(g.q1 - 1) *= std::exp(-I * g.a1);
            break;
        case GateKind::MATCH_BLOCK: {
            if (std::abs(g.a1 - g.a2) > 1e-9)
                throw YbeError("one_body_of_circuit: block with theta_x != theta_z is not "
                               "number-conserving");
            const double th = 0.5 * (g.a1 + g.a2);
            Matrix2c u;
            u << std::cos(th), -I * std::sin(th), -I * std::sin(th), std::cos(th);
            apply_pair(g.q1, g.q2, u);
            break;
        }
        case GateKind::FSWAP: {
            const auto eq = as_match_block(g); // throws off the free-fermion angles
            const double th = eq.tx;
            Matrix2c u;
            u << std::cos(th), -I * std::sin(th), -I * std::sin(th), std::cos(th);
            apply_pair(g.q1, g.q2, u);
            if (eq.phase_each_wire != 0.0) {
                v.row(g.q1 - 1) *= std::exp(-I * eq.phase_each_wire);
                v.row(g.q2 - 1) *= std::exp(-I * eq.phase_each_wire);
            }
            break;
        }
        default:
            throw YbeError("one_body_of_circuit: non-free-fermion gate present");
        }
    }
    if (max_abs(v * v.adjoint() - Eigen::MatrixXcd::Identity(n, n)) > 1e-12 * n)
        throw YbeError("one_body_of_circuit: image lost unitarity");
    return v;
}

// ---------------------------------------------------------------------------
// Compression: a word of adjacent-pair blocks plus a trailing phase vector.
// Rewrites are found on the position pattern alone (merge and reflection
// moves), then replayed with the angle-level merge identity and the numeric
// reflection solver.
// ---------------------------------------------------------------------------

namespace {

struct Letter {
    int pos; // block on wires (pos, pos+1)
    double tx, tz;
};

struct Op {
    enum Kind { Swap, Reflect, Merge } kind;
    int idx;
};

// Depth-first search over position patterns for a move sequence ending in a
// merge. Swaps act on commuting neighbors only.
class PatternSearch {
  public:
    explicit PatternSearch(std::vector<int> word) : word_(std::move(word)) {}

    std::optional<std::vector<Op>> run() {
        nodes_ = 0;
        path_.clear();
        seen_.clear();
        if (dfs(0)) return path_;
        return std::nullopt;
    }

  private:
    static constexpr int kMaxNodes = 200000;
    static constexpr int kMaxDepth = 400;

    std::vector<int> word_;
    std::vector<Op> path_;
    std::unordered_set<std::string> seen_;
    int nodes_ = 0;

    std::string key() const {
        std::string k;
        k.reserve(word_.size());
        for (int p : word_) k.push_back(static_cast<char>('0' + p));
        return k;
    }

    int first_conflict_after(int i) const {
        for (int j = i + 1; j < static_cast<int>(word_.size()); ++j)
            if (std::abs(word_[j] - word_[i]) <= 1) return j;
        return -1;
    }

    // Bubbles letter j leftwards to index target; every crossed letter must
    // commute with it (checked by the callers' first-conflict constructions).
    void bubble_left(int j, int target) {
        for (int m = j; m > target; --m) {
            std::swap(word_[m - 1], word_[m]);
            path_.push_back({Op::Swap, m - 1});
        }
    }

    void bubble_right(int i, int target) {
        for (int m = i; m < target; ++m) {
            std::swap(word_[m], word_[m + 1]);
            path_.push_back({Op::Swap, m});
        }
    }

    bool dfs(int depth) {
        if (++nodes_ > kMaxNodes || depth > kMaxDepth) return false;

        // Merge move: first-conflict partner at the same position. Letters in
        // between commute with both (they avoid the shared position +-1).
        for (int i = 0; i < static_cast<int>(word_.size()); ++i) {
            const int j = first_conflict_after(i);
            if (j >= 0 && word_[j] == word_[i]) {
                bubble_left(j, i + 1);
                path_.push_back({Op::Merge, i});
                return true; // length reduced; goal reached
            }
        }

        if (!seen_.insert(key()).second) return false;

        // Reflection candidates (i, j, k) with pattern (p, p+-1, p): j is the
        // first conflict after i, k the first conflict with the pair after j.
        // Letters between i and j avoid pos_i, so i slides right to meet j;
        // letters between j and k avoid both, so k slides left.
        std::vector<int> starts;
        for (int i = 0; i < static_cast<int>(word_.size()); ++i) starts.push_back(i);
        for (auto it = starts.rbegin(); it != starts.rend(); ++it) {
            const int i = *it;
            const int j = first_conflict_after(i);
            if (j < 0 || word_[j] == word_[i]) continue;
            int k = -1;
            for (int t = j + 1; t < static_cast<int>(word_.size()); ++t)
                if (std::abs(word_[t] - word_[i]) <= 1 || std::abs(word_[t] - word_[j]) <= 1) {
                    k = t;
                    break;
                }
            if (k < 0 || word_[k] != word_[i]) continue;

            const auto saved_word = word_;
            const auto saved_len = path_.size();

            bubble_right(i, j - 1);
            bubble_left(k, j + 1);
            path_.push_back({Op::Reflect, j - 1});
            const int p = word_[j - 1], q = word_[j];
            word_[j - 1] = q;
            word_[j] = p;
            word_[j + 1] = q;

            if (dfs(depth + 1)) return true;

            word_ = saved_word;
            path_.resize(saved_len);
        }
        return false;
    }
};

// A letter is a number-conserving two-mode gate stored by its one-body 2x2
// image; phase dressings picked up while commuting past diagonal layers stay
// inside the letter.
struct DressedLetter {
    int pos; // wires (pos, pos+1)
    Matrix2c u;
};

// Phase-Givens-phase factorization u = diag(e^{il1}, e^{il2}) g(theta)
// diag(1, e^{ir2}) with g(theta) the locked-block image.
struct EulerSplit {
    double l1 = 0, l2 = 0, theta = 0, r2 = 0;
};

Matrix2c bare_givens(double theta) {
    Matrix2c g;
    g << std::cos(theta), -I * std::sin(theta), -I * std::sin(theta), std::cos(theta);
    return g;
}

EulerSplit euler_split(const Matrix2c& u) {
    EulerSplit e;
    const double c = std::abs(u(0, 0)), s = std::abs(u(0, 1));
    e.theta = std::atan2(s, c);
    if (s < 1e-12) { // diagonal
        e.l1 = std::arg(u(0, 0));
        e.l2 = std::arg(u(1, 1));
        e.r2 = 0;
        return e;
    }
    if (c < 1e-12) { // antidiagonal
        e.l1 = std::arg(u(0, 1)) + kPi / 2;
        e.l2 = std::arg(u(1, 0)) + kPi / 2;
        e.r2 = 0;
        return e;
    }
    e.l1 = std::arg(u(0, 0));
    e.l2 = std::arg(u(1, 0)) + kPi / 2;
    e.r2 = std::arg(u(0, 1)) + kPi / 2 - e.l1;
    return e;
}

// The three-mode one-body matrix of a letter triple, gates applied in order.
Eigen::Matrix3cd triple_image(const std::array<DressedLetter, 3>& t, int base) {
    Eigen::Matrix3cd v = Eigen::Matrix3cd::Identity();
    for (const auto& l : t) {
        const int k = l.pos - base; // 0 -> rows (0,1), 1 -> rows (1,2)
        Eigen::Matrix3cd e = Eigen::Matrix3cd::Identity();
        e.block<2, 2>(k, k) = l.u;
        v = e * v;
    }
    return v;
}

// Closed-form reflection in the number-conserving family: rewrites the
// time-ordered triple (a@p, b@q, c@p), |p-q| = 1, as (a'@q, b'@p, c'@q) with
// an identical three-mode image. Uses the Givens structure of U(3): after
// peeling one factor per side the middle is forced, and the rank-one minor
// identity guarantees consistency.
std::array<DressedLetter, 3> reflect_dressed(const std::array<DressedLetter, 3>& in) {
    const int p = in[0].pos, q = in[1].pos;
    if (in[2].pos != p || std::abs(p - q) != 1)
        throw CompressError("reflect_dressed: invalid triple pattern");
    const int base = std::min(p, q);
    const Eigen::Matrix3cd v = triple_image(in, base);

    const bool out_lower_first = q == base; // output pattern starts at q
    Matrix2c m1, m2, m3;

    auto orth_col = [](const Eigen::Vector2cd& col2) {
        // Completes a unit column to a unitary [col1 col2].
        Eigen::Vector2cd col1;
        col1 << std::conj(col2(1)), -std::conj(col2(0));
        Matrix2c m;
        m.col(0) = col1;
        m.col(1) = col2;
        return m;
    };

    if (out_lower_first) {
        // v = Ehi(m3) Elo(m2) Ehi(m1): choose m1 so (v Ehi(m1)^!)(0,2) = 0.
        Eigen::Vector2cd t{v(0, 1), v(0, 2)};
        Eigen::Vector2cd col2;
        if (t.norm() < 1e-14)
            col2 << 0, 1;
        else
            col2 << v(0, 2) / t.norm(), -v(0, 1) / t.norm();
        const Matrix2c m1dag = orth_col(col2);
        m1 = m1dag.adjoint();
        Eigen::Matrix3cd vp = v;
        vp.block<3, 2>(0, 1) = v.block<3, 2>(0, 1) * m1dag;

        // Choose m3 so row 2 of Ehi(m3)^! vp has zero in column 2, and
        // normalize the (2,2) phase to one.
        Eigen::Vector2cd rcol{vp(1, 2), vp(2, 2)};
        Eigen::Vector2cd row2;
        if (rcol.norm() < 1e-14)
            row2 << 0, 1;
        else
            row2 << std::conj(vp(2, 2)) / rcol.norm(), -std::conj(vp(1, 2)) / rcol.norm();
        Matrix2c m3dag;
        m3dag.row(0) = row2.transpose(); // new row 1 (local)
        m3dag(1, 0) = -std::conj(row2(1));
        m3dag(1, 1) = std::conj(row2(0));
        Eigen::Matrix3cd w = vp;
        w.block<2, 3>(1, 0) = m3dag * vp.block<2, 3>(1, 0);
        const cd ph = w(2, 2);
        if (std::abs(std::abs(ph) - 1.0) > 1e-9)
            throw CompressError("reflect_dressed: lost unitarity");
        m3dag.row(1) /= ph;
        w.row(2) /= ph;
        m3 = m3dag.adjoint();
        m2 = w.block<2, 2>(0, 0);

        return {DressedLetter{q, m1}, DressedLetter{p, m2}, DressedLetter{q, m3}};
    }

    // Mirror case: v = Elo(m3) Ehi(m2) Elo(m1): zero (2,0) with m1, then fix
    // row 0 with m3; the rank-one minor forces (0,2) to vanish as well.
    Eigen::Vector2cd t{v(2, 0), v(2, 1)};
    Eigen::Vector2cd col1;
    if (t.norm() < 1e-14)
        col1 << 1, 0;
    else
        col1 << v(2, 1) / t.norm(), -v(2, 0) / t.norm();
    Matrix2c m1dag;
    m1dag.col(0) = col1;
    m1dag(0, 1) = -std::conj(col1(1));
    m1dag(1, 1) = std::conj(col1(0));
    m1 = m1dag.adjoint();
    Eigen::Matrix3cd vp = v;
    vp.block<3, 2>(0, 0) = v.block<3, 2>(0, 0) * m1dag;

    Eigen::Vector2cd rcol{vp(0, 1), vp(1, 1)};
    Eigen::Vector2cd row1;
    if (std::abs(vp(0, 0)) > 1e-7) {
        // Zero (0,1) by mixing rows 0 and 1; scale so (0,0) becomes 1.
        const double nn = std::sqrt(std::norm(vp(0, 1)) + std::norm(vp(1, 1)));
        if (nn < 1e-14)
            row1 << 1, 0;
        else
            row1 << std::conj(vp(1, 1)) / nn, -std::conj(vp(0, 1)) / nn;
    } else {
        row1 << std::conj(vp(0, 0)), std::conj(vp(1, 0));
        row1.normalize();
    }
    Matrix2c m3dag;
    m3dag.row(0) = row1.transpose();
    m3dag(1, 0) = -std::conj(row1(1));
    m3dag(1, 1) = std::conj(row1(0));
    Eigen::Matrix3cd w = vp;
    w.block<2, 3>(0, 0) = m3dag * vp.block<2, 3>(0, 0);
    const cd ph = w(0, 0);
    if (std::abs(std::abs(ph) - 1.0) > 1e-9)
        throw CompressError("reflect_dressed: lost unitarity");
    m3dag.row(0) /= ph;
    w.row(0) /= ph;
    m3 = m3dag.adjoint();
    m2 = w.block<2, 2>(1, 1);

    return {DressedLetter{q, m1}, DressedLetter{p, m2}, DressedLetter{q, m3}};
}

class Compressor {
  public:
    Compressor(int n) : n_(n), tail_(n, 0.0) {}

    void feed_phase(int wire, double phi) { tail_[wire - 1] += phi; }

    void feed_block(int pos, const Matrix2c& u) {
        // Commute past the accumulated tail phases: exact conjugation.
        Matrix2c d = Matrix2c::Zero();
        d(0, 0) = std::exp(-I * tail_[pos - 1]);
        d(1, 1) = std::exp(-I * tail_[pos]);
        insert(DressedLetter{pos, d.adjoint() * u * d});
    }

    const std::vector<DressedLetter>& word() const { return word_; }
    const std::vector<double>& tail() const { return tail_; }
    int merges = 0;
    int reflections = 0;

    struct EmittedBlock {
        int pos;
        double tx, tz;
    };

    // Factors the dressed word into two-angle blocks over the word's own
    // pattern followed by a phase layer. In the Majorana picture a block
    // splits into independent rotations on two decoupled coordinate chains
    // while phase gates couple the chains wire-locally, so the word's image
    // factors as (per-wire chain mixes) x (chain A mesh) x (chain B mesh);
    // each mesh is peeled along the pattern.
    std::vector<EmittedBlock> emit_blocks() {
        const int k = static_cast<int>(word_.size());

        Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n_, n_);
        for (const auto& l : word_) {
            Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(n_, n_);
            e.block<2, 2>(l.pos - 1, l.pos - 1) = l.u;
            v = e * v;
        }

        // Majorana image of the word in chain-ordered coordinates. Wire w
        // (1-based) contributes x_w = a+a! to chain A when w is odd and
        // p_w = -i(a-a!) when w is even; chain B takes the other coordinate.
        // With U gamma_q U! = sum_r O(q,r) gamma_r one has O(x_q, x_p) =
        // Re v(p,q), O(x_q, p_p) = Im v(p,q), O(p_q, x_p) = -Im v(p,q),
        // O(p_q, p_p) = Re v(p,q).
        const Eigen::MatrixXd xm = v.real(), ym = v.imag();
        Eigen::MatrixXd oaa(n_, n_), oba(n_, n_), oab(n_, n_), obb(n_, n_);
        const auto x_in_a = [](int wire1b) { return wire1b % 2 == 1; };
        for (int r = 1; r <= n_; ++r)
            for (int c = 1; c <= n_; ++c) {
                const double re = xm(c - 1, r - 1), im = ym(c - 1, r - 1);
                const double oxx = re, oxp = im, opx = -im, opp = re;
                const bool ra = x_in_a(r), ca = x_in_a(c);
                oaa(r - 1, c - 1) = ra ? (ca ? oxx : oxp) : (ca ? opx : opp);
                oab(r - 1, c - 1) = ra ? (ca ? oxp : oxx) : (ca ? opp : opx);
                oba(r - 1, c - 1) = ra ? (ca ? opx : opp) : (ca ? oxx : oxp);
                obb(r - 1, c - 1) = ra ? (ca ? opp : opx) : (ca ? oxp : oxx);
            }

        // O factors as blockdiag(A,B) times per-wire chain mixers (the
        // phase layer): columns satisfy O_AA col w = cos(psi_w) A col w,
        // O_AB col w = -sin(psi_w) A col w, and the B blocks analogously.
        Eigen::VectorXd psi(n_);
        Eigen::MatrixXd amat(n_, n_), bmat(n_, n_);
        for (int w = 0; w < n_; ++w) {
            const Eigen::VectorXd ca = oaa.col(w), cb = oab.col(w);
            const double na = ca.norm(), nb = cb.norm();
            const Eigen::VectorXd dir = na >= nb ? (ca / na).eval() : (cb / nb).eval();
            const double c = ca.dot(dir), s = -cb.dot(dir);
            psi(w) = std::atan2(s, c);
            if ((ca - c * dir).norm() > 1e-8 || (cb + s * dir).norm() > 1e-8)
                throw CompressError("emit: circuit image is not number-conserving");
            amat.col(w) = std::cos(psi(w)) * ca - std::sin(psi(w)) * cb;

            const Eigen::VectorXd da_ = oba.col(w), db_ = obb.col(w);
            bmat.col(w) = std::sin(psi(w)) * da_ + std::cos(psi(w)) * db_;
            if ((std::cos(psi(w)) * da_ - std::sin(psi(w)) * db_).norm() > 1e-8)
                throw CompressError("emit: chain mixing is inconsistent");
        }

        // Gates compose in reverse order in the Majorana picture, so each
        // chain mesh reads earliest-first; peel the transpose instead.
        std::vector<double> a_ang, b_ang;
        Eigen::VectorXd da, db;
        pattern_peel(amat.transpose(), a_ang, da);
        pattern_peel(bmat.transpose(), b_ang, db);
        for (auto& a : a_ang) a = -a;
        for (auto& b : b_ang) b = -b;

        // Residual +-1 chain signs: equal-sign wires fold into the mixer
        // angle, mixed signs cannot arise from a number-conserving image.
        for (int w = 0; w < n_; ++w) {
            if (da(w) * db(w) < 0)
                throw CompressError("emit: mixed chain reflection residue");
            if (da(w) < 0) psi(w) = wrap_angle(psi(w) + kPi);
        }

        // A phase gate with angle phi mixes (A_w -> B_w) by +phi on odd
        // wires and -phi on even wires.
        for (int w = 0; w < n_; ++w)
            tail_[w] += (w % 2 == 0) ? psi(w) : -psi(w); // w is 0-based

        // Chain angles back to block angles: odd positions keep -theta_z on
        // chain A and +theta_x on chain B; even positions swap the roles.
        std::vector<EmittedBlock> blocks;
        blocks.reserve(k);
        for (int i = 0; i < k; ++i) {
            const int pos = word_[i].pos; // 1-based
            EmittedBlock blk{pos, 0, 0};
            if (pos % 2 == 1) {
                blk.tz = -a_ang[i];
                blk.tx = b_ang[i];
            } else {
                blk.tx = a_ang[i];
                blk.tz = -b_ang[i];
            }
            blocks.push_back(blk);
        }
        return blocks;
    }

  private:
    // Reverse-time Givens peel of a real orthogonal matrix along the word's
    // position pattern; the elimination targets come from the structural
    // support of the partial patterns. Returns the angles and the residual
    // +-1 diagonal (signs already propagated into the angles).
    void pattern_peel(const Eigen::MatrixXd& target, std::vector<double>& theta,
                      Eigen::VectorXd& d) const {
        const int k = static_cast<int>(word_.size());
        std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> support(k + 1);
        support[0].setIdentity(n_, n_);
        for (int i = 0; i < k; ++i) {
            support[i + 1] = support[i];
            const int w = word_[i].pos - 1;
            for (int c = 0; c < n_; ++c) {
                const bool any = support[i](w, c) || support[i](w + 1, c);
                support[i + 1](w, c) = any;
                support[i + 1](w + 1, c) = any;
            }
        }

        // The peel runs on the transposed mesh (latest letter leftmost), so
        // support tests are transposed: entry (r, c) of the remaining matrix
        // is structurally zero when the prefix cannot route wire r to c.
        theta.assign(k, 0.0);
        Eigen::MatrixXd b = target;
        for (int i = k - 1; i >= 0; --i) {
            const int w = word_[i].pos - 1;
            double th = 0;
            bool have_target = false;
            for (int c = 0; c < n_ && !have_target; ++c) {
                if (!support[i](c, w) && support[i](c, w + 1)) {
                    th = std::atan2(b(w, c), b(w + 1, c));
                    have_target = true;
                } else if (!support[i](c, w + 1) && support[i](c, w)) {
                    th = std::atan2(-b(w + 1, c), b(w, c));
                    have_target = true;
                }
            }
            theta[i] = have_target ? th : 0.0;
            // Apply G(-theta): rows (w, w+1) <- (c*rw - s*rv, s*rw + c*rv).
            const Eigen::RowVectorXd rw = b.row(w), rv = b.row(w + 1);
            b.row(w) = std::cos(th) * rw - std::sin(th) * rv;
            b.row(w + 1) = std::sin(th) * rw + std::cos(th) * rv;
            for (int c = 0; c < n_; ++c)
                for (int row : {w, w + 1})
                    if (!support[i](c, row) && std::abs(b(row, c)) > 1e-8)
                        throw CompressError(
                            "emit: block pattern cannot reproduce the circuit");
        }

        d.resize(n_);
        for (int p = 0; p < n_; ++p) d(p) = b(p, p) >= 0 ? 1.0 : -1.0;
        if ((b - Eigen::MatrixXd(d.asDiagonal())).cwiseAbs().maxCoeff() > 1e-8)
            throw CompressError("emit: block pattern cannot reproduce the circuit");
        for (int i = 0; i < k; ++i) {
            const int w = word_[i].pos - 1;
            if (d(w) * d(w + 1) < 0) theta[i] = -theta[i];
        }
    }

  public:

  private:
    int n_;
    std::vector<DressedLetter> word_;
    std::vector<double> tail_;

    static bool negligible(const DressedLetter& l) {
        return (l.u - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-14;
    }

    void insert(DressedLetter l) {
        if (negligible(l)) return;
        word_.push_back(std::move(l));
        const int cap = n_ * (n_ - 1) / 2;

        if (try_direct_merge()) return;
        if (static_cast<int>(word_.size()) <= cap) return;

        std::vector<int> pattern(word_.size());
        for (size_t i = 0; i < word_.size(); ++i) pattern[i] = word_[i].pos;
        auto ops = PatternSearch(pattern).run();
        if (!ops)
            throw CompressError("no merge/YBE rewrite sequence found; circuit is outside "
                                "the compressible class");
        replay(*ops);
    }

    bool try_direct_merge() {
        for (int i = 0; i < static_cast<int>(word_.size()); ++i) {
            int j = -1;
            for (int t = i + 1; t < static_cast<int>(word_.size()); ++t)
                if (std::abs(word_[t].pos - word_[i].pos) <= 1) {
                    j = t;
                    break;
                }
            if (j < 0 || word_[j].pos != word_[i].pos) continue;
            for (int m = j; m > i + 1; --m) std::swap(word_[m - 1], word_[m]);
            merge_at(i);
            return true;
        }
        return false;
    }

    void merge_at(int i) {
        word_[i].u = word_[i + 1].u * word_[i].u; // later gate on the left
        word_.erase(word_.begin() + i + 1);
        ++merges;
        if (negligible(word_[i])) word_.erase(word_.begin() + i);
    }

    void replay(const std::vector<Op>& ops) {
        for (const auto& op : ops) {
            switch (op.kind) {
            case Op::Swap:
                std::swap(word_[op.idx], word_[op.idx + 1]);
                break;
            case Op::Merge:
                merge_at(op.idx);
                break;
            case Op::Reflect: {
                const auto out = reflect_dressed(
                    {word_[op.idx], word_[op.idx + 1], word_[op.idx + 2]});
                word_[op.idx] = out[0];
                word_[op.idx + 1] = out[1];
                word_[op.idx + 2] = out[2];
                ++reflections;
                break;
            }
            }
        }
    }
};

// One-body image of a single gate restricted to its wire pair, for the
// gates the compressor accepts.
Matrix2c pair_image(const Gate& g) {
    if (g.kind == GateKind::MATCH_BLOCK) {
        if (std::abs(g.a1 - g.a2) > 1e-9)
            throw CompressError(
                "block with theta_x != theta_z is not number-conserving");
        return bare_givens(0.5 * (g.a1 + g.a2));
    }
    const auto eq = as_match_block(g); // FSWAP at its free-fermion angles
    Matrix2c u = bare_givens(eq.tx);
    if (eq.phase_each_wire != 0.0) u *= std::exp(-I * eq.phase_each_wire);
    return u;
}

} // namespace

Circuit compress_ybe(const Circuit& c, CompressStats* stats) {
    c.validate();
    Compressor comp(c.n_qubits);
    int blocks_in = 0;

    for (const auto& g : c.gates) {
        if (g.kind == GateKind::PHASE) {
            comp.feed_phase(g.q1, g.a1);
            continue;
        }
        if (!is_match_family(g))
            throw CompressError("gate outside the match-block/phase family");
        const int lo = std::min(g.q1, g.q2), hi = std::max(g.q1, g.q2);
        if (hi != lo + 1) throw CompressError("blocks must act on adjacent wires");
        ++blocks_in;
        try {
            comp.feed_block(lo, pair_image(g));
        } catch (const YbeError& err) {
            throw CompressError(err.what());
        }
    }

    const auto bare = comp.emit_blocks();

    Circuit out(c.n_qubits);
    out.permutation = c.permutation;
    for (const auto& blk : bare) {
        const double tx = wrap_angle(blk.tx), tz = wrap_angle(blk.tz);
        if (std::abs(tx) < 1e-14 && std::abs(tz) < 1e-14) continue;
        out.gates.push_back(Gate::match_block(blk.pos, blk.pos + 1, tx, tz));
    }
    int blocks_out = static_cast<int>(out.gates.size());
    int phases = 0;
    for (int w = 1; w <= c.n_qubits; ++w) {
        const double phi = wrap_angle(comp.tail()[w - 1]);
        if (std::abs(phi) > 1e-13) {
            out.gates.push_back(Gate::phase(w, phi));
            ++phases;
        }
    }
    if (stats) {
        stats->blocks_in = blocks_in;
        stats->blocks_out = blocks_out;
        stats->phases_out = phases;
        stats->merges = comp.merges;
        stats->reflections = comp.reflections;
    }

    // Dense self-check (up to global phase) wherever the verification cap
    // allows; rewrites and emission are exact, so this guards against bugs
    // rather than tolerances.
    if (c.n_qubits <= 8) {
        const Eigen::MatrixXcd ua = circuit_unitary(c);
        const Eigen::MatrixXcd ub = circuit_unitary(out);
        Eigen::Index imax = 0, jmax = 0;
        ua.cwiseAbs().maxCoeff(&imax, &jmax);
        const cd ratio = ua(imax, jmax) / ub(imax, jmax);
        if ((ua - (ratio / std::abs(ratio)) * ub).cwiseAbs().maxCoeff() > 1e-8)
            throw CompressError("compression self-check failed");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Resynthesis: factor the one-body unitary as diag-phases times the image of
// a locked-block staircase, via a chain-space Givens peel.
// ---------------------------------------------------------------------------

namespace {

// i^(q-p) twist that maps the locked-block image to a real rotation.
Eigen::MatrixXcd chain_twist(const Eigen::MatrixXcd& u) {
    const int m = static_cast<int>(u.rows());
    static const std::array<cd, 4> ipow{cd{1, 0}, cd{0, 1}, cd{-1, 0}, cd{0, -1}};
    Eigen::MatrixXcd v(m, m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) v(p, q) = u(p, q) * ipow[((q - p) % 4 + 4) % 4];
    return v;
}

std::vector<int> staircase_slots(int m) {
    std::vector<int> slots;
    for (int row = 1; row < m; ++row)
        for (int j = 1; j <= m - row; ++j) slots.push_back(j);
    return slots;
}

} // namespace

Circuit resynthesize(const Eigen::MatrixXcd& u, const std::vector<int>& perm) {
    const int m = static_cast<int>(u.rows());
    if (u.cols() != m || m < 1) throw std::invalid_argument("resynthesize: square input only");
    if ((u * u.adjoint() - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("resynthesize: input is not unitary");

    // u = diag(e^{i phi}) * (locked-block staircase image); the twist makes the
    // second factor a real rotation.
    const Eigen::MatrixXcd vt = chain_twist(u);
    Eigen::VectorXd phi(m);
    Eigen::MatrixXd r(m, m);
    for (int p = 0; p < m; ++p) {
        int qmax = 0;
        for (int q = 1; q < m; ++q)
            if (std::abs(vt(p, q)) > std::abs(vt(p, qmax))) qmax = q;
        phi(p) = std::arg(vt(p, qmax));
        for (int q = 0; q < m; ++q) {
            const cd val = std::exp(cd{0, -phi(p)}) * vt(p, q);
            if (std::abs(val.imag()) > 1e-8)
                throw std::domain_error(
                    "resynthesize: unitary is outside the block-triangle image");
            r(p, q) = val.real();
        }
    }
    if (r.determinant() < 0) {
        phi(0) = wrap_angle(phi(0) + kPi);
        r.row(0) *= -1.0;
    }

    const auto slots = staircase_slots(m);
    const int L = static_cast<int>(slots.size());
    std::vector<double> theta(L, 0.0);

    // Peel in reverse order; slot (j, j+1) zeroes entry (j, c) with c chosen
    // by the remaining multiplicity of j.
    std::vector<int> total(m + 1, 0), seen(m + 1, 0);
    for (int s : slots) ++total[s];
    Eigen::MatrixXd b = r;
    for (int i = L - 1; i >= 0; --i) {
        const int j = slots[i];
        const int c = j + 1 + (total[j] - seen[j] - 1);
        ++seen[j];
        const double th = std::atan2(b(j - 1, c - 1), b(j, c - 1));
        theta[i] = th;
        const Eigen::RowVectorXd rj = b.row(j - 1), rk = b.row(j);
        b.row(j - 1) = std::cos(th) * rj - std::sin(th) * rk;
        b.row(j) = std::sin(th) * rj + std::cos(th) * rk;
    }

    // Residual must be a +-1 diagonal; signs move into the phase layer.
    Eigen::VectorXd d(m);
    for (int p = 0; p < m; ++p) d(p) = b(p, p) >= 0 ? 1.0 : -1.0;
    if ((b - Eigen::MatrixXd(d.asDiagonal())).cwiseAbs().maxCoeff() > 1e-8)
        throw std::domain_error("resynthesize: Givens peel left a non-diagonal residual");
    for (int i = 0; i < L; ++i)
        if (d(slots[i] - 1) * d(slots[i]) < 0) theta[i] = -theta[i];

    Circuit out(m);
    if (static_cast<int>(perm.size()) == m) out.permutation = perm;
    for (int i = 0; i < L; ++i)
        out.gates.push_back(
            Gate::match_block(slots[i], slots[i] + 1, wrap_angle(theta[i]), wrap_angle(theta[i])));
    for (int p = 1; p <= m; ++p) {
        const double phase_gate = wrap_angle(-phi(p - 1) - (d(p - 1) < 0 ? kPi : 0.0));
        out.gates.push_back(Gate::phase(p, phase_gate));
    }

    if ((one_body_of_circuit(out) - u).cwiseAbs().maxCoeff() > 1e-8)
        throw std::domain_error("resynthesize: self-check failed");
    return out;
}

} // namespace fermidyn
