// state.hpp
// Dense state-vector engine over an ordered register of heterogeneous
// subsystems (3-level atoms, truncated cavities, logical qubits).
//
// Index convention: row-major over the register, first subsystem most
// significant. All operator matrices follow the same convention, with the
// row/column digit order given by the operator's target list.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cbqc/errors.hpp"
#include "cbqc/rng.hpp"

namespace cbqc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kNormTol = 1e-10;
inline constexpr double kSchmidtTol = 1e-8;

// Atom levels, in register digit order.
enum class AtomLevel : int { E = 0, F = 1, G = 2 };
inline constexpr int kAtomDim = 3;

enum class SubsystemKind { Atom, Cavity, LogicalQubit };

struct SubsystemSpec {
    std::string label;
    SubsystemKind kind = SubsystemKind::LogicalQubit;
    int dim = 2;

    static SubsystemSpec atom(std::string label) {
        return {std::move(label), SubsystemKind::Atom, kAtomDim};
    }
    static SubsystemSpec cavity(std::string label, int n_max = 1) {
        return {std::move(label), SubsystemKind::Cavity, n_max + 1};
    }
    static SubsystemSpec qubit(std::string label) {
        return {std::move(label), SubsystemKind::LogicalQubit, 2};
    }

    friend bool operator==(const SubsystemSpec& a, const SubsystemSpec& b) {
        return a.label == b.label && a.kind == b.kind && a.dim == b.dim;
    }
};

struct LocalOperator {
    std::vector<std::string> targets;
    Matrix matrix;
    bool kraus = false;  // skip the unitarity contract when true
};

struct MeasurementBasis {
    enum class Kind { Z, X, Y, Balpha };
    Kind kind = Kind::Z;
    double alpha = 0.0;  // meaningful for Balpha
    // The two levels spanning the measured qubit, as digit indices of the
    // target subsystem. (0,1) fits logical qubits and cavities.
    std::pair<int, int> level_pair{0, 1};

    static MeasurementBasis z(std::pair<int, int> pair = {0, 1}) {
        return {Kind::Z, 0.0, pair};
    }
    static MeasurementBasis x(std::pair<int, int> pair = {0, 1}) {
        return {Kind::X, 0.0, pair};
    }
    static MeasurementBasis y(std::pair<int, int> pair = {0, 1}) {
        return {Kind::Y, M_PI / 2.0, pair};
    }
    static MeasurementBasis b_alpha(double alpha, std::pair<int, int> pair = {0, 1}) {
        return {Kind::Balpha, alpha, pair};
    }

    // Angle of the {|0> +- e^{i a}|1>}/sqrt2 basis; Z has none.
    double angle() const {
        switch (kind) {
            case Kind::Z: throw invalid_input_error("Z basis has no angle");
            case Kind::X: return 0.0;
            case Kind::Y: return M_PI / 2.0;
            case Kind::Balpha: return alpha;
        }
        return 0.0;
    }
};

struct MeasurementResult;

class StateVector {
  public:
    StateVector() = default;

    StateVector(std::vector<SubsystemSpec> reg, std::vector<Complex> amps)
        : register_(std::move(reg)), amps_(std::move(amps)) {
        if (amps_.size() != total_dim()) {
            throw invalid_input_error("amplitude vector length does not match register");
        }
    }

    const std::vector<SubsystemSpec>& reg() const { return register_; }
    const std::vector<Complex>& amps() const { return amps_; }
    std::vector<Complex>& amps() { return amps_; }
    std::size_t size() const { return amps_.size(); }

    std::size_t total_dim() const {
        std::size_t n = 1;
        for (const auto& s : register_) n *= static_cast<std::size_t>(s.dim);
        return n;
    }

    int position_of(const std::string& label) const {
        for (std::size_t i = 0; i < register_.size(); ++i) {
            if (register_[i].label == label) return static_cast<int>(i);
        }
        throw invalid_input_error("unknown subsystem label: " + label);
    }

    const SubsystemSpec& spec_of(const std::string& label) const {
        return register_[static_cast<std::size_t>(position_of(label))];
    }

    // Stride of subsystem at position p (row-major, first most significant).
    std::size_t stride(std::size_t p) const {
        std::size_t s = 1;
        for (std::size_t i = p + 1; i < register_.size(); ++i) {
            s *= static_cast<std::size_t>(register_[i].dim);
        }
        return s;
    }

    std::size_t index_of(const std::vector<int>& digits) const {
        if (digits.size() != register_.size()) {
            throw invalid_input_error("one digit per subsystem required");
        }
        std::size_t idx = 0;
        for (std::size_t i = 0; i < register_.size(); ++i) {
            if (digits[i] < 0 || digits[i] >= register_[i].dim) {
                throw invalid_input_error("basis index out of range for subsystem " +
                                          register_[i].label);
            }
            idx = idx * static_cast<std::size_t>(register_[i].dim) +
                  static_cast<std::size_t>(digits[i]);
        }
        return idx;
    }

    double norm() const {
        double n = 0.0;
        for (const auto& a : amps_) n += std::norm(a);
        return std::sqrt(n);
    }

    void normalize() {
        double n = norm();
        if (n == 0.0) throw contract_violation_error("cannot normalize zero state");
        for (auto& a : amps_) a /= n;
    }

  private:
    std::vector<SubsystemSpec> register_;
    std::vector<Complex> amps_;
};

inline bool same_register(const StateVector& a, const StateVector& b) {
    if (a.reg().size() != b.reg().size()) return false;
    for (std::size_t i = 0; i < a.reg().size(); ++i) {
        if (!(a.reg()[i] == b.reg()[i])) return false;
    }
    return true;
}

inline StateVector new_product_state(std::vector<SubsystemSpec> specs,
                                     const std::vector<int>& initial_levels) {
    if (initial_levels.size() != specs.size()) {
        throw invalid_input_error("one initial level per subsystem required");
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].dim < 2) throw invalid_input_error("subsystem dim must be >= 2");
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            if (specs[i].label == specs[j].label) {
                throw invalid_input_error("duplicate subsystem label: " + specs[i].label);
            }
        }
    }
    std::size_t n = 1;
    for (const auto& s : specs) n *= static_cast<std::size_t>(s.dim);
    StateVector st(std::move(specs), std::vector<Complex>(n, Complex(0, 0)));
    st.amps()[st.index_of(initial_levels)] = Complex(1, 0);
    return st;
}

namespace detail {

// Applies `matrix` to the target subsystems without any contract checks.
inline void apply_matrix_in_place(StateVector& state,
                                  const std::vector<std::string>& targets,
                                  const Matrix& matrix) {
    const auto& reg = state.reg();
    std::vector<std::size_t> tpos;
    std::vector<std::size_t> tstride;
    std::vector<int> tdim;
    tpos.reserve(targets.size());
    for (const auto& label : targets) {
        std::size_t p = static_cast<std::size_t>(state.position_of(label));
        for (auto q : tpos) {
            if (q == p) throw invalid_input_error("duplicate target: " + label);
        }
        tpos.push_back(p);
        tstride.push_back(state.stride(p));
        tdim.push_back(reg[p].dim);
    }
    const std::size_t block = static_cast<std::size_t>(matrix.rows());
    {
        std::size_t d = 1;
        for (int x : tdim) d *= static_cast<std::size_t>(x);
        if (d != block || matrix.rows() != matrix.cols()) {
            throw invalid_input_error("operator dimension does not match targets");
        }
    }

    // Offsets of each target-digit combination (row-major in target order).
    std::vector<std::size_t> offsets(block, 0);
    for (std::size_t c = 0; c < block; ++c) {
        std::size_t rem = c;
        for (std::size_t k = targets.size(); k-- > 0;) {
            std::size_t digit = rem % static_cast<std::size_t>(tdim[k]);
            rem /= static_cast<std::size_t>(tdim[k]);
            offsets[c] += digit * tstride[k];
        }
    }

    // Enumerate non-target subsystems with a mixed-radix counter.
    std::vector<std::size_t> rpos;
    for (std::size_t i = 0; i < reg.size(); ++i) {
        if (std::find(tpos.begin(), tpos.end(), i) == tpos.end()) rpos.push_back(i);
    }
    std::vector<int> rdigit(rpos.size(), 0);
    std::vector<Complex> in(block), out(block);
    auto& amps = state.amps();
    for (;;) {
        std::size_t base = 0;
        for (std::size_t k = 0; k < rpos.size(); ++k) {
            base += static_cast<std::size_t>(rdigit[k]) * state.stride(rpos[k]);
        }
        for (std::size_t c = 0; c < block; ++c) in[c] = amps[base + offsets[c]];
        for (std::size_t r = 0; r < block; ++r) {
            Complex acc(0, 0);
            for (std::size_t c = 0; c < block; ++c) acc += matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
            out[r] = acc;
        }
        for (std::size_t c = 0; c < block; ++c) amps[base + offsets[c]] = out[c];

        std::size_t k = rpos.size();
        while (k-- > 0) {
            if (++rdigit[k] < reg[rpos[k]].dim) break;
            rdigit[k] = 0;
            if (k == 0) return;
        }
        if (rpos.empty()) return;
        if (k == static_cast<std::size_t>(-1)) return;
    }
}

inline bool is_unitary(const Matrix& m, double tol = kUnitaryTol) {
    Matrix d = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace detail

inline StateVector apply_unitary(const StateVector& state, const LocalOperator& op) {
    if (!op.kraus && !detail::is_unitary(op.matrix)) {
        throw contract_violation_error("operator matrix is not unitary");
    }
    StateVector out = state;
    detail::apply_matrix_in_place(out, op.targets, op.matrix);
    return out;
}

// <psi| O |psi> for an arbitrary (not necessarily unitary) local operator.
inline Complex expectation(const StateVector& state, const LocalOperator& op) {
    StateVector tmp = state;
    detail::apply_matrix_in_place(tmp, op.targets, op.matrix);
    Complex acc(0, 0);
    for (std::size_t i = 0; i < state.size(); ++i) {
        acc += std::conj(state.amps()[i]) * tmp.amps()[i];
    }
    return acc;
}

struct MeasurementResult {
    int outcome = +1;  // +1 or -1 eigenvalue; bit = (outcome == -1)
    double prob = 0.0;
    StateVector collapsed;
    int bit() const { return outcome == -1 ? 1 : 0; }
};

inline MeasurementResult measure(const StateVector& state, const std::string& target,
                                 const MeasurementBasis& basis, Rng& rng) {
    std::size_t p = static_cast<std::size_t>(state.position_of(target));
    const auto& spec = state.reg()[p];
    auto [la, lb] = basis.level_pair;
    if (la < 0 || lb < 0 || la >= spec.dim || lb >= spec.dim || la == lb) {
        throw invalid_input_error("level pair invalid for target " + target);
    }

    const std::size_t str = state.stride(p);
    const std::size_t dim = static_cast<std::size_t>(spec.dim);
    const auto& amps = state.amps();

    // Population outside the level pair must vanish.
    if (dim > 2) {
        double residual = 0.0;
        for (std::size_t i = 0; i < state.size(); ++i) {
            std::size_t digit = (i / str) % dim;
            if (digit != static_cast<std::size_t>(la) && digit != static_cast<std::size_t>(lb)) {
                residual += std::norm(amps[i]);
            }
        }
        if (residual > kNormTol) {
            throw basis_undefined_error("amplitude outside level pair on " + target);
        }
    }

    StateVector plus = state;
    StateVector minus = state;
    double p_plus = 0.0, p_minus = 0.0;
    const bool is_z = basis.kind == MeasurementBasis::Kind::Z;
    const Complex phase = is_z ? Complex(1, 0) : std::polar(1.0, basis.angle());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    for (std::size_t i = 0; i < state.size(); ++i) {
        std::size_t digit = (i / str) % dim;
        if (digit != static_cast<std::size_t>(la)) continue;
        std::size_t ia = i;
        std::size_t ib = i + (static_cast<std::size_t>(lb) - static_cast<std::size_t>(la)) * str;
        Complex aa = amps[ia], ab = amps[ib];
        if (is_z) {
            p_plus += std::norm(aa);
            p_minus += std::norm(ab);
            plus.amps()[ib] = Complex(0, 0);
            minus.amps()[ia] = Complex(0, 0);
        } else {
            Complex cp = (aa + std::conj(phase) * ab) * inv_sqrt2;
            Complex cm = (aa - std::conj(phase) * ab) * inv_sqrt2;
            p_plus += std::norm(cp);
            p_minus += std::norm(cm);
            plus.amps()[ia] = cp * inv_sqrt2;
            plus.amps()[ib] = cp * phase * inv_sqrt2;
            minus.amps()[ia] = cm * inv_sqrt2;
            minus.amps()[ib] = -cm * phase * inv_sqrt2;
        }
    }

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool take_plus = unif(rng) < p_plus;
    MeasurementResult res;
    res.outcome = take_plus ? +1 : -1;
    res.prob = take_plus ? p_plus : p_minus;
    res.collapsed = take_plus ? std::move(plus) : std::move(minus);
    if (res.prob <= 0.0) throw contract_violation_error("sampled zero-probability branch");
    res.collapsed.normalize();
    return res;
}

// Deterministic variant used by branch enumeration: projects onto the given
// outcome and reports its Born probability (which may be zero).
inline MeasurementResult project_outcome(const StateVector& state, const std::string& target,
                                         const MeasurementBasis& basis, int outcome) {
    Rng dummy(0);
    // Compute both branches, then pick. Reuses measure() internals cheaply by
    // projecting directly here.
    std::size_t p = static_cast<std::size_t>(state.position_of(target));
    const auto& spec = state.reg()[p];
    auto [la, lb] = basis.level_pair;
    const std::size_t str = state.stride(p);
    const std::size_t dim = static_cast<std::size_t>(spec.dim);
    if (dim > 2) {
        double residual = 0.0;
        for (std::size_t i = 0; i < state.size(); ++i) {
            std::size_t digit = (i / str) % dim;
            if (digit != static_cast<std::size_t>(la) && digit != static_cast<std::size_t>(lb)) {
                residual += std::norm(state.amps()[i]);
            }
        }
        if (residual > kNormTol) {
            throw basis_undefined_error("amplitude outside level pair on " + target);
        }
    }
    StateVector branch = state;
    double prob = 0.0;
    const bool is_z = basis.kind == MeasurementBasis::Kind::Z;
    const Complex phase = is_z ? Complex(1, 0) : std::polar(1.0, basis.angle());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const bool want_plus = outcome == +1;
    for (std::size_t i = 0; i < state.size(); ++i) {
        std::size_t digit = (i / str) % dim;
        if (digit != static_cast<std::size_t>(la)) continue;
        std::size_t ia = i;
        std::size_t ib = i + (static_cast<std::size_t>(lb) - static_cast<std::size_t>(la)) * str;
        Complex aa = state.amps()[ia], ab = state.amps()[ib];
        if (is_z) {
            if (want_plus) {
                prob += std::norm(aa);
                branch.amps()[ib] = Complex(0, 0);
            } else {
                prob += std::norm(ab);
                branch.amps()[ia] = Complex(0, 0);
            }
        } else {
            double sign = want_plus ? 1.0 : -1.0;
            Complex c = (aa + sign * std::conj(phase) * ab) * inv_sqrt2;
            prob += std::norm(c);
            branch.amps()[ia] = c * inv_sqrt2;
            branch.amps()[ib] = sign * c * phase * inv_sqrt2;
        }
    }
    MeasurementResult res;
    res.outcome = outcome;
    res.prob = prob;
    if (prob > 0.0) {
        branch.normalize();
        res.collapsed = std::move(branch);
    }
    return res;
}

inline double fidelity(const StateVector& a, const StateVector& b) {
    if (!same_register(a, b)) {
        throw invalid_input_error("fidelity requires identical registers");
    }
    Complex overlap(0, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        overlap += std::conj(a.amps()[i]) * b.amps()[i];
    }
    return std::norm(overlap);
}

inline int schmidt_rank(const StateVector& state, const std::vector<std::string>& cut,
                        double tol = kSchmidtTol) {
    if (cut.empty() || cut.size() >= state.reg().size()) {
        throw invalid_input_error("cut must be a nonempty proper subset");
    }
    std::vector<bool> in_cut(state.reg().size(), false);
    for (const auto& label : cut) {
        std::size_t p = static_cast<std::size_t>(state.position_of(label));
        if (in_cut[p]) throw invalid_input_error("duplicate label in cut: " + label);
        in_cut[p] = true;
    }
    std::size_t rows = 1, cols = 1;
    for (std::size_t i = 0; i < state.reg().size(); ++i) {
        if (in_cut[i]) rows *= static_cast<std::size_t>(state.reg()[i].dim);
        else cols *= static_cast<std::size_t>(state.reg()[i].dim);
    }
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::vector<std::size_t> digits(state.reg().size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        std::size_t r = 0, c = 0;
        std::size_t rem = i;
        for (std::size_t k = state.reg().size(); k-- > 0;) {
            std::size_t d = static_cast<std::size_t>(state.reg()[k].dim);
            digits[k] = rem % d;
            rem /= d;
        }
        for (std::size_t k = 0; k < state.reg().size(); ++k) {
            std::size_t d = static_cast<std::size_t>(state.reg()[k].dim);
            if (in_cut[k]) r = r * d + digits[k];
            else c = c * d + digits[k];
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = state.amps()[i];
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    int rank = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        if (svd.singularValues()(k) > tol) ++rank;
    }
    return rank;
}

// Tensor product: register of `a` followed by register of `b`.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<SubsystemSpec> reg = a.reg();
    for (const auto& s : b.reg()) {
        for (const auto& t : reg) {
            if (t.label == s.label) {
                throw invalid_input_error("duplicate label in tensor: " + s.label);
            }
        }
        reg.push_back(s);
    }
    std::vector<Complex> amps(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            amps[i * b.size() + j] = a.amps()[i] * b.amps()[j];
        }
    }
    return StateVector(std::move(reg), std::move(amps));
}

// Removes a subsystem known to be in basis state `level` (within tol);
// errors otherwise.
inline StateVector remove_subsystem(const StateVector& state, const std::string& label,
                                    int level, double tol = kNormTol) {
    std::size_t p = static_cast<std::size_t>(state.position_of(label));
    const auto& spec = state.reg()[p];
    if (level < 0 || level >= spec.dim) throw invalid_input_error("level out of range");
    const std::size_t str = state.stride(p);
    const std::size_t dim = static_cast<std::size_t>(spec.dim);
    double residual = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if ((i / str) % dim != static_cast<std::size_t>(level)) {
            residual += std::norm(state.amps()[i]);
        }
    }
    if (residual > tol) {
        throw contract_violation_error("subsystem " + label + " is not factored at level " +
                                       std::to_string(level));
    }
    std::vector<SubsystemSpec> reg;
    for (std::size_t i = 0; i < state.reg().size(); ++i) {
        if (i != p) reg.push_back(state.reg()[i]);
    }
    std::vector<Complex> amps(state.size() / dim);
    std::size_t out = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if ((i / str) % dim == static_cast<std::size_t>(level)) amps[out++] = state.amps()[i];
    }
    StateVector res(std::move(reg), std::move(amps));
    res.normalize();
    return res;
}

// Reorders the register into the given label order (same subsystems).
inline StateVector reorder(const StateVector& state, const std::vector<std::string>& order) {
    if (order.size() != state.reg().size()) {
        throw invalid_input_error("reorder must list every subsystem exactly once");
    }
    std::vector<std::size_t> perm;  // perm[k] = old position of new slot k
    perm.reserve(order.size());
    for (const auto& label : order) {
        std::size_t p = static_cast<std::size_t>(state.position_of(label));
        for (auto q : perm) {
            if (q == p) throw invalid_input_error("duplicate label in reorder: " + label);
        }
        perm.push_back(p);
    }
    std::vector<SubsystemSpec> reg;
    reg.reserve(order.size());
    for (auto p : perm) reg.push_back(state.reg()[p]);
    StateVector res(reg, std::vector<Complex>(state.size(), Complex(0, 0)));
    std::vector<std::size_t> digits(state.reg().size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        std::size_t rem = i;
        for (std::size_t k = state.reg().size(); k-- > 0;) {
            std::size_t d = static_cast<std::size_t>(state.reg()[k].dim);
            digits[k] = rem % d;
            rem /= d;
        }
        std::size_t j = 0;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            j = j * static_cast<std::size_t>(state.reg()[perm[k]].dim) + digits[perm[k]];
        }
        res.amps()[j] = state.amps()[i];
    }
    return res;
}

}  // namespace cbqc
