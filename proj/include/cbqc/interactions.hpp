// interactions.hpp
// The chip's physical gate set: dispersive two-atom collision gate, resonant
// atom-cavity photon exchange, cavity-conditioned phase gate, and classical
// Ramsey rotations, plus the three-atom GHZ memory sequence.
//
// Atom level digits follow AtomLevel: e=0, f=1, g=2. The dispersive gate is
// the exact printed map on the {e,f}x{f,g} collision subspace. For the
// resonant exchange the |f> level is taken as the upper level of the maser
// transition by default; the orientation is an explicit parameter because the
// photon-copy step of the memory sequence needs the opposite one.
//
// Phase convention: exchange transfers carry a factor -i (vacuum Rabi
// convention). The memory sequence cancels them with a fixed +i Ramsey phase
// on the transferred level, so psi1/psi2/psi3 come out with real amplitudes.

#pragma once

#include <cmath>
#include <string>

#include "cbqc/gates.hpp"
#include "cbqc/state.hpp"

namespace cbqc {

struct InteractionParams {
    double omega = 2.0 * M_PI * 1e6;  // rad/s, ~1 MHz coupling
    double delta = 2.0 * M_PI * 1e7;  // rad/s
    double t = 0.0;                   // s

    double lambda() const { return omega * omega / delta; }

    void require_dispersive() const {
        if (delta < 10.0 * omega) {
            throw contract_violation_error("dispersive regime requires delta >= 10*omega");
        }
    }
};

struct RamseyPulse {
    enum class Kind { Rotation, Hadamard };
    Kind kind = Kind::Rotation;
    std::pair<AtomLevel, AtomLevel> level_pair{AtomLevel::F, AtomLevel::G};
    double theta = 0.0;  // rotation angle (rad)
    double phi = 0.0;    // rotation axis phase (rad)

    static RamseyPulse rotation(std::pair<AtomLevel, AtomLevel> pair, double theta,
                                double phi = 0.0) {
        return {Kind::Rotation, pair, theta, phi};
    }
    static RamseyPulse hadamard(std::pair<AtomLevel, AtomLevel> pair) {
        return {Kind::Hadamard, pair, M_PI, 0.0};
    }
};

namespace detail {

inline void require_atom(const StateVector& state, const std::string& label) {
    if (state.spec_of(label).kind != SubsystemKind::Atom) {
        throw invalid_input_error(label + " is not an atom");
    }
}

inline int atom_digit(AtomLevel l) { return static_cast<int>(l); }

}  // namespace detail

// Exact dispersive collision map (atom1 on the {e,f} basis, atom2 on {f,g}):
//   |e f> -> e^{-i L}[cos L |e f> - i sin L |f e>]   (L = lambda*t)
//   |f e> -> e^{-i L}[-i sin L |e f> + cos L |f e>]  (unitary completion)
//   |e g> -> e^{-i L} |e g>
// identity on every other level combination. At L = pi this is CZ on the
// logical encoding (atom1: f=0,e=1; atom2: f=0,g=1).
inline Matrix dispersive_collision_matrix(double lambda_t) {
    Matrix m = Matrix::Identity(9, 9);
    const Complex ph = std::polar(1.0, -lambda_t);
    const double c = std::cos(lambda_t), s = std::sin(lambda_t);
    const int ef = 0 * 3 + 1, fe = 1 * 3 + 0, eg = 0 * 3 + 2;
    m(ef, ef) = ph * c;
    m(ef, fe) = ph * Complex(0, -1) * s;
    m(fe, ef) = ph * Complex(0, -1) * s;
    m(fe, fe) = ph * c;
    m(eg, eg) = ph;
    return m;
}

inline StateVector dispersive_collision(const StateVector& state, const std::string& atom1,
                                        const std::string& atom2, double lambda_t) {
    detail::require_atom(state, atom1);
    detail::require_atom(state, atom2);
    if (lambda_t < 0.0) throw invalid_input_error("lambda_t must be >= 0");
    return apply_unitary(state, {{atom1, atom2}, dispersive_collision_matrix(lambda_t)});
}

// Physical-mode dispersive gate: integrates the effective Hamiltonian
//   H(t) = l1(t)|e><e|_1 + l2(t)|e><e|_2 + lx(t)(|ef><fe| + |fe><ef|)
// with Gaussian mode profiles g_j(t) = a_j exp(-(t - d_j)^2 / (2 s^2)),
// l1 = k g1^2, l2 = k g2^2, lx = k g1 g2, calibrated so that the nominal
// pulse (a = 1, no mismatch) has area pi and reproduces the exact gate.
// `mismatch_frac` is the arrival-time difference in units of the overlap
// time s; `area1`/`area2` scale each atom's pulse area.
inline Matrix dispersive_collision_physical_matrix(double mismatch_frac, double area1 = 1.0,
                                                   double area2 = 1.0, int steps = 800) {
    const double sigma = 1.0;  // work in overlap-time units
    const double kappa = std::sqrt(M_PI) / sigma;
    const double delay = mismatch_frac * sigma;
    const double t0 = -5.0 * sigma, t1 = 5.0 * sigma + delay;
    const double dt = (t1 - t0) / steps;

    // Diagonal phases integrate exactly; only the {|ef>,|fe>} block needs
    // time-ordered integration.
    double phi1 = 0.0, phi2 = 0.0;
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + (k + 0.5) * dt;
        const double g1 = area1 * std::exp(-t * t / (2.0 * sigma * sigma));
        const double g2 =
            area2 * std::exp(-(t - delay) * (t - delay) / (2.0 * sigma * sigma));
        const double l1 = kappa * g1 * g1;
        const double l2 = kappa * g2 * g2;
        const double lx = kappa * g1 * g2;
        phi1 += l1 * dt;
        phi2 += l2 * dt;
        // exp(-i H2 dt) for H2 = [[l1, lx],[lx, l2]] in closed form.
        const double c0 = 0.5 * (l1 + l2), cz = 0.5 * (l1 - l2);
        const double r = std::hypot(cz, lx);
        Eigen::Matrix2cd step = Eigen::Matrix2cd::Identity();
        if (r > 0.0) {
            const double cr = std::cos(r * dt), sr = std::sin(r * dt);
            step(0, 0) = Complex(cr, 0) + Complex(0, -sr) * (cz / r);
            step(1, 1) = Complex(cr, 0) - Complex(0, -sr) * (cz / r);
            step(0, 1) = Complex(0, -sr) * (lx / r);
            step(1, 0) = Complex(0, -sr) * (lx / r);
        }
        u = (std::polar(1.0, -c0 * dt) * step) * u;
    }

    Matrix m = Matrix::Identity(9, 9);
    const int ef = 1, fe = 3, eg = 2, ee = 0, ge = 2 * 3 + 0;
    m(ef, ef) = u(0, 0);
    m(ef, fe) = u(0, 1);
    m(fe, ef) = u(1, 0);
    m(fe, fe) = u(1, 1);
    m(eg, eg) = std::polar(1.0, -phi1);
    m(ee, ee) = std::polar(1.0, -(phi1 + phi2));
    m(ge, ge) = std::polar(1.0, -phi2);
    return m;
}

inline StateVector dispersive_collision_physical(const StateVector& state,
                                                 const std::string& atom1,
                                                 const std::string& atom2,
                                                 double mismatch_frac, double area1 = 1.0,
                                                 double area2 = 1.0) {
    detail::require_atom(state, atom1);
    detail::require_atom(state, atom2);
    Matrix m = dispersive_collision_physical_matrix(mismatch_frac, area1, area2);
    return apply_unitary(state, {{atom1, atom2}, m, /*kraus=*/true});
}

// Resonant atom-cavity exchange: rotates each pair {|upper,n>, |lower,n+1>}
// by angle theta*sqrt(n+1) (half-angle convention: theta = pi transfers the
// excitation completely, with a -i phase on the transferred component).
inline StateVector resonant_exchange(const StateVector& state, const std::string& atom,
                                     const std::string& cavity, double theta,
                                     AtomLevel upper = AtomLevel::F,
                                     AtomLevel lower = AtomLevel::E) {
    detail::require_atom(state, atom);
    const auto& cav = state.spec_of(cavity);
    if (cav.kind != SubsystemKind::Cavity || cav.dim < 2) {
        throw invalid_input_error("resonant_exchange requires a cavity with n_max >= 1");
    }
    if (upper == lower) throw invalid_input_error("upper and lower levels must differ");
    const int n_max = cav.dim - 1;
    const int up = detail::atom_digit(upper), lo = detail::atom_digit(lower);

    // |upper, n_max> has no partner inside the truncation; any amplitude
    // there would leak out of the Fock space.
    {
        std::size_t pa = static_cast<std::size_t>(state.position_of(atom));
        std::size_t pc = static_cast<std::size_t>(state.position_of(cavity));
        std::size_t sa = state.stride(pa), sc = state.stride(pc);
        double leak = 0.0;
        for (std::size_t i = 0; i < state.size(); ++i) {
            if ((i / sa) % kAtomDim == static_cast<std::size_t>(up) &&
                (i / sc) % static_cast<std::size_t>(cav.dim) == static_cast<std::size_t>(n_max)) {
                leak += std::norm(state.amps()[i]);
            }
        }
        if (leak > kNormTol && std::abs(std::sin(theta * std::sqrt(n_max + 1.0) / 2.0)) > kNormTol) {
            throw truncation_error("amplitude would leave the cavity Fock truncation");
        }
    }

    const int d = kAtomDim * cav.dim;
    Matrix m = Matrix::Identity(d, d);
    auto idx = [&](int level, int n) { return level * cav.dim + n; };
    for (int n = 0; n + 1 <= n_max; ++n) {
        const double half = theta * std::sqrt(n + 1.0) / 2.0;
        const double c = std::cos(half), s = std::sin(half);
        const int iu = idx(up, n), il = idx(lo, n + 1);
        m(iu, iu) = c;
        m(iu, il) = Complex(0, -1) * s;
        m(il, iu) = Complex(0, -1) * s;
        m(il, il) = c;
    }
    return apply_unitary(state, {{atom, cavity}, m});
}

// Conditional pi phase: -1 on |one_level> (x) |1>_C, identity elsewhere.
// Requires the cavity to be confined to Fock {0,1}.
inline StateVector cavity_conditioned_phase(const StateVector& state, const std::string& atom,
                                            const std::string& cavity,
                                            AtomLevel one_level = AtomLevel::G) {
    detail::require_atom(state, atom);
    const auto& cav = state.spec_of(cavity);
    if (cav.kind != SubsystemKind::Cavity) {
        throw invalid_input_error(cavity + " is not a cavity");
    }
    if (cav.dim > 2) {
        std::size_t pc = static_cast<std::size_t>(state.position_of(cavity));
        std::size_t sc = state.stride(pc);
        double high = 0.0;
        for (std::size_t i = 0; i < state.size(); ++i) {
            if ((i / sc) % static_cast<std::size_t>(cav.dim) > 1) {
                high += std::norm(state.amps()[i]);
            }
        }
        if (high > kNormTol) {
            throw unsupported_regime_error("cavity populated beyond Fock n=1");
        }
    }
    const int d = kAtomDim * cav.dim;
    Matrix m = Matrix::Identity(d, d);
    m(detail::atom_digit(one_level) * cav.dim + 1,
      detail::atom_digit(one_level) * cav.dim + 1) = -1.0;
    return apply_unitary(state, {{atom, cavity}, m});
}

// Classical Ramsey field: SU(2) rotation (or the Hadamard preset) on the
// pulse's level pair, identity on the third level.
inline StateVector ramsey_rotate(const StateVector& state, const std::string& atom,
                                 const RamseyPulse& pulse) {
    detail::require_atom(state, atom);
    Matrix m2 = pulse.kind == RamseyPulse::Kind::Hadamard
                    ? hadamard2()
                    : su2_rotation(pulse.theta, pulse.phi);
    std::pair<int, int> pair{detail::atom_digit(pulse.level_pair.first),
                             detail::atom_digit(pulse.level_pair.second)};
    return apply_unitary(state, {{atom}, embed_pair(kAtomDim, pair, m2)});
}

// Fixed phase correction absorbing the -i of an exchange transfer.
inline StateVector exchange_phase_fix(const StateVector& state, const std::string& atom,
                                      AtomLevel level) {
    detail::require_atom(state, atom);
    return apply_unitary(
        state, {{atom}, level_phase(kAtomDim, detail::atom_digit(level), Complex(0, 1))});
}

// The three-atom memory sequence on a fresh (A1, A2, A3) register:
//   psi1 = (|f,0> + |e,1>)/sqrt2            (A1 pi/2 exchange, f upper)
//   psi2 = (1/2)[|ff0> + |fg0> + |ef1> - |eg1>]  (A2 conditioned phase)
//   psi3 = (1/2)[|fff> + |fgf> + |efe> - |ege>]  (A3 absorbs the photon)
// The cavity is verified decoupled (Schmidt rank 1 across the cavity cut)
// and removed.
inline StateVector ghz_sequence() {
    std::vector<SubsystemSpec> specs{SubsystemSpec::atom("A1"), SubsystemSpec::atom("A2"),
                                     SubsystemSpec::atom("A3"),
                                     SubsystemSpec::cavity("C", 1)};
    const int f = static_cast<int>(AtomLevel::F);
    StateVector st = new_product_state(specs, {f, f, f, 0});

    st = resonant_exchange(st, "A1", "C", M_PI / 2.0, AtomLevel::F, AtomLevel::E);
    st = exchange_phase_fix(st, "A1", AtomLevel::E);

    st = ramsey_rotate(st, "A2", RamseyPulse::hadamard({AtomLevel::F, AtomLevel::G}));
    st = cavity_conditioned_phase(st, "A2", "C", AtomLevel::G);

    st = resonant_exchange(st, "A3", "C", M_PI, AtomLevel::E, AtomLevel::F);
    st = exchange_phase_fix(st, "A3", AtomLevel::E);

    if (schmidt_rank(st, {"C"}) != 1) {
        throw contract_violation_error("cavity failed to decouple in ghz_sequence");
    }
    return remove_subsystem(st, "C", 0);
}

}  // namespace cbqc
