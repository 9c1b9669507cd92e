// noise.hpp
// Physical noise channels and Monte-Carlo fidelity estimation: closed-form
// decoherence figures, truncated-normal run perturbations, the physical-mode
// collision fidelity, and a trajectory-sampling Monte-Carlo harness over
// run_physical.
//
// Trajectory model: cavity decay between atoms is unravelled per trial --
// with probability p1 * (1 - e^(-t/t_cav)) the stored photon jumps out,
// otherwise the Fock-1 amplitude is damped by e^(-t/(2 t_cav)) and the
// state renormalized. One velocity sample per atom feeds both the pulse
// area (theta -> theta * v) and the collision arrival time. Undetected or
// unfilled atoms make a trial unheralded rather than silently wrong.
//
// Trials draw from independent streams derived via derive_stream(seed, i),
// so results are bit-identical for any thread count.

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <thread>
#include <vector>

#include "cbqc/scheduler.hpp"

namespace cbqc {

inline double coherence_loss(double t, double t_cav) {
    if (t < 0.0 || t_cav <= 0.0) {
        throw invalid_input_error("coherence_loss requires t >= 0 and t_cav > 0");
    }
    return 1.0 - std::exp(-t / (2.0 * t_cav));
}

inline double coupling_scale(double n1, double n2) {
    if (n1 < 1.0 || n2 < 1.0) {
        throw invalid_input_error("principal quantum numbers must be >= 1");
    }
    double r = n1 / n2;
    return r * r * r * r;
}

inline double cavity_lifetime(double q, double frequency) {
    if (q <= 0.0 || frequency <= 0.0) {
        throw invalid_input_error("cavity_lifetime requires positive Q and frequency");
    }
    return q / (2.0 * M_PI * frequency);
}

struct PhysicalRegime {
    int n_principal = 50;
    double q_factor = 5e10;
    double frequency = 2.65e10;  // Hz

    double lifetime() const { return cavity_lifetime(q_factor, frequency); }
};

struct NoiseParams {
    double velocity_sigma_frac = 0.005;
    double emission_jitter_sigma = 1e-8;  // s
    double t_cav = 1e-2;                  // s
    double t_interaction = 1e-6;          // s
    double t_between_atoms = 1e-5;        // s
    double eta_detect = 0.8;
    double eta_ionize = 0.98;
    double rotation_error_frac = 0.001;
    // Lumped stray-field Z-phase random walk, rad^2/s accumulated over one
    // inter-atom interval. Off by default: a hook, not a calibrated figure.
    double dephasing_rate = 0.0;

    static NoiseParams noiseless() {
        NoiseParams p;
        p.velocity_sigma_frac = 0.0;
        p.emission_jitter_sigma = 0.0;
        p.rotation_error_frac = 0.0;
        p.t_cav = std::numeric_limits<double>::infinity();
        return p;
    }

    void validate() const {
        if (velocity_sigma_frac < 0.0 || emission_jitter_sigma < 0.0 ||
            rotation_error_frac < 0.0 || dephasing_rate < 0.0) {
            throw invalid_input_error("noise sigmas must be >= 0");
        }
        if (t_cav <= 0.0 || t_interaction <= 0.0 || t_between_atoms <= 0.0) {
            throw invalid_input_error("noise times must be positive");
        }
        for (double p : {eta_detect, eta_ionize}) {
            if (p < 0.0 || p > 1.0) {
                throw invalid_input_error("detector efficiencies must lie in [0,1]");
            }
        }
    }
};

// Nominal source-to-cavity transit time (s), the mean of the emission offset.
inline constexpr double kTransitTime = 1e-8;

struct AtomNoise {
    int beam = 0;
    int cycle = 0;
    double velocity_factor = 1.0;
    double emission_offset = kTransitTime;  // s
    double rotation_error = 0.0;            // fractional Ramsey angle error
    double dephasing_phase = 0.0;           // rad, stray-field Z kick
    bool detected = true;
};

// One perturbation record per timeline atom, in timeline order. Draw order
// per atom: velocity, offset, rotation error, dephasing phase, detection.
inline std::vector<AtomNoise> sample_run_noise(const NoiseParams& params, const Timeline& tl,
                                               Rng& rng) {
    params.validate();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<AtomNoise> out;
    out.reserve(tl.atoms.size());
    for (const auto& a : tl.atoms) {
        AtomNoise n;
        n.beam = a.beam;
        n.cycle = a.cycle;
        n.velocity_factor = truncated_normal(rng, 1.0, params.velocity_sigma_frac);
        n.emission_offset = truncated_normal(rng, kTransitTime, params.emission_jitter_sigma);
        n.rotation_error = truncated_normal(rng, 0.0, params.rotation_error_frac);
        n.dephasing_phase = truncated_normal(
            rng, 0.0, std::sqrt(params.dephasing_rate * params.t_between_atoms));
        n.detected = unif(rng) < params.eta_detect * params.eta_ionize;
        out.push_back(n);
    }
    return out;
}

// Average fidelity of the physical-mode dispersive gate against the exact
// CPhase map over the 4 logical basis inputs and 2 superposition inputs.
inline double collision_fidelity(double arrival_mismatch_frac,
                                 const NoiseParams& params = {}) {
    params.validate();
    if (arrival_mismatch_frac < 0.0) {
        throw invalid_input_error("arrival mismatch must be >= 0");
    }
    Matrix exact = dispersive_collision_matrix(M_PI);
    Matrix phys = dispersive_collision_physical_matrix(arrival_mismatch_frac);

    const int e = 0, f = 1, g = 2;
    auto basis = [&](int a, int b) {
        Vector v = Vector::Zero(9);
        v(a * 3 + b) = Complex(1, 0);
        return v;
    };
    std::vector<Vector> inputs{basis(f, f), basis(f, g), basis(e, f), basis(e, g)};
    Vector plus_plus = (basis(f, f) + basis(f, g) + basis(e, f) + basis(e, g)) / 2.0;
    Vector minus_plus = (basis(f, f) + basis(f, g) - basis(e, f) - basis(e, g)) / 2.0;
    inputs.push_back(plus_plus);
    inputs.push_back(minus_plus);

    double total = 0.0;
    for (const auto& v : inputs) {
        Vector a = exact * v;
        Vector b = phys * v;
        total += std::norm(Complex(a.dot(b)));
    }
    return total / static_cast<double>(inputs.size());
}

struct NoisyRunResult {
    Timeline timeline;
    StateVector physical_state;  // three-level atoms, graph node order
    bool heralded = true;
    bool photon_lost = false;
};

namespace detail {

// One quantum-trajectory step of cavity amplitude damping over time t.
inline void cavity_decay(StateVector& st, const std::string& cav, double t, double t_cav,
                         bool& photon_lost, Rng& rng) {
    double p_loss = std::isinf(t_cav) ? 0.0 : 1.0 - std::exp(-std::max(t, 0.0) / t_cav);
    std::size_t pc = static_cast<std::size_t>(st.position_of(cav));
    std::size_t sc = st.stride(pc);
    double p1 = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i) {
        if ((i / sc) % 2 == 1) p1 += std::norm(st.amps()[i]);
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    if (u < p1 * p_loss) {
        Matrix jump = Matrix::Zero(2, 2);
        jump(0, 1) = Complex(1, 0);
        apply_matrix_in_place(st, {cav}, jump);
        st.normalize();
        photon_lost = true;
    } else {
        Matrix damp = Matrix::Identity(2, 2);
        damp(1, 1) = Complex(std::sqrt(1.0 - p_loss), 0);
        apply_matrix_in_place(st, {cav}, damp);
        if (st.norm() > 0.0) st.normalize();
    }
}

inline StateVector simulate_pulse_noisy(int beam, int first_cycle,
                                        const std::vector<bool>& present, bool mirrored,
                                        bool align_third,
                                        const std::vector<const AtomNoise*>& noise,
                                        const NoiseParams& params, bool& photon_lost,
                                        Rng& rng) {
    const AtomLevel one1 = mirrored ? AtomLevel::G : AtomLevel::E;
    const AtomLevel one2 = mirrored ? AtomLevel::E : AtomLevel::G;
    const int f = static_cast<int>(AtomLevel::F);

    std::vector<SubsystemSpec> specs;
    std::vector<int> init;
    std::vector<std::string> labels(3);
    for (int j = 0; j < 3; ++j) {
        labels[static_cast<std::size_t>(j)] = atom_label(beam, first_cycle + j);
        if (!present[static_cast<std::size_t>(j)]) continue;
        specs.push_back(SubsystemSpec::atom(labels[static_cast<std::size_t>(j)]));
        init.push_back(f);
    }
    std::string cav = "C_" + std::to_string(beam) + "_" + std::to_string(first_cycle);
    specs.push_back(SubsystemSpec::cavity(cav, 1));
    init.push_back(0);
    StateVector st = new_product_state(specs, init);

    auto vf = [&](int j) {
        const AtomNoise* n = noise[static_cast<std::size_t>(j)];
        return n != nullptr ? n->velocity_factor : 1.0;
    };
    auto offset = [&](int j) {
        const AtomNoise* n = noise[static_cast<std::size_t>(j)];
        return n != nullptr ? n->emission_offset : kTransitTime;
    };
    auto rot_err = [&](int j) {
        const AtomNoise* n = noise[static_cast<std::size_t>(j)];
        return n != nullptr ? n->rotation_error : 0.0;
    };

    if (present[0]) {
        st = resonant_exchange(st, labels[0], cav, (M_PI / 2.0) * vf(0), AtomLevel::F, one1);
        st = exchange_phase_fix(st, labels[0], one1);
    }
    cavity_decay(st, cav, params.t_between_atoms + (offset(1) - offset(0)), params.t_cav,
                 photon_lost, rng);
    if (present[1]) {
        st = ramsey_rotate(st, labels[1], RamseyPulse::hadamard({AtomLevel::F, one2}));
        if (rot_err(1) != 0.0) {
            st = ramsey_rotate(st, labels[1],
                               RamseyPulse::rotation({AtomLevel::F, one2}, M_PI * rot_err(1)));
        }
        st = cavity_conditioned_phase(st, labels[1], cav, one2);
    }
    cavity_decay(st, cav, params.t_between_atoms + (offset(2) - offset(1)), params.t_cav,
                 photon_lost, rng);
    if (present[2]) {
        st = resonant_exchange(st, labels[2], cav, M_PI * vf(2), one1, AtomLevel::F);
        st = exchange_phase_fix(st, labels[2], one1);
    }

    if (present[0] && !present[2]) {
        // Stranded photon by design: quadrature readout plus Z feedback.
        auto r = measure(st, cav, MeasurementBasis::x(), rng);
        st = r.collapsed;
        if (r.outcome == -1) {
            st = apply_unitary(st, {{labels[0]},
                                    level_phase(kAtomDim, static_cast<int>(one1), Complex(-1, 0))});
        }
        st = apply_unitary(st, {{cav}, hadamard2()});
        st = remove_subsystem(st, cav, r.bit());
    } else {
        // Residual photon (imperfect absorption) escapes as a loss event.
        auto r = measure(st, cav, MeasurementBasis::z(), rng);
        st = r.collapsed;
        if (r.bit() == 1) photon_lost = true;
        st = remove_subsystem(st, cav, r.bit());
    }

    if (align_third && present[2]) {
        st = ramsey_rotate(st, labels[2], RamseyPulse::hadamard({AtomLevel::F, one1}));
        if (rot_err(2) != 0.0) {
            st = ramsey_rotate(st, labels[2],
                               RamseyPulse::rotation({AtomLevel::F, one1}, M_PI * rot_err(2)));
        }
    }
    for (int j = 0; j < 3; ++j) {
        const AtomNoise* n = noise[static_cast<std::size_t>(j)];
        if (!present[static_cast<std::size_t>(j)] || n == nullptr || n->dephasing_phase == 0.0) {
            continue;
        }
        AtomLevel one = j == 1 ? one2 : one1;
        st = apply_unitary(st, {{labels[static_cast<std::size_t>(j)]},
                                level_phase(kAtomDim, static_cast<int>(one),
                                            std::polar(1.0, n->dephasing_phase))});
    }
    return st;
}

}  // namespace detail

// One noisy trial: schedules with fill sampling, perturbs every pulse and
// collision, and reports the resulting three-level state.
inline NoisyRunResult run_physical_noisy(const ChipConfig& cfg, const NoiseParams& params,
                                         Rng& rng) {
    require_valid_chip(cfg);
    params.validate();
    Timeline tl = schedule(cfg, rng);
    std::size_t n_filled = 0;
    for (const auto& a : tl.atoms) {
        if (a.filled) ++n_filled;
    }
    std::size_t amps = 1;
    for (std::size_t i = 0; i < n_filled; ++i) amps *= 3;
    if (n_filled > kPhysicalMaxAtoms || amps > kPhysicalMaxAmps) {
        throw capacity_error("scheduled run exceeds the simulator capacity");
    }

    auto noise = sample_run_noise(params, tl, rng);
    std::map<std::pair<int, int>, const AtomNoise*> by_atom;
    for (const auto& n : noise) by_atom[{n.beam, n.cycle}] = &n;

    NoisyRunResult res;
    res.timeline = tl;
    res.heralded = true;
    for (std::size_t i = 0; i < tl.atoms.size(); ++i) {
        if (!tl.atoms[i].filled || !noise[i].detected) res.heralded = false;
    }

    bool any_collisions = false;
    for (const auto& s : cfg.collision_sites) any_collisions |= s.on;

    std::vector<BeamlineConfig> beams = cfg.beamlines;
    std::sort(beams.begin(), beams.end(),
              [](const BeamlineConfig& a, const BeamlineConfig& b) { return a.id < b.id; });
    StateVector state;
    bool first = true;
    for (const auto& b : beams) {
        for (int p = 0; 3 * p < cfg.cycles; ++p) {
            std::vector<bool> present(3, false);
            std::vector<const AtomNoise*> pulse_noise(3, nullptr);
            for (int j = 0; j < 3; ++j) {
                int c = 3 * p + j;
                if (c >= cfg.cycles) continue;
                const AtomEvent* ev = tl.find(b.id, c);
                present[static_cast<std::size_t>(j)] = ev != nullptr && ev->filled;
                auto it = by_atom.find({b.id, c});
                if (it != by_atom.end()) pulse_noise[static_cast<std::size_t>(j)] = it->second;
            }
            if (!present[0] && !present[1] && !present[2]) continue;
            bool mirrored = !role_ef(b, 3 * p);
            StateVector pulse =
                detail::simulate_pulse_noisy(b.id, 3 * p, present, mirrored, any_collisions,
                                             pulse_noise, params, res.photon_lost, rng);
            state = first ? pulse : tensor(state, pulse);
            first = false;
        }
    }
    if (first) {
        res.physical_state = StateVector();
        return res;
    }

    for (const auto& c : tl.collisions) {
        if (!c.active) continue;
        const AtomEvent* a = tl.find(c.beam_a, c.cycle_a);
        const AtomNoise* na = by_atom.at({c.beam_a, c.cycle_a});
        const AtomNoise* nb = by_atom.at({c.beam_b, c.cycle_b});
        auto arrival = [&](const AtomNoise* n) {
            return (n->emission_offset - kTransitTime) +
                   params.t_between_atoms * (1.0 / n->velocity_factor - 1.0);
        };
        double mismatch = std::abs(arrival(na) - arrival(nb)) / cfg.overlap_time;
        std::string la = detail::atom_label(c.beam_a, c.cycle_a);
        std::string lb = detail::atom_label(c.beam_b, c.cycle_b);
        double area_a = na->velocity_factor, area_b = nb->velocity_factor;
        if (!a->role_ef) {
            std::swap(la, lb);
            std::swap(area_a, area_b);
        }
        state = dispersive_collision_physical(state, la, lb, mismatch, area_a, area_b);
    }

    EntanglementGraph g = emergent_graph(cfg, tl);
    std::vector<std::string> order;
    for (const auto& n : g.nodes()) order.push_back(n.label());
    res.physical_state = reorder(state, order);
    if (std::abs(res.physical_state.norm() - 1.0) > 1e-9) {
        throw contract_violation_error("noisy trajectory lost normalization");
    }
    return res;
}

struct MonteCarloResult {
    double mean_fidelity = 0.0;
    double std_error = 0.0;
    double heralded_rate = 0.0;
    int trials = 0;
    int heralded = 0;
};

// Trajectory Monte-Carlo against an ideal physical-space target state.
// Trials run on derived per-trial streams; `threads` only changes wall
// time, never the statistics.
inline MonteCarloResult monte_carlo_fidelity(const ChipConfig& cfg, const NoiseParams& params,
                                             const StateVector& target, int trials,
                                             std::uint64_t seed, int threads = 1) {
    if (trials < 1) throw invalid_input_error("trials must be >= 1");
    if (threads < 1) threads = 1;
    params.validate();
    require_valid_chip(cfg);

    std::vector<double> fid(static_cast<std::size_t>(trials), -1.0);
    std::vector<char> heralded(static_cast<std::size_t>(trials), 0);
    auto worker = [&](int lo, int hi) {
        for (int t = lo; t < hi; ++t) {
            Rng rng = derive_stream(seed, static_cast<std::uint64_t>(t));
            auto run = run_physical_noisy(cfg, params, rng);
            if (!run.heralded) continue;
            heralded[static_cast<std::size_t>(t)] = 1;
            fid[static_cast<std::size_t>(t)] =
                same_register(run.physical_state, target) ? fidelity(run.physical_state, target)
                                                          : 0.0;
        }
    };
    if (threads == 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> pool;
        int chunk = (trials + threads - 1) / threads;
        for (int k = 0; k < threads; ++k) {
            int lo = k * chunk, hi = std::min(trials, (k + 1) * chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    MonteCarloResult res;
    res.trials = trials;
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        if (!heralded[static_cast<std::size_t>(t)]) continue;
        ++res.heralded;
        sum += fid[static_cast<std::size_t>(t)];
        sum2 += fid[static_cast<std::size_t>(t)] * fid[static_cast<std::size_t>(t)];
    }
    res.heralded_rate = static_cast<double>(res.heralded) / trials;
    if (res.heralded > 0) {
        res.mean_fidelity = sum / res.heralded;
        if (res.heralded > 1) {
            double var = (sum2 - sum * sum / res.heralded) / (res.heralded - 1);
            res.std_error = std::sqrt(std::max(var, 0.0) / res.heralded);
        }
    }
    return res;
}

// Graph-target overload: the target is the noise-free physical state of the
// chip, which must realize exactly the given graph.
inline MonteCarloResult monte_carlo_fidelity(const ChipConfig& cfg, const NoiseParams& params,
                                             const EntanglementGraph& target, int trials,
                                             std::uint64_t seed, int threads = 1) {
    auto ideal = run_physical(cfg);
    if (!(ideal.graph == target)) {
        throw invalid_input_error("target graph does not match the chip's emergent graph");
    }
    return monte_carlo_fidelity(cfg, params, ideal.physical_state, trials, seed, threads);
}

}  // namespace cbqc
