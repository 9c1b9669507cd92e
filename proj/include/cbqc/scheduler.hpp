// scheduler.hpp
// Chip-level scheduling: beamline configs, slot timing, collision sites,
// the emergent entanglement graph, and a full physical simulation of the
// scheduled pulse program.
//
// Timing model: each beamline fires three-atom pulses on a shared clock;
// data cycle c of beamline b occupies absolute slot delay_b + c + c/3 (a
// spacer slot follows every pulse). An atom's basis role alternates with
// its slot parity: role EF (logical one-level e) iff (cycle + delay) is
// even, role EG (logical one-level g) otherwise. A collision site
// (a, b, shift) crosses atom (a, c) with atom (b, c + shift) and is valid
// only when the two roles always differ, i.e. delay_a - delay_b - shift is
// odd.
//
// Memory bonds per pulse form a star at the pulse's first atom:
// (b,3p)-(b,3p+1) and (b,3p)-(b,3p+2). When collisions are scheduled, a
// Ramsey alignment pulse on each pulse's third atom puts the beamline
// memory into the graph-state frame, so the physical lattice state equals
// the graph state of memory bonds plus collision bonds exactly.

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cbqc/encoding.hpp"
#include "cbqc/graph.hpp"
#include "cbqc/interactions.hpp"

namespace cbqc {

struct SourceParams {
    double fill_probability = 1.0;
    double velocity = 500.0;  // m/s
};

struct BeamlineConfig {
    int id = 0;
    int delay = 0;  // launch delay, in clock slots
    SourceParams source;
};

struct CollisionSite {
    int beam_a = 0;
    int beam_b = 1;
    int cycle_shift = 0;
    bool on = true;
};

struct ChipConfig {
    std::vector<BeamlineConfig> beamlines;
    std::vector<CollisionSite> collision_sites;
    int cycles = 3;               // data cycles per beamline
    double clock_period = 1e-5;   // s
    double overlap_time = 1e-6;   // s, collision overlap window
};

inline int slot_of(const BeamlineConfig& beam, int cycle) {
    return beam.delay + cycle + cycle / 3;
}

inline bool role_ef(const BeamlineConfig& beam, int cycle) {
    return (cycle + beam.delay) % 2 == 0;
}

inline ChipConfig chip_preset(TopologyKind kind, int beams, int cycles) {
    if (beams < 1 || cycles < 1) throw invalid_input_error("beams and cycles must be >= 1");
    if (kind != TopologyKind::Lattice2D && beams < 2) {
        throw invalid_input_error("wrap topologies require at least 2 beams");
    }
    ChipConfig cfg;
    cfg.cycles = cycles;
    for (int b = 0; b < beams; ++b) cfg.beamlines.push_back({b, b, {}});
    for (int b = 0; b + 1 < beams; ++b) cfg.collision_sites.push_back({b, b + 1, 0, true});
    if (kind != TopologyKind::Lattice2D) {
        int shift = tube_wrap_shift(beams) + (kind == TopologyKind::Helix ? 2 : 0);
        cfg.collision_sites.push_back({beams - 1, 0, shift, true});
    }
    return cfg;
}

inline std::vector<std::string> validate_chip(const ChipConfig& cfg) {
    std::vector<std::string> diags;
    if (cfg.beamlines.empty()) diags.push_back("chip has no beamlines");
    std::map<int, const BeamlineConfig*> by_id;
    for (const auto& b : cfg.beamlines) {
        if (!by_id.emplace(b.id, &b).second) {
            diags.push_back("duplicate beamline id " + std::to_string(b.id));
        }
        if (b.delay < 0) {
            diags.push_back("beamline " + std::to_string(b.id) + " has negative delay");
        }
        if (b.source.fill_probability < 0.0 || b.source.fill_probability > 1.0) {
            diags.push_back("beamline " + std::to_string(b.id) +
                            " fill probability outside [0,1]");
        }
        if (b.source.velocity <= 0.0) {
            diags.push_back("beamline " + std::to_string(b.id) + " has non-positive velocity");
        }
    }
    if (cfg.cycles < 1) diags.push_back("cycles must be >= 1");
    if (cfg.clock_period <= 0.0) diags.push_back("clock period must be positive");
    if (cfg.overlap_time <= 0.0 || cfg.overlap_time >= cfg.clock_period) {
        diags.push_back("overlap time must lie strictly between 0 and the clock period");
    }
    for (std::size_t i = 0; i < cfg.collision_sites.size(); ++i) {
        const auto& s = cfg.collision_sites[i];
        std::string tag = "collision site " + std::to_string(i);
        auto a = by_id.find(s.beam_a);
        auto b = by_id.find(s.beam_b);
        if (a == by_id.end() || b == by_id.end()) {
            diags.push_back(tag + " references an unknown beamline");
            continue;
        }
        if (s.beam_a == s.beam_b) {
            diags.push_back(tag + " crosses a beamline with itself");
            continue;
        }
        int parity = a->second->delay - b->second->delay - s.cycle_shift;
        if (parity % 2 == 0) {
            diags.push_back(tag +
                            " pairs atoms of the same basis role (beamline delays misaligned)");
        }
    }
    return diags;
}

inline void require_valid_chip(const ChipConfig& cfg) {
    auto diags = validate_chip(cfg);
    if (!diags.empty()) {
        std::string msg = "invalid chip:";
        for (const auto& d : diags) msg += "\n  - " + d;
        throw invalid_input_error(msg);
    }
}

struct AtomEvent {
    int beam = 0;
    int cycle = 0;
    int slot = 0;
    double time = 0.0;
    bool role_ef = true;
    bool filled = true;
};

struct CollisionEvent {
    int site = 0;
    int beam_a = 0, cycle_a = 0;
    int beam_b = 0, cycle_b = 0;
    bool active = true;
};

struct Timeline {
    std::vector<AtomEvent> atoms;
    std::vector<CollisionEvent> collisions;

    const AtomEvent* find(int beam, int cycle) const {
        for (const auto& a : atoms) {
            if (a.beam == beam && a.cycle == cycle) return &a;
        }
        return nullptr;
    }
};

namespace detail {

inline Timeline schedule_impl(const ChipConfig& cfg, Rng* rng) {
    require_valid_chip(cfg);
    Timeline tl;
    std::vector<BeamlineConfig> beams = cfg.beamlines;
    std::sort(beams.begin(), beams.end(),
              [](const BeamlineConfig& a, const BeamlineConfig& b) { return a.id < b.id; });
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const auto& b : beams) {
        for (int c = 0; c < cfg.cycles; ++c) {
            AtomEvent ev;
            ev.beam = b.id;
            ev.cycle = c;
            ev.slot = slot_of(b, c);
            ev.time = ev.slot * cfg.clock_period;
            ev.role_ef = role_ef(b, c);
            ev.filled = rng == nullptr || unif(*rng) < b.source.fill_probability;
            tl.atoms.push_back(ev);
        }
    }
    // A second site crossing an already-crossed atom pair would undo the
    // first collision; such duplicates are kept in the timeline but never
    // fire.
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> seen_pairs;
    for (std::size_t i = 0; i < cfg.collision_sites.size(); ++i) {
        const auto& s = cfg.collision_sites[i];
        for (int c = 0; c < cfg.cycles; ++c) {
            int cb = c + s.cycle_shift;
            if (cb < 0 || cb >= cfg.cycles) continue;
            CollisionEvent ev;
            ev.site = static_cast<int>(i);
            ev.beam_a = s.beam_a;
            ev.cycle_a = c;
            ev.beam_b = s.beam_b;
            ev.cycle_b = cb;
            const AtomEvent* a = tl.find(s.beam_a, c);
            const AtomEvent* b = tl.find(s.beam_b, cb);
            std::pair<int, int> pa{s.beam_a, c}, pb{s.beam_b, cb};
            auto pair = pa < pb ? std::pair(pa, pb) : std::pair(pb, pa);
            bool fresh = !s.on || seen_pairs.insert(pair).second;
            ev.active = s.on && fresh && a != nullptr && b != nullptr && a->filled && b->filled;
            tl.collisions.push_back(ev);
        }
    }
    return tl;
}

}  // namespace detail

inline Timeline schedule(const ChipConfig& cfg) { return detail::schedule_impl(cfg, nullptr); }
inline Timeline schedule(const ChipConfig& cfg, Rng& rng) {
    return detail::schedule_impl(cfg, &rng);
}

// Marks the listed (beam, cycle) atoms as missed fills and deactivates any
// collision that lost a partner.
inline void apply_fill_mask(Timeline& tl, const std::set<std::pair<int, int>>& missing) {
    for (auto& a : tl.atoms) {
        if (missing.count({a.beam, a.cycle})) a.filled = false;
    }
    for (auto& c : tl.collisions) {
        const AtomEvent* a = tl.find(c.beam_a, c.cycle_a);
        const AtomEvent* b = tl.find(c.beam_b, c.cycle_b);
        if (a == nullptr || b == nullptr || !a->filled || !b->filled) c.active = false;
    }
}

// The entanglement graph the schedule produces: filled atoms as nodes,
// per-pulse memory stars plus active collision bonds as edges.
inline EntanglementGraph emergent_graph(const ChipConfig& cfg, const Timeline& tl) {
    EntanglementGraph g;
    std::vector<const AtomEvent*> sorted;
    for (const auto& a : tl.atoms) {
        if (a.filled) sorted.push_back(&a);
    }
    std::sort(sorted.begin(), sorted.end(), [](const AtomEvent* a, const AtomEvent* b) {
        return std::pair(a->beam, a->cycle) < std::pair(b->beam, b->cycle);
    });
    for (const auto* a : sorted) g.add_node({a->beam, a->cycle, NodeRole::Data});
    auto bond = [&](int b1, int c1, int b2, int c2) {
        if (g.has_node({b1, c1}) && g.has_node({b2, c2})) g.add_edge({b1, c1}, {b2, c2});
    };
    for (const auto& b : cfg.beamlines) {
        for (int p = 0; 3 * p < cfg.cycles; ++p) {
            if (3 * p + 1 < cfg.cycles) bond(b.id, 3 * p, b.id, 3 * p + 1);
            if (3 * p + 2 < cfg.cycles) bond(b.id, 3 * p, b.id, 3 * p + 2);
        }
    }
    for (const auto& c : tl.collisions) {
        if (c.active) bond(c.beam_a, c.cycle_a, c.beam_b, c.cycle_b);
    }
    return g;
}

inline EntanglementGraph emergent_graph(const ChipConfig& cfg) {
    return emergent_graph(cfg, schedule(cfg));
}

struct PhysicalRun {
    Timeline timeline;
    EntanglementGraph graph;
    StateVector state;           // logical qubits, in graph node order
    StateVector physical_state;  // three-level atoms before logical readout
};

inline constexpr int kPhysicalMaxAtoms = 20;
inline constexpr std::size_t kPhysicalMaxAmps = std::size_t{1} << 24;

namespace detail {

inline std::string atom_label(int beam, int cycle) {
    return QubitNode{beam, cycle, NodeRole::Data}.label();
}

// Simulates one three-atom memory pulse of a beamline (some atoms possibly
// missing) and returns the present atoms as logical qubits. `mirrored`
// swaps the e and g roles of the whole pulse. `rng` resolves the cavity
// quadrature readout when a stranded photon must be swept out; the Z
// feedback makes the result independent of the outcome.
inline StateVector simulate_pulse(int beam, int first_cycle, const std::vector<bool>& present,
                                  bool mirrored, bool align_third, Rng* rng) {
    const AtomLevel one1 = mirrored ? AtomLevel::G : AtomLevel::E;   // first/third atoms
    const AtomLevel one2 = mirrored ? AtomLevel::E : AtomLevel::G;   // middle atom
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

    if (present[0]) {
        st = resonant_exchange(st, labels[0], cav, M_PI / 2.0, AtomLevel::F, one1);
        st = exchange_phase_fix(st, labels[0], one1);
    }
    if (present[1]) {
        st = ramsey_rotate(st, labels[1], RamseyPulse::hadamard({AtomLevel::F, one2}));
        st = cavity_conditioned_phase(st, labels[1], cav, one2);
    }
    if (present[2]) {
        st = resonant_exchange(st, labels[2], cav, M_PI, one1, AtomLevel::F);
        st = exchange_phase_fix(st, labels[2], one1);
    }

    if (present[0] && !present[2]) {
        // Stranded photon: read the cavity quadrature and undo the phase
        // kick on the first atom when the minus port fires.
        MeasurementResult r;
        if (rng != nullptr) {
            r = measure(st, cav, MeasurementBasis::x(), *rng);
        } else {
            r = project_outcome(st, cav, MeasurementBasis::x(), +1);
        }
        st = r.collapsed;
        if (r.outcome == -1) {
            st = apply_unitary(st, {{labels[0]},
                                    level_phase(kAtomDim, static_cast<int>(one1), Complex(-1, 0))});
        }
        st = apply_unitary(st, {{cav}, hadamard2()});
        st = remove_subsystem(st, cav, r.bit());
    } else {
        st = remove_subsystem(st, cav, 0);
    }

    if (align_third && present[2]) {
        st = ramsey_rotate(st, labels[2], RamseyPulse::hadamard({AtomLevel::F, one1}));
    }
    return st;
}

}  // namespace detail

inline PhysicalRun run_physical(const ChipConfig& cfg, const Timeline& tl, Rng* rng = nullptr) {
    require_valid_chip(cfg);
    std::size_t n_filled = 0;
    for (const auto& a : tl.atoms) {
        if (a.filled) ++n_filled;
    }
    std::size_t amps = 1;
    for (std::size_t i = 0; i < n_filled; ++i) amps *= 3;
    if (n_filled > kPhysicalMaxAtoms || amps > kPhysicalMaxAmps) {
        throw capacity_error("scheduled run exceeds the simulator capacity");
    }

    PhysicalRun run;
    run.timeline = tl;
    run.graph = emergent_graph(cfg, tl);

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
            for (int j = 0; j < 3; ++j) {
                int c = 3 * p + j;
                if (c >= cfg.cycles) continue;
                const AtomEvent* ev = tl.find(b.id, c);
                present[static_cast<std::size_t>(j)] = ev != nullptr && ev->filled;
            }
            if (!present[0] && !present[1] && !present[2]) continue;
            bool mirrored = !role_ef(b, 3 * p);
            StateVector pulse =
                detail::simulate_pulse(b.id, 3 * p, present, mirrored, any_collisions, rng);
            state = first ? pulse : tensor(state, pulse);
            first = false;
        }
    }
    if (first) {
        run.state = StateVector();
        return run;
    }

    for (const auto& c : tl.collisions) {
        if (!c.active) continue;
        const AtomEvent* a = tl.find(c.beam_a, c.cycle_a);
        std::string la = detail::atom_label(c.beam_a, c.cycle_a);
        std::string lb = detail::atom_label(c.beam_b, c.cycle_b);
        // The gate convention puts the EF-role (e-shifted) atom first.
        if (!a->role_ef) std::swap(la, lb);
        state = dispersive_collision(state, la, lb, M_PI);
    }

    std::vector<std::string> order;
    for (const auto& n : run.graph.nodes()) order.push_back(n.label());
    run.physical_state = reorder(state, order);

    // Read the physical register out as logical qubits: |f> = 0 and the
    // role level (e or g) = 1.
    std::map<std::string, AtomLevel> one_levels;
    for (const auto& ev : tl.atoms) {
        if (!ev.filled) continue;
        one_levels[detail::atom_label(ev.beam, ev.cycle)] =
            ev.role_ef ? AtomLevel::E : AtomLevel::G;
    }
    run.state = atoms_to_qubits(run.physical_state, one_levels);
    return run;
}

inline PhysicalRun run_physical(const ChipConfig& cfg) {
    return run_physical(cfg, schedule(cfg), nullptr);
}

// Completes the graph-state frame for runs without collisions (where the
// third-atom alignment pulse is not fired on hardware): applies the missing
// logical Hadamards so the state can be checked against the emergent graph.
inline StateVector logical_cluster_state(const ChipConfig& cfg, const PhysicalRun& run) {
    bool any_collisions = false;
    for (const auto& s : cfg.collision_sites) any_collisions |= s.on;
    StateVector st = run.state;
    if (any_collisions) return st;
    for (const auto& n : run.graph.nodes()) {
        if (n.cycle % 3 == 2) st = apply_unitary(st, {{n.label()}, hadamard2()});
    }
    return st;
}

}  // namespace cbqc
