// mbqc.hpp
// Measurement-based computation on entanglement graphs: adaptive pattern
// execution with byproduct tracking, a flow-based pattern generator, CNOT
// and rotation-chain pattern builders, and exhaustive pattern verification.
//
// Measurement calculus: measuring node q in B(alpha) with outcome bit s
// teleports X^s . H . Rz(-alpha) onto its flow successor. A pending X
// byproduct flips the sign of the angle; a pending Z flips the meaning of
// the outcome bit. Both are tracked as GF(2) sets of step indices, so
// corrections are deferred and only the angle adaptation touches hardware.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cbqc/gates.hpp"
#include "cbqc/graph.hpp"
#include "cbqc/state.hpp"

namespace cbqc {

struct MeasurementStep {
    std::string node;
    MeasurementBasis basis;
    // Step indices whose outcome bits, XORed, flip the measurement angle.
    std::vector<int> sign_deps;
};

struct PauliFrame {
    std::map<std::string, int> x, z;  // output label -> pending bit
};

struct MeasurementPattern {
    EntanglementGraph graph;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<MeasurementStep> steps;
    // Output label -> step indices whose XOR gives the pending byproduct bit.
    std::map<std::string, std::vector<int>> x_corrections;
    std::map<std::string, std::vector<int>> z_corrections;

    void validate() const {
        std::set<std::string> node_labels;
        for (const auto& n : graph.nodes()) node_labels.insert(n.label());
        std::set<std::string> in_set(inputs.begin(), inputs.end());
        std::set<std::string> out_set(outputs.begin(), outputs.end());
        if (in_set.size() != inputs.size() || out_set.size() != outputs.size()) {
            throw invalid_pattern_error("duplicate input or output label");
        }
        for (const auto& l : inputs) {
            if (!node_labels.count(l)) throw invalid_pattern_error("input not in graph: " + l);
        }
        for (const auto& l : outputs) {
            if (!node_labels.count(l)) throw invalid_pattern_error("output not in graph: " + l);
            if (in_set.count(l)) throw invalid_pattern_error("node both input and output: " + l);
        }
        std::set<std::string> measured;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const auto& s = steps[i];
            if (!node_labels.count(s.node)) {
                throw invalid_pattern_error("measured node not in graph: " + s.node);
            }
            if (out_set.count(s.node)) {
                throw invalid_pattern_error("output node is measured: " + s.node);
            }
            if (!measured.insert(s.node).second) {
                throw invalid_pattern_error("node measured twice: " + s.node);
            }
            for (int d : s.sign_deps) {
                if (d < 0 || d >= static_cast<int>(i)) {
                    throw invalid_pattern_error("sign dependency on a later step");
                }
            }
        }
        if (measured.size() + out_set.size() != node_labels.size()) {
            throw invalid_pattern_error("every non-output node must be measured exactly once");
        }
        for (const auto* corr : {&x_corrections, &z_corrections}) {
            for (const auto& [label, deps] : *corr) {
                if (!out_set.count(label)) {
                    throw invalid_pattern_error("correction on non-output node: " + label);
                }
                for (int d : deps) {
                    if (d < 0 || d >= static_cast<int>(steps.size())) {
                        throw invalid_pattern_error("correction references unknown step");
                    }
                }
            }
        }
    }
};

struct PatternRun {
    StateVector state;  // outputs, in pattern output order
    std::vector<int> outcomes;  // per step, +1 / -1
    PauliFrame frame;
    double branch_prob = 1.0;
};

namespace detail {

// Entangles the input state with fresh |+> qubits on the non-input nodes
// and applies a CZ per graph edge.
inline StateVector pattern_initial_state(const MeasurementPattern& pat,
                                         const StateVector& input) {
    if (pat.graph.nodes().size() > kGraphStateMaxNodes) {
        throw capacity_error("pattern exceeds the brute-force bound of 20 nodes");
    }
    std::set<std::string> in_set(pat.inputs.begin(), pat.inputs.end());
    if (input.reg().size() != pat.inputs.size()) {
        throw invalid_input_error("input state must cover exactly the input nodes");
    }
    for (const auto& s : input.reg()) {
        if (!in_set.count(s.label) || s.dim != 2) {
            throw invalid_input_error("input register must be qubits on the input nodes");
        }
    }
    StateVector st = input;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const auto& n : pat.graph.nodes()) {
        if (in_set.count(n.label())) continue;
        StateVector plus({SubsystemSpec::qubit(n.label())},
                         {Complex(inv_sqrt2, 0), Complex(inv_sqrt2, 0)});
        st = tensor(st, plus);
    }
    const auto& nodes = pat.graph.nodes();
    for (const auto& [a, b] : pat.graph.edges()) {
        st = apply_unitary(st, {{nodes[static_cast<std::size_t>(a)].label(),
                                 nodes[static_cast<std::size_t>(b)].label()},
                                cz_matrix()});
    }
    return st;
}

// Rotates the measured qubit's post-measurement eigenstate onto the
// computational basis and drops it from the register.
inline StateVector absorb_measured_qubit(const StateVector& state, const std::string& node,
                                         const MeasurementBasis& basis, int bit) {
    StateVector st = state;
    if (basis.kind != MeasurementBasis::Kind::Z) {
        Matrix u = hadamard2() * rz2(-basis.angle());
        detail::apply_matrix_in_place(st, {node}, u);
    }
    return remove_subsystem(st, node, bit);
}

template <typename OutcomeFn>
PatternRun run_pattern_impl(const MeasurementPattern& pat, const StateVector& input,
                            OutcomeFn&& next_outcome, bool apply_corrections) {
    pat.validate();
    PatternRun run;
    StateVector st = pattern_initial_state(pat, input);
    std::vector<int> bits;
    bits.reserve(pat.steps.size());
    for (std::size_t i = 0; i < pat.steps.size(); ++i) {
        const auto& step = pat.steps[i];
        MeasurementBasis basis = step.basis;
        if (basis.kind != MeasurementBasis::Kind::Z) {
            int s = 0;
            for (int d : step.sign_deps) s ^= bits[static_cast<std::size_t>(d)];
            if (s) basis = MeasurementBasis::b_alpha(-basis.angle());
        }
        MeasurementResult r = next_outcome(st, step.node, basis, i);
        run.branch_prob *= r.prob;
        if (r.prob <= 0.0) {
            run.outcomes.push_back(r.outcome);
            bits.push_back(r.bit());
            return run;  // dead branch; state left empty
        }
        run.outcomes.push_back(r.outcome);
        bits.push_back(r.bit());
        st = absorb_measured_qubit(r.collapsed, step.node, basis, r.bit());
    }
    for (const auto& o : pat.outputs) {
        int xb = 0, zb = 0;
        if (auto it = pat.x_corrections.find(o); it != pat.x_corrections.end()) {
            for (int d : it->second) xb ^= bits[static_cast<std::size_t>(d)];
        }
        if (auto it = pat.z_corrections.find(o); it != pat.z_corrections.end()) {
            for (int d : it->second) zb ^= bits[static_cast<std::size_t>(d)];
        }
        run.frame.x[o] = xb;
        run.frame.z[o] = zb;
        if (apply_corrections) {
            if (xb) st = apply_unitary(st, {{o}, pauli_x()});
            if (zb) st = apply_unitary(st, {{o}, pauli_z()});
        }
    }
    run.state = reorder(st, pat.outputs);
    return run;
}

}  // namespace detail

inline PatternRun run_pattern(const MeasurementPattern& pat, const StateVector& input,
                              Rng& rng, bool apply_corrections = true) {
    return detail::run_pattern_impl(
        pat, input,
        [&rng](const StateVector& st, const std::string& node, const MeasurementBasis& basis,
               std::size_t) { return measure(st, node, basis, rng); },
        apply_corrections);
}

// Deterministic execution of one outcome branch; branch_prob reports its
// Born probability (possibly zero, in which case the run stops early).
inline PatternRun run_pattern_branch(const MeasurementPattern& pat, const StateVector& input,
                                     const std::vector<int>& outcome_bits,
                                     bool apply_corrections = true) {
    if (outcome_bits.size() != pat.steps.size()) {
        throw invalid_input_error("one outcome bit per step required");
    }
    return detail::run_pattern_impl(
        pat, input,
        [&outcome_bits](const StateVector& st, const std::string& node,
                        const MeasurementBasis& basis, std::size_t i) {
            return project_outcome(st, node, basis, outcome_bits[i] ? -1 : +1);
        },
        apply_corrections);
}

// Builds an adaptive pattern from a causal flow: `flow` maps each
// non-spectator measured node to its successor, `angles` gives measurement
// angles (default 0, i.e. X), and `z_nodes` are spectators removed by Z
// measurement. Byproducts are propagated over GF(2) so that the pattern is
// deterministic up to the final Pauli frame.
inline MeasurementPattern pattern_from_flow(const EntanglementGraph& graph,
                                            std::vector<std::string> inputs,
                                            std::vector<std::string> outputs,
                                            const std::map<std::string, std::string>& flow,
                                            const std::map<std::string, double>& angles,
                                            const std::set<std::string>& z_nodes) {
    MeasurementPattern pat;
    pat.graph = graph;
    pat.inputs = std::move(inputs);
    pat.outputs = std::move(outputs);

    std::map<std::string, int> node_index;
    for (std::size_t i = 0; i < graph.nodes().size(); ++i) {
        node_index[graph.nodes()[i].label()] = static_cast<int>(i);
    }
    std::set<std::string> out_set(pat.outputs.begin(), pat.outputs.end());
    std::set<std::string> measured;
    for (const auto& n : graph.nodes()) {
        if (!out_set.count(n.label())) measured.insert(n.label());
    }
    for (const auto& q : measured) {
        if (flow.count(q) + z_nodes.count(q) != 1) {
            throw invalid_pattern_error("node needs exactly one of flow successor or Z role: " +
                                        q);
        }
    }
    for (const auto& [q, f] : flow) {
        if (!measured.count(q)) throw invalid_pattern_error("flow source not measured: " + q);
        if (!node_index.count(f)) throw invalid_pattern_error("flow successor unknown: " + f);
        if (z_nodes.count(f)) throw invalid_pattern_error("flow successor is a spectator: " + f);
        if (!graph.has_edge(node_index.at(q), node_index.at(f))) {
            throw invalid_pattern_error("flow successor not adjacent: " + q + " -> " + f);
        }
    }

    auto neighbor_labels = [&](const std::string& q) {
        std::vector<std::string> out;
        for (int n : graph.neighbors(node_index.at(q))) {
            out.push_back(graph.nodes()[static_cast<std::size_t>(n)].label());
        }
        return out;
    };

    // Measurement order: a node must be measured before any node its
    // byproducts fold into. Kahn's algorithm with lexicographic tie-break.
    std::map<std::string, std::set<std::string>> succ;
    std::map<std::string, int> indeg;
    for (const auto& q : measured) indeg[q] = 0;
    auto add_prec = [&](const std::string& before, const std::string& after) {
        if (!measured.count(after) || z_nodes.count(after)) return;
        if (before == after) throw invalid_pattern_error("self-dependent measurement: " + before);
        if (succ[before].insert(after).second) ++indeg[after];
    };
    for (const auto& q : measured) {
        if (z_nodes.count(q)) {
            for (const auto& n : neighbor_labels(q)) add_prec(q, n);
        } else {
            const auto& f = flow.at(q);
            add_prec(q, f);
            for (const auto& n : neighbor_labels(f)) {
                if (n != q) add_prec(q, n);
            }
        }
    }
    std::set<std::string> ready;
    for (const auto& [q, d] : indeg) {
        if (d == 0) ready.insert(q);
    }
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string q = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(q);
        for (const auto& n : succ[q]) {
            if (--indeg[n] == 0) ready.insert(n);
        }
    }
    if (order.size() != measured.size()) {
        throw invalid_pattern_error("flow has no causal measurement order");
    }

    // GF(2) byproduct propagation.
    std::map<std::string, std::set<int>> x_set, z_set;
    auto xor_into = [](std::set<int>& dst, const std::set<int>& src) {
        for (int i : src) {
            if (!dst.insert(i).second) dst.erase(i);
        }
    };
    for (const auto& q : order) {
        int i = static_cast<int>(pat.steps.size());
        if (z_nodes.count(q)) {
            pat.steps.push_back({q, MeasurementBasis::z(), {}});
            std::set<int> d{i};
            for (const auto& n : neighbor_labels(q)) {
                if (z_nodes.count(n)) continue;  // Z on a Z-measured node is inert
                xor_into(z_set[n], d);
            }
        } else {
            double alpha = 0.0;
            if (auto it = angles.find(q); it != angles.end()) alpha = it->second;
            MeasurementBasis basis =
                alpha == 0.0 ? MeasurementBasis::x() : MeasurementBasis::b_alpha(alpha);
            std::vector<int> sign(x_set[q].begin(), x_set[q].end());
            pat.steps.push_back({q, basis, std::move(sign)});
            std::set<int> d = z_set[q];
            xor_into(d, {i});
            const auto& f = flow.at(q);
            xor_into(x_set[f], d);
            for (const auto& n : neighbor_labels(f)) {
                if (n == q || z_nodes.count(n)) continue;
                xor_into(z_set[n], d);
            }
        }
    }
    for (const auto& o : pat.outputs) {
        pat.x_corrections[o] = {x_set[o].begin(), x_set[o].end()};
        pat.z_corrections[o] = {z_set[o].begin(), z_set[o].end()};
    }
    pat.validate();
    return pat;
}

// Chain of measurements on a path graph: angles (a0 .. a_{m-1}) on nodes
// p0 .. p_{m-1}, output p_m; implements the product of H . Rz(-a_i) applied
// in step order.
inline MeasurementPattern rotation_chain_pattern(const std::vector<double>& angles) {
    if (angles.empty()) throw invalid_input_error("rotation chain needs at least one angle");
    int n = static_cast<int>(angles.size()) + 1;
    EntanglementGraph g;
    for (int i = 0; i < n; ++i) g.add_node({0, i, NodeRole::Data});
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    std::map<std::string, std::string> flow;
    std::map<std::string, double> amap;
    for (int i = 0; i + 1 < n; ++i) {
        auto q = g.nodes()[static_cast<std::size_t>(i)].label();
        flow[q] = g.nodes()[static_cast<std::size_t>(i) + 1].label();
        amap[q] = angles[static_cast<std::size_t>(i)];
    }
    return pattern_from_flow(g, {g.nodes()[0].label()},
                             {g.nodes()[static_cast<std::size_t>(n - 1)].label()}, flow, amap,
                             {});
}

// The unitary a rotation chain realizes, for reference checks.
inline Matrix rotation_chain_unitary(const std::vector<double>& angles) {
    Matrix u = Matrix::Identity(2, 2);
    for (double a : angles) u = hadamard2() * rz2(-a) * u;
    return u;
}

namespace detail {

// Enumerates simple paths with `len` nodes, as ordered node-index lists.
inline void simple_paths_rec(const EntanglementGraph& g, std::vector<int>& cur,
                             std::vector<bool>& used, int len,
                             std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == len) {
        out.push_back(cur);
        return;
    }
    for (int n : g.neighbors(cur.back())) {
        if (used[static_cast<std::size_t>(n)]) continue;
        used[static_cast<std::size_t>(n)] = true;
        cur.push_back(n);
        simple_paths_rec(g, cur, used, len, out);
        cur.pop_back();
        used[static_cast<std::size_t>(n)] = false;
    }
}

inline std::vector<std::vector<int>> simple_paths(const EntanglementGraph& g, int len) {
    std::vector<std::vector<int>> out;
    std::vector<bool> used(g.nodes().size(), false);
    for (int s = 0; s < static_cast<int>(g.nodes().size()); ++s) {
        std::vector<int> cur{s};
        used[static_cast<std::size_t>(s)] = true;
        simple_paths_rec(g, cur, used, len, out);
        used[static_cast<std::size_t>(s)] = false;
    }
    return out;
}

}  // namespace detail

// Embeds a CNOT in the given topology: two disjoint wire paths joined by a
// single bridge edge, with the bridge landing at even parity on the control
// wire and odd parity on the target wire; every other node is removed by a
// Z measurement. Inputs are [control, target]; outputs likewise.
inline MeasurementPattern cnot_pattern(const EntanglementGraph& topo) {
    std::vector<int> lens{3, 5};
    for (int lc : lens) {
        for (int lt : lens) {
            auto cpaths = detail::simple_paths(topo, lc);
            auto tpaths = detail::simple_paths(topo, lt);
            for (const auto& cp : cpaths) {
                std::set<int> cset(cp.begin(), cp.end());
                for (const auto& tp : tpaths) {
                    bool disjoint = true;
                    for (int n : tp) {
                        if (cset.count(n)) {
                            disjoint = false;
                            break;
                        }
                    }
                    if (!disjoint) continue;
                    // Cross edges between the two paths: exactly one, with
                    // the required parities.
                    int bridges = 0;
                    int kc = -1, kt = -1;
                    for (int i = 0; i < lc; ++i) {
                        for (int j = 0; j < lt; ++j) {
                            if (topo.has_edge(cp[static_cast<std::size_t>(i)],
                                              tp[static_cast<std::size_t>(j)])) {
                                ++bridges;
                                kc = i;
                                kt = j;
                            }
                        }
                    }
                    if (bridges != 1) continue;
                    if (kc % 2 != 0 || (lc - 1 - kc) % 2 != 0) continue;
                    if (kt % 2 != 1 || (lt - 1 - kt) % 2 != 1) continue;
                    // Paths must be induced (no chords).
                    auto induced = [&](const std::vector<int>& p) {
                        for (std::size_t i = 0; i < p.size(); ++i) {
                            for (std::size_t j = i + 2; j < p.size(); ++j) {
                                if (topo.has_edge(p[i], p[j])) return false;
                            }
                        }
                        return true;
                    };
                    if (!induced(cp) || !induced(tp)) continue;

                    auto label = [&](int n) {
                        return topo.nodes()[static_cast<std::size_t>(n)].label();
                    };
                    std::map<std::string, std::string> flow;
                    for (const auto& p : {cp, tp}) {
                        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
                            flow[label(p[i])] = label(p[i + 1]);
                        }
                    }
                    std::set<std::string> z_nodes;
                    std::set<int> selected(cp.begin(), cp.end());
                    selected.insert(tp.begin(), tp.end());
                    for (int n = 0; n < static_cast<int>(topo.nodes().size()); ++n) {
                        if (!selected.count(n)) z_nodes.insert(label(n));
                    }
                    return pattern_from_flow(topo, {label(cp.front()), label(tp.front())},
                                             {label(cp.back()), label(tp.back())}, flow, {},
                                             z_nodes);
                }
            }
        }
    }
    throw placement_error("no CNOT embedding found in this topology");
}

inline constexpr int kVerifyMaxNodes = 16;

// Minimum corrected-output fidelity against `target` over every nonzero
// outcome branch and a spanning set of input states.
inline double verify_pattern(const MeasurementPattern& pat, const Matrix& target) {
    pat.validate();
    if (pat.graph.nodes().size() > kVerifyMaxNodes) {
        throw capacity_error("verification is limited to 16 nodes");
    }
    std::size_t k = pat.inputs.size();
    if (pat.outputs.size() != k) {
        throw invalid_input_error("verification requires equal input and output counts");
    }
    std::size_t dim = std::size_t{1} << k;
    if (static_cast<std::size_t>(target.rows()) != dim ||
        static_cast<std::size_t>(target.cols()) != dim) {
        throw invalid_input_error("target dimension does not match pattern width");
    }

    std::vector<SubsystemSpec> in_reg, out_reg;
    for (const auto& l : pat.inputs) in_reg.push_back(SubsystemSpec::qubit(l));
    for (const auto& l : pat.outputs) out_reg.push_back(SubsystemSpec::qubit(l));

    std::vector<Vector> span;
    for (std::size_t j = 0; j < dim; ++j) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
        v(static_cast<Eigen::Index>(j)) = Complex(1, 0);
        span.push_back(v);
    }
    for (std::size_t j = 1; j < dim; ++j) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
        v(0) = Complex(1 / std::sqrt(2.0), 0);
        v(static_cast<Eigen::Index>(j)) = Complex(1 / std::sqrt(2.0), 0);
        span.push_back(v);
    }

    double min_fid = 1.0;
    const std::size_t branches = std::size_t{1} << pat.steps.size();
    for (const auto& v : span) {
        std::vector<Complex> in_amps(dim);
        for (std::size_t j = 0; j < dim; ++j) in_amps[j] = v(static_cast<Eigen::Index>(j));
        StateVector input(in_reg, in_amps);
        Vector tv = target * v;
        std::vector<Complex> out_amps(dim);
        for (std::size_t j = 0; j < dim; ++j) out_amps[j] = tv(static_cast<Eigen::Index>(j));
        StateVector expected(out_reg, out_amps);

        double total_prob = 0.0;
        for (std::size_t b = 0; b < branches; ++b) {
            std::vector<int> bits(pat.steps.size());
            for (std::size_t i = 0; i < pat.steps.size(); ++i) bits[i] = (b >> i) & 1u;
            auto run = run_pattern_branch(pat, input, bits, true);
            if (run.branch_prob <= 1e-15) continue;
            total_prob += run.branch_prob;
            min_fid = std::min(min_fid, fidelity(run.state, expected));
        }
        if (std::abs(total_prob - 1.0) > 1e-9) {
            throw contract_violation_error("branch probabilities do not sum to one");
        }
    }
    return min_fid;
}

}  // namespace cbqc
