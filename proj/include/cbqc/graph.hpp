// graph.hpp
// Entanglement graphs over physical qubits addressed by (beamline, cycle),
// ideal graph-state construction, stabilizer verification, and the
// architecture's topology presets.
//
// Preset edge rules (shared with the chip scheduler, which must reproduce
// them emergently):
//   - memory bonds inside each three-atom pulse p (cycles 3p, 3p+1, 3p+2):
//     (b,3p)-(b,3p+1) and (b,3p)-(b,3p+2); pulses are separated by spacer
//     slots, so no bond crosses a pulse boundary (the lattice's periodic
//     missing links)
//   - collision bonds between adjacent beams at equal cycle: (b,c)-(b+1,c)
//   - Tube adds the wrap-around bond (beams-1,c)-(0,c+s) with the smallest
//     shift s >= 0 that pairs opposite basis roles (s = beams mod 2);
//     Helix uses the next valid shift, s + 2

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cbqc/gates.hpp"
#include "cbqc/state.hpp"

namespace cbqc {

enum class NodeRole { Data, Spacer };

struct QubitNode {
    int beamline = 0;
    int cycle = 0;
    NodeRole role = NodeRole::Data;

    auto key() const { return std::pair<int, int>(beamline, cycle); }
    friend bool operator<(const QubitNode& a, const QubitNode& b) { return a.key() < b.key(); }
    friend bool operator==(const QubitNode& a, const QubitNode& b) {
        return a.key() == b.key() && a.role == b.role;
    }
    std::string label() const {
        return "n" + std::to_string(beamline) + "_" + std::to_string(cycle);
    }
};

class EntanglementGraph {
  public:
    int add_node(QubitNode node) {
        if (index_.count(node.key())) {
            throw invalid_input_error("duplicate node " + node.label());
        }
        index_[node.key()] = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }

    void add_edge(int a, int b) {
        if (a == b) throw invalid_input_error("self-loop edge");
        check_index(a);
        check_index(b);
        if (nodes_[static_cast<std::size_t>(a)].role == NodeRole::Spacer ||
            nodes_[static_cast<std::size_t>(b)].role == NodeRole::Spacer) {
            throw invalid_input_error("spacer nodes carry no bonds");
        }
        edges_.insert(ordered(a, b));
    }

    void add_edge(std::pair<int, int> a, std::pair<int, int> b) {
        add_edge(index_of(a), index_of(b));
    }

    bool has_node(std::pair<int, int> key) const { return index_.count(key) > 0; }
    int index_of(std::pair<int, int> key) const {
        auto it = index_.find(key);
        if (it == index_.end()) {
            throw invalid_input_error("unknown node (" + std::to_string(key.first) + "," +
                                      std::to_string(key.second) + ")");
        }
        return it->second;
    }

    const std::vector<QubitNode>& nodes() const { return nodes_; }
    const std::set<std::pair<int, int>>& edges() const { return edges_; }

    bool has_edge(int a, int b) const { return edges_.count(ordered(a, b)) > 0; }

    std::vector<int> neighbors(int a) const {
        check_index(a);
        std::vector<int> out;
        for (const auto& [x, y] : edges_) {
            if (x == a) out.push_back(y);
            else if (y == a) out.push_back(x);
        }
        return out;
    }

    int degree(int a) const { return static_cast<int>(neighbors(a).size()); }

    EntanglementGraph without_node(int a) const {
        check_index(a);
        EntanglementGraph g;
        std::vector<int> remap(nodes_.size(), -1);
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (static_cast<int>(i) == a) continue;
            remap[i] = g.add_node(nodes_[i]);
        }
        for (const auto& [x, y] : edges_) {
            if (x == a || y == a) continue;
            g.add_edge(remap[static_cast<std::size_t>(x)], remap[static_cast<std::size_t>(y)]);
        }
        return g;
    }

    EntanglementGraph without_edge(int a, int b) const {
        if (!has_edge(a, b)) throw invalid_input_error("edge not present");
        EntanglementGraph g = *this;
        g.edges_.erase(ordered(a, b));
        return g;
    }

    friend bool operator==(const EntanglementGraph& a, const EntanglementGraph& b) {
        std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> ea, eb;
        for (const auto& [x, y] : a.edges_) {
            auto ka = a.nodes_[static_cast<std::size_t>(x)].key();
            auto kb = a.nodes_[static_cast<std::size_t>(y)].key();
            ea.insert(std::minmax(ka, kb));
        }
        for (const auto& [x, y] : b.edges_) {
            auto ka = b.nodes_[static_cast<std::size_t>(x)].key();
            auto kb = b.nodes_[static_cast<std::size_t>(y)].key();
            eb.insert(std::minmax(ka, kb));
        }
        std::set<std::pair<int, int>> na, nb;
        for (const auto& n : a.nodes_) na.insert(n.key());
        for (const auto& n : b.nodes_) nb.insert(n.key());
        return na == nb && ea == eb;
    }

  private:
    static std::pair<int, int> ordered(int a, int b) { return {std::min(a, b), std::max(a, b)}; }
    void check_index(int a) const {
        if (a < 0 || a >= static_cast<int>(nodes_.size())) {
            throw invalid_input_error("node index out of range");
        }
    }

    std::vector<QubitNode> nodes_;
    std::set<std::pair<int, int>> edges_;
    std::map<std::pair<int, int>, int> index_;
};

inline constexpr int kGraphStateMaxNodes = 20;

inline StateVector graph_state(const EntanglementGraph& graph) {
    const auto& nodes = graph.nodes();
    if (nodes.size() > kGraphStateMaxNodes) {
        throw capacity_error("graph exceeds the brute-force bound of 20 nodes");
    }
    std::vector<SubsystemSpec> specs;
    specs.reserve(nodes.size());
    for (const auto& n : nodes) specs.push_back(SubsystemSpec::qubit(n.label()));
    std::size_t dim = std::size_t{1} << nodes.size();
    StateVector st(specs, std::vector<Complex>(dim, Complex(0, 0)));
    double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    for (auto& a : st.amps()) a = amp;
    for (const auto& [x, y] : graph.edges()) {
        st = apply_unitary(st, {{nodes[static_cast<std::size_t>(x)].label(),
                                 nodes[static_cast<std::size_t>(y)].label()},
                                cz_matrix()});
    }
    return st;
}

// True iff every stabilizer K_a = X_a prod_{b in nbr(a)} Z_b has
// expectation 1 within tol.
inline bool stabilizer_check(const StateVector& state, const EntanglementGraph& graph,
                             double tol = 1e-9) {
    const auto& nodes = graph.nodes();
    if (state.reg().size() != nodes.size()) {
        throw invalid_input_error("register does not match graph nodes");
    }
    for (const auto& n : nodes) {
        (void)state.position_of(n.label());  // throws on mismatch
    }
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        StateVector tmp = state;
        detail::apply_matrix_in_place(tmp, {nodes[a].label()}, pauli_x());
        for (int b : graph.neighbors(static_cast<int>(a))) {
            detail::apply_matrix_in_place(tmp, {nodes[static_cast<std::size_t>(b)].label()},
                                          pauli_z());
        }
        Complex acc(0, 0);
        for (std::size_t i = 0; i < state.size(); ++i) {
            acc += std::conj(state.amps()[i]) * tmp.amps()[i];
        }
        if (std::abs(acc - Complex(1, 0)) > tol) return false;
    }
    return true;
}

enum class TopologyKind { Lattice2D, Tube, Helix };

// Wrap-around cycle shift that pairs opposite basis roles across the
// (beams-1, 0) collision site.
inline int tube_wrap_shift(int beams) { return beams % 2; }

inline EntanglementGraph topology_preset(TopologyKind kind, int beams, int cycles,
                                         const std::set<std::pair<int, int>>& missing = {}) {
    if (beams < 1 || cycles < 1) throw invalid_input_error("beams and cycles must be >= 1");
    if (kind != TopologyKind::Lattice2D && beams < 2) {
        throw invalid_input_error("wrap topologies require at least 2 beams");
    }
    EntanglementGraph g;
    for (int b = 0; b < beams; ++b) {
        for (int c = 0; c < cycles; ++c) {
            if (missing.count({b, c})) continue;
            g.add_node({b, c, NodeRole::Data});
        }
    }
    auto bond = [&](int b1, int c1, int b2, int c2) {
        if (g.has_node({b1, c1}) && g.has_node({b2, c2})) {
            g.add_edge({b1, c1}, {b2, c2});
        }
    };
    // Memory bonds: star at the pulse's first atom.
    for (int b = 0; b < beams; ++b) {
        for (int p = 0; 3 * p < cycles; ++p) {
            if (3 * p + 1 < cycles) bond(b, 3 * p, b, 3 * p + 1);
            if (3 * p + 2 < cycles) bond(b, 3 * p, b, 3 * p + 2);
        }
    }
    // Collision bonds.
    for (int b = 0; b + 1 < beams; ++b) {
        for (int c = 0; c < cycles; ++c) bond(b, c, b + 1, c);
    }
    if (kind == TopologyKind::Tube || kind == TopologyKind::Helix) {
        int shift = tube_wrap_shift(beams) + (kind == TopologyKind::Helix ? 2 : 0);
        for (int c = 0; c + shift < cycles; ++c) {
            if (beams - 1 != 0 || shift != 0) bond(beams - 1, c, 0, c + shift);
        }
    }
    return g;
}

}  // namespace cbqc
