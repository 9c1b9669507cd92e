#include <doctest.h>

#include <cmath>
#include <random>

#include "cbqc/encoding.hpp"
#include "cbqc/gates.hpp"
#include "cbqc/graph.hpp"
#include "cbqc/interactions.hpp"

using namespace cbqc;

namespace {

EntanglementGraph path_graph(int n) {
    EntanglementGraph g;
    for (int i = 0; i < n; ++i) g.add_node({0, i, NodeRole::Data});
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

}  // namespace

TEST_CASE("graph invariants") {
    EntanglementGraph g;
    int a = g.add_node({0, 0, NodeRole::Data});
    int s = g.add_node({0, 1, NodeRole::Spacer});
    int b = g.add_node({1, 0, NodeRole::Data});
    CHECK_THROWS_AS(g.add_edge(a, a), invalid_input_error);
    CHECK_THROWS_AS(g.add_edge(a, s), invalid_input_error);
    CHECK_THROWS_AS(g.add_edge(a, 5), invalid_input_error);
    CHECK_THROWS_AS(g.add_node({0, 0, NodeRole::Data}), invalid_input_error);
    g.add_edge(a, b);
    g.add_edge(b, a);  // set semantics
    CHECK(g.edges().size() == 1);
    CHECK(g.degree(a) == 1);
    CHECK(g.degree(s) == 0);
}

TEST_CASE("single-node graph state is |+>") {
    EntanglementGraph g;
    g.add_node({0, 0, NodeRole::Data});
    auto st = graph_state(g);
    CHECK(st.size() == 2);
    CHECK(std::abs(st.amps()[0] - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
    CHECK(std::abs(st.amps()[1] - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
    CHECK(stabilizer_check(st, g));
}

TEST_CASE("two-node graph state has Schmidt form (|0+> + |1->)/sqrt2") {
    auto g = path_graph(2);
    auto st = graph_state(g);
    double h = 0.5;
    CHECK(std::abs(st.amps()[0] - Complex(h, 0)) < 1e-12);
    CHECK(std::abs(st.amps()[1] - Complex(h, 0)) < 1e-12);
    CHECK(std::abs(st.amps()[2] - Complex(h, 0)) < 1e-12);
    CHECK(std::abs(st.amps()[3] - Complex(-h, 0)) < 1e-12);
    CHECK(schmidt_rank(st, {"n0_0"}) == 2);
    CHECK(stabilizer_check(st, g));
}

TEST_CASE("2x2 lattice stabilizers") {
    auto g = topology_preset(TopologyKind::Lattice2D, 2, 2);
    // Nodes (0,0),(0,1),(1,0),(1,1); memory bonds (b,0)-(b,1); collision
    // bonds (0,c)-(1,c): a 4-cycle.
    CHECK(g.nodes().size() == 4);
    CHECK(g.edges().size() == 4);
    auto st = graph_state(g);
    CHECK(stabilizer_check(st, g));
    // Perturbing one amplitude breaks the check.
    auto bad = st;
    bad.amps()[3] *= std::polar(1.0, 0.3);
    bad.normalize();
    CHECK_FALSE(stabilizer_check(bad, g));
}

TEST_CASE("Lattice2D 2x1 is a single bond") {
    auto g = topology_preset(TopologyKind::Lattice2D, 2, 1);
    CHECK(g.nodes().size() == 2);
    CHECK(g.edges().size() == 1);
    CHECK(g.has_edge(g.index_of({0, 0}), g.index_of({1, 0})));
}

TEST_CASE("Lattice2D 1xk forms three-atom stars per pulse") {
    auto g = topology_preset(TopologyKind::Lattice2D, 1, 6);
    CHECK(g.nodes().size() == 6);
    CHECK(g.edges().size() == 4);
    for (int p : {0, 3}) {
        CHECK(g.has_edge(g.index_of({0, p}), g.index_of({0, p + 1})));
        CHECK(g.has_edge(g.index_of({0, p}), g.index_of({0, p + 2})));
    }
    // No bond crosses the spacer between pulses.
    CHECK_FALSE(g.has_edge(g.index_of({0, 2}), g.index_of({0, 3})));
    CHECK(stabilizer_check(graph_state(g), g));
}

TEST_CASE("Tube 4x3 closes each cycle into a ring") {
    auto g = topology_preset(TopologyKind::Tube, 4, 3);
    CHECK(g.nodes().size() == 12);
    CHECK(tube_wrap_shift(4) == 0);
    for (int c = 0; c < 3; ++c) {
        CHECK(g.has_edge(g.index_of({3, c}), g.index_of({0, c})));
        for (int b = 0; b + 1 < 4; ++b) {
            CHECK(g.has_edge(g.index_of({b, c}), g.index_of({b + 1, c})));
        }
    }
    for (std::size_t i = 0; i < g.nodes().size(); ++i) {
        CHECK(g.degree(static_cast<int>(i)) >= 2);
    }
}

TEST_CASE("odd beam counts wrap with a one-cycle shift") {
    CHECK(tube_wrap_shift(3) == 1);
    CHECK(tube_wrap_shift(5) == 1);
    auto g = topology_preset(TopologyKind::Tube, 3, 3);
    CHECK(g.has_edge(g.index_of({2, 0}), g.index_of({0, 1})));
    CHECK(g.has_edge(g.index_of({2, 1}), g.index_of({0, 2})));
    CHECK_FALSE(g.has_edge(g.index_of({2, 0}), g.index_of({0, 0})));
}

TEST_CASE("Helix shifts the wrap bond two cycles beyond Tube") {
    auto tube = topology_preset(TopologyKind::Tube, 4, 4);
    auto helix = topology_preset(TopologyKind::Helix, 4, 4);
    CHECK(tube.has_edge(tube.index_of({3, 0}), tube.index_of({0, 0})));
    CHECK_FALSE(helix.has_edge(helix.index_of({3, 0}), helix.index_of({0, 0})));
    CHECK(helix.has_edge(helix.index_of({3, 0}), helix.index_of({0, 2})));
    CHECK(helix.has_edge(helix.index_of({3, 1}), helix.index_of({0, 3})));
}

TEST_CASE("missing mask removes nodes and their bonds") {
    auto g = topology_preset(TopologyKind::Lattice2D, 2, 2, {{0, 1}});
    CHECK(g.nodes().size() == 3);
    CHECK_FALSE(g.has_node({0, 1}));
    CHECK(g.edges().size() == 2);
    CHECK(stabilizer_check(graph_state(g), g));
}

TEST_CASE("capacity bound on graph_state") {
    EntanglementGraph g;
    for (int i = 0; i < 21; ++i) g.add_node({0, i, NodeRole::Data});
    CHECK_THROWS_AS(graph_state(g), capacity_error);
}

TEST_CASE("graph equality ignores construction order") {
    EntanglementGraph a, b;
    a.add_node({0, 0, NodeRole::Data});
    a.add_node({0, 1, NodeRole::Data});
    a.add_node({1, 0, NodeRole::Data});
    a.add_edge(0, 1);
    a.add_edge(0, 2);
    b.add_node({1, 0, NodeRole::Data});
    b.add_node({0, 1, NodeRole::Data});
    b.add_node({0, 0, NodeRole::Data});
    b.add_edge(2, 1);
    b.add_edge(2, 0);
    CHECK(a == b);
}

TEST_CASE("random graphs satisfy their stabilizers") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng() % 11);
        EntanglementGraph g;
        for (int i = 0; i < n; ++i) g.add_node({0, i, NodeRole::Data});
        int m = static_cast<int>(rng() % static_cast<unsigned>(n * (n - 1) / 2 + 1));
        for (int e = 0; e < m; ++e) {
            int a = static_cast<int>(rng() % static_cast<unsigned>(n));
            int b = static_cast<int>(rng() % static_cast<unsigned>(n));
            if (a != b) g.add_edge(a, b);
        }
        CHECK(stabilizer_check(graph_state(g), g));
    }
}

TEST_CASE("Z measurement deletes a node up to corrections") {
    Rng rng(555);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 3 + static_cast<int>(rng() % 8);
        EntanglementGraph g;
        for (int i = 0; i < n; ++i) g.add_node({0, i, NodeRole::Data});
        for (int e = 0; e < 2 * n; ++e) {
            int a = static_cast<int>(rng() % static_cast<unsigned>(n));
            int b = static_cast<int>(rng() % static_cast<unsigned>(n));
            if (a != b) g.add_edge(a, b);
        }
        int victim = static_cast<int>(rng() % static_cast<unsigned>(n));
        auto st = graph_state(g);
        auto label = g.nodes()[static_cast<std::size_t>(victim)].label();
        auto r = measure(st, label, MeasurementBasis::z(), rng);
        auto out = r.collapsed;
        if (r.outcome == -1) {
            for (int nb : g.neighbors(victim)) {
                out = apply_unitary(
                    out, {{g.nodes()[static_cast<std::size_t>(nb)].label()}, pauli_z()});
            }
        }
        out = remove_subsystem(out, label, r.bit());
        auto expect = graph_state(g.without_node(victim));
        CHECK(fidelity(out, expect) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("memory-sequence output passes star stabilizers after local rotation") {
    auto psi3 = ghz_sequence();
    auto logical = atoms_to_qubits(
        psi3, {{"A1", AtomLevel::E}, {"A2", AtomLevel::G}, {"A3", AtomLevel::E}});
    // The physical alignment rotation turns the logical state into the
    // star graph state centered on the first atom.
    logical = apply_unitary(logical, {{"A3"}, hadamard2()});
    EntanglementGraph star;
    star.add_node({0, 0, NodeRole::Data});
    star.add_node({0, 1, NodeRole::Data});
    star.add_node({0, 2, NodeRole::Data});
    star.add_edge(0, 1);
    star.add_edge(0, 2);
    auto renamed = StateVector({SubsystemSpec::qubit("n0_0"), SubsystemSpec::qubit("n0_1"),
                                SubsystemSpec::qubit("n0_2")},
                               logical.amps());
    CHECK(stabilizer_check(renamed, star));
    CHECK(fidelity(renamed, graph_state(star)) == doctest::Approx(1.0).epsilon(1e-9));
}
