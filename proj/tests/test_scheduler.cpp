#include <doctest.h>

#include <cmath>

#include "cbqc/scheduler.hpp"

using namespace cbqc;

TEST_CASE("slot arithmetic and clock consistency") {
    BeamlineConfig b{2, 2, {}};
    // Cycles 0,1,2 are consecutive; a spacer slot separates pulses.
    CHECK(slot_of(b, 0) == 2);
    CHECK(slot_of(b, 1) == 3);
    CHECK(slot_of(b, 2) == 4);
    CHECK(slot_of(b, 3) == 6);
    CHECK(slot_of(b, 4) == 7);

    auto cfg = chip_preset(TopologyKind::Lattice2D, 1, 6);
    auto tl = schedule(cfg);
    for (const auto& a : tl.atoms) {
        CHECK(a.time == doctest::Approx(a.slot * cfg.clock_period).epsilon(1e-15));
    }
}

TEST_CASE("roles alternate with slot parity") {
    BeamlineConfig even{0, 0, {}};
    BeamlineConfig odd{1, 1, {}};
    CHECK(role_ef(even, 0));
    CHECK_FALSE(role_ef(even, 1));
    CHECK(role_ef(even, 2));
    CHECK_FALSE(role_ef(odd, 0));
    CHECK(role_ef(odd, 1));
}

TEST_CASE("chip validation diagnostics") {
    CHECK(validate_chip(chip_preset(TopologyKind::Tube, 4, 3)).empty());
    CHECK(validate_chip(chip_preset(TopologyKind::Helix, 3, 3)).empty());

    ChipConfig cfg = chip_preset(TopologyKind::Lattice2D, 2, 3);
    cfg.beamlines[0].source.fill_probability = 1.5;
    cfg.beamlines[1].delay = -1;
    cfg.collision_sites.push_back({0, 0, 1, true});   // self-crossing
    cfg.collision_sites.push_back({0, 5, 0, true});   // unknown beam
    cfg.collision_sites.push_back({0, 1, 1, true});   // same role parity
    auto diags = validate_chip(cfg);
    CHECK(diags.size() == 5);
    CHECK_THROWS_AS(require_valid_chip(cfg), invalid_input_error);

    ChipConfig dup = chip_preset(TopologyKind::Lattice2D, 2, 3);
    dup.beamlines.push_back(dup.beamlines[0]);
    CHECK_FALSE(validate_chip(dup).empty());

    ChipConfig bad_clock = chip_preset(TopologyKind::Lattice2D, 2, 3);
    bad_clock.overlap_time = bad_clock.clock_period;
    CHECK_FALSE(validate_chip(bad_clock).empty());
}

TEST_CASE("noise-free schedule is deterministic and fully filled") {
    auto cfg = chip_preset(TopologyKind::Tube, 3, 3);
    auto a = schedule(cfg);
    auto b = schedule(cfg);
    REQUIRE(a.atoms.size() == b.atoms.size());
    REQUIRE(a.atoms.size() == 9);
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
        CHECK(a.atoms[i].filled);
        CHECK(a.atoms[i].slot == b.atoms[i].slot);
    }
    Rng r1(42), r2(42);
    auto s1 = schedule(cfg, r1);
    auto s2 = schedule(cfg, r2);
    for (std::size_t i = 0; i < s1.atoms.size(); ++i) {
        CHECK(s1.atoms[i].filled == s2.atoms[i].filled);
    }
}

TEST_CASE("fill statistics match the source probability") {
    ChipConfig cfg = chip_preset(TopologyKind::Lattice2D, 1, 10000);
    cfg.beamlines[0].source.fill_probability = 0.83;
    Rng rng(7);
    auto tl = schedule(cfg, rng);
    int missing = 0;
    for (const auto& a : tl.atoms) missing += a.filled ? 0 : 1;
    CHECK(missing / 10000.0 == doctest::Approx(0.17).epsilon(0.06));
    CHECK(std::abs(missing / 10000.0 - 0.17) < 0.01);
}

TEST_CASE("emergent graph equals the topology preset") {
    for (auto kind : {TopologyKind::Lattice2D, TopologyKind::Tube, TopologyKind::Helix}) {
        for (int beams = 2; beams <= 5; ++beams) {
            for (int cycles = 1; cycles <= 3; ++cycles) {
                CAPTURE(static_cast<int>(kind));
                CAPTURE(beams);
                CAPTURE(cycles);
                auto cfg = chip_preset(kind, beams, cycles);
                CHECK(emergent_graph(cfg) == topology_preset(kind, beams, cycles));
            }
        }
    }
}

TEST_CASE("duplicate collision pairs fire only once") {
    // Tube with two beams folds the wrap site onto the lattice site.
    auto cfg = chip_preset(TopologyKind::Tube, 2, 3);
    auto tl = schedule(cfg);
    int active = 0;
    for (const auto& c : tl.collisions) active += c.active ? 1 : 0;
    CHECK(active == 3);
    CHECK(emergent_graph(cfg, tl) == topology_preset(TopologyKind::Tube, 2, 3));
    auto run = run_physical(cfg, tl);
    CHECK(stabilizer_check(run.state, run.graph));
}

TEST_CASE("single beamline produces the memory state pulse by pulse") {
    auto cfg = chip_preset(TopologyKind::Lattice2D, 1, 3);
    auto run = run_physical(cfg);
    REQUIRE(run.state.reg().size() == 3);
    // Logical (1/2)(|000> + |010> + |101> - |111>), order (n0_0, n0_1, n0_2).
    CHECK(std::abs(run.state.amps()[0] - Complex(0.5, 0)) < 1e-12);
    CHECK(std::abs(run.state.amps()[2] - Complex(0.5, 0)) < 1e-12);
    CHECK(std::abs(run.state.amps()[5] - Complex(0.5, 0)) < 1e-12);
    CHECK(std::abs(run.state.amps()[7] - Complex(-0.5, 0)) < 1e-12);
    CHECK(stabilizer_check(logical_cluster_state(cfg, run), run.graph));
}

TEST_CASE("multi-beam runs satisfy the emergent graph stabilizers") {
    for (auto kind : {TopologyKind::Lattice2D, TopologyKind::Tube, TopologyKind::Helix}) {
        for (int beams = 2; beams <= 3; ++beams) {
            for (int cycles = 1; cycles <= 3; ++cycles) {
                CAPTURE(static_cast<int>(kind));
                CAPTURE(beams);
                CAPTURE(cycles);
                auto cfg = chip_preset(kind, beams, cycles);
                auto run = run_physical(cfg);
                CHECK(run.graph == topology_preset(kind, beams, cycles));
                CHECK(stabilizer_check(run.state, run.graph));
            }
        }
    }
}

TEST_CASE("missed fills delete nodes consistently") {
    auto cfg = chip_preset(TopologyKind::Lattice2D, 2, 3);
    for (auto missing : {std::pair(0, 0), std::pair(0, 1), std::pair(0, 2), std::pair(1, 1)}) {
        CAPTURE(missing.first);
        CAPTURE(missing.second);
        auto tl = schedule(cfg);
        apply_fill_mask(tl, {missing});
        auto run = run_physical(cfg, tl);
        CHECK(run.graph == topology_preset(TopologyKind::Lattice2D, 2, 3, {missing}));
        CHECK(stabilizer_check(run.state, run.graph));
    }
}

TEST_CASE("stranded-photon feedback is outcome independent") {
    auto cfg = chip_preset(TopologyKind::Lattice2D, 2, 3);
    auto tl = schedule(cfg);
    apply_fill_mask(tl, {{0, 2}});
    auto det = run_physical(cfg, tl);
    for (unsigned seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        auto sampled = run_physical(cfg, tl, &rng);
        CHECK(fidelity(sampled.state, det.state) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("more missed fills never add bonds") {
    auto cfg = chip_preset(TopologyKind::Tube, 3, 3);
    auto full = emergent_graph(cfg);
    std::set<std::pair<int, int>> mask;
    for (auto drop : {std::pair(0, 0), std::pair(1, 2), std::pair(2, 1)}) {
        auto fewer_edges = [&](const EntanglementGraph& small, const EntanglementGraph& big) {
            for (const auto& [x, y] : small.edges()) {
                auto a = small.nodes()[static_cast<std::size_t>(x)].key();
                auto b = small.nodes()[static_cast<std::size_t>(y)].key();
                if (!big.has_node(a) || !big.has_node(b) ||
                    !big.has_edge(big.index_of(a), big.index_of(b))) {
                    return false;
                }
            }
            return true;
        };
        auto before = emergent_graph(cfg, [&] {
            auto tl = schedule(cfg);
            apply_fill_mask(tl, mask);
            return tl;
        }());
        mask.insert(drop);
        auto tl = schedule(cfg);
        apply_fill_mask(tl, mask);
        auto after = emergent_graph(cfg, tl);
        CHECK(after.nodes().size() < before.nodes().size());
        CHECK(fewer_edges(after, before));
        CHECK(fewer_edges(before, full));
    }
}

TEST_CASE("capacity bounds are enforced before simulation") {
    auto wide = chip_preset(TopologyKind::Lattice2D, 7, 3);  // 21 atoms
    CHECK_THROWS_AS(run_physical(wide), capacity_error);
    auto deep = chip_preset(TopologyKind::Lattice2D, 16, 1);  // 3^16 amplitudes
    CHECK_THROWS_AS(run_physical(deep), capacity_error);
}
