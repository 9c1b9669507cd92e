// cbqc: command-line front end for the crossed-beam cluster-state simulator.
//
// Subcommands: chip (preset/validate), simulate, mbqc (cnot/run/verify),
// noise (sweep/regression). Exit codes are a stable contract:
//   0 success, 1 validation failure, 2 capacity exceeded, 3 schema error.
// The default seed comes from --seed, else the CBQC_SEED environment
// variable, else 0; every output records the seed it used.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cbqc/io.hpp"

namespace {

using namespace cbqc;

std::uint64_t default_seed() {
    const char* env = std::getenv("CBQC_SEED");
    if (env == nullptr) return 0;
    try {
        return std::stoull(env);
    } catch (const std::exception&) {
        throw invalid_input_error("CBQC_SEED must be a non-negative integer");
    }
}

TopologyKind parse_kind(const std::string& name) {
    if (name == "lattice") return TopologyKind::Lattice2D;
    if (name == "tube") return TopologyKind::Tube;
    if (name == "helix") return TopologyKind::Helix;
    throw invalid_input_error("unknown topology '" + name + "' (lattice, tube, helix)");
}

int count_stabilizer_passes(const StateVector& state, const EntanglementGraph& graph) {
    int pass = 0;
    const auto& nodes = graph.nodes();
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        StateVector tmp = state;
        cbqc::detail::apply_matrix_in_place(tmp, {nodes[a].label()}, pauli_x());
        for (int b : graph.neighbors(static_cast<int>(a))) {
            cbqc::detail::apply_matrix_in_place(
                tmp, {nodes[static_cast<std::size_t>(b)].label()}, pauli_z());
        }
        Complex acc(0, 0);
        for (std::size_t i = 0; i < state.size(); ++i) {
            acc += std::conj(state.amps()[i]) * tmp.amps()[i];
        }
        if (std::abs(acc - Complex(1, 0)) <= 1e-9) ++pass;
    }
    return pass;
}

Matrix load_target_unitary(const std::string& spec) {
    if (spec == "cnot") return cnot_matrix();
    if (spec == "identity") return Matrix::Identity(2, 2);
    if (spec == "hadamard") return hadamard2();
    if (spec == "swap") {
        Matrix m = Matrix::Zero(4, 4);
        m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = Complex(1, 0);
        return m;
    }
    std::istringstream in(read_text_file(spec));
    std::string header;
    std::getline(in, header);
    if (header != "cbqc-unitary v1") {
        throw schema_error("expected a builtin name (cnot, swap, identity, hadamard) or a "
                           "'cbqc-unitary v1' file");
    }
    std::string tag;
    int dim = 0;
    if (!(in >> tag >> dim) || tag != "dim" || dim < 1) {
        throw schema_error("unitary file: expected 'dim <n>'");
    }
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            double re, im;
            if (!(in >> re >> im)) throw schema_error("unitary file: truncated entries");
            m(r, c) = Complex(re, im);
        }
    }
    return m;
}

struct Range {
    double lo = 0.0, hi = 0.0;
    int points = 1;
};

Range parse_range(const std::string& text) {
    Range r;
    char c1, c2;
    std::istringstream in(text);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.points) || c1 != ':' || c2 != ':' ||
        r.points < 1) {
        throw invalid_input_error("range must be <lo>:<hi>:<points> with points >= 1");
    }
    return r;
}

double* noise_param_slot(NoiseParams& p, const std::string& name) {
    static const char* names =
        "velocity_sigma_frac, emission_jitter_sigma, t_cav, t_interaction, "
        "t_between_atoms, eta_detect, eta_ionize, rotation_error_frac, dephasing_rate";
    std::map<std::string, double*> slots{
        {"velocity_sigma_frac", &p.velocity_sigma_frac},
        {"emission_jitter_sigma", &p.emission_jitter_sigma},
        {"t_cav", &p.t_cav},
        {"t_interaction", &p.t_interaction},
        {"t_between_atoms", &p.t_between_atoms},
        {"eta_detect", &p.eta_detect},
        {"eta_ionize", &p.eta_ionize},
        {"rotation_error_frac", &p.rotation_error_frac},
        {"dephasing_rate", &p.dephasing_rate}};
    auto it = slots.find(name);
    if (it == slots.end()) {
        throw invalid_input_error("unknown noise parameter '" + name + "' (valid: " +
                                  std::string(names) + ")");
    }
    return it->second;
}

// ---- chip ----

int cmd_chip_preset(const std::string& kind, int beams, int cycles, const std::string& out) {
    auto cfg = chip_preset(parse_kind(kind), beams, cycles);
    auto text = chip_to_json(cfg).dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text_file(out, text);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_chip_validate(const std::string& path) {
    auto cfg = chip_from_json(read_json_file(path));
    auto diags = validate_chip(cfg);
    if (diags.empty()) {
        std::cout << "valid: " << cfg.beamlines.size() << " beamlines, " << cfg.cycles
                  << " cycles, " << cfg.collision_sites.size() << " collision sites\n";
        return 0;
    }
    for (const auto& d : diags) std::cout << "invalid: " << d << "\n";
    return 1;
}

// ---- simulate ----

int cmd_simulate(const std::string& config_path, int cycles_override,
                 const std::string& noise_spec, std::uint64_t seed, int trials, int threads,
                 const std::string& out_dir) {
    auto cfg = chip_from_json(read_json_file(config_path));
    if (cycles_override > 0) cfg.cycles = cycles_override;
    require_valid_chip(cfg);

    std::ostringstream report;
    report << "seed: " << seed << "\n";

    if (noise_spec == "off") {
        Rng rng(static_cast<Rng::result_type>(seed));
        auto tl = schedule(cfg, rng);
        auto run = run_physical(cfg, tl, &rng);
        int total = static_cast<int>(run.graph.nodes().size());
        int pass =
            total == 0 ? 0 : count_stabilizer_passes(logical_cluster_state(cfg, run), run.graph);
        report << "atoms: " << tl.atoms.size() << "\n";
        report << "graph: " << run.graph.nodes().size() << " nodes, "
               << run.graph.edges().size() << " edges\n";
        report << "stabilizers: " << pass << "/" << total << " pass\n";
        std::cout << report.str();
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            auto dir = std::filesystem::path(out_dir);
            write_text_file((dir / "state.txt").string(), state_to_text(run.state));
            write_text_file((dir / "graph.txt").string(), graph_to_text(run.graph));
            write_text_file((dir / "graph.dot").string(), graph_to_dot(run.graph));
            write_text_file((dir / "timeline.txt").string(), timeline_to_text(tl));
            write_text_file((dir / "report.txt").string(), report.str());
        }
        return pass == total ? 0 : 1;
    }

    auto params = noise_from_json(read_json_file(noise_spec));
    auto res = monte_carlo_fidelity(cfg, params, emergent_graph(cfg), trials, seed, threads);
    report << "trials: " << res.trials << "\n";
    report << std::setprecision(12);
    report << "mean_fidelity: " << res.mean_fidelity << "\n";
    report << "std_error: " << res.std_error << "\n";
    report << "heralded_rate: " << res.heralded_rate << "\n";
    std::cout << report.str();
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        auto dir = std::filesystem::path(out_dir);
        write_text_file((dir / "graph.txt").string(), graph_to_text(emergent_graph(cfg)));
        write_text_file((dir / "report.txt").string(), report.str());
    }
    return 0;
}

// ---- mbqc ----

int cmd_mbqc_cnot(const std::string& graph_path, const std::string& out) {
    EntanglementGraph topo = graph_path.empty()
                                 ? topology_preset(TopologyKind::Lattice2D, 3, 3)
                                 : graph_from_text(read_text_file(graph_path));
    auto pat = cnot_pattern(topo);
    auto text = pattern_to_json(pat).dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text_file(out, text);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_mbqc_run(const std::string& pattern_path, const std::string& input_path,
                 std::uint64_t seed, const std::string& out) {
    auto pat = pattern_from_json(read_json_file(pattern_path));
    StateVector input;
    if (input_path.empty()) {
        std::vector<SubsystemSpec> specs;
        for (const auto& label : pat.inputs) specs.push_back(SubsystemSpec::qubit(label));
        std::size_t dim = std::size_t{1} << pat.inputs.size();
        std::vector<Complex> amps(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0));
        input = StateVector(specs, amps);
    } else {
        input = state_from_text(read_text_file(input_path));
    }
    Rng rng(static_cast<Rng::result_type>(seed));
    auto run = run_pattern(pat, input, rng);
    std::cout << "seed: " << seed << "\n";
    std::cout << "outcomes: ";
    for (int o : run.outcomes) std::cout << (o == -1 ? 1 : 0);
    std::cout << "\n";
    for (const auto& o : pat.outputs) {
        std::cout << "frame " << o << ": x=" << run.frame.x.at(o) << " z=" << run.frame.z.at(o)
                  << "\n";
    }
    auto text = state_to_text(run.state);
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text_file(out, text);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_mbqc_verify(const std::string& pattern_path, const std::string& target_spec) {
    auto pat = pattern_from_json(read_json_file(pattern_path));
    auto target = load_target_unitary(target_spec);
    double fid = verify_pattern(pat, target);
    std::cout << "worst-case fidelity: " << std::setprecision(10) << std::fixed << fid << "\n";
    return fid >= 1.0 - 1e-9 ? 0 : 1;
}

// ---- noise ----

ChipConfig sweep_chip(const std::string& chip_path) {
    if (chip_path.empty()) return chip_preset(TopologyKind::Lattice2D, 1, 3);
    return chip_from_json(read_json_file(chip_path));
}

int cmd_noise_sweep(const std::string& param, const std::string& range_text, int trials,
                    const std::string& chip_path, const std::string& noise_path,
                    std::uint64_t seed, int threads, const std::string& out) {
    auto range = parse_range(range_text);
    auto cfg = sweep_chip(chip_path);
    NoiseParams base =
        noise_path.empty() ? NoiseParams{} : noise_from_json(read_json_file(noise_path));
    auto target = emergent_graph(cfg);
    std::vector<SweepRow> rows;
    for (int i = 0; i < range.points; ++i) {
        double value = range.points == 1
                           ? range.lo
                           : range.lo + (range.hi - range.lo) * i / (range.points - 1);
        NoiseParams p = base;
        *noise_param_slot(p, param) = value;
        rows.push_back({param, value, monte_carlo_fidelity(cfg, p, target, trials, seed,
                                                           threads)});
    }
    auto table = sweep_table_to_tsv(rows, seed);
    std::cout << table;
    if (!out.empty()) write_text_file(out, table);
    return 0;
}

int cmd_noise_regression(int trials, std::uint64_t seed, int threads) {
    std::cout << "# seed\t" << seed << "\n";
    std::cout << "check\tvalue\tbound\tpass\n";
    std::cout << std::setprecision(12);
    bool ok = true;

    double loss = coherence_loss(1e-5, 1e-2);
    bool p1 = std::abs(loss - 5.0e-4) < 1e-6;
    std::cout << "cavity_coherence_loss\t" << loss << "\t5e-04 +- 1e-06\t" << (p1 ? "yes" : "no")
              << "\n";

    double cf = collision_fidelity(0.01);
    bool p2 = cf >= 0.98;
    std::cout << "collision_fidelity@1%\t" << cf << "\t>= 0.98\t" << (p2 ? "yes" : "no") << "\n";

    auto cfg = chip_preset(TopologyKind::Lattice2D, 1, 3);
    NoiseParams params;  // defaults carry the 0.5% velocity spread
    auto mc = monte_carlo_fidelity(cfg, params, emergent_graph(cfg), trials, seed, threads);
    bool p3 = mc.mean_fidelity >= 0.99;
    std::cout << "ghz_fidelity@0.5%\t" << mc.mean_fidelity << "\t>= 0.99\t"
              << (p3 ? "yes" : "no") << "\n";

    ok = p1 && p2 && p3;
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crossed-beam cluster-state simulator"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;

    // chip
    auto* chip = app.add_subcommand("chip", "chip configuration tools")->require_subcommand(1);
    std::string preset_kind, preset_out;
    int preset_beams = 2, preset_cycles = 3;
    auto* preset = chip->add_subcommand("preset", "emit a preset chip configuration");
    preset->add_option("kind", preset_kind, "lattice, tube, or helix")->required();
    preset->add_option("beams", preset_beams, "number of beamlines")->required();
    preset->add_option("cycles", preset_cycles, "number of cycles")->required();
    preset->add_option("--out", preset_out, "output file (default stdout)");
    std::string validate_path;
    auto* validate = chip->add_subcommand("validate", "validate a chip configuration file");
    validate->add_option("config", validate_path, "chip configuration file")->required();

    // simulate
    std::string sim_config, sim_noise = "off", sim_out;
    int sim_cycles = 0, sim_trials = 1000;
    auto* simulate = app.add_subcommand("simulate", "run the chip and report stabilizers");
    simulate->add_option("config", sim_config, "chip configuration file")->required();
    simulate->add_option("--cycles", sim_cycles, "override the configured cycle count");
    simulate->add_option("--noise", sim_noise, "noise parameter file, or 'off'");
    simulate->add_option("--trials", sim_trials, "Monte-Carlo trials when noise is on")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--out", sim_out, "output directory");
    simulate->add_option("--seed", seed, "RNG seed (default $CBQC_SEED or 0)")
        ->each([&](const std::string&) { seed_set = true; });
    simulate->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    // mbqc
    auto* mbqc = app.add_subcommand("mbqc", "measurement-pattern tools")->require_subcommand(1);
    std::string cnot_graph, cnot_out;
    auto* cnot = mbqc->add_subcommand("cnot", "embed a CNOT pattern into a graph");
    cnot->add_option("graph", cnot_graph, "graph text file (default: lattice 3x3)");
    cnot->add_option("--out", cnot_out, "output pattern file (default stdout)");
    std::string run_pattern_path, run_input, run_out;
    auto* mrun = mbqc->add_subcommand("run", "execute a pattern with sampled outcomes");
    mrun->add_option("pattern", run_pattern_path, "pattern file")->required();
    mrun->add_option("--input", run_input, "input state file (default |+...+>)");
    mrun->add_option("--out", run_out, "output state file (default stdout)");
    mrun->add_option("--seed", seed, "RNG seed (default $CBQC_SEED or 0)")
        ->each([&](const std::string&) { seed_set = true; });
    std::string verify_pattern_path, verify_target;
    auto* mverify = mbqc->add_subcommand("verify", "worst-case fidelity against a unitary");
    mverify->add_option("pattern", verify_pattern_path, "pattern file")->required();
    mverify->add_option("--target", verify_target, "cnot|swap|identity|hadamard or a file")
        ->required();

    // noise
    auto* noise = app.add_subcommand("noise", "noise sweeps and regression checks")
                      ->require_subcommand(1);
    std::string sweep_param, sweep_range, sweep_chip_path, sweep_noise_path, sweep_out;
    int sweep_trials = 0;
    auto* sweep = noise->add_subcommand("sweep", "sweep one noise parameter");
    sweep->add_option("--param", sweep_param, "noise parameter name")->required();
    sweep->add_option("--range", sweep_range, "<lo>:<hi>:<points>")->required();
    sweep->add_option("--trials", sweep_trials, "trials per point")
        ->required()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--chip", sweep_chip_path, "chip file (default: lattice 1x3 memory)");
    sweep->add_option("--noise", sweep_noise_path, "base noise file (default: built-in)");
    sweep->add_option("--out", sweep_out, "also write the table to this file");
    sweep->add_option("--seed", seed, "RNG seed (default $CBQC_SEED or 0)")
        ->each([&](const std::string&) { seed_set = true; });
    sweep->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    int regression_trials = 10000;
    auto* regression = noise->add_subcommand("regression", "headline decoherence checks");
    regression->add_option("--trials", regression_trials, "Monte-Carlo trials")
        ->check(CLI::PositiveNumber);
    regression->add_option("--seed", seed, "RNG seed (default $CBQC_SEED or 0)")
        ->each([&](const std::string&) { seed_set = true; });
    regression->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (!seed_set) seed = default_seed();
        if (preset->parsed()) {
            return cmd_chip_preset(preset_kind, preset_beams, preset_cycles, preset_out);
        }
        if (validate->parsed()) return cmd_chip_validate(validate_path);
        if (simulate->parsed()) {
            return cmd_simulate(sim_config, sim_cycles, sim_noise, seed, sim_trials, threads,
                                sim_out);
        }
        if (cnot->parsed()) return cmd_mbqc_cnot(cnot_graph, cnot_out);
        if (mrun->parsed()) return cmd_mbqc_run(run_pattern_path, run_input, seed, run_out);
        if (mverify->parsed()) return cmd_mbqc_verify(verify_pattern_path, verify_target);
        if (sweep->parsed()) {
            return cmd_noise_sweep(sweep_param, sweep_range, sweep_trials, sweep_chip_path,
                                   sweep_noise_path, seed, threads, sweep_out);
        }
        if (regression->parsed()) return cmd_noise_regression(regression_trials, seed, threads);
        std::cerr << "no command selected\n";
        return 1;
    } catch (const capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    } catch (const schema_error& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 3;
    } catch (const cbqc::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
