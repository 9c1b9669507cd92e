// io.hpp
// Versioned file formats: JSON schemas for chip configurations, measurement
// patterns, and noise parameters; line-oriented text formats for states,
// graphs, and timelines; DOT export; and the noise-sweep result table.
//
// Every format carries an explicit schema name and version; loaders reject
// anything else with schema_error. Formats are documented in README.md.

#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cbqc/mbqc.hpp"
#include "cbqc/noise.hpp"

namespace cbqc {

using json = nlohmann::json;

inline constexpr int kChipSchemaVersion = 1;
inline constexpr int kPatternSchemaVersion = 1;
inline constexpr int kNoiseSchemaVersion = 1;

namespace detail {

inline void require_schema(const json& j, const std::string& name, int version) {
    if (!j.is_object() || !j.contains("schema") || !j.contains("version")) {
        throw schema_error("missing schema/version fields");
    }
    if (j.at("schema") != name) {
        throw schema_error("expected schema '" + name + "', found '" +
                           j.at("schema").dump() + "'");
    }
    if (!j.at("version").is_number_integer() || j.at("version").get<int>() != version) {
        throw schema_error("unsupported " + name + " version " + j.at("version").dump() +
                           " (this build reads version " + std::to_string(version) + ")");
    }
}

template <typename T>
T get_field(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key)) throw schema_error(context + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw schema_error(context + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace detail

// ---- chip configuration (cbqc.chip v1) ----

inline json chip_to_json(const ChipConfig& cfg) {
    json j;
    j["schema"] = "cbqc.chip";
    j["version"] = kChipSchemaVersion;
    j["cycles"] = cfg.cycles;
    j["clock_period"] = cfg.clock_period;
    j["overlap_time"] = cfg.overlap_time;
    j["beamlines"] = json::array();
    for (const auto& b : cfg.beamlines) {
        j["beamlines"].push_back({{"id", b.id},
                                  {"delay", b.delay},
                                  {"fill_probability", b.source.fill_probability},
                                  {"velocity", b.source.velocity}});
    }
    j["collision_sites"] = json::array();
    for (const auto& s : cfg.collision_sites) {
        j["collision_sites"].push_back({{"beam_a", s.beam_a},
                                        {"beam_b", s.beam_b},
                                        {"cycle_shift", s.cycle_shift},
                                        {"on", s.on}});
    }
    return j;
}

inline ChipConfig chip_from_json(const json& j) {
    detail::require_schema(j, "cbqc.chip", kChipSchemaVersion);
    ChipConfig cfg;
    cfg.cycles = detail::get_field<int>(j, "cycles", "chip");
    cfg.clock_period = detail::get_field<double>(j, "clock_period", "chip");
    cfg.overlap_time = detail::get_field<double>(j, "overlap_time", "chip");
    for (const auto& bj : detail::get_field<json>(j, "beamlines", "chip")) {
        BeamlineConfig b;
        b.id = detail::get_field<int>(bj, "id", "beamline");
        b.delay = detail::get_field<int>(bj, "delay", "beamline");
        b.source.fill_probability = detail::get_field<double>(bj, "fill_probability", "beamline");
        b.source.velocity = detail::get_field<double>(bj, "velocity", "beamline");
        cfg.beamlines.push_back(b);
    }
    for (const auto& sj : detail::get_field<json>(j, "collision_sites", "chip")) {
        CollisionSite s;
        s.beam_a = detail::get_field<int>(sj, "beam_a", "collision site");
        s.beam_b = detail::get_field<int>(sj, "beam_b", "collision site");
        s.cycle_shift = detail::get_field<int>(sj, "cycle_shift", "collision site");
        s.on = detail::get_field<bool>(sj, "on", "collision site");
        cfg.collision_sites.push_back(s);
    }
    return cfg;
}

// ---- noise parameters (cbqc.noise v1) ----

inline json noise_to_json(const NoiseParams& p) {
    return json{{"schema", "cbqc.noise"},
                {"version", kNoiseSchemaVersion},
                {"velocity_sigma_frac", p.velocity_sigma_frac},
                {"emission_jitter_sigma", p.emission_jitter_sigma},
                {"t_cav", p.t_cav},
                {"t_interaction", p.t_interaction},
                {"t_between_atoms", p.t_between_atoms},
                {"eta_detect", p.eta_detect},
                {"eta_ionize", p.eta_ionize},
                {"rotation_error_frac", p.rotation_error_frac},
                {"dephasing_rate", p.dephasing_rate}};
}

inline NoiseParams noise_from_json(const json& j) {
    detail::require_schema(j, "cbqc.noise", kNoiseSchemaVersion);
    NoiseParams p;
    p.velocity_sigma_frac = detail::get_field<double>(j, "velocity_sigma_frac", "noise");
    p.emission_jitter_sigma = detail::get_field<double>(j, "emission_jitter_sigma", "noise");
    p.t_cav = detail::get_field<double>(j, "t_cav", "noise");
    p.t_interaction = detail::get_field<double>(j, "t_interaction", "noise");
    p.t_between_atoms = detail::get_field<double>(j, "t_between_atoms", "noise");
    p.eta_detect = detail::get_field<double>(j, "eta_detect", "noise");
    p.eta_ionize = detail::get_field<double>(j, "eta_ionize", "noise");
    p.rotation_error_frac = detail::get_field<double>(j, "rotation_error_frac", "noise");
    p.dephasing_rate = detail::get_field<double>(j, "dephasing_rate", "noise");
    p.validate();
    return p;
}

// ---- entanglement graphs ----

inline json graph_to_json(const EntanglementGraph& g) {
    json j;
    j["nodes"] = json::array();
    for (const auto& n : g.nodes()) {
        j["nodes"].push_back({{"beamline", n.beamline},
                              {"cycle", n.cycle},
                              {"role", n.role == NodeRole::Data ? "data" : "spacer"}});
    }
    j["edges"] = json::array();
    for (const auto& [a, b] : g.edges()) j["edges"].push_back({a, b});
    return j;
}

inline EntanglementGraph graph_from_json(const json& j) {
    EntanglementGraph g;
    for (const auto& nj : detail::get_field<json>(j, "nodes", "graph")) {
        QubitNode n;
        n.beamline = detail::get_field<int>(nj, "beamline", "graph node");
        n.cycle = detail::get_field<int>(nj, "cycle", "graph node");
        std::string role = detail::get_field<std::string>(nj, "role", "graph node");
        if (role == "data") n.role = NodeRole::Data;
        else if (role == "spacer") n.role = NodeRole::Spacer;
        else throw schema_error("graph node: unknown role '" + role + "'");
        g.add_node(n);
    }
    for (const auto& ej : detail::get_field<json>(j, "edges", "graph")) {
        if (!ej.is_array() || ej.size() != 2) {
            throw schema_error("graph edge: expected a two-element index pair");
        }
        g.add_edge(ej[0].get<int>(), ej[1].get<int>());
    }
    return g;
}

// Line format: header, then "node <beamline> <cycle> <role>" and
// "edge <b1> <c1> <b2> <c2>" lines.
inline std::string graph_to_text(const EntanglementGraph& g) {
    std::ostringstream out;
    out << "cbqc-graph v1\n";
    for (const auto& n : g.nodes()) {
        out << "node " << n.beamline << ' ' << n.cycle << ' '
            << (n.role == NodeRole::Data ? "data" : "spacer") << '\n';
    }
    for (const auto& [a, b] : g.edges()) {
        const auto& na = g.nodes()[static_cast<std::size_t>(a)];
        const auto& nb = g.nodes()[static_cast<std::size_t>(b)];
        out << "edge " << na.beamline << ' ' << na.cycle << ' ' << nb.beamline << ' '
            << nb.cycle << '\n';
    }
    return out.str();
}

inline EntanglementGraph graph_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    if (header != "cbqc-graph v1") throw schema_error("expected 'cbqc-graph v1' header");
    EntanglementGraph g;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "node") {
            QubitNode n;
            std::string role;
            if (!(ls >> n.beamline >> n.cycle >> role)) {
                throw schema_error("line " + std::to_string(lineno) + ": malformed node");
            }
            if (role == "data") n.role = NodeRole::Data;
            else if (role == "spacer") n.role = NodeRole::Spacer;
            else throw schema_error("line " + std::to_string(lineno) + ": unknown role");
            g.add_node(n);
        } else if (tag == "edge") {
            int b1, c1, b2, c2;
            if (!(ls >> b1 >> c1 >> b2 >> c2)) {
                throw schema_error("line " + std::to_string(lineno) + ": malformed edge");
            }
            g.add_edge({b1, c1}, {b2, c2});
        } else {
            throw schema_error("line " + std::to_string(lineno) + ": unknown record '" + tag +
                               "'");
        }
    }
    return g;
}

inline std::string graph_to_dot(const EntanglementGraph& g, const std::string& name = "cbqc") {
    std::ostringstream out;
    out << "graph " << name << " {\n  node [shape=circle];\n";
    for (const auto& n : g.nodes()) {
        out << "  " << n.label() << " [pos=\"" << n.cycle << ',' << n.beamline << "!\"]";
        if (n.role == NodeRole::Spacer) out << " [style=dotted]";
        out << ";\n";
    }
    for (const auto& [a, b] : g.edges()) {
        out << "  " << g.nodes()[static_cast<std::size_t>(a)].label() << " -- "
            << g.nodes()[static_cast<std::size_t>(b)].label() << ";\n";
    }
    out << "}\n";
    return out.str();
}

// ---- measurement patterns (cbqc.pattern v1) ----

namespace detail {

inline std::string basis_name(const MeasurementBasis& b) {
    switch (b.kind) {
        case MeasurementBasis::Kind::Z: return "Z";
        case MeasurementBasis::Kind::X: return "X";
        case MeasurementBasis::Kind::Y: return "Y";
        case MeasurementBasis::Kind::Balpha: return "B";
    }
    return "Z";
}

inline MeasurementBasis basis_from(const std::string& name, double alpha,
                                   const std::string& context) {
    if (name == "Z") return MeasurementBasis::z();
    if (name == "X") return MeasurementBasis::x();
    if (name == "Y") return MeasurementBasis::y();
    if (name == "B") return MeasurementBasis::b_alpha(alpha);
    throw schema_error(context + ": unknown basis '" + name + "'");
}

}  // namespace detail

inline json pattern_to_json(const MeasurementPattern& pat) {
    json j;
    j["schema"] = "cbqc.pattern";
    j["version"] = kPatternSchemaVersion;
    j["graph"] = graph_to_json(pat.graph);
    j["inputs"] = pat.inputs;
    j["outputs"] = pat.outputs;
    j["steps"] = json::array();
    for (const auto& s : pat.steps) {
        json sj{{"node", s.node},
                {"basis", detail::basis_name(s.basis)},
                {"sign_deps", s.sign_deps}};
        if (s.basis.kind == MeasurementBasis::Kind::Balpha) sj["alpha"] = s.basis.alpha;
        j["steps"].push_back(sj);
    }
    j["x_corrections"] = pat.x_corrections;
    j["z_corrections"] = pat.z_corrections;
    return j;
}

inline MeasurementPattern pattern_from_json(const json& j) {
    detail::require_schema(j, "cbqc.pattern", kPatternSchemaVersion);
    MeasurementPattern pat;
    pat.graph = graph_from_json(detail::get_field<json>(j, "graph", "pattern"));
    pat.inputs = detail::get_field<std::vector<std::string>>(j, "inputs", "pattern");
    pat.outputs = detail::get_field<std::vector<std::string>>(j, "outputs", "pattern");
    auto steps = detail::get_field<json>(j, "steps", "pattern");
    int idx = 0;
    for (const auto& sj : steps) {
        std::string ctx = "step " + std::to_string(idx);
        MeasurementStep s;
        s.node = detail::get_field<std::string>(sj, "node", ctx);
        std::string basis = detail::get_field<std::string>(sj, "basis", ctx);
        double alpha = sj.contains("alpha") ? detail::get_field<double>(sj, "alpha", ctx) : 0.0;
        if (basis == "B" && !sj.contains("alpha")) {
            throw schema_error(ctx + ": basis B requires an alpha field");
        }
        s.basis = detail::basis_from(basis, alpha, ctx);
        s.sign_deps = detail::get_field<std::vector<int>>(sj, "sign_deps", ctx);
        pat.steps.push_back(s);
        ++idx;
    }
    using CorrMap = std::map<std::string, std::vector<int>>;
    pat.x_corrections = detail::get_field<CorrMap>(j, "x_corrections", "pattern");
    pat.z_corrections = detail::get_field<CorrMap>(j, "z_corrections", "pattern");
    try {
        pat.validate();
    } catch (const invalid_pattern_error& e) {
        throw schema_error(std::string("pattern fails validation: ") + e.what());
    }
    return pat;
}

// ---- state vectors ----

// Line format: header, one "sub <kind> <label> <dim>" per subsystem, then
// "amps <count>" and one "<re> <im>" pair per amplitude in register order.
inline std::string state_to_text(const StateVector& st) {
    std::ostringstream out;
    out << "cbqc-state v1\n";
    for (const auto& s : st.reg()) {
        const char* kind = s.kind == SubsystemKind::Atom      ? "atom"
                           : s.kind == SubsystemKind::Cavity  ? "cavity"
                                                              : "qubit";
        out << "sub " << kind << ' ' << s.label << ' ' << s.dim << '\n';
    }
    out << "amps " << st.size() << '\n';
    out << std::setprecision(17);
    for (const auto& a : st.amps()) out << a.real() << ' ' << a.imag() << '\n';
    return out.str();
}

inline StateVector state_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    if (header != "cbqc-state v1") throw schema_error("expected 'cbqc-state v1' header");
    std::vector<SubsystemSpec> specs;
    std::string tag;
    std::size_t count = 0;
    while (in >> tag) {
        if (tag == "sub") {
            std::string kind, label;
            int dim;
            if (!(in >> kind >> label >> dim)) throw schema_error("malformed subsystem line");
            SubsystemKind k;
            if (kind == "atom") k = SubsystemKind::Atom;
            else if (kind == "cavity") k = SubsystemKind::Cavity;
            else if (kind == "qubit") k = SubsystemKind::LogicalQubit;
            else throw schema_error("unknown subsystem kind '" + kind + "'");
            if (dim < 2) throw schema_error("subsystem dimension must be >= 2");
            specs.push_back({label, k, dim});
        } else if (tag == "amps") {
            if (!(in >> count)) throw schema_error("malformed amplitude count");
            break;
        } else {
            throw schema_error("unknown record '" + tag + "'");
        }
    }
    if (specs.empty()) throw schema_error("state lists no subsystems");
    std::size_t dim = 1;
    for (const auto& s : specs) dim *= static_cast<std::size_t>(s.dim);
    if (count != dim) {
        throw schema_error("amplitude count does not match the register dimension");
    }
    std::vector<Complex> amps;
    amps.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        double re, im;
        if (!(in >> re >> im)) throw schema_error("truncated amplitude list");
        amps.emplace_back(re, im);
    }
    return StateVector(specs, amps);
}

// ---- timelines ----

// One event per line: "atom <time> <beam> <cycle> <role> <filled>" or
// "collision <time> <beam_a> <cycle_a> <beam_b> <cycle_b> <active>".
inline std::string timeline_to_text(const Timeline& tl) {
    std::ostringstream out;
    out << "cbqc-timeline v1\n" << std::setprecision(17);
    for (const auto& a : tl.atoms) {
        out << "atom " << a.time << ' ' << a.beam << ' ' << a.cycle << ' '
            << (a.role_ef ? "ef" : "eg") << ' ' << (a.filled ? 1 : 0) << '\n';
    }
    for (const auto& c : tl.collisions) {
        const AtomEvent* a = tl.find(c.beam_a, c.cycle_a);
        out << "collision " << (a != nullptr ? a->time : 0.0) << ' ' << c.beam_a << ' '
            << c.cycle_a << ' ' << c.beam_b << ' ' << c.cycle_b << ' ' << (c.active ? 1 : 0)
            << '\n';
    }
    return out.str();
}

// ---- sweep tables ----

struct SweepRow {
    std::string param;
    double value = 0.0;
    MonteCarloResult result;
};

inline std::string sweep_table_to_tsv(const std::vector<SweepRow>& rows, std::uint64_t seed) {
    std::ostringstream out;
    out << "# seed\t" << seed << '\n';
    out << "param\tvalue\tmean_fidelity\tstd_error\theralded_rate\ttrials\n";
    out << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.param << '\t' << r.value << '\t' << r.result.mean_fidelity << '\t'
            << r.result.std_error << '\t' << r.result.heralded_rate << '\t' << r.result.trials
            << '\n';
    }
    return out.str();
}

// ---- file helpers ----

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw invalid_input_error("failed writing '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline json read_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw schema_error("invalid JSON in '" + path + "': " + e.what());
    }
}

}  // namespace cbqc
