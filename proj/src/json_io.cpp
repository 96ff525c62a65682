#include "hdmbqc/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hdmbqc {
namespace {

json complex_to_json(const Cx& c) { return json::array({c.real(), c.imag()}); }

Cx complex_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

void require_schema(const json& j) {
    if (j.contains("schema") && j.at("schema").get<int>() > kSchemaVersion)
        throw std::runtime_error("json_io: file schema is newer than this build supports");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

json encoding_to_json(const EncodingSpec& spec) {
    return json{{"schema", kSchemaVersion},
                {"d", spec.d},
                {"N", spec.N},
                {"rows", spec.grid.rows},
                {"cols", spec.grid.cols},
                {"pitch_um", spec.grid.pitch_um},
                {"radius_um", spec.grid.radius_um}};
}

EncodingSpec encoding_from_json(const json& j) {
    require_schema(j);
    ApertureGrid grid{j.at("rows").get<int>(), j.at("cols").get<int>(),
                      j.at("pitch_um").get<double>(), j.at("radius_um").get<double>()};
    return EncodingSpec::make(j.at("d").get<int>(), j.at("N").get<int>(), grid);
}

json graph_to_json(const GraphState& g) {
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back(json::array({e.u, e.v, e.weight}));
    std::string alloc;
    for (Photon p : g.allocation) alloc += p == Photon::A ? 'A' : 'B';
    json out{{"schema", kSchemaVersion},
             {"d", g.d},
             {"vertices", g.n_vertices},
             {"edges", edges},
             {"allocation", alloc}};
    if (!g.fourier_frame.empty()) {
        json frames = json::array();
        for (int v = 0; v < g.n_vertices; ++v)
            if (g.fourier_frame[v]) frames.push_back(v);
        out["frames"] = frames;
    }
    return out;
}

GraphState graph_from_json(const json& j) {
    require_schema(j);
    const int n = j.at("vertices").get<int>();
    std::vector<GraphEdge> edges;
    for (const auto& e : j.at("edges"))
        edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(),
                         e.size() > 2 ? e.at(2).get<int>() : 1});
    std::vector<Photon> alloc;
    const std::string alloc_str = j.at("allocation").get<std::string>();
    for (char c : alloc_str) {
        if (c != 'A' && c != 'B') throw std::runtime_error("graph_from_json: allocation must be A/B");
        alloc.push_back(c == 'A' ? Photon::A : Photon::B);
    }
    std::vector<bool> frames;
    if (j.contains("frames")) {
        frames.assign(n, false);
        for (const auto& v : j.at("frames")) frames.at(v.get<int>()) = true;
    }
    return GraphState::make(j.at("d").get<int>(), n, std::move(edges), std::move(alloc),
                            std::move(frames));
}

json state_to_json(const TwoPhotonState& state) {
    json amp = json::array();
    for (Eigen::Index i = 0; i < state.amp.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index jj = 0; jj < state.amp.cols(); ++jj)
            row.push_back(complex_to_json(state.amp(i, jj)));
        amp.push_back(std::move(row));
    }
    return json{{"schema", kSchemaVersion}, {"encoding", encoding_to_json(state.spec)}, {"amp", amp}};
}

TwoPhotonState state_from_json(const json& j) {
    require_schema(j);
    TwoPhotonState state;
    state.spec = encoding_from_json(j.at("encoding"));
    const int M = state.spec.modes_per_photon();
    state.amp.resize(M, M);
    const auto& amp = j.at("amp");
    for (int i = 0; i < M; ++i)
        for (int jj = 0; jj < M; ++jj) state.amp(i, jj) = complex_from_json(amp.at(i).at(jj));
    state.validate();
    return state;
}

json table_to_json(const CoincidenceTable& table) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < table.counts.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index jj = 0; jj < table.counts.cols(); ++jj) row.push_back(table.counts(i, jj));
        rows.push_back(std::move(row));
    }
    return json{{"schema", kSchemaVersion}, {"total", table.total}, {"seed", table.seed}, {"counts", rows}};
}

CoincidenceTable table_from_json(const json& j) {
    require_schema(j);
    CoincidenceTable table;
    const auto& rows = j.at("counts");
    const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index nc = nr > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    table.counts.resize(nr, nc);
    for (Eigen::Index i = 0; i < nr; ++i)
        for (Eigen::Index jj = 0; jj < nc; ++jj) table.counts(i, jj) = rows.at(i).at(jj).get<std::int64_t>();
    table.total = j.at("total").get<std::int64_t>();
    table.seed = j.at("seed").get<std::uint64_t>();
    if (table.counts.sum() != table.total)
        throw std::runtime_error("table_from_json: counts do not sum to total");
    return table;
}

std::string table_to_csv(const CoincidenceTable& table) {
    std::string out = "row,col,count\n";
    for (Eigen::Index i = 0; i < table.counts.rows(); ++i)
        for (Eigen::Index jj = 0; jj < table.counts.cols(); ++jj)
            out += std::to_string(i) + "," + std::to_string(jj) + "," +
                   std::to_string(table.counts(i, jj)) + "\n";
    return out;
}

json circuit_to_json(const CompiledCircuit& circuit) {
    json pairing = json::array();
    for (const auto& [a, b] : circuit.pairing) pairing.push_back(json::array({a, b}));
    return json{{"schema", kSchemaVersion},
                {"pairing", pairing},
                {"phases_a", circuit.phases_a},
                {"phases_b", circuit.phases_b},
                {"perm_a", circuit.perm_a},
                {"perm_b", circuit.perm_b},
                {"frame_ops", circuit.frame_ops}};
}

json witness_to_json(const WitnessReport& report) {
    json terms = json::array();
    for (const auto& t : report.per_term)
        terms.push_back(json{{"label", t.label}, {"value", complex_to_json(t.value)}, {"std", t.std_dev}});
    return json{{"schema", kSchemaVersion},
                {"value", report.value},
                {"std_dev", report.std_dev},
                {"imag_residual", report.imag_residual},
                {"mode", report.setting_used == WitnessMode::exact ? "exact" : "two_mub_counts"},
                {"per_term", terms}};
}

std::string witness_terms_csv(const WitnessReport& report) {
    std::string out = "label,re,im,std\n";
    for (const auto& t : report.per_term)
        out += t.label + "," + format_double(t.value.real()) + "," + format_double(t.value.imag()) +
               "," + format_double(t.std_dev) + "\n";
    return out;
}

json pattern_to_json(const MeasurementPattern& pattern) {
    json qubits = json::array();
    for (const auto& q : pattern.qubits) {
        json entry{{"basis", q.basis == MeasBasis::Z ? "Z" : "EQ"}};
        if (q.basis == MeasBasis::Equatorial) {
            entry["angle"] = q.angle;
            entry["deps"] = q.deps;
            entry["base_sign"] = q.base_sign;
        }
        qubits.push_back(std::move(entry));
    }
    return json{{"schema", kSchemaVersion}, {"qubits", qubits}};
}

MeasurementPattern pattern_from_json(const json& j) {
    require_schema(j);
    std::vector<PatternQubit> qubits;
    for (const auto& entry : j.at("qubits")) {
        PatternQubit q;
        const std::string basis = entry.at("basis").get<std::string>();
        if (basis == "Z") {
            q.basis = MeasBasis::Z;
        } else if (basis == "EQ") {
            q.basis = MeasBasis::Equatorial;
            q.angle = entry.at("angle").get<double>();
            if (entry.contains("deps")) q.deps = entry.at("deps").get<std::vector<int>>();
            if (entry.contains("base_sign")) q.base_sign = entry.at("base_sign").get<int>();
        } else {
            throw std::runtime_error("pattern_from_json: basis must be Z or EQ");
        }
        qubits.push_back(std::move(q));
    }
    return MeasurementPattern::make(std::move(qubits));
}

json dependency_to_json(const DependencyGraph& dep) {
    json cones = json::object();
    for (int q = 0; q < dep.size(); ++q)
        if (!dep.cone(q).empty()) cones[std::to_string(q)] = dep.cone(q);
    return json{{"schema", kSchemaVersion}, {"qubits", dep.size()}, {"forward_cones", cones}};
}

DependencyGraph dependency_from_json(const json& j) {
    require_schema(j);
    std::map<int, std::set<int>> cones;
    if (j.contains("forward_cones"))
        for (const auto& [key, value] : j.at("forward_cones").items())
            cones[std::stoi(key)] = value.get<std::set<int>>();
    return DependencyGraph::make(j.at("qubits").get<int>(), cones);
}

json allocation_to_json(const PhotonAllocation& alloc) {
    return json{{"schema", kSchemaVersion}, {"photon_of", alloc.photon_of}};
}

PhotonAllocation allocation_from_json(const json& j) {
    require_schema(j);
    return PhotonAllocation::make(j.at("photon_of").get<std::vector<int>>());
}

json schedule_to_json(const Schedule& schedule) {
    return json{{"schema", kSchemaVersion},
                {"kind", schedule.kind == ScheduleKind::qubit ? "qubit" : "photon"},
                {"rounds", schedule.rounds}};
}

std::string schedule_to_dot(const Schedule& schedule, const DependencyGraph& dep,
                            const PhotonAllocation* alloc) {
    std::ostringstream out;
    const bool photons = schedule.kind == ScheduleKind::photon;
    out << "digraph rounds {\n  rankdir=TB;\n";
    for (size_t t = 0; t < schedule.rounds.size(); ++t) {
        out << "  { rank=same;";
        for (int v : schedule.rounds[t]) out << " " << (photons ? "p" : "q") << v << ";";
        out << " }\n";
    }
    if (photons && alloc) {
        const auto cones = photon_forward_cones(dep, *alloc);
        for (size_t p = 0; p < cones.size(); ++p)
            for (int q : cones[p]) out << "  p" << p << " -> p" << q << ";\n";
    } else if (!photons) {
        for (int q = 0; q < dep.size(); ++q)
            for (int r : dep.cone(q)) out << "  q" << q << " -> q" << r << ";\n";
    }
    out << "}\n";
    return out.str();
}

void write_mask_bundle(const std::string& prefix, const PlaneStack& stack, bool previews) {
    const auto& g = stack.geom;
    json header{{"schema", kSchemaVersion},
                {"rows", g.rows},
                {"cols", g.cols},
                {"planes", stack.planes()},
                {"pitch_um", g.pitch_um},
                {"wavelength_nm", g.wavelength_nm},
                {"plane_spacing_mm", g.plane_spacing_mm},
                {"final_distance_mm", g.final_distance_mm},
                {"angle_cap", g.angle_cap},
                {"data_file", prefix + ".f64"}};
    write_text_file(prefix + ".json", header.dump(2) + "\n");
    std::ofstream raw(prefix + ".f64", std::ios::binary);
    if (!raw) throw std::runtime_error("write_mask_bundle: cannot open " + prefix + ".f64");
    for (const auto& mask : stack.masks)
        for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) {
                const double v = mask(r, c);
                raw.write(reinterpret_cast<const char*>(&v), sizeof(double));
            }
    if (previews)
        for (int p = 0; p < stack.planes(); ++p)
            write_text_file(prefix + "_p" + std::to_string(p) + ".pgm", mask_to_pgm(stack.masks[p]));
}

PlaneStack read_mask_bundle(const std::string& prefix) {
    const json header = json::parse(read_text_file(prefix + ".json"));
    require_schema(header);
    PlaneStack stack;
    stack.geom.rows = header.at("rows").get<int>();
    stack.geom.cols = header.at("cols").get<int>();
    stack.geom.pitch_um = header.at("pitch_um").get<double>();
    stack.geom.wavelength_nm = header.at("wavelength_nm").get<double>();
    stack.geom.plane_spacing_mm = header.at("plane_spacing_mm").get<double>();
    stack.geom.final_distance_mm = header.at("final_distance_mm").get<double>();
    stack.geom.angle_cap = header.at("angle_cap").get<double>();
    const int planes = header.at("planes").get<int>();
    std::ifstream raw(prefix + ".f64", std::ios::binary);
    if (!raw) throw std::runtime_error("read_mask_bundle: cannot open " + prefix + ".f64");
    for (int p = 0; p < planes; ++p) {
        Eigen::ArrayXXd mask(stack.geom.rows, stack.geom.cols);
        for (int r = 0; r < stack.geom.rows; ++r)
            for (int c = 0; c < stack.geom.cols; ++c) {
                double v = 0;
                raw.read(reinterpret_cast<char*>(&v), sizeof(double));
                if (!raw) throw std::runtime_error("read_mask_bundle: truncated data file");
                mask(r, c) = v;
            }
        stack.masks.push_back(std::move(mask));
    }
    return stack;
}

std::string mask_to_pgm(const Eigen::ArrayXXd& mask) {
    std::ostringstream out;
    out << "P2\n" << mask.cols() << " " << mask.rows() << "\n255\n";
    for (Eigen::Index r = 0; r < mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < mask.cols(); ++c) {
            double wrapped = std::fmod(mask(r, c) + kPi, 2 * kPi);
            if (wrapped < 0) wrapped += 2 * kPi;
            const int level = std::min(255, std::max(0, static_cast<int>(wrapped / (2 * kPi) * 255.0 + 0.5)));
            out << level << (c + 1 == mask.cols() ? "" : " ");
        }
        out << "\n";
    }
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace hdmbqc
