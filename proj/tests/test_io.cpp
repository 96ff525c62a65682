#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "hdmbqc/presets.hpp"

using namespace hdmbqc;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("hdmbqc_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("encoding round trip") {
    const auto spec = EncodingSpec::make(5, 2, ApertureGrid{5, 10, 300, 100});
    const auto back = encoding_from_json(encoding_to_json(spec));
    CHECK(back.d == 5);
    CHECK(back.N == 2);
    CHECK(back.grid.rows == 5);
    CHECK(back.grid.cols == 10);
    CHECK(back.modes_per_photon() == 25);
}

TEST_CASE("graph round trip keeps edges, allocation and frames") {
    const auto g = canonical_cluster8();
    const auto back = graph_from_json(graph_to_json(g));
    CHECK(back.d == g.d);
    CHECK(back.n_vertices == g.n_vertices);
    CHECK(back.allocation == g.allocation);
    CHECK(back.fourier_frame == g.fourier_frame);
    REQUIRE(back.edges.size() == g.edges.size());
    for (size_t i = 0; i < g.edges.size(); ++i) {
        CHECK(back.edges[i].u == g.edges[i].u);
        CHECK(back.edges[i].v == g.edges[i].v);
        CHECK(back.edges[i].weight == g.edges[i].weight);
    }
}

TEST_CASE("state and table round trips") {
    const auto g = canonical_qudit5();
    const auto spec = spec_for_graph(g);
    const auto state = simulate_cluster(g, spec);
    const auto state_back = state_from_json(state_to_json(state));
    CHECK((state_back.amp - state.amp).cwiseAbs().maxCoeff() < 1e-15);

    const auto table = sample_counts(coincidence_probs(state), 5000, 3);
    const auto table_back = table_from_json(table_to_json(table));
    CHECK(table_back.total == table.total);
    CHECK((table_back.counts - table.counts).cwiseAbs().sum() == 0);

    const auto csv = table_to_csv(table);
    CHECK(csv.rfind("row,col,count\n", 0) == 0);
}

TEST_CASE("pattern round trip") {
    const auto pattern = rotation_pattern(0.3, -0.7, 1.1);
    const auto back = pattern_from_json(pattern_to_json(pattern));
    REQUIRE(back.size() == 4);
    for (int j = 0; j < 4; ++j) {
        CHECK(back.qubits[j].basis == pattern.qubits[j].basis);
        CHECK(back.qubits[j].angle == pattern.qubits[j].angle);
        CHECK(back.qubits[j].deps == pattern.qubits[j].deps);
        CHECK(back.qubits[j].base_sign == pattern.qubits[j].base_sign);
    }
}

TEST_CASE("scheduler round trips and dot export") {
    const auto dep = rotation_dependency();
    const auto back = dependency_from_json(dependency_to_json(dep));
    CHECK(back.size() == dep.size());
    for (int q = 0; q < dep.size(); ++q) CHECK(back.cone(q) == dep.cone(q));

    const auto alloc = rotation_allocation();
    const auto alloc_back = allocation_from_json(allocation_to_json(alloc));
    CHECK(alloc_back.photon_of == alloc.photon_of);

    const auto schedule = photon_rounds(dep, alloc);
    const auto dot = schedule_to_dot(schedule, dep, &alloc);
    CHECK(dot.find("rank=same") != std::string::npos);
    CHECK(dot.find("p0 -> p1") != std::string::npos);
}

TEST_CASE("mask bundle round trip") {
    const auto dir = temp_dir("masks");
    PlaneStack stack;
    stack.geom.rows = 8;
    stack.geom.cols = 12;
    for (int p = 0; p < 3; ++p) {
        Eigen::ArrayXXd mask(8, 12);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 12; ++c) mask(r, c) = std::sin(0.3 * r + 0.7 * c + p);
        stack.masks.push_back(mask);
    }
    const std::string prefix = (dir / "bundle").string();
    write_mask_bundle(prefix, stack);
    const auto back = read_mask_bundle(prefix);
    REQUIRE(back.planes() == 3);
    for (int p = 0; p < 3; ++p)
        CHECK((back.masks[p] - stack.masks[p]).abs().maxCoeff() == 0.0);
    CHECK(std::filesystem::exists(prefix + "_p0.pgm"));
    const auto pgm = read_text_file(prefix + "_p0.pgm");
    CHECK(pgm.rfind("P2\n12 8\n255\n", 0) == 0);
}

TEST_CASE("cluster preset pipeline summary and determinism") {
    ExperimentPreset preset;
    preset.name = "cluster8";
    preset.kind = PresetKind::cluster;
    preset.graph = canonical_cluster8();
    preset.noise.mean_counts = 5000;
    preset.noise.seed = 11;

    const auto dir1 = temp_dir("preset1");
    const auto dir2 = temp_dir("preset2");
    RunOptions opts1{dir1.string(), std::nullopt, false, 50};
    RunOptions opts2{dir2.string(), std::nullopt, false, 50};
    std::ostringstream log1, log2;
    CHECK(run_preset(preset, opts1, log1) == 0);
    CHECK(run_preset(preset, opts2, log2) == 0);
    CHECK(log1.str() == log2.str());
    CHECK(log1.str().find("witness -1.000") != std::string::npos);

    for (const char* name : {"cluster8_witness_exact_terms.csv", "cluster8_counts_setting1.csv",
                             "cluster8_witness_counts_terms.csv"}) {
        const auto a = read_text_file((dir1 / name).string());
        const auto b = read_text_file((dir2 / name).string());
        CHECK(a == b);
    }
}

TEST_CASE("qudit preset with white noise reports a negative witness with an error bar") {
    ExperimentPreset preset;
    preset.name = "qudit5";
    preset.kind = PresetKind::cluster;
    preset.graph = canonical_qudit5();
    preset.noise.white_noise = 0.1;
    preset.noise.mean_counts = 1e4;
    preset.noise.seed = 21;

    const auto dir = temp_dir("qudit");
    RunOptions opts{dir.string(), std::nullopt, false, 200};
    std::ostringstream log;
    CHECK(run_preset(preset, opts, log) == 0);
    const auto report = json::parse(read_text_file((dir / "qudit5_witness_counts.json").string()));
    const double value = report.at("value").get<double>();
    const double std_dev = report.at("std_dev").get<double>();
    CHECK(value < 0.0);
    CHECK(std_dev > 0.0);
    // expectation for the mixture sits near -0.76
    CHECK(std::abs(value - (-0.76)) < 10.0 * std_dev + 0.05);
}

TEST_CASE("rotation sweep rows match the analytic expectations") {
    ExperimentPreset preset;
    preset.name = "rot";
    preset.kind = PresetKind::rotation_sweep;
    preset.sweep.alpha_steps = 8;
    preset.sweep.beta_steps = 8;
    const auto dir = temp_dir("sweep");
    RunOptions opts{dir.string(), std::nullopt, false, 0};
    std::ostringstream log;
    CHECK(run_rotation_sweep(preset, opts, log) == 0);
    std::istringstream csv(read_text_file((dir / "rot_sweep.csv").string()));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "alpha,beta,exp_z_xrot,exp_y_zrot");
    int rows = 0;
    while (std::getline(csv, line)) {
        double alpha, beta, exp_z, exp_y;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &alpha, &beta, &exp_z, &exp_y) == 4);
        CHECK(exp_z == doctest::Approx(std::sin(alpha)).epsilon(1e-9));
        CHECK(exp_y == doctest::Approx(std::sin(beta)).epsilon(1e-9));
        ++rows;
    }
    CHECK(rows == 64);
}

TEST_CASE("schedule preset summary") {
    ExperimentPreset preset;
    preset.name = "rotation";
    preset.kind = PresetKind::schedule;
    const auto dir = temp_dir("schedule");
    RunOptions opts{dir.string(), std::nullopt, false, 0};
    std::ostringstream log;
    CHECK(run_schedule(preset, opts, log) == 0);
    CHECK(log.str().find("4 qubit rounds vs 2 photon rounds") != std::string::npos);
}

TEST_CASE("preset files in the repository load and dispatch") {
    const std::string preset_dir = HDMBQC_PRESET_DIR;
    for (const char* name : {"cluster8.json", "qudit5.json", "rotation-sweep.json",
                             "schedule-rotation.json", "mplc-splitter.json",
                             "mplc-reconstruct.json"}) {
        const auto preset = load_preset(preset_dir + "/" + name);
        CHECK_FALSE(preset.name.empty());
    }
    const auto cluster = load_preset(preset_dir + "/cluster8.json");
    REQUIRE(cluster.graph.has_value());
    CHECK(cluster.graph->n_vertices == 8);
    CHECK(check_two_photon_realizable(*cluster.graph).realizable);
}

TEST_CASE("cli binary: exit codes and metrics output") {
    const std::string cli = HDMBQC_CLI_PATH;
    const std::string preset_dir = HDMBQC_PRESET_DIR;
    const auto dir = temp_dir("cli");

    auto run_cmd = [](const std::string& cmd) { return std::system(cmd.c_str()); };
    const int ok = run_cmd(cli + " metrics --dim 625 --rate 100 > " + (dir / "metrics.txt").string());
    CHECK(ok == 0);
    const auto metrics = read_text_file((dir / "metrics.txt").string());
    CHECK(metrics.find("62500") != std::string::npos);
    CHECK(metrics.find("9.28") != std::string::npos);

    const int witness_rc = run_cmd(cli + " witness --preset " + preset_dir +
                                   "/qudit5.json --exact-only -o " + dir.string() + " > " +
                                   (dir / "witness.txt").string());
    CHECK(witness_rc == 0);
    CHECK(read_text_file((dir / "witness.txt").string()).find("-1.000") != std::string::npos);

    // invalid preset path surfaces as a nonzero exit
    const int bad = run_cmd(cli + " witness --preset /nonexistent.json 2> /dev/null");
    CHECK(bad != 0);
}
