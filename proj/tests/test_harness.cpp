#include "allen_cahn/harness.hpp"

#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace ac;

namespace {

ExperimentConfig circle_config() {
    ExperimentConfig c;
    c.geometry = "circle";
    c.n1 = 256;
    c.eps = 0.2;
    c.finalize();
    return c;
}

ExperimentConfig small_sphere() {
    ExperimentConfig c;
    c.n1 = 48;
    c.eps = 0.3;
    c.finalize();
    return c;
}

std::vector<std::string> key_paths(const Json& j, const std::string& prefix, int depth) {
    std::vector<std::string> out;
    if (!j.is_object()) return out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string p = prefix.empty() ? it.key() : prefix + "." + it.key();
        out.push_back(p);
        if (depth > 1)
            for (auto& q : key_paths(it.value(), p, depth - 1)) out.push_back(q);
    }
    return out;
}

std::string read(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count(const std::string& text, const std::string& needle) {
    int n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("config defaults per geometry") {
    ExperimentConfig s;
    s.finalize();
    CHECK(s.n1 == 96);
    CHECK(s.n2 == 192);
    CHECK(s.interface == "equator");
    ExperimentConfig t;
    t.geometry = "torus";
    t.finalize();
    CHECK(t.n1 == 128);
    CHECK(t.n2 == 64);
    CHECK(t.interface == "meridian_pair");
    CHECK(t.size1 == doctest::Approx(2 * test::pi));
    ExperimentConfig c = circle_config();
    CHECK(c.interface == "antipodal_pair");
}

TEST_CASE("config rejections") {
    const auto bad = [](auto edit) {
        ExperimentConfig c;
        edit(c);
        c.finalize();
        const Setup s = make_setup(c);
        c.check_eps(c.eps, s.g.spacing());
    };
    CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.method = "gradient"; }), rejected);
    CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.sigma_convention = "half"; }), rejected);
    CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.eps = 0.05; }), rejected);
    CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.eps = 1.5; }), rejected);
    CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.delta_star = 1.0; }), rejected);
    CHECK_THROWS_AS(bad([](ExperimentConfig& c) {
                        c.geometry = "torus";
                        c.perturbation = PerturbationSpec{};
                    }),
                    rejected);
    CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.perturbation = PerturbationSpec{{0, 0, 1}, 0.45, 0.3}; }),
                    rejected);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"eps": 0.2, "epsilon": 0.1})")), rejected);
    // a cap reaching into the tube band
    ExperimentConfig c;
    c.finalize();
    const Setup s = make_setup(c);
    CHECK_THROWS_AS(perturbation_field(s.g, s.geo, PerturbationSpec{{1, 0, 0}, 0.45, 0.1}), rejected);
    CHECK_NOTHROW(perturbation_field(s.g, s.geo, PerturbationSpec{}));
}

TEST_CASE("config survives a JSON round trip") {
    test::forall(20, 51, [](test::Gen& gen, int i) {
        ExperimentConfig c;
        c.geometry = i % 2 ? "sphere" : "torus";
        c.eps = gen.uniform(0.1, 0.9);
        c.eps_list = {gen.uniform(0.1, 0.5), gen.uniform(0.1, 0.5)};
        c.alpha = gen.uniform(0.01, 0.2);
        c.max_iter = gen.integer(1, 100);
        c.method = i % 3 == 0 ? "ls" : "both";
        if (i % 2) c.perturbation = PerturbationSpec{{0, 0, -1}, gen.uniform(0.1, 0.4), gen.uniform(-0.2, 0.2)};
        const Json j = config_to_json(c);
        const ExperimentConfig back = config_from_json(Json::parse(j.dump()));
        CHECK(config_to_json(back) == j);
    });
}

TEST_CASE("solve report is deterministic and matches the golden key set") {
    const ExperimentConfig c = circle_config();
    const Setup s = make_setup(c);
    const SolveReport a = solve_report(s, c, c.eps);
    const SolveReport b = solve_report(s, c, c.eps);
    CHECK(dump(a.json) == dump(b.json));
    CHECK(a.json["wall_time"].is_null());
    CHECK(a.json["schema"] == "allen_cahn.solve_report");
    CHECK(a.json["schema_version"] == kReportSchemaVersion);
    CHECK(a.gates.at("newton_converged"));
    CHECK(a.gates.at("pde_residual"));
    CHECK(a.gates.at("ls_newton_agreement"));
    CHECK(a.m == 0);
    CHECK(a.n == 2);

    std::set<std::string> expected;
    std::istringstream golden(read(std::filesystem::path(AC_GOLDEN_DIR) / "solve_report_keys.txt"));
    for (std::string line; std::getline(golden, line);)
        if (!line.empty()) expected.insert(line);
    const auto got = key_paths(a.json, "", 2);
    CHECK(std::set<std::string>(got.begin(), got.end()) == expected);
}

TEST_CASE("empty sweep yields a header-only table") {
    ExperimentConfig c = circle_config();
    c.eps_list.clear();
    const SweepResult r = run_sweep(c);
    CHECK(r.passed);
    CHECK(r.reports.empty());
    CHECK(r.csv == std::string(kSweepColumns) + "\n");
    CHECK(r.json["schema"] == "allen_cahn.sweep_report");
}

TEST_CASE("sweep table, plots and sigma adjudication") {
    ExperimentConfig c = circle_config();
    c.eps_list = {0.3, 0.2, 0.15};
    c.method = "newton";
    const SweepResult r = run_sweep(c);
    REQUIRE(r.reports.size() == 3);
    std::istringstream lines(r.csv);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == kSweepColumns);
    int rows = 0;
    while (std::getline(lines, row)) {
        CHECK(count(row, ",") == count(header, ","));
        ++rows;
    }
    CHECK(rows == 3);

    const Setup s = make_setup(c);
    const Json adj = sigma_adjudication(s.h, r.reports);
    CHECK(adj["factor_is_two"] == true);
    CHECK(adj["limit_convention"] == "energy");

    const auto dir = std::filesystem::temp_directory_path() / "allen_cahn_plot_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto paths = emit_plots(r.reports, s, dir.string());
    CHECK(paths.size() == 3);
    for (const auto& p : paths) {
        const std::string text = read(p);
        CHECK(text.rfind("<svg", 0) == 0);
        CHECK(text.find("</svg>") != std::string::npos);
    }
    CHECK(count(read(dir / "energy_curve.svg"), "class=\"marker\"") == 3);
    CHECK_THROWS(emit_plots({}, s, dir.string()));
}

TEST_CASE("nodal contour of a well is empty but well formed") {
    const ManifoldGrid g = ManifoldGrid::sphere(16, 32);
    const std::string svg = nodal_contour_svg(g, ScalarField::Ones(g.size()));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("d=\"\"") != std::string::npos);
}

TEST_CASE("nodal distance of an exact sign change") {
    const ManifoldGrid g = ManifoldGrid::sphere(48, 96);
    const InterfaceGeometry geo = InterfaceGeometry::build(g, InterfaceKind::equator);
    ScalarField u(g.size());
    for (int i = 0; i < g.size(); ++i) u[i] = std::sin(test::pi / 2 - g.coord1(i));
    const NodalReport r = nodal_distance(g, geo, u);
    CHECK(r.hausdorff <= 1e-3);
    CHECK(r.crossings == 96);
    for (int i = 0; i < g.size(); ++i) u[i] = std::sin(test::pi / 2 - g.coord1(i) - 0.1);
    CHECK(nodal_distance(g, geo, u).hausdorff == doctest::Approx(0.1).epsilon(1e-2));
}

TEST_CASE("a zero perturbation reproduces the unperturbed report") {
    ExperimentConfig c = small_sphere();
    c.perturbation = PerturbationSpec{{0, 0, 1}, 0.45, 0.0};
    c.finalize();
    const SolveReport p = perturbed_metric_experiment(c);
    const SolveReport u = solve_report(make_setup(c), c, c.eps);
    Json pj = p.json;
    CHECK(pj["perturbation"]["jacobi_unchanged"] == true);
    CHECK(pj["perturbation"]["max_rho"] == 0.0);
    pj.erase("perturbation");
    pj["gates"].erase("jacobi_unchanged");
    CHECK(dump(pj) == dump(u.json));
}

TEST_CASE("profile and geometry reports") {
    const Json p = profile_report(heteroclinic(DoubleWell::quartic()));
    CHECK(p["passed"] == true);
    CHECK(p["sigma_factor"].get<double>() == doctest::Approx(2.0));
    ExperimentConfig t;
    t.geometry = "torus";
    t.finalize();
    const Json g = geometry_report(make_setup(t), true);
    CHECK(g["hypothesis"] == "FAIL");
    CHECK(g["nullity"] == 2);
    const Json plain = geometry_report(make_setup(small_sphere()), false);
    CHECK(!plain.contains("jacobi"));
}
