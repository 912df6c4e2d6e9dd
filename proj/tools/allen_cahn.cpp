#include "allen_cahn/acceptance.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

using ac::ExperimentConfig;
using ac::Json;

struct Overrides {
    std::string config_file;
    std::string geometry, interface, sigma, method, output_dir;
    int n1 = 0, n2 = 0, max_iter = 0, spectrum_k = 0;
    double size1 = 0, size2 = 0, tau = 0, eps = 0, delta_star = 0, alpha = 0, tol_fp = 0, relaxation = 0,
           newton_tol = 0;
    std::vector<double> eps_list;
    std::vector<double> bump_center;
    double bump_radius = 0, bump_amplitude = 0;
    bool record_timing = false;
};

void add_config_flags(CLI::App& app, Overrides& o) {
    app.add_option("--config", o.config_file, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--geometry", o.geometry, "circle | torus | sphere");
    app.add_option("--interface", o.interface, "antipodal_pair | meridian_pair | equator")->expected(0, 1);
    app.add_option("--n1", o.n1, "first grid dimension (theta rows on the sphere)");
    app.add_option("--n2", o.n2, "second grid dimension");
    app.add_option("--size1", o.size1, "first period (circle length, torus x period)");
    app.add_option("--size2", o.size2, "torus y period");
    app.add_option("--tau", o.tau, "Fermi tube half width");
    app.add_option("--eps", o.eps, "transition width");
    app.add_option("--eps-list", o.eps_list, "sweep values")->expected(0, -1);
    app.add_option("--delta-star", o.delta_star, "cutoff exponent");
    app.add_option("--alpha", o.alpha, "Holder exponent weight");
    app.add_option("--sigma-convention", o.sigma, "energy | well");
    app.add_option("--tol-fp", o.tol_fp, "fixed-point tolerance (scaled by eps^2)");
    app.add_option("--max-iter", o.max_iter, "fixed-point iteration cap");
    app.add_option("--relaxation", o.relaxation, "fixed-point relaxation factor");
    app.add_option("--newton-tol", o.newton_tol, "Newton residual tolerance");
    app.add_option("--method", o.method, "ls | newton | both");
    app.add_option("--spectrum-k", o.spectrum_k, "number of eigenpairs");
    app.add_option("--output-dir", o.output_dir, "directory for CSV and SVG output");
    app.add_option("--bump-center", o.bump_center, "perturbation center (3 numbers)")->expected(3);
    app.add_option("--bump-radius", o.bump_radius, "perturbation cap radius");
    app.add_option("--bump-amplitude", o.bump_amplitude, "perturbation amplitude");
    app.add_flag("--record-timing", o.record_timing, "store wall time in reports");
}

ExperimentConfig resolve(const CLI::App& app, const Overrides& o, bool need_perturbation = false) {
    ExperimentConfig c;
    if (!o.config_file.empty()) {
        std::ifstream f(o.config_file);
        c = ac::config_from_json(Json::parse(f));
    }
    const auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--geometry")) c.geometry = o.geometry;
    if (given("--interface") && !o.interface.empty()) c.interface = o.interface;
    if (given("--n1")) c.n1 = o.n1;
    if (given("--n2")) c.n2 = o.n2;
    if (given("--size1")) c.size1 = o.size1;
    if (given("--size2")) c.size2 = o.size2;
    if (given("--tau")) c.tau = o.tau;
    if (given("--eps")) c.eps = o.eps;
    if (given("--eps-list")) c.eps_list = o.eps_list;
    if (given("--delta-star")) c.delta_star = o.delta_star;
    if (given("--alpha")) c.alpha = o.alpha;
    if (given("--sigma-convention")) c.sigma_convention = o.sigma;
    if (given("--tol-fp")) c.tol_fp = o.tol_fp;
    if (given("--max-iter")) c.max_iter = o.max_iter;
    if (given("--relaxation")) c.relaxation = o.relaxation;
    if (given("--newton-tol")) c.newton_tol = o.newton_tol;
    if (given("--method")) c.method = o.method;
    if (given("--spectrum-k")) c.spectrum_k = o.spectrum_k;
    if (given("--output-dir")) c.output_dir = o.output_dir;
    if (given("--record-timing")) c.record_timing = o.record_timing;
    if (need_perturbation || given("--bump-center") || given("--bump-radius") || given("--bump-amplitude")) {
        ac::PerturbationSpec p = c.perturbation.value_or(ac::PerturbationSpec{});
        if (given("--bump-center")) p.center = {o.bump_center[0], o.bump_center[1], o.bump_center[2]};
        if (given("--bump-radius")) p.radius = o.bump_radius;
        if (given("--bump-amplitude")) p.amplitude = o.bump_amplitude;
        c.perturbation = p;
    }
    c.finalize();
    return c;
}

int finish(const Json& j) {
    std::cout << ac::dump(j);
    return j.value("passed", false) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Allen-Cahn transition layers on closed manifolds"};
    app.require_subcommand(1);

    Overrides o;
    auto* profile = app.add_subcommand("profile", "heteroclinic profile and transition constants");
    add_config_flags(*profile, o);

    auto* geometry = app.add_subcommand("geometry", "grid metadata and invariant residuals");
    add_config_flags(*geometry, o);

    auto* solve = app.add_subcommand("solve", "solve at one eps and report");
    add_config_flags(*solve, o);
    bool dump_fields = false, plots = false;
    solve->add_flag("--dump-fields", dump_fields, "write fields.csv (node coordinates, u, residual)");
    solve->add_flag("--plots", plots, "write the three SVG plots");

    auto* spectrum = app.add_subcommand("spectrum", "linearized spectrum at the solution");
    add_config_flags(*spectrum, o);
    bool modes = false;
    spectrum->add_flag("--modes", modes, "write modes.csv with the eigenfunctions");

    auto* sweep = app.add_subcommand("sweep", "solve over the eps list; JSON, CSV and SVG output");
    add_config_flags(*sweep, o);

    auto* verify = app.add_subcommand("verify", "run the numbered acceptance checks");
    std::vector<int> only;
    bool quick = false;
    verify->add_option("--only", only, "criterion numbers")->check(CLI::Range(1, ac::kCriterionCount));
    verify->add_flag("--quick", quick, "criteria 1-5 and 10");

    auto* perturb = app.add_subcommand("perturb", "solve under a conformal bump away from the interface");
    add_config_flags(*perturb, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*profile) {
            (void)resolve(*profile, o);
            return finish(ac::profile_report(ac::heteroclinic(ac::DoubleWell::quartic())));
        }
        if (*geometry) {
            // a bare --interface uses the default interface; either form adds the Jacobi classification
            const ExperimentConfig c = resolve(*geometry, o);
            const bool details = geometry->count("--interface") > 0;
            return finish(ac::geometry_report(ac::make_setup(c), details));
        }
        if (*solve) {
            const ExperimentConfig c = resolve(*solve, o);
            const ac::Setup s = ac::make_setup(c);
            const ac::SolveReport r = ac::solve_report(s, c, c.eps);
            if (dump_fields)
                ac::write_file(c.output_dir + "/fields.csv",
                               ac::node_table(s.g, {{"u", &r.u}, {"residual", &r.pde_residual}}));
            if (plots) ac::emit_plots({r}, s, c.output_dir);
            return finish(r.json);
        }
        if (*spectrum) {
            const ExperimentConfig c = resolve(*spectrum, o);
            const ac::Setup s = ac::make_setup(c);
            const ac::SolveReport r = ac::solve_report(s, c, c.eps);
            Json j = r.json["spectrum"];
            j["schema"] = "allen_cahn.spectrum_report";
            j["schema_version"] = ac::kReportSchemaVersion;
            j["eps"] = c.eps;
            j["solution_converged"] = r.converged;
            j["passed"] = r.converged && r.gates.at("spectrum_certified");
            if (modes) {
                std::vector<ac::ScalarField> cols;
                for (int i = 0; i < r.spectrum.eigenvectors.cols(); ++i) cols.push_back(r.spectrum.eigenvectors.col(i));
                std::vector<std::pair<std::string, const ac::ScalarField*>> named{{"u", &r.u}};
                for (std::size_t i = 0; i < cols.size(); ++i) named.emplace_back("mode" + std::to_string(i), &cols[i]);
                ac::write_file(c.output_dir + "/modes.csv", ac::node_table(s.g, named));
            }
            return finish(j);
        }
        if (*sweep) {
            const ExperimentConfig c = resolve(*sweep, o);
            const ac::SweepResult r = ac::run_sweep(c);
            ac::write_file(c.output_dir + "/sweep.json", ac::dump(r.json));
            ac::write_file(c.output_dir + "/sweep.csv", r.csv);
            if (!r.reports.empty()) ac::emit_plots(r.reports, ac::make_setup(c), c.output_dir);
            std::cout << r.csv;
            return r.passed ? 0 : 1;
        }
        if (*verify) {
            if (quick && only.empty()) only = {1, 2, 3, 4, 5, 10};
            bool all = true;
            for (int id : only.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10} : only) {
                const ac::CriterionResult r = ac::run_criterion(id);
                std::cout << ac::format_line(r) << std::endl;
                all = all && r.pass;
            }
            return all ? 0 : 1;
        }
        if (*perturb) {
            const ExperimentConfig c = resolve(*perturb, o, true);
            return finish(ac::perturbed_metric_experiment(c).json);
        }
    } catch (const ac::rejected& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
