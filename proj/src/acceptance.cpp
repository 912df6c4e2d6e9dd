#include "allen_cahn/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace ac {

namespace {

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Check {
    bool ok = true;
    std::vector<std::string> failures;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            failures.push_back(what);
        }
    }
    std::string detail(const std::string& summary) const {
        if (ok) return summary;
        std::string s = summary + "; failed:";
        for (const auto& f : failures) s += " [" + f + "]";
        return s;
    }
};

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0, sxx = 0;
    for (int i = 0; i < n; ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

ExperimentConfig sphere_config(int n_theta, const std::string& method = "both") {
    ExperimentConfig c;
    c.geometry = "sphere";
    c.n1 = n_theta;
    c.n2 = 2 * n_theta;
    c.method = method;
    c.finalize();
    return c;
}

ExperimentConfig circle_config() {
    ExperimentConfig c;
    c.geometry = "circle";
    c.n1 = 1024;
    c.method = "both";
    c.finalize();
    return c;
}

CriterionResult heteroclinic_oracle() {
    CriterionResult r;
    const Json p = profile_report(heteroclinic(DoubleWell::quartic()));
    Check c;
    c.expect(p["closed_form_error"].get<double>() <= 1e-8, "profile vs tanh");
    c.expect(p["sigma_well_error"].get<double>() <= 1e-9, "sigma_well");
    c.expect(p["sigma_energy_error"].get<double>() <= 1e-9, "sigma_energy");
    c.expect(p["gap"].get<double>() > 0.0, "gap positive");
    c.expect(p["gap_relative_change"].get<double>() <= 0.01, "gap stable under refinement");
    r.pass = c.ok;
    r.detail = c.detail("profile error " + fmt("%.2e", p["closed_form_error"].get<double>()) + ", gap " +
                        fmt("%.6f", p["gap"].get<double>()) + ", gap drift " +
                        fmt("%.2e", p["gap_relative_change"].get<double>()));
    r.data = p;
    return r;
}

/// Random polynomial of degree <= 3 in the embedding coordinates, bounded by one.
ScalarField band_limited(const ManifoldGrid& g, const std::vector<double>& coef) {
    ScalarField u(g.size());
    double total = 0;
    for (double a : coef) total += std::abs(a);
    for (int i = 0; i < g.size(); ++i) {
        const auto x = g.embed(i);
        double v = 0;
        int k = 0;
        for (int a = 0; a <= 3; ++a)
            for (int b = 0; a + b <= 3; ++b)
                for (int d = 0; a + b + d <= 3; ++d)
                    v += coef[k++] * std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], d);
        u[i] = v / total;
    }
    return u;
}

CriterionResult killing_identity() {
    CriterionResult r;
    const DoubleWell w = DoubleWell::quartic();
    const ManifoldGrid coarse = ManifoldGrid::sphere(64, 128), fine = ManifoldGrid::sphere(128, 256);
    const auto kc = killing_fields(coarse), kf = killing_fields(fine);
    const double eps = 0.5;
    std::mt19937 rng(2024);
    std::normal_distribution<double> gauss;
    Check c;
    double worst_order = INFINITY, worst_exact = 0.0;
    int graded = 0;
    Json rows = Json::array();
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> coef(20);
        for (double& a : coef) a = gauss(rng);
        const ScalarField uc = band_limited(coarse, coef), uf = band_limited(fine, coef);
        for (std::size_t f = 0; f < kc.size(); ++f) {
            const double pc = killing_pairing(coarse, w, eps, uc, kc[f].field);
            const double pf = killing_pairing(fine, w, eps, uf, kf[f].field);
            // pairings at round-off level mean the grid carries the symmetry exactly
            if (std::abs(pc) <= 1e-12) {
                worst_exact = std::max(worst_exact, std::abs(pf));
                c.expect(std::abs(pf) <= 1e-12, "exact symmetry lost under refinement");
                continue;
            }
            const double order = std::log2(std::abs(pc) / std::abs(pf));
            worst_order = std::min(worst_order, order);
            ++graded;
            rows.push_back({{"trial", trial}, {"field", kc[f].label}, {"coarse", pc}, {"fine", pf}, {"order", order}});
        }
    }
    c.expect(worst_order >= 1.8, "pairing order " + fmt("%.3f", worst_order));

    ExperimentConfig cfg = sphere_config(64, "newton");
    const Setup s = make_setup(cfg);
    NewtonOptions no;
    const double e = 0.2;
    const NewtonResult nr = newton_solve(s.g, w, e, approximate_solution(s.geo, s.h, e, cutoffs(e, 2.0 / 3.0, s.geo.tau())), no);
    c.expect(nr.converged, "Newton on 64x128");
    double worst_conv = 0.0;
    for (const auto& k : killing_fields(s.g)) worst_conv = std::max(worst_conv, std::abs(killing_pairing(s.g, w, e, nr.u, k.field)));
    c.expect(worst_conv <= 10.0 * no.tol, "converged pairing " + fmt("%.2e", worst_conv));
    r.pass = c.ok;
    r.detail = c.detail("min order " + fmt("%.3f", worst_order) + " over " + std::to_string(graded) +
                        " graded pairings, converged |pairing| " + fmt("%.2e", worst_conv));
    r.data = {{"rows", rows}, {"min_order", worst_order}, {"exact_max", worst_exact}, {"converged_pairing", worst_conv}};
    return r;
}

CriterionResult projected_solver() {
    CriterionResult r;
    const ManifoldGrid g = ManifoldGrid::sphere(256, 512);
    const InterfaceGeometry geo = InterfaceGeometry::build(g, InterfaceKind::equator);
    const JacobiSystem js = jacobi_system(geo);
    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    double worst_c = 0, worst_orth = 0, worst_res = 0;
    for (int trial = 0; trial < 50; ++trial) {
        SurfaceField f(geo.gamma_size());
        for (int i = 0; i < f.size(); ++i) f[i] = gauss(rng);
        f /= std::sqrt(js.dot(f, f));
        const ProjectedSolution p = solve_jacobi_projected(js, f);
        for (int j = 0; j < js.nullity; ++j) {
            const SurfaceField zj = js.kernel.col(j);
            worst_c = std::max(worst_c, std::abs(p.c[j] + js.dot(f, zj)));
            worst_orth = std::max(worst_orth, std::abs(js.dot(p.displacement, zj)));
        }
        worst_res = std::max(worst_res, p.residual);
    }
    Check c;
    c.expect(geo.gamma_size() == 512, "interface node count");
    c.expect(js.nullity == 2, "kernel dimension");
    c.expect(worst_c <= 1e-10, "c against -<f, zhat>");
    c.expect(worst_orth <= 1e-10, "displacement orthogonality");
    c.expect(worst_res <= 1e-10, "residual");
    r.pass = c.ok;
    r.detail = c.detail("|c + <f,zhat>| " + fmt("%.2e", worst_c) + ", |<displacement,zhat>| " + fmt("%.2e", worst_orth) +
                        ", residual " + fmt("%.2e", worst_res));
    r.data = {{"c_error", worst_c}, {"orthogonality", worst_orth}, {"residual", worst_res}};
    return r;
}

CriterionResult jacobi_oracles() {
    CriterionResult r;
    Check c;
    const Setup sphere = make_setup(sphere_config(96));
    c.expect(sphere.js.index == 1 && sphere.js.nullity == 2 && !sphere.js.ambiguous, "sphere equator (1,2)");
    c.expect(sphere.js.hypothesis, "sphere equator hypothesis");
    const LatticeOracle cl = clifford_torus_oracle();
    c.expect(cl.index == 5 && cl.nullity == 4, "Clifford torus (5,4)");
    ExperimentConfig tc;
    tc.geometry = "torus";
    tc.finalize();
    const Setup torus = make_setup(tc);
    c.expect(torus.js.nullity == 2 && torus.js.killing_rank == 1 && !torus.js.hypothesis, "torus violation flag");
    r.pass = c.ok;
    r.detail = c.detail("sphere (" + std::to_string(sphere.js.index) + "," + std::to_string(sphere.js.nullity) +
                        "), Clifford (" + std::to_string(cl.index) + "," + std::to_string(cl.nullity) +
                        "), torus kernel " + std::to_string(torus.js.nullity) + " Killing span " +
                        std::to_string(torus.js.killing_rank) + " hypothesis " +
                        (torus.js.hypothesis ? "holds" : "violated"));
    r.data = {{"sphere", {sphere.js.index, sphere.js.nullity}},
              {"clifford", {cl.index, cl.nullity}},
              {"torus_kernel", torus.js.nullity},
              {"torus_killing_rank", torus.js.killing_rank},
              {"torus_hypothesis", torus.js.hypothesis}};
    return r;
}

CriterionResult circle_end_to_end() {
    CriterionResult r;
    const ExperimentConfig cfg = circle_config();
    const Setup s = make_setup(cfg);
    Check c;
    Json rows = Json::array();
    double final_ratio = 0;
    for (double eps : {0.2, 0.1, 0.05}) {
        const SolveReport rep = solve_report(s, cfg, eps);
        const double gap = rep.json["agreement"]["sup_difference"].get<double>();
        const double tol = rep.json["agreement"]["tolerance"].get<double>();
        const std::string at = " at eps " + fmt("%g", eps);
        c.expect(rep.json["newton"]["converged"].get<bool>(), "Newton" + at);
        c.expect(rep.hausdorff <= rep.h, "nodal points" + at);
        c.expect(gap <= tol, "LS/Newton agreement" + at);
        if (eps == 0.05) {
            final_ratio = rep.ratio_energy;
            c.expect(std::abs(rep.ratio_energy - 1.0) <= 0.01, "energy within 1%");
        }
        rows.push_back({{"eps", eps},
                        {"ratio_energy", rep.ratio_energy},
                        {"hausdorff", rep.hausdorff},
                        {"agreement", gap},
                        {"agreement_tolerance", tol},
                        {"newton_iterations", rep.newton_iterations}});
    }
    r.pass = c.ok;
    r.detail = c.detail("E/(2 sigma_energy) at eps 0.05 = " + fmt("%.5f", final_ratio));
    r.data = rows;
    return r;
}

CriterionResult sphere_end_to_end() {
    CriterionResult r;
    const ExperimentConfig cfg = sphere_config(96);
    const Setup s = make_setup(cfg);
    Check c;
    Json rows = Json::array();
    std::string summary;
    for (double eps : {0.2, 0.15}) {
        const auto t0 = std::chrono::steady_clock::now();
        const SolveReport rep = solve_report(s, cfg, eps);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::string at = " at eps " + fmt("%g", eps);
        const auto& g = rep.gates;
        c.expect(g.at("fixed_point_converged"), "fixed point converged" + at);
        c.expect(g.at("contraction"), "contraction ratios" + at);
        c.expect(g.at("c_vanishing"), "max |c|" + at);
        c.expect(g.at("assembled_identity"), "reduced equation identity" + at);
        c.expect(g.at("nodal_set"), "nodal set" + at);
        c.expect(rep.ratio_energy >= 0.97 && rep.ratio_energy <= 1.03, "energy ratio" + at);
        c.expect(rep.m == 1 && rep.n == 2, "(m,n)" + at);
        c.expect(g.at("spectrum_certified"), "gap certificate" + at);
        c.expect(secs < 600.0, "runtime" + at);
        summary += (summary.empty() ? "" : "; ") + std::string("eps ") + fmt("%g", eps) + ": E ratio " +
                   fmt("%.4f", rep.ratio_energy) + ", max|c| " + fmt("%.1e", rep.max_abs_c) + ", (m,n)=(" +
                   std::to_string(rep.m) + "," + std::to_string(rep.n) + ")";
        rows.push_back({{"eps", eps},
                        {"ratio_energy", rep.ratio_energy},
                        {"max_abs_c", rep.max_abs_c},
                        {"assembled_residual", rep.assembled_residual},
                        {"hausdorff", rep.hausdorff},
                        {"m", rep.m},
                        {"n", rep.n},
                        {"separation", rep.spectrum.separation},
                        {"iterations", rep.iterations},
                        {"max_ratio", rep.json["fixed_point"]["max_ratio"]},
                        {"seconds", secs}});
    }
    r.pass = c.ok;
    r.detail = c.detail(summary);
    r.data = rows;
    return r;
}

CriterionResult scaling_law() {
    CriterionResult r;
    const ExperimentConfig cfg = sphere_config(96, "ls");
    const Setup s = make_setup(cfg);
    std::vector<double> eps_list{0.3, 0.2, 0.15}, n0, state;
    Json rows = Json::array();
    for (double eps : eps_list) {
        const Reduction red(s.g, s.geo, s.js, s.h, eps, cfg.delta_star);
        FixedPointConfig fc;
        fc.tol_fp = cfg.tol_fp;
        fc.initial_relaxation = cfg.relaxation;
        const double nz = red.outer_source(red.zero_state()).cwiseAbs().maxCoeff();
        const FixedPointReport fp = red.fixed_point(fc);
        n0.push_back(nz);
        state.push_back(fp.state.norms.total());
        rows.push_back({{"eps", eps}, {"initial_outer_source_sup", nz}, {"state_norm", fp.state.norms.total()},
                        {"converged", fp.converged}});
    }
    const double sn = slope(eps_list, n0), ss = slope(eps_list, state);
    Check c;
    c.expect(std::abs(sn - 2.0) <= 0.3, "slope of sup outer source at zero " + fmt("%.3f", sn));
    c.expect(std::abs(ss - 2.0) <= 0.3, "slope of state norm " + fmt("%.3f", ss));
    r.pass = c.ok;
    r.detail = c.detail("slopes: outer source " + fmt("%.3f", sn) + ", state " + fmt("%.3f", ss));
    r.data = {{"rows", rows}, {"slope_initial_outer_source", sn}, {"slope_state", ss}};
    return r;
}

CriterionResult varifold() {
    CriterionResult r;
    const ExperimentConfig cfg = sphere_config(128, "newton");
    const Setup s = make_setup(cfg);
    const SolveReport rep = solve_report(s, cfg, 0.1);
    const double unit = rep.json["varifold"]["unit_ratio"].get<double>();
    const double aniso = rep.json["varifold"]["anisotropic_ratio"].get<double>();
    Check c;
    c.expect(rep.converged, "solution");
    c.expect(std::abs(unit - 1.0) <= 0.03, "unit test function");
    c.expect(std::abs(aniso - 1.0) <= 0.03, "anisotropic test function");
    r.pass = c.ok;
    r.detail = c.detail("normalized mass: unit " + fmt("%.4f", unit) + ", anisotropic " + fmt("%.4f", aniso));
    r.data = {{"unit_ratio", unit}, {"anisotropic_ratio", aniso}};
    return r;
}

CriterionResult perturbed_metric() {
    CriterionResult r;
    ExperimentConfig cfg = sphere_config(96);
    cfg.perturbation = PerturbationSpec{};
    cfg.finalize();
    const auto t0 = std::chrono::steady_clock::now();
    const SolveReport rep = perturbed_metric_experiment(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Check c;
    c.expect(rep.converged, "solution found");
    c.expect(rep.gates.at("nodal_set"), "nodal set within 2h");
    c.expect(rep.m == 1 && rep.n == 2, "(m,n) unchanged");
    c.expect(rep.gates.at("jacobi_unchanged"), "Jacobi data unchanged");
    c.expect(secs < 600.0, "runtime");
    r.pass = c.ok;
    r.detail = c.detail("hausdorff " + fmt("%.3e", rep.hausdorff) + " (2h " + fmt("%.3e", 2 * rep.h) + "), (m,n)=(" +
                        std::to_string(rep.m) + "," + std::to_string(rep.n) + ")");
    r.data = {{"hausdorff", rep.hausdorff}, {"m", rep.m}, {"n", rep.n}, {"ratio_energy", rep.ratio_energy}};
    return r;
}

CriterionResult sigma_convention() {
    CriterionResult r;
    ExperimentConfig cfg = circle_config();
    cfg.method = "newton";
    cfg.eps_list = {0.2, 0.1, 0.05};
    const SweepResult sw = run_sweep(cfg);
    const Json& a = sw.json["sigma_adjudication"];
    Check c;
    c.expect(sw.reports.size() == 3, "sweep rows");
    c.expect(a["limit_convention"] == "energy", "limit convention");
    c.expect(a["factor_is_two"].get<bool>(), "factor two");
    r.pass = c.ok;
    r.detail = c.detail("limit convention " + a["limit_convention"].dump() + ", factor " +
                        fmt("%.12f", a["factor"].get<double>()));
    r.data = a;
    return r;
}

}  // namespace

CriterionResult run_criterion(int id) {
    if (id < 1 || id > kCriterionCount) throw rejected("no criterion " + std::to_string(id));
    static const char* names[] = {"heteroclinic oracle", "Killing identity", "projected Jacobi solver",
                                  "Jacobi spectra oracles", "one-dimensional end to end", "two-dimensional end to end",
                                  "scaling law", "varifold convergence", "perturbed metric", "sigma convention"};
    // wall-clock budgets in seconds; criteria 6 and 9 bound each solve internally
    static const double budget[] = {1.0, 60.0, 10.0, 10.0, 30.0, INFINITY, INFINITY, INFINITY, INFINITY, INFINITY};
    static CriterionResult (*const runners[])() = {heteroclinic_oracle, killing_identity, projected_solver,
                                                   jacobi_oracles,      circle_end_to_end, sphere_end_to_end,
                                                   scaling_law,         varifold,          perturbed_metric,
                                                   sigma_convention};
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = runners[id - 1]();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.id = id;
    r.name = names[id - 1];
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds >= budget[id - 1]) {
        r.pass = false;
        r.detail += "; over the " + fmt("%g", budget[id - 1]) + " s budget";
    }
    return r;
}

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids) {
    std::vector<CriterionResult> out;
    if (ids.empty())
        for (int i = 1; i <= kCriterionCount; ++i) out.push_back(run_criterion(i));
    else
        for (int i : ids) out.push_back(run_criterion(i));
    return out;
}

std::string format_line(const CriterionResult& r) {
    return "criterion " + std::to_string(r.id) + ": " + (r.pass ? "PASS" : "FAIL") + " " + r.name + " (" + r.detail +
           ", " + fmt("%.1f", r.seconds) + " s)";
}

}  // namespace ac
