#include "allen_cahn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ac {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string num(double v, const char* f = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Json vec_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json vec_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

Json mat_json(const Eigen::MatrixXd& m) {
    Json a = Json::array();
    for (int i = 0; i < m.rows(); ++i) a.push_back(vec_json(Eigen::VectorXd(m.row(i).transpose())));
    return a;
}

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

double wrap(double x, double period) {
    double r = std::fmod(x, period);
    if (r > 0.5 * period) r -= period;
    if (r <= -0.5 * period) r += period;
    return r;
}

}  // namespace

void ExperimentConfig::finalize() {
    const ManifoldKind kind = manifold_kind_from_string(geometry);
    switch (kind) {
        case ManifoldKind::circle:
            if (n1 == 0) n1 = 1024;
            n2 = 1;
            if (size1 == 0.0) size1 = 2.0 * kPi;
            break;
        case ManifoldKind::torus:
            if (n1 == 0) n1 = 128;
            if (n2 == 0) n2 = 64;
            if (size1 == 0.0) size1 = 2.0 * kPi;
            if (size2 == 0.0) size2 = 2.0 * kPi;
            break;
        case ManifoldKind::sphere:
            if (n1 == 0) n1 = 96;
            if (n2 == 0) n2 = 2 * n1;
            break;
    }
    if (interface.empty()) interface = to_string(default_interface(kind));
    (void)interface_kind_from_string(interface);
    if (method != "ls" && method != "newton" && method != "both") throw rejected("method must be ls, newton or both");
    if (sigma_convention != "energy" && sigma_convention != "well")
        throw rejected("sigma convention must be energy or well");
    if (!(delta_star > 0.0 && delta_star < 1.0)) throw rejected("delta* must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 0.25)) throw rejected("alpha must lie in (0,1/4)");
    if (!(tol_fp > 0.0)) throw rejected("tol_fp must be positive");
    if (max_iter < 1) throw rejected("max_iter must be positive");
    if (!(relaxation > 0.0 && relaxation <= 1.0)) throw rejected("relaxation must lie in (0,1]");
    if (!(newton_tol > 0.0)) throw rejected("newton tolerance must be positive");
    if (spectrum_k < 1) throw rejected("spectrum_k must be positive");
    if (perturbation) {
        if (kind != ManifoldKind::sphere) throw rejected("metric perturbation is only defined on the sphere");
        if (std::abs(perturbation->amplitude) > 0.2) throw rejected("perturbation amplitude must not exceed 0.2");
        if (!(perturbation->radius > 0.0)) throw rejected("perturbation radius must be positive");
    }
}

void ExperimentConfig::check_eps(double e, double h) const {
    if (!(e > 0.0 && e < 1.0)) throw rejected("eps must lie in (0,1)");
    if (e < 4.0 * h * (1.0 - 1e-12)) throw rejected("eps " + num(e) + " is below four grid spacings (" + num(4 * h) + ")");
}

ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig c;
    const auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    };
    get("geometry", c.geometry);
    get("interface", c.interface);
    get("n1", c.n1);
    get("n2", c.n2);
    get("size1", c.size1);
    get("size2", c.size2);
    get("tau", c.tau);
    get("eps", c.eps);
    get("eps_list", c.eps_list);
    get("delta_star", c.delta_star);
    get("alpha", c.alpha);
    get("sigma_convention", c.sigma_convention);
    get("tol_fp", c.tol_fp);
    get("max_iter", c.max_iter);
    get("relaxation", c.relaxation);
    get("newton_tol", c.newton_tol);
    get("method", c.method);
    get("spectrum_k", c.spectrum_k);
    get("output_dir", c.output_dir);
    get("record_timing", c.record_timing);
    if (j.contains("perturbation") && !j.at("perturbation").is_null()) {
        PerturbationSpec p;
        const Json& q = j.at("perturbation");
        if (q.contains("center")) p.center = q.at("center").get<std::array<double, 3>>();
        if (q.contains("radius")) p.radius = q.at("radius").get<double>();
        if (q.contains("amplitude")) p.amplitude = q.at("amplitude").get<double>();
        c.perturbation = p;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const char* known[] = {"geometry", "interface", "n1", "n2", "size1", "size2", "tau", "eps", "eps_list",
                                      "delta_star", "alpha", "sigma_convention", "tol_fp", "max_iter", "relaxation",
                                      "newton_tol", "method", "spectrum_k", "output_dir", "record_timing",
                                      "perturbation"};
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }) ==
            std::end(known))
            throw rejected("unknown config key: " + it.key());
    }
    return c;
}

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["geometry"] = c.geometry;
    j["interface"] = c.interface;
    j["n1"] = c.n1;
    j["n2"] = c.n2;
    j["size1"] = c.size1;
    j["size2"] = c.size2;
    j["tau"] = c.tau;
    j["eps"] = c.eps;
    j["eps_list"] = c.eps_list;
    j["delta_star"] = c.delta_star;
    j["alpha"] = c.alpha;
    j["sigma_convention"] = c.sigma_convention;
    j["tol_fp"] = c.tol_fp;
    j["max_iter"] = c.max_iter;
    j["relaxation"] = c.relaxation;
    j["newton_tol"] = c.newton_tol;
    j["method"] = c.method;
    j["spectrum_k"] = c.spectrum_k;
    if (c.perturbation)
        j["perturbation"] = {{"center", c.perturbation->center},
                             {"radius", c.perturbation->radius},
                             {"amplitude", c.perturbation->amplitude}};
    else
        j["perturbation"] = nullptr;
    return j;
}

Setup make_setup(const ExperimentConfig& cfg) {
    ManifoldGrid g = ManifoldGrid::build(manifold_kind_from_string(cfg.geometry), cfg.n1, cfg.n2, cfg.size1, cfg.size2);
    InterfaceGeometry geo = InterfaceGeometry::build(g, interface_kind_from_string(cfg.interface), cfg.tau);
    JacobiSystem js = jacobi_system(geo);
    return Setup{std::move(g), std::move(geo), std::move(js), heteroclinic(DoubleWell::quartic())};
}

Setup with_metric(const Setup& s, const ManifoldGrid& g2) {
    InterfaceGeometry geo = InterfaceGeometry::build(g2, s.geo.kind(), s.geo.tau());
    JacobiSystem js = jacobi_system(geo, s.js.threshold);
    return Setup{g2, std::move(geo), std::move(js), s.h};
}

NodalReport nodal_distance(const ManifoldGrid& g, const InterfaceGeometry& geo, const ScalarField& u) {
    NodalReport r;
    const auto dist = [&](double c1) {
        if (g.kind() == ManifoldKind::sphere) return std::abs(0.5 * kPi - c1);
        const double l = g.size1();
        return std::min(std::abs(wrap(c1, l)), std::abs(wrap(c1 - 0.5 * l, l)));
    };
    const SparseMatrix& k = g.stiffness();
    double worst = 0.0;
    for (int col = 0; col < k.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(k, col); it; ++it) {
            const int i = static_cast<int>(it.row()), j = col;
            if (i >= j) continue;
            const double a = u[i], b = u[j];
            if ((a > 0) == (b > 0)) continue;
            const double t = a / (a - b);
            double c1;
            if (g.kind() == ManifoldKind::sphere) c1 = g.coord1(i) + t * (g.coord1(j) - g.coord1(i));
            else c1 = g.coord1(i) + t * wrap(g.coord1(j) - g.coord1(i), g.size1());
            worst = std::max(worst, dist(c1));
            ++r.crossings;
        }
    // every interface point must see a crossing on its normal column
    for (int y = 0; y < geo.gamma_size(); ++y) {
        const auto& col = geo.column(y);
        double best = INFINITY;
        for (std::size_t m = 0; m + 1 < col.size(); ++m) {
            const double a = u[col[m]], b = u[col[m + 1]];
            if ((a > 0) == (b > 0)) continue;
            const double za = geo.column_z0() + m * geo.column_dz();
            best = std::min(best, std::abs(za + a / (a - b) * geo.column_dz()));
        }
        worst = std::max(worst, best);
    }
    r.hausdorff = worst;
    return r;
}

namespace {

double anisotropic_test(const std::array<double, 3>& x, const std::array<double, 3>& n) {
    return n[2] * n[2] * (2.0 + x[0]);
}

}  // namespace

SolveReport solve_report(const Setup& s, const ExperimentConfig& cfg, double eps) {
    const auto start = std::chrono::steady_clock::now();
    const ManifoldGrid& g = s.g;
    const InterfaceGeometry& geo = s.geo;
    const DoubleWell& w = s.h.potential();
    const double h = g.spacing();
    cfg.check_eps(eps, h);

    SolveReport rep;
    rep.eps = eps;
    rep.h = h;
    Json& j = rep.json;
    j["schema"] = "allen_cahn.solve_report";
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = config_to_json(cfg);
    j["eps"] = eps;
    j["h"] = h;

    const bool run_ls = cfg.method != "newton";
    const bool run_newton = cfg.method != "ls";
    const double tol_c = std::max(1e-8, cfg.tol_fp * eps * eps);
    const CutoffFamily cut = cutoffs(eps, cfg.delta_star, geo.tau());
    const ScalarField start_field = approximate_solution(geo, s.h, eps, cut);
    ScalarField u_ls, u_newton;
    std::map<std::string, bool>& gates = rep.gates;

    if (run_ls) {
        Reduction red(g, geo, s.js, s.h, eps, cfg.delta_star);
        FixedPointConfig fc;
        fc.tol_fp = cfg.tol_fp;
        fc.max_iter = cfg.max_iter;
        fc.alpha = cfg.alpha;
        fc.initial_relaxation = cfg.relaxation;
        const double n0 = red.outer_source(red.zero_state()).cwiseAbs().maxCoeff();
        const FixedPointReport fp = red.fixed_point(fc);
        const CVanishingVerdict cv = c_vanishing_check(g, geo, s.js, s.h, red, fp, cfg.tol_fp);
        u_ls = fp.u;
        rep.iterations = fp.iterations;
        rep.assembled_residual = fp.assembled_residual;
        rep.max_abs_c = fp.state.c.size() ? fp.state.c.cwiseAbs().maxCoeff() : 0.0;
        const bool contracting =
            !fp.ratios.empty() && std::all_of(fp.ratios.begin(), fp.ratios.end(), [](double r) { return r < 1.0; });
        Json f;
        f["converged"] = fp.converged;
        f["aborted"] = fp.aborted;
        f["abort_reason"] = fp.abort_reason;
        f["iterations"] = fp.iterations;
        f["total_iterations"] = fp.total_iterations;
        f["relaxation"] = fp.relaxation;
        f["history"] = vec_json(fp.history);
        f["ratios"] = vec_json(fp.ratios);
        f["max_ratio"] = fp.ratios.empty() ? 0.0 : *std::max_element(fp.ratios.begin(), fp.ratios.end());
        f["c_history"] = vec_json(fp.c_history);
        f["c"] = vec_json(fp.state.c);
        f["initial_outer_source_sup"] = n0;
        f["state_norm"] = {{"flat", fp.state.norms.flat},
                           {"sharp", fp.state.norms.sharp},
                           {"displacement", fp.state.norms.displacement},
                           {"total", fp.state.norms.total()},
                           {"over_eps2", fp.state.norms.total() / (eps * eps)}};
        f["displacement_sup"] = fp.state.displacement.cwiseAbs().maxCoeff();
        f["displacement_orthogonality"] = fp.displacement_orthogonality;
        f["assembled_residual"] = fp.assembled_residual;
        f["displacement_gain"] = red.displacement_gain();
        f["tube_nodes"] = red.tube().layout.n_t;
        f["kernel_profile_eigenvalue"] = red.tube().kernel_eigenvalue;
        Json c;
        c["pass"] = cv.pass;
        c["reason"] = cv.reason;
        c["structure_error"] = finite_or(cv.structure_error, -1.0);
        c["condition"] = finite_or(cv.condition, -1.0);
        c["pairings"] = vec_json(cv.pairings);
        c["c_pairing"] = vec_json(cv.c_pairing);
        c["tolerance"] = cv.tolerance;
        f["c_vanishing"] = c;
        j["fixed_point"] = f;
        gates["fixed_point_converged"] = fp.converged;
        gates["contraction"] = contracting;
        gates["c_vanishing"] = fp.converged && rep.max_abs_c <= tol_c;
        gates["assembled_identity"] = fp.converged && fp.assembled_residual <= 1e-8;
        rep.converged = fp.converged;
    }
    NewtonResult nr;
    if (run_newton) {
        NewtonOptions no;
        no.tol = cfg.newton_tol;
        nr = newton_solve(g, w, eps, start_field, no);
        u_newton = nr.u;
        rep.newton_iterations = nr.iterations;
        j["newton"] = {{"converged", nr.converged},
                       {"status", nr.status},
                       {"iterations", nr.iterations},
                       {"residual", nr.residual},
                       {"trivial", nr.trivial}};
        gates["newton_converged"] = nr.converged;
        rep.converged = run_ls ? rep.converged && nr.converged : nr.converged;
    }
    if (run_ls && run_newton) {
        const double gap = (u_ls - u_newton).cwiseAbs().maxCoeff();
        const double tol = 10.0 * std::max(cfg.tol_fp * eps * eps, h * h);
        j["agreement"] = {{"sup_difference", gap}, {"tolerance", tol}};
        gates["ls_newton_agreement"] = gap <= tol;
    }
    rep.u = run_newton && nr.converged ? u_newton : (run_ls ? u_ls : u_newton);
    j["reported_solution"] = run_newton && nr.converged ? "newton" : (run_ls ? "ls" : "newton");
    const ScalarField& u = rep.u;

    rep.pde_residual = allen_cahn_residual(g, w, eps, u);
    rep.residual = rep.pde_residual.cwiseAbs().maxCoeff();
    gates["pde_residual"] = rep.residual <= 1e-8;

    rep.energy = energy(g, u, w, eps);
    rep.area = geo.area();
    rep.ratio_energy = rep.energy / (s.h.sigma_energy() * rep.area);
    rep.ratio_well = rep.energy / (s.h.sigma_well() * rep.area);
    j["energy"] = {{"value", rep.energy},
                   {"area", rep.area},
                   {"ratio_sigma_energy", rep.ratio_energy},
                   {"ratio_sigma_well", rep.ratio_well},
                   {"selected_convention", cfg.sigma_convention},
                   {"selected_ratio", cfg.sigma_convention == "energy" ? rep.ratio_energy : rep.ratio_well}};

    Json pairs = Json::array();
    const auto fields = killing_fields(g);
    std::vector<VectorField> vf;
    for (const auto& k : fields) {
        pairs.push_back({{"field", k.label}, {"pairing", killing_pairing(g, w, eps, u, k.field)}, {"defect", k.defect}});
        vf.push_back(k.field);
    }
    j["killing_pairings"] = pairs;

    rep.spectrum = linearized_spectrum(g, w, eps, u, cfg.spectrum_k);
    rep.m = rep.spectrum.m;
    rep.n = rep.spectrum.n;
    rep.verdict = to_string(rep.spectrum.verdict);
    Json sj = spectrum_json(rep.spectrum);
    sj["scaled_eigenvalues"] = vec_json(Eigen::VectorXd(rep.spectrum.eigenvalues / (eps * eps)));
    const KillingModes km = killing_modes(g, w, eps, u, vf);
    sj["killing_modes"] = {{"rank", km.rank},
                           {"gram", mat_json(km.gram)},
                           {"rayleigh", vec_json(km.rayleigh)},
                           {"null_angle_degrees", null_killing_angle(g, rep.spectrum, km)}};
    sj["jacobi_index"] = s.js.index;
    sj["jacobi_nullity"] = s.js.nullity;
    sj["hypothesis"] = s.js.hypothesis;
    j["spectrum"] = sj;
    gates["spectrum_certified"] = rep.spectrum.verdict == SpectrumVerdict::certified;
    gates["index_nullity"] = rep.m == s.js.index && rep.n == s.js.nullity;

    const NodalReport nodal = nodal_distance(g, geo, u);
    rep.hausdorff = nodal.hausdorff;
    j["nodal"] = {{"hausdorff", finite_or(nodal.hausdorff, -1.0)}, {"crossings", nodal.crossings}, {"tolerance", 2 * h}};
    gates["nodal_set"] = nodal.hausdorff <= 2.0 * h;

    const double norm = 0.5 * s.h.sigma_energy();
    rep.varifold_ratio = varifold_mass(g, u, eps, [](const auto&, const auto&) { return 1.0; }) / (norm * rep.area);
    Json vj = {{"normalization", "sigma_energy/2"}, {"unit_ratio", rep.varifold_ratio}};
    if (g.kind() == ManifoldKind::sphere && geo.kind() == InterfaceKind::equator)
        vj["anisotropic_ratio"] = varifold_mass(g, u, eps, anisotropic_test) / (norm * 4.0 * kPi);
    j["varifold"] = vj;

    const double far_tol = 4.0 * std::exp(-std::sqrt(w.d2(w.well)) * 0.5 * geo.tau() / eps) + 1e-9;
    double min_far = INFINITY;
    for (int node = 0; node < g.size(); ++node)
        if (geo.node_gamma(node) < 0 || std::abs(geo.node_z(node)) >= 0.5 * geo.tau())
            min_far = std::min(min_far, geo.node_side(node) * u[node]);
    rep.min_far = min_far;
    j["uniform_convergence"] = {{"min_signed_value", finite_or(min_far, 1.0)}, {"tolerance", far_tol}};
    gates["uniform_convergence"] = !(min_far < 1.0 - far_tol);

    rep.passed = std::all_of(gates.begin(), gates.end(), [](const auto& kv) { return kv.second; });
    Json gj;
    for (const auto& [k, v] : gates) gj[k] = v;
    j["gates"] = gj;
    j["passed"] = rep.passed;
    if (cfg.record_timing)
        j["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    else
        j["wall_time"] = nullptr;
    return rep;
}

std::string sweep_csv(const std::vector<SolveReport>& reports) {
    std::ostringstream os;
    os << kSweepColumns << "\n";
    for (const auto& r : reports) {
        os << num(r.eps, "%.17g") << ',' << num(r.h, "%.17g") << ',' << num(r.energy, "%.17g") << ','
           << num(r.area, "%.17g") << ',' << num(r.ratio_energy, "%.17g") << ',' << num(r.ratio_well, "%.17g") << ','
           << num(r.max_abs_c, "%.6e") << ',' << num(r.residual, "%.6e") << ',' << num(r.assembled_residual, "%.6e") << ',' << r.m
           << ',' << r.n << ',' << r.verdict << ',' << r.iterations << ',' << r.newton_iterations << ','
           << num(r.hausdorff, "%.6e") << ',' << num(r.varifold_ratio, "%.17g") << ',' << num(r.min_far, "%.17g")
           << ',' << (r.converged ? 1 : 0) << "\n";
    }
    return os.str();
}

Json sigma_adjudication(const Heteroclinic& h, const std::vector<SolveReport>& reports) {
    Json j;
    j["sigma_energy"] = h.sigma_energy();
    j["sigma_well"] = h.sigma_well();
    const double factor = h.sigma_energy() / h.sigma_well();
    j["factor"] = factor;
    j["factor_is_two"] = std::abs(factor - 2.0) <= 1e-6;
    Json rows = Json::array();
    const SolveReport* finest = nullptr;
    for (const auto& r : reports) {
        if (!r.converged) continue;
        rows.push_back({{"eps", r.eps}, {"ratio_sigma_energy", r.ratio_energy}, {"ratio_sigma_well", r.ratio_well}});
        if (!finest || r.eps < finest->eps) finest = &r;
    }
    j["rows"] = rows;
    if (finest) {
        const double de = std::abs(finest->ratio_energy - 1.0), dw = std::abs(finest->ratio_well - 1.0);
        j["limit_convention"] = de < dw ? "energy" : "well";
        j["finest_eps"] = finest->eps;
        j["finest_deviation_energy"] = de;
        j["finest_deviation_well"] = dw;
    } else {
        j["limit_convention"] = nullptr;
    }
    return j;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    SweepResult out;
    out.json["schema"] = "allen_cahn.sweep_report";
    out.json["schema_version"] = kReportSchemaVersion;
    out.json["config"] = config_to_json(cfg);
    out.json["columns"] = kSweepColumns;
    Json reps = Json::array();
    if (!cfg.eps_list.empty()) {
        const Setup s = make_setup(cfg);
        for (double e : cfg.eps_list) {
            try {
                out.reports.push_back(solve_report(s, cfg, e));
                reps.push_back(out.reports.back().json);
                out.passed = out.passed && out.reports.back().passed;
            } catch (const std::exception& ex) {
                reps.push_back({{"eps", e}, {"error", ex.what()}, {"passed", false}});
                out.passed = false;
            }
        }
        out.json["sigma_adjudication"] = sigma_adjudication(s.h, out.reports);
    } else {
        out.json["sigma_adjudication"] = nullptr;
    }
    out.json["reports"] = reps;
    out.json["passed"] = out.passed;
    out.csv = sweep_csv(out.reports);
    return out;
}

ScalarField perturbation_field(const ManifoldGrid& g, const InterfaceGeometry& geo, const PerturbationSpec& p) {
    if (g.kind() != ManifoldKind::sphere) throw rejected("metric perturbation is only defined on the sphere");
    const auto& c = p.center;
    const double cn = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    if (!(cn > 0)) throw rejected("perturbation center must be nonzero");
    // the cap spans colatitudes [colat - r, colat + r]; the tube spans |pi/2 - theta| < tau
    const double colat = std::acos(std::clamp(c[2] / cn, -1.0, 1.0));
    const double lo = colat - p.radius, hi = colat + p.radius;
    const double band_lo = 0.5 * kPi - geo.tau(), band_hi = 0.5 * kPi + geo.tau();
    if (hi > band_lo && lo < band_hi) throw rejected("perturbation support meets the Fermi tube");
    ScalarField rho = ScalarField::Zero(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const auto x = g.embed(i);
        const double d = std::acos(std::clamp((x[0] * c[0] + x[1] * c[1] + x[2] * c[2]) / cn, -1.0, 1.0));
        const double s = d / p.radius;
        if (s < 1.0) rho[i] = p.amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    return rho;
}

SolveReport perturbed_metric_experiment(const ExperimentConfig& cfg) {
    const Setup base = make_setup(cfg);
    const PerturbationSpec p = cfg.perturbation.value_or(PerturbationSpec{});
    const ScalarField rho = perturbation_field(base.g, base.geo, p);
    const Setup pert = with_metric(base, base.g.conformally_scaled(rho));
    SolveReport rep = solve_report(pert, cfg, cfg.eps);
    int support = 0;
    for (int i = 0; i < rho.size(); ++i) support += rho[i] != 0.0;
    const bool unchanged = base.js.eigenvalues == pert.js.eigenvalues && base.js.op == pert.js.op;
    rep.json["perturbation"] = {{"center", p.center},
                                {"radius", p.radius},
                                {"amplitude", p.amplitude},
                                {"max_rho", rho.cwiseAbs().maxCoeff()},
                                {"support_nodes", support},
                                {"jacobi_unchanged", unchanged}};
    rep.gates["jacobi_unchanged"] = unchanged;
    rep.passed = rep.passed && unchanged;
    Json gj;
    for (const auto& [k, v] : rep.gates) gj[k] = v;
    rep.json["gates"] = gj;
    rep.json["passed"] = rep.passed;
    return rep;
}

Json profile_report(const Heteroclinic& h) {
    Json j;
    j["schema"] = "allen_cahn.profile_report";
    j["schema_version"] = kReportSchemaVersion;
    j["potential"] = h.potential().name;
    j["half_width"] = h.half_width();
    j["step"] = h.step();
    j["sigma_well"] = h.sigma_well();
    j["sigma_energy"] = h.sigma_energy();
    j["sigma_factor"] = h.sigma_energy() / h.sigma_well();
    j["equipartition_energy"] = h.equipartition_energy();
    j["gap"] = h.gap();
    j["tail_rate"] = h.tail_rate();
    const double refined = linearized_eigenvalues(h, h.half_width(), 0.5 * h.step(), 2).at(1);
    j["gap_refined"] = refined;
    j["gap_relative_change"] = std::abs(refined - h.gap()) / std::abs(h.gap());
    j["second_order_residual"] = h.second_order_residual();
    j["first_order_residual"] = h.first_order_residual();
    Json gates;
    gates["gap_positive"] = h.gap() > 0.0;
    gates["gap_stable"] = std::abs(refined - h.gap()) <= 0.01 * std::abs(h.gap());
    gates["first_order_ode"] = h.first_order_residual() <= 1e-8;
    if (h.potential().name == "quartic") {
        double worst = 0.0;
        for (int i = -10000; i <= 10000; ++i) {
            const double z = i * 1e-3;
            worst = std::max(worst, std::abs(h.profile(z) - std::tanh(z / std::sqrt(2.0))));
        }
        j["closed_form_error"] = worst;
        j["sigma_well_error"] = std::abs(h.sigma_well() - std::sqrt(2.0) / 3.0);
        j["sigma_energy_error"] = std::abs(h.sigma_energy() - 2.0 * std::sqrt(2.0) / 3.0);
        gates["closed_form_profile"] = worst <= 1e-8;
        gates["sigma_well"] = std::abs(h.sigma_well() - std::sqrt(2.0) / 3.0) <= 1e-9;
        gates["sigma_energy"] = std::abs(h.sigma_energy() - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-9;
    }
    bool pass = true;
    for (const auto& [k, v] : gates.items()) pass = pass && v.get<bool>();
    j["gates"] = gates;
    j["passed"] = pass;
    return j;
}

Json geometry_report(const Setup& s, bool interface_details) {
    const JacobiSystem& js = s.js;
    Json j;
    j["schema"] = "allen_cahn.geometry_report";
    j["schema_version"] = kReportSchemaVersion;
    j["manifold"] = to_string(s.g.kind());
    j["n1"] = s.g.n1();
    j["n2"] = s.g.n2();
    j["h"] = s.g.spacing();
    j["volume"] = s.g.volume();
    j["interface"] = to_string(s.geo.kind());
    j["interface_nodes"] = s.geo.gamma_size();
    j["area"] = s.geo.area();
    j["tau"] = s.geo.tau();
    Json kd = Json::array();
    for (const auto& k : killing_fields(s.g)) kd.push_back({{"field", k.label}, {"defect", k.defect}});
    j["killing_defects"] = kd;
    j["weights_positive"] = (s.g.weights().array() > 0).all();
    j["stiffness_row_sum"] = (s.g.stiffness() * Eigen::VectorXd::Ones(s.g.size()).eval()).cwiseAbs().maxCoeff();
    if (!interface_details) {
        j["passed"] = true;
        return j;
    }
    const int show = std::min<int>(10, static_cast<int>(js.eigenvalues.size()));
    j["index"] = js.index;
    j["nullity"] = js.nullity;
    j["hypothesis"] = js.hypothesis ? "PASS" : "FAIL";
    j["jacobi"] = {{"threshold", js.threshold},
                   {"eigenvalues", vec_json(Eigen::VectorXd(js.eigenvalues.head(show)))},
                   {"index", js.index},
                   {"nullity", js.nullity},
                   {"ambiguous", js.ambiguous},
                   {"killing_labels", js.killing_labels},
                   {"killing_rank", js.killing_rank},
                   {"selected", js.selected},
                   {"b", mat_json(js.b)},
                   {"b_condition", finite_or(js.b_condition, -1.0)},
                   {"kernel_residual", js.kernel_residual},
                   {"hypothesis_violation", !js.hypothesis}};
    j["gates"] = {{"classification_unambiguous", !js.ambiguous}};
    j["passed"] = !js.ambiguous;
    return j;
}

Json spectrum_json(const SpectrumReport& r) {
    return {{"eigenvalues", vec_json(r.eigenvalues)},
            {"tau_null", r.tau_null},
            {"m", r.m},
            {"n", r.n},
            {"separation", finite_or(r.separation, -1.0)},
            {"verdict", to_string(r.verdict)},
            {"orthonormality_defect", r.orthonormality_defect},
            {"max_residual", r.max_residual},
            {"dense", r.dense},
            {"iterations", r.iterations}};
}

namespace {

struct Frame {
    double x0, x1, y0, y1;           // data range
    double left = 70, top = 30, width = 520, height = 320;
    double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
    double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

std::string svg_open(const std::string& title) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n"
           "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n"
           "<text x=\"320\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
           title + "</text>\n";
}

std::string axes(const Frame& f, const std::string& xl, const std::string& yl) {
    std::ostringstream os;
    os << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.width << "\" height=\"" << f.height
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0, yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
        os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(f.top + f.height + 16)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(xv, "%.4g")
           << "</text>\n";
        os << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(f.py(yv) + 3)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(yv, "%.4g") << "</text>\n";
    }
    os << "<text x=\"" << num(f.left + f.width / 2) << "\" y=\"" << num(f.top + f.height + 34)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xl << "</text>\n";
    os << "<text x=\"14\" y=\"" << num(f.top + f.height / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
       << num(f.top + f.height / 2) << ")\">" << yl << "</text>\n";
    return os.str();
}

void pad(double& lo, double& hi) {
    if (!(hi > lo)) {
        const double c = lo, d = std::max(1e-3, std::abs(c) * 0.1);
        lo = c - d;
        hi = c + d;
        return;
    }
    const double d = 0.08 * (hi - lo);
    lo -= d;
    hi += d;
}

}  // namespace

std::string energy_curve_svg(const std::vector<SolveReport>& reports, double sigma_energy, double sigma_well) {
    std::string out = svg_open("energy against eps");
    const double area = reports.empty() ? 0.0 : reports.front().area;
    const double ref_e = sigma_energy * area, ref_w = sigma_well * area;
    double x0 = INFINITY, x1 = -INFINITY, y0 = std::min(ref_e, ref_w), y1 = std::max(ref_e, ref_w);
    for (const auto& r : reports) {
        x0 = std::min(x0, r.eps);
        x1 = std::max(x1, r.eps);
        y0 = std::min(y0, r.energy);
        y1 = std::max(y1, r.energy);
    }
    if (reports.empty()) x0 = 0.0, x1 = 1.0;
    pad(x0, x1);
    pad(y0, y1);
    const Frame f{x0, x1, y0, y1};
    out += axes(f, "eps", "energy");
    const auto ref = [&](double y, const char* color, const char* label) {
        std::ostringstream os;
        os << "<line x1=\"" << num(f.left) << "\" y1=\"" << num(f.py(y)) << "\" x2=\"" << num(f.left + f.width)
           << "\" y2=\"" << num(f.py(y)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"6 4\"/>\n";
        os << "<text x=\"" << num(f.left + f.width - 4) << "\" y=\"" << num(f.py(y) - 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" << color << "\">" << label
           << "</text>\n";
        return os.str();
    };
    out += ref(ref_e, "#1f77b4", "sigma_energy * area");
    out += ref(ref_w, "#d62728", "sigma_well * area");
    std::vector<const SolveReport*> sorted;
    for (const auto& r : reports) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->eps < b->eps; });
    if (sorted.size() > 1) {
        out += "<polyline fill=\"none\" stroke=\"black\" points=\"";
        for (const auto* r : sorted) out += num(f.px(r->eps)) + "," + num(f.py(r->energy)) + " ";
        out += "\"/>\n";
    }
    for (const auto* r : sorted)
        out += "<circle class=\"marker\" cx=\"" + num(f.px(r->eps)) + "\" cy=\"" + num(f.py(r->energy)) +
               "\" r=\"4\" fill=\"black\"/>\n";
    out += "</svg>\n";
    return out;
}

std::string eigenvalue_ladder_svg(const std::vector<SolveReport>& reports) {
    std::string out = svg_open("lowest eigenvalues / eps^2");
    double y0 = -0.3, y1 = 0.3;
    for (const auto& r : reports)
        for (int i = 0; i < r.spectrum.eigenvalues.size(); ++i) {
            const double v = r.spectrum.eigenvalues[i] / (r.eps * r.eps);
            y0 = std::min(y0, v);
            y1 = std::max(y1, v);
        }
    pad(y0, y1);
    const double nc = std::max<std::size_t>(1, reports.size());
    const Frame f{0.0, nc, y0, y1};
    out += axes(f, "report", "eigenvalue / eps^2");
    for (double t : {-0.3, 0.3})
        out += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.py(t)) + "\" x2=\"" + num(f.left + f.width) +
               "\" y2=\"" + num(f.py(t)) + "\" stroke=\"gray\" stroke-dasharray=\"3 3\"/>\n";
    for (std::size_t c = 0; c < reports.size(); ++c) {
        const auto& r = reports[c];
        for (int i = 0; i < r.spectrum.eigenvalues.size(); ++i) {
            const double v = r.spectrum.eigenvalues[i] / (r.eps * r.eps);
            out += "<line class=\"level\" x1=\"" + num(f.px(c + 0.2)) + "\" y1=\"" + num(f.py(v)) + "\" x2=\"" +
                   num(f.px(c + 0.8)) + "\" y2=\"" + num(f.py(v)) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        }
        out += "<text x=\"" + num(f.px(c + 0.5)) + "\" y=\"" + num(f.top + 12) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">eps=" + num(r.eps, "%.4g") +
               " m=" + std::to_string(r.m) + " n=" + std::to_string(r.n) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string nodal_contour_svg(const ManifoldGrid& g, const ScalarField& u) {
    std::string out = svg_open("nodal set");
    if (g.dim() == 1) {
        const Frame f{0.0, g.size1(), -1.2, 1.2};
        out += axes(f, "arclength", "u");
        out += "<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"";
        for (int i = 0; i < g.size(); ++i) out += num(f.px(g.coord1(i))) + "," + num(f.py(u[i])) + " ";
        out += "\"/>\n<path class=\"nodal\" fill=\"none\" stroke=\"red\" d=\"";
        for (int i = 0; i < g.size(); ++i) {
            const int j = (i + 1) % g.size();
            if ((u[i] > 0) == (u[j] > 0)) continue;
            const double s = g.coord1(i) + u[i] / (u[i] - u[j]) * g.step1();
            out += "M" + num(f.px(s)) + " " + num(f.py(-1.1)) + " L" + num(f.px(s)) + " " + num(f.py(1.1)) + " ";
        }
        out += "\"/>\n</svg>\n";
        return out;
    }
    const bool sphere = g.kind() == ManifoldKind::sphere;
    const int n1 = g.n1(), n2 = g.n2();
    const double h1 = g.step1(), h2 = g.step2();
    const double c1_0 = g.coord1(0);
    const Frame f = sphere ? Frame{0.0, 2.0 * kPi, kPi, 0.0} : Frame{0.0, g.size2(), g.size1(), 0.0};
    out += axes(f, sphere ? "phi" : "y", sphere ? "theta" : "x");
    out += "<path class=\"nodal\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" d=\"";
    const int rows = sphere ? n1 - 1 : n1;
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < n2; ++k) {
            const int i1 = (i + 1) % n1, k1 = (k + 1) % n2;
            const double y0 = c1_0 + i * h1, y1 = y0 + h1, x0 = k * h2, x1 = x0 + h2;
            const double v[4] = {u[g.index(i, k)], u[g.index(i, k1)], u[g.index(i1, k1)], u[g.index(i1, k)]};
            const double px[4] = {x0, x1, x1, x0}, py[4] = {y0, y0, y1, y1};
            std::vector<std::pair<double, double>> pts;
            for (int e = 0; e < 4; ++e) {
                const int a = e, b = (e + 1) % 4;
                if ((v[a] > 0) == (v[b] > 0)) continue;
                const double t = v[a] / (v[a] - v[b]);
                pts.emplace_back(px[a] + t * (px[b] - px[a]), py[a] + t * (py[b] - py[a]));
            }
            for (std::size_t p = 0; p + 1 < pts.size(); p += 2)
                out += "M" + num(f.px(pts[p].first)) + " " + num(f.py(pts[p].second)) + " L" +
                       num(f.px(pts[p + 1].first)) + " " + num(f.py(pts[p + 1].second)) + " ";
        }
    out += "\"/>\n</svg>\n";
    return out;
}

std::vector<std::string> emit_plots(const std::vector<SolveReport>& reports, const Setup& s, const std::string& dir) {
    if (reports.empty()) throw rejected("emit_plots: no reports");
    std::filesystem::create_directories(dir);
    const std::vector<std::string> paths = {dir + "/energy_curve.svg", dir + "/eigenvalue_ladder.svg",
                                            dir + "/nodal_contour.svg"};
    write_file(paths[0], energy_curve_svg(reports, s.h.sigma_energy(), s.h.sigma_well()));
    write_file(paths[1], eigenvalue_ladder_svg(reports));
    const auto finest = std::min_element(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
        return a.eps < b.eps;
    });
    write_file(paths[2], nodal_contour_svg(s.g, finest->u));
    return paths;
}

std::string node_table(const ManifoldGrid& g, const std::vector<std::pair<std::string, const ScalarField*>>& cols) {
    std::ostringstream os;
    os << "node,c1,c2,x,y,z";
    for (const auto& c : cols) os << ',' << c.first;
    os << "\n";
    for (int i = 0; i < g.size(); ++i) {
        const auto x = g.embed(i);
        os << i << ',' << num(g.coord1(i), "%.17g") << ',' << num(g.coord2(i), "%.17g") << ','
           << num(x[0], "%.17g") << ',' << num(x[1], "%.17g") << ',' << num(x[2], "%.17g");
        for (const auto& c : cols) os << ',' << num((*c.second)[i], "%.17g");
        os << "\n";
    }
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace ac
