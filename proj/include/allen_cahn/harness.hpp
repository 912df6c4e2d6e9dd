#pragma once

#include "allen_cahn/reduction.hpp"
#include "allen_cahn/spectral.hpp"

#include "json.hpp"

#include <map>
#include <optional>

namespace ac {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

/// Conformal bump e^{2 rho} g with rho = amplitude * exp(1 - 1 / (1 - (d / radius)^2)) inside the cap.
struct PerturbationSpec {
    std::array<double, 3> center{0.0, 0.0, 1.0};
    double radius = 0.45;
    double amplitude = 0.1;
};

struct ExperimentConfig {
    std::string geometry = "sphere";
    std::string interface;  ///< empty: the manifold's default
    int n1 = 0, n2 = 0;     ///< 0: per-geometry default resolution
    double size1 = 0.0, size2 = 0.0;
    double tau = -1.0;
    double eps = 0.15;
    std::vector<double> eps_list;
    double delta_star = 2.0 / 3.0;
    double alpha = 0.125;
    std::string sigma_convention = "energy";
    double tol_fp = 1e-3;
    int max_iter = 60;
    double relaxation = 0.5;
    double newton_tol = 1e-10;
    std::string method = "both";
    int spectrum_k = 8;
    std::string output_dir = ".";
    std::optional<PerturbationSpec> perturbation;
    bool record_timing = false;

    /// Fills per-geometry defaults and rejects inconsistent settings.
    void finalize();
    /// eps >= 4 h and eps in (0,1).
    void check_eps(double eps, double h) const;
};

ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& c);

/// Grid, interface, Jacobi data and heteroclinic for one configuration.
struct Setup {
    ManifoldGrid g;
    InterfaceGeometry geo;
    JacobiSystem js;
    Heteroclinic h;
};

Setup make_setup(const ExperimentConfig& cfg);
/// Same setup with the metric replaced by g' (interface data rebuilt on g').
Setup with_metric(const Setup& s, const ManifoldGrid& g2);

struct NodalReport {
    double hausdorff = 0.0;   ///< symmetric distance between the nodal set and the interface
    int crossings = 0;
};

NodalReport nodal_distance(const ManifoldGrid& g, const InterfaceGeometry& geo, const ScalarField& u);

struct SolveReport {
    double eps = 0.0;
    double h = 0.0;
    double energy = 0.0;
    double area = 0.0;
    double ratio_energy = 0.0;  ///< E / (sigma_energy Area)
    double ratio_well = 0.0;    ///< E / (sigma_well Area)
    double max_abs_c = 0.0;
    double residual = 0.0;
    double assembled_residual = 0.0;
    int m = -1, n = -1;
    std::string verdict;
    int iterations = 0;
    int newton_iterations = 0;
    double hausdorff = 0.0;
    double varifold_ratio = 0.0;
    double min_far = 0.0;
    bool converged = false;
    std::map<std::string, bool> gates;
    bool passed = false;
    ScalarField u;
    ScalarField pde_residual;
    SpectrumReport spectrum;
    Json json;
};

/// Solve at one eps (method ls, newton or both), then spectrum, pairings, varifold and gates.
SolveReport solve_report(const Setup& s, const ExperimentConfig& cfg, double eps);

struct SweepResult {
    std::vector<SolveReport> reports;
    std::string csv;
    Json json;
    bool passed = true;
};

inline const char* kSweepColumns =
    "eps,h,energy,area,ratio_energy,ratio_well,max_abs_c,residual,assembled_residual,m,n,verdict,iterations,"
    "newton_iterations,hausdorff,varifold_ratio,min_far,converged";

SweepResult run_sweep(const ExperimentConfig& cfg);
std::string sweep_csv(const std::vector<SolveReport>& reports);
/// Which sigma convention makes E / (sigma Area) tend to one, and the factor between them.
Json sigma_adjudication(const Heteroclinic& h, const std::vector<SolveReport>& reports);

/// rho for a perturbation spec; rejects caps meeting the Fermi tube.
ScalarField perturbation_field(const ManifoldGrid& g, const InterfaceGeometry& geo, const PerturbationSpec& p);
SolveReport perturbed_metric_experiment(const ExperimentConfig& cfg);

Json profile_report(const Heteroclinic& h);
/// Grid metadata and invariant residuals; with interface_details also the Jacobi classification.
Json geometry_report(const Setup& s, bool interface_details);
Json spectrum_json(const SpectrumReport& r);

/// energy_curve.svg, eigenvalue_ladder.svg, nodal_contour.svg in dir; returns the paths.
std::vector<std::string> emit_plots(const std::vector<SolveReport>& reports, const Setup& s, const std::string& dir);
std::string energy_curve_svg(const std::vector<SolveReport>& reports, double sigma_energy, double sigma_well);
std::string eigenvalue_ladder_svg(const std::vector<SolveReport>& reports);
std::string nodal_contour_svg(const ManifoldGrid& g, const ScalarField& u);

/// CSV of node coordinates and the given named columns.
std::string node_table(const ManifoldGrid& g, const std::vector<std::pair<std::string, const ScalarField*>>& cols);

void write_file(const std::string& path, const std::string& text);
/// Stable JSON text: two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace ac
