#pragma once

#include "allen_cahn/manifold.hpp"

#include <functional>

namespace ac {

enum class SpectrumVerdict { certified, inconclusive };

std::string to_string(SpectrumVerdict v);

/// Lowest eigenpairs of -eps^2 Delta + W''(u) in the volume-weighted inner product.
struct SpectrumReport {
    Eigen::VectorXd eigenvalues;   ///< ascending
    Eigen::MatrixXd eigenvectors;  ///< weighted-orthonormal columns
    double tau_null = 0.0;
    int m = 0;
    int n = 0;
    double separation = 0.0;       ///< min |non-null| / max(|null cluster|) (or / tau_null if empty)
    SpectrumVerdict verdict = SpectrumVerdict::inconclusive;
    double orthonormality_defect = 0.0;
    double max_residual = 0.0;
    bool dense = true;
    int iterations = 0;
};

/// k lowest eigenpairs. Dense for at most 4000 nodes, otherwise block shift-invert subspace
/// iteration. A non-positive tau_null selects 0.3 eps^2.
SpectrumReport linearized_spectrum(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u,
                                   int k = 8, double tau_null = -1.0);

struct KillingModes {
    std::vector<ScalarField> modes;  ///< Y_i = <X_i, grad u>
    Eigen::MatrixXd gram;
    int rank = 0;
    std::vector<double> rayleigh;    ///< <Y, A Y> / <Y, Y> (0 for vanishing modes)
};

KillingModes killing_modes(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u,
                           const std::vector<VectorField>& fields);

/// Largest principal angle (degrees) between the null-cluster eigenvectors and the Killing modes.
double null_killing_angle(const ManifoldGrid& g, const SpectrumReport& s, const KillingModes& km);

using PlaneTest = std::function<double(const std::array<double, 3>& x, const std::array<double, 3>& normal)>;

/// Unit normal of the level set through each node, embedded in R^3 (fixed axis where grad u = 0).
std::vector<std::array<double, 3>> level_set_normals(const ManifoldGrid& g, const ScalarField& u);

/// Integral of eps |grad u|^2 / 2 * phi(x, normal); no sigma normalization.
double varifold_mass(const ManifoldGrid& g, const ScalarField& u, double eps, const PlaneTest& phi);

}  // namespace ac
