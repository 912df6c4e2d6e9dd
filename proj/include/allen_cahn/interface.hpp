#pragma once

#include "allen_cahn/manifold.hpp"

#include <string>
#include <vector>

namespace ac {

enum class InterfaceKind { antipodal_pair, meridian_pair, equator };

std::string to_string(InterfaceKind k);
InterfaceKind interface_kind_from_string(const std::string& s);
/// The interface that fits a manifold kind: circle -> antipodal pair, torus -> meridian pair,
/// sphere -> equator.
InterfaceKind default_interface(ManifoldKind k);

using SurfaceField = Eigen::VectorXd;

/// Uniform normal-coordinate layout shared by all columns of a tube: t_k = t0 + k dt.
struct TubeLayout {
    int n_gamma = 0;
    int n_t = 0;
    double t0 = 0.0;
    double dt = 0.0;
    double t(int k) const { return t0 + k * dt; }
    int size() const { return n_gamma * n_t; }
    int at(int y, int k) const { return y * n_t + k; }
};

/// Separating minimal hypersurface with closed-form Fermi data.
///
/// Each interface node y owns a column: the manifold nodes on the normal geodesic through y,
/// ordered by increasing signed height z (z > 0 on the side the unit normal points into).
/// All columns share the same uniform z-spacing and offset.
class InterfaceGeometry {
public:
    static InterfaceGeometry build(const ManifoldGrid& g, InterfaceKind which, double tau = -1.0);

    InterfaceKind kind() const { return kind_; }
    ManifoldKind manifold_kind() const { return mkind_; }
    double tau() const { return tau_; }
    int gamma_size() const { return static_cast<int>(gamma_weights_.size()); }
    int manifold_size() const { return static_cast<int>(node_gamma_.size()); }
    const Eigen::VectorXd& gamma_weights() const { return gamma_weights_; }
    double area() const { return gamma_weights_.sum(); }
    int component(int y) const { return component_[y]; }
    /// Interface coordinate of node y (phi on the sphere, y on the torus, arclength on the circle).
    double gamma_coord(int y) const { return gamma_coord_[y]; }

    /// Chart coordinates on M of the point at height z above interface node y.
    std::array<double, 2> fermi(int y, double z) const;
    /// Inverse chart: (interface node, height) for manifold chart coordinates; y = -1 off the tube.
    std::pair<int, double> fermi_inverse(double c1, double c2) const;

    int node_gamma(int node) const { return node_gamma_[node]; }
    double node_z(int node) const { return node_z_[node]; }
    /// +1 on M+, -1 on M- (sign of z inside the tube).
    int node_side(int node) const { return node_side_[node]; }

    double mean_curvature(double z) const;  ///< H_z
    double jacobian(int y, double z) const;  ///< dvol / (dGamma dz)
    double metric_factor(double z) const;   ///< g_z = metric_factor * g_Gamma
    double second_fundamental_sq(int y) const { return a2_[y]; }
    double ricci_normal(int y) const { return ric_[y]; }

    const std::vector<int>& column(int y) const { return columns_[y]; }
    double column_z0() const { return col_z0_; }
    double column_dz() const { return col_dz_; }
    /// Cubic interpolation of a manifold field along column y at height z.
    double interpolate(const ScalarField& f, int y, double z) const;

    /// Stiffness of the interface Laplacian; Delta_Gamma = diag(weights)^{-1} K_Gamma.
    const Eigen::MatrixXd& gamma_stiffness() const { return gamma_stiffness_; }
    SurfaceField surface_laplacian(const SurfaceField& f) const;

    /// <X_i, nu> on the interface nodes for the manifold's built-in Killing fields.
    const std::vector<SurfaceField>& killing_jacobi() const { return killing_jacobi_; }
    const std::vector<std::string>& killing_labels() const { return killing_labels_; }
    /// First positive gap of the continuum Jacobi spectrum, used to scale the null threshold.
    double analytic_gap() const { return analytic_gap_; }

private:
    InterfaceKind kind_ = InterfaceKind::equator;
    ManifoldKind mkind_ = ManifoldKind::sphere;
    double tau_ = 0.0;
    double size1_ = 0.0, size2_ = 0.0;
    Eigen::VectorXd gamma_weights_;
    std::vector<int> component_;
    std::vector<double> gamma_coord_;
    std::vector<int> node_gamma_;
    std::vector<double> node_z_;
    std::vector<int> node_side_;
    std::vector<double> a2_, ric_;
    std::vector<std::vector<int>> columns_;
    double col_z0_ = 0.0, col_dz_ = 0.0;
    Eigen::MatrixXd gamma_stiffness_;
    std::vector<SurfaceField> killing_jacobi_;
    std::vector<std::string> killing_labels_;
    double analytic_gap_ = 1.0;
};

/// Jacobi operator J = Delta_Gamma + |A|^2 + Ric(nu, nu) with its spectrum and kernel.
struct JacobiSystem {
    Eigen::MatrixXd op;            ///< discrete J (dense)
    Eigen::VectorXd weights;       ///< interface quadrature
    Eigen::VectorXd eigenvalues;   ///< of -J, ascending
    Eigen::MatrixXd eigenvectors;  ///< weighted-orthonormal columns
    double threshold = 0.0;
    int index = 0;
    int nullity = 0;
    bool ambiguous = false;
    Eigen::MatrixXd kernel;        ///< orthonormal kernel basis, one column per vector
    std::vector<SurfaceField> killing_jacobi;
    std::vector<std::string> killing_labels;
    Eigen::MatrixXd b_all;         ///< beta_il for every Killing-Jacobi field (rows)
    std::vector<int> selected;     ///< rows of b_all forming an independent set
    Eigen::MatrixXd b;             ///< selected rows; square when the hypothesis holds
    int killing_rank = 0;
    double b_condition = 0.0;
    double kernel_residual = 0.0;  ///< max |z_i - sum_l beta_il zhat_l|
    bool hypothesis = false;

    double dot(const SurfaceField& a, const SurfaceField& b) const;
    SurfaceField apply(const SurfaceField& f) const { return op * f; }
};

/// Builds and classifies the Jacobi spectrum. A non-positive threshold selects the default
/// 0.3 * analytic gap.
JacobiSystem jacobi_system(const InterfaceGeometry& geo, double null_threshold = -1.0);

struct ProjectedSolution {
    SurfaceField displacement;
    Eigen::VectorXd c;
    double residual = 0.0;  ///< ||J displacement - f - sum c_i zhat_i|| / ||f|| in the weighted L2 norm
};

/// Solves (J - shift) displacement = f + sum_i c_i zhat_i subject to <zhat_i, displacement> = 0.
ProjectedSolution solve_jacobi_projected(const JacobiSystem& js, const SurfaceField& f, double shift = 0.0);

struct LatticeOracle {
    int index = 0;
    int nullity = 0;
    std::vector<double> eigenvalues;  ///< of -J, ascending, with multiplicity
};

/// -J = -Delta - 4 on the Clifford torus (two circles of radius 1/sqrt 2), by lattice count.
LatticeOracle clifford_torus_oracle(int max_mode = 6);

ScalarField fermi_pull(const InterfaceGeometry& geo, const TubeLayout& tube, const Eigen::VectorXd& tube_values);
Eigen::VectorXd fermi_push(const InterfaceGeometry& geo, const TubeLayout& tube, const ScalarField& f);
/// Cubic interpolation of a tube field along t at (y, t); zero beyond the tube ends.
double tube_value(const TubeLayout& tube, const Eigen::VectorXd& values, int y, double t);

/// Four-point Lagrange weights for position s (in node units) on a uniform sequence.
void cubic_weights(double s, int& first, double w[4]);

}  // namespace ac
