#pragma once

#include "allen_cahn/potential.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <string>
#include <vector>

namespace ac {

enum class ManifoldKind { circle, torus, sphere };

std::string to_string(ManifoldKind k);
ManifoldKind manifold_kind_from_string(const std::string& s);

using ScalarField = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Chart components: (theta, phi) on the sphere, (x, y) on the torus, (s, -) on the circle.
struct VectorField {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
};

struct KillingField {
    VectorField field;
    std::string label;
    double defect = 0.0;  ///< sup of the finite-difference Lie derivative of the metric
};

/// Structured grid on a closed 1- or 2-manifold.
///
/// The Laplacian is stored as Delta = diag(weights)^{-1} * stiffness with a symmetric
/// stiffness matrix whose rows sum to zero. Sphere nodes sit at offset colatitudes
/// (j + 1/2) pi / n_theta; node (j, k) has index j * n_phi + k. Torus node (i, l) has
/// index i * n_y + l.
class ManifoldGrid {
public:
    static ManifoldGrid circle(int n, double length = 2.0 * 3.14159265358979323846);
    static ManifoldGrid torus(int nx, int ny, double lx, double ly);
    static ManifoldGrid sphere(int n_theta, int n_phi);
    static ManifoldGrid build(ManifoldKind kind, int n1, int n2, double size1, double size2);

    ManifoldKind kind() const { return kind_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    double size1() const { return size1_; }
    double size2() const { return size2_; }
    int size() const { return static_cast<int>(weights_.size()); }
    int dim() const { return kind_ == ManifoldKind::circle ? 1 : 2; }
    double step1() const { return step1_; }
    double step2() const { return step2_; }
    /// Largest geodesic node spacing.
    double spacing() const;
    int index(int i, int j) const { return i * n2_ + j; }
    double coord1(int node) const { return c1_[node]; }
    double coord2(int node) const { return c2_[node]; }
    std::array<double, 3> embed(int node) const;

    const Eigen::VectorXd& weights() const { return weights_; }
    const SparseMatrix& stiffness() const { return stiffness_; }
    /// e^{2 rho} per node; all ones unless the metric is conformally perturbed.
    const Eigen::VectorXd& conformal() const { return conformal_; }
    double volume() const { return weights_.sum(); }

    ScalarField laplacian(const ScalarField& f) const;
    VectorField gradient(const ScalarField& f) const;
    ScalarField inner(const VectorField& x, const VectorField& y) const;
    /// <X, grad f> = df(X).
    ScalarField directional(const VectorField& x, const ScalarField& f) const;
    ScalarField grad_norm2(const ScalarField& f) const;
    double integrate(const ScalarField& f) const;
    double dot(const ScalarField& f, const ScalarField& g) const;

    /// Same grid under the metric e^{2 rho} g (two-dimensional grids only).
    ManifoldGrid conformally_scaled(const Eigen::VectorXd& rho) const;

private:
    void check(const ScalarField& f) const;
    void finish(std::vector<Eigen::Triplet<double>>& t);

    ManifoldKind kind_ = ManifoldKind::circle;
    int n1_ = 0, n2_ = 1;
    double size1_ = 0.0, size2_ = 0.0;
    double step1_ = 0.0, step2_ = 0.0;
    Eigen::VectorXd c1_, c2_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd conformal_;
    SparseMatrix stiffness_;
};

std::vector<KillingField> killing_fields(const ManifoldGrid& g);
double killing_defect(const ManifoldGrid& g, const VectorField& x);

/// Discrete E(u) = eps/2 * (-u^T K u) + sum_i w_i W(u_i) / eps.
double energy(const ManifoldGrid& g, const ScalarField& u, const DoubleWell& w, double eps);

}  // namespace ac
