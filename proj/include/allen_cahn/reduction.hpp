#pragma once

#include "allen_cahn/ansatz.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <memory>

namespace ac {

/// Interface grid times a uniform normal grid on [-1.02 eps^delta*, 1.02 eps^delta*].
///
/// The normal nodes coincide with the manifold column nodes, so tube values and manifold
/// values at the same point are the same unknown.
struct TubeGrid {
    TubeLayout layout;
    int offset = 0;                  ///< column position of t_0
    std::vector<int> nodes;          ///< manifold node of each tube entry
    Eigen::VectorXd profile;            ///< psi(t_k / eps)
    Eigen::VectorXd slope;           ///< psi'(t_k / eps)
    Eigen::VectorXd kernel_profile;  ///< near-kernel vector e0 of the discrete 1D operator
    double kernel_eigenvalue = 0.0;
    double reach = 0.0;

    int size() const { return layout.size(); }
    /// Extension by zero to the manifold.
    ScalarField to_manifold(const Eigen::VectorXd& w, int manifold_size) const;
    /// Restriction of a manifold field to the tube nodes.
    Eigen::VectorXd from_manifold(const ScalarField& f) const;
    /// e0 at an arbitrary height (cubic interpolation, zero beyond the ends).
    double profile_at(double t) const;
};

TubeGrid tube_grid(const ManifoldGrid& g, const InterfaceGeometry& geo, const Heteroclinic& h, const CutoffFamily& cut);

/// Per-column coefficient of the projection onto e0.
SurfaceField project_pi(const TubeGrid& tg, const Eigen::VectorXd& w);
Eigen::VectorXd project_perp(const TubeGrid& tg, const Eigen::VectorXd& w);
/// a(y) e0(t)
Eigen::VectorXd lift(const TubeGrid& tg, const SurfaceField& a);
/// max_y |sum_t w(y,t) e0(t) dt|
double orthogonality_defect(const TubeGrid& tg, const Eigen::VectorXd& w);

/// L = eps^2 (d_tt + Delta_Gamma) - W''(psi) on the tube and the well operator
/// eps^2 Delta - W''(1) on the manifold.
class LinearOperators {
public:
    LinearOperators(const ManifoldGrid& g, const InterfaceGeometry& geo, const TubeGrid& tg, const DoubleWell& w,
                    double eps);

    Eigen::VectorXd apply_L(const Eigen::VectorXd& v) const;
    /// Orthogonal solution of L w = f for f orthogonal to e0 per column.
    Eigen::VectorXd solve_L(const Eigen::VectorXd& f) const;
    ScalarField apply_well(const ScalarField& v) const;
    ScalarField solve_well(const ScalarField& f) const;
    const SparseMatrix& tube_matrix() const { return l_; }

private:
    const ManifoldGrid* g_;
    const TubeGrid* tg_;
    double eps_, well_curvature_;
    SparseMatrix l_;
    std::shared_ptr<Eigen::SparseLU<SparseMatrix>> saddle_;
    std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix>> well_;
};

struct FixedPointConfig {
    double tol_fp = 1e-3;
    int max_iter = 60;
    /// after reaching tol_fp eps^2, keep iterating while the step keeps shrinking
    double polish_tol = 1e-12;
    int polish_iter = 60;
    double alpha = 0.125;
    /// relaxation factor from the first step on; with 1.0 the safeguard drops it to 0.5 after two
    /// consecutive ratios above 0.9
    double initial_relaxation = 0.5;
    bool relaxation = true;
};

struct FixedPointReport {
    bool converged = false;
    bool aborted = false;
    std::string abort_reason;
    int iterations = 0;         ///< iterations to reach tol_fp eps^2
    int total_iterations = 0;   ///< including polishing
    std::vector<double> history;
    std::vector<double> ratios;
    std::vector<double> c_history;
    double relaxation = 1.0;
    ReducedState state;
    ScalarField u;
    double assembled_residual = 0.0;
    double state_norm = 0.0;
    double displacement_orthogonality = 0.0;  ///< max over iterates of max_i |<zhat_i, displacement>|
};

/// Lyapunov-Schmidt reduction around a fixed interface.
class Reduction {
public:
    Reduction(const ManifoldGrid& g, const InterfaceGeometry& geo, const JacobiSystem& js, const Heteroclinic& h,
              double eps, double delta_star);

    const CutoffFamily& cut() const { return cut_; }
    const TubeGrid& tube() const { return tube_; }
    const LinearOperators& ops() const { return *ops_; }
    const ScalarField& base() const { return base_; }
    const ScalarField& cut_field(int k) const { return cut_fields_.at(k - 1); }
    double eps() const { return eps_; }
    /// Scalar estimate of the zeroth-order displacement response of the projected equation.
    double displacement_gain() const { return displacement_gain_; }

    ReducedState zero_state() const;
    ScalarField outer_source(const ReducedState& s) const;
    Eigen::VectorXd tube_source(const ReducedState& s) const;
    /// One application of the fixed-point map; the returned state carries the constants c.
    /// The displacement update solves (J - gain) displacement' = f(displacement) - gain displacement, which has the same fixed points.
    ReducedState step(const ReducedState& s) const;
    /// (shifted_profile + cut4 v_tube + v_outer) o D
    ScalarField solution(const ReducedState& s) const;
    /// sup | eps^2 Delta u - W'(u) + eps sum_j c_j zhat_j e0 cut4 | at the shifted heights.
    double assembled_residual(const ReducedState& s) const;
    FixedPointReport fixed_point(const FixedPointConfig& cfg) const;

private:
    struct Pieces {
        ScalarField n;
        Eigen::VectorXd m;
    };
    Pieces assemble(const ReducedState& s) const;
    ReducedState difference(const ReducedState& a, const ReducedState& b) const;

    const ManifoldGrid* g_;
    const InterfaceGeometry* geo_;
    const JacobiSystem* js_;
    const Heteroclinic* h_;
    double eps_;
    CutoffFamily cut_;
    TubeGrid tube_;
    std::shared_ptr<LinearOperators> ops_;
    ScalarField base_;
    std::vector<ScalarField> cut_fields_;
    ScalarField plateau4_;  ///< indicator of {cut4 = 1}
    double displacement_gain_ = 0.0;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 60;
    /// extra full steps after reaching tol, stopping when the residual stops shrinking
    int polish = 3;
};

struct NewtonResult {
    ScalarField u;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool trivial = false;
    std::string status;
};

/// -eps^2 Delta u + W'(u)
ScalarField allen_cahn_residual(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u);

/// Damped Newton on -eps^2 Delta u + W'(u) = 0 with a sparse LU Jacobian.
NewtonResult newton_solve(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u0,
                          const NewtonOptions& opt = {});

/// (1/eps) integral of (-eps^2 Delta u + W'(u)) <Y, grad u>.
double killing_pairing(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u,
                       const VectorField& y);

struct CVanishingVerdict {
    Eigen::MatrixXd a;           ///< A_ij for selected Killing fields i and kernel vectors j
    Eigen::MatrixXd b;           ///< beta_ij for the same rows
    double structure_error = 0.0;  ///< ||A / sigma_energy - B|| / ||B||
    double condition = 0.0;
    Eigen::VectorXd pairings;
    Eigen::VectorXd c_pairing;   ///< solves A c = -pairings
    double max_c_fixed_point = 0.0;
    double max_c_pairing = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string reason;
};

CVanishingVerdict c_vanishing_check(const ManifoldGrid& g, const InterfaceGeometry& geo, const JacobiSystem& js,
                                    const Heteroclinic& h, const Reduction& red, const FixedPointReport& report,
                                    double tol_fp, double structure_tol = 0.05);

}  // namespace ac
