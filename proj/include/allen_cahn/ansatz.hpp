#pragma once

#include "allen_cahn/interface.hpp"

namespace ac {

/// Nested smooth cutoffs cut1..cut5 in the normal coordinate.
struct CutoffFamily {
    double eps = 0.0;
    double delta_star = 0.0;
    double scale = 0.0;  ///< eps^delta_star

    double inner(int k) const { return scale * (101 - 2 * k) / 100.0; }
    double outer(int k) const { return scale * (102 - 2 * k) / 100.0; }
    double operator()(int k, double z) const;
    /// d/dz cut_k.
    double slope(int k, double z) const;
    /// sup |d/dz cut_k|.
    double max_slope(int k) const;
};

/// Rejects eps or delta* outside (0,1) and tubes narrower than 1.02 eps^delta*.
CutoffFamily cutoffs(double eps, double delta_star, double tau);

/// cut_k at every manifold node (zero off the Fermi chart).
ScalarField cutoff_field(const InterfaceGeometry& geo, const CutoffFamily& cut, int k);

/// cut1 psi(z/eps) + side (1 - cut1), and +-1 off the tube.
ScalarField approximate_solution(const InterfaceGeometry& geo, const Heteroclinic& h, double eps,
                                 const CutoffFamily& cut);

/// Graph diffeomorphism Z(y, z) -> Z(y, z - cut2(z) displacement(y)) and its pullbacks.
class GraphDiffeo {
public:
    GraphDiffeo(const InterfaceGeometry& geo, const CutoffFamily& cut, SurfaceField displacement);

    /// Largest admissible sup |displacement|: keeps z - cut2(z) s strictly increasing.
    static double admissible_bound(const CutoffFamily& cut);

    const SurfaceField& displacement() const { return displacement_; }
    bool identity() const { return identity_; }
    double forward(int y, double z) const;
    double inverse(int y, double z) const;
    /// u o D
    ScalarField pull(const ScalarField& u) const;
    /// u o D^{-1}
    ScalarField push(const ScalarField& u) const;

private:
    ScalarField remap(const ScalarField& u, bool inverse) const;

    const InterfaceGeometry* geo_;
    CutoffFamily cut_;
    SurfaceField displacement_;
    bool identity_ = true;
};

/// eps^2 Delta(f o D) o D^{-1}
ScalarField conjugated_laplacian(const ManifoldGrid& g, const GraphDiffeo& d, const ScalarField& f);

/// eps^2 Delta(base o D) o D^{-1} - W'(base).
ScalarField transported_operator(const ManifoldGrid& g, const GraphDiffeo& d, const DoubleWell& w, double eps,
                  const ScalarField& base);

/// W'(base + v) - W'(base) - W''(base) v, pointwise.
ScalarField quadratic_remainder(const DoubleWell& w, const ScalarField& base, const ScalarField& v);

struct StateNorms {
    double flat = 0.0;
    double sharp = 0.0;
    double displacement = 0.0;
    double total() const { return flat + sharp + displacement; }
};

/// Reduction unknowns: correction off the tube, orthogonal tube correction, normal graph.
struct ReducedState {
    ScalarField v_outer;
    Eigen::VectorXd v_tube;
    SurfaceField displacement;
    Eigen::VectorXd c;
    StateNorms norms;
};

/// sup|v| + eps sup|grad v| + eps^2 sup|Delta v|.
double c2_proxy(const ManifoldGrid& g, double eps, const ScalarField& v);
/// Tube analogue with the product Laplacian d_tt + Delta_Gamma and Dirichlet ends.
double tube_c2_proxy(const InterfaceGeometry& geo, const TubeLayout& tube, double eps, const Eigen::VectorXd& v);
/// sup|displacement| + sup|displacement'| + sup|Delta_Gamma displacement|.
double surface_c2_proxy(const InterfaceGeometry& geo, const SurfaceField& displacement);

StateNorms state_norms(const ManifoldGrid& g, const InterfaceGeometry& geo, const TubeLayout& tube,
                       const CutoffFamily& cut, double alpha, const ScalarField& v_outer,
                       const Eigen::VectorXd& v_tube, const SurfaceField& displacement);

}  // namespace ac
