#include "allen_cahn/ansatz.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>

namespace ac {

namespace {
// max of |d/ds| of the quintic step on [0, 1]
constexpr double kQuinticPeak = 1.875;
}  // namespace

double CutoffFamily::operator()(int k, double z) const {
    if (k < 1 || k > 5) throw rejected("cutoff index must lie in 1..5");
    return smooth_cutoff(z, inner(k), outer(k));
}

double CutoffFamily::slope(int k, double z) const {
    const double a = std::abs(z), lo = inner(k), hi = outer(k);
    if (a <= lo || a >= hi) return 0.0;
    const double s = (a - lo) / (hi - lo);
    const double d = -30.0 * s * s * (1.0 - s) * (1.0 - s) / (hi - lo);
    return z < 0 ? -d : d;
}

double CutoffFamily::max_slope(int k) const { return kQuinticPeak / (outer(k) - inner(k)); }

CutoffFamily cutoffs(double eps, double delta_star, double tau) {
    if (!(eps > 0.0 && eps < 1.0)) throw rejected("cutoffs: eps must lie in (0,1)");
    if (!(delta_star > 0.0 && delta_star < 1.0)) throw rejected("cutoffs: delta* must lie in (0,1)");
    CutoffFamily c;
    c.eps = eps;
    c.delta_star = delta_star;
    c.scale = std::pow(eps, delta_star);
    if (!(1.02 * c.scale < tau)) throw rejected("cutoffs: Fermi tube narrower than 1.02 eps^delta*");
    return c;
}

ScalarField cutoff_field(const InterfaceGeometry& geo, const CutoffFamily& cut, int k) {
    ScalarField out = ScalarField::Zero(geo.manifold_size());
    for (int node = 0; node < geo.manifold_size(); ++node)
        if (geo.node_gamma(node) >= 0) out[node] = cut(k, geo.node_z(node));
    return out;
}

ScalarField approximate_solution(const InterfaceGeometry& geo, const Heteroclinic& h, double eps,
                                 const CutoffFamily& cut) {
    const int n = geo.manifold_size();
    ScalarField out(n);
    for (int node = 0; node < n; ++node) {
        const double side = geo.node_side(node);
        if (geo.node_gamma(node) < 0) {
            out[node] = side;
            continue;
        }
        const double z = geo.node_z(node);
        const double cutoff = cut(1, z);
        if (cutoff == 0.0) out[node] = side;
        else if (cutoff == 1.0) out[node] = h.profile(z / eps);
        else out[node] = cutoff * h.profile(z / eps) + side * (1.0 - cutoff);
    }
    return out;
}

GraphDiffeo::GraphDiffeo(const InterfaceGeometry& geo, const CutoffFamily& cut, SurfaceField displacement)
    : geo_(&geo), cut_(cut), displacement_(std::move(displacement)) {
    if (displacement_.size() != geo.gamma_size()) throw rejected("graph map: displacement size does not match the interface");
    const double sup = displacement_.size() ? displacement_.cwiseAbs().maxCoeff() : 0.0;
    if (!std::isfinite(sup)) throw rejected("graph map: displacement is not finite");
    if (sup >= admissible_bound(cut)) throw rejected("graph map: displacement too large, shift is not monotone in z");
    identity_ = sup == 0.0;
}

double GraphDiffeo::admissible_bound(const CutoffFamily& cut) {
    return std::min(cut.scale / 100.0, 0.9 / cut.max_slope(2));
}

double GraphDiffeo::forward(int y, double z) const { return z - cut_(2, z) * displacement_[y]; }

double GraphDiffeo::inverse(int y, double z) const {
    const double s = displacement_[y];
    if (s == 0.0) return z;
    // the root lies in [z - |s|, z + |s|]; outside supp cut2 on that whole bracket it is z
    if (std::abs(z) - std::abs(s) >= cut_.outer(2)) return z;
    if (std::abs(z) + std::abs(s) <= cut_.inner(2)) return z + s;
    const auto f = [&](double x) {
        return std::make_pair(x - cut_(2, x) * s - z, 1.0 - cut_.slope(2, x) * s);
    };
    const double lo = z - std::abs(s) - 1e-15, hi = z + std::abs(s) + 1e-15;
    std::uintmax_t iters = 60;
    return boost::math::tools::newton_raphson_iterate(f, std::clamp(z + cut_(2, z) * s, lo, hi), lo, hi, 52, iters);
}

ScalarField GraphDiffeo::remap(const ScalarField& u, bool inv) const {
    if (u.size() != geo_->manifold_size()) throw rejected("graph map: field size mismatch");
    if (identity_) return u;
    ScalarField out = u;
    for (int node = 0; node < geo_->manifold_size(); ++node) {
        const int y = geo_->node_gamma(node);
        if (y < 0 || displacement_[y] == 0.0) continue;
        const double z = geo_->node_z(node);
        const double target = inv ? inverse(y, z) : forward(y, z);
        if (target == z) continue;
        out[node] = geo_->interpolate(u, y, target);
    }
    return out;
}

ScalarField GraphDiffeo::pull(const ScalarField& u) const { return remap(u, false); }
ScalarField GraphDiffeo::push(const ScalarField& u) const { return remap(u, true); }

ScalarField conjugated_laplacian(const ManifoldGrid& g, const GraphDiffeo& d, const ScalarField& f) {
    if (d.identity()) return g.laplacian(f);
    return d.push(g.laplacian(d.pull(f)));
}

ScalarField transported_operator(const ManifoldGrid& g, const GraphDiffeo& d, const DoubleWell& w, double eps,
                  const ScalarField& base) {
    ScalarField out = eps * eps * conjugated_laplacian(g, d, base);
    for (int i = 0; i < out.size(); ++i) out[i] -= w.d1(base[i]);
    return out;
}

ScalarField quadratic_remainder(const DoubleWell& w, const ScalarField& base, const ScalarField& v) {
    if (base.size() != v.size()) throw rejected("quadratic_remainder: size mismatch");
    ScalarField out(v.size());
    for (int i = 0; i < v.size(); ++i) {
        const double b = base[i], x = v[i];
        out[i] = x == 0.0 ? 0.0 : w.d1(b + x) - w.d1(b) - w.d2(b) * x;
    }
    return out;
}

double c2_proxy(const ManifoldGrid& g, double eps, const ScalarField& v) {
    if (v.size() == 0) return 0.0;
    const double sup = v.cwiseAbs().maxCoeff();
    const double grad = std::sqrt(g.grad_norm2(v).maxCoeff());
    const double lap = g.laplacian(v).cwiseAbs().maxCoeff();
    return sup + eps * grad + eps * eps * lap;
}

double tube_c2_proxy(const InterfaceGeometry& geo, const TubeLayout& tube, double eps, const Eigen::VectorXd& v) {
    if (v.size() == 0) return 0.0;
    double sup = v.cwiseAbs().maxCoeff(), dt = 0.0, lap = 0.0;
    const auto at = [&](int y, int k) { return k < 0 || k >= tube.n_t ? 0.0 : v[tube.at(y, k)]; };
    Eigen::VectorXd slice(tube.n_gamma);
    for (int k = 0; k < tube.n_t; ++k) {
        for (int y = 0; y < tube.n_gamma; ++y) slice[y] = at(y, k);
        const SurfaceField sl = geo.surface_laplacian(slice);
        for (int y = 0; y < tube.n_gamma; ++y) {
            const double d1 = (at(y, k + 1) - at(y, k - 1)) / (2.0 * tube.dt);
            const double d2 = (at(y, k + 1) - 2.0 * at(y, k) + at(y, k - 1)) / (tube.dt * tube.dt);
            dt = std::max(dt, std::abs(d1));
            lap = std::max(lap, std::abs(d2 + sl[y]));
        }
    }
    return sup + eps * dt + eps * eps * lap;
}

double surface_c2_proxy(const InterfaceGeometry& geo, const SurfaceField& displacement) {
    if (displacement.size() == 0) return 0.0;
    const Eigen::MatrixXd& k = geo.gamma_stiffness();
    double slope = 0.0;
    for (int i = 0; i < k.rows(); ++i)
        for (int j = 0; j < k.cols(); ++j)
            if (i != j && k(i, j) != 0.0) slope = std::max(slope, std::abs(displacement[i] - displacement[j]) * k(i, j));
    return displacement.cwiseAbs().maxCoeff() + slope + geo.surface_laplacian(displacement).cwiseAbs().maxCoeff();
}

StateNorms state_norms(const ManifoldGrid& g, const InterfaceGeometry& geo, const TubeLayout& tube,
                       const CutoffFamily& cut, double alpha, const ScalarField& v_outer,
                       const Eigen::VectorXd& v_tube, const SurfaceField& displacement) {
    const double eps = cut.eps;
    StateNorms n;
    const ScalarField cut5 = cutoff_field(geo, cut, 5);
    n.flat = c2_proxy(g, eps, cut5.cwiseProduct(v_outer)) / (eps * eps) + c2_proxy(g, eps, v_outer);
    n.sharp = tube_c2_proxy(geo, tube, eps, v_tube);
    n.displacement = std::pow(eps, 2.0 * alpha) * surface_c2_proxy(geo, displacement);
    return n;
}

}  // namespace ac
