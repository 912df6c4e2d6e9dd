#include "allen_cahn/interface.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace ac {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap(double x, double period) {
    // representative in (-period/2, period/2]
    double r = std::fmod(x, period);
    if (r > 0.5 * period) r -= period;
    if (r <= -0.5 * period) r += period;
    return r;
}

Eigen::MatrixXd periodic_stiffness(int n, double h) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    const double c = 1.0 / h;
    for (int i = 0; i < n; ++i) {
        const int r = (i + 1) % n;
        k(i, r) += c;
        k(r, i) += c;
        k(i, i) -= c;
        k(r, r) -= c;
    }
    return k;
}
}  // namespace

std::string to_string(InterfaceKind k) {
    switch (k) {
        case InterfaceKind::antipodal_pair: return "antipodal_pair";
        case InterfaceKind::meridian_pair: return "meridian_pair";
        case InterfaceKind::equator: return "equator";
    }
    return "unknown";
}

InterfaceKind interface_kind_from_string(const std::string& s) {
    if (s == "antipodal_pair") return InterfaceKind::antipodal_pair;
    if (s == "meridian_pair") return InterfaceKind::meridian_pair;
    if (s == "equator") return InterfaceKind::equator;
    throw rejected("unsupported interface: " + s);
}

InterfaceKind default_interface(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::circle: return InterfaceKind::antipodal_pair;
        case ManifoldKind::torus: return InterfaceKind::meridian_pair;
        case ManifoldKind::sphere: return InterfaceKind::equator;
    }
    return InterfaceKind::equator;
}

void cubic_weights(double s, int& first, double w[4]) {
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-10) s = r;
    const int i = static_cast<int>(std::floor(s));
    const double t = s - i;
    first = i - 1;
    w[0] = -t * (t - 1) * (t - 2) / 6.0;
    w[1] = (t + 1) * (t - 1) * (t - 2) / 2.0;
    w[2] = -(t + 1) * t * (t - 2) / 2.0;
    w[3] = (t + 1) * t * (t - 1) / 6.0;
}

InterfaceGeometry InterfaceGeometry::build(const ManifoldGrid& g, InterfaceKind which, double tau) {
    InterfaceGeometry geo;
    geo.kind_ = which;
    geo.mkind_ = g.kind();
    geo.size1_ = g.size1();
    geo.size2_ = g.size2();
    const int n = g.size();
    geo.node_gamma_.assign(n, -1);
    geo.node_z_.assign(n, 0.0);
    geo.node_side_.assign(n, 0);

    if (which != default_interface(g.kind()))
        throw rejected("interface " + to_string(which) + " is not supported on the " + to_string(g.kind()));

    if (which == InterfaceKind::equator) {
        geo.tau_ = tau > 0 ? tau : kPi / 3.0;
        if (geo.tau_ >= 0.5 * kPi) throw rejected("equator tube must stay away from the poles");
        const int nt = g.n1(), np = g.n2();
        const double hp = g.step2();
        geo.gamma_weights_ = Eigen::VectorXd::Constant(np, hp);
        geo.component_.assign(np, 0);
        geo.columns_.resize(np);
        for (int k = 0; k < np; ++k) geo.gamma_coord_.push_back(k * hp);
        std::vector<int> rows;
        for (int j = nt - 1; j >= 0; --j) {
            const double z = 0.5 * kPi - (j + 0.5) * g.step1();
            if (std::abs(z) < geo.tau_) rows.push_back(j);
        }
        geo.col_dz_ = g.step1();
        geo.col_z0_ = 0.5 * kPi - (rows.front() + 0.5) * g.step1();
        for (int k = 0; k < np; ++k)
            for (int j : rows) geo.columns_[k].push_back(g.index(j, k));
        for (int node = 0; node < n; ++node) {
            const double z = 0.5 * kPi - g.coord1(node);
            geo.node_side_[node] = z > 0 ? 1 : -1;
            if (std::abs(z) < geo.tau_) {
                geo.node_gamma_[node] = node % np;
                geo.node_z_[node] = z;
            }
        }
        geo.a2_.assign(np, 0.0);
        geo.ric_.assign(np, 1.0);
        geo.gamma_stiffness_ = periodic_stiffness(np, hp);
        SurfaceField zx(np), zy(np), zz = SurfaceField::Zero(np);
        for (int k = 0; k < np; ++k) {
            // nu is the unit northward normal -d/dtheta; <X, nu> = -X^theta
            zx[k] = std::sin(k * hp);
            zy[k] = -std::cos(k * hp);
        }
        geo.killing_jacobi_ = {zx, zy, zz};
        geo.killing_labels_ = {"rotation_x", "rotation_y", "rotation_z"};
        geo.analytic_gap_ = 1.0;
        return geo;
    }

    // Flat cases: two parallel components at s = 0 and s = L/2 along the first axis.
    const int na = g.n1();
    if (na % 2 != 0) throw rejected("interface needs an even node count along the normal axis");
    const double la = g.size1();
    const double ha = g.step1();
    geo.tau_ = tau > 0 ? tau : 0.25 * la;
    if (geo.tau_ > 0.25 * la + 1e-12) throw rejected("tube radius exceeds a quarter period");
    const int nb = which == InterfaceKind::meridian_pair ? g.n2() : 1;
    const double hb = which == InterfaceKind::meridian_pair ? g.step2() : 1.0;
    const int ng = 2 * nb;
    geo.gamma_weights_ = Eigen::VectorXd::Constant(ng, which == InterfaceKind::meridian_pair ? hb : 1.0);
    geo.columns_.resize(ng);
    for (int c = 0; c < 2; ++c)
        for (int l = 0; l < nb; ++l) {
            geo.component_.push_back(c);
            geo.gamma_coord_.push_back(which == InterfaceKind::meridian_pair ? l * hb : c * 0.5 * la);
        }
    std::vector<int> offsets;
    for (int i = -na / 2; i <= na / 2; ++i)
        if (std::abs(i * ha) < geo.tau_) offsets.push_back(i);
    geo.col_dz_ = ha;
    geo.col_z0_ = offsets.front() * ha;
    for (int c = 0; c < 2; ++c)
        for (int l = 0; l < nb; ++l) {
            const int y = c * nb + l;
            for (int off : offsets) {
                // component 1 has its normal pointing toward decreasing s
                const int i = c == 0 ? ((off % na) + na) % na : ((na / 2 - off) % na + na) % na;
                geo.columns_[y].push_back(g.index(i, l));
            }
        }
    for (int node = 0; node < n; ++node) {
        const double s = g.coord1(node);
        const double z0 = wrap(s, la);
        const double z1 = wrap(0.5 * la - s, la);
        geo.node_side_[node] = (s > 0 && s < 0.5 * la) ? 1 : -1;
        const int l = which == InterfaceKind::meridian_pair ? node % nb : 0;
        if (std::abs(z0) < geo.tau_) {
            geo.node_gamma_[node] = l;
            geo.node_z_[node] = z0;
            geo.node_side_[node] = z0 >= 0 ? 1 : -1;
        } else if (std::abs(z1) < geo.tau_) {
            geo.node_gamma_[node] = nb + l;
            geo.node_z_[node] = z1;
            geo.node_side_[node] = z1 >= 0 ? 1 : -1;
        }
    }
    geo.a2_.assign(ng, 0.0);
    geo.ric_.assign(ng, 0.0);
    geo.gamma_stiffness_ = Eigen::MatrixXd::Zero(ng, ng);
    if (which == InterfaceKind::meridian_pair) {
        geo.gamma_stiffness_.topLeftCorner(nb, nb) = periodic_stiffness(nb, hb);
        geo.gamma_stiffness_.bottomRightCorner(nb, nb) = periodic_stiffness(nb, hb);
        SurfaceField zx(ng), zy = SurfaceField::Zero(ng);
        for (int y = 0; y < ng; ++y) zx[y] = y < nb ? 1.0 : -1.0;
        geo.killing_jacobi_ = {zx, zy};
        geo.killing_labels_ = {"translation_x", "translation_y"};
        geo.analytic_gap_ = std::pow(2.0 * kPi / g.size2(), 2);
    } else {
        geo.killing_jacobi_ = {(SurfaceField(2) << 1.0, -1.0).finished()};
        geo.killing_labels_ = {"rotation"};
        geo.analytic_gap_ = 1.0;
    }
    return geo;
}

std::array<double, 2> InterfaceGeometry::fermi(int y, double z) const {
    if (kind_ == InterfaceKind::equator) return {0.5 * kPi - z, gamma_coord_[y]};
    const double half = 0.5 * size1_;
    const double s = component_[y] == 0 ? z : half - z;
    const double wrapped = std::fmod(std::fmod(s, size1_) + size1_, size1_);
    return {wrapped, kind_ == InterfaceKind::meridian_pair ? gamma_coord_[y] : 0.0};
}

std::pair<int, double> InterfaceGeometry::fermi_inverse(double c1, double c2) const {
    if (kind_ == InterfaceKind::equator) {
        const double z = 0.5 * kPi - c1;
        if (std::abs(z) >= tau_) return {-1, z};
        const int np = gamma_size();
        const double hp = 2.0 * kPi / np;
        const int y = ((static_cast<int>(std::lround(c2 / hp)) % np) + np) % np;
        return {y, z};
    }
    const double la = size1_;
    const int nb = kind_ == InterfaceKind::meridian_pair ? gamma_size() / 2 : 1;
    int l = 0;
    if (kind_ == InterfaceKind::meridian_pair) {
        const double hb = size2_ / nb;
        l = ((static_cast<int>(std::lround(c2 / hb)) % nb) + nb) % nb;
    }
    const double z0 = wrap(c1, la);
    if (std::abs(z0) < tau_) return {l, z0};
    const double z1 = wrap(0.5 * la - c1, la);
    if (std::abs(z1) < tau_) return {nb + l, z1};
    return {-1, 0.0};
}

double InterfaceGeometry::mean_curvature(double z) const {
    return kind_ == InterfaceKind::equator ? std::tan(z) : 0.0;
}

double InterfaceGeometry::jacobian(int, double z) const {
    return kind_ == InterfaceKind::equator ? std::cos(z) : 1.0;
}

double InterfaceGeometry::metric_factor(double z) const {
    return kind_ == InterfaceKind::equator ? std::pow(std::cos(z), 2) : 1.0;
}

double InterfaceGeometry::interpolate(const ScalarField& f, int y, double z) const {
    const auto& col = columns_[y];
    int first;
    double w[4];
    cubic_weights((z - col_z0_) / col_dz_, first, w);
    if (first < 0 || first + 3 >= static_cast<int>(col.size()))
        throw rejected("column interpolation outside the Fermi chart");
    return w[0] * f[col[first]] + w[1] * f[col[first + 1]] + w[2] * f[col[first + 2]] + w[3] * f[col[first + 3]];
}

SurfaceField InterfaceGeometry::surface_laplacian(const SurfaceField& f) const {
    return (gamma_stiffness_ * f).cwiseQuotient(gamma_weights_);
}

double JacobiSystem::dot(const SurfaceField& a, const SurfaceField& b) const {
    return (weights.array() * a.array() * b.array()).sum();
}

JacobiSystem jacobi_system(const InterfaceGeometry& geo, double null_threshold) {
    JacobiSystem js;
    const int n = geo.gamma_size();
    js.weights = geo.gamma_weights();
    Eigen::VectorXd pot(n);
    for (int y = 0; y < n; ++y) pot[y] = geo.second_fundamental_sq(y) + geo.ricci_normal(y);
    const Eigen::MatrixXd& k = geo.gamma_stiffness();
    js.op = js.weights.cwiseInverse().asDiagonal() * k;
    js.op.diagonal() += pot;

    const Eigen::VectorXd isw = js.weights.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd sym = -(isw.asDiagonal() * k * isw.asDiagonal());
    sym.diagonal() -= pot;
    sym = 0.5 * (sym + sym.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    js.eigenvalues = es.eigenvalues();
    js.eigenvectors = isw.asDiagonal() * es.eigenvectors();

    js.threshold = null_threshold > 0 ? null_threshold : 0.3 * geo.analytic_gap();
    std::vector<int> null_cols;
    for (int i = 0; i < n; ++i) {
        const double l = js.eigenvalues[i];
        if (l < -js.threshold) ++js.index;
        else if (std::abs(l) <= js.threshold) null_cols.push_back(i);
        if (std::abs(std::abs(l) - js.threshold) <= 0.1 * js.threshold) js.ambiguous = true;
    }
    js.nullity = static_cast<int>(null_cols.size());
    js.kernel.resize(n, js.nullity);
    for (int j = 0; j < js.nullity; ++j) js.kernel.col(j) = js.eigenvectors.col(null_cols[j]);

    js.killing_jacobi = geo.killing_jacobi();
    js.killing_labels = geo.killing_labels();
    const int m = static_cast<int>(js.killing_jacobi.size());
    js.b_all.resize(m, js.nullity);
    double scale = 0.0;
    for (int i = 0; i < m; ++i) {
        const SurfaceField& zi = js.killing_jacobi[i];
        SurfaceField rest = zi;
        for (int l = 0; l < js.nullity; ++l) {
            js.b_all(i, l) = js.dot(zi, js.kernel.col(l));
            rest -= js.b_all(i, l) * js.kernel.col(l);
        }
        js.kernel_residual = std::max(js.kernel_residual, rest.cwiseAbs().maxCoeff());
        scale = std::max(scale, zi.cwiseAbs().maxCoeff());
    }

    // independent subset by weighted Gram-Schmidt, rank tolerance 1e-8
    std::vector<SurfaceField> basis;
    for (int i = 0; i < m; ++i) {
        SurfaceField r = js.killing_jacobi[i];
        const double norm0 = std::sqrt(std::max(js.dot(r, r), 0.0));
        for (const auto& q : basis) r -= js.dot(r, q) * q;
        const double norm = std::sqrt(std::max(js.dot(r, r), 0.0));
        if (norm0 > 0 && norm > 1e-8 * std::max(norm0, 1.0)) {
            basis.push_back(r / norm);
            js.selected.push_back(i);
        }
    }
    js.killing_rank = static_cast<int>(js.selected.size());
    js.b.resize(js.killing_rank, js.nullity);
    for (int r = 0; r < js.killing_rank; ++r) js.b.row(r) = js.b_all.row(js.selected[r]);
    if (js.b.rows() == js.b.cols() && js.b.rows() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(js.b);
        const auto& s = svd.singularValues();
        js.b_condition = s[s.size() - 1] > 0 ? s[0] / s[s.size() - 1] : INFINITY;
    } else {
        js.b_condition = INFINITY;
    }
    js.hypothesis = js.killing_rank == js.nullity && js.b.rows() == js.b.cols() && js.b_condition < 1e8 &&
                    js.kernel_residual <= 1e-6 * std::max(scale, 1.0) && !js.ambiguous;
    return js;
}

ProjectedSolution solve_jacobi_projected(const JacobiSystem& js, const SurfaceField& f, double shift) {
    const int n = static_cast<int>(js.weights.size());
    const int j = js.nullity;
    if (f.size() != n) throw rejected("projected Jacobi solve: field size does not match the interface");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + j, n + j);
    a.topLeftCorner(n, n) = js.weights.asDiagonal() * js.op;
    a.topLeftCorner(n, n).diagonal() -= shift * js.weights;
    a.topRightCorner(n, j) = -(js.weights.asDiagonal() * js.kernel);
    a.bottomLeftCorner(j, n) = (js.weights.asDiagonal() * js.kernel).transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + j);
    rhs.head(n) = js.weights.cwiseProduct(f);

    // repeated solves against the same system reuse the factorization
    static thread_local Eigen::MatrixXd cached_matrix;
    static thread_local Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    if (cached_matrix.rows() != a.rows() || cached_matrix != a) {
        lu.compute(a);
        cached_matrix = a;
        if (!(lu.rcond() > 1e-14)) throw rejected("projected Jacobi solve: singular saddle system");
    }
    const Eigen::VectorXd x = lu.solve(rhs);

    ProjectedSolution out;
    out.displacement = x.head(n);
    out.c = x.tail(j);
    SurfaceField r = js.op * out.displacement - shift * out.displacement - f;
    for (int i = 0; i < j; ++i) r -= out.c[i] * js.kernel.col(i);
    const double fn = std::sqrt(js.dot(f, f));
    out.residual = fn > 0 ? std::sqrt(js.dot(r, r)) / fn : std::sqrt(js.dot(r, r));
    return out;
}

LatticeOracle clifford_torus_oracle(int max_mode) {
    LatticeOracle o;
    for (int a = -max_mode; a <= max_mode; ++a)
        for (int b = -max_mode; b <= max_mode; ++b) {
            const int q = a * a + b * b;
            const double lam = 2.0 * q - 4.0;
            o.eigenvalues.push_back(lam);
            if (q < 2) ++o.index;
            else if (q == 2) ++o.nullity;
        }
    std::sort(o.eigenvalues.begin(), o.eigenvalues.end());
    return o;
}

double tube_value(const TubeLayout& tube, const Eigen::VectorXd& values, int y, double t) {
    const double s = (t - tube.t0) / tube.dt;
    if (s < -1.0 - 1e-9 || s > tube.n_t + 1e-9) throw rejected("tube evaluation outside the tube");
    int first;
    double w[4];
    cubic_weights(s, first, w);
    double v = 0.0;
    for (int m = 0; m < 4; ++m) {
        const int k = first + m;
        if (k >= 0 && k < tube.n_t) v += w[m] * values[tube.at(y, k)];
    }
    return v;
}

ScalarField fermi_pull(const InterfaceGeometry& geo, const TubeLayout& tube, const Eigen::VectorXd& tube_values) {
    if (tube_values.size() != tube.size()) throw rejected("fermi_pull: tube field size mismatch");
    ScalarField out = ScalarField::Zero(geo.manifold_size());
    const double lo = tube.t0 - tube.dt, hi = tube.t(tube.n_t - 1) + tube.dt;
    for (int node = 0; node < geo.manifold_size(); ++node) {
        const int y = geo.node_gamma(node);
        if (y < 0) continue;
        const double z = geo.node_z(node);
        if (z <= lo || z >= hi) continue;
        out[node] = tube_value(tube, tube_values, y, z);
    }
    return out;
}

Eigen::VectorXd fermi_push(const InterfaceGeometry& geo, const TubeLayout& tube, const ScalarField& f) {
    if (f.size() != geo.manifold_size()) throw rejected("fermi_push: field size mismatch");
    Eigen::VectorXd out(tube.size());
    for (int y = 0; y < tube.n_gamma; ++y)
        for (int k = 0; k < tube.n_t; ++k) out[tube.at(y, k)] = geo.interpolate(f, y, tube.t(k));
    return out;
}

}  // namespace ac
