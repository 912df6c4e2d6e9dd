#include "allen_cahn/manifold.hpp"

#include <cmath>

namespace ac {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::circle: return "circle";
        case ManifoldKind::torus: return "torus";
        case ManifoldKind::sphere: return "sphere";
    }
    return "unknown";
}

ManifoldKind manifold_kind_from_string(const std::string& s) {
    if (s == "circle") return ManifoldKind::circle;
    if (s == "torus") return ManifoldKind::torus;
    if (s == "sphere") return ManifoldKind::sphere;
    throw rejected("unsupported manifold kind: " + s);
}

void ManifoldGrid::finish(std::vector<Eigen::Triplet<double>>& t) {
    const int n = size();
    stiffness_.resize(n, n);
    stiffness_.setFromTriplets(t.begin(), t.end());
    stiffness_.makeCompressed();
    conformal_ = Eigen::VectorXd::Ones(n);
}

ManifoldGrid ManifoldGrid::circle(int n, double length) {
    if (n < 16) throw rejected("circle: need at least 16 nodes");
    if (!(length > 0.0)) throw rejected("circle: length must be positive");
    ManifoldGrid g;
    g.kind_ = ManifoldKind::circle;
    g.n1_ = n;
    g.n2_ = 1;
    g.size1_ = length;
    g.step1_ = length / n;
    g.c1_.resize(n);
    g.c2_ = Eigen::VectorXd::Zero(n);
    g.weights_ = Eigen::VectorXd::Constant(n, g.step1_);
    std::vector<Eigen::Triplet<double>> t;
    const double k = 1.0 / g.step1_;
    for (int i = 0; i < n; ++i) {
        g.c1_[i] = i * g.step1_;
        const int r = (i + 1) % n;
        t.emplace_back(i, r, k);
        t.emplace_back(r, i, k);
        t.emplace_back(i, i, -k);
        t.emplace_back(r, r, -k);
    }
    g.finish(t);
    return g;
}

ManifoldGrid ManifoldGrid::torus(int nx, int ny, double lx, double ly) {
    if (nx < 16 || ny < 16) throw rejected("torus: need at least 16 nodes per axis");
    if (!(lx > 0.0) || !(ly > 0.0)) throw rejected("torus: side lengths must be positive");
    ManifoldGrid g;
    g.kind_ = ManifoldKind::torus;
    g.n1_ = nx;
    g.n2_ = ny;
    g.size1_ = lx;
    g.size2_ = ly;
    g.step1_ = lx / nx;
    g.step2_ = ly / ny;
    const int n = nx * ny;
    g.c1_.resize(n);
    g.c2_.resize(n);
    g.weights_ = Eigen::VectorXd::Constant(n, g.step1_ * g.step2_);
    std::vector<Eigen::Triplet<double>> t;
    const double kx = g.step2_ / g.step1_;
    const double ky = g.step1_ / g.step2_;
    auto edge = [&](int a, int b, double k) {
        t.emplace_back(a, b, k);
        t.emplace_back(b, a, k);
        t.emplace_back(a, a, -k);
        t.emplace_back(b, b, -k);
    };
    for (int i = 0; i < nx; ++i)
        for (int l = 0; l < ny; ++l) {
            const int a = g.index(i, l);
            g.c1_[a] = i * g.step1_;
            g.c2_[a] = l * g.step2_;
            edge(a, g.index((i + 1) % nx, l), kx);
            edge(a, g.index(i, (l + 1) % ny), ky);
        }
    g.finish(t);
    return g;
}

ManifoldGrid ManifoldGrid::sphere(int n_theta, int n_phi) {
    if (n_theta < 16 || n_phi < 16) throw rejected("sphere: need at least 16 nodes per axis");
    if (n_phi % 2 != 0) throw rejected("sphere: n_phi must be even for the pole identification");
    ManifoldGrid g;
    g.kind_ = ManifoldKind::sphere;
    g.n1_ = n_theta;
    g.n2_ = n_phi;
    g.size1_ = kPi;
    g.size2_ = 2.0 * kPi;
    const double ht = kPi / n_theta;
    const double hp = 2.0 * kPi / n_phi;
    g.step1_ = ht;
    g.step2_ = hp;
    const int n = n_theta * n_phi;
    g.c1_.resize(n);
    g.c2_.resize(n);
    g.weights_.resize(n);
    std::vector<Eigen::Triplet<double>> t;
    auto edge = [&](int a, int b, double k) {
        t.emplace_back(a, b, k);
        t.emplace_back(b, a, k);
        t.emplace_back(a, a, -k);
        t.emplace_back(b, b, -k);
    };
    for (int j = 0; j < n_theta; ++j) {
        const double th = (j + 0.5) * ht;
        const double lo = j * ht, hi = (j + 1) * ht;
        // exact cell area so the weights sum to 4 pi
        const double area = (std::cos(lo) - std::cos(hi)) * hp;
        const double kphi = ht / (std::sin(th) * hp);
        const double ktheta = std::sin(hi) * hp / ht;
        for (int k = 0; k < n_phi; ++k) {
            const int a = g.index(j, k);
            g.c1_[a] = th;
            g.c2_[a] = k * hp;
            g.weights_[a] = area;
            edge(a, g.index(j, (k + 1) % n_phi), kphi);
            if (j + 1 < n_theta) edge(a, g.index(j + 1, k), ktheta);
        }
    }
    g.finish(t);
    return g;
}

ManifoldGrid ManifoldGrid::build(ManifoldKind kind, int n1, int n2, double size1, double size2) {
    switch (kind) {
        case ManifoldKind::circle: return circle(n1, size1 > 0 ? size1 : 2.0 * kPi);
        case ManifoldKind::torus: return torus(n1, n2, size1 > 0 ? size1 : 2.0 * kPi, size2 > 0 ? size2 : 2.0 * kPi);
        case ManifoldKind::sphere: return sphere(n1, n2);
    }
    throw rejected("unsupported manifold kind");
}

double ManifoldGrid::spacing() const {
    switch (kind_) {
        case ManifoldKind::circle: return step1_;
        case ManifoldKind::torus: return std::max(step1_, step2_);
        case ManifoldKind::sphere: return std::max(step1_, step2_);
    }
    return step1_;
}

std::array<double, 3> ManifoldGrid::embed(int node) const {
    switch (kind_) {
        case ManifoldKind::circle: {
            const double r = size1_ / (2.0 * kPi);
            const double a = c1_[node] / r;
            return {r * std::cos(a), r * std::sin(a), 0.0};
        }
        case ManifoldKind::torus: return {c1_[node], c2_[node], 0.0};
        case ManifoldKind::sphere: {
            const double th = c1_[node], ph = c2_[node];
            return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
        }
    }
    return {0, 0, 0};
}

void ManifoldGrid::check(const ScalarField& f) const {
    if (f.size() != size()) throw rejected("field size does not match the grid");
}

ScalarField ManifoldGrid::laplacian(const ScalarField& f) const {
    check(f);
    return (stiffness_ * f).cwiseQuotient(weights_);
}

VectorField ManifoldGrid::gradient(const ScalarField& f) const {
    check(f);
    const int n = size();
    VectorField out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    switch (kind_) {
        case ManifoldKind::circle:
            for (int i = 0; i < n; ++i)
                out.a[i] = (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2.0 * step1_);
            break;
        case ManifoldKind::torus:
            for (int i = 0; i < n1_; ++i)
                for (int l = 0; l < n2_; ++l) {
                    const int a = index(i, l);
                    out.a[a] = (f[index((i + 1) % n1_, l)] - f[index((i + n1_ - 1) % n1_, l)]) / (2.0 * step1_);
                    out.b[a] = (f[index(i, (l + 1) % n2_)] - f[index(i, (l + n2_ - 1) % n2_)]) / (2.0 * step2_);
                }
            break;
        case ManifoldKind::sphere: {
            const int half = n2_ / 2;
            for (int j = 0; j < n1_; ++j) {
                const double s2 = std::pow(std::sin(c1_[index(j, 0)]), 2);
                for (int k = 0; k < n2_; ++k) {
                    const int a = index(j, k);
                    // ghost rows across a pole live at phi + pi
                    const double up = j + 1 < n1_ ? f[index(j + 1, k)] : f[index(j, (k + half) % n2_)];
                    const double dn = j > 0 ? f[index(j - 1, k)] : f[index(j, (k + half) % n2_)];
                    out.a[a] = (up - dn) / (2.0 * step1_);
                    const double dphi = (f[index(j, (k + 1) % n2_)] - f[index(j, (k + n2_ - 1) % n2_)]) / (2.0 * step2_);
                    out.b[a] = dphi / s2;
                }
            }
            break;
        }
    }
    out.a = out.a.cwiseQuotient(conformal_);
    out.b = out.b.cwiseQuotient(conformal_);
    return out;
}

ScalarField ManifoldGrid::inner(const VectorField& x, const VectorField& y) const {
    const int n = size();
    ScalarField out(n);
    for (int i = 0; i < n; ++i) {
        double v = x.a[i] * y.a[i];
        if (kind_ == ManifoldKind::torus) v += x.b[i] * y.b[i];
        if (kind_ == ManifoldKind::sphere) v += std::pow(std::sin(c1_[i]), 2) * x.b[i] * y.b[i];
        out[i] = conformal_[i] * v;
    }
    return out;
}

ScalarField ManifoldGrid::directional(const VectorField& x, const ScalarField& f) const {
    const VectorField g = gradient(f);
    return inner(x, g);
}

ScalarField ManifoldGrid::grad_norm2(const ScalarField& f) const {
    const VectorField g = gradient(f);
    return inner(g, g);
}

double ManifoldGrid::integrate(const ScalarField& f) const {
    check(f);
    return weights_.dot(f);
}

double ManifoldGrid::dot(const ScalarField& f, const ScalarField& g) const {
    check(f);
    check(g);
    return (weights_.array() * f.array() * g.array()).sum();
}

ManifoldGrid ManifoldGrid::conformally_scaled(const Eigen::VectorXd& rho) const {
    if (dim() != 2) throw rejected("conformal scaling requires a two-dimensional grid");
    check(rho);
    ManifoldGrid g = *this;
    // in two dimensions the Dirichlet form is conformally invariant
    g.conformal_ = (2.0 * rho.array()).exp().matrix().cwiseProduct(conformal_);
    g.weights_ = weights_.cwiseProduct((2.0 * rho.array()).exp().matrix());
    return g;
}

double killing_defect(const ManifoldGrid& g, const VectorField& x) {
    if (g.kind() != ManifoldKind::sphere) {
        // flat charts: components must be constant
        double worst = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            worst = std::max(worst, std::abs(x.a[i] - x.a[0]));
            if (g.kind() == ManifoldKind::torus) worst = std::max(worst, std::abs(x.b[i] - x.b[0]));
        }
        return worst;
    }
    // on the round sphere the Killing fields are exactly the rigid rotations p -> w x p
    const int n = g.size();
    std::vector<Eigen::Vector3d> p(n), v(n);
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
        const double th = g.coord1(i), ph = g.coord2(i);
        const double s = std::sin(th), c = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
        p[i] = {s * cp, s * sp, c};
        v[i] = x.a[i] * Eigen::Vector3d(c * cp, c * sp, -s) + x.b[i] * Eigen::Vector3d(-s * sp, s * cp, 0.0);
        // w x p = -[p]_x w
        Eigen::Matrix3d m;
        m << 0, p[i][2], -p[i][1], -p[i][2], 0, p[i][0], p[i][1], -p[i][0], 0;
        normal += m.transpose() * m;
        rhs += m.transpose() * v[i];
    }
    const Eigen::Vector3d w = normal.ldlt().solve(rhs);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, (v[i] - w.cross(p[i])).norm());
    return worst;
}

std::vector<KillingField> killing_fields(const ManifoldGrid& g) {
    const int n = g.size();
    std::vector<KillingField> out;
    auto add = [&](VectorField f, std::string label) {
        KillingField k{std::move(f), std::move(label), 0.0};
        k.defect = killing_defect(g, k.field);
        out.push_back(std::move(k));
    };
    switch (g.kind()) {
        case ManifoldKind::circle:
            add({Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n)}, "rotation");
            break;
        case ManifoldKind::torus:
            add({Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n)}, "translation_x");
            add({Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)}, "translation_y");
            break;
        case ManifoldKind::sphere: {
            VectorField rx{Eigen::VectorXd(n), Eigen::VectorXd(n)};
            VectorField ry{Eigen::VectorXd(n), Eigen::VectorXd(n)};
            VectorField rz{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)};
            for (int i = 0; i < n; ++i) {
                const double th = g.coord1(i), ph = g.coord2(i);
                const double cot = std::cos(th) / std::sin(th);
                rx.a[i] = -std::sin(ph);
                rx.b[i] = -cot * std::cos(ph);
                ry.a[i] = std::cos(ph);
                ry.b[i] = -cot * std::sin(ph);
            }
            add(rx, "rotation_x");
            add(ry, "rotation_y");
            add(rz, "rotation_z");
            break;
        }
    }
    return out;
}

double energy(const ManifoldGrid& g, const ScalarField& u, const DoubleWell& w, double eps) {
    if (!(eps > 0.0)) throw rejected("energy: eps must be positive");
    if (u.size() != g.size()) throw rejected("energy: field size does not match the grid");
    const double dirichlet = -u.dot(g.stiffness() * u);
    double pot = 0.0;
    for (int i = 0; i < g.size(); ++i) pot += g.weights()[i] * w.eval(u[i]);
    return 0.5 * eps * dirichlet + pot / eps;
}

}  // namespace ac
