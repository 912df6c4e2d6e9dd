#include "allen_cahn/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace ac {

std::string to_string(SpectrumVerdict v) { return v == SpectrumVerdict::certified ? "certified" : "inconclusive"; }

namespace {

constexpr double kPi = 3.14159265358979323846;

void classify(SpectrumReport& r) {
    const double tau = r.tau_null;
    double null_max = 0.0, other_min = INFINITY;
    r.m = r.n = 0;
    for (int i = 0; i < r.eigenvalues.size(); ++i) {
        const double l = r.eigenvalues[i];
        if (l < -tau) ++r.m;
        if (std::abs(l) <= tau) {
            ++r.n;
            null_max = std::max(null_max, std::abs(l));
        } else {
            other_min = std::min(other_min, std::abs(l));
        }
    }
    const double ref = r.n > 0 ? null_max : tau;
    r.separation = ref > 0 ? other_min / ref : INFINITY;
    r.verdict = r.separation >= 3.0 ? SpectrumVerdict::certified : SpectrumVerdict::inconclusive;
}

void finish(const ManifoldGrid& g, const SparseMatrix& aw, SpectrumReport& r) {
    const Eigen::VectorXd& d = g.weights();
    const Eigen::MatrixXd gram = r.eigenvectors.transpose() * d.asDiagonal() * r.eigenvectors;
    r.orthonormality_defect = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    const Eigen::VectorXd isd = d.cwiseSqrt().cwiseInverse();
    r.max_residual = 0.0;
    for (int i = 0; i < r.eigenvectors.cols(); ++i) {
        const Eigen::VectorXd x = r.eigenvectors.col(i);
        const Eigen::VectorXd res = isd.cwiseProduct(aw * x - r.eigenvalues[i] * d.cwiseProduct(x));
        r.max_residual = std::max(r.max_residual, res.norm());
    }
    classify(r);
}

}  // namespace

SpectrumReport linearized_spectrum(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u,
                                   int k, double tau_null) {
    if (u.size() != g.size()) throw rejected("spectrum: field size mismatch");
    if (k < 1) throw rejected("spectrum: need at least one eigenpair");
    const int n = g.size();
    k = std::min(k, n);
    const Eigen::VectorXd& d = g.weights();
    Eigen::VectorXd pot(n);
    for (int i = 0; i < n; ++i) pot[i] = w.d2(u[i]);
    // weighted form A_w = -eps^2 K + D diag(W''(u)); A = D^{-1} A_w
    SparseMatrix aw = -eps * eps * g.stiffness();
    for (int i = 0; i < n; ++i) aw.coeffRef(i, i) += d[i] * pot[i];
    aw.makeCompressed();

    SpectrumReport r;
    r.tau_null = tau_null > 0 ? tau_null : 0.3 * eps * eps;
    const Eigen::VectorXd isd = d.cwiseSqrt().cwiseInverse();
    if (n <= 4000) {
        Eigen::MatrixXd a = isd.asDiagonal() * Eigen::MatrixXd(aw) * isd.asDiagonal();
        a = 0.5 * (a + a.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        r.eigenvalues = es.eigenvalues().head(k);
        r.eigenvectors = isd.asDiagonal() * es.eigenvectors().leftCols(k);
        r.dense = true;
        finish(g, aw, r);
        return r;
    }

    r.dense = false;
    const double shift = pot.minCoeff() - 1e-3;
    SparseMatrix shifted = aw;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= shift * d[i];
    Eigen::SimplicialLLT<SparseMatrix> llt(shifted);
    if (llt.info() != Eigen::Success) throw rejected("spectrum: shifted operator is not positive definite");
    const int p = std::min(n, k + 8);
    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd x(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) x(i, j) = gauss(rng);
    Eigen::VectorXd vals;
    Eigen::MatrixXd vecs;
    for (int it = 1; it <= 2000; ++it) {
        Eigen::MatrixXd y = llt.solve(d.asDiagonal() * x);
        // Rayleigh-Ritz in the D inner product
        const Eigen::MatrixXd h = y.transpose() * (aw * y);
        const Eigen::MatrixXd m = y.transpose() * d.asDiagonal() * y;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (h + h.transpose()),
                                                                      0.5 * (m + m.transpose()));
        vals = ges.eigenvalues();
        x = y * ges.eigenvectors();
        r.iterations = it;
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            const Eigen::VectorXd xi = x.col(i);
            worst = std::max(worst, isd.cwiseProduct(aw * xi - vals[i] * d.cwiseProduct(xi)).norm());
        }
        if (worst <= 1e-9) break;
    }
    r.eigenvalues = vals.head(k);
    r.eigenvectors = x.leftCols(k);
    for (int i = 0; i < k; ++i) {
        const double nrm = std::sqrt(r.eigenvectors.col(i).dot(d.cwiseProduct(r.eigenvectors.col(i))));
        r.eigenvectors.col(i) /= nrm;
    }
    finish(g, aw, r);
    return r;
}

KillingModes killing_modes(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u,
                           const std::vector<VectorField>& fields) {
    KillingModes km;
    const int m = static_cast<int>(fields.size());
    for (const auto& f : fields) km.modes.push_back(g.directional(f, u));
    km.gram.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) km.gram(i, j) = g.dot(km.modes[i], km.modes[j]);
    if (m > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(km.gram);
        const double top = es.eigenvalues().cwiseAbs().maxCoeff();
        for (int i = 0; i < m; ++i)
            if (top > 0 && es.eigenvalues()[i] > 1e-8 * top) ++km.rank;
    }
    for (const auto& y : km.modes) {
        const double yy = g.dot(y, y);
        if (!(yy > 0)) {
            km.rayleigh.push_back(0.0);
            continue;
        }
        ScalarField ay = -eps * eps * g.laplacian(y);
        for (int i = 0; i < ay.size(); ++i) ay[i] += w.d2(u[i]) * y[i];
        km.rayleigh.push_back(g.dot(y, ay) / yy);
    }
    return km;
}

double null_killing_angle(const ManifoldGrid& g, const SpectrumReport& s, const KillingModes& km) {
    std::vector<Eigen::VectorXd> basis;
    const double top = km.gram.size() ? km.gram.diagonal().maxCoeff() : 0.0;
    for (const auto& y : km.modes) {
        Eigen::VectorXd r = y;
        for (const auto& q : basis) r -= g.dot(r, q) * q;
        const double nr = std::sqrt(std::max(g.dot(r, r), 0.0));
        if (top > 0 && nr * nr > 1e-8 * top) basis.push_back(r / nr);
    }
    std::vector<int> null_cols;
    for (int i = 0; i < s.eigenvalues.size(); ++i)
        if (std::abs(s.eigenvalues[i]) <= s.tau_null) null_cols.push_back(i);
    if (basis.empty() || null_cols.empty()) return 90.0;
    Eigen::MatrixXd c(null_cols.size(), basis.size());
    for (std::size_t i = 0; i < null_cols.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) c(i, j) = g.dot(s.eigenvectors.col(null_cols[i]), basis[j]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
    const auto& sv = svd.singularValues();
    const double smallest = std::clamp(sv[sv.size() - 1], -1.0, 1.0);
    return std::acos(smallest) * 180.0 / kPi;
}

std::vector<std::array<double, 3>> level_set_normals(const ManifoldGrid& g, const ScalarField& u) {
    const VectorField gr = g.gradient(u);
    std::vector<std::array<double, 3>> out(g.size());
    for (int i = 0; i < g.size(); ++i) {
        std::array<double, 3> v{0, 0, 0};
        switch (g.kind()) {
            case ManifoldKind::circle: {
                const double r = g.size1() / (2.0 * kPi);
                const double a = g.coord1(i) / r;
                v = {-std::sin(a) * gr.a[i], std::cos(a) * gr.a[i], 0.0};
                break;
            }
            case ManifoldKind::torus: v = {gr.a[i], gr.b[i], 0.0}; break;
            case ManifoldKind::sphere: {
                const double th = g.coord1(i), ph = g.coord2(i);
                const double st = std::sin(th);
                const std::array<double, 3> et{std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -st};
                const std::array<double, 3> ep{-std::sin(ph), std::cos(ph), 0.0};
                for (int c = 0; c < 3; ++c) v[c] = gr.a[i] * et[c] + gr.b[i] * st * ep[c];
                break;
            }
        }
        const double nrm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (nrm > 1e-12) out[i] = {v[0] / nrm, v[1] / nrm, v[2] / nrm};
        else out[i] = {0.0, 0.0, 1.0};
    }
    return out;
}

double varifold_mass(const ManifoldGrid& g, const ScalarField& u, double eps, const PlaneTest& phi) {
    if (u.size() != g.size()) throw rejected("varifold_mass: field size mismatch");
    const ScalarField gn = g.grad_norm2(u);
    const auto normals = level_set_normals(g, u);
    double total = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        if (gn[i] == 0.0) continue;
        total += g.weights()[i] * 0.5 * eps * gn[i] * phi(g.embed(i), normals[i]);
    }
    return total;
}

}  // namespace ac
