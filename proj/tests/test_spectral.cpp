#include "allen_cahn/spectral.hpp"
#include "allen_cahn/reduction.hpp"

#include "support.hpp"

#include <algorithm>

using namespace ac;

namespace {

// Equator solution on a coarse sphere, shared by several cases.
struct SphereSolution {
    ManifoldGrid g;
    InterfaceGeometry geo = InterfaceGeometry::build(g, InterfaceKind::equator);
    JacobiSystem js = jacobi_system(geo);
    Heteroclinic h = heteroclinic(DoubleWell::quartic());
    double eps;
    ScalarField u;
    SphereSolution(int n, double e) : g(ManifoldGrid::sphere(n, 2 * n)), eps(e) {
        const Reduction r(g, geo, js, h, eps, 2.0 / 3.0);
        u = newton_solve(g, h.potential(), eps, r.base()).u;
    }
};

// Test-side dense eigenvalues of W^{-1/2} (-eps^2 K + W diag(W'')) W^{-1/2}.
Eigen::VectorXd dense_reference(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u) {
    const Eigen::MatrixXd k(g.stiffness());
    const Eigen::VectorXd m = g.weights();
    Eigen::MatrixXd a = -eps * eps * k;
    for (int i = 0; i < g.size(); ++i) a(i, i) += m[i] * w.d2(u[i]);
    const Eigen::VectorXd s = m.cwiseSqrt().cwiseInverse();
    a = s.asDiagonal() * a * s.asDiagonal();
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("spectrum at a well is the discrete Fourier symbol") {
    const int n = 128;
    const double eps = 0.2, h = 2 * test::pi / n;
    const ManifoldGrid g = ManifoldGrid::circle(n);
    const SpectrumReport r = linearized_spectrum(g, DoubleWell::quartic(), eps, ScalarField::Ones(n), 9);
    std::vector<double> expect;
    for (int k = -n / 2 + 1; k <= n / 2; ++k)
        expect.push_back(2.0 + eps * eps * 4.0 / (h * h) * std::pow(std::sin(k * h / 2), 2));
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < 9; ++i) CHECK(r.eigenvalues[i] == doctest::Approx(expect[i]).epsilon(1e-10));
    CHECK(r.m == 0);
    CHECK(r.n == 0);
    CHECK(r.verdict == SpectrumVerdict::certified);
    CHECK(r.orthonormality_defect <= 1e-10);
}

TEST_CASE("dense and iterative eigensolvers agree with a reference") {
    SphereSolution s(32, 0.4);
    const SpectrumReport dense = linearized_spectrum(s.g, s.h.potential(), s.eps, s.u, 6);
    CHECK(dense.dense);
    const Eigen::VectorXd ref = dense_reference(s.g, s.h.potential(), s.eps, s.u);
    for (int i = 0; i < 6; ++i) CHECK(dense.eigenvalues[i] == doctest::Approx(ref[i]).epsilon(1e-8).scale(1e-10));

    // more than 4000 nodes takes the iterative path
    const SphereSolution f(48, 0.3);
    const SpectrumReport it = linearized_spectrum(f.g, f.h.potential(), f.eps, f.u, 6);
    CHECK(!it.dense);
    const Eigen::VectorXd ref2 = dense_reference(f.g, f.h.potential(), f.eps, f.u);
    for (int i = 0; i < 6; ++i) CHECK(it.eigenvalues[i] == doctest::Approx(ref2[i]).epsilon(1e-7).scale(1e-9));
    CHECK(it.max_residual <= 1e-8);
    CHECK(it.orthonormality_defect <= 1e-10);
}

TEST_CASE("equator solution has index one and a two-dimensional rotational kernel") {
    SphereSolution s(32, 0.4);
    const SpectrumReport r = linearized_spectrum(s.g, s.h.potential(), s.eps, s.u, 8);
    CHECK(r.m == 1);
    CHECK(r.n == 2);
    CHECK(r.verdict == SpectrumVerdict::certified);
    CHECK(to_string(r.verdict) == "certified");
    std::vector<VectorField> fields;
    for (const auto& k : killing_fields(s.g)) fields.push_back(k.field);
    const KillingModes km = killing_modes(s.g, s.h.potential(), s.eps, s.u, fields);
    CHECK(km.rank == 2);
    CHECK(null_killing_angle(s.g, r, km) <= 5.0);
}

TEST_CASE("varifold mass vanishes at a well and matches the energy density") {
    SphereSolution s(32, 0.4);
    const PlaneTest one = [](const auto&, const auto&) { return 1.0; };
    CHECK(varifold_mass(s.g, ScalarField::Ones(s.g.size()), s.eps, one) == 0.0);
    const double m = varifold_mass(s.g, s.u, s.eps, one);
    CHECK(m == doctest::Approx(s.eps / 2 * s.g.integrate(s.g.grad_norm2(s.u))).epsilon(1e-12));
    const auto normals = level_set_normals(s.g, s.u);
    test::forall(50, 41, [&](test::Gen& gen, int) {
        const auto& nu = normals[gen.integer(0, s.g.size() - 1)];
        CHECK(nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2] == doctest::Approx(1.0).epsilon(1e-12));
    });
}
