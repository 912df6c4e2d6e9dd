#include "allen_cahn/manifold.hpp"

#include "support.hpp"

using namespace ac;

namespace {

ScalarField sample(const ManifoldGrid& g, const std::function<double(const std::array<double, 3>&)>& f) {
    ScalarField v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = f(g.embed(i));
    return v;
}

double l2(const ManifoldGrid& g, const ScalarField& v) { return std::sqrt(g.dot(v, v)); }

// xy is a degree-2 harmonic: Delta (xy) = -6 xy on the unit sphere
double sphere_error(int n) {
    const ManifoldGrid g = ManifoldGrid::sphere(n, 2 * n);
    const ScalarField f = sample(g, [](const auto& x) { return x[0] * x[1] + x[2]; });
    const ScalarField exact = sample(g, [](const auto& x) { return -6.0 * x[0] * x[1] - 2.0 * x[2]; });
    return l2(g, g.laplacian(f) - exact);
}

}  // namespace

TEST_CASE("grid construction and quadrature") {
    const ManifoldGrid s = ManifoldGrid::sphere(32, 64);
    CHECK(s.size() == 32 * 64);
    CHECK(s.volume() == doctest::Approx(4 * test::pi).epsilon(1e-12));
    const ManifoldGrid t = ManifoldGrid::torus(40, 20, 2 * test::pi, 3.0);
    CHECK(t.volume() == doctest::Approx(6 * test::pi).epsilon(1e-12));
    const ManifoldGrid c = ManifoldGrid::circle(100);
    CHECK(c.volume() == doctest::Approx(2 * test::pi).epsilon(1e-12));
    CHECK(c.dim() == 1);
    CHECK_THROWS_AS(ManifoldGrid::sphere(3, 6), rejected);
    CHECK_THROWS_AS(ManifoldGrid::circle(2), rejected);
    CHECK_THROWS_AS(ManifoldGrid::torus(8, 8, -1.0, 1.0), rejected);
    CHECK(manifold_kind_from_string("torus") == ManifoldKind::torus);
    CHECK_THROWS_AS(manifold_kind_from_string("klein"), rejected);
}

TEST_CASE("stiffness is symmetric with zero row sums") {
    for (const ManifoldGrid& g : {ManifoldGrid::sphere(16, 32), ManifoldGrid::torus(16, 20, 1.0, 2.0),
                                  ManifoldGrid::circle(33)}) {
        const Eigen::MatrixXd k(g.stiffness());
        CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((k * Eigen::VectorXd::Ones(g.size())).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((g.weights().array() > 0).all());
        // -K is positive semidefinite
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-k);
        CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
}

TEST_CASE("circle Laplacian reproduces the discrete Fourier symbol") {
    const int n = 64;
    const ManifoldGrid g = ManifoldGrid::circle(n);
    const double h = 2 * test::pi / n;
    for (int k = 1; k <= 5; ++k) {
        ScalarField f(n);
        for (int i = 0; i < n; ++i) f[i] = std::cos(k * g.coord1(i));
        const double symbol = -4.0 / (h * h) * std::pow(std::sin(k * h / 2), 2);
        CHECK((g.laplacian(f) - symbol * f).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("sphere Laplacian converges on spherical harmonics") {
    const double e1 = sphere_error(24), e2 = sphere_error(48), e3 = sphere_error(96);
    CHECK(e3 < 0.05);
    CHECK(std::log2(e1 / e2) >= 1.5);
    CHECK(std::log2(e2 / e3) >= 1.5);
}

TEST_CASE("torus Laplacian of trigonometric products") {
    const double lx = 2 * test::pi, ly = 4.0;
    const ManifoldGrid g = ManifoldGrid::torus(128, 96, lx, ly);
    ScalarField f(g.size()), exact(g.size());
    const double ky = 2 * test::pi / ly;
    for (int i = 0; i < g.size(); ++i) {
        f[i] = std::sin(g.coord1(i)) * std::cos(ky * g.coord2(i));
        exact[i] = -(1 + ky * ky) * f[i];
    }
    CHECK((g.laplacian(f) - exact).cwiseAbs().maxCoeff() <= 2e-3);
}

TEST_CASE("gradient, directional derivative and integration identities") {
    const ManifoldGrid g = ManifoldGrid::sphere(64, 128);
    const ScalarField f = sample(g, [](const auto& x) { return x[2]; });
    // |grad z|^2 = 1 - z^2
    const ScalarField gn = g.grad_norm2(f);
    const ScalarField exact = sample(g, [](const auto& x) { return 1 - x[2] * x[2]; });
    CHECK((gn - exact).cwiseAbs().maxCoeff() <= 5e-3);
    // integration by parts: int f Delta f = -int |grad f|^2
    CHECK(g.dot(f, g.laplacian(f)) == doctest::Approx(-g.integrate(gn)).epsilon(5e-3));
    CHECK(g.integrate(ScalarField::Ones(g.size())) == doctest::Approx(4 * test::pi));
}

TEST_CASE("Killing fields are isometries of the grid metric") {
    for (const ManifoldGrid& g : {ManifoldGrid::sphere(48, 96), ManifoldGrid::torus(32, 32, 1.0, 1.0),
                                  ManifoldGrid::circle(64)}) {
        const auto ks = killing_fields(g);
        CHECK(ks.size() == (g.kind() == ManifoldKind::sphere ? 3u : g.kind() == ManifoldKind::torus ? 2u : 1u));
        for (const auto& k : ks) {
            CAPTURE(k.label);
            CHECK(k.defect <= 1e-10);
        }
    }
    // a gradient field is not a rotation
    const ManifoldGrid s = ManifoldGrid::sphere(32, 64);
    VectorField grad_z{Eigen::VectorXd(s.size()), Eigen::VectorXd::Zero(s.size())};
    for (int i = 0; i < s.size(); ++i) grad_z.a[i] = -std::sin(s.coord1(i));
    CHECK(killing_defect(s, grad_z) >= 0.1);
    // rotation about the z axis differentiates x into -y
    const ManifoldGrid g = ManifoldGrid::sphere(64, 128);
    const auto ks = killing_fields(g);
    const ScalarField x = sample(g, [](const auto& p) { return p[0]; });
    const ScalarField y = sample(g, [](const auto& p) { return p[1]; });
    const ScalarField dx = g.directional(ks[2].field, x);
    CHECK((dx + y).cwiseAbs().maxCoeff() <= 2e-3);
}

TEST_CASE("energy of the wells is zero and scales with eps") {
    const ManifoldGrid g = ManifoldGrid::sphere(16, 32);
    const DoubleWell w = DoubleWell::quartic();
    CHECK(energy(g, ScalarField::Ones(g.size()), w, 0.1) <= 1e-14);
    CHECK(energy(g, -ScalarField::Ones(g.size()), w, 0.1) <= 1e-14);
    // u = 0: E = Vol / (4 eps)
    CHECK(energy(g, ScalarField::Zero(g.size()), w, 0.5) == doctest::Approx(4 * test::pi / 2.0));
}

TEST_CASE("conformal rescaling changes weights and Laplacian only") {
    const ManifoldGrid g = ManifoldGrid::sphere(16, 32);
    const ManifoldGrid same = g.conformally_scaled(ScalarField::Zero(g.size()));
    CHECK(same.weights() == g.weights());
    const double c = 0.1;
    const ManifoldGrid scaled = g.conformally_scaled(ScalarField::Constant(g.size(), c));
    CHECK((scaled.weights() - std::exp(2 * c) * g.weights()).cwiseAbs().maxCoeff() <= 1e-14);
    test::forall(5, 4, [&](test::Gen& gen, int) {
        const ScalarField f = gen.vector(g.size());
        CHECK((scaled.laplacian(f) - std::exp(-2 * c) * g.laplacian(f)).cwiseAbs().maxCoeff() <= 1e-9);
    });
    CHECK_THROWS_AS(ManifoldGrid::circle(16).conformally_scaled(ScalarField::Zero(16)), rejected);
}
