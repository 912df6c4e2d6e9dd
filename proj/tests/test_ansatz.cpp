#include "allen_cahn/ansatz.hpp"

#include "support.hpp"

using namespace ac;

namespace {

struct Fixture {
    ManifoldGrid g = ManifoldGrid::sphere(96, 192);
    InterfaceGeometry geo = InterfaceGeometry::build(g, InterfaceKind::equator);
    Heteroclinic h = heteroclinic(DoubleWell::quartic());
    double eps = 0.15;
    CutoffFamily cut = cutoffs(eps, 2.0 / 3.0, geo.tau());
};

}  // namespace

TEST_CASE("cutoffs are nested") {
    const CutoffFamily c = cutoffs(0.15, 2.0 / 3.0, 1.0);
    CHECK(c.scale == doctest::Approx(std::pow(0.15, 2.0 / 3.0)));
    test::forall(500, 21, [&](test::Gen& gen, int) {
        const double z = gen.uniform(-1.1, 1.1) * c.scale;
        for (int k = 1; k < 5; ++k)
            if (c(k + 1, z) != 0.0) CHECK(c(k, z) == 1.0);
    });
    for (int k = 1; k <= 5; ++k) {
        CHECK(c(k, 0.0) == 1.0);
        CHECK(c(k, c.outer(k)) == 0.0);
        CHECK(c.max_slope(k) == doctest::Approx(1.875 / (c.outer(k) - c.inner(k))));
    }
    CHECK_THROWS_AS(cutoffs(1.5, 0.5, 1.0), rejected);
    CHECK_THROWS_AS(cutoffs(0.1, 1.0, 1.0), rejected);
    CHECK_THROWS_AS(cutoffs(0.5, 0.5, 0.5), rejected);
}

TEST_CASE("approximate solution is the profile on the plateau and the wells outside") {
    Fixture f;
    const ScalarField u = approximate_solution(f.geo, f.h, f.eps, f.cut);
    for (int node = 0; node < f.g.size(); ++node) {
        const double z = test::pi / 2 - f.g.coord1(node);
        if (std::abs(z) <= f.cut.inner(1)) CHECK(u[node] == doctest::Approx(std::tanh(z / f.eps / std::sqrt(2.0))));
        else if (std::abs(z) >= f.cut.outer(1)) CHECK(u[node] == (z > 0 ? 1.0 : -1.0));
    }
    // odd under reflection through the equator
    for (int j = 0; j < 96; ++j)
        CHECK(u[f.g.index(j, 7)] == doctest::Approx(-u[f.g.index(95 - j, 7)]).epsilon(1e-14));
}

TEST_CASE("graph map inverts and respects its bound") {
    Fixture f;
    const double bound = GraphDiffeo::admissible_bound(f.cut);
    test::forall(20, 22, [&](test::Gen& gen, int) {
        const SurfaceField displacement = gen.vector(f.geo.gamma_size(), -0.9 * bound, 0.9 * bound);
        const GraphDiffeo d(f.geo, f.cut, displacement);
        for (int k = 0; k < 20; ++k) {
            const int y = gen.integer(0, f.geo.gamma_size() - 1);
            const double z = gen.uniform(-1.1, 1.1) * f.cut.scale;
            CHECK(d.inverse(y, d.forward(y, z)) == doctest::Approx(z).epsilon(1e-12));
        }
    });
    CHECK(GraphDiffeo(f.geo, f.cut, SurfaceField::Zero(f.geo.gamma_size())).identity());
    CHECK_THROWS_AS(GraphDiffeo(f.geo, f.cut, SurfaceField::Constant(f.geo.gamma_size(), bound)), rejected);
    CHECK_THROWS_AS(GraphDiffeo(f.geo, f.cut, SurfaceField::Zero(3)), rejected);
}

TEST_CASE("P at zero shift is the curvature term on the plateau") {
    // eps^2 (psi_zz - tan z psi_z) - W'(psi) = -eps tan z psi'(z / eps) for psi(z / eps)
    Fixture f;
    const GraphDiffeo id(f.geo, f.cut, SurfaceField::Zero(f.geo.gamma_size()));
    const ScalarField u = approximate_solution(f.geo, f.h, f.eps, f.cut);
    const ScalarField p = transported_operator(f.g, id, f.h.potential(), f.eps, u);
    const double h = test::pi / 96;
    double worst = 0.0;
    for (int node = 0; node < f.g.size(); ++node) {
        const double z = test::pi / 2 - f.g.coord1(node);
        if (std::abs(z) > f.cut.inner(1) - 2 * h) continue;
        const double exact = -f.eps * std::tan(z) * f.h.derivative(z / f.eps);
        worst = std::max(worst, std::abs(p[node] - exact));
    }
    // second-order truncation: h^2 psi'''' / (12 eps^2)
    CHECK(worst <= h * h / (f.eps * f.eps));
}

TEST_CASE("Q is the quadratic remainder") {
    const DoubleWell w = DoubleWell::quartic();
    test::forall(50, 23, [&](test::Gen& gen, int) {
        const Eigen::VectorXd b = gen.vector(10), v = gen.vector(10, -0.1, 0.1);
        const ScalarField q = quadratic_remainder(w, b, v);
        for (int i = 0; i < 10; ++i) {
            // W'(b+v) - W'(b) - W''(b) v = 3 b v^2 + v^3 for the quartic
            // the difference form cancels to round-off of W'(b + v)
            CHECK(std::abs(q[i] - (3 * b[i] * v[i] * v[i] + v[i] * v[i] * v[i])) <= 1e-14);
        }
        const ScalarField q2 = quadratic_remainder(w, b, 0.5 * v);
        CHECK(q2.norm() <= 0.26 * q.norm() + 1e-15);
    });
}

TEST_CASE("state norms vanish at zero and grow linearly") {
    Fixture f;
    const TubeLayout tube{f.geo.gamma_size(), 11, f.geo.column_z0() + 20 * f.geo.column_dz(), f.geo.column_dz()};
    const StateNorms z = state_norms(f.g, f.geo, tube, f.cut, 0.125, ScalarField::Zero(f.g.size()),
                                     Eigen::VectorXd::Zero(tube.size()), SurfaceField::Zero(f.geo.gamma_size()));
    CHECK(z.total() == 0.0);
    test::Gen gen(24);
    const ScalarField v = gen.vector(f.g.size());
    const Eigen::VectorXd t = gen.vector(tube.size());
    const SurfaceField displacement = gen.vector(f.geo.gamma_size());
    const StateNorms a = state_norms(f.g, f.geo, tube, f.cut, 0.125, v, t, displacement);
    const StateNorms b = state_norms(f.g, f.geo, tube, f.cut, 0.125, 2 * v, 2 * t, 2 * displacement);
    CHECK(b.total() == doctest::Approx(2 * a.total()));
    CHECK(c2_proxy(f.g, 0.1, ScalarField::Ones(f.g.size())) == doctest::Approx(1.0));
}
