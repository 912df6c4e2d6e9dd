#include "allen_cahn/interface.hpp"

#include "support.hpp"

#include <algorithm>

using namespace ac;

TEST_CASE("equator geometry") {
    const ManifoldGrid g = ManifoldGrid::sphere(48, 96);
    const InterfaceGeometry geo = InterfaceGeometry::build(g, InterfaceKind::equator);
    CHECK(geo.gamma_size() == 96);
    CHECK(geo.area() == doctest::Approx(2 * test::pi).epsilon(1e-12));
    CHECK(geo.tau() == doctest::Approx(test::pi / 3));
    for (int node = 0; node < g.size(); ++node) {
        const double z = test::pi / 2 - g.coord1(node);
        if (std::abs(z) < geo.tau()) {
            REQUIRE(geo.node_gamma(node) >= 0);
            CHECK(geo.node_z(node) == doctest::Approx(z).epsilon(1e-12));
            CHECK(geo.node_side(node) == (z > 0 ? 1 : -1));
        } else {
            CHECK(geo.node_gamma(node) == -1);
            CHECK(geo.node_side(node) == (z > 0 ? 1 : -1));
        }
    }
    // columns share offset and spacing
    for (int y = 0; y < geo.gamma_size(); ++y) {
        const auto& col = geo.column(y);
        for (std::size_t m = 0; m < col.size(); ++m)
            CHECK(geo.node_z(col[m]) == doctest::Approx(geo.column_z0() + m * geo.column_dz()).epsilon(1e-12));
    }
    CHECK(geo.mean_curvature(0.0) == 0.0);
    CHECK(geo.jacobian(0, 0.3) == doctest::Approx(std::cos(0.3)));
}

TEST_CASE("interfaces must fit their manifold") {
    CHECK_THROWS_AS(InterfaceGeometry::build(ManifoldGrid::circle(64), InterfaceKind::equator), rejected);
    CHECK_THROWS_AS(InterfaceGeometry::build(ManifoldGrid::sphere(16, 32), InterfaceKind::meridian_pair), rejected);
    CHECK_THROWS_AS(InterfaceGeometry::build(ManifoldGrid::sphere(16, 32), InterfaceKind::equator, 2.0), rejected);
    CHECK(default_interface(ManifoldKind::torus) == InterfaceKind::meridian_pair);
    CHECK(interface_kind_from_string("antipodal_pair") == InterfaceKind::antipodal_pair);
    CHECK_THROWS_AS(interface_kind_from_string("catenoid"), rejected);
}

TEST_CASE("Fermi chart round trip") {
    const ManifoldGrid g = ManifoldGrid::sphere(48, 96);
    const InterfaceGeometry geo = InterfaceGeometry::build(g, InterfaceKind::equator);
    test::forall(100, 11, [&](test::Gen& gen, int) {
        const int y = gen.integer(0, geo.gamma_size() - 1);
        const double z = gen.uniform(-0.9, 0.9) * geo.tau();
        const auto c = geo.fermi(y, z);
        const auto [y2, z2] = geo.fermi_inverse(c[0], c[1]);
        CHECK(y2 == y);
        CHECK(z2 == doctest::Approx(z).epsilon(1e-12));
    });
}

TEST_CASE("cubic weights reproduce cubics and sum to one") {
    test::forall(200, 12, [&](test::Gen& gen, int) {
        const double s = gen.uniform(1.0, 20.0);
        int first;
        double w[4];
        cubic_weights(s, first, w);
        const double a = gen.uniform(-1, 1), b = gen.uniform(-1, 1), c = gen.uniform(-1, 1), d = gen.uniform(-1, 1);
        const auto p = [&](double x) { return a + b * x + c * x * x + d * x * x * x; };
        double v = 0.0, sum = 0.0;
        for (int k = 0; k < 4; ++k) {
            v += w[k] * p(first + k);
            sum += w[k];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(v == doctest::Approx(p(s)).epsilon(1e-11));
    });
}

TEST_CASE("column interpolation is exact on cubics in z and rejects escapes") {
    const ManifoldGrid g = ManifoldGrid::sphere(48, 96);
    const InterfaceGeometry geo = InterfaceGeometry::build(g, InterfaceKind::equator);
    ScalarField f(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const double z = test::pi / 2 - g.coord1(i);
        f[i] = 1 + z - 2 * z * z + 0.5 * z * z * z;
    }
    test::forall(50, 13, [&](test::Gen& gen, int) {
        const double z = gen.uniform(-0.8, 0.8) * geo.tau();
        CHECK(geo.interpolate(f, gen.integer(0, 95), z) == doctest::Approx(1 + z - 2 * z * z + 0.5 * z * z * z));
    });
    CHECK_THROWS_AS(geo.interpolate(f, 0, 1.5 * geo.tau()), rejected);
}

TEST_CASE("sphere equator Jacobi spectrum is k^2 - 1") {
    const ManifoldGrid g = ManifoldGrid::sphere(96, 192);
    const JacobiSystem js = jacobi_system(InterfaceGeometry::build(g, InterfaceKind::equator));
    const double expect[] = {-1, 0, 0, 3, 3, 8, 8};
    for (int i = 0; i < 7; ++i) CHECK(js.eigenvalues[i] == doctest::Approx(expect[i]).epsilon(1e-3).scale(1.0));
    CHECK(js.index == 1);
    CHECK(js.nullity == 2);
    CHECK(!js.ambiguous);
    CHECK(js.killing_rank == 2);
    CHECK(js.hypothesis);
    CHECK(js.kernel_residual <= 1e-8);
    CHECK(js.b.rows() == 2);
    CHECK(js.b.cols() == 2);
    // kernel is weighted-orthonormal
    const Eigen::MatrixXd gram = js.kernel.transpose() * js.weights.asDiagonal() * js.kernel;
    CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("flat interfaces violate the Killing hypothesis") {
    const ManifoldGrid t = ManifoldGrid::torus(64, 32, 2 * test::pi, 2 * test::pi);
    const JacobiSystem jt = jacobi_system(InterfaceGeometry::build(t, InterfaceKind::meridian_pair));
    CHECK(jt.index == 0);
    CHECK(jt.nullity == 2);
    CHECK(jt.killing_rank == 1);
    CHECK(!jt.hypothesis);
    const ManifoldGrid c = ManifoldGrid::circle(256);
    const JacobiSystem jc = jacobi_system(InterfaceGeometry::build(c, InterfaceKind::antipodal_pair));
    CHECK(jc.index == 0);
    CHECK(jc.nullity == 2);
}

TEST_CASE("Clifford torus lattice oracle") {
    const LatticeOracle o = clifford_torus_oracle();
    CHECK(o.index == 5);
    CHECK(o.nullity == 4);
    CHECK(std::is_sorted(o.eigenvalues.begin(), o.eigenvalues.end()));
    CHECK(o.eigenvalues.front() == -4.0);
    // count by hand: (0,0); (+-1,0),(0,+-1) -> index; (+-1,+-1) -> kernel
    int neg = 0, zero = 0;
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) {
            const int q = a * a + b * b;
            neg += q * 2 < 4;
            zero += q * 2 == 4;
        }
    CHECK(neg == o.index);
    CHECK(zero == o.nullity);
}

TEST_CASE("projected Jacobi solve returns c = -<f, zhat>") {
    const ManifoldGrid g = ManifoldGrid::sphere(48, 96);
    const JacobiSystem js = jacobi_system(InterfaceGeometry::build(g, InterfaceKind::equator));
    test::forall(20, 14, [&](test::Gen& gen, int i) {
        const SurfaceField f = gen.vector(96);
        const double shift = i % 2 ? 0.0 : gen.uniform(5.0, 40.0);
        const ProjectedSolution p = solve_jacobi_projected(js, f, shift);
        for (int j = 0; j < js.nullity; ++j) {
            const SurfaceField zj = js.kernel.col(j);
            CHECK(std::abs(p.c[j] + js.dot(f, zj)) <= 1e-10);
            CHECK(std::abs(js.dot(p.displacement, zj)) <= 1e-10);
        }
        CHECK(p.residual <= 1e-10);
    });
    CHECK_THROWS_AS(solve_jacobi_projected(js, SurfaceField::Zero(5)), rejected);
}

TEST_CASE("tube transfer round trip") {
    const ManifoldGrid g = ManifoldGrid::sphere(48, 96);
    const InterfaceGeometry geo = InterfaceGeometry::build(g, InterfaceKind::equator);
    TubeLayout tube{geo.gamma_size(), 9, geo.column_z0() + 10 * geo.column_dz(), geo.column_dz()};
    test::forall(5, 15, [&](test::Gen& gen, int) {
        const Eigen::VectorXd t = gen.vector(tube.size());
        const ScalarField m = fermi_pull(geo, tube, t);
        CHECK((fermi_push(geo, tube, m) - t).cwiseAbs().maxCoeff() <= 1e-12);
    });
    CHECK_THROWS_AS(tube_value(tube, Eigen::VectorXd::Zero(tube.size()), 0, 10.0), rejected);
}
