#include "allen_cahn/potential.hpp"

#include "support.hpp"

using namespace ac;

namespace {

// closed forms for W = (1 - t^2)^2 / 4
double tanh_profile(double z) { return std::tanh(z / std::sqrt(2.0)); }
double tanh_slope(double z) {
    const double c = std::cosh(z / std::sqrt(2.0));
    return 1.0 / (std::sqrt(2.0) * c * c);
}

DoubleWell shifted_well() {
    DoubleWell w = DoubleWell::quartic();
    w.eval = [](double t) { return 0.25 * (1 - t * t) * (1 - t * t) + 0.01 * t; };
    return w;
}

}  // namespace

TEST_CASE("quartic potential matches its closed form") {
    const DoubleWell w = DoubleWell::quartic();
    test::forall(50, 1, [&](test::Gen& g, int) {
        const double t = g.uniform(-2, 2);
        CHECK(w.eval(t) == doctest::Approx(0.25 * (1 - t * t) * (1 - t * t)).epsilon(1e-14));
        CHECK(w.d1(t) == doctest::Approx(t * t * t - t).epsilon(1e-14));
        CHECK(w.d2(t) == doctest::Approx(3 * t * t - 1).epsilon(1e-14));
        CHECK(w.d3(t) == doctest::Approx(6 * t).epsilon(1e-14));
    });
    CHECK_NOTHROW(w.validate());
}

TEST_CASE("validation rejects wells that are not even or do not vanish") {
    CHECK_THROWS_AS(shifted_well().validate(), rejected);
    DoubleWell lifted = DoubleWell::quartic();
    lifted.eval = [](double t) { return 0.25 * (1 - t * t) * (1 - t * t) + 0.1; };
    CHECK_THROWS_AS(lifted.validate(), rejected);
    DoubleWell missing = DoubleWell::quartic();
    missing.d3 = nullptr;
    CHECK_THROWS_AS(missing.validate(), rejected);
    CHECK_THROWS_AS(heteroclinic(shifted_well()), rejected);
}

TEST_CASE("heteroclinic profile agrees with tanh(z / sqrt 2)") {
    const Heteroclinic h = heteroclinic(DoubleWell::quartic());
    double worst = 0.0, worst_slope = 0.0;
    for (int i = -20000; i <= 20000; ++i) {
        const double z = i * 1e-3;
        worst = std::max(worst, std::abs(h.profile(z) - tanh_profile(z)));
        worst_slope = std::max(worst_slope, std::abs(h.derivative(z) - tanh_slope(z)));
    }
    CHECK(worst <= 1e-8);
    CHECK(worst_slope <= 1e-8);
    CHECK(h.tail_rate() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("profile is odd, increasing and bounded by the wells") {
    const Heteroclinic h = heteroclinic(DoubleWell::quartic());
    test::forall(200, 2, [&](test::Gen& g, int) {
        const double a = g.uniform(-15, 15), b = a + g.uniform(1e-3, 3);
        CHECK(h.profile(-a) == doctest::Approx(-h.profile(a)).epsilon(1e-12));
        CHECK(h.profile(a) < h.profile(b));
        CHECK(std::abs(h.profile(a)) < 1.0);
        CHECK(h.derivative(a) > 0.0);
    });
}

TEST_CASE("transition constants against an independent quadrature") {
    const Heteroclinic h = heteroclinic(DoubleWell::quartic());
    const double slope_sq = test::simpson([](double z) { return tanh_slope(z) * tanh_slope(z); }, -40, 40, 40000);
    CHECK(std::abs(h.sigma_energy() - slope_sq) <= 1e-9);
    CHECK(std::abs(h.sigma_energy() - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-9);
    CHECK(std::abs(h.sigma_well() - std::sqrt(2.0) / 3.0) <= 1e-9);
    CHECK(std::abs(h.sigma_energy() / h.sigma_well() - 2.0) <= 1e-6);
    CHECK(h.equipartition_energy() == doctest::Approx(slope_sq).epsilon(1e-9));
    CHECK(h.first_order_residual() <= 1e-8);
    CHECK(h.second_order_residual() <= 1e-6);
}

TEST_CASE("linearized gap is the first excited Poschl-Teller level") {
    // -d^2 + 2 - 3 sech^2(z / sqrt 2) has eigenvalues 0 and 3/2 below the continuum at 2
    const Heteroclinic h = heteroclinic(DoubleWell::quartic());
    CHECK(h.gap() == doctest::Approx(1.5).epsilon(1e-4));
    const auto ev = linearized_eigenvalues(h, 12.0, 0.005, 2);
    CHECK(std::abs(ev[0]) <= 1e-4);
    CHECK(std::abs(ev[1] - h.gap()) <= 0.01 * h.gap());
}

TEST_CASE("smooth cutoff is a C2 step") {
    const double in = 0.3, out = 0.4;
    CHECK(smooth_cutoff(0.0, in, out) == 1.0);
    CHECK(smooth_cutoff(-0.3, in, out) == 1.0);
    CHECK(smooth_cutoff(0.4, in, out) == 0.0);
    CHECK(smooth_cutoff(1.0, in, out) == 0.0);
    test::forall(100, 3, [&](test::Gen& g, int) {
        const double a = g.uniform(0, 0.5), b = a + g.uniform(1e-4, 0.1);
        CHECK(smooth_cutoff(a, in, out) >= smooth_cutoff(b, in, out));
        CHECK(smooth_cutoff(a, in, out) == smooth_cutoff(-a, in, out));
    });
    // the second derivative vanishes at both ends of the transition
    const double d = 1e-5;
    const auto second = [&](double z) {
        return (smooth_cutoff(z + d, in, out) - 2 * smooth_cutoff(z, in, out) + smooth_cutoff(z - d, in, out)) / (d * d);
    };
    double peak = 0.0;
    for (int i = 1; i < 100; ++i) peak = std::max(peak, std::abs(second(in + i * (out - in) / 100.0)));
    CHECK(std::abs(second(in + d)) <= 1e-2 * peak);
    CHECK(std::abs(second(out - d)) <= 1e-2 * peak);
}

TEST_CASE("scaled profile and plateau integral") {
    const Heteroclinic h = heteroclinic(DoubleWell::quartic());
    const ProfileValues v = scaled_profile(h, 0.1, 0.05);
    CHECK(v.value == doctest::Approx(tanh_profile(0.5)).epsilon(1e-10));
    CHECK(v.slope == doctest::Approx(tanh_slope(0.5)).epsilon(1e-8));
    CHECK_THROWS_AS(scaled_profile(h, 0.0, 0.1), rejected);
    // (1/eps) int psi'(z/eps)^2 cutoff(z) dz -> sigma_energy as the plateau widens in eps units
    double prev = 0.0;
    for (double eps : {0.008, 0.004, 0.002, 0.001}) {
        const double v2 = plateau_energy_integral(h, eps, 2.0 / 3.0, 1.0);
        CHECK(v2 <= h.sigma_energy() + 1e-9);
        CHECK(v2 > prev);
        prev = v2;
    }
    CHECK(std::abs(prev - h.sigma_energy()) <= 1e-4);
    CHECK_THROWS_AS(plateau_energy_integral(h, 0.5, 0.9, 0.1), rejected);
}
