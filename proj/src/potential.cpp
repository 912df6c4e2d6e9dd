#include "allen_cahn/potential.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace ac {

namespace {

using boost::math::quadrature::gauss;

constexpr int kCellNodes = 7;

// Integral of f over [a, b] split into cells of width about `cell`, Gauss-Legendre per cell.
template <class F>
double composite(F&& f, double a, double b, double cell) {
    if (b <= a) return 0.0;
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / cell - 1e-9)));
    const double w = (b - a) / n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lo = a + i * w;
        total += gauss<double, kCellNodes>::integrate(f, lo, lo + w);
    }
    return total;
}

}  // namespace

DoubleWell DoubleWell::quartic() {
    DoubleWell w;
    w.name = "quartic";
    w.eval = [](double t) {
        const double a = 1.0 - t * t;
        return 0.25 * a * a;
    };
    w.d1 = [](double t) { return t * t * t - t; };
    w.d2 = [](double t) { return 3.0 * t * t - 1.0; };
    w.d3 = [](double t) { return 6.0 * t; };
    w.well = 1.0;
    return w;
}

void DoubleWell::validate() const {
    if (!eval || !d1 || !d2 || !d3) throw rejected("double well: missing derivative");
    const double a = well;
    if (!(a > 0.0)) throw rejected("double well: wells must be at +-a with a > 0");
    if (std::abs(eval(a)) > 1e-14 || std::abs(eval(-a)) > 1e-14)
        throw rejected("double well: W must vanish at the wells");
    if (!(d2(a) > 0.0) || !(d2(-a) > 0.0)) throw rejected("double well: wells must be nondegenerate");
    if (!(eval(0.0) > 0.0) || !(d2(0.0) < 0.0)) throw rejected("double well: 0 must be a strict local max");
    for (int i = 1; i < 1000; ++i) {
        const double t = a * i / 1000.0;
        if (!(d1(t) < 0.0)) throw rejected("double well: W' must be negative on (0, a)");
        if (!(eval(t) > 0.0)) throw rejected("double well: W must be positive on (-a, a)");
        const double s = 1.7 * a * i / 1000.0;
        if (std::abs(eval(s) - eval(-s)) > 1e-13 * (1.0 + std::abs(eval(s))))
            throw rejected("double well: W must be even");
    }
}

Heteroclinic::Heteroclinic(DoubleWell w, double half_width, double step)
    : w_(std::move(w)), half_width_(half_width), step_(step) {
    w_.validate();
    const double a = w_.well;
    tail_rate_ = std::sqrt(w_.d2(a));
    if (!(step > 0.0) || step > 0.1) throw rejected("heteroclinic: step must lie in (0, 0.1]");
    if (half_width < 10.0 / tail_rate_) throw rejected("heteroclinic: half width below 10/sqrt(W''(a))");

    const int n = static_cast<int>(std::lround(half_width / step));
    half_width_ = n * step;
    const auto speed = [this](double u) { return std::sqrt(2.0 * w_.eval(u)); };
    const auto inv_speed = [&](double u) { return 1.0 / speed(u); };

    // Positive half: solve  int_{u_i}^{u_{i+1}} du / sqrt(2W(u)) = step.
    std::vector<double> half(n + 1);
    half[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u0 = half[i];
        // RK4 predictor for u' = sqrt(2W(u)).
        const double k1 = speed(u0);
        const double k2 = speed(std::min(u0 + 0.5 * step * k1, a));
        const double k3 = speed(std::min(u0 + 0.5 * step * k2, a));
        const double k4 = speed(std::min(u0 + step * k3, a));
        double u = std::min(u0 + step * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0, a);
        for (int it = 0; it < 30; ++it) {
            const double g = gauss<double, 20>::integrate(inv_speed, u0, u) - step;
            const double du = -g * speed(u);
            double next = u + du;
            if (next >= a) next = 0.5 * (u + a);
            if (next <= u0) next = 0.5 * (u + u0);
            u = next;
            if (std::abs(du) <= 1e-17 + 1e-16 * std::abs(u)) break;
        }
        half[i + 1] = u;
    }

    z_.resize(2 * n + 1);
    values_.resize(2 * n + 1);
    slopes_.resize(2 * n + 1);
    for (int i = -n; i <= n; ++i) {
        const double v = i >= 0 ? half[i] : -half[-i];
        z_[i + n] = i * step;
        values_[i + n] = v;
        slopes_[i + n] = speed(v);
    }
    tail_amp_ = a - half[n];

    // sigma_well by adaptive Gauss-Kronrod.
    double err = 0.0;
    sigma_well_ = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [this](double t) { return std::sqrt(0.5 * w_.eval(t)); }, -a, a, 20, 1e-15, &err);
    if (!(err < 1e-10)) throw rejected("heteroclinic: sigma_well quadrature did not converge");

    // sigma_energy by composite quadrature of the tabulated slope plus the analytic tail.
    const double inner = composite([this](double z) { double d = derivative(z); return d * d; }, 0.0, half_width_, step_);
    sigma_energy_ = 2.0 * (inner + 0.5 * tail_rate_ * tail_amp_ * tail_amp_);
    const double check = composite([this](double z) { double d = derivative(z); return d * d; }, 0.0, half_width_, 0.5 * step_);
    if (std::abs(2.0 * (check + 0.5 * tail_rate_ * tail_amp_ * tail_amp_) - sigma_energy_) > 1e-10)
        throw rejected("heteroclinic: sigma_energy quadrature did not converge");

    const auto ev = linearized_eigenvalues(*this, half_width_, step_, 2);
    gap_ = ev.at(1);
}

ProfileValues Heteroclinic::at(double z) const {
    const double a = w_.well;
    const double sign = z < 0 ? -1.0 : 1.0;
    const double x = std::abs(z);
    double v;
    if (x >= half_width_) {
        const double e = tail_amp_ * std::exp(-tail_rate_ * (x - half_width_));
        v = a - e;
        return {sign * v, tail_rate_ * e, -sign * tail_rate_ * tail_rate_ * e};
    }
    const int n = static_cast<int>(z_.size() / 2);
    int i = static_cast<int>(std::floor(x / step_));
    i = std::min(i, n - 1);
    const double t = x / step_ - i;
    const int k = n + i;
    const double p0 = values_[k], p1 = values_[k + 1];
    const double m0 = slopes_[k] * step_, m1 = slopes_[k + 1] * step_;
    const double t2 = t * t, t3 = t2 * t;
    v = (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
    const double slope = std::sqrt(std::max(0.0, 2.0 * w_.eval(v)));
    return {sign * v, slope, sign * w_.d1(v)};
}

double Heteroclinic::second_order_residual() const {
    // Fourth-order five-point second difference against W'(psi).
    double worst = 0.0;
    const double s2 = step_ * step_;
    for (std::size_t i = 2; i + 2 < values_.size(); ++i) {
        const double d2 =
            (-values_[i + 2] + 16 * values_[i + 1] - 30 * values_[i] + 16 * values_[i - 1] - values_[i - 2]) / (12 * s2);
        worst = std::max(worst, std::abs(d2 - w_.d1(values_[i])));
    }
    return worst;
}

double Heteroclinic::first_order_residual() const {
    double worst = 0.0;
    // Fourth-order centered slope against sqrt(2W).
    for (std::size_t i = 2; i + 2 < values_.size(); ++i) {
        const double d = (-values_[i + 2] + 8 * values_[i + 1] - 8 * values_[i - 1] + values_[i - 2]) / (12 * step_);
        worst = std::max(worst, std::abs(d - std::sqrt(2.0 * w_.eval(values_[i]))));
    }
    return worst;
}

double Heteroclinic::equipartition_energy() const {
    const double inner = composite(
        [this](double z) {
            const auto p = at(z);
            return 0.5 * p.slope * p.slope + w_.eval(p.value);
        },
        0.0, half_width_, step_);
    return 2.0 * (inner + 0.5 * tail_rate_ * tail_amp_ * tail_amp_);
}

Heteroclinic heteroclinic(const DoubleWell& w, double half_width, double step) {
    return Heteroclinic(w, half_width, step);
}

ProfileValues scaled_profile(const Heteroclinic& h, double eps, double z) {
    if (!(eps > 0.0)) throw rejected("scaled_profile: eps must be positive");
    return h.at(z / eps);
}

double smooth_cutoff(double z, double inner, double outer) {
    const double a = std::abs(z);
    if (a <= inner) return 1.0;
    if (a >= outer) return 0.0;
    const double s = (a - inner) / (outer - inner);
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double plateau_energy_integral(const Heteroclinic& h, double eps, double delta_star, double c) {
    if (!(delta_star > 0.0 && delta_star < 1.0)) throw rejected("plateau_energy_integral: delta* must lie in (0,1)");
    if (!(eps > 0.0) || !(c > 0.0)) throw rejected("plateau_energy_integral: eps and c must be positive");
    const double r = c * std::pow(eps, delta_star);
    if (r < 5.0 * eps) throw rejected("plateau_energy_integral: plateau c eps^delta* must be at least 5 eps");
    const double s_in = r / eps;
    const double s_out = 1.01 * r / eps;
    const auto f = [&](double s) {
        const double d = h.derivative(s);
        return d * d * smooth_cutoff(eps * s, r, 1.01 * r);
    };
    const double cell = std::max(h.step(), 1e-3 * s_in);
    return 2.0 * (composite(f, 0.0, s_in, cell) + composite(f, s_in, s_out, (s_out - s_in) / 8.0));
}

std::vector<double> linearized_eigenvalues(const Heteroclinic& h, double half_width, double step, int count) {
    const int n = static_cast<int>(std::lround(2.0 * half_width / step)) - 1;
    if (n < 3) throw rejected("linearized_eigenvalues: grid too small");
    Eigen::VectorXd diag(n);
    const double s2 = step * step;
    for (int i = 0; i < n; ++i) {
        const double z = -half_width + (i + 1) * step;
        diag[i] = 2.0 / s2 + h.potential().d2(h.profile(z));
    }
    const double off = -1.0 / s2;
    // Sturm count of eigenvalues below x for the symmetric tridiagonal matrix
    const auto below = [&](double x) {
        int c = 0;
        double d = 1.0;
        for (int i = 0; i < n; ++i) {
            d = diag[i] - x - (i > 0 ? off * off / d : 0.0);
            if (d == 0.0) d = -1e-300;
            if (d < 0.0) ++c;
        }
        return c;
    };
    const double lo0 = diag.minCoeff() - 2.0 * std::abs(off), hi0 = diag.maxCoeff() + 2.0 * std::abs(off);
    std::vector<double> out;
    for (int k = 0; k < std::min(count, n); ++k) {
        double lo = lo0, hi = hi0;
        while (hi - lo > 1e-14 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (below(mid) > k) hi = mid;
            else lo = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

}  // namespace ac
