#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace ac {

/// Raised when an operation rejects its input.
class rejected : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Even double-well potential with its first three derivatives.
struct DoubleWell {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    std::function<double(double)> d3;
    double well = 1.0;

    /// W(t) = (1 - t^2)^2 / 4.
    static DoubleWell quartic();

    /// Sign and symmetry checks; throws `rejected` on failure.
    void validate() const;
};

struct ProfileValues {
    double value;
    double slope;
    double curvature;
};

/// Monotone 1D transition profile connecting -1 to +1.
///
/// Tabulated on a uniform grid over [-half_width, half_width] with cubic
/// Hermite interpolation inside and analytic exponential tails outside.
class Heteroclinic {
public:
    Heteroclinic(DoubleWell w, double half_width, double step);

    const DoubleWell& potential() const { return w_; }
    double half_width() const { return half_width_; }
    double step() const { return step_; }

    double profile(double z) const { return at(z).value; }
    double derivative(double z) const { return at(z).slope; }
    double second(double z) const { return at(z).curvature; }
    ProfileValues at(double z) const;

    double sigma_well() const { return sigma_well_; }
    double sigma_energy() const { return sigma_energy_; }
    /// Smallest eigenvalue of -(d^2 - W''(profile)) orthogonal to the profile slope.
    double gap() const { return gap_; }
    double tail_rate() const { return tail_rate_; }

    /// Max of |psi'' - W'(psi)| over interior table nodes, by centered differences.
    double second_order_residual() const;
    /// Max of |psi' - sqrt(2 W(psi))| over table nodes.
    double first_order_residual() const;
    /// Integral of psi'^2/2 + W(psi).
    double equipartition_energy() const;

    const std::vector<double>& nodes() const { return z_; }
    const std::vector<double>& values() const { return values_; }

private:
    DoubleWell w_;
    double half_width_;
    double step_;
    std::vector<double> z_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    double tail_rate_ = 0.0;
    double tail_amp_ = 0.0;
    double sigma_well_ = 0.0;
    double sigma_energy_ = 0.0;
    double gap_ = 0.0;
};

Heteroclinic heteroclinic(const DoubleWell& w, double half_width = 12.0, double step = 0.01);

/// Returns (psi(z/eps), psi'(z/eps), psi''(z/eps)); no 1/eps factors.
ProfileValues scaled_profile(const Heteroclinic& h, double eps, double z);

/// Quintic step: 1 on |z| <= inner, 0 on |z| >= outer, C^2 in between.
double smooth_cutoff(double z, double inner, double outer);

/// (1/eps) * integral of psi'(z/eps)^2 * cutoff(z), cutoff equal to one on |z| <= c eps^delta
/// and vanishing beyond 1.01 c eps^delta.
double plateau_energy_integral(const Heteroclinic& h, double eps, double delta_star, double c);

/// Eigenvalues of the discretized -(d^2 - W''(profile)) on [-L, L] with Dirichlet ends.
std::vector<double> linearized_eigenvalues(const Heteroclinic& h, double half_width, double step, int count);

}  // namespace ac
