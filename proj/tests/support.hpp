#pragma once

#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

namespace test {

inline constexpr double pi = 3.14159265358979323846;

/// Seeded generator shared by the property checks.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(unsigned long seed) : rng(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
    Eigen::VectorXd vector(int n, double a = -1.0, double b = 1.0) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(a, b);
        return v;
    }
};

/// Runs body on `cases` generated inputs; the case index is reported on failure.
inline void forall(int cases, unsigned long seed, const std::function<void(Gen&, int)>& body) {
    Gen g(seed);
    for (int i = 0; i < cases; ++i) {
        CAPTURE(i);
        body(g, i);
    }
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace test
