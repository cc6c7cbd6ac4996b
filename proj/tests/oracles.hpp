#pragma once

// Independent numerical oracles used only by tests: quadrature of the
// normal density, finite differences of closed-form prices, and an RK4
// integration of the fast-factor Poisson equation. None of these share a
// code path with the library routines they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

// Adaptive Simpson, self-contained.
inline double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                          double b, double fb, double m, double fm, double whole,
                          double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol || depth > 40) return left + right + err / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
}

inline double quad(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-13) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 0);
}

inline double std_normal_density(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// N(x) by quadrature of the density over (-40, x].
inline double norm_cdf_quadrature(double x) {
    if (x < -40.0) return 0.0;
    return quad(std_normal_density, -40.0, x);
}

// second central difference in the first argument
inline double fd2(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline double fd1(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Richardson-extrapolated central difference, O(h^4).
inline double fd1_rich(const std::function<double(double)>& f, double x, double h) {
    return (4.0 * fd1(f, x, 0.5 * h) - fd1(f, x, h)) / 3.0;
}

// w' = (c(y) - (m - y) w) / v^2, w(y0) = w0: first-order form of the OU
// Poisson equation v^2 w' + (m - y) w = c(y) for w = phi_y, solved by RK4.
inline std::vector<double> poisson_phi_y_rk4(const std::function<double(double)>& c,
                                             double m, double v, double y0, double y1,
                                             int n_steps) {
    const double h = (y1 - y0) / n_steps;
    auto rhs = [&](double y, double w) { return (c(y) - (m - y) * w) / (v * v); };
    std::vector<double> w(n_steps + 1, 0.0);
    for (int i = 0; i < n_steps; ++i) {
        const double y = y0 + i * h;
        const double k1 = rhs(y, w[i]);
        const double k2 = rhs(y + 0.5 * h, w[i] + 0.5 * h * k1);
        const double k3 = rhs(y + 0.5 * h, w[i] + 0.5 * h * k2);
        const double k4 = rhs(y + h, w[i] + h * k3);
        w[i + 1] = w[i] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return w;
}

}  // namespace oracle
