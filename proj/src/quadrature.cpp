#include "dso/quadrature.hpp"

namespace dso {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol || depth > 48)
        return left + right + err / 15.0;
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(f, a, fa, b, fb, m, fm);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    const double result = adaptive(f, a, fa, b, fb, m, fm, whole, tol, 0);
    if (!std::isfinite(result))
        throw std::runtime_error("integrate: non-finite result");
    return result;
}

double gaussian_average(const std::function<double(double)>& f, double mean, double sd,
                        double rel_tol) {
    const double a = mean - 12.0 * sd;
    const double b = mean + 12.0 * sd;
    auto g = [&](double x) { return f(x) * gaussian_density(x, mean, sd); };
    return integrate(g, a, b, rel_tol);
}

}  // namespace dso
