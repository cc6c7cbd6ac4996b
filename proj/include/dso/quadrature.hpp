#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace dso {

// Adaptive Simpson on [a, b]. Throws if the tolerance cannot be met within
// the recursion budget.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-11, double abs_tol = 1e-14);

// Integral of f against the N(mean, sd^2) density over (-inf, inf),
// truncated at +-12 standard deviations.
double gaussian_average(const std::function<double(double)>& f, double mean, double sd,
                        double rel_tol = 1e-11);

inline double gaussian_density(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * 2.5066282746310005024);
}

}  // namespace dso
