#pragma once

#include <array>
#include <functional>
#include <string>

namespace dso {

// Full five-factor model: stock with survival discounting, fast OU factors
// Y (volatility) and Q (intensity), slow factors Z and U.
//
//   sigma_t = sigma(Y_t, Z_t),  lambda_t = beta sigma_t^2 + f(Q_t, U_t)
//
// The function family is selected by name so specs can round-trip through
// plain-text config files.
struct MCModelSpec {
    // timescales
    double eps = 0.1;
    double delta = 0.1;

    // fast OU parameters: Y ~ OU(m, v), Q ~ OU(m_tilde, v_tilde)
    double m = 0.0, v = 1.0;
    double m_tilde = 0.0, v_tilde = 1.0;

    // slow factors: c(z) = kappa (theta - z), g(z) = g0 (and tilde versions)
    double kappa = 1.0, theta = 0.0, g0 = 0.5;
    double kappa_tilde = 1.0, theta_tilde = 0.0, g_tilde0 = 0.5;

    // leverage of volatility into the intensity
    double beta = 0.0;

    // market prices of risk, bounded constants by default
    double lambda_mpr = 0.0;        // Lambda(y, z)
    double gamma_mpr = 0.0;         // Gamma(y, z)
    double lambda_tilde_mpr = 0.0;  // Lambda~(q, u)
    double gamma_tilde_mpr = 0.0;   // Gamma~(q, u)

    // correlations: corr(W0,W1)=rho1, corr(W0,W2)=rho2, corr(W1,W2)=rho12,
    // corr(W3,W4)=rho34; the {W3,W4} block is independent of {W0,W1,W2}.
    double rho1 = 0.0, rho2 = 0.0, rho12 = 0.0, rho34 = 0.0;

    // initial state and rate
    double x0 = 100.0, y0 = 0.0, z0 = 0.0, q0 = 0.0, u0 = 0.0;
    double r = 0.0;

    // function family
    std::string family = "logistic";  // "logistic" | "constant"
    // logistic: sigma(y,z) = sigma_lo + (sigma_hi - sigma_lo) * logistic(y + z)
    //           f(q,u)     = f_lo + (f_hi - f_lo) * logistic(q + u)
    double sigma_lo = 0.15, sigma_hi = 0.45;
    double f_lo = 0.01, f_hi = 0.05;
    // constant: sigma = sigma0, f = f0
    double sigma0 = 0.2, f0 = 0.02;

    double sigma(double y, double z) const;
    double f(double q, double u) const;
    double dsigma2_dz(double y, double z) const;
    double df_du(double q, double u) const;
    double Lambda(double y, double z) const { (void)y; (void)z; return lambda_mpr; }
    double Gamma(double y, double z) const { (void)y; (void)z; return gamma_mpr; }
    double LambdaTilde(double q, double u) const { (void)q; (void)u; return lambda_tilde_mpr; }
    double GammaTilde(double q, double u) const { (void)q; (void)u; return gamma_tilde_mpr; }
    double c(double z) const { return kappa * (theta - z); }
    double g(double z) const { (void)z; return g0; }
    double c_tilde(double u) const { return kappa_tilde * (theta_tilde - u); }
    double g_tilde(double u) const { (void)u; return g_tilde0; }

    void validate() const;
};

// key = value config file ('#' comments allowed).
MCModelSpec load_mc_spec(const std::string& path);
void write_mc_spec(const std::string& path, const MCModelSpec& spec);

}  // namespace dso
