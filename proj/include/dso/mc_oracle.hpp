#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dso/approx_pricer.hpp"
#include "dso/bond_pricer.hpp"
#include "dso/mc_model.hpp"

namespace dso {

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
};

struct Payoff {
    enum class Kind { Call, Put, Bond, DiscountedStock } kind = Kind::Call;
    double strike = 0.0;

    static Payoff call(double k) { return {Kind::Call, k}; }
    static Payoff put(double k) { return {Kind::Put, k}; }
    static Payoff bond() { return {Kind::Bond, 0.0}; }
    // e^{-rT} S_T e^{-int lambda}: martingale check, expectation is x0
    static Payoff discounted_stock() { return {Kind::DiscountedStock, 0.0}; }
};

// Lower Cholesky factor of the 5x5 Brownian correlation matrix, built
// blockwise ({W0,W1,W2} x {W3,W4}). Throws with the failing leading minor
// if the matrix is not PSD.
std::array<std::array<double, 5>, 5> correlation_cholesky(const MCModelSpec& spec);

// The five correlated increments for one (path, step), scaled by sqrt(dt).
// Antithetic pairing: paths in the upper half reuse the negated normals of
// their partner in the lower half.
std::array<double, 5> correlated_increments(const MCModelSpec& spec, double dt,
                                            std::uint64_t seed, std::uint64_t path,
                                            std::uint64_t step, std::size_t n_paths);

std::size_t min_steps(double T, double eps);

// Euler-Maruyama on (log S, Y, Z, Q, U); default is integrated out through
// the survival discount exp(-int lambda). All payoffs share the same paths
// (common random numbers). Deterministic for fixed (seed, n_paths, n_steps)
// regardless of thread count.
std::vector<MCEstimate> simulate_payoffs(const MCModelSpec& spec,
                                         const std::vector<Payoff>& payoffs, double T,
                                         std::size_t n_steps, std::size_t n_paths,
                                         std::uint64_t seed);

MCEstimate simulate_price(const MCModelSpec& spec, const Payoff& payoff, double T,
                          std::size_t n_steps, std::size_t n_paths, std::uint64_t seed);

struct EffectiveParams {
    ApproxParams params;     // 7-parameter family
    double avg_sig2 = 0.0;   // <sigma^2> at z0
    double avg_f = 0.0;      // <f> at u0
    double avg_sig = 0.0;
    double dsig2_dz = 0.0;   // d<sigma^2>/dz
    double df_du = 0.0;      // d<f>/du
    double quad_rel_tol = 0.0;
    BondParams bond;         // matching (lambda_bar, L, L_tilde)
};

// Group parameters of the approximation from the concrete model functions:
// Gaussian averages and the fast-factor Poisson-equation quadrature.
EffectiveParams effective_params(const MCModelSpec& spec);

struct ConvergencePoint {
    double eps = 0.0;
    double delta = 0.0;
    double max_error = 0.0;     // max over strikes |MC - approximation|
    double noise = 0.0;         // MC std error at the argmax strike
    double bound = 0.0;         // eps |log eps| + delta
    double ratio = 0.0;         // max_error / bound
    bool inconclusive = false;  // noise > max_error / 2
};

// Errors of the first-order approximation against the MC oracle along
// decreasing (eps, delta) ladders, over a strike chain at maturity T.
std::vector<ConvergencePoint> convergence_study(const MCModelSpec& spec_template,
                                                const std::vector<double>& eps_ladder,
                                                const std::vector<double>& delta_ladder,
                                                const std::vector<double>& strikes, double T,
                                                std::size_t n_paths, std::uint64_t seed);

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergencePoint>& table);

}  // namespace dso
