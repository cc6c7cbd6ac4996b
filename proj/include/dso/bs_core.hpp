#pragma once

#include <stdexcept>
#include <utility>

// Black-Scholes primitives for a defaultable stock: the leading-order
// call/put price carries an intensity bump lambda_bar on top of the
// discounted-strike convention (the strike always enters as K * B(t,T)).

namespace dso {

struct QuoteContext {
    double spot = 0.0;      // x
    double strike = 0.0;    // K
    double discount = 1.0;  // B(t,T), riskless bond price
    double tau = 0.0;       // T - t in years

    void validate() const;
    double forward() const { return spot / discount; }
};

struct LevelParams {
    double avg_var = 0.0;     // sigma_bar^2, annualized
    double lambda_bar = 0.0;  // effective default intensity, 1/year

    void validate() const;
    double sigma_bar() const;
};

// Coefficients of the three price-correction operators applied to the
// leading-order price:
//   g1 = x d/dx (x^2 d2C/dx2),  g2 = x^2 d2C/dx2,  g3 = x dC/dx - C
struct GreekBlocks {
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
};

double norm_cdf(double x);
double norm_pdf(double x);

// (d1, d2) of the leading-order price; requires tau > 0 and K > 0.
std::pair<double, double> d_tilde(const QuoteContext& ctx, const LevelParams& lv);

// Leading-order call: x N(d1) - K B exp(-lambda_bar tau) N(d2).
// K = 0 and tau = 0 are handled as limit branches.
double c00_call(const QuoteContext& ctx, const LevelParams& lv);

// Leading-order put, defined through put-call parity C - P = x - B K.
double c00_put(const QuoteContext& ctx, const LevelParams& lv);

GreekBlocks greek_blocks(const QuoteContext& ctx, const LevelParams& lv);

// dC_BS/dsigma at volatility sigma and rate level rate_level, strike
// discounted by ctx.discount. Requires tau > 0.
double vega(const QuoteContext& ctx, double sigma, double rate_level = 0.0);

}  // namespace dso
