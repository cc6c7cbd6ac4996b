#pragma once

#include <stdexcept>

// Zero-recovery defaultable bond approximation and the identification of
// lambda_bar with the continuously-compounded yield spread.

namespace dso {

struct BondParams {
    double lambda_bar = 0.0;  // 1/year
    double L = 0.0;           // 1/year, sqrt(eps) correction coefficient
    double L_tilde = 0.0;     // 1/year^2, sqrt(delta) correction coefficient
};

struct YieldSpreadPoint {
    double maturity = 0.0;  // years
    double spread = 0.0;    // 1/year, continuously compounded

    void validate() const;
};

// B(t,T) * exp(-lambda_bar tau) * (1 + L tau - L_tilde tau^2 / 2).
// The decaying exponential is used; see the leading-order term.
double bhat(const BondParams& bp, double discount, double tau);

// Leading-order identification: lambda_bar equals the spread.
double spread_to_lambda(const YieldSpreadPoint& pt);

// Continuously compounded spread of a defaultable bond price over the
// riskless bond: -log(price / (face * B)) / tau.
double implied_spread(double price, double face, double discount, double tau);

}  // namespace dso
