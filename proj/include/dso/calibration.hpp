#pragma once

#include <string>
#include <vector>

#include "dso/approx_pricer.hpp"

namespace dso {

enum class OptionSide { Call, Put };

struct OptionQuote {
    double tau = 0.0;            // years
    double strike = 0.0;
    double observed_price = 0.0; // OTM European price
    double observed_iv = 0.0;
    OptionSide side = OptionSide::Call;
    double discount = 1.0;       // B(t,T)
    double market_vega = 0.0;    // at the observed IV
};

struct OptionChain {
    std::string date;
    double spot = 0.0;
    double avg_var = 0.0;  // historical sigma_bar^2 input
    std::vector<OptionQuote> quotes;

    void validate() const;
};

enum class Scheme { A, B };

struct CalibrationResult {
    ApproxParams params;
    double objective = 0.0;
    std::vector<double> residuals;  // (obs - model) / vega, per quote
    Scheme scheme = Scheme::A;
    bool lambda_from_spread = true;
    bool rank_deficient = false;
    bool multimodal = false;  // scheme B found well-separated local minima
    double condition = 0.0;   // design matrix conditioning
};

// Vega-weighted price objective: sum_i ((O_obs - O_model) / vega_i)^2.
double objective(const OptionChain& chain, const ApproxParams& params);

// Scheme A: lambda_bar fixed, V coefficients by weighted linear least squares.
CalibrationResult calibrate_fixed_lambda(const OptionChain& chain, double lambda_bar,
                                         ModelKind kind);

// Scheme B: outer 1-d search over lambda_bar in [0, lambda_max] with the
// scheme A solve inside. Multistart guards against non-unimodal profiles.
CalibrationResult calibrate_free_lambda(const OptionChain& chain, ModelKind kind,
                                        double lambda_max = 0.5);

// Annualized realized variance of log returns (zero-mean estimator,
// 252 trading days/year) over the trailing window.
double historical_vol(const std::vector<double>& closing_prices, int window = 252);

// One OTM quote per (strike, maturity): average the call/put IVs, reprice
// the out-of-the-money side with the zero-rate discounted-strike formula.
OptionChain build_otm_chain(const std::vector<std::vector<double>>& call_ivs,
                            const std::vector<std::vector<double>>& put_ivs,
                            const std::vector<double>& strikes,
                            const std::vector<double>& maturities,
                            const std::vector<double>& discounts, double spot,
                            double avg_var, const std::string& date = {});

}  // namespace dso
