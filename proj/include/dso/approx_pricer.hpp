#pragma once

#include <array>
#include <string>

#include "dso/bs_core.hpp"

// First-order corrected option prices for the four model families:
//   C = C00 - tau * (V1e g1 + V2e g2 + V3e g3)
//           + tau^2 * (V1d g1 + V2d g2 + V3d g3)
// The 5- and 3-parameter families and the lambda_bar=0 stochastic-vol
// baseline are nested restrictions of the 7-parameter family.

namespace dso {

enum class ModelKind { SevenParam, FiveParam, ThreeParam, SVOnly };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ApproxParams {
    ModelKind kind = ModelKind::SevenParam;
    double lambda_bar = 0.0;
    double avg_var = 0.04;
    std::array<double, 3> v_eps{0.0, 0.0, 0.0};
    std::array<double, 3> v_delta{0.0, 0.0, 0.0};

    LevelParams level() const { return {avg_var, lambda_bar}; }

    // Throws if a coefficient the family excludes is nonzero.
    void validate() const;

    // Zeroes coefficients excluded by the family (and lambda_bar for SVOnly).
    ApproxParams restricted(ModelKind target) const;
};

struct PriceQuality {
    double value = 0.0;
    bool arbitrage_ok = true;  // value inside no-arbitrage bounds
};

PriceQuality price_call(const ApproxParams& params, const QuoteContext& ctx);
PriceQuality price_put(const ApproxParams& params, const QuoteContext& ctx);

// Checks the algebraic nesting 7p -> 5p -> 3p and 5p -> SVOnly at one quote.
bool nesting_check(const ApproxParams& params7, const QuoteContext& ctx,
                   double rel_tol = 1e-12);

}  // namespace dso
