#pragma once

#include <vector>

#include "dso/approx_pricer.hpp"

namespace dso {

class InversionError : public std::runtime_error {
  public:
    InversionError(const std::string& what, double price, double lower, double upper)
        : std::runtime_error(what), price(price), lower(lower), upper(upper) {}
    double price, lower, upper;
};

struct IVExpansion {
    double i0 = 0.0;
    double corr_eps = 0.0;    // sqrt(eps) * I1_eps
    double corr_delta = 0.0;  // sqrt(delta) * I1_delta
    double total = 0.0;
};

struct SurfaceGrid {
    std::vector<double> strikes;
    std::vector<double> maturities;  // years
    std::vector<std::vector<double>> iv;  // [maturity][strike]
    std::vector<std::vector<bool>> populated;
    ModelKind kind = ModelKind::SevenParam;
    ApproxParams params;
};

// Implied volatility of a call quote against the zero-rate Black-Scholes
// price with discounted strike. Throws InversionError if the price is not
// strictly inside (lower bound, spot).
double invert_bs(double price, const QuoteContext& ctx);

// Leading-order implied vol: inversion of the defaultable C00.
double i0(const QuoteContext& ctx, const LevelParams& lv);

IVExpansion iv_corrections(const ApproxParams& params, const QuoteContext& ctx);

class DiscountCurve;  // io.hpp

SurfaceGrid surface(const ApproxParams& params, const std::vector<double>& strikes,
                    const std::vector<double>& maturities, const DiscountCurve& curve,
                    double spot, bool use_expansion = false);

}  // namespace dso
