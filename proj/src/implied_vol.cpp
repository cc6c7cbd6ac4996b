#include "dso/implied_vol.hpp"

#include <algorithm>
#include <cmath>

#include "dso/io.hpp"

namespace dso {

namespace {
constexpr double kVolLo = 1e-4;
constexpr double kVolHi = 5.0;

double call_at_vol(const QuoteContext& ctx, double vol) {
    return c00_call(ctx, LevelParams{vol * vol, 0.0});
}
}  // namespace

double invert_bs(double price, const QuoteContext& ctx) {
    ctx.validate();
    if (!(ctx.tau > 0.0)) throw std::domain_error("invert_bs: tau must be > 0");
    if (!(ctx.strike > 0.0)) throw std::domain_error("invert_bs: strike must be > 0");
    const double lower = std::max(ctx.spot - ctx.strike * ctx.discount, 0.0);
    const double upper = ctx.spot;
    if (!(price > lower) || !(price < upper))
        throw InversionError("invert_bs: price outside (lower bound, spot)", price, lower, upper);

    double lo = kVolLo, hi = kVolHi;
    double f_lo = call_at_vol(ctx, lo) - price;
    double f_hi = call_at_vol(ctx, hi) - price;
    // The call is increasing in vol; clamp to the bracket if the target sits
    // outside the evaluable range.
    if (f_lo >= 0.0) return lo;
    if (f_hi <= 0.0) return hi;

    double vol = std::clamp(0.3, lo, hi);
    const double tol = 1e-12 * ctx.spot;
    for (int iter = 0; iter < 100; ++iter) {
        const double f = call_at_vol(ctx, vol) - price;
        if (std::abs(f) <= tol) return vol;
        if (f > 0.0) hi = vol; else lo = vol;
        const double v = vega(ctx, vol);
        double next = vol - f / v;
        if (!(v > 0.0) || !(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - vol) < 1e-16) return next;
        vol = next;
    }
    return vol;
}

double i0(const QuoteContext& ctx, const LevelParams& lv) {
    lv.validate();
    if (lv.lambda_bar == 0.0) return lv.sigma_bar();
    return invert_bs(c00_call(ctx, lv), ctx);
}

IVExpansion iv_corrections(const ApproxParams& params, const QuoteContext& ctx) {
    params.validate();
    if (!(ctx.tau > 0.0)) throw std::domain_error("iv_corrections: tau must be > 0");
    const LevelParams lv = params.level();
    IVExpansion out;
    out.i0 = i0(ctx, lv);

    const double sig = lv.sigma_bar();
    const double srt = sig * std::sqrt(ctx.tau);
    const auto [dt1, dt2] = d_tilde(ctx, lv);
    const double lm = std::log(ctx.spot / (ctx.strike * ctx.discount));
    const double d1 = (lm + 0.5 * out.i0 * out.i0 * ctx.tau) / (out.i0 * std::sqrt(ctx.tau));

    const double e = std::exp(0.5 * (d1 * d1 - dt1 * dt1));
    const double slope = 1.0 - dt1 / srt;
    const double wing = std::sqrt(2.0 * M_PI * ctx.tau) * std::exp(0.5 * d1 * d1) *
                        (ctx.strike / ctx.spot) * ctx.discount * norm_cdf(dt2);

    out.corr_eps = -params.v_eps[0] * e * slope - params.v_eps[1] * e / lv.avg_var -
                   params.v_eps[2] * wing;
    out.corr_delta = ctx.tau * (params.v_delta[0] * e * slope +
                                params.v_delta[1] * e / lv.avg_var +
                                params.v_delta[2] * wing);
    out.total = out.i0 + out.corr_eps + out.corr_delta;
    return out;
}

SurfaceGrid surface(const ApproxParams& params, const std::vector<double>& strikes,
                    const std::vector<double>& maturities, const DiscountCurve& curve,
                    double spot, bool use_expansion) {
    if (strikes.empty() || maturities.empty())
        throw std::invalid_argument("surface: strikes and maturities must be nonempty");
    SurfaceGrid grid;
    grid.strikes = strikes;
    grid.maturities = maturities;
    grid.kind = params.kind;
    grid.params = params;
    grid.iv.assign(maturities.size(), std::vector<double>(strikes.size(), 0.0));
    grid.populated.assign(maturities.size(), std::vector<bool>(strikes.size(), false));

    for (std::size_t i = 0; i < maturities.size(); ++i) {
        for (std::size_t j = 0; j < strikes.size(); ++j) {
            QuoteContext ctx{spot, strikes[j], curve.discount(maturities[i]), maturities[i]};
            try {
                double iv;
                if (use_expansion) {
                    iv = iv_corrections(params, ctx).total;
                    if (!(iv > 0.0) || !std::isfinite(iv)) continue;
                } else {
                    iv = invert_bs(price_call(params, ctx).value, ctx);
                }
                grid.iv[i][j] = iv;
                grid.populated[i][j] = true;
            } catch (const std::exception&) {
                // cell stays flagged unpopulated
            }
        }
    }
    return grid;
}

}  // namespace dso
