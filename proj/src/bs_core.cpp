#include "dso/bs_core.hpp"

#include <algorithm>
#include <cmath>

namespace dso {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

void QuoteContext::validate() const {
    if (!(spot > 0.0)) throw std::domain_error("QuoteContext: spot must be > 0");
    if (!(strike >= 0.0)) throw std::domain_error("QuoteContext: strike must be >= 0");
    if (!(discount > 0.0 && discount <= 1.0))
        throw std::domain_error("QuoteContext: discount must be in (0, 1]");
    if (!(tau >= 0.0)) throw std::domain_error("QuoteContext: tau must be >= 0");
}

void LevelParams::validate() const {
    if (!(avg_var > 0.0)) throw std::domain_error("LevelParams: avg_var must be > 0");
    if (!(lambda_bar >= 0.0)) throw std::domain_error("LevelParams: lambda_bar must be >= 0");
}

double LevelParams::sigma_bar() const { return std::sqrt(avg_var); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

std::pair<double, double> d_tilde(const QuoteContext& ctx, const LevelParams& lv) {
    ctx.validate();
    lv.validate();
    if (!(ctx.tau > 0.0)) throw std::domain_error("d_tilde: tau must be > 0");
    if (!(ctx.strike > 0.0)) throw std::domain_error("d_tilde: strike must be > 0");
    const double sig = lv.sigma_bar();
    const double srt = sig * std::sqrt(ctx.tau);
    const double lm = std::log(ctx.spot / (ctx.strike * ctx.discount));
    const double d1 = (lm + (lv.lambda_bar + 0.5 * lv.avg_var) * ctx.tau) / srt;
    return {d1, d1 - srt};
}

double c00_call(const QuoteContext& ctx, const LevelParams& lv) {
    ctx.validate();
    lv.validate();
    if (ctx.strike == 0.0) return ctx.spot;
    if (ctx.tau == 0.0) return std::max(ctx.spot - ctx.strike * ctx.discount, 0.0);
    const auto [d1, d2] = d_tilde(ctx, lv);
    const double disc_strike = ctx.strike * ctx.discount * std::exp(-lv.lambda_bar * ctx.tau);
    return ctx.spot * norm_cdf(d1) - disc_strike * norm_cdf(d2);
}

double c00_put(const QuoteContext& ctx, const LevelParams& lv) {
    return c00_call(ctx, lv) - ctx.spot + ctx.discount * ctx.strike;
}

GreekBlocks greek_blocks(const QuoteContext& ctx, const LevelParams& lv) {
    ctx.validate();
    lv.validate();
    if (ctx.strike == 0.0) return {0.0, 0.0, 0.0};
    if (!(ctx.tau > 0.0)) throw std::domain_error("greek_blocks: tau must be > 0");
    const auto [d1, d2] = d_tilde(ctx, lv);
    const double srt = lv.sigma_bar() * std::sqrt(ctx.tau);
    GreekBlocks gb;
    gb.g2 = ctx.spot * norm_pdf(d1) / srt;
    gb.g1 = gb.g2 * (1.0 - d1 / srt);
    gb.g3 = ctx.strike * ctx.discount * std::exp(-lv.lambda_bar * ctx.tau) * norm_cdf(d2);
    return gb;
}

double vega(const QuoteContext& ctx, double sigma, double rate_level) {
    ctx.validate();
    if (!(ctx.tau > 0.0)) throw std::domain_error("vega: tau must be > 0");
    if (!(sigma > 0.0)) throw std::domain_error("vega: sigma must be > 0");
    if (ctx.strike == 0.0) return 0.0;
    const double srt = sigma * std::sqrt(ctx.tau);
    const double lm = std::log(ctx.spot / (ctx.strike * ctx.discount));
    const double d1 = (lm + (rate_level + 0.5 * sigma * sigma) * ctx.tau) / srt;
    return ctx.spot * norm_pdf(d1) * std::sqrt(ctx.tau);
}

}  // namespace dso
