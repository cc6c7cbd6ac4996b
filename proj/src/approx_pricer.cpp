#include "dso/approx_pricer.hpp"

#include <algorithm>
#include <cmath>

namespace dso {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::SevenParam: return "7p";
        case ModelKind::FiveParam: return "5p";
        case ModelKind::ThreeParam: return "3p";
        case ModelKind::SVOnly: return "sv";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "7p") return ModelKind::SevenParam;
    if (s == "5p") return ModelKind::FiveParam;
    if (s == "3p") return ModelKind::ThreeParam;
    if (s == "sv") return ModelKind::SVOnly;
    throw std::invalid_argument("unknown model kind: " + s);
}

void ApproxParams::validate() const {
    level().validate();
    auto nonzero = [](double v) { return v != 0.0; };
    switch (kind) {
        case ModelKind::SevenParam:
            break;
        case ModelKind::FiveParam:
            if (nonzero(v_eps[2]) || nonzero(v_delta[2]))
                throw std::invalid_argument("5p family requires V3 coefficients = 0");
            break;
        case ModelKind::SVOnly:
            if (nonzero(v_eps[2]) || nonzero(v_delta[2]))
                throw std::invalid_argument("sv family requires V3 coefficients = 0");
            if (nonzero(lambda_bar))
                throw std::invalid_argument("sv family requires lambda_bar = 0");
            break;
        case ModelKind::ThreeParam:
            if (nonzero(v_eps[0]) || nonzero(v_eps[2]) || nonzero(v_delta[0]) ||
                nonzero(v_delta[2]))
                throw std::invalid_argument("3p family keeps only the V2 coefficients");
            break;
    }
}

ApproxParams ApproxParams::restricted(ModelKind target) const {
    ApproxParams out = *this;
    out.kind = target;
    switch (target) {
        case ModelKind::SevenParam:
            break;
        case ModelKind::FiveParam:
            out.v_eps[2] = out.v_delta[2] = 0.0;
            break;
        case ModelKind::SVOnly:
            out.v_eps[2] = out.v_delta[2] = 0.0;
            out.lambda_bar = 0.0;
            break;
        case ModelKind::ThreeParam:
            out.v_eps[0] = out.v_eps[2] = 0.0;
            out.v_delta[0] = out.v_delta[2] = 0.0;
            break;
    }
    return out;
}

PriceQuality price_call(const ApproxParams& params, const QuoteContext& ctx) {
    params.validate();
    const LevelParams lv = params.level();
    const double c00 = c00_call(ctx, lv);
    if (ctx.strike == 0.0) return {c00, true};
    const GreekBlocks gb = greek_blocks(ctx, lv);
    const double tau = ctx.tau;
    const double corr_eps =
        params.v_eps[0] * gb.g1 + params.v_eps[1] * gb.g2 + params.v_eps[2] * gb.g3;
    const double corr_delta =
        params.v_delta[0] * gb.g1 + params.v_delta[1] * gb.g2 + params.v_delta[2] * gb.g3;
    const double value = c00 - tau * corr_eps + tau * tau * corr_delta;
    const double lower = std::max(ctx.spot - ctx.strike * ctx.discount, 0.0);
    const bool ok = value >= lower && value <= ctx.spot;
    return {value, ok};
}

PriceQuality price_put(const ApproxParams& params, const QuoteContext& ctx) {
    const PriceQuality call = price_call(params, ctx);
    const double value = call.value - ctx.spot + ctx.discount * ctx.strike;
    const double upper = ctx.discount * ctx.strike;
    const double lower = std::max(ctx.discount * ctx.strike - ctx.spot, 0.0);
    const bool ok = value >= lower && value <= upper;
    return {value, ok};
}

bool nesting_check(const ApproxParams& params7, const QuoteContext& ctx, double rel_tol) {
    const double scale = std::max(1.0, ctx.spot);
    auto close = [&](double a, double b) { return std::abs(a - b) <= rel_tol * scale; };

    ApproxParams p7 = params7;
    p7.kind = ModelKind::SevenParam;

    ApproxParams p5_as7 = p7.restricted(ModelKind::FiveParam);
    p5_as7.kind = ModelKind::SevenParam;
    ApproxParams p5 = p7.restricted(ModelKind::FiveParam);
    if (!close(price_call(p5_as7, ctx).value, price_call(p5, ctx).value)) return false;

    ApproxParams p3_as5 = p5.restricted(ModelKind::ThreeParam);
    p3_as5.kind = ModelKind::FiveParam;
    ApproxParams p3 = p5.restricted(ModelKind::ThreeParam);
    if (!close(price_call(p3_as5, ctx).value, price_call(p3, ctx).value)) return false;

    ApproxParams sv_as5 = p5.restricted(ModelKind::SVOnly);
    sv_as5.kind = ModelKind::FiveParam;
    ApproxParams sv = p5.restricted(ModelKind::SVOnly);
    return close(price_call(sv_as5, ctx).value, price_call(sv, ctx).value);
}

}  // namespace dso
