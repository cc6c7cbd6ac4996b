#include "dso/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace dso {

namespace {

// model price of the quote's OTM side
double side_price(const ApproxParams& params, const QuoteContext& ctx, OptionSide side) {
    return side == OptionSide::Call ? price_call(params, ctx).value
                                    : price_put(params, ctx).value;
}

QuoteContext ctx_of(const OptionChain& chain, const OptionQuote& q) {
    return {chain.spot, q.strike, q.discount, q.tau};
}

// column layout of the affine-in-V design, per family
std::vector<int> free_columns(ModelKind kind) {
    // full layout: [V1e, V2e, V3e, V1d, V2d, V3d]
    switch (kind) {
        case ModelKind::SevenParam: return {0, 1, 2, 3, 4, 5};
        case ModelKind::FiveParam:
        case ModelKind::SVOnly: return {0, 1, 3, 4};
        case ModelKind::ThreeParam: return {1, 4};
    }
    return {};
}

}  // namespace

void OptionChain::validate() const {
    if (!(spot > 0.0)) throw std::invalid_argument("OptionChain: spot must be > 0");
    if (!(avg_var > 0.0)) throw std::invalid_argument("OptionChain: avg_var must be > 0");
    if (quotes.empty()) throw std::invalid_argument("OptionChain: no quotes");
    for (const auto& q : quotes) {
        if (!(q.market_vega > 0.0))
            throw std::invalid_argument("OptionChain: quote has nonpositive vega");
        if (!(q.tau > 0.0) || !(q.strike > 0.0))
            throw std::invalid_argument("OptionChain: quote has invalid tau or strike");
    }
}

double objective(const OptionChain& chain, const ApproxParams& params) {
    chain.validate();
    double sum = 0.0;
    for (const auto& q : chain.quotes) {
        const double model = side_price(params, ctx_of(chain, q), q.side);
        const double res = (q.observed_price - model) / q.market_vega;
        sum += res * res;
    }
    if (!std::isfinite(sum)) throw std::runtime_error("objective: non-finite value");
    return sum;
}

CalibrationResult calibrate_fixed_lambda(const OptionChain& chain, double lambda_bar,
                                         ModelKind kind) {
    chain.validate();
    if (!(lambda_bar >= 0.0))
        throw std::invalid_argument("calibrate_fixed_lambda: lambda_bar must be >= 0");
    if (kind == ModelKind::SVOnly && lambda_bar != 0.0)
        throw std::invalid_argument("calibrate_fixed_lambda: sv family requires lambda_bar 0");

    ApproxParams base;
    base.kind = kind;
    base.lambda_bar = lambda_bar;
    base.avg_var = chain.avg_var;

    const auto cols = free_columns(kind);
    const int n = static_cast<int>(chain.quotes.size());
    const int p = static_cast<int>(cols.size());
    Eigen::MatrixXd A(n, p);
    Eigen::VectorXd b(n);

    const LevelParams lv = base.level();
    for (int i = 0; i < n; ++i) {
        const auto& q = chain.quotes[i];
        const QuoteContext ctx = ctx_of(chain, q);
        const GreekBlocks gb = greek_blocks(ctx, lv);
        const double gfull[3] = {gb.g1, gb.g2, gb.g3};
        const double w = 1.0 / q.market_vega;
        for (int j = 0; j < p; ++j) {
            const int c = cols[j];
            const double block = gfull[c % 3];
            A(i, j) = (c < 3 ? -q.tau : q.tau * q.tau) * block * w;
        }
        b(i) = (q.observed_price - side_price(base, ctx, q.side)) * w;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12 * std::max(n, p));
    const Eigen::VectorXd v = svd.solve(b);  // minimum-norm for deficient rank
    const double smax = svd.singularValues()(0);

    CalibrationResult result;
    result.params = base;
    for (int j = 0; j < p; ++j) {
        const int c = cols[j];
        if (c < 3) result.params.v_eps[c] = v(j);
        else result.params.v_delta[c - 3] = v(j);
    }
    result.scheme = Scheme::A;
    result.lambda_from_spread = true;
    result.rank_deficient = n < p || svd.rank() < p;
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    result.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    result.objective = objective(chain, result.params);
    result.residuals.reserve(n);
    for (const auto& q : chain.quotes) {
        const double model = side_price(result.params, ctx_of(chain, q), q.side);
        result.residuals.push_back((q.observed_price - model) / q.market_vega);
    }
    return result;
}

CalibrationResult calibrate_free_lambda(const OptionChain& chain, ModelKind kind,
                                        double lambda_max) {
    chain.validate();
    if (kind == ModelKind::SVOnly)
        throw std::invalid_argument("calibrate_free_lambda: sv family pins lambda_bar = 0");

    auto profile = [&](double lam) {
        return calibrate_fixed_lambda(chain, lam, kind).objective;
    };

    constexpr double kInvPhi = 0.6180339887498948482;
    auto golden = [&](double lo, double hi) {
        double a = lo, b = hi;
        double c = b - (b - a) * kInvPhi;
        double d = a + (b - a) * kInvPhi;
        double fc = profile(c), fd = profile(d);
        while (b - a > 1e-6) {
            if (fc < fd) {
                b = d; d = c; fd = fc;
                c = b - (b - a) * kInvPhi;
                fc = profile(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + (b - a) * kInvPhi;
                fd = profile(d);
            }
        }
        const double mid = 0.5 * (a + b);
        return std::make_pair(mid, profile(mid));
    };

    // multistart: one golden-section run per subinterval
    constexpr int kStarts = 5;
    std::vector<std::pair<double, double>> minima;
    for (int s = 0; s < kStarts; ++s) {
        const double lo = lambda_max * s / kStarts;
        const double hi = lambda_max * (s + 1) / kStarts;
        minima.push_back(golden(lo, hi));
    }
    auto best = std::min_element(minima.begin(), minima.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });

    bool multimodal = false;
    for (const auto& [lam, obj] : minima) {
        if (std::abs(lam - best->first) > 1e-3 &&
            obj <= best->second * (1.0 + 1e-6) + 1e-14)
            multimodal = true;
    }

    CalibrationResult result = calibrate_fixed_lambda(chain, best->first, kind);
    result.scheme = Scheme::B;
    result.lambda_from_spread = false;
    result.multimodal = multimodal;
    return result;
}

double historical_vol(const std::vector<double>& closing_prices, int window) {
    if (window < 1) throw std::invalid_argument("historical_vol: window must be >= 1");
    if (static_cast<int>(closing_prices.size()) < window + 1)
        throw std::invalid_argument("historical_vol: need at least window + 1 prices");
    for (double p : closing_prices)
        if (!(p > 0.0)) throw std::invalid_argument("historical_vol: prices must be > 0");

    const std::size_t n = closing_prices.size();
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        const double ret =
            std::log(closing_prices[n - window + i] / closing_prices[n - window + i - 1]);
        sum += ret * ret;
    }
    return 252.0 * sum / window;
}

OptionChain build_otm_chain(const std::vector<std::vector<double>>& call_ivs,
                            const std::vector<std::vector<double>>& put_ivs,
                            const std::vector<double>& strikes,
                            const std::vector<double>& maturities,
                            const std::vector<double>& discounts, double spot,
                            double avg_var, const std::string& date) {
    const std::size_t nm = maturities.size();
    const std::size_t nk = strikes.size();
    if (call_ivs.size() != nm || put_ivs.size() != nm || discounts.size() != nm)
        throw std::invalid_argument("build_otm_chain: maturity grid mismatch");
    for (std::size_t i = 0; i < nm; ++i)
        if (call_ivs[i].size() != nk || put_ivs[i].size() != nk)
            throw std::invalid_argument("build_otm_chain: strike grid mismatch");

    OptionChain chain;
    chain.date = date;
    chain.spot = spot;
    chain.avg_var = avg_var;
    for (std::size_t i = 0; i < nm; ++i) {
        for (std::size_t j = 0; j < nk; ++j) {
            const double iv = 0.5 * (call_ivs[i][j] + put_ivs[i][j]);
            if (!(iv > 0.0))
                throw std::invalid_argument("build_otm_chain: nonpositive averaged IV");
            OptionQuote q;
            q.tau = maturities[i];
            q.strike = strikes[j];
            q.discount = discounts[i];
            q.observed_iv = iv;
            const QuoteContext ctx{spot, q.strike, q.discount, q.tau};
            const double forward = spot / q.discount;
            q.side = q.strike < forward ? OptionSide::Put : OptionSide::Call;
            const LevelParams lv{iv * iv, 0.0};
            q.observed_price =
                q.side == OptionSide::Put ? c00_put(ctx, lv) : c00_call(ctx, lv);
            q.market_vega = vega(ctx, iv);
            chain.quotes.push_back(q);
        }
    }
    chain.validate();
    return chain;
}

}  // namespace dso
