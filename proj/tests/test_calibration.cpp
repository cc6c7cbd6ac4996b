#include "dso/calibration.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "dso/implied_vol.hpp"

using namespace dso;

namespace {

// quotes priced exactly by the approximation, OTM side per strike
OptionChain chain_from_params(const ApproxParams& truth, double spot = 100.0,
                              double rate = 0.04) {
    OptionChain chain;
    chain.date = "2006-01-09";
    chain.spot = spot;
    chain.avg_var = truth.avg_var;
    for (double tau : {0.25, 0.5, 1.0}) {
        const double disc = std::exp(-rate * tau);
        const double fwd = spot / disc;
        for (double m = 0.85; m <= 1.151; m += 0.05) {
            OptionQuote q;
            q.tau = tau;
            q.strike = m * fwd;
            q.discount = disc;
            const QuoteContext ctx{spot, q.strike, disc, tau};
            q.side = q.strike < fwd ? OptionSide::Put : OptionSide::Call;
            q.observed_price = q.side == OptionSide::Put ? price_put(truth, ctx).value
                                                         : price_call(truth, ctx).value;
            q.observed_iv = invert_bs(price_call(truth, ctx).value, ctx);
            q.market_vega = vega(ctx, q.observed_iv);
            chain.quotes.push_back(q);
        }
    }
    return chain;
}

ApproxParams truth7() {
    ApproxParams p;
    p.kind = ModelKind::SevenParam;
    p.lambda_bar = 0.04385;
    p.avg_var = 0.2922 * 0.2922;
    p.v_eps = {0.0015, 0.001, -0.004};
    p.v_delta = {0.0005, -0.001, -0.002};
    return p;
}

}  // namespace

TEST(Objective, ZeroAtTruthAndDefinitional) {
    const ApproxParams truth = truth7();
    const OptionChain chain = chain_from_params(truth);
    EXPECT_NEAR(objective(chain, truth), 0.0, 1e-20);

    // definitional: perturb and recompute by hand
    ApproxParams off = truth;
    off.v_eps[1] += 0.0005;
    double expected = 0.0;
    for (const auto& q : chain.quotes) {
        const QuoteContext ctx{chain.spot, q.strike, q.discount, q.tau};
        const double model = q.side == OptionSide::Put ? price_put(off, ctx).value
                                                       : price_call(off, ctx).value;
        const double r = (q.observed_price - model) / q.market_vega;
        expected += r * r;
    }
    EXPECT_NEAR(objective(chain, off), expected, 1e-15 * expected);
    EXPECT_GT(expected, 0.0);
}

TEST(Objective, VegaWeightScaling) {
    const ApproxParams truth = truth7();
    OptionChain chain = chain_from_params(truth);
    ApproxParams off = truth;
    off.v_eps[1] += 0.0005;
    const double base = objective(chain, off);
    for (auto& q : chain.quotes) q.market_vega *= 2.0;
    EXPECT_NEAR(objective(chain, off), 0.25 * base, 1e-12 * base);
}

TEST(Objective, Validation) {
    OptionChain empty;
    empty.spot = 100.0;
    empty.avg_var = 0.04;
    EXPECT_THROW(objective(empty, ApproxParams{}), std::invalid_argument);
}

TEST(SchemeA, ExactRecoveryAllFamilies) {
    for (ModelKind kind : {ModelKind::SevenParam, ModelKind::FiveParam, ModelKind::ThreeParam,
                           ModelKind::SVOnly}) {
        const ApproxParams truth = truth7().restricted(kind);
        const OptionChain chain = chain_from_params(truth);
        const auto res = calibrate_fixed_lambda(chain, truth.lambda_bar, kind);
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(res.params.v_eps[i], truth.v_eps[i], 1e-8 * 0.01)
                << to_string(kind) << " v_eps[" << i << "]";
            EXPECT_NEAR(res.params.v_delta[i], truth.v_delta[i], 1e-8 * 0.01)
                << to_string(kind) << " v_delta[" << i << "]";
        }
        EXPECT_FALSE(res.rank_deficient);
        EXPECT_LT(res.objective, 1e-16);
        for (double r : res.residuals) EXPECT_NEAR(r, 0.0, 1e-8);
        EXPECT_EQ(res.scheme, Scheme::A);
        EXPECT_TRUE(res.lambda_from_spread);
        EXPECT_GT(res.condition, 1.0);
    }
}

TEST(SchemeA, Validation) {
    const OptionChain chain = chain_from_params(truth7());
    EXPECT_THROW(calibrate_fixed_lambda(chain, -0.01, ModelKind::SevenParam),
                 std::invalid_argument);
    EXPECT_THROW(calibrate_fixed_lambda(chain, 0.02, ModelKind::SVOnly),
                 std::invalid_argument);
    EXPECT_NO_THROW(calibrate_fixed_lambda(chain, 0.0, ModelKind::SVOnly));
}

TEST(SchemeA, RankDeficientSingleQuote) {
    OptionChain chain = chain_from_params(truth7());
    chain.quotes.resize(1);  // 1 row, 6 free columns
    const auto res = calibrate_fixed_lambda(chain, truth7().lambda_bar,
                                            ModelKind::SevenParam);
    EXPECT_TRUE(res.rank_deficient);
    // minimum-norm solution still reproduces the single quote
    EXPECT_NEAR(res.objective, 0.0, 1e-18);
}

TEST(SchemeB, RecoversFreeLambda) {
    const ApproxParams truth = truth7();
    const OptionChain chain = chain_from_params(truth);
    const auto res = calibrate_free_lambda(chain, ModelKind::SevenParam);
    EXPECT_NEAR(res.params.lambda_bar, truth.lambda_bar, 1e-4);
    EXPECT_EQ(res.scheme, Scheme::B);
    EXPECT_FALSE(res.lambda_from_spread);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(res.params.v_eps[i], truth.v_eps[i], 1e-4);
        EXPECT_NEAR(res.params.v_delta[i], truth.v_delta[i], 1e-4);
    }
}

TEST(SchemeB, RejectsSvFamily) {
    const OptionChain chain = chain_from_params(truth7());
    EXPECT_THROW(calibrate_free_lambda(chain, ModelKind::SVOnly), std::invalid_argument);
}

TEST(SchemeB, NestedObjectiveOrdering) {
    // richer families fit at least as well on the same chain
    ApproxParams truth = truth7();
    const OptionChain chain = chain_from_params(truth);
    const double obj7 = calibrate_free_lambda(chain, ModelKind::SevenParam).objective;
    const double obj5 = calibrate_free_lambda(chain, ModelKind::FiveParam).objective;
    const double obj_sv =
        calibrate_fixed_lambda(chain, 0.0, ModelKind::SVOnly).objective;
    EXPECT_LE(obj7, obj5 + 1e-12);
    EXPECT_LE(obj5, obj_sv + 1e-12);
    EXPECT_GT(obj_sv, obj7);  // the restriction binds for this truth
}

TEST(HistoricalVol, KnownCases) {
    // constant prices: zero variance
    EXPECT_DOUBLE_EQ(historical_vol({100.0, 100.0, 100.0}, 2), 0.0);
    // single squared return, window 1
    const double r = 0.01;
    EXPECT_NEAR(historical_vol({100.0, 100.0 * std::exp(r)}, 1), 252.0 * r * r, 1e-15);
    // uses only the trailing window
    const double v = historical_vol({500.0, 100.0, 100.0 * std::exp(r)}, 1);
    EXPECT_NEAR(v, 252.0 * r * r, 1e-15);
}

TEST(HistoricalVol, Validation) {
    EXPECT_THROW(historical_vol({100.0, 101.0}, 0), std::invalid_argument);
    EXPECT_THROW(historical_vol({100.0}, 1), std::invalid_argument);
    EXPECT_THROW(historical_vol({100.0, -1.0, 100.0}, 2), std::invalid_argument);
}

TEST(BuildOtmChain, SidesPricesAndVegas) {
    const std::vector<double> strikes{90.0, 100.0, 110.0};
    const std::vector<double> mats{0.5, 1.0};
    const std::vector<double> discounts{std::exp(-0.02), std::exp(-0.04)};
    const std::vector<std::vector<double>> civ{{0.31, 0.30, 0.29}, {0.30, 0.29, 0.28}};
    const std::vector<std::vector<double>> piv{{0.33, 0.32, 0.31}, {0.32, 0.31, 0.30}};
    const auto chain = build_otm_chain(civ, piv, strikes, mats, discounts, 100.0, 0.09,
                                       "2006-01-09");
    ASSERT_EQ(chain.quotes.size(), 6u);
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const double fwd = 100.0 / discounts[i];
        for (std::size_t j = 0; j < strikes.size(); ++j) {
            const auto& q = chain.quotes[i * strikes.size() + j];
            EXPECT_DOUBLE_EQ(q.tau, mats[i]);
            EXPECT_DOUBLE_EQ(q.strike, strikes[j]);
            EXPECT_EQ(q.side, strikes[j] < fwd ? OptionSide::Put : OptionSide::Call);
            const double iv = 0.5 * (civ[i][j] + piv[i][j]);
            EXPECT_DOUBLE_EQ(q.observed_iv, iv);
            const QuoteContext ctx{100.0, q.strike, q.discount, q.tau};
            const LevelParams lv{iv * iv, 0.0};
            const double ref = q.side == OptionSide::Put ? c00_put(ctx, lv)
                                                         : c00_call(ctx, lv);
            EXPECT_DOUBLE_EQ(q.observed_price, ref);
            EXPECT_NEAR(q.market_vega, vega(ctx, iv), 1e-14);
            EXPECT_GT(q.market_vega, 0.0);
        }
    }
}

TEST(BuildOtmChain, GridValidation) {
    const std::vector<std::vector<double>> iv1{{0.3, 0.3}};
    const std::vector<std::vector<double>> iv2{{0.3, 0.3, 0.3}};
    EXPECT_THROW(build_otm_chain(iv1, iv1, {90.0, 100.0, 110.0}, {0.5}, {1.0}, 100.0, 0.09),
                 std::invalid_argument);
    EXPECT_THROW(build_otm_chain(iv2, iv2, {90.0, 100.0, 110.0}, {0.5, 1.0}, {1.0, 1.0},
                                 100.0, 0.09),
                 std::invalid_argument);
    const std::vector<std::vector<double>> bad{{0.3, -0.3, 0.3}};
    EXPECT_THROW(build_otm_chain(bad, bad, {90.0, 100.0, 110.0}, {0.5}, {1.0}, 100.0, 0.09),
                 std::invalid_argument);
}
