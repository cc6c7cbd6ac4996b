#include "dso/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace dso;

namespace {

class TempDir : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("dso_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string write_file(const std::string& name, const std::string& content) {
        const auto path = (dir_ / name).string();
        std::ofstream out(path);
        out << content;
        return path;
    }

    std::filesystem::path dir_;
};

}  // namespace

using IoTest = TempDir;

TEST_F(IoTest, DiscountCurveSinglePillarFlat) {
    DiscountCurve curve({{0.5, 0.047771}});
    // flat extrapolation on both sides of the single pillar
    EXPECT_DOUBLE_EQ(curve.zero_rate(0.1), 0.047771);
    EXPECT_DOUBLE_EQ(curve.zero_rate(5.0), 0.047771);
    const double tau = 273.0 / 365.0;
    EXPECT_DOUBLE_EQ(curve.discount(tau), std::exp(-0.047771 * tau));
    EXPECT_DOUBLE_EQ(curve.discount(0.0), 1.0);
}

TEST_F(IoTest, DiscountCurveInterpolatesZeroRate) {
    DiscountCurve curve({{1.0, 0.04}, {3.0, 0.06}});
    EXPECT_DOUBLE_EQ(curve.zero_rate(2.0), 0.05);
    EXPECT_DOUBLE_EQ(curve.discount(2.0), std::exp(-0.05 * 2.0));
    EXPECT_DOUBLE_EQ(curve.zero_rate(0.25), 0.04);  // flat below
    EXPECT_DOUBLE_EQ(curve.zero_rate(10.0), 0.06);  // flat above
    EXPECT_THROW(curve.discount(-1.0), std::domain_error);
}

TEST_F(IoTest, DiscountCurveValidation) {
    EXPECT_THROW(DiscountCurve(std::vector<std::pair<double, double>>{}),
                 std::invalid_argument);
    EXPECT_THROW(DiscountCurve({{0.0, 0.04}}), std::invalid_argument);
    EXPECT_THROW(DiscountCurve({{1.0, 0.04}, {1.0, 0.05}}), std::invalid_argument);
}

TEST_F(IoTest, ChainRoundTrip) {
    std::vector<RawChainRow> rows{{"2006-01-09", 91, 95.5, 0.312345678901, 0.334567890123},
                                  {"2006-01-10", 182, 105.0, 0.29, 0.31}};
    const auto path = (dir_ / "chain.csv").string();
    write_chain(path, rows);
    const auto back = load_chain(path);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].date, rows[i].date);
        EXPECT_EQ(back[i].maturity_days, rows[i].maturity_days);
        EXPECT_NEAR(back[i].strike, rows[i].strike, 1e-12 * rows[i].strike);
        EXPECT_NEAR(back[i].call_iv, rows[i].call_iv, 1e-11);
        EXPECT_NEAR(back[i].put_iv, rows[i].put_iv, 1e-11);
    }
}

TEST_F(IoTest, ChainErrorsCarryLineNumbers) {
    const auto bad_header = write_file("h.csv", "date,strike\n");
    EXPECT_THROW(load_chain(bad_header), std::runtime_error);

    const auto bad_field = write_file(
        "f.csv", "date,maturity_days,strike,call_iv,put_iv\n2006-01-09,91,xyz,0.3,0.3\n");
    try {
        load_chain(bad_field);
        FAIL() << "expected runtime_error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("xyz"), std::string::npos);
    }

    const auto bad_iv = write_file(
        "iv.csv",
        "date,maturity_days,strike,call_iv,put_iv\n2006-01-09,91,100,0.3,0.3\n"
        "2006-01-09,91,105,-0.3,0.3\n");
    try {
        load_chain(bad_iv);
        FAIL() << "expected runtime_error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
    }

    const auto empty = write_file("e.csv", "date,maturity_days,strike,call_iv,put_iv\n");
    EXPECT_THROW(load_chain(empty), std::runtime_error);
    EXPECT_THROW(load_chain((dir_ / "missing.csv").string()), std::runtime_error);
}

TEST_F(IoTest, CurveLoad) {
    const auto path =
        write_file("curve.csv", "maturity_years,zero_rate\n0.5,0.047771\n2.0,0.05\n");
    const auto curve = load_curve(path);
    EXPECT_DOUBLE_EQ(curve.zero_rate(0.5), 0.047771);
    EXPECT_DOUBLE_EQ(curve.zero_rate(2.0), 0.05);

    const auto bad = write_file("bad_curve.csv", "maturity_years,zero_rate\n2.0,0.05\n0.5,0.04\n");
    EXPECT_THROW(load_curve(bad), std::runtime_error);
}

TEST_F(IoTest, SpreadsLoad) {
    const auto path = write_file(
        "spr.csv", "date,maturity_years,spread\n2006-01-09,1.0,0.04385\n2006-01-09,5.0,0.05\n");
    const auto spreads = load_dated_spreads(path);
    ASSERT_EQ(spreads.size(), 2u);
    EXPECT_EQ(spreads[0].date, "2006-01-09");
    EXPECT_DOUBLE_EQ(spreads[0].point.spread, 0.04385);
    const auto points = load_spreads(path);
    ASSERT_EQ(points.size(), 2u);
    EXPECT_DOUBLE_EQ(points[1].maturity, 5.0);

    const auto bad = write_file("bad_spr.csv",
                                "date,maturity_years,spread\n2006-01-09,1.0,-0.01\n");
    try {
        load_dated_spreads(bad);
        FAIL() << "expected runtime_error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
    }
}

TEST_F(IoTest, ChainFromRowsGroupsAndFilters) {
    std::vector<RawChainRow> rows{
        {"2006-01-09", 91, 110.0, 0.29, 0.31},  // out of order on purpose
        {"2006-01-09", 91, 90.0, 0.33, 0.35},
        {"2006-01-09", 91, 100.0, 0.31, 0.33},
        {"2006-01-09", 182, 90.0, 0.32, 0.34},
        {"2006-01-09", 182, 100.0, 0.30, 0.32},
        {"2006-01-09", 182, 110.0, 0.28, 0.30},
        {"2006-01-10", 91, 90.0, 0.3, 0.3},
    };
    DiscountCurve curve({{1.0, 0.04}});
    const auto chain = chain_from_rows(rows, 100.0, 0.09, curve, "2006-01-09");
    ASSERT_EQ(chain.quotes.size(), 6u);
    EXPECT_EQ(chain.date, "2006-01-09");
    // strikes sorted within each maturity, maturities ascending
    EXPECT_DOUBLE_EQ(chain.quotes[0].strike, 90.0);
    EXPECT_DOUBLE_EQ(chain.quotes[2].strike, 110.0);
    EXPECT_NEAR(chain.quotes[0].tau, 91.0 / 365.0, 1e-15);
    EXPECT_NEAR(chain.quotes[3].tau, 182.0 / 365.0, 1e-15);
    EXPECT_DOUBLE_EQ(chain.quotes[0].observed_iv, 0.5 * (0.33 + 0.35));
    EXPECT_DOUBLE_EQ(chain.quotes[0].discount, curve.discount(91.0 / 365.0));

    const auto filtered = chain_from_rows(rows, 100.0, 0.09, curve, "2006-01-09", {182});
    EXPECT_EQ(filtered.quotes.size(), 3u);

    EXPECT_THROW(chain_from_rows(rows, 100.0, 0.09, curve, "2006-01-11"),
                 std::runtime_error);
    // mismatched strike grids across maturities
    auto bad = rows;
    bad[3].strike = 91.0;
    EXPECT_THROW(chain_from_rows(bad, 100.0, 0.09, curve, "2006-01-09"), std::runtime_error);
}

TEST_F(IoTest, SyntheticNoiselessRoundTrip) {
    ApproxParams truth;
    truth.kind = ModelKind::SevenParam;
    truth.lambda_bar = 0.04385;
    truth.avg_var = 0.2922 * 0.2922;
    truth.v_eps = {0.0015, 0.001, -0.004};
    truth.v_delta = {0.0005, -0.001, -0.002};
    DiscountCurve curve({{1.0, 0.047771}});

    SyntheticConfig cfg;
    cfg.params = truth;
    cfg.strikes = {85.0, 92.5, 100.0, 107.5, 115.0};
    cfg.maturity_days = {91, 182, 365};
    cfg.spot = 100.0;
    cfg.noise = 0.0;
    const auto rows = gen_synthetic(cfg, curve);
    ASSERT_EQ(rows.size(), 15u);

    // zero noise: calibration on the generated chain recovers the truth
    const auto chain = chain_from_rows(rows, cfg.spot, truth.avg_var, curve, cfg.date);
    const auto res = calibrate_fixed_lambda(chain, truth.lambda_bar, ModelKind::SevenParam);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(res.params.v_eps[i], truth.v_eps[i], 1e-7);
        EXPECT_NEAR(res.params.v_delta[i], truth.v_delta[i], 1e-7);
    }
}

TEST_F(IoTest, SyntheticNoiseIsSeededAndIndependent) {
    ApproxParams truth;
    truth.lambda_bar = 0.02;
    truth.avg_var = 0.09;
    DiscountCurve curve({{1.0, 0.04}});
    SyntheticConfig cfg;
    cfg.params = truth;
    cfg.strikes = {90.0, 100.0, 110.0};
    cfg.maturity_days = {182};
    cfg.noise = 0.01;
    cfg.seed = 7;
    const auto a = gen_synthetic(cfg, curve);
    const auto b = gen_synthetic(cfg, curve);
    cfg.seed = 8;
    const auto c = gen_synthetic(cfg, curve);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_DOUBLE_EQ(a[i].call_iv, b[i].call_iv);  // deterministic in seed
        EXPECT_NE(a[i].call_iv, c[i].call_iv);
        EXPECT_NE(a[i].call_iv, a[i].put_iv);  // independent side noise
    }
}

TEST_F(IoTest, ParamsJsonRoundTrip) {
    ApproxParams p;
    p.kind = ModelKind::FiveParam;
    p.lambda_bar = 0.04385;
    p.avg_var = 0.085380840000000005;
    p.v_eps = {0.0015, -0.001, 0.0};
    p.v_delta = {0.0005, 0.002, 0.0};
    const auto path = (dir_ / "p.json").string();
    write_params_json(path, p);
    const auto back = load_params_json(path);
    EXPECT_EQ(back.kind, p.kind);
    EXPECT_DOUBLE_EQ(back.lambda_bar, p.lambda_bar);
    EXPECT_DOUBLE_EQ(back.avg_var, p.avg_var);
    for (int i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(back.v_eps[i], p.v_eps[i]);
        EXPECT_DOUBLE_EQ(back.v_delta[i], p.v_delta[i]);
    }
}

TEST_F(IoTest, ParamsJsonRejectsFamilyViolations) {
    const auto path = write_file(
        "bad.json",
        R"({"kind":"3p","lambda_bar":0.02,"avg_var":0.04,"v_eps":[0.1,0.2,0.0]})");
    EXPECT_THROW(load_params_json(path), std::invalid_argument);
    const auto missing = write_file("m.json", R"({"kind":"7p"})");
    EXPECT_THROW(load_params_json(missing), std::exception);
}

TEST_F(IoTest, SurfaceCsvWrite) {
    ApproxParams p;
    p.avg_var = 0.09;
    DiscountCurve curve({{1.0, 0.04}});
    const auto grid = surface(p, {90.0, 110.0}, {182.0 / 365.0}, curve, 100.0);
    const auto path = (dir_ / "surf.csv").string();
    write_surface_csv(path, grid);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    EXPECT_EQ(header, "maturity_days,strike,iv,flag");
    std::getline(in, row);
    EXPECT_EQ(row.substr(0, 7), "182,90,");
    EXPECT_NE(row.find(",ok"), std::string::npos);
}
