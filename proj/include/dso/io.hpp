#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dso/approx_pricer.hpp"
#include "dso/bond_pricer.hpp"
#include "dso/calibration.hpp"
#include "dso/implied_vol.hpp"

namespace dso {

// Zero curve: linear interpolation in the zero rate, flat extrapolation.
class DiscountCurve {
  public:
    DiscountCurve() = default;
    // pillars: (maturity years, zero rate), maturities strictly increasing
    explicit DiscountCurve(std::vector<std::pair<double, double>> pillars);

    double zero_rate(double maturity) const;
    double discount(double maturity) const;  // B(t, t + maturity)

    const std::vector<std::pair<double, double>>& pillars() const { return pillars_; }

  private:
    std::vector<std::pair<double, double>> pillars_;
};

// Raw chain rows as they appear in a chain CSV:
// date,maturity_days,strike,call_iv,put_iv
struct RawChainRow {
    std::string date;
    int maturity_days = 0;
    double strike = 0.0;
    double call_iv = 0.0;
    double put_iv = 0.0;
};

std::vector<RawChainRow> load_chain(const std::string& path);
void write_chain(const std::string& path, const std::vector<RawChainRow>& rows);

DiscountCurve load_curve(const std::string& path);  // maturity_years,zero_rate

std::vector<YieldSpreadPoint> load_spreads(const std::string& path);  // date,maturity_years,spread

// Dated spreads, for per-day scheme A / spread-series workflows.
struct DatedSpread {
    std::string date;
    YieldSpreadPoint point;
};
std::vector<DatedSpread> load_dated_spreads(const std::string& path);

// Builds the per-day OTM chain from raw rows (one date).
OptionChain chain_from_rows(const std::vector<RawChainRow>& rows, double spot,
                            double avg_var, const DiscountCurve& curve,
                            const std::string& date,
                            const std::vector<int>& maturity_filter_days = {});

struct SyntheticConfig {
    ApproxParams params;
    std::vector<double> strikes;
    std::vector<int> maturity_days;
    double spot = 100.0;
    double noise = 0.0;  // multiplicative IV noise std dev
    unsigned long long seed = 0;
    std::string date = "2006-01-09";
};

// Prices the grid with the approximation, inverts to IVs, applies optional
// multiplicative noise independently to the call and put entries. Cells
// where inversion fails are dropped.
std::vector<RawChainRow> gen_synthetic(const SyntheticConfig& cfg, const DiscountCurve& curve,
                                       std::vector<std::string>* dropped = nullptr);

void write_surface_csv(const std::string& path, const SurfaceGrid& grid);
void write_fit_csv(const std::string& path, const OptionChain& chain,
                   const std::vector<double>& model_ivs,
                   const std::vector<double>& residuals);

ApproxParams load_params_json(const std::string& path);
void write_params_json(const std::string& path, const ApproxParams& params,
                       const CalibrationResult* result = nullptr);

}  // namespace dso
