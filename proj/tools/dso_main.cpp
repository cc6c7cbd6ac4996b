// Command-line workflows: pricing, calibration, surface grids, Monte Carlo
// convergence tables, fitted-intensity time series, and synthetic chain
// generation. All outputs are CSV; schemas match the loaders in dso/io.hpp.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "dso/calibration.hpp"
#include "dso/io.hpp"
#include "dso/mc_oracle.hpp"

namespace {

using namespace dso;

std::string date_plus_days(const std::string& iso, int days) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%d", &y, &m, &d) != 3)
        throw std::runtime_error("bad ISO date: " + iso);
    using namespace std::chrono;
    sys_days sd = sys_days{year{y} / m / d} + std::chrono::days{days};
    const year_month_day ymd{sd};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

std::vector<std::string> chain_dates(const std::vector<RawChainRow>& rows) {
    std::set<std::string> dates;
    for (const auto& r : rows) dates.insert(r.date);
    return {dates.begin(), dates.end()};
}

std::vector<double> model_ivs_for_chain(const OptionChain& chain, const ApproxParams& params) {
    std::vector<double> ivs;
    ivs.reserve(chain.quotes.size());
    for (const auto& q : chain.quotes) {
        QuoteContext ctx{chain.spot, q.strike, q.discount, q.tau};
        ivs.push_back(invert_bs(price_call(params, ctx).value, ctx));
    }
    return ivs;
}

std::vector<double> iv_residuals(const OptionChain& chain, const std::vector<double>& model_ivs) {
    std::vector<double> res;
    res.reserve(chain.quotes.size());
    for (std::size_t i = 0; i < chain.quotes.size(); ++i)
        res.push_back(chain.quotes[i].observed_iv - model_ivs[i]);
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"defaultable-stock option pricing, calibration, and MC verification"};
    app.require_subcommand(1);

    std::string model = "7p", scheme = "A";
    std::string chain_path, curve_path, spreads_path, params_path, mc_config_path, out_path;
    std::string date = "2006-01-09";
    std::vector<int> maturities_filter;
    std::vector<double> strikes;
    std::vector<int> maturity_days;
    double spot = 100.0, hist_vol = 0.2, noise = 0.0, T = 0.5;
    double eps = 0.1, delta = 0.1;
    std::vector<double> eps_ladder{0.1, 0.05, 0.01}, delta_ladder{0.1, 0.05, 0.01};
    unsigned long long seed = 1;
    std::size_t paths = 100000, steps = 0;
    int days = 1;
    bool expansion = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "output path")->required();
    };

    auto* cmd_price = app.add_subcommand("price", "price a chain with given parameters");
    cmd_price->add_option("--params", params_path)->required();
    cmd_price->add_option("--chain", chain_path)->required();
    cmd_price->add_option("--curve", curve_path)->required();
    cmd_price->add_option("--spot", spot)->required();
    cmd_price->add_option("--hist-vol", hist_vol, "historical volatility input (sigma)");
    cmd_price->add_option("--date", date);
    cmd_price->add_option("--maturities", maturities_filter, "maturity filter, days");
    add_common(cmd_price);

    auto* cmd_cal = app.add_subcommand("calibrate", "daily calibration to an option chain");
    cmd_cal->add_option("--model", model)->check(CLI::IsMember({"7p", "5p", "3p", "sv"}));
    cmd_cal->add_option("--scheme", scheme)->check(CLI::IsMember({"A", "B"}));
    cmd_cal->add_option("--chain", chain_path)->required();
    cmd_cal->add_option("--curve", curve_path)->required();
    cmd_cal->add_option("--spreads", spreads_path, "required for scheme A");
    cmd_cal->add_option("--spot", spot)->required();
    cmd_cal->add_option("--hist-vol", hist_vol)->required();
    cmd_cal->add_option("--maturities", maturities_filter);
    add_common(cmd_cal);

    auto* cmd_surf = app.add_subcommand("surface", "implied volatility surface grid");
    cmd_surf->add_option("--params", params_path)->required();
    cmd_surf->add_option("--curve", curve_path)->required();
    cmd_surf->add_option("--spot", spot)->required();
    cmd_surf->add_option("--strikes", strikes)->required();
    cmd_surf->add_option("--maturities", maturity_days, "grid maturities, days")->required();
    cmd_surf->add_flag("--expansion", expansion, "use the analytic IV expansion");
    add_common(cmd_surf);

    auto* cmd_sim = app.add_subcommand("simulate", "MC convergence study");
    cmd_sim->add_option("--mc-config", mc_config_path)->required();
    cmd_sim->add_option("--eps", eps_ladder, "eps ladder, strictly decreasing");
    cmd_sim->add_option("--delta", delta_ladder, "delta ladder, strictly decreasing");
    cmd_sim->add_option("--strikes", strikes)->required();
    cmd_sim->add_option("--maturity", T, "years");
    cmd_sim->add_option("--paths", paths);
    cmd_sim->add_option("--seed", seed);
    add_common(cmd_sim);

    auto* cmd_series = app.add_subcommand("spread-series",
                                          "fitted lambda vs bond spread per day");
    cmd_series->add_option("--model", model)->check(CLI::IsMember({"7p", "5p", "3p"}));
    cmd_series->add_option("--chain", chain_path)->required();
    cmd_series->add_option("--curve", curve_path)->required();
    cmd_series->add_option("--spreads", spreads_path)->required();
    cmd_series->add_option("--spot", spot)->required();
    cmd_series->add_option("--hist-vol", hist_vol)->required();
    cmd_series->add_option("--maturities", maturities_filter);
    add_common(cmd_series);

    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic chain panel");
    cmd_synth->add_option("--params", params_path)->required();
    cmd_synth->add_option("--curve", curve_path)->required();
    cmd_synth->add_option("--spot", spot)->required();
    cmd_synth->add_option("--strikes", strikes)->required();
    cmd_synth->add_option("--maturities", maturity_days, "days")->required();
    cmd_synth->add_option("--noise", noise, "multiplicative IV noise std dev");
    cmd_synth->add_option("--seed", seed);
    cmd_synth->add_option("--days", days, "number of panel days");
    cmd_synth->add_option("--start-date", date);
    add_common(cmd_synth);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_price) {
            const auto params = load_params_json(params_path);
            const auto curve = load_curve(curve_path);
            const auto rows = load_chain(chain_path);
            const auto chain = chain_from_rows(rows, spot, hist_vol * hist_vol, curve, date,
                                               maturities_filter);
            const auto ivs = model_ivs_for_chain(chain, params);
            write_fit_csv(out_path, chain, ivs, iv_residuals(chain, ivs));
        } else if (*cmd_cal) {
            const auto curve = load_curve(curve_path);
            const auto rows = load_chain(chain_path);
            const ModelKind kind = model_kind_from_string(model);
            std::vector<DatedSpread> spreads;
            if (scheme == "A") {
                if (spreads_path.empty())
                    throw std::runtime_error("scheme A requires --spreads");
                spreads = load_dated_spreads(spreads_path);
            }
            std::filesystem::create_directories(out_path);
            for (const auto& d : chain_dates(rows)) {
                const auto chain = chain_from_rows(rows, spot, hist_vol * hist_vol, curve, d,
                                                   maturities_filter);
                CalibrationResult result;
                if (scheme == "A") {
                    // lambda from the shortest-maturity spread for this day
                    const DatedSpread* best = nullptr;
                    for (const auto& ds : spreads)
                        if (ds.date == d && (!best || ds.point.maturity < best->point.maturity))
                            best = &ds;
                    if (!best)
                        throw std::runtime_error("no spread for date " + d);
                    const double lam =
                        kind == ModelKind::SVOnly ? 0.0 : spread_to_lambda(best->point);
                    result = calibrate_fixed_lambda(chain, lam, kind);
                } else {
                    result = kind == ModelKind::SVOnly
                                 ? calibrate_fixed_lambda(chain, 0.0, kind)
                                 : calibrate_free_lambda(chain, kind);
                }
                const auto ivs = model_ivs_for_chain(chain, result.params);
                const auto base = out_path + "/" + d + "_" + model;
                write_fit_csv(base + "_fit.csv", chain, ivs, iv_residuals(chain, ivs));
                write_params_json(base + "_params.json", result.params, &result);
            }
        } else if (*cmd_surf) {
            const auto params = load_params_json(params_path);
            const auto curve = load_curve(curve_path);
            std::vector<double> mats;
            for (int d : maturity_days) mats.push_back(d / 365.0);
            write_surface_csv(out_path, surface(params, strikes, mats, curve, spot, expansion));
        } else if (*cmd_sim) {
            const auto spec = load_mc_spec(mc_config_path);
            write_convergence_csv(out_path, convergence_study(spec, eps_ladder, delta_ladder,
                                                              strikes, T, paths, seed));
        } else if (*cmd_series) {
            const auto curve = load_curve(curve_path);
            const auto rows = load_chain(chain_path);
            const auto spreads = load_dated_spreads(spreads_path);
            const ModelKind kind = model_kind_from_string(model);
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot write " + out_path);
            out.precision(12);
            out << "date,fitted_lambda,bond_spread\n";
            for (const auto& d : chain_dates(rows)) {
                const auto chain = chain_from_rows(rows, spot, hist_vol * hist_vol, curve, d,
                                                   maturities_filter);
                const auto result = calibrate_free_lambda(chain, kind);
                const DatedSpread* best = nullptr;
                for (const auto& ds : spreads)
                    if (ds.date == d && (!best || ds.point.maturity < best->point.maturity))
                        best = &ds;
                if (!best) throw std::runtime_error("no spread for date " + d);
                out << d << ',' << result.params.lambda_bar << ',' << best->point.spread
                    << "\n";
            }
        } else if (*cmd_synth) {
            const auto params = load_params_json(params_path);
            const auto curve = load_curve(curve_path);
            std::vector<RawChainRow> all;
            std::vector<std::string> dropped;
            for (int i = 0; i < days; ++i) {
                SyntheticConfig cfg;
                cfg.params = params;
                cfg.strikes = strikes;
                cfg.maturity_days = maturity_days;
                cfg.spot = spot;
                cfg.noise = noise;
                cfg.seed = seed + static_cast<unsigned long long>(i);
                cfg.date = date_plus_days(date, i);
                const auto rows = gen_synthetic(cfg, curve, &dropped);
                all.insert(all.end(), rows.begin(), rows.end());
            }
            write_chain(out_path, all);
            for (const auto& msg : dropped) std::cerr << "dropped: " << msg << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
