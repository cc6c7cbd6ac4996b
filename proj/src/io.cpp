#include "dso/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dso/rng.hpp"

namespace dso {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        out.push_back(field);
    }
    return out;
}

double parse_num(const std::string& s, const std::string& path, int lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": bad numeric field '" + s + "'");
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

void expect_header(std::ifstream& in, const std::string& expected, const std::string& path) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != expected)
        throw std::runtime_error(path + ": expected header '" + expected + "', got '" +
                                 header + "'");
}

}  // namespace

DiscountCurve::DiscountCurve(std::vector<std::pair<double, double>> pillars)
    : pillars_(std::move(pillars)) {
    if (pillars_.empty()) throw std::invalid_argument("DiscountCurve: no pillars");
    for (std::size_t i = 0; i < pillars_.size(); ++i) {
        if (!(pillars_[i].first > 0.0))
            throw std::invalid_argument("DiscountCurve: maturities must be > 0");
        if (i > 0 && !(pillars_[i].first > pillars_[i - 1].first))
            throw std::invalid_argument("DiscountCurve: maturities must be increasing");
    }
}

double DiscountCurve::zero_rate(double maturity) const {
    if (pillars_.empty()) throw std::logic_error("DiscountCurve: empty");
    if (maturity <= pillars_.front().first) return pillars_.front().second;
    if (maturity >= pillars_.back().first) return pillars_.back().second;
    for (std::size_t i = 1; i < pillars_.size(); ++i) {
        if (maturity <= pillars_[i].first) {
            const auto& [t0, r0] = pillars_[i - 1];
            const auto& [t1, r1] = pillars_[i];
            const double w = (maturity - t0) / (t1 - t0);
            return r0 + w * (r1 - r0);
        }
    }
    return pillars_.back().second;
}

double DiscountCurve::discount(double maturity) const {
    if (!(maturity >= 0.0)) throw std::domain_error("DiscountCurve: maturity must be >= 0");
    if (maturity == 0.0) return 1.0;
    return std::exp(-zero_rate(maturity) * maturity);
}

std::vector<RawChainRow> load_chain(const std::string& path) {
    auto in = open_or_throw(path);
    expect_header(in, "date,maturity_days,strike,call_iv,put_iv", path);
    std::vector<RawChainRow> rows;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 5)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 5 fields");
        RawChainRow row;
        row.date = f[0];
        row.maturity_days = static_cast<int>(parse_num(f[1], path, lineno));
        row.strike = parse_num(f[2], path, lineno);
        row.call_iv = parse_num(f[3], path, lineno);
        row.put_iv = parse_num(f[4], path, lineno);
        if (row.maturity_days <= 0)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": maturity_days must be > 0");
        if (!(row.strike > 0.0))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": strike must be > 0");
        if (!(row.call_iv > 0.0) || !(row.put_iv > 0.0))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": implied vols must be > 0");
        rows.push_back(row);
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");
    return rows;
}

void write_chain(const std::string& path, const std::vector<RawChainRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(12);
    out << "date,maturity_days,strike,call_iv,put_iv\n";
    for (const auto& r : rows)
        out << r.date << ',' << r.maturity_days << ',' << r.strike << ',' << r.call_iv
            << ',' << r.put_iv << "\n";
}

DiscountCurve load_curve(const std::string& path) {
    auto in = open_or_throw(path);
    expect_header(in, "maturity_years,zero_rate", path);
    std::vector<std::pair<double, double>> pillars;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 2)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 2 fields");
        pillars.emplace_back(parse_num(f[0], path, lineno), parse_num(f[1], path, lineno));
    }
    try {
        return DiscountCurve(std::move(pillars));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::vector<DatedSpread> load_dated_spreads(const std::string& path) {
    auto in = open_or_throw(path);
    expect_header(in, "date,maturity_years,spread", path);
    std::vector<DatedSpread> out;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 3 fields");
        DatedSpread ds;
        ds.date = f[0];
        ds.point.maturity = parse_num(f[1], path, lineno);
        ds.point.spread = parse_num(f[2], path, lineno);
        try {
            ds.point.validate();
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(ds);
    }
    if (out.empty()) throw std::runtime_error(path + ": no data rows");
    return out;
}

std::vector<YieldSpreadPoint> load_spreads(const std::string& path) {
    std::vector<YieldSpreadPoint> out;
    for (const auto& ds : load_dated_spreads(path)) out.push_back(ds.point);
    return out;
}

OptionChain chain_from_rows(const std::vector<RawChainRow>& rows, double spot,
                            double avg_var, const DiscountCurve& curve,
                            const std::string& date,
                            const std::vector<int>& maturity_filter_days) {
    // group by maturity, strikes sorted within each
    std::map<int, std::vector<RawChainRow>> by_mat;
    for (const auto& r : rows) {
        if (r.date != date) continue;
        if (!maturity_filter_days.empty() &&
            std::find(maturity_filter_days.begin(), maturity_filter_days.end(),
                      r.maturity_days) == maturity_filter_days.end())
            continue;
        by_mat[r.maturity_days].push_back(r);
    }
    if (by_mat.empty())
        throw std::runtime_error("chain_from_rows: no quotes for date " + date);

    std::vector<double> maturities, discounts;
    std::vector<std::vector<double>> call_ivs, put_ivs;
    std::vector<double> strikes;
    bool first = true;
    for (auto& [days, group] : by_mat) {
        std::sort(group.begin(), group.end(),
                  [](const RawChainRow& a, const RawChainRow& b) { return a.strike < b.strike; });
        std::vector<double> ks, civ, piv;
        for (const auto& r : group) {
            ks.push_back(r.strike);
            civ.push_back(r.call_iv);
            piv.push_back(r.put_iv);
        }
        if (first) {
            strikes = ks;
            first = false;
        } else if (ks != strikes) {
            throw std::runtime_error("chain_from_rows: strike grids differ across maturities");
        }
        const double tau = days / 365.0;
        maturities.push_back(tau);
        discounts.push_back(curve.discount(tau));
        call_ivs.push_back(civ);
        put_ivs.push_back(piv);
    }
    return build_otm_chain(call_ivs, put_ivs, strikes, maturities, discounts, spot, avg_var,
                           date);
}

std::vector<RawChainRow> gen_synthetic(const SyntheticConfig& cfg, const DiscountCurve& curve,
                                       std::vector<std::string>* dropped) {
    cfg.params.validate();
    if (cfg.strikes.empty() || cfg.maturity_days.empty())
        throw std::invalid_argument("gen_synthetic: empty grid");
    std::vector<RawChainRow> rows;
    std::uint64_t counter = 0;
    for (int days : cfg.maturity_days) {
        const double tau = days / 365.0;
        for (double k : cfg.strikes) {
            QuoteContext ctx{cfg.spot, k, curve.discount(tau), tau};
            double iv;
            try {
                iv = invert_bs(price_call(cfg.params, ctx).value, ctx);
            } catch (const std::exception& e) {
                if (dropped)
                    dropped->push_back("maturity_days=" + std::to_string(days) +
                                       " strike=" + std::to_string(k) + ": " + e.what());
                ++counter;
                continue;
            }
            RawChainRow row;
            row.date = cfg.date;
            row.maturity_days = days;
            row.strike = k;
            double noise_c = 0.0, noise_p = 0.0;
            if (cfg.noise > 0.0) {
                noise_c = cfg.noise * rng::normal(cfg.seed, counter, 0, 0);
                noise_p = cfg.noise * rng::normal(cfg.seed, counter, 0, 1);
            }
            row.call_iv = iv * (1.0 + noise_c);
            row.put_iv = iv * (1.0 + noise_p);
            ++counter;
            if (!(row.call_iv > 0.0) || !(row.put_iv > 0.0)) {
                if (dropped)
                    dropped->push_back("maturity_days=" + std::to_string(days) +
                                       " strike=" + std::to_string(k) +
                                       ": noise drove IV nonpositive");
                continue;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_surface_csv(const std::string& path, const SurfaceGrid& grid) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(12);
    out << "maturity_days,strike,iv,flag\n";
    for (std::size_t i = 0; i < grid.maturities.size(); ++i)
        for (std::size_t j = 0; j < grid.strikes.size(); ++j)
            out << static_cast<int>(std::lround(grid.maturities[i] * 365.0)) << ','
                << grid.strikes[j] << ',' << grid.iv[i][j] << ','
                << (grid.populated[i][j] ? "ok" : "failed") << "\n";
}

void write_fit_csv(const std::string& path, const OptionChain& chain,
                   const std::vector<double>& model_ivs,
                   const std::vector<double>& residuals) {
    if (model_ivs.size() != chain.quotes.size() || residuals.size() != chain.quotes.size())
        throw std::invalid_argument("write_fit_csv: size mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(12);
    out << "maturity_days,strike,side,observed_iv,model_iv,residual\n";
    for (std::size_t i = 0; i < chain.quotes.size(); ++i) {
        const auto& q = chain.quotes[i];
        out << static_cast<int>(std::lround(q.tau * 365.0)) << ',' << q.strike << ','
            << (q.side == OptionSide::Call ? "call" : "put") << ',' << q.observed_iv << ','
            << model_ivs[i] << ',' << residuals[i] << "\n";
    }
}

ApproxParams load_params_json(const std::string& path) {
    auto in = open_or_throw(path);
    nlohmann::json j;
    in >> j;
    ApproxParams p;
    p.kind = model_kind_from_string(j.at("kind").get<std::string>());
    p.lambda_bar = j.at("lambda_bar").get<double>();
    p.avg_var = j.at("avg_var").get<double>();
    const auto ve = j.value("v_eps", std::vector<double>{0.0, 0.0, 0.0});
    const auto vd = j.value("v_delta", std::vector<double>{0.0, 0.0, 0.0});
    if (ve.size() != 3 || vd.size() != 3)
        throw std::runtime_error(path + ": v_eps and v_delta must have 3 entries");
    std::copy(ve.begin(), ve.end(), p.v_eps.begin());
    std::copy(vd.begin(), vd.end(), p.v_delta.begin());
    p.validate();
    return p;
}

void write_params_json(const std::string& path, const ApproxParams& params,
                       const CalibrationResult* result) {
    nlohmann::json j;
    j["kind"] = to_string(params.kind);
    j["lambda_bar"] = params.lambda_bar;
    j["avg_var"] = params.avg_var;
    j["v_eps"] = params.v_eps;
    j["v_delta"] = params.v_delta;
    if (result) {
        j["objective"] = result->objective;
        j["scheme"] = result->scheme == Scheme::A ? "A" : "B";
        j["lambda_source"] = result->lambda_from_spread ? "spread" : "fitted";
        j["rank_deficient"] = result->rank_deficient;
        j["multimodal"] = result->multimodal;
        j["condition"] = result->condition;
        j["residuals"] = result->residuals;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace dso
