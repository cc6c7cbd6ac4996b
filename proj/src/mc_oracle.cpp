#include "dso/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <thread>

#include "dso/quadrature.hpp"
#include "dso/rng.hpp"

namespace dso {

namespace {

void cholesky_block(const std::array<std::array<double, 5>, 5>& c,
                    std::array<std::array<double, 5>, 5>& l, int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
        for (int j = lo; j <= i; ++j) {
            double s = c[i][j];
            for (int k = lo; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 0.0)
                    throw std::domain_error(
                        "correlation matrix not PSD: leading minor of order " +
                        std::to_string(i + 1) + " is not positive");
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
}

struct PathResult {
    double log_s = 0.0;
    double int_lambda = 0.0;
};

PathResult simulate_one(const MCModelSpec& spec,
                        const std::array<std::array<double, 5>, 5>& chol, double dt,
                        std::size_t n_steps, std::uint64_t seed, std::uint64_t path,
                        double sign) {
    const double sqdt = std::sqrt(dt);
    const double fast_vol = spec.v * std::sqrt(2.0 / spec.eps);
    const double fast_vol_q = spec.v_tilde * std::sqrt(2.0 / spec.eps);
    const double sqdelta = std::sqrt(spec.delta);

    double log_s = std::log(spec.x0);
    double y = spec.y0, z = spec.z0, q = spec.q0, u = spec.u0;
    double lambda_prev = spec.beta * spec.sigma(y, z) * spec.sigma(y, z) + spec.f(q, u);
    double int_lambda = 0.0;

    for (std::size_t step = 0; step < n_steps; ++step) {
        double xi[5];
        for (int d = 0; d < 5; ++d) xi[d] = sign * rng::normal(seed, path, step, d);
        double dw[5];
        for (int i = 0; i < 5; ++i) {
            double s = 0.0;
            for (int j = 0; j <= i; ++j) s += chol[i][j] * xi[j];
            dw[i] = s * sqdt;
        }

        const double sig = spec.sigma(y, z);
        const double lambda = spec.beta * sig * sig + spec.f(q, u);

        log_s += (spec.r + lambda - 0.5 * sig * sig) * dt + sig * dw[0];
        const double y_new =
            y + ((spec.m - y) / spec.eps - fast_vol * spec.Lambda(y, z)) * dt +
            fast_vol * dw[1];
        const double z_new =
            z + (spec.delta * spec.c(z) - sqdelta * spec.g(z) * spec.Gamma(y, z)) * dt +
            sqdelta * spec.g(z) * dw[2];
        const double q_new =
            q + ((spec.m_tilde - q) / spec.eps - fast_vol_q * spec.LambdaTilde(q, u)) * dt +
            fast_vol_q * dw[3];
        const double u_new =
            u + (spec.delta * spec.c_tilde(u) -
                 sqdelta * spec.g_tilde(u) * spec.GammaTilde(q, u)) * dt +
            sqdelta * spec.g_tilde(u) * dw[4];
        y = y_new; z = z_new; q = q_new; u = u_new;

        const double lambda_next =
            spec.beta * spec.sigma(y, z) * spec.sigma(y, z) + spec.f(q, u);
        int_lambda += 0.5 * (lambda_prev + lambda_next) * dt;
        lambda_prev = lambda_next;
    }
    return {log_s, int_lambda};
}

double payoff_value(const Payoff& p, double s_T, double surv, double disc) {
    switch (p.kind) {
        case Payoff::Kind::Call:
            return disc * surv * std::max(s_T - p.strike, 0.0);
        case Payoff::Kind::Put:
            // the simulated leg of K B - E[B e^{-int lambda} min(K, S_T)]
            // is folded in at the estimator level; here we return the full
            // put sample so parity works pathwise with common paths
            return disc * p.strike - disc * surv * std::min(p.strike, s_T);
        case Payoff::Kind::Bond:
            return disc * surv;
        case Payoff::Kind::DiscountedStock:
            return disc * surv * s_T;
    }
    return 0.0;
}

}  // namespace

std::array<std::array<double, 5>, 5> correlation_cholesky(const MCModelSpec& spec) {
    std::array<std::array<double, 5>, 5> c{};
    for (int i = 0; i < 5; ++i) c[i][i] = 1.0;
    c[0][1] = c[1][0] = spec.rho1;
    c[0][2] = c[2][0] = spec.rho2;
    c[1][2] = c[2][1] = spec.rho12;
    c[3][4] = c[4][3] = spec.rho34;

    std::array<std::array<double, 5>, 5> l{};
    cholesky_block(c, l, 0, 3);
    cholesky_block(c, l, 3, 5);
    return l;
}

std::array<double, 5> correlated_increments(const MCModelSpec& spec, double dt,
                                            std::uint64_t seed, std::uint64_t path,
                                            std::uint64_t step, std::size_t n_paths) {
    const auto chol = correlation_cholesky(spec);
    const std::size_t half = n_paths / 2;
    const double sign = path < half ? 1.0 : -1.0;
    const std::uint64_t base = path < half ? path : path - half;
    const double sqdt = std::sqrt(dt);
    double xi[5];
    for (int d = 0; d < 5; ++d) xi[d] = sign * rng::normal(seed, base, step, d);
    std::array<double, 5> dw{};
    for (int i = 0; i < 5; ++i) {
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += chol[i][j] * xi[j];
        dw[i] = s * sqdt;
    }
    return dw;
}

std::size_t min_steps(double T, double eps) {
    return static_cast<std::size_t>(std::ceil(T * 100.0 / std::min(1.0, eps * 10.0)));
}

std::vector<MCEstimate> simulate_payoffs(const MCModelSpec& spec,
                                         const std::vector<Payoff>& payoffs, double T,
                                         std::size_t n_steps, std::size_t n_paths,
                                         std::uint64_t seed) {
    spec.validate();
    if (!(T > 0.0)) throw std::invalid_argument("simulate_payoffs: T must be > 0");
    if (n_steps < min_steps(T, spec.eps))
        throw std::invalid_argument(
            "simulate_payoffs: n_steps too small to resolve the fast factor; need >= " +
            std::to_string(min_steps(T, spec.eps)));
    if (n_paths < 2 || n_paths % 2 != 0)
        throw std::invalid_argument("simulate_payoffs: n_paths must be even (antithetics)");

    const auto chol = correlation_cholesky(spec);
    const double dt = T / static_cast<double>(n_steps);
    const double disc = std::exp(-spec.r * T);
    const std::size_t n_pairs = n_paths / 2;
    const std::size_t n_payoffs = payoffs.size();

    // fixed-size chunks, combined in index order: the estimate does not
    // depend on the number of threads
    const std::size_t chunk = 1024;
    const std::size_t n_chunks = (n_pairs + chunk - 1) / chunk;
    std::vector<std::vector<double>> sums(n_chunks, std::vector<double>(n_payoffs, 0.0));
    std::vector<std::vector<double>> sumsqs(n_chunks, std::vector<double>(n_payoffs, 0.0));

    auto run_chunk = [&](std::size_t ci) {
        const std::size_t begin = ci * chunk;
        const std::size_t end = std::min(begin + chunk, n_pairs);
        auto& sum = sums[ci];
        auto& sumsq = sumsqs[ci];
        for (std::size_t p = begin; p < end; ++p) {
            const PathResult a = simulate_one(spec, chol, dt, n_steps, seed, p, 1.0);
            const PathResult b = simulate_one(spec, chol, dt, n_steps, seed, p, -1.0);
            const double sa = std::exp(a.log_s), sb = std::exp(b.log_s);
            const double surv_a = std::exp(-a.int_lambda), surv_b = std::exp(-b.int_lambda);
            for (std::size_t k = 0; k < n_payoffs; ++k) {
                const double val = 0.5 * (payoff_value(payoffs[k], sa, surv_a, disc) +
                                          payoff_value(payoffs[k], sb, surv_b, disc));
                sum[k] += val;
                sumsq[k] += val * val;
            }
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < hw; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t ci = next.fetch_add(1);
                if (ci >= n_chunks) return;
                run_chunk(ci);
            }
        });
    }
    for (auto& w : workers) w.join();

    std::vector<MCEstimate> out(n_payoffs);
    for (std::size_t k = 0; k < n_payoffs; ++k) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t ci = 0; ci < n_chunks; ++ci) {
            sum += sums[ci][k];
            sumsq += sumsqs[ci][k];
        }
        const double n = static_cast<double>(n_pairs);
        const double mean = sum / n;
        const double var = std::max(0.0, (sumsq - n * mean * mean) / std::max(1.0, n - 1.0));
        out[k] = {mean, std::sqrt(var / n), n_paths, n_steps, seed};
    }
    return out;
}

MCEstimate simulate_price(const MCModelSpec& spec, const Payoff& payoff, double T,
                          std::size_t n_steps, std::size_t n_paths, std::uint64_t seed) {
    return simulate_payoffs(spec, {payoff}, T, n_steps, n_paths, seed).front();
}

EffectiveParams effective_params(const MCModelSpec& spec) {
    spec.validate();
    const double rel = 1e-10;

    auto sig2 = [&](double y) { return spec.sigma(y, spec.z0) * spec.sigma(y, spec.z0); };
    auto f_at = [&](double q) { return spec.f(q, spec.u0); };

    EffectiveParams ep;
    ep.quad_rel_tol = rel;
    ep.avg_sig2 = gaussian_average(sig2, spec.m, spec.v, rel);
    ep.avg_f = gaussian_average(f_at, spec.m_tilde, spec.v_tilde, rel);
    ep.avg_sig = gaussian_average([&](double y) { return spec.sigma(y, spec.z0); }, spec.m,
                                  spec.v, rel);
    ep.dsig2_dz = gaussian_average([&](double y) { return spec.dsigma2_dz(y, spec.z0); },
                                   spec.m, spec.v, rel);
    ep.df_du = gaussian_average([&](double q) { return spec.df_du(q, spec.u0); },
                                spec.m_tilde, spec.v_tilde, rel);

    // phi solves L0 phi = sigma^2 - <sigma^2>; with the OU invariant density
    // psi, phi_y(y) = F(y) / (v^2 psi(y)) where F is the cumulative centered
    // integrand, so <h phi_y> = (1/v^2) int h(y) F(y) dy.
    auto bracket_phi_y = [&](const std::function<double(double)>& h, double mean, double sd,
                             const std::function<double(double)>& centered_fn) {
        const double lo = mean - 12.0 * sd;
        const double hi = mean + 12.0 * sd;
        auto cum = [&](double y) {
            return integrate(
                [&](double s) { return centered_fn(s) * gaussian_density(s, mean, sd); },
                lo, y, 1e-10, 1e-16);
        };
        return integrate([&](double y) { return h(y) * cum(y); }, lo, hi, 1e-9, 1e-15) /
               (sd * sd);
    };

    auto centered_sig2 = [&](double s) { return sig2(s) - ep.avg_sig2; };
    auto centered_f = [&](double q) { return f_at(q) - ep.avg_f; };

    const double sig_phi_y =
        bracket_phi_y([&](double y) { return spec.sigma(y, spec.z0); }, spec.m, spec.v,
                      centered_sig2);
    const double lam_phi_y =
        bracket_phi_y([&](double y) { return spec.Lambda(y, spec.z0); }, spec.m, spec.v,
                      centered_sig2);
    const double lamt_phit_q =
        bracket_phi_y([&](double q) { return spec.LambdaTilde(q, spec.u0); }, spec.m_tilde,
                      spec.v_tilde, centered_f);
    // phi depends only on y and phi~ only on q, so the cross brackets
    // <sigma phi~_y>, <Lambda~ phi_q>, <Lambda phi~_y> all vanish.

    const double se = std::sqrt(spec.eps);
    const double sd = std::sqrt(spec.delta);
    const double g = spec.g(spec.z0);
    const double gt = spec.g_tilde(spec.u0);

    ApproxParams p;
    p.kind = ModelKind::SevenParam;
    p.avg_var = ep.avg_sig2;
    p.lambda_bar = spec.beta * ep.avg_sig2 + ep.avg_f;
    p.v_eps[0] = se / std::sqrt(2.0) * spec.v * spec.rho1 * sig_phi_y;
    p.v_eps[1] = se * std::sqrt(2.0) *
                 (spec.beta * spec.v * spec.rho1 * sig_phi_y - 0.5 * spec.v * lam_phi_y);
    p.v_eps[2] = -se * std::sqrt(2.0) *
                 (spec.beta * spec.v * lam_phi_y + spec.v_tilde * lamt_phit_q);
    p.v_delta[0] = 0.5 * sd * spec.rho2 * ep.avg_sig * g * ep.dsig2_dz;
    p.v_delta[1] = 0.5 * (sd * spec.rho2 * ep.avg_sig * g * ep.dsig2_dz * spec.beta -
                          0.5 * sd * g * spec.gamma_mpr * ep.dsig2_dz);
    p.v_delta[2] = 0.5 * (-sd * g * spec.gamma_mpr * ep.dsig2_dz * spec.beta -
                          sd * ep.df_du * gt * spec.gamma_tilde_mpr);
    ep.params = p;

    ep.bond.lambda_bar = p.lambda_bar;
    ep.bond.L = se * (spec.v * std::sqrt(2.0) * spec.beta * lam_phi_y +
                      spec.v_tilde * std::sqrt(2.0) * lamt_phit_q);
    ep.bond.L_tilde = sd * (g * spec.gamma_mpr * spec.beta * ep.dsig2_dz +
                            gt * spec.gamma_tilde_mpr * ep.df_du);
    return ep;
}

std::vector<ConvergencePoint> convergence_study(const MCModelSpec& spec_template,
                                                const std::vector<double>& eps_ladder,
                                                const std::vector<double>& delta_ladder,
                                                const std::vector<double>& strikes, double T,
                                                std::size_t n_paths, std::uint64_t seed) {
    auto check_ladder = [](const std::vector<double>& ladder, const char* name) {
        if (ladder.empty()) throw std::invalid_argument(std::string(name) + " ladder empty");
        for (std::size_t i = 1; i < ladder.size(); ++i)
            if (!(ladder[i] < ladder[i - 1]))
                throw std::invalid_argument(std::string(name) +
                                            " ladder must be strictly decreasing");
    };
    check_ladder(eps_ladder, "eps");
    check_ladder(delta_ladder, "delta");
    if (strikes.empty()) throw std::invalid_argument("convergence_study: no strikes");

    // eps ladder at the smallest delta, then delta ladder at the smallest
    // eps; the shared corner appears once
    std::vector<std::pair<double, double>> points;
    for (double e : eps_ladder) points.emplace_back(e, delta_ladder.back());
    for (double d : delta_ladder)
        if (d != delta_ladder.back()) points.emplace_back(eps_ladder.back(), d);

    std::vector<ConvergencePoint> table;
    for (const auto& [eps, delta] : points) {
        MCModelSpec spec = spec_template;
        spec.eps = eps;
        spec.delta = delta;
        const std::size_t n_steps = min_steps(T, eps);
        const EffectiveParams ep = effective_params(spec);
        const double disc = std::exp(-spec.r * T);

        std::vector<Payoff> payoffs;
        payoffs.reserve(strikes.size());
        for (double k : strikes) payoffs.push_back(Payoff::call(k));
        const auto mc = simulate_payoffs(spec, payoffs, T, n_steps, n_paths, seed);

        ConvergencePoint pt;
        pt.eps = eps;
        pt.delta = delta;
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            QuoteContext ctx{spec.x0, strikes[i], disc, T};
            const double approx = price_call(ep.params, ctx).value;
            const double err = std::abs(mc[i].mean - approx);
            if (err > pt.max_error) {
                pt.max_error = err;
                pt.noise = mc[i].std_error;
            }
        }
        pt.bound = eps * std::abs(std::log(eps)) + delta;
        pt.ratio = pt.max_error / pt.bound;
        pt.inconclusive = pt.noise > 0.5 * pt.max_error;
        table.push_back(pt);
    }
    return table;
}

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergencePoint>& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(12);
    out << "eps,delta,max_error,noise,bound,ratio,inconclusive\n";
    for (const auto& pt : table)
        out << pt.eps << ',' << pt.delta << ',' << pt.max_error << ',' << pt.noise << ','
            << pt.bound << ',' << pt.ratio << ',' << (pt.inconclusive ? 1 : 0) << "\n";
}

}  // namespace dso
