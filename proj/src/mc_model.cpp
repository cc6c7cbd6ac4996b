#include "dso/mc_model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dso {

namespace {
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double dlogistic(double x) {
    const double l = logistic(x);
    return l * (1.0 - l);
}
}  // namespace

double MCModelSpec::sigma(double y, double z) const {
    if (family == "constant") return sigma0;
    return sigma_lo + (sigma_hi - sigma_lo) * logistic(y + z);
}

double MCModelSpec::f(double q, double u) const {
    if (family == "constant") return f0;
    return f_lo + (f_hi - f_lo) * logistic(q + u);
}

double MCModelSpec::dsigma2_dz(double y, double z) const {
    if (family == "constant") return 0.0;
    return 2.0 * sigma(y, z) * (sigma_hi - sigma_lo) * dlogistic(y + z);
}

double MCModelSpec::df_du(double q, double u) const {
    if (family == "constant") return 0.0;
    return (f_hi - f_lo) * dlogistic(q + u);
}

void MCModelSpec::validate() const {
    if (!(eps > 0.0) || !(delta > 0.0))
        throw std::domain_error("MCModelSpec: eps and delta must be > 0");
    if (!(v > 0.0) || !(v_tilde > 0.0))
        throw std::domain_error("MCModelSpec: OU volatilities must be > 0");
    if (!(beta >= 0.0)) throw std::domain_error("MCModelSpec: beta must be >= 0");
    if (!(x0 > 0.0)) throw std::domain_error("MCModelSpec: x0 must be > 0");
    if (family == "logistic") {
        if (!(sigma_lo > 0.0) || !(sigma_hi > sigma_lo))
            throw std::domain_error("MCModelSpec: need 0 < sigma_lo < sigma_hi");
        if (!(f_lo > 0.0) || !(f_hi > f_lo))
            throw std::domain_error("MCModelSpec: need 0 < f_lo < f_hi");
    } else if (family == "constant") {
        if (!(sigma0 > 0.0) || !(f0 > 0.0))
            throw std::domain_error("MCModelSpec: constant family needs sigma0, f0 > 0");
    } else {
        throw std::domain_error("MCModelSpec: unknown family '" + family + "'");
    }
    for (double rho : {rho1, rho2, rho12, rho34})
        if (!(rho >= -1.0 && rho <= 1.0))
            throw std::domain_error("MCModelSpec: correlations must be in [-1, 1]");
}

MCModelSpec load_mc_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mc spec file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::istringstream ws(line);
            std::string tok;
            if (ws >> tok)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    MCModelSpec spec;
    auto num = [&](const std::string& key, double& field) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        std::size_t pos = 0;
        field = std::stod(it->second, &pos);
        if (pos != it->second.size())
            throw std::runtime_error(path + ": bad numeric value for " + key);
        kv.erase(it);
    };
    if (auto it = kv.find("family"); it != kv.end()) {
        spec.family = it->second;
        kv.erase(it);
    }
    num("eps", spec.eps); num("delta", spec.delta);
    num("m", spec.m); num("v", spec.v);
    num("m_tilde", spec.m_tilde); num("v_tilde", spec.v_tilde);
    num("kappa", spec.kappa); num("theta", spec.theta); num("g0", spec.g0);
    num("kappa_tilde", spec.kappa_tilde); num("theta_tilde", spec.theta_tilde);
    num("g_tilde0", spec.g_tilde0);
    num("beta", spec.beta);
    num("lambda_mpr", spec.lambda_mpr); num("gamma_mpr", spec.gamma_mpr);
    num("lambda_tilde_mpr", spec.lambda_tilde_mpr);
    num("gamma_tilde_mpr", spec.gamma_tilde_mpr);
    num("rho1", spec.rho1); num("rho2", spec.rho2);
    num("rho12", spec.rho12); num("rho34", spec.rho34);
    num("x0", spec.x0); num("y0", spec.y0); num("z0", spec.z0);
    num("q0", spec.q0); num("u0", spec.u0);
    num("r", spec.r);
    num("sigma_lo", spec.sigma_lo); num("sigma_hi", spec.sigma_hi);
    num("f_lo", spec.f_lo); num("f_hi", spec.f_hi);
    num("sigma0", spec.sigma0); num("f0", spec.f0);
    if (!kv.empty())
        throw std::runtime_error(path + ": unknown key '" + kv.begin()->first + "'");
    spec.validate();
    return spec;
}

void write_mc_spec(const std::string& path, const MCModelSpec& spec) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mc spec file: " + path);
    out.precision(17);
    out << "family = " << spec.family << "\n";
    out << "eps = " << spec.eps << "\ndelta = " << spec.delta << "\n";
    out << "m = " << spec.m << "\nv = " << spec.v << "\n";
    out << "m_tilde = " << spec.m_tilde << "\nv_tilde = " << spec.v_tilde << "\n";
    out << "kappa = " << spec.kappa << "\ntheta = " << spec.theta << "\ng0 = " << spec.g0
        << "\n";
    out << "kappa_tilde = " << spec.kappa_tilde << "\ntheta_tilde = " << spec.theta_tilde
        << "\ng_tilde0 = " << spec.g_tilde0 << "\n";
    out << "beta = " << spec.beta << "\n";
    out << "lambda_mpr = " << spec.lambda_mpr << "\ngamma_mpr = " << spec.gamma_mpr << "\n";
    out << "lambda_tilde_mpr = " << spec.lambda_tilde_mpr
        << "\ngamma_tilde_mpr = " << spec.gamma_tilde_mpr << "\n";
    out << "rho1 = " << spec.rho1 << "\nrho2 = " << spec.rho2 << "\nrho12 = " << spec.rho12
        << "\nrho34 = " << spec.rho34 << "\n";
    out << "x0 = " << spec.x0 << "\ny0 = " << spec.y0 << "\nz0 = " << spec.z0
        << "\nq0 = " << spec.q0 << "\nu0 = " << spec.u0 << "\n";
    out << "r = " << spec.r << "\n";
    if (spec.family == "logistic") {
        out << "sigma_lo = " << spec.sigma_lo << "\nsigma_hi = " << spec.sigma_hi << "\n";
        out << "f_lo = " << spec.f_lo << "\nf_hi = " << spec.f_hi << "\n";
    } else {
        out << "sigma0 = " << spec.sigma0 << "\nf0 = " << spec.f0 << "\n";
    }
}

}  // namespace dso
