#include "dso/bond_pricer.hpp"

#include <cmath>

namespace dso {

void YieldSpreadPoint::validate() const {
    if (!(maturity > 0.0)) throw std::domain_error("YieldSpreadPoint: maturity must be > 0");
    if (!(spread >= 0.0)) throw std::domain_error("YieldSpreadPoint: spread must be >= 0");
}

double bhat(const BondParams& bp, double discount, double tau) {
    if (!(tau >= 0.0)) throw std::domain_error("bhat: tau must be >= 0");
    if (!(bp.lambda_bar >= 0.0)) throw std::domain_error("bhat: lambda_bar must be >= 0");
    if (!std::isfinite(bp.L) || !std::isfinite(bp.L_tilde))
        throw std::domain_error("bhat: L, L_tilde must be finite");
    return discount * std::exp(-bp.lambda_bar * tau) *
           (1.0 + bp.L * tau - 0.5 * bp.L_tilde * tau * tau);
}

double spread_to_lambda(const YieldSpreadPoint& pt) {
    pt.validate();
    return pt.spread;
}

double implied_spread(double price, double face, double discount, double tau) {
    const double riskless = face * discount;
    if (!(price > 0.0) || price > riskless)
        throw std::domain_error("implied_spread: price must be in (0, face * discount]");
    if (!(tau > 0.0)) throw std::domain_error("implied_spread: tau must be > 0");
    return -std::log(price / riskless) / tau;
}

}  // namespace dso
