#include "wavecrit/params.hpp"

#include <cmath>
#include <numbers>

namespace wavecrit {

double PhysParams::nu() const { return nu0 * std::pow(eps, 6); }
double PhysParams::kappa() const { return kappa0 * std::pow(eps, 6); }
double PhysParams::sin_g() const { return std::sin(gamma); }
double PhysParams::cos_g() const { return std::cos(gamma); }

void PhysParams::validate() const {
    if (!(gamma > 0.0 && gamma < std::numbers::pi / 2))
        throw DomainError("gamma must lie in (0, pi/2)");
    if (!(nu0 > 0.0) || !(kappa0 > 0.0))
        throw DomainError("nu0 and kappa0 must be positive");
    const double ratio = nu0 / kappa0;
    if (ratio < 0.1 - 1e-14 || ratio > 10.0 + 1e-12)
        throw DomainError("nu0/kappa0 must lie in [1/10, 10]");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    if (!(delta >= 0.0)) throw DomainError("delta must be non-negative");
}

double dispersion_omega(double k, double m, double gamma, Branch branch) {
    const double r = std::hypot(k, m);
    if (r == 0.0) throw DomainError("dispersion_omega: zero wavevector");
    return branch_sign(branch) * (k * std::cos(gamma) - m * std::sin(gamma)) / r;
}

std::pair<double, double> group_velocity(double k, double m, double gamma, Branch branch) {
    const double r2 = k * k + m * m;
    if (r2 == 0.0) throw DomainError("group_velocity: zero wavevector");
    const double f = branch_sign(branch) * (m * std::cos(gamma) + k * std::sin(gamma)) /
                     (r2 * std::sqrt(r2));
    return {f * m, -f * k};
}

double criticality_zeta(double omega, double gamma) {
    const double s = std::sin(gamma);
    return omega * omega - s * s;
}

CriticalCarrier critical_carrier(double gamma, double k0, Branch branch) {
    if (k0 == 0.0) throw DomainError("critical_carrier: k0 must be nonzero");
    if (!(gamma > 0.0 && gamma < std::numbers::pi / 2))
        throw DomainError("critical_carrier: gamma must lie in (0, pi/2)");
    // The criticality condition is linear in m: the m^2 terms cancel, leaving
    // k0^2 (cos^2 - sin^2) = 2 k0 m sin cos.
    const double m0 = k0 * std::cos(2.0 * gamma) / std::sin(2.0 * gamma);
    const auto [vx, vy] = group_velocity(k0, m0, gamma, branch);
    (void)vx;
    if (!(vy < 0.0))
        throw DomainError("critical_carrier: the only critical root is outgoing on this branch");
    return {k0, m0, dispersion_omega(k0, m0, gamma, branch)};
}

void check_mode_key(const ModeKey& key, double gamma, Branch branch) {
    if (const auto* p = std::get_if<PropagatingM>(&key.vertical)) {
        const double w = dispersion_omega(key.k, p->m, gamma, branch);
        if (std::abs(w - key.omega) > 1e-12 * std::max(1.0, std::abs(w)))
            throw DomainError("ModeKey: (omega, k, m) off the dispersion relation");
    } else {
        const auto& d = std::get<Decaying>(key.vertical);
        if (d.lambda.real() < 0.0) throw DomainError("ModeKey: decaying rate with Re < 0");
    }
}

}  // namespace wavecrit
