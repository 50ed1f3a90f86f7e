#include "mixclust/tau_zeta.hpp"

#include <cmath>
#include <string>

#include "mixclust/errors.hpp"

namespace mixclust {

namespace {
constexpr double kDomainSlack = 1e-12;

void check_k(int k) {
    if (k < 2) throw DomainError("tau/zeta: K must be at least 2");
}
}  // namespace

double clamp_to_domain(double x, double lo, double hi, const char* what) {
    if (std::isnan(x) || x < lo - kDomainSlack || x > hi + kDomainSlack) {
        throw DomainError(std::string(what) + ": argument " + std::to_string(x) +
                          " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    if (x < lo) return lo;
    if (x > hi) return hi;
    return x;
}

double tau2(double delta, double delta_prime, int k) {
    check_k(k);
    const double km1 = k - 1;
    const double d1 = clamp_to_domain(delta, 0.0, km1, "tau");
    const double d2 = clamp_to_domain(delta_prime, 0.0, km1, "tau");
    const double radicand = d1 * d2 * (1.0 - d1 / km1) * (1.0 - d2 / km1);
    return 2.0 * std::sqrt(std::max(radicand, 0.0));
}

double tau(double delta, int k) {
    check_k(k);
    const double km1 = k - 1;
    const double d = clamp_to_domain(delta, 0.0, km1, "tau");
    return 2.0 * d * (1.0 - d / km1);
}

double zeta(double p, int k) {
    check_k(k);
    const double km1 = k - 1;
    const double x = clamp_to_domain(p, 0.0, km1 / 2.0, "zeta");
    const double radicand = std::max(1.0 - 2.0 * x / km1, 0.0);
    return x / (1.0 + std::sqrt(radicand));
}

}  // namespace mixclust
