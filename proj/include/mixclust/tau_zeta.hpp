#pragma once

namespace mixclust {

// Bound-transfer functions on the separation scale [0, K-1].
//
//   tau(d, d')  = 2 sqrt(d d' (1 - d/(K-1)) (1 - d'/(K-1)))
//   tau(d)      = 2 d (1 - d/(K-1))
//   zeta(p)     = p / (1 + sqrt(1 - 2p/(K-1)))
//
// zeta inverts tau on the increasing branch: tau(zeta(p)) = p for
// p in [0, (K-1)/2]. Arguments within 1e-12 outside their domain are clamped;
// anything further throws DomainError.

double tau(double delta, int k);
double tau2(double delta, double delta_prime, int k);
double zeta(double p, int k);

/// Clamps `x` into [lo, hi] when it lies within 1e-12 of the interval,
/// otherwise throws DomainError naming `what`.
double clamp_to_domain(double x, double lo, double hi, const char* what);

}  // namespace mixclust
