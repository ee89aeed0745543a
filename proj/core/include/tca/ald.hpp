#pragma once

#include <cstdint>
#include <vector>

#include "tca/rng.hpp"

namespace tca::ald {

// Asymmetric Laplace distribution with location mu, scale sigma and
// asymmetry kappa. Density:
//   p(y) = 1 / (sigma (kappa + 1/kappa)) * exp(-(y - mu)/sigma * s * kappa^s),
//   s = sgn(y - mu), with sgn(0) taken as +1.
// kappa > 1 fattens the left (cost) tail.
struct Params {
    double mu = 0.0;
    double sigma = 1.0;
    double kappa = 1.0;
};

// Throws Error(InvalidInput) unless sigma > 0, kappa > 0 and all are finite.
void validate(const Params& p);

double log_pdf(const Params& p, double y);
double pdf(const Params& p, double y);

/// E[y] = mu + sigma (1/kappa - kappa).
double mean(const Params& p);

/// Var[y] = sigma^2 (1 + kappa^4) / kappa^2.
double variance(const Params& p);

/// Inverse of r = kappa - 1/kappa on kappa >= 1.
double kappa_from_r(double r);

/// One draw from the two-exponential mixture representation.
double draw(const Params& p, Rng& rng);

std::vector<double> sample(const Params& p, std::size_t n, std::uint64_t seed);

}  // namespace tca::ald
