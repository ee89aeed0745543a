#include "tca/ald.hpp"

#include <cmath>

#include "tca/error.hpp"

namespace tca::ald {

void validate(const Params& p) {
    if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || !std::isfinite(p.kappa))
        throw Error(ErrorCode::InvalidInput, "ALD parameters must be finite");
    if (!(p.sigma > 0.0)) throw Error(ErrorCode::InvalidInput, "ALD sigma must be positive");
    if (!(p.kappa > 0.0)) throw Error(ErrorCode::InvalidInput, "ALD kappa must be positive");
}

double log_pdf(const Params& p, double y) {
    if (!std::isfinite(y)) throw Error(ErrorCode::InvalidInput, "ALD log_pdf: non-finite observation");
    validate(p);
    const double z = (y - p.mu) / p.sigma;
    const double decay = z >= 0.0 ? z * p.kappa : -z / p.kappa;
    return -std::log(p.sigma * (p.kappa + 1.0 / p.kappa)) - decay;
}

double pdf(const Params& p, double y) { return std::exp(log_pdf(p, y)); }

double mean(const Params& p) { return p.mu + p.sigma * (1.0 / p.kappa - p.kappa); }

double variance(const Params& p) {
    const double k2 = p.kappa * p.kappa;
    return p.sigma * p.sigma * (1.0 + k2 * k2) / k2;
}

double kappa_from_r(double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidInput, "kappa_from_r: r must be >= 0");
    return 0.5 * (r + std::sqrt(4.0 + r * r));
}

double draw(const Params& p, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    const double right_prob = 1.0 / (1.0 + p.kappa * p.kappa);
    const double u = uniform01(rng);
    const double e = expo(rng);
    return u < right_prob ? p.mu + p.sigma * e / p.kappa : p.mu - p.sigma * p.kappa * e;
}

std::vector<double> sample(const Params& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    if (n == 0) throw Error(ErrorCode::InvalidInput, "ALD sample: n must be >= 1");
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = draw(p, rng);
    return out;
}

}  // namespace tca::ald
