#include "tca/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tca/error.hpp"

namespace tca {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_covariates(const Covariates& x) {
    const double v[] = {x.x1, x.x2, x.x3, x.x4};
    for (double c : v)
        if (!(c > 0.0) || !std::isfinite(c))
            throw Error(ErrorCode::InvalidCovariate, "covariates must be finite and positive");
}

void check_layout(BenchmarkKind kind, std::size_t n) {
    if (n != coefficient_count(kind))
        throw Error(ErrorCode::SpecMismatch, "expected " + std::to_string(coefficient_count(kind)) +
                                                 " coefficients for " + std::string(to_string(kind)) + ", got " +
                                                 std::to_string(n));
}

double standard_normal_log_cdf(double z) { return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2)); }

}  // namespace

std::size_t gamma_count(BenchmarkKind kind) { return kind == BenchmarkKind::PWP20 ? 7 : 5; }

std::size_t coefficient_count(BenchmarkKind kind) { return kBetaCount + gamma_count(kind) + kAlphaCount; }

std::vector<std::string> coefficient_names(BenchmarkKind kind) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < kBetaCount; ++i) names.push_back("beta" + std::to_string(i));
    for (std::size_t i = 0; i < gamma_count(kind); ++i) names.push_back("gamma" + std::to_string(i));
    for (std::size_t i = 0; i < kAlphaCount; ++i) names.push_back("alpha" + std::to_string(i));
    return names;
}

CoefficientGroup coefficient_group(BenchmarkKind kind, std::size_t flat_index) {
    if (flat_index < kBetaCount) return CoefficientGroup::Location;
    if (flat_index < kBetaCount + gamma_count(kind)) return CoefficientGroup::Scale;
    if (flat_index < coefficient_count(kind)) return CoefficientGroup::Skew;
    throw Error(ErrorCode::SpecMismatch, "coefficient index out of range");
}

CoefficientVector CoefficientVector::zeros(BenchmarkKind kind) {
    CoefficientVector c;
    c.gamma.assign(gamma_count(kind), 0.0);
    if (kind == BenchmarkKind::PWP20) c.gamma[6] = 1.0;
    return c;
}

CoefficientVector CoefficientVector::from_flat(BenchmarkKind kind, std::span<const double> flat) {
    check_layout(kind, flat.size());
    CoefficientVector c;
    const std::size_t ng = gamma_count(kind);
    std::copy_n(flat.begin(), kBetaCount, c.beta.begin());
    c.gamma.assign(flat.begin() + kBetaCount, flat.begin() + kBetaCount + ng);
    std::copy_n(flat.begin() + kBetaCount + ng, kAlphaCount, c.alpha.begin());
    return c;
}

std::vector<double> CoefficientVector::flat() const {
    std::vector<double> out(beta.begin(), beta.end());
    out.insert(out.end(), gamma.begin(), gamma.end());
    out.insert(out.end(), alpha.begin(), alpha.end());
    return out;
}

ald::Params link(std::span<const double> flat, const Covariates& x, BenchmarkKind kind) {
    check_layout(kind, flat.size());
    check_covariates(x);
    const double l1 = std::log(x.x1), l2 = std::log(x.x2), l3 = std::log(x.x3), l4 = std::log(x.x4);
    const double* b = flat.data();
    const double* g = b + kBetaCount;
    const double* a = g + gamma_count(kind);

    const double mu_ln = b[0] + b[1] * l1 + b[2] * l2 + b[3] * l3 + b[4] * l4;
    double sigma_ln = g[0] + g[1] * l1 + g[2] * l2 + g[3] * l3 + g[4] * l4;
    if (kind == BenchmarkKind::PWP20) {
        const double arg = std::abs(x.x2 - 20.0) + g[6];
        if (!(arg > 0.0)) throw Error(ErrorCode::InvalidInput, "PWP20 scale term requires gamma6 > 0");
        sigma_ln += g[5] * std::log(arg);
    }
    const double r = std::exp(a[0] + a[1] * l1 + a[2] * l2);
    return ald::Params{-std::exp(mu_ln), std::exp(sigma_ln), ald::kappa_from_r(r)};
}

ald::Params link(const CoefficientVector& coeffs, const Covariates& x, BenchmarkKind kind) {
    if (coeffs.gamma.size() != gamma_count(kind))
        throw Error(ErrorCode::SpecMismatch, "gamma length does not match benchmark kind");
    const std::vector<double> f = coeffs.flat();
    return link(f, x, kind);
}

PriorSpec default_prior(BenchmarkKind kind) {
    PriorSpec p;
    p.kind = kind;
    p.terms.push_back({0.0, 2.0});
    for (int i = 1; i <= 4; ++i) p.terms.push_back({0.5, 0.5});
    p.terms.push_back({0.0, 2.0});
    for (int i = 1; i <= 4; ++i) p.terms.push_back({0.5, 0.5});
    if (kind == BenchmarkKind::PWP20) {
        p.terms.push_back({0.5, 0.5});
        p.terms.push_back({1.0, 1.0, true});
    }
    p.terms.push_back({-5.0, 2.0});
    p.terms.push_back({0.0, 0.5});
    p.terms.push_back({0.0, 0.5});
    return p;
}

void validate(const PriorSpec& prior) {
    check_layout(prior.kind, prior.terms.size());
    for (std::size_t i = 0; i < prior.terms.size(); ++i) {
        const NormalPrior& t = prior.terms[i];
        if (!(t.std > 0.0) || !std::isfinite(t.std) || !std::isfinite(t.mean))
            throw Error(ErrorCode::SpecMismatch, "prior std must be positive and finite");
        const bool is_gamma6 = prior.kind == BenchmarkKind::PWP20 && i == kBetaCount + 6;
        if (t.truncated_at_zero && !is_gamma6)
            throw Error(ErrorCode::SpecMismatch, "only gamma6 may carry a truncated prior");
    }
}

std::vector<double> prior_means(const PriorSpec& prior) {
    std::vector<double> m;
    m.reserve(prior.terms.size());
    for (const NormalPrior& t : prior.terms) m.push_back(t.mean);
    return m;
}

double log_normal_prior(const NormalPrior& term, double value) {
    if (term.truncated_at_zero && !(value > 0.0)) return kNegInf;
    const double z = (value - term.mean) / term.std;
    double lp = -0.5 * z * z - std::log(term.std) - 0.5 * std::log(2.0 * std::numbers::pi);
    if (term.truncated_at_zero) lp -= standard_normal_log_cdf(term.mean / term.std);
    return lp;
}

double log_prior(std::span<const double> flat, const PriorSpec& prior) {
    check_layout(prior.kind, flat.size());
    check_layout(prior.kind, prior.terms.size());
    double lp = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i) lp += log_normal_prior(prior.terms[i], flat[i]);
    return lp;
}

double log_prior(const CoefficientVector& coeffs, const PriorSpec& prior) {
    if (coeffs.gamma.size() != gamma_count(prior.kind))
        throw Error(ErrorCode::SpecMismatch, "gamma length does not match prior");
    const std::vector<double> f = coeffs.flat();
    return log_prior(f, prior);
}

double log_likelihood(std::span<const double> flat, std::span<const BenchmarkObservation> observations,
                      BenchmarkKind kind) {
    double ll = 0.0;
    for (const BenchmarkObservation& o : observations) {
        if (o.kind != kind) throw Error(ErrorCode::SpecMismatch, "observation kind does not match model");
        const ald::Params p = link(flat, o.x, kind);
        if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || !(p.sigma > 0.0) || !std::isfinite(p.kappa))
            return kNegInf;
        ll += ald::log_pdf(p, o.y);
    }
    return ll;
}

double log_posterior(const CoefficientVector& coeffs, std::span<const BenchmarkObservation> observations,
                     const PriorSpec& prior) {
    const std::vector<double> f = coeffs.flat();
    const double lp = log_prior(f, prior);
    if (!std::isfinite(lp)) return lp;
    return lp + log_likelihood(f, observations, prior.kind);
}

PriorSpec hierarchical_prior_from_posterior(const PosteriorSamples& stage1) {
    if (stage1.hierarchical())
        throw Error(ErrorCode::SpecMismatch, "stage-2 prior must come from a generic (pooled) posterior");
    check_layout(stage1.kind, stage1.cols());
    if (stage1.rows() < kMinStageOneDraws)
        throw Error(ErrorCode::InsufficientSamples, "stage-1 posterior has " + std::to_string(stage1.rows()) +
                                                        " draws, need at least " +
                                                        std::to_string(kMinStageOneDraws));
    PosteriorSamples s = stage1;
    s.summarize();
    PriorSpec prior = default_prior(stage1.kind);
    for (std::size_t i = 0; i < prior.terms.size(); ++i) {
        prior.terms[i].mean = s.summary[i].mean;
        prior.terms[i].std = std::max(s.summary[i].std, kMinPriorStd);
    }
    return prior;
}

std::vector<std::string> hierarchical_names(BenchmarkKind kind, std::span<const std::string> algo_ids) {
    const std::vector<std::string> base = coefficient_names(kind);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < base.size(); ++i)
        if (is_pooled(coefficient_group(kind, i))) names.push_back(base[i]);
    for (const std::string& algo : algo_ids)
        for (std::size_t i = 0; i < base.size(); ++i)
            if (!is_pooled(coefficient_group(kind, i))) names.push_back(algo_column(base[i], algo));
    return names;
}

std::vector<double> algorithm_coefficients(BenchmarkKind kind, std::span<const double> state,
                                           std::size_t algo_index) {
    const std::size_t ng = gamma_count(kind);
    const std::size_t per_algo = kBetaCount + kAlphaCount;
    if (state.size() < ng + (algo_index + 1) * per_algo)
        throw Error(ErrorCode::SpecMismatch, "hierarchical state too short for algorithm index");
    const double* own = state.data() + ng + algo_index * per_algo;
    std::vector<double> flat;
    flat.reserve(coefficient_count(kind));
    flat.insert(flat.end(), own, own + kBetaCount);
    flat.insert(flat.end(), state.begin(), state.begin() + ng);
    flat.insert(flat.end(), own + kBetaCount, own + per_algo);
    return flat;
}

double log_posterior_hierarchical(std::span<const double> state,
                                  std::span<const std::vector<BenchmarkObservation>> grouped,
                                  const PriorSpec& prior) {
    validate(prior);
    const BenchmarkKind kind = prior.kind;
    const std::size_t ng = gamma_count(kind);
    if (state.size() != ng + grouped.size() * (kBetaCount + kAlphaCount))
        throw Error(ErrorCode::SpecMismatch, "hierarchical state size does not match algorithm count");

    double lp = 0.0;
    for (std::size_t i = 0; i < ng; ++i) lp += log_normal_prior(prior.terms[kBetaCount + i], state[i]);
    if (!std::isfinite(lp)) return lp;
    for (std::size_t a = 0; a < grouped.size(); ++a) {
        const std::vector<double> flat = algorithm_coefficients(kind, state, a);
        for (std::size_t i = 0; i < flat.size(); ++i)
            if (!is_pooled(coefficient_group(kind, i))) lp += log_normal_prior(prior.terms[i], flat[i]);
        lp += log_likelihood(flat, grouped[a], kind);
    }
    return lp;
}

}  // namespace tca
