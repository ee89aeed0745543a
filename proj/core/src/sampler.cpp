#include "tca/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tca/ald.hpp"
#include "tca/diagnostics.hpp"
#include "tca/error.hpp"
#include "tca/rng.hpp"

namespace tca {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double finite_or_neg_inf(double v) { return std::isfinite(v) ? v : kNegInf; }

// ---------------------------------------------------------------------------
// Plain function target.

class FunctionTarget final : public BlockTarget {
public:
    using Fn = std::function<double(std::span<const double>)>;

    explicit FunctionTarget(std::shared_ptr<const Fn> fn) : fn_(std::move(fn)) {}

    double reset(std::span<const double> state) override { return finite_or_neg_inf((*fn_)(state)); }
    double propose(std::size_t, std::span<const double> candidate) override {
        return finite_or_neg_inf((*fn_)(candidate));
    }
    void accept() override {}

private:
    std::shared_ptr<const Fn> fn_;
};

// ---------------------------------------------------------------------------
// ALD regression target with per-observation caches. A location proposal only
// recomputes mu, a scale proposal only sigma, a skew proposal only kappa, and
// only for the algorithm groups the block touches.

struct RegressionGroup {
    std::vector<double> y, l1, l2, l3, l4, d2;  // d2 = |x2 - 20|
    std::array<std::size_t, kBetaCount> beta{};
    std::vector<std::size_t> gamma;
    std::array<std::size_t, kAlphaCount> alpha{};

    std::size_t size() const { return y.size(); }
};

struct RegressionBlock {
    CoefficientGroup component = CoefficientGroup::Location;
    std::vector<std::size_t> coords;
    std::vector<std::size_t> groups;
};

struct GroupCache {
    std::vector<double> mu, sigma_ln, inv_sigma, kappa, log_kappa_norm;
    double loglik = 0.0;

    void resize(std::size_t n) {
        mu.resize(n);
        sigma_ln.resize(n);
        inv_sigma.resize(n);
        kappa.resize(n);
        log_kappa_norm.resize(n);
    }
};

// Shared immutable data for every chain of one regression problem.
struct RegressionData {
    BenchmarkKind kind;
    std::vector<RegressionGroup> groups;
    std::vector<RegressionBlock> blocks;
    std::vector<NormalPrior> prior;
};

class RegressionTarget final : public BlockTarget {
public:
    explicit RegressionTarget(std::shared_ptr<const RegressionData> data)
        : data_(std::move(data)), kind_(data_->kind), groups_(data_->groups), blocks_(data_->blocks),
          prior_(data_->prior), current_(groups_.size()), pending_(groups_.size()) {
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            current_[g].resize(groups_[g].size());
            pending_[g].resize(groups_[g].size());
        }
    }

    double reset(std::span<const double> state) override {
        state_.assign(state.begin(), state.end());
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            GroupCache& c = current_[g];
            location(g, state_, c);
            scale(g, state_, c);
            skew(g, state_, c);
            c.loglik = loglik(g, c, c, c);
        }
        return total();
    }

    double propose(std::size_t block, std::span<const double> candidate) override {
        const RegressionBlock& b = blocks_[block];
        pending_block_ = block;
        candidate_.assign(candidate.begin(), candidate.end());

        double delta = 0.0;
        for (std::size_t i : b.coords)
            delta += log_normal_prior(prior_[i], candidate_[i]) - log_normal_prior(prior_[i], state_[i]);
        if (!std::isfinite(delta)) return kNegInf;

        for (std::size_t g : b.groups) {
            GroupCache& p = pending_[g];
            const GroupCache& c = current_[g];
            switch (b.component) {
                case CoefficientGroup::Location:
                    location(g, candidate_, p);
                    p.loglik = loglik(g, p, c, c);
                    break;
                case CoefficientGroup::Scale:
                    scale(g, candidate_, p);
                    p.loglik = loglik(g, c, p, c);
                    break;
                case CoefficientGroup::Skew:
                    skew(g, candidate_, p);
                    p.loglik = loglik(g, c, c, p);
                    break;
            }
            if (!std::isfinite(p.loglik)) return kNegInf;
            delta += p.loglik - c.loglik;
        }
        return finite_or_neg_inf(total() + delta);
    }

    void accept() override {
        const RegressionBlock& b = blocks_[pending_block_];
        for (std::size_t g : b.groups) {
            GroupCache& c = current_[g];
            GroupCache& p = pending_[g];
            switch (b.component) {
                case CoefficientGroup::Location: c.mu.swap(p.mu); break;
                case CoefficientGroup::Scale:
                    c.sigma_ln.swap(p.sigma_ln);
                    c.inv_sigma.swap(p.inv_sigma);
                    break;
                case CoefficientGroup::Skew:
                    c.kappa.swap(p.kappa);
                    c.log_kappa_norm.swap(p.log_kappa_norm);
                    break;
            }
            c.loglik = p.loglik;
        }
        for (std::size_t i : b.coords) state_[i] = candidate_[i];
    }

private:
    void location(std::size_t g, const std::vector<double>& s, GroupCache& out) const {
        const RegressionGroup& d = groups_[g];
        const double b0 = s[d.beta[0]], b1 = s[d.beta[1]], b2 = s[d.beta[2]], b3 = s[d.beta[3]], b4 = s[d.beta[4]];
        for (std::size_t i = 0; i < d.size(); ++i)
            out.mu[i] = -std::exp(b0 + b1 * d.l1[i] + b2 * d.l2[i] + b3 * d.l3[i] + b4 * d.l4[i]);
    }

    void scale(std::size_t g, const std::vector<double>& s, GroupCache& out) const {
        const RegressionGroup& d = groups_[g];
        const double g0 = s[d.gamma[0]], g1 = s[d.gamma[1]], g2 = s[d.gamma[2]], g3 = s[d.gamma[3]],
                     g4 = s[d.gamma[4]];
        const bool pwp = kind_ == BenchmarkKind::PWP20;
        const double g5 = pwp ? s[d.gamma[5]] : 0.0;
        const double g6 = pwp ? s[d.gamma[6]] : 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            double ln_sigma = g0 + g1 * d.l1[i] + g2 * d.l2[i] + g3 * d.l3[i] + g4 * d.l4[i];
            if (pwp) ln_sigma += g5 * std::log(d.d2[i] + g6);
            out.sigma_ln[i] = ln_sigma;
            out.inv_sigma[i] = std::exp(-ln_sigma);
        }
    }

    void skew(std::size_t g, const std::vector<double>& s, GroupCache& out) const {
        const RegressionGroup& d = groups_[g];
        const double a0 = s[d.alpha[0]], a1 = s[d.alpha[1]], a2 = s[d.alpha[2]];
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double r = std::exp(a0 + a1 * d.l1[i] + a2 * d.l2[i]);
            const double k = 0.5 * (r + std::sqrt(4.0 + r * r));
            out.kappa[i] = k;
            out.log_kappa_norm[i] = std::log(k + 1.0 / k);
        }
    }

    double loglik(std::size_t g, const GroupCache& loc, const GroupCache& sc, const GroupCache& sk) const {
        const RegressionGroup& d = groups_[g];
        double sum = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double z = (d.y[i] - loc.mu[i]) * sc.inv_sigma[i];
            const double decay = z >= 0.0 ? z * sk.kappa[i] : -z / sk.kappa[i];
            sum -= sc.sigma_ln[i] + sk.log_kappa_norm[i] + decay;
        }
        return std::isnan(sum) ? kNegInf : sum;
    }

    double total() const {
        double t = 0.0;
        for (std::size_t i = 0; i < state_.size(); ++i) t += log_normal_prior(prior_[i], state_[i]);
        for (const GroupCache& c : current_) t += c.loglik;
        return finite_or_neg_inf(t);
    }

    std::shared_ptr<const RegressionData> data_;
    BenchmarkKind kind_;
    const std::vector<RegressionGroup>& groups_;
    const std::vector<RegressionBlock>& blocks_;
    const std::vector<NormalPrior>& prior_;
    std::vector<GroupCache> current_, pending_;
    std::vector<double> state_, candidate_;
    std::size_t pending_block_ = 0;
};

RegressionGroup make_group(std::span<const BenchmarkObservation> rows) {
    RegressionGroup g;
    for (const BenchmarkObservation& o : rows) {
        const double v[] = {o.x.x1, o.x.x2, o.x.x3, o.x.x4};
        for (double c : v)
            if (!(c > 0.0) || !std::isfinite(c))
                throw Error(ErrorCode::InvalidCovariate, "covariates must be finite and positive");
        if (!std::isfinite(o.y)) throw Error(ErrorCode::InvalidInput, "non-finite benchmark value");
        g.y.push_back(o.y);
        g.l1.push_back(std::log(o.x.x1));
        g.l2.push_back(std::log(o.x.x2));
        g.l3.push_back(std::log(o.x.x3));
        g.l4.push_back(std::log(o.x.x4));
        g.d2.push_back(std::abs(o.x.x2 - 20.0));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Chain runner.

struct BlockProposal {
    std::vector<std::size_t> coords;
    Eigen::MatrixXd chol;  // lower triangular proposal shape
    double scale = 1.0;
    std::size_t window_accepted = 0;
    std::size_t window_proposed = 0;
    std::size_t segment_accepted = 0;
};

struct ChainOutput {
    std::vector<double> draws;
    std::vector<double> proposal_std;
    std::size_t accepted = 0;
    std::size_t proposed = 0;
};

bool refit_shape(BlockProposal& block, const std::vector<double>& segment, std::size_t dim) {
    const std::size_t d = block.coords.size();
    const std::size_t n = segment.size() / dim;
    if (n < std::max<std::size_t>(50, 10 * d) || block.segment_accepted < 5 * d) return false;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < d; ++j) mean[j] += segment[r * dim + block.coords[j]];
    mean /= static_cast<double>(n);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < n; ++r) {
        Eigen::VectorXd dev(static_cast<Eigen::Index>(d));
        for (std::size_t j = 0; j < d; ++j) dev[j] = segment[r * dim + block.coords[j]] - mean[j];
        cov += dev * dev.transpose();
    }
    cov /= static_cast<double>(n - 1);
    for (Eigen::Index j = 0; j < cov.rows(); ++j) {
        if (!(cov(j, j) > 0.0)) return false;
        cov(j, j) *= 1.0 + 1e-8;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) return false;
    block.chol = llt.matrixL();
    block.scale = 2.38 / std::sqrt(static_cast<double>(d));
    return true;
}

ChainOutput run_chain(const SamplingProblem& problem, const ChainConfig& config, std::size_t chain_index,
                      const std::vector<double>& steps) {
    const std::size_t dim = problem.initial.size();
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(chain_index)));
    std::normal_distribution<double> normal(0.0, 1.0);

    std::unique_ptr<BlockTarget> target = problem.make_target();
    std::vector<double> state = problem.initial;
    double lp = target->reset(state);
    if (!std::isfinite(lp))
        throw Error(ErrorCode::DivergentChain, "chain " + std::to_string(chain_index) +
                                                   ": log posterior is not finite at the initial state");

    std::vector<BlockProposal> blocks(problem.blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        blocks[b].coords = problem.blocks[b];
        const auto d = static_cast<Eigen::Index>(blocks[b].coords.size());
        blocks[b].chol = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index j = 0; j < d; ++j) blocks[b].chol(j, j) = steps[blocks[b].coords[j]];
    }

    const bool adapt = config.adapt_during_burn && config.n_burn > 0;
    // Shape refits happen at 1/4, 1/2 and 3/4 of burn-in from the draws since
    // the previous refit.
    std::vector<std::size_t> checkpoints;
    if (adapt && config.n_burn >= 400)
        checkpoints = {config.n_burn / 4, config.n_burn / 2, 3 * config.n_burn / 4};
    std::vector<double> segment;

    ChainOutput out;
    out.draws.reserve(config.retained_per_chain() * dim);
    std::vector<double> candidate = state;
    Eigen::VectorXd z;
    std::size_t divergent_sweeps = 0;

    for (std::size_t it = 0; it < config.n_iter; ++it) {
        const bool burning = it < config.n_burn;
        bool all_nonfinite = true;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            BlockProposal& blk = blocks[b];
            const auto d = static_cast<Eigen::Index>(blk.coords.size());
            z.resize(d);
            for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
            const Eigen::VectorXd step = blk.scale * (blk.chol.triangularView<Eigen::Lower>() * z).eval();
            for (Eigen::Index j = 0; j < d; ++j) candidate[blk.coords[j]] = state[blk.coords[j]] + step[j];

            const double lp_new = target->propose(b, candidate);
            const double u = uniform01(rng);
            const bool finite = std::isfinite(lp_new);
            all_nonfinite = all_nonfinite && !finite;
            const bool accepted = finite && std::log(u) < lp_new - lp;
            if (accepted) {
                target->accept();
                for (std::size_t c : blk.coords) state[c] = candidate[c];
                lp = lp_new;
            } else {
                for (std::size_t c : blk.coords) candidate[c] = state[c];
            }
            if (burning) {
                ++blk.window_proposed;
                blk.window_accepted += accepted ? 1 : 0;
                blk.segment_accepted += accepted ? 1 : 0;
            } else {
                ++out.proposed;
                out.accepted += accepted ? 1 : 0;
            }
        }

        divergent_sweeps = all_nonfinite ? divergent_sweeps + 1 : 0;
        if (divergent_sweeps >= 10 * dim)
            throw Error(ErrorCode::DivergentChain, "chain " + std::to_string(chain_index) + ": " +
                                                       std::to_string(divergent_sweeps) +
                                                       " consecutive sweeps with non-finite log posterior");

        if (burning) {
            if (!adapt) continue;
            segment.insert(segment.end(), state.begin(), state.end());
            if ((it + 1) % kAdaptWindow == 0) {
                for (BlockProposal& blk : blocks) {
                    const double rate = static_cast<double>(blk.window_accepted) /
                                        static_cast<double>(std::max<std::size_t>(blk.window_proposed, 1));
                    blk.scale = adapt_step(rate, blk.scale);
                    blk.window_accepted = blk.window_proposed = 0;
                }
            }
            if (std::find(checkpoints.begin(), checkpoints.end(), it + 1) != checkpoints.end()) {
                for (BlockProposal& blk : blocks) {
                    refit_shape(blk, segment, dim);
                    blk.segment_accepted = 0;
                }
                segment.clear();
            }
        } else if ((it - config.n_burn + 1) % config.thinning == 0) {
            out.draws.insert(out.draws.end(), state.begin(), state.end());
        }
    }
    out.proposal_std.assign(dim, 0.0);
    for (const BlockProposal& blk : blocks)
        for (std::size_t j = 0; j < blk.coords.size(); ++j)
            out.proposal_std[blk.coords[j]] = blk.scale * blk.chol.row(static_cast<Eigen::Index>(j)).norm();
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ChainConfig ChainConfig::desk() { return ChainConfig{}; }

ChainConfig ChainConfig::long_run() {
    ChainConfig c;
    c.n_iter = 500000;
    c.n_burn = 400000;
    c.thinning = 20;
    return c;
}

void validate(const ChainConfig& config) {
    if (config.n_burn >= config.n_iter) throw Error(ErrorCode::ConfigError, "n_burn must be below n_iter");
    if (config.thinning < 1) throw Error(ErrorCode::ConfigError, "thinning must be >= 1");
    if (config.n_chains < 2) throw Error(ErrorCode::ConfigError, "at least two chains are required");
    if (config.retained_per_chain() < 2) throw Error(ErrorCode::ConfigError, "fewer than two retained draws per chain");
    for (double s : config.step_scales)
        if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::ConfigError, "step scales must be positive");
}

double adapt_step(double acceptance_rate, double step) {
    constexpr double target = 0.5 * (kTargetAcceptLo + kTargetAcceptHi);
    if (acceptance_rate < kTargetAcceptLo) return step * std::max(0.1, acceptance_rate / target);
    if (acceptance_rate > kTargetAcceptHi) return step * std::min(10.0, acceptance_rate / target);
    return step;
}

std::vector<double> adapt_steps(std::span<const double> acceptance_rates, std::span<const double> steps) {
    if (acceptance_rates.size() != steps.size())
        throw Error(ErrorCode::InvalidInput, "adapt_steps: one acceptance rate per step required");
    std::vector<double> out(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) out[i] = adapt_step(acceptance_rates[i], steps[i]);
    return out;
}

SamplingProblem function_problem(std::vector<std::string> names, std::vector<double> initial,
                                 std::vector<std::vector<std::size_t>> blocks, std::vector<double> default_steps,
                                 std::function<double(std::span<const double>)> log_density) {
    SamplingProblem p;
    p.names = std::move(names);
    p.initial = std::move(initial);
    p.blocks = std::move(blocks);
    p.default_steps = std::move(default_steps);
    auto fn = std::make_shared<std::function<double(std::span<const double>)>>(std::move(log_density));
    p.make_target = [fn]() -> std::unique_ptr<BlockTarget> { return std::make_unique<FunctionTarget>(fn); };
    return p;
}

PosteriorSamples run_mh(const SamplingProblem& problem, const ChainConfig& config) {
    validate(config);
    const std::size_t dim = problem.initial.size();
    if (dim == 0 || problem.names.size() != dim)
        throw Error(ErrorCode::SpecMismatch, "sampling problem names/initial state mismatch");
    std::vector<bool> covered(dim, false);
    for (const auto& blk : problem.blocks)
        for (std::size_t c : blk) {
            if (c >= dim || covered[c]) throw Error(ErrorCode::SpecMismatch, "blocks must partition the state");
            covered[c] = true;
        }
    if (std::find(covered.begin(), covered.end(), false) != covered.end())
        throw Error(ErrorCode::SpecMismatch, "blocks must partition the state");

    std::vector<double> steps = config.step_scales.empty() ? problem.default_steps : config.step_scales;
    if (steps.size() != dim) throw Error(ErrorCode::ConfigError, "one step scale per coefficient required");

    std::vector<ChainOutput> outputs(config.n_chains);
    std::vector<std::exception_ptr> errors(config.n_chains);
    {
        std::vector<std::jthread> workers;
        workers.reserve(config.n_chains);
        for (std::size_t c = 0; c < config.n_chains; ++c) {
            workers.emplace_back([&, c] {
                try {
                    outputs[c] = run_chain(problem, config, c, steps);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    PosteriorSamples s;
    s.names = problem.names;
    s.n_chains = config.n_chains;
    std::size_t accepted = 0, proposed = 0;
    for (std::size_t c = 0; c < outputs.size(); ++c) {
        s.draws.insert(s.draws.end(), outputs[c].draws.begin(), outputs[c].draws.end());
        s.chain.insert(s.chain.end(), outputs[c].draws.size() / dim, static_cast<int>(c));
        s.proposal_std.push_back(outputs[c].proposal_std);
        accepted += outputs[c].accepted;
        proposed += outputs[c].proposed;
    }
    s.acceptance_rate = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;

    const std::size_t per_chain = config.retained_per_chain();
    for (std::size_t j = 0; j < dim; ++j) {
        diagnostics::Chains chains(config.n_chains, std::vector<double>(per_chain));
        for (std::size_t c = 0; c < config.n_chains; ++c)
            for (std::size_t r = 0; r < per_chain; ++r) chains[c][r] = outputs[c].draws[r * dim + j];
        s.rhat.push_back(per_chain >= 4 ? diagnostics::rank_normalized_split_rhat(chains) : 1.0);
        s.ess.push_back(diagnostics::effective_sample_size(chains));
    }
    s.summarize();
    return s;
}

SamplingProblem regression_problem(const ModelSpec& model, std::span<const BenchmarkObservation> observations) {
    validate(model.prior);
    if (model.prior.kind != model.kind) throw Error(ErrorCode::SpecMismatch, "prior kind differs from model kind");
    for (const BenchmarkObservation& o : observations)
        if (o.kind != model.kind) throw Error(ErrorCode::SpecMismatch, "observation kind does not match model");

    const BenchmarkKind kind = model.kind;
    const std::size_t ng = gamma_count(kind);
    auto data = std::make_shared<RegressionData>();
    data->kind = kind;

    SamplingProblem p;
    if (std::holds_alternative<Pooled>(model.pooling)) {
        p.names = coefficient_names(kind);
        RegressionGroup g = make_group(observations);
        for (std::size_t i = 0; i < kBetaCount; ++i) g.beta[i] = i;
        for (std::size_t i = 0; i < ng; ++i) g.gamma.push_back(kBetaCount + i);
        for (std::size_t i = 0; i < kAlphaCount; ++i) g.alpha[i] = kBetaCount + ng + i;
        data->blocks.push_back({CoefficientGroup::Location, {g.beta.begin(), g.beta.end()}, {0}});
        data->blocks.push_back({CoefficientGroup::Scale, g.gamma, {0}});
        data->blocks.push_back({CoefficientGroup::Skew, {g.alpha.begin(), g.alpha.end()}, {0}});
        data->groups.push_back(std::move(g));
        data->prior = model.prior.terms;
    } else {
        const auto& algos = std::get<PerAlgo>(model.pooling).algo_ids;
        if (algos.empty()) throw Error(ErrorCode::SpecMismatch, "per-algorithm model needs at least one algorithm");
        p.names = hierarchical_names(kind, algos);
        std::map<std::string, std::vector<BenchmarkObservation>> grouped;
        for (const std::string& a : algos) {
            if (grouped.count(a)) throw Error(ErrorCode::SpecMismatch, "duplicate algorithm id " + a);
            grouped[a];
        }
        for (const BenchmarkObservation& o : observations) {
            auto it = grouped.find(o.algo_id);
            if (it == grouped.end())
                throw Error(ErrorCode::SpecMismatch, "observation for algorithm '" + o.algo_id +
                                                         "' not listed in the per-algorithm model");
            it->second.push_back(o);
        }
        std::vector<std::size_t> shared(ng);
        for (std::size_t i = 0; i < ng; ++i) {
            shared[i] = i;
            data->prior.push_back(model.prior.terms[kBetaCount + i]);
        }
        std::vector<std::size_t> all_groups;
        for (std::size_t a = 0; a < algos.size(); ++a) {
            RegressionGroup g = make_group(grouped[algos[a]]);
            const std::size_t base = ng + a * (kBetaCount + kAlphaCount);
            for (std::size_t i = 0; i < kBetaCount; ++i) {
                g.beta[i] = base + i;
                data->prior.push_back(model.prior.terms[i]);
            }
            for (std::size_t i = 0; i < kAlphaCount; ++i) {
                g.alpha[i] = base + kBetaCount + i;
                data->prior.push_back(model.prior.terms[kBetaCount + ng + i]);
            }
            g.gamma = shared;
            all_groups.push_back(a);
            data->groups.push_back(std::move(g));
        }
        data->blocks.push_back({CoefficientGroup::Scale, shared, all_groups});
        for (std::size_t a = 0; a < algos.size(); ++a) {
            const RegressionGroup& g = data->groups[a];
            data->blocks.push_back({CoefficientGroup::Location, {g.beta.begin(), g.beta.end()}, {a}});
            data->blocks.push_back({CoefficientGroup::Skew, {g.alpha.begin(), g.alpha.end()}, {a}});
        }
    }

    for (const NormalPrior& t : data->prior) {
        p.initial.push_back(t.mean);
        p.default_steps.push_back(0.05 * t.std);
    }
    for (const RegressionBlock& b : data->blocks) p.blocks.push_back(b.coords);
    p.make_target = [data]() -> std::unique_ptr<BlockTarget> {
        return std::make_unique<RegressionTarget>(data);
    };
    return p;
}

PosteriorSamples run_mh(const ModelSpec& model, std::span<const BenchmarkObservation> observations,
                        const ChainConfig& config) {
    if (std::holds_alternative<Pooled>(model.pooling) && observations.empty())
        throw Error(ErrorCode::InvalidInput, "pooled fit needs at least one observation");
    const SamplingProblem problem = regression_problem(model, observations);
    PosteriorSamples s = run_mh(problem, config);
    s.kind = model.kind;
    if (const auto* per = std::get_if<PerAlgo>(&model.pooling)) s.algo_ids = per->algo_ids;
    return s;
}

std::vector<double> posterior_predictive(const PosteriorSamples& samples, std::span<const Covariates> x_list,
                                         std::size_t n_per_draw, std::uint64_t seed) {
    if (samples.rows() == 0) throw Error(ErrorCode::InvalidInput, "posterior predictive needs at least one draw");
    if (samples.hierarchical())
        throw Error(ErrorCode::SpecMismatch, "extract one algorithm before drawing a posterior predictive");
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(samples.rows() * x_list.size() * n_per_draw);
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        for (const Covariates& x : x_list) {
            const ald::Params p = link(samples.row(r), x, samples.kind);
            for (std::size_t k = 0; k < n_per_draw; ++k) out.push_back(ald::draw(p, rng));
        }
    }
    return out;
}

}  // namespace tca
