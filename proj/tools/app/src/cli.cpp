#include "tca_app/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>
#include <json.hpp>

#include "tca/cost_estimator.hpp"
#include "tca/io.hpp"
#include "tca/model.hpp"
#include "tca/ranking.hpp"
#include "tca/rng.hpp"
#include "tca/sampler.hpp"
#include "tca/synth.hpp"

namespace tca::app {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::SpecMismatch:
        case ErrorCode::InvalidInput:
            return kConfigError;
        case ErrorCode::DivergentChain:
            return kDivergence;
        default:
            return kDataError;
    }
}

namespace {

std::string now_utc() {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
    return io::format_timestamp(ms);
}

// Bookkeeping for the manifest written next to every command's outputs.
class Run {
public:
    Run(std::string command, std::string out_dir, std::string config, std::uint64_t seed)
        : command_(std::move(command)),
          out_dir_(std::move(out_dir)),
          config_(std::move(config)),
          seed_(seed),
          started_(now_utc()) {}

    void input(const std::string& role, const std::string& path) { inputs_.emplace_back(role, path); }
    void sub_seed(const std::string& name, std::uint64_t value) { sub_seeds_[name] = value; }
    void seed(std::uint64_t s) { seed_ = s; }

    void prepare() {
        std::error_code ec;
        fs::create_directories(out_dir_, ec);
        if (ec) throw Error(ErrorCode::DataError, "cannot create output directory '" + out_dir_ + "'");
    }

    void write(const std::string& name, std::string_view contents) {
        io::write_file((fs::path(out_dir_) / name).string(), contents);
        outputs_.push_back(name);
    }

    void finish() {
        json inputs = json::object();
        for (const auto& [role, path] : inputs_) inputs[role] = path;
        json m{{"command", command_},
               {"config", config_},
               {"inputs", inputs},
               {"seed", seed_},
               {"sub_seeds", sub_seeds_},
               {"tool_version", kToolVersion},
               {"started_utc", started_},
               {"finished_utc", now_utc()},
               {"outputs", outputs_}};
        io::write_file((fs::path(out_dir_) / "manifest.json").string(), m.dump(2) + "\n");
    }

private:
    std::string command_;
    std::string out_dir_;
    std::string config_;
    std::uint64_t seed_;
    std::string started_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::map<std::string, std::uint64_t> sub_seeds_;
    std::vector<std::string> outputs_;
};

std::string csv_text(auto&& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

BenchmarkKind kind_option(const std::string& name) {
    try {
        return parse_kind(name);
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

PosteriorSamples load_posterior(const std::string& dir) {
    const std::string csv = io::read_file((fs::path(dir) / "posterior.csv").string());
    const std::string summary = io::read_file((fs::path(dir) / "posterior_summary.json").string());
    std::istringstream in(csv);
    return io::read_posterior(in, summary);
}

std::vector<BenchmarkObservation> load_observations(const std::string& path) {
    std::istringstream in(io::read_file(path));
    return io::read_observations_csv(in);
}

// ---- benchmarks / correlations --------------------------------------------------

struct BenchmarksArgs {
    std::string executions, tape;
};

json best_effort_correlations(std::span<const OrderBenchmarks> orders) {
    // Each bucket on its own so one sparse bucket does not hide the others.
    const auto buckets = default_buckets();
    std::vector<BucketCorrelation> ok;
    json skipped = json::array();
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        const ParticipationBucket& b = buckets[i];
        const bool last = i + 1 == buckets.size();
        std::vector<OrderBenchmarks> members;
        for (const OrderBenchmarks& o : orders)
            if (o.x.x2 >= b.lo_pct && (o.x.x2 < b.hi_pct || (last && o.x.x2 == b.hi_pct))) members.push_back(o);
        try {
            ok.push_back(correlation_matrices(members, std::span<const ParticipationBucket>(&b, 1)).front());
        } catch (const Error& e) {
            skipped.push_back({{"participation_lo_pct", b.lo_pct},
                               {"participation_hi_pct", b.hi_pct},
                               {"n_orders", members.size()},
                               {"error", std::string(to_string(e.code()))}});
        }
    }
    json doc = json::parse(io::correlations_json(ok));
    doc["skipped"] = skipped;
    return doc;
}

int cmd_benchmarks(const BenchmarksArgs& a, const std::string& config, Run& run, std::ostream& log) {
    const FilterConfig filters = config.empty() ? FilterConfig{} : io::parse_filter_config(io::read_file(config, ErrorCode::ConfigError));
    run.input("executions", a.executions);
    run.input("tape", a.tape);
    run.prepare();

    std::istringstream exec_in(io::read_file(a.executions));
    const io::ExecutionsFile exec = io::read_executions_csv(exec_in);
    std::istringstream tape_in(io::read_file(a.tape));
    const io::TapeFile tape = io::read_tape_csv(tape_in);

    std::vector<io::RejectedRow> rejects = exec.rejected;
    for (io::RejectedRow r : tape.rejected) {
        r.reason = "tape: " + r.reason;
        rejects.push_back(std::move(r));
    }

    std::vector<OrderBenchmarks> orders;
    static const std::vector<TapeTrade> kNoTape;
    for (std::size_t i = 0; i < exec.records.size(); ++i) {
        const std::string& symbol = exec.symbols[i];
        const std::vector<TapeTrade>* trades = nullptr;
        if (!symbol.empty()) {
            trades = tape.find(symbol);
        } else if (tape.symbols.size() == 1) {
            trades = &tape.trades.front();
        } else if (tape.symbols.size() > 1) {
            throw Error(ErrorCode::DataError, "tape holds several symbols; executions need a symbol column");
        }
        orders.push_back(compute_benchmarks(exec.records[i], trades ? *trades : kNoTape));
    }
    if (orders.empty()) log << "warning: no valid orders in '" << a.executions << "'\n";
    if (!rejects.empty()) log << "warning: " << rejects.size() << " rejected rows, see rejects.csv\n";

    const auto all = to_observations(orders);
    const auto kept = apply_filters(all, filters);

    // Correlations use orders whose four benchmarks all survive the filters.
    std::vector<OrderBenchmarks> complete;
    for (const OrderBenchmarks& o : orders) {
        bool good = true;
        for (BenchmarkKind k : kAllKinds) {
            const auto& out = o.outcome(k);
            if (!out.value) {
                good = false;
                break;
            }
            BenchmarkObservation obs{*out.value, k, o.x, o.algo_id, o.duration_min};
            good = good && passes_filters(obs, filters);
        }
        if (good) complete.push_back(o);
    }

    run.write("observations.csv", csv_text([&](std::ostream& s) { io::write_observations_csv(s, kept); }));
    run.write("order_benchmarks.csv", csv_text([&](std::ostream& s) { write_order_benchmarks_csv(s, orders); }));
    run.write("correlations.json", best_effort_correlations(complete).dump(2) + "\n");
    run.write("rejects.csv", csv_text([&](std::ostream& s) { io::write_rejects_csv(s, rejects); }));
    log << "benchmarks: " << orders.size() << " orders, " << all.size() << " observations, " << kept.size()
        << " after filters\n";
    return kOk;
}

struct CorrelationsArgs {
    std::string orders;
    std::string buckets = "1-7,7-15,15-25,25-40";
};

int cmd_correlations(const CorrelationsArgs& a, const std::string& config, Run& run, std::ostream& log) {
    const auto buckets = parse_buckets(a.buckets);
    std::optional<FilterConfig> filters;
    if (!config.empty()) filters = io::parse_filter_config(io::read_file(config, ErrorCode::ConfigError));
    run.input("orders", a.orders);
    run.prepare();

    std::istringstream in(io::read_file(a.orders));
    auto orders = read_order_benchmarks_csv(in);
    if (filters) {
        std::erase_if(orders, [&](const OrderBenchmarks& o) {
            for (BenchmarkKind k : kAllKinds) {
                const auto& out = o.outcome(k);
                if (out.value && !passes_filters({*out.value, k, o.x, o.algo_id, o.duration_min}, *filters))
                    return true;
            }
            return false;
        });
    }
    const auto matrices = correlation_matrices(orders, buckets);
    run.write("correlations.json", io::correlations_json(matrices));
    log << "correlations: " << matrices.size() << " buckets\n";
    return kOk;
}

// ---- simulate ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string kind = "IS";
    std::size_t n = 20000;
};

int cmd_simulate(const SimulateArgs& a, const std::string& config, std::optional<std::uint64_t> seed, Run& run,
                 std::ostream& log) {
    synth::SynthConfig cfg = config.empty() ? synth::default_config(kind_option(a.kind), a.n, 0)
                                            : io::parse_synth_config(io::read_file(config, ErrorCode::ConfigError));
    const std::uint64_t master = seed.value_or(cfg.seed);
    cfg.seed = derive_seed(master, "synth");
    synth::validate(cfg);
    run.seed(master);
    run.sub_seed("synth", cfg.seed);
    run.prepare();

    const auto rows = synth::generate(cfg);
    run.write("observations.csv", csv_text([&](std::ostream& s) { io::write_observations_csv(s, rows); }));
    run.write("truth.json", io::synth_config_json(cfg) + "\n");
    log << "simulate: " << rows.size() << " " << to_string(cfg.kind) << " observations\n";
    return kOk;
}

// ---- fit ------------------------------------------------------------------------------------

struct FitArgs {
    std::string observations;
    std::string kind;
    std::string stage = "generic";
    std::string prior_samples;
    std::string algos;
    std::optional<std::size_t> chains, n_iter, n_burn, thinning;
};

int cmd_fit(const FitArgs& a, const std::string& config, std::uint64_t seed, Run& run, std::ostream& log) {
    io::FitConfig cfg;
    if (!config.empty()) {
        cfg = io::parse_fit_config(io::read_file(config, ErrorCode::ConfigError));
        if (!a.kind.empty() && kind_option(a.kind) != cfg.model.kind)
            throw Error(ErrorCode::ConfigError, "--kind differs from the config's model kind");
    } else {
        if (a.kind.empty()) throw Error(ErrorCode::ConfigError, "fit needs --kind or --config");
        cfg.model.kind = kind_option(a.kind);
        cfg.model.prior = default_prior(cfg.model.kind);
        cfg.chain = ChainConfig::desk();
    }
    if (a.chains) cfg.chain.n_chains = *a.chains;
    if (a.n_iter) cfg.chain.n_iter = *a.n_iter;
    if (a.n_burn) cfg.chain.n_burn = *a.n_burn;
    if (a.thinning) cfg.chain.thinning = *a.thinning;
    cfg.chain.seed = derive_seed(seed, "fit");
    validate(cfg.chain);

    const bool per_algo = a.stage == "per-algo";
    if (!per_algo && a.stage != "generic") throw Error(ErrorCode::ConfigError, "--stage must be generic or per-algo");
    if (per_algo && a.prior_samples.empty())
        throw Error(ErrorCode::ConfigError, "--stage per-algo needs --prior-samples (the stage-1 output directory)");
    if (!per_algo && (!a.algos.empty() || std::holds_alternative<PerAlgo>(cfg.model.pooling)))
        throw Error(ErrorCode::ConfigError, "algorithm lists need --stage per-algo");

    run.input("observations", a.observations);
    if (per_algo) run.input("prior_samples", a.prior_samples);
    run.sub_seed("fit", cfg.chain.seed);

    std::vector<std::string> algos = split_list(a.algos);
    if (algos.empty())
        if (const auto* p = std::get_if<PerAlgo>(&cfg.model.pooling)) algos = p->algo_ids;

    if (per_algo) {
        const PosteriorSamples stage1 = load_posterior(a.prior_samples);
        if (stage1.hierarchical())
            throw Error(ErrorCode::SpecMismatch, "stage-1 samples must come from a generic fit");
        if (stage1.kind != cfg.model.kind) throw Error(ErrorCode::SpecMismatch, "stage-1 samples are for another kind");
        cfg.model.prior = hierarchical_prior_from_posterior(stage1);
    }
    run.prepare();

    auto obs = load_observations(a.observations);
    std::erase_if(obs, [&](const BenchmarkObservation& o) { return o.kind != cfg.model.kind; });

    if (per_algo) {
        if (algos.empty()) {
            std::set<std::string> seen;
            for (const auto& o : obs) seen.insert(o.algo_id);
            algos.assign(seen.begin(), seen.end());
        } else {
            const std::set<std::string> wanted(algos.begin(), algos.end());
            const auto before = obs.size();
            std::erase_if(obs, [&](const BenchmarkObservation& o) { return !wanted.count(o.algo_id); });
            if (obs.size() != before)
                log << "warning: dropped " << before - obs.size() << " rows of algorithms outside --algos\n";
        }
        if (algos.empty()) throw Error(ErrorCode::DataError, "no algorithms to fit");
        cfg.model.pooling = PerAlgo{algos};
    } else {
        cfg.model.pooling = Pooled{};
    }

    log << "fit: " << obs.size() << " " << to_string(cfg.model.kind) << " observations, " << cfg.chain.n_chains
        << " chains x " << cfg.chain.n_iter << " iterations\n";
    const PosteriorSamples post = run_mh(cfg.model, obs, cfg.chain);

    run.write("posterior.csv", csv_text([&](std::ostream& s) { io::write_posterior_csv(s, post); }));
    run.write("posterior_summary.json", io::posterior_summary_json(post));
    run.write("fit_config.json", io::fit_config_json(cfg) + "\n");

    double worst = 0.0;
    for (double r : post.rhat) worst = std::max(worst, r);
    log << "fit: acceptance " << post.acceptance_rate << ", max rhat " << worst << "\n";
    if (worst > 1.05) log << "warning: rhat above 1.05; consider a longer chain\n";
    return kOk;
}

// ---- cost -------------------------------------------------------------------------------------

struct CostArgs {
    std::vector<std::string> posteriors;
    std::string scenarios;
    bool draws = false;
    std::size_t predictive = 0;
};

const PosteriorSamples& pick_posterior(const std::vector<PosteriorSamples>& posts, std::optional<BenchmarkKind> kind) {
    if (!kind) {
        if (posts.size() != 1) throw Error(ErrorCode::ConfigError, "scenario needs a kind when several posteriors are given");
        return posts.front();
    }
    for (const auto& p : posts)
        if (p.kind == *kind) return p;
    throw Error(ErrorCode::ConfigError, "no posterior for kind " + std::string(to_string(*kind)));
}

PosteriorSamples algorithm_view(const PosteriorSamples& post, const std::string& algo) {
    if (!post.hierarchical()) return post;
    if (algo.empty()) throw Error(ErrorCode::ConfigError, "a per-algorithm posterior needs scenario algo_id");
    return extract_algorithm(post, algo);
}

int cmd_cost(const CostArgs& a, std::uint64_t seed, Run& run, std::ostream& log) {
    const auto scenarios = io::parse_scenarios(io::read_file(a.scenarios, ErrorCode::ConfigError));
    run.input("scenarios", a.scenarios);
    for (std::size_t i = 0; i < a.posteriors.size(); ++i) run.input("posterior" + std::to_string(i), a.posteriors[i]);

    std::vector<PosteriorSamples> posts;
    for (const auto& dir : a.posteriors) posts.push_back(load_posterior(dir));
    run.prepare();

    std::vector<io::CostReport> reports;
    json predictive = json::array();
    const std::uint64_t pred_seed = derive_seed(seed, "predictive");
    if (a.predictive > 0) run.sub_seed("predictive", pred_seed);
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const io::Scenario& sc = scenarios[i];
        const PosteriorSamples view = algorithm_view(pick_posterior(posts, sc.kind), sc.algo_id);
        io::CostReport r;
        r.scenario = sc;
        r.kind = view.kind;
        r.cost = cost_posterior(view, sc.x);
        r.histogram = freedman_diaconis_histogram(r.cost.values);
        reports.push_back(std::move(r));

        if (a.predictive > 0) {
            const Covariates x = sc.x;
            const auto ys = posterior_predictive(view, std::span<const Covariates>(&x, 1), a.predictive,
                                                 derive_seed(pred_seed, i));
            const Histogram h = freedman_diaconis_histogram(ys);
            predictive.push_back({{"kind", std::string(to_string(view.kind))},
                                  {"algo_id", sc.algo_id},
                                  {"n", ys.size()},
                                  {"mean", summarize_costs(ys).mean},
                                  {"std", summarize_costs(ys).std},
                                  {"histogram", {{"lo", h.lo}, {"bin_width", h.bin_width}, {"counts", h.counts}}}});
        }
    }
    run.write("costs.json", io::cost_reports_json(reports, a.draws));
    if (a.predictive > 0) run.write("predictive.json", json{{"scenarios", predictive}}.dump(2) + "\n");
    log << "cost: " << reports.size() << " scenarios\n";
    return kOk;
}

// ---- rank ---------------------------------------------------------------------------------------

struct RankArgs {
    std::vector<std::string> posteriors;
    std::string scenario;
    std::string weights;
    std::string profiles;
    std::string history;
};

std::vector<HistoricalProfile> profiles_from_history(const std::vector<BenchmarkObservation>& rows) {
    // One point per order: rows of several benchmarks share the same covariates.
    std::map<std::string, std::vector<Covariates>> by_algo;
    std::map<std::string, std::set<std::tuple<double, double, double, double>>> seen;
    for (const auto& o : rows)
        if (seen[o.algo_id].insert({o.x.x1, o.x.x2, o.x.x3, o.x.x4}).second) by_algo[o.algo_id].push_back(o.x);
    std::vector<HistoricalProfile> out;
    for (const auto& [algo, xs] : by_algo) out.push_back(fit_profile(algo, xs));
    return out;
}

int cmd_rank(const RankArgs& a, std::uint64_t seed, Run& run, std::ostream& log) {
    const auto scenarios = io::parse_scenarios(io::read_file(a.scenario, ErrorCode::ConfigError));
    if (scenarios.size() != 1) throw Error(ErrorCode::ConfigError, "rank takes exactly one scenario");
    const Covariates x = scenarios.front().x;
    if (a.profiles.empty() == a.history.empty())
        throw Error(ErrorCode::ConfigError, "rank needs exactly one of --profiles or --history");
    if (a.posteriors.empty()) throw Error(ErrorCode::ConfigError, "rank needs at least one --posterior");

    std::optional<RankingWeights> weights;
    if (!a.weights.empty()) weights = io::parse_weights(io::read_file(a.weights, ErrorCode::ConfigError));
    std::vector<HistoricalProfile> profiles;
    if (!a.profiles.empty()) profiles = io::parse_profiles(io::read_file(a.profiles, ErrorCode::ConfigError));

    run.input("scenario", a.scenario);
    if (!a.weights.empty()) run.input("weights", a.weights);
    if (!a.profiles.empty()) run.input("profiles", a.profiles);
    if (!a.history.empty()) run.input("history", a.history);
    for (std::size_t i = 0; i < a.posteriors.size(); ++i) run.input("posterior" + std::to_string(i), a.posteriors[i]);

    std::array<std::optional<PosteriorSamples>, 4> by_kind;
    for (const auto& dir : a.posteriors) {
        PosteriorSamples p = load_posterior(dir);
        auto& slot = by_kind[static_cast<int>(p.kind)];
        if (slot) throw Error(ErrorCode::ConfigError, "two posteriors for kind " + std::string(to_string(p.kind)));
        slot = std::move(p);
    }
    if (!weights) {
        // Without a weights file, weight the supplied benchmarks equally.
        weights = RankingWeights{};
        double n = 0.0;
        for (const auto& p : by_kind) n += p ? 1.0 : 0.0;
        for (int k = 0; k < 4; ++k) weights->benchmarks[k] = by_kind[k] ? 1.0 / n : 0.0;
    }
    for (int k = 0; k < 4; ++k)
        if (weights->benchmarks[k] > 0.0 && !by_kind[k])
            throw Error(ErrorCode::ConfigError,
                        "benchmark " + std::string(to_string(static_cast<BenchmarkKind>(k))) + " is weighted but has no posterior");
    run.prepare();

    if (!a.history.empty()) {
        profiles = profiles_from_history(load_observations(a.history));
        run.write("profiles.json", io::profiles_json(profiles));
    }
    if (profiles.empty()) throw Error(ErrorCode::DataError, "no algorithm profiles");
    std::sort(profiles.begin(), profiles.end(),
              [](const HistoricalProfile& l, const HistoricalProfile& r) { return l.algo_id < r.algo_id; });

    std::vector<AlgorithmInput> inputs;
    std::vector<std::array<std::optional<CostPosterior>, 4>> costs;
    for (const HistoricalProfile& p : profiles) {
        AlgorithmInput in;
        in.profile = p;
        std::array<std::optional<CostPosterior>, 4> per_kind;
        for (int k = 0; k < 4; ++k) {
            in.expected_costs[k] = std::numeric_limits<double>::quiet_NaN();
            if (!by_kind[k] || weights->benchmarks[k] <= 0.0) continue;
            const PosteriorSamples& post = *by_kind[k];
            if (post.hierarchical() &&
                std::find(post.algo_ids.begin(), post.algo_ids.end(), p.algo_id) == post.algo_ids.end())
                throw Error(ErrorCode::ConfigError, "no " + std::string(to_string(post.kind)) + " posterior for algorithm " + p.algo_id);
            per_kind[k] = cost_posterior(post, x, p.algo_id);
            in.expected_costs[k] = per_kind[k]->summary.mean;
        }
        inputs.push_back(std::move(in));
        costs.push_back(std::move(per_kind));
    }

    const auto cards = rank_algorithms(x, inputs, *weights);

    int primary = 0;
    for (int k = 1; k < 4; ++k)
        if (weights->benchmarks[k] > weights->benchmarks[primary]) primary = k;
    std::vector<std::pair<std::string, CostPosterior>> wheel;
    for (const ScoreCard& c : cards) {
        if (!c.included) continue;
        for (std::size_t i = 0; i < profiles.size(); ++i)
            if (profiles[i].algo_id == c.algo_id) wheel.emplace_back(c.algo_id, *costs[i][primary]);
    }
    const std::uint64_t wheel_seed = derive_seed(seed, "wheel");
    run.sub_seed("wheel", wheel_seed);
    const std::string choice = algo_wheel(wheel, wheel_seed);

    run.write("scorecards.json", io::scorecards_json(cards, choice));
    run.write("ranking.csv", csv_text([&](std::ostream& s) { io::write_ranking_csv(s, cards); }));
    log << "rank: " << cards.size() << " algorithms, first " << cards.front().algo_id << ", wheel picked " << choice
        << "\n";
    return kOk;
}

}  // namespace

// ---- order benchmark table ---------------------------------------------------------------------

void write_order_benchmarks_csv(std::ostream& out, std::span<const OrderBenchmarks> orders) {
    out << "order_id,algo_id,x1,x2,x3,x4,duration_min,IS,VWAP,PWP20,Rev5m,pwp_partial,errors\n";
    for (const OrderBenchmarks& o : orders) {
        out << o.order_id << ',' << o.algo_id << ',' << io::format_double(o.x.x1) << ',' << io::format_double(o.x.x2)
            << ',' << io::format_double(o.x.x3) << ',' << io::format_double(o.x.x4) << ','
            << io::format_double(o.duration_min);
        std::string errors;
        for (BenchmarkKind k : kAllKinds) {
            const auto& r = o.outcome(k);
            out << ',';
            if (r.value) out << io::format_double(*r.value);
            if (!r.error.empty()) errors += (errors.empty() ? "" : ";") + std::string(to_string(k)) + ":" + r.error;
        }
        out << ',' << (o.outcome(BenchmarkKind::PWP20).partial ? 1 : 0) << ',' << errors << '\n';
    }
}

std::vector<OrderBenchmarks> read_order_benchmarks_csv(std::istream& in) {
    std::vector<OrderBenchmarks> out;
    std::string line;
    if (!std::getline(in, line)) return out;
    if (line.rfind("order_id,algo_id,x1,x2,x3,x4,duration_min,IS,VWAP,PWP20,Rev5m", 0) != 0)
        throw Error(ErrorCode::DataError, "unexpected order benchmark header");
    std::size_t line_no = 1;
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || !std::isfinite(v))
            throw Error(ErrorCode::DataError, "order benchmarks line " + std::to_string(line_no) + ": bad number '" + s + "'");
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() < 11) throw Error(ErrorCode::DataError, "order benchmarks line " + std::to_string(line_no) + ": too few fields");
        OrderBenchmarks o;
        o.order_id = f[0];
        o.algo_id = f[1];
        o.x = {num(f[2]), num(f[3]), num(f[4]), num(f[5])};
        o.duration_min = num(f[6]);
        for (int k = 0; k < 4; ++k) {
            if (f[7 + k].empty())
                o.outcomes[k].error = "missing";
            else
                o.outcomes[k].value = num(f[7 + k]);
        }
        if (f.size() > 11) o.outcomes[static_cast<int>(BenchmarkKind::PWP20)].partial = f[11] == "1";
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<ParticipationBucket> parse_buckets(const std::string& text) {
    std::vector<ParticipationBucket> out;
    for (const std::string& item : split_list(text)) {
        const auto dash = item.find('-');
        try {
            if (dash == std::string::npos) throw std::invalid_argument(item);
            const double lo = std::stod(item.substr(0, dash));
            const double hi = std::stod(item.substr(dash + 1));
            if (!(lo < hi)) throw std::invalid_argument(item);
            out.push_back({lo, hi});
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, "bad bucket '" + item + "', expected lo-hi");
        }
    }
    if (out.empty()) throw Error(ErrorCode::ConfigError, "no participation buckets");
    return out;
}

// ---- entry point --------------------------------------------------------------------------------

int run(std::span<const std::string> args, std::ostream& log) {
    CLI::App app{"Bayesian transaction cost analysis: benchmarks, model fits, cost posteriors and algorithm ranking",
                 "tca"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config, "JSON config file for the command");
    app.add_option("--out-dir", out_dir, "Directory for output files");
    app.add_option("--seed", seed, "Master seed; sub-seeds are derived by name");

    BenchmarksArgs bench;
    auto* c_bench = app.add_subcommand("benchmarks", "Compute IS, VWAP, PWP20 and Rev5m from fills and a tape");
    c_bench->add_option("--executions", bench.executions, "Executions CSV, one row per fill")->required();
    c_bench->add_option("--tape", bench.tape, "Market tape CSV")->required();

    CorrelationsArgs corr;
    auto* c_corr = app.add_subcommand("correlations", "Pearson matrices of the benchmarks per participation bucket");
    c_corr->add_option("--orders", corr.orders, "order_benchmarks.csv written by 'benchmarks'")->required();
    c_corr->add_option("--buckets", corr.buckets, "Participation buckets in percent, e.g. 1-7,7-15");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate synthetic observations from known coefficients");
    c_sim->add_option("--kind", sim.kind, "Benchmark kind when no --config is given");
    c_sim->add_option("-n,--n", sim.n, "Rows when no --config is given");

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Fit the ALD regression by Metropolis-Hastings");
    c_fit->add_option("--observations", fit.observations, "Observations CSV")->required();
    c_fit->add_option("--kind", fit.kind, "Benchmark kind (or model.kind in --config)");
    c_fit->add_option("--stage", fit.stage, "generic or per-algo")->check(CLI::IsMember({"generic", "per-algo"}));
    c_fit->add_option("--prior-samples", fit.prior_samples, "Stage-1 output directory (per-algo stage)");
    c_fit->add_option("--algos", fit.algos, "Comma-separated algorithms for the per-algo stage");
    c_fit->add_option("--chains", fit.chains, "Number of chains");
    c_fit->add_option("--n-iter", fit.n_iter, "Iterations per chain");
    c_fit->add_option("--n-burn", fit.n_burn, "Burn-in iterations per chain");
    c_fit->add_option("--thinning", fit.thinning, "Keep every n-th draw");

    CostArgs cost;
    auto* c_cost = app.add_subcommand("cost", "Posterior of the expected benchmark cost per scenario");
    c_cost->add_option("--posterior", cost.posteriors, "Fit output directory (repeatable, one per kind)")->required();
    c_cost->add_option("--scenarios", cost.scenarios, "Scenario JSON list")->required();
    c_cost->add_flag("--draws", cost.draws, "Include every posterior draw in the output");
    c_cost->add_option("--predictive", cost.predictive, "Posterior predictive replicates per draw (0 = off)");

    RankArgs rank;
    auto* c_rank = app.add_subcommand("rank", "Score and rank algorithms for one scenario");
    c_rank->add_option("--posterior", rank.posteriors, "Fit output directory (repeatable, one per kind)")->required();
    c_rank->add_option("--scenario", rank.scenario, "Scenario JSON (a list with one entry)")->required();
    c_rank->add_option("--weights", rank.weights, "Weights JSON");
    c_rank->add_option("--profiles", rank.profiles, "Historical profiles JSON");
    c_rank->add_option("--history", rank.history, "Observations CSV to build profiles from");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<const char*> argv;
    for (const std::string& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream out, err;
        const int code = app.exit(e, out, err);
        log << out.str() << err.str();
        return code == 0 ? kOk : kConfigError;
    }

    const std::uint64_t master = seed.value_or(0);
    try {
        if (c_bench->parsed()) {
            Run r("benchmarks", out_dir, config, master);
            const int rc = cmd_benchmarks(bench, config, r, log);
            r.finish();
            return rc;
        }
        if (c_corr->parsed()) {
            Run r("correlations", out_dir, config, master);
            const int rc = cmd_correlations(corr, config, r, log);
            r.finish();
            return rc;
        }
        if (c_sim->parsed()) {
            Run r("simulate", out_dir, config, master);
            const int rc = cmd_simulate(sim, config, seed, r, log);
            r.finish();
            return rc;
        }
        if (c_fit->parsed()) {
            Run r("fit", out_dir, config, master);
            const int rc = cmd_fit(fit, config, master, r, log);
            r.finish();
            return rc;
        }
        if (c_cost->parsed()) {
            if (!config.empty()) throw Error(ErrorCode::ConfigError, "cost takes no --config");
            Run r("cost", out_dir, config, master);
            const int rc = cmd_cost(cost, master, r, log);
            r.finish();
            return rc;
        }
        if (c_rank->parsed()) {
            if (!config.empty()) throw Error(ErrorCode::ConfigError, "rank takes no --config; use --weights");
            Run r("rank", out_dir, config, master);
            const int rc = cmd_rank(rank, master, r, log);
            r.finish();
            return rc;
        }
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return exit_code(e.code());
    }
    return kConfigError;
}

int run(int argc, const char* const* argv, std::ostream& log) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, log);
}

}  // namespace tca::app
