#include "tca/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tca/error.hpp"

namespace tca::io {

using nlohmann::json;

namespace {

// ---- text helpers -------------------------------------------------------------

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(std::string_view s, const char* what) {
    s = trim(s);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw Error(ErrorCode::DataError, std::string("bad ") + what + " '" + std::string(s) + "'");
    return v;
}

int parse_int(std::string_view s, const char* what) {
    s = trim(s);
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorCode::DataError, std::string("bad ") + what + " '" + std::string(s) + "'");
    return v;
}

Side parse_side(std::string_view s) {
    std::string up(trim(s));
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    if (up == "BUY" || up == "B" || up == "1" || up == "+1") return Side::Buy;
    if (up == "SELL" || up == "S" || up == "-1") return Side::Sell;
    throw Error(ErrorCode::DataError, "bad side '" + std::string(s) + "'");
}

// Header-driven CSV access; required columns must be present.
class CsvHeader {
public:
    CsvHeader(const std::string& line, std::initializer_list<const char*> required) {
        const auto cols = split_csv(line);
        for (std::size_t i = 0; i < cols.size(); ++i) index_[cols[i]] = i;
        for (const char* r : required)
            if (!index_.count(r)) throw Error(ErrorCode::DataError, std::string("missing column '") + r + "'");
        width_ = cols.size();
    }

    std::size_t at(const char* name) const { return index_.at(name); }
    bool has(const char* name) const { return index_.count(name) > 0; }
    std::size_t width() const { return width_; }

private:
    std::map<std::string, std::size_t, std::less<>> index_;
    std::size_t width_ = 0;
};

bool blank(const std::string& line) { return trim(line).empty(); }

// ---- JSON helpers -------------------------------------------------------------

json parse_json(std::string_view text, ErrorCode code) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw Error(code, std::string("invalid JSON: ") + e.what());
    }
}

void allow_keys(const json& j, std::initializer_list<const char*> keys, const char* where) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, std::string(where) + " must be a JSON object");
    for (const auto& item : j.items()) {
        const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; });
        if (!known) throw Error(ErrorCode::ConfigError, std::string(where) + ": unknown key '" + item.key() + "'");
    }
}

template <typename T>
T get(const json& j, const char* key, const char* where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string(where) + "." + key + ": " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const char* where) {
    if (!j.contains(key)) return fallback;
    return get<T>(j, key, where);
}

BenchmarkKind kind_from_json(const json& j, const char* key, const char* where, ErrorCode code) {
    const auto name = get<std::string>(j, key, where);
    try {
        return parse_kind(name);
    } catch (const Error& e) {
        throw Error(code, e.what());
    }
}

json gaussian_json(const Gaussian2& g) {
    return json{{"mean", {g.mean[0], g.mean[1]}},
                {"cov", {{g.cov(0, 0), g.cov(0, 1)}, {g.cov(1, 0), g.cov(1, 1)}}},
                {"count", g.count}};
}

Gaussian2 gaussian_from_json(const json& j) {
    allow_keys(j, {"mean", "cov", "count"}, "profile distribution");
    Gaussian2 g;
    const auto mean = get<std::vector<double>>(j, "mean", "profile distribution");
    const auto cov = get<std::vector<std::vector<double>>>(j, "cov", "profile distribution");
    if (mean.size() != 2 || cov.size() != 2 || cov[0].size() != 2 || cov[1].size() != 2)
        throw Error(ErrorCode::ConfigError, "profile distribution needs a 2-vector mean and 2x2 cov");
    g.mean = {mean[0], mean[1]};
    g.cov << cov[0][0], cov[0][1], cov[1][0], cov[1][1];
    g.count = get_or<std::size_t>(j, "count", 0, "profile distribution");
    return g;
}

json coefficient_json(const CoefficientVector& c) {
    return json{{"beta", c.beta}, {"gamma", c.gamma}, {"alpha", c.alpha}};
}

CoefficientVector coefficient_from_json(const json& j, BenchmarkKind kind) {
    allow_keys(j, {"beta", "gamma", "alpha"}, "truth");
    const auto beta = get<std::vector<double>>(j, "beta", "truth");
    const auto gamma = get<std::vector<double>>(j, "gamma", "truth");
    const auto alpha = get<std::vector<double>>(j, "alpha", "truth");
    if (beta.size() != kBetaCount || gamma.size() != gamma_count(kind) || alpha.size() != kAlphaCount)
        throw Error(ErrorCode::ConfigError, "truth coefficient lengths do not match the benchmark kind");
    CoefficientVector c;
    std::copy(beta.begin(), beta.end(), c.beta.begin());
    c.gamma = gamma;
    std::copy(alpha.begin(), alpha.end(), c.alpha.begin());
    return c;
}

json chain_to_json(const ChainConfig& c) {
    json j{{"n_iter", c.n_iter},       {"n_burn", c.n_burn}, {"thinning", c.thinning},
           {"n_chains", c.n_chains},   {"seed", c.seed},     {"adapt_during_burn", c.adapt_during_burn}};
    if (!c.step_scales.empty()) j["step_scales"] = c.step_scales;
    return j;
}

ChainConfig chain_from_json(const json& j) {
    allow_keys(j, {"n_iter", "n_burn", "thinning", "n_chains", "seed", "adapt_during_burn", "step_scales"}, "chain");
    ChainConfig c = ChainConfig::desk();
    c.n_iter = get_or<std::size_t>(j, "n_iter", c.n_iter, "chain");
    c.n_burn = get_or<std::size_t>(j, "n_burn", c.n_burn, "chain");
    c.thinning = get_or<std::size_t>(j, "thinning", c.thinning, "chain");
    c.n_chains = get_or<std::size_t>(j, "n_chains", c.n_chains, "chain");
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed, "chain");
    c.adapt_during_burn = get_or<bool>(j, "adapt_during_burn", c.adapt_during_burn, "chain");
    c.step_scales = get_or<std::vector<double>>(j, "step_scales", {}, "chain");
    validate(c);
    return c;
}

json prior_to_json(const PriorSpec& p) {
    const auto names = coefficient_names(p.kind);
    json terms = json::array();
    for (std::size_t i = 0; i < p.terms.size(); ++i)
        terms.push_back({{"name", names[i]},
                         {"mean", p.terms[i].mean},
                         {"std", p.terms[i].std},
                         {"truncated_at_zero", p.terms[i].truncated_at_zero}});
    return json{{"kind", std::string(to_string(p.kind))}, {"terms", terms}};
}

PriorSpec prior_from_json(const json& j, std::optional<BenchmarkKind> expected) {
    allow_keys(j, {"kind", "terms"}, "prior");
    PriorSpec p;
    p.kind = kind_from_json(j, "kind", "prior", ErrorCode::ConfigError);
    if (expected && *expected != p.kind) throw Error(ErrorCode::ConfigError, "prior kind differs from model kind");
    const auto names = coefficient_names(p.kind);
    const json& terms = j.at("terms");
    if (!terms.is_array() || terms.size() != names.size())
        throw Error(ErrorCode::ConfigError, "prior needs " + std::to_string(names.size()) + " terms");
    for (std::size_t i = 0; i < names.size(); ++i) {
        const json& t = terms[i];
        allow_keys(t, {"name", "mean", "std", "truncated_at_zero"}, "prior term");
        if (t.contains("name") && get<std::string>(t, "name", "prior term") != names[i])
            throw Error(ErrorCode::ConfigError, "prior term " + std::to_string(i) + " must be " + names[i]);
        p.terms.push_back({get<double>(t, "mean", "prior term"), get<double>(t, "std", "prior term"),
                           get_or<bool>(t, "truncated_at_zero", false, "prior term")});
    }
    try {
        validate(p);
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    return p;
}

json summary_json(const CostSummary& s) {
    return json{{"mean", s.mean}, {"std", s.std},   {"q05", s.q05}, {"q25", s.q25},
                {"q50", s.q50},   {"q75", s.q75}, {"q95", s.q95}};
}

}  // namespace

// ---- timestamps / numbers -------------------------------------------------------

EpochMs parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    const std::string_view s = trim(text);
    auto num = [&](std::size_t pos, std::size_t len) {
        if (pos + len > s.size()) throw Error(ErrorCode::DataError, "bad timestamp '" + std::string(s) + "'");
        int v = 0;
        const auto r = std::from_chars(s.data() + pos, s.data() + pos + len, v);
        if (r.ec != std::errc() || r.ptr != s.data() + pos + len)
            throw Error(ErrorCode::DataError, "bad timestamp '" + std::string(s) + "'");
        return v;
    };
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':')
        throw Error(ErrorCode::DataError, "bad timestamp '" + std::string(s) + "'");
    const year_month_day ymd{year{num(0, 4)}, month{static_cast<unsigned>(num(5, 2))},
                             day{static_cast<unsigned>(num(8, 2))}};
    if (!ymd.ok()) throw Error(ErrorCode::DataError, "bad date in '" + std::string(s) + "'");
    const int hh = num(11, 2), mm = num(14, 2), ss = num(17, 2);
    if (hh > 23 || mm > 59 || ss > 60) throw Error(ErrorCode::DataError, "bad time in '" + std::string(s) + "'");

    std::size_t pos = 19;
    EpochMs millis = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            if (digits < 3) millis = millis * 10 + (s[pos] - '0');
            ++digits;
            ++pos;
        }
        if (digits == 0) throw Error(ErrorCode::DataError, "bad fraction in '" + std::string(s) + "'");
        for (int d = digits; d < 3; ++d) millis *= 10;
    }
    const std::string_view zone = s.substr(pos);
    if (!(zone.empty() || zone == "Z" || zone == "+00:00"))
        throw Error(ErrorCode::DataError, "timestamps must be UTC: '" + std::string(s) + "'");

    const auto days = sys_days{ymd}.time_since_epoch().count();
    return (static_cast<EpochMs>(days) * 86400 + hh * 3600 + mm * 60 + ss) * 1000 + millis;
}

std::string format_timestamp(EpochMs ms) {
    using namespace std::chrono;
    const EpochMs day_ms = 86400000;
    EpochMs days = ms / day_ms;
    EpochMs rem = ms % day_ms;
    if (rem < 0) {
        rem += day_ms;
        --days;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(rem / 3600000), static_cast<int>(rem / 60000 % 60),
                  static_cast<int>(rem / 1000 % 60), static_cast<int>(rem % 1000));
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// ---- executions / tape ------------------------------------------------------------

ExecutionsFile read_executions_csv(std::istream& in) {
    ExecutionsFile file;
    std::string line;
    if (!std::getline(in, line)) return file;
    const CsvHeader h(line, {"order_id", "algo_id", "side", "arrival_price", "start_time", "end_time", "fill_time",
                             "fill_price", "fill_qty", "size_shares", "adv_shares", "participation_rate_pct",
                             "volatility_pct", "spread_bps"});
    const bool with_symbol = h.has("symbol");

    std::map<std::string, std::size_t> by_id;
    std::vector<std::size_t> first_line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        try {
            const auto f = split_csv(line);
            if (f.size() != h.width())
                throw Error(ErrorCode::DataError, "expected " + std::to_string(h.width()) + " fields, got " +
                                                      std::to_string(f.size()));
            const std::string& id = f[h.at("order_id")];
            if (id.empty()) throw Error(ErrorCode::DataError, "empty order_id");
            const Fill fill{parse_timestamp(f[h.at("fill_time")]), parse_number(f[h.at("fill_price")], "fill_price"),
                            parse_number(f[h.at("fill_qty")], "fill_qty")};
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                ExecutionRecord r;
                r.order_id = id;
                r.algo_id = f[h.at("algo_id")];
                r.side = parse_side(f[h.at("side")]);
                r.arrival_price = parse_number(f[h.at("arrival_price")], "arrival_price");
                r.start_time = parse_timestamp(f[h.at("start_time")]);
                r.end_time = parse_timestamp(f[h.at("end_time")]);
                r.size_shares = parse_number(f[h.at("size_shares")], "size_shares");
                r.adv_shares = parse_number(f[h.at("adv_shares")], "adv_shares");
                r.participation_rate_pct = parse_number(f[h.at("participation_rate_pct")], "participation_rate_pct");
                r.volatility_pct = parse_number(f[h.at("volatility_pct")], "volatility_pct");
                r.spread_bps = parse_number(f[h.at("spread_bps")], "spread_bps");
                it = by_id.emplace(id, file.records.size()).first;
                file.records.push_back(std::move(r));
                file.symbols.push_back(with_symbol ? f[h.at("symbol")] : std::string());
                first_line.push_back(line_no);
            }
            file.records[it->second].fills.push_back(fill);
        } catch (const Error& e) {
            file.rejected.push_back({line_no, e.what(), line});
        }
    }

    // Whole-order validation; invalid orders are dropped.
    ExecutionsFile valid;
    valid.rejected = std::move(file.rejected);
    for (std::size_t i = 0; i < file.records.size(); ++i) {
        ExecutionRecord& r = file.records[i];
        std::stable_sort(r.fills.begin(), r.fills.end(),
                         [](const Fill& a, const Fill& b) { return a.timestamp < b.timestamp; });
        try {
            validate(r);
            valid.records.push_back(std::move(r));
            valid.symbols.push_back(file.symbols[i]);
        } catch (const Error& e) {
            valid.rejected.push_back({first_line[i], e.what(), "order " + r.order_id});
        }
    }
    std::stable_sort(valid.rejected.begin(), valid.rejected.end(),
                     [](const RejectedRow& a, const RejectedRow& b) { return a.line < b.line; });
    return valid;
}

const std::vector<TapeTrade>* TapeFile::find(std::string_view symbol) const {
    const auto it = std::lower_bound(symbols.begin(), symbols.end(), symbol);
    if (it == symbols.end() || *it != symbol) return nullptr;
    return &trades[static_cast<std::size_t>(it - symbols.begin())];
}

TapeFile read_tape_csv(std::istream& in) {
    TapeFile file;
    std::string line;
    if (!std::getline(in, line)) return file;
    const CsvHeader h(line, {"symbol", "timestamp", "price", "volume"});
    std::map<std::string, std::vector<TapeTrade>> by_symbol;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        try {
            const auto f = split_csv(line);
            if (f.size() != h.width()) throw Error(ErrorCode::DataError, "wrong field count");
            const TapeTrade t{parse_timestamp(f[h.at("timestamp")]), parse_number(f[h.at("price")], "price"),
                              parse_number(f[h.at("volume")], "volume")};
            if (!(t.price > 0.0) || !(t.volume > 0.0))
                throw Error(ErrorCode::DataError, "tape price and volume must be positive");
            by_symbol[f[h.at("symbol")]].push_back(t);
        } catch (const Error& e) {
            file.rejected.push_back({line_no, e.what(), line});
        }
    }
    for (auto& [sym, trades] : by_symbol) {
        std::stable_sort(trades.begin(), trades.end(),
                         [](const TapeTrade& a, const TapeTrade& b) { return a.timestamp < b.timestamp; });
        file.symbols.push_back(sym);
        file.trades.push_back(std::move(trades));
    }
    return file;
}

void write_rejects_csv(std::ostream& out, const std::vector<RejectedRow>& rows) {
    out << "line,reason,raw\n";
    for (const RejectedRow& r : rows) {
        std::string reason = r.reason, raw = r.raw;
        std::replace(reason.begin(), reason.end(), ',', ';');
        std::replace(raw.begin(), raw.end(), ',', ';');
        out << r.line << ',' << reason << ',' << raw << '\n';
    }
}

// ---- observations -------------------------------------------------------------------

void write_observations_csv(std::ostream& out, const std::vector<BenchmarkObservation>& rows) {
    out << "y,kind,x1,x2,x3,x4,algo_id\n";
    for (const BenchmarkObservation& o : rows)
        out << format_double(o.y) << ',' << to_string(o.kind) << ',' << format_double(o.x.x1) << ','
            << format_double(o.x.x2) << ',' << format_double(o.x.x3) << ',' << format_double(o.x.x4) << ','
            << o.algo_id << '\n';
}

std::vector<BenchmarkObservation> read_observations_csv(std::istream& in) {
    std::vector<BenchmarkObservation> rows;
    std::string line;
    if (!std::getline(in, line)) return rows;
    const CsvHeader h(line, {"y", "kind", "x1", "x2", "x3", "x4", "algo_id"});
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        try {
            const auto f = split_csv(line);
            if (f.size() != h.width()) throw Error(ErrorCode::DataError, "wrong field count");
            BenchmarkObservation o;
            o.y = parse_number(f[h.at("y")], "y");
            try {
                o.kind = parse_kind(f[h.at("kind")]);
            } catch (const Error& e) {
                throw Error(ErrorCode::DataError, e.what());
            }
            o.x = {parse_number(f[h.at("x1")], "x1"), parse_number(f[h.at("x2")], "x2"),
                   parse_number(f[h.at("x3")], "x3"), parse_number(f[h.at("x4")], "x4")};
            o.algo_id = f[h.at("algo_id")];
            rows.push_back(std::move(o));
        } catch (const Error& e) {
            throw Error(ErrorCode::DataError, "observations line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return rows;
}

// ---- JSON documents ---------------------------------------------------------------------

std::string correlations_json(const std::vector<BucketCorrelation>& buckets) {
    json out = json::array();
    for (const BucketCorrelation& b : buckets) {
        json m = json::array();
        for (const auto& row : b.matrix) m.push_back(row);
        out.push_back({{"participation_lo_pct", b.bucket.lo_pct},
                       {"participation_hi_pct", b.bucket.hi_pct},
                       {"n_orders", b.n_orders},
                       {"benchmarks", {"IS", "VWAP", "PWP20", "Rev5m"}},
                       {"matrix", m}});
    }
    return json{{"buckets", out}}.dump(2) + "\n";
}

FilterConfig parse_filter_config(std::string_view json_text) {
    const json j = parse_json(json_text, ErrorCode::ConfigError);
    allow_keys(j, {"min_duration_min", "min_x1", "max_x1", "min_x2", "max_x2", "cutoff_bps"}, "filters");
    FilterConfig c;
    c.min_duration_min = get_or<double>(j, "min_duration_min", c.min_duration_min, "filters");
    c.min_x1 = get_or<double>(j, "min_x1", c.min_x1, "filters");
    c.max_x1 = get_or<double>(j, "max_x1", c.max_x1, "filters");
    c.min_x2 = get_or<double>(j, "min_x2", c.min_x2, "filters");
    c.max_x2 = get_or<double>(j, "max_x2", c.max_x2, "filters");
    if (j.contains("cutoff_bps")) {
        const json& cut = j.at("cutoff_bps");
        allow_keys(cut, {"IS", "VWAP", "PWP20", "Rev5m"}, "filters.cutoff_bps");
        for (BenchmarkKind k : kAllKinds) {
            const std::string name(to_string(k));
            c.cutoff_bps[static_cast<int>(k)] =
                get_or<double>(cut, name.c_str(), c.cutoff_bps[static_cast<int>(k)], "filters.cutoff_bps");
        }
    }
    if (c.min_x1 > c.max_x1 || c.min_x2 > c.max_x2) throw Error(ErrorCode::ConfigError, "filters: empty range");
    for (double v : c.cutoff_bps)
        if (!(v > 0.0)) throw Error(ErrorCode::ConfigError, "filters: cutoffs must be positive");
    return c;
}

std::string filter_config_json(const FilterConfig& c) {
    json cut;
    for (BenchmarkKind k : kAllKinds) cut[std::string(to_string(k))] = c.cutoff(k);
    return json{{"min_duration_min", c.min_duration_min},
                {"min_x1", c.min_x1},
                {"max_x1", c.max_x1},
                {"min_x2", c.min_x2},
                {"max_x2", c.max_x2},
                {"cutoff_bps", cut}}
               .dump(2);
}

PriorSpec parse_prior_spec(std::string_view json_text) {
    return prior_from_json(parse_json(json_text, ErrorCode::ConfigError), std::nullopt);
}

std::string prior_spec_json(const PriorSpec& prior) { return prior_to_json(prior).dump(2); }

FitConfig parse_fit_config(std::string_view json_text) {
    const json j = parse_json(json_text, ErrorCode::ConfigError);
    allow_keys(j, {"model", "chain"}, "fit config");
    FitConfig cfg;
    const json& m = j.at("model");
    allow_keys(m, {"kind", "prior", "algo_ids"}, "model");
    cfg.model.kind = kind_from_json(m, "kind", "model", ErrorCode::ConfigError);
    cfg.model.prior = m.contains("prior") ? prior_from_json(m.at("prior"), cfg.model.kind) : default_prior(cfg.model.kind);
    if (m.contains("algo_ids")) cfg.model.pooling = PerAlgo{get<std::vector<std::string>>(m, "algo_ids", "model")};
    cfg.chain = j.contains("chain") ? chain_from_json(j.at("chain")) : ChainConfig::desk();
    return cfg;
}

std::string fit_config_json(const FitConfig& cfg) {
    json m{{"kind", std::string(to_string(cfg.model.kind))}, {"prior", prior_to_json(cfg.model.prior)}};
    if (const auto* per = std::get_if<PerAlgo>(&cfg.model.pooling)) m["algo_ids"] = per->algo_ids;
    return json{{"model", m}, {"chain", chain_to_json(cfg.chain)}}.dump(2);
}

ChainConfig parse_chain_config(std::string_view json_text) {
    return chain_from_json(parse_json(json_text, ErrorCode::ConfigError));
}

std::string chain_config_json(const ChainConfig& config) { return chain_to_json(config).dump(2); }

synth::SynthConfig parse_synth_config(std::string_view json_text) {
    const json j = parse_json(json_text, ErrorCode::ConfigError);
    allow_keys(j, {"kind", "seed", "ranges", "algos"}, "synth");
    synth::SynthConfig c;
    c.kind = kind_from_json(j, "kind", "synth", ErrorCode::ConfigError);
    c.seed = get_or<std::uint64_t>(j, "seed", 0, "synth");
    if (j.contains("ranges")) {
        const json& r = j.at("ranges");
        allow_keys(r, {"x1", "x2", "x3", "x4"}, "synth.ranges");
        auto range = [&](const char* key, synth::LogUniformRange fallback) {
            if (!r.contains(key)) return fallback;
            const auto v = get<std::vector<double>>(r, key, "synth.ranges");
            if (v.size() != 2) throw Error(ErrorCode::ConfigError, std::string("synth.ranges.") + key + " needs [lo, hi]");
            return synth::LogUniformRange{v[0], v[1]};
        };
        c.ranges.x1 = range("x1", c.ranges.x1);
        c.ranges.x2 = range("x2", c.ranges.x2);
        c.ranges.x3 = range("x3", c.ranges.x3);
        c.ranges.x4 = range("x4", c.ranges.x4);
    }
    const json& algos = j.at("algos");
    if (!algos.is_array() || algos.empty()) throw Error(ErrorCode::ConfigError, "synth.algos must be a non-empty list");
    for (const json& a : algos) {
        allow_keys(a, {"algo_id", "n", "truth"}, "synth.algos[]");
        synth::AlgoTruth t;
        t.algo_id = get<std::string>(a, "algo_id", "synth.algos[]");
        t.n = get<std::size_t>(a, "n", "synth.algos[]");
        t.truth = a.contains("truth") ? coefficient_from_json(a.at("truth"), c.kind) : synth::reference_truth(c.kind);
        c.algos.push_back(std::move(t));
    }
    synth::validate(c);
    return c;
}

std::string synth_config_json(const synth::SynthConfig& c) {
    json algos = json::array();
    for (const auto& a : c.algos) algos.push_back({{"algo_id", a.algo_id}, {"n", a.n}, {"truth", coefficient_json(a.truth)}});
    return json{{"kind", std::string(to_string(c.kind))},
                {"seed", c.seed},
                {"ranges",
                 {{"x1", {c.ranges.x1.lo, c.ranges.x1.hi}},
                  {"x2", {c.ranges.x2.lo, c.ranges.x2.hi}},
                  {"x3", {c.ranges.x3.lo, c.ranges.x3.hi}},
                  {"x4", {c.ranges.x4.lo, c.ranges.x4.hi}}}},
                {"algos", algos}}
        .dump(2);
}

RankingWeights parse_weights(std::string_view json_text) {
    const json j = parse_json(json_text, ErrorCode::ConfigError);
    allow_keys(j, {"w_order", "w_stock", "w_r", "w_p", "benchmark_weights"}, "weights");
    RankingWeights w;
    w.relevance.w_order = get_or<double>(j, "w_order", w.relevance.w_order, "weights");
    w.relevance.w_stock = get_or<double>(j, "w_stock", w.relevance.w_stock, "weights");
    w.w_r = get_or<double>(j, "w_r", w.w_r, "weights");
    w.w_p = get_or<double>(j, "w_p", w.w_p, "weights");
    if (j.contains("benchmark_weights")) {
        const json& b = j.at("benchmark_weights");
        allow_keys(b, {"IS", "VWAP", "PWP20", "Rev5m"}, "weights.benchmark_weights");
        for (BenchmarkKind k : kAllKinds) {
            const std::string name(to_string(k));
            w.benchmarks[static_cast<int>(k)] = get_or<double>(b, name.c_str(), 0.0, "weights.benchmark_weights");
        }
    }
    double sum = 0.0;
    for (double v : w.benchmarks) {
        if (!(v >= 0.0)) throw Error(ErrorCode::ConfigError, "benchmark weights must be >= 0");
        sum += v;
    }
    if (!(sum > 0.0)) throw Error(ErrorCode::ConfigError, "benchmark weights must not all be zero");
    const double ws[] = {w.relevance.w_order, w.relevance.w_stock, w.w_r, w.w_p};
    for (double v : ws)
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::ConfigError, "weights must be >= 0");
    return w;
}

std::string weights_json(const RankingWeights& w) {
    json b;
    for (BenchmarkKind k : kAllKinds) b[std::string(to_string(k))] = w.benchmarks[static_cast<int>(k)];
    return json{{"w_order", w.relevance.w_order},
                {"w_stock", w.relevance.w_stock},
                {"w_r", w.w_r},
                {"w_p", w.w_p},
                {"benchmark_weights", b}}
        .dump(2);
}

std::vector<Scenario> parse_scenarios(std::string_view json_text) {
    const json j = parse_json(json_text, ErrorCode::ConfigError);
    if (!j.is_array()) throw Error(ErrorCode::ConfigError, "scenario file must be a JSON list");
    std::vector<Scenario> out;
    for (const json& s : j) {
        allow_keys(s, {"kind", "x1", "x2", "x3", "x4", "algo_id"}, "scenario");
        Scenario sc;
        if (s.contains("kind")) sc.kind = kind_from_json(s, "kind", "scenario", ErrorCode::ConfigError);
        sc.x = {get<double>(s, "x1", "scenario"), get<double>(s, "x2", "scenario"), get<double>(s, "x3", "scenario"),
                get<double>(s, "x4", "scenario")};
        const double v[] = {sc.x.x1, sc.x.x2, sc.x.x3, sc.x.x4};
        for (double c : v)
            if (!(c > 0.0)) throw Error(ErrorCode::ConfigError, "scenario covariates must be positive");
        sc.algo_id = get_or<std::string>(s, "algo_id", "", "scenario");
        out.push_back(std::move(sc));
    }
    return out;
}

// ---- posterior artifacts --------------------------------------------------------------------

void write_posterior_csv(std::ostream& out, const PosteriorSamples& s) {
    out << "chain";
    for (const std::string& n : s.names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < s.rows(); ++r) {
        out << s.chain[r];
        for (double v : s.row(r)) out << ',' << format_double(v);
        out << '\n';
    }
}

std::string posterior_summary_json(const PosteriorSamples& s) {
    json coeffs = json::array();
    for (std::size_t c = 0; c < s.cols(); ++c) {
        json e{{"name", s.names[c]}};
        if (c < s.summary.size()) {
            e["mean"] = s.summary[c].mean;
            e["std"] = s.summary[c].std;
        }
        if (c < s.rhat.size()) e["rhat"] = s.rhat[c];
        if (c < s.ess.size()) e["ess"] = s.ess[c];
        coeffs.push_back(e);
    }
    return json{{"kind", std::string(to_string(s.kind))},
                {"algo_ids", s.algo_ids},
                {"n_chains", s.n_chains},
                {"retained", s.rows()},
                {"acceptance_rate", s.acceptance_rate},
                {"coefficients", coeffs}}
               .dump(2) +
           "\n";
}

PosteriorSamples read_posterior(std::istream& csv, std::string_view summary_json_text) {
    const json j = parse_json(summary_json_text, ErrorCode::DataError);
    PosteriorSamples s;
    try {
        s.kind = parse_kind(j.at("kind").get<std::string>());
        s.algo_ids = j.at("algo_ids").get<std::vector<std::string>>();
        s.n_chains = j.at("n_chains").get<std::size_t>();
        s.acceptance_rate = j.at("acceptance_rate").get<double>();
        for (const json& c : j.at("coefficients")) {
            if (c.contains("rhat")) s.rhat.push_back(c.at("rhat").get<double>());
            if (c.contains("ess")) s.ess.push_back(c.at("ess").get<double>());
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::DataError, std::string("posterior summary: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::DataError, std::string("posterior summary: ") + e.what());
    }

    std::string line;
    if (!std::getline(csv, line)) throw Error(ErrorCode::DataError, "posterior CSV is empty");
    auto header = split_csv(line);
    if (header.empty() || header.front() != "chain") throw Error(ErrorCode::DataError, "posterior CSV must start with 'chain'");
    s.names.assign(header.begin() + 1, header.end());
    const std::vector<std::string> expected =
        s.hierarchical() ? hierarchical_names(s.kind, s.algo_ids) : coefficient_names(s.kind);
    if (s.names != expected) throw Error(ErrorCode::DataError, "posterior CSV columns do not match the summary");

    std::size_t line_no = 1;
    while (std::getline(csv, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size())
            throw Error(ErrorCode::DataError, "posterior CSV line " + std::to_string(line_no) + ": wrong field count");
        s.chain.push_back(parse_int(f[0], "chain"));
        for (std::size_t i = 1; i < f.size(); ++i) s.draws.push_back(parse_number(f[i], "draw"));
    }
    if (s.rhat.size() != s.cols()) s.rhat.clear();
    if (s.ess.size() != s.cols()) s.ess.clear();
    s.summarize();
    return s;
}

// ---- cost and ranking outputs -----------------------------------------------------------------

std::string cost_reports_json(const std::vector<CostReport>& reports, bool include_draws) {
    json out = json::array();
    for (const CostReport& r : reports) {
        json e{{"kind", std::string(to_string(r.kind))},
               {"algo_id", r.scenario.algo_id},
               {"x1", r.scenario.x.x1},
               {"x2", r.scenario.x.x2},
               {"x3", r.scenario.x.x3},
               {"x4", r.scenario.x.x4},
               {"n_draws", r.cost.values.size()},
               {"summary", summary_json(r.cost.summary)},
               {"histogram",
                {{"lo", r.histogram.lo}, {"bin_width", r.histogram.bin_width}, {"counts", r.histogram.counts}}}};
        if (include_draws) e["draws"] = r.cost.values;
        out.push_back(e);
    }
    return json{{"scenarios", out}}.dump(2) + "\n";
}

std::string profiles_json(const std::vector<HistoricalProfile>& profiles) {
    json out = json::array();
    for (const HistoricalProfile& p : profiles) {
        json clusters = json::array();
        for (const Gaussian2& g : p.order_clusters) clusters.push_back(gaussian_json(g));
        out.push_back({{"algo_id", p.algo_id},
                       {"n_observations", p.n_observations},
                       {"order_clusters", clusters},
                       {"stock", gaussian_json(p.stock)}});
    }
    return json{{"profiles", out}}.dump(2) + "\n";
}

std::vector<HistoricalProfile> parse_profiles(std::string_view json_text) {
    const json j = parse_json(json_text, ErrorCode::ConfigError);
    allow_keys(j, {"profiles"}, "profiles file");
    std::vector<HistoricalProfile> out;
    for (const json& p : j.at("profiles")) {
        allow_keys(p, {"algo_id", "n_observations", "order_clusters", "stock"}, "profile");
        HistoricalProfile hp;
        hp.algo_id = get<std::string>(p, "algo_id", "profile");
        hp.n_observations = get<std::size_t>(p, "n_observations", "profile");
        for (const json& c : p.at("order_clusters")) hp.order_clusters.push_back(gaussian_from_json(c));
        if (hp.order_clusters.empty()) throw Error(ErrorCode::ConfigError, "profile needs at least one cluster");
        hp.stock = gaussian_from_json(p.at("stock"));
        out.push_back(std::move(hp));
    }
    return out;
}

std::string scorecards_json(const std::vector<ScoreCard>& cards, const std::string& wheel_choice) {
    json out = json::array();
    for (std::size_t i = 0; i < cards.size(); ++i) {
        const ScoreCard& c = cards[i];
        json z;
        for (BenchmarkKind k : kAllKinds) z[std::string(to_string(k))] = c.bounded_z[static_cast<int>(k)];
        out.push_back({{"rank", i + 1},
                       {"algo_id", c.algo_id},
                       {"n_observations", c.n_observations},
                       {"relevance", c.relevance},
                       {"performance", c.performance},
                       {"total", c.total},
                       {"bounded_z", z},
                       {"included", c.included}});
    }
    json doc{{"scorecards", out}};
    if (!wheel_choice.empty()) doc["algo_wheel_choice"] = wheel_choice;
    return doc.dump(2) + "\n";
}

void write_ranking_csv(std::ostream& out, const std::vector<ScoreCard>& cards) {
    out << "rank,algo_id,included,total,relevance,performance,z_IS,z_VWAP,z_PWP20,z_Rev5m,n_observations\n";
    for (std::size_t i = 0; i < cards.size(); ++i) {
        const ScoreCard& c = cards[i];
        out << i + 1 << ',' << c.algo_id << ',' << (c.included ? 1 : 0) << ',' << format_double(c.total) << ','
            << format_double(c.relevance) << ',' << format_double(c.performance);
        for (double z : c.bounded_z) out << ',' << format_double(z);
        out << ',' << c.n_observations << '\n';
    }
}

// ---- helpers -----------------------------------------------------------------------------------

std::string read_file(const std::string& path, ErrorCode missing) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(missing, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::DataError, "cannot write '" + path + "'");
    out << contents;
    if (!out) throw Error(ErrorCode::DataError, "failed writing '" + path + "'");
}

}  // namespace tca::io
