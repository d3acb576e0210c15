#include "geoalert/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "geoalert/errors.hpp"
#include "geoalert/hve.hpp"
#include "json.hpp"

namespace geoalert::bench {

MethodSpec MethodSpec::parse(std::string_view name) {
    if (name == "huffman") return {Kind::Huffman, 2};
    if (name == "balanced") return {Kind::Balanced, 2};
    if (name == "fixed") return {Kind::Fixed, 2};
    if (name == "fixed-minimized") return {Kind::FixedMinimized, 2};
    if (name.starts_with("bary")) {
        std::string_view rest = name.substr(4);
        if (rest.starts_with("(") && rest.ends_with(")")) {
            rest = rest.substr(1, rest.size() - 2);
        } else if (rest.starts_with(":")) {
            rest.remove_prefix(1);
        }
        int b = 0;
        bool ok = !rest.empty() && rest.size() <= 2;
        for (char c : rest) {
            if (c < '0' || c > '9') ok = false;
            b = b * 10 + (c - '0');
        }
        if (ok && b >= 2 && b <= kMaxArity) return {Kind::Bary, b};
        throw ConfigError(fmt::format("bad arity in method '{}' (expected 2..{})", name, kMaxArity));
    }
    throw ConfigError(fmt::format("unknown method '{}'", name));
}

std::string MethodSpec::name() const {
    switch (kind) {
        case Kind::Huffman: return "huffman";
        case Kind::Balanced: return "balanced";
        case Kind::Fixed: return "fixed";
        case Kind::FixedMinimized: return "fixed-minimized";
        case Kind::Bary: return fmt::format("bary({})", arity);
    }
    return {};
}

std::vector<MixEntry> workload_preset(std::string_view label) {
    // Shares spelled out so labels print as 0.1, not 1 - 0.9.
    static const std::map<std::string_view, std::pair<double, double>> presets{
        {"W1", {0.9, 0.1}}, {"W2", {0.75, 0.25}}, {"W3", {0.25, 0.75}}, {"W4", {0.1, 0.9}}};
    const auto it = presets.find(label);
    if (it == presets.end()) throw ConfigError(fmt::format("unknown workload '{}' (expected W1..W4)", label));
    return {{kShortRadiusM, it->second.first}, {kLongRadiusM, it->second.second}};
}

std::string mix_label(std::span<const MixEntry> mix) {
    std::string out;
    for (const MixEntry& e : mix) {
        if (!out.empty()) out += '|';
        out += fmt::format("{}@{}", e.radius_m, e.fraction);
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError(fmt::format("trials must be >= 1, got {}", trials));
    if (rows < 1 || cols < 1) throw ConfigError("grid needs at least one row and one column");
    if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) throw ConfigError("cell size must be positive");
    if (methods.empty()) throw ConfigError("no methods selected");
    (void)method_specs();
    if (validate_trials < 0) throw ConfigError("validate_trials must be >= 0");
    for (double r : radii_m) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError(fmt::format("bad radius {}", r));
    }
    if (workload_mix) {
        if (workload_mix->empty()) throw ConfigError("empty workload mix");
        double sum = 0.0;
        for (const MixEntry& e : *workload_mix) {
            if (!(e.radius_m >= 0.0) || !(e.fraction >= 0.0)) {
                throw ConfigError("workload mix entries need radius >= 0 and fraction >= 0");
            }
            sum += e.fraction;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ConfigError(fmt::format("workload fractions sum to {}, not 1", sum));
        }
    } else if (radii_m.empty()) {
        throw ConfigError("no radii and no workload mix");
    }
}

std::vector<MethodSpec> ExperimentConfig::method_specs() const {
    std::vector<MethodSpec> out;
    for (const std::string& m : methods) out.push_back(MethodSpec::parse(m));
    return out;
}

ProbabilityGrid load_distribution(const ExperimentConfig& config) {
    if (const auto* s = std::get_if<SigmoidDistribution>(&config.distribution)) {
        return generate_sigmoid_probabilities(config.rows, config.cols, s->a, s->b, s->seed);
    }
    return load_probabilities_csv(std::get<CsvDistribution>(config.distribution).path).grid;
}

double code_length_ratio(const PrefixTree& tree, const ProbabilityGrid& grid) {
    return average_code_length(tree, grid) / tree.reference_length();
}

TokenSet Encoding::tokens_for(const AlertZone& zone) const {
    switch (method.kind) {
        case MethodSpec::Kind::Fixed: return per_cell_tokens(zone, indexes);
        case MethodSpec::Kind::FixedMinimized: return fixed_length_minimize(zone, indexes);
        default: return minimize_tokens(zone, indexes, *coding);
    }
}

Encoding encode(const ProbabilityGrid& grid, const MethodSpec& method) {
    switch (method.kind) {
        case MethodSpec::Kind::Fixed:
        case MethodSpec::Kind::FixedMinimized: {
            auto [tree, map] = build_fixed_length(grid);
            return Encoding{method, std::move(tree), std::move(map), std::nullopt};
        }
        default: break;
    }
    PrefixTree tree = method.kind == MethodSpec::Kind::Huffman    ? build_huffman_tree(grid)
                      : method.kind == MethodSpec::Kind::Balanced ? build_balanced_tree(grid)
                                                                  : build_bary_huffman_tree(grid, method.arity);
    CellIndexMap map = make_cell_indexes(tree);
    CodingTree coding = make_coding_tree(tree);
    return Encoding{method, std::move(tree), std::move(map), std::move(coding)};
}

namespace {

// Streams for derive_seed, kept apart so adding a stream never shifts another.
constexpr std::uint64_t kZoneStream = 1;
constexpr std::uint64_t kMixStream = 2;
constexpr std::uint64_t kHveStream = 3;

struct Accumulator {
    double cost = 0.0;
    double tokens = 0.0;
    double baseline = 0.0;
    std::size_t validated = 0;
};

// One ciphertext for a random cell, queried against every token. Throws if
// the pairing counter or the match outcome disagrees with the symbolic view.
void validate_end_to_end(const Encoding& enc, const TokenSet& tokens, std::size_t n, std::uint64_t seed) {
    const std::size_t width = enc.indexes.width();
    hve::MockPairingGroup group(hve::GroupParams::mock_default(width));
    hve::MockScheme scheme(group, width);
    const hve::MockKeyPair kp = scheme.setup(derive_seed(seed, 0));
    Rng rng(derive_seed(seed, 1));
    const int user = static_cast<int>(uniform_below(rng, n));
    hve::MockMessageDomain domain;
    const auto msg = group.random_target(rng);
    domain.add(msg);
    const Pattern& index = enc.indexes.index_of(user);
    const auto ct = scheme.encrypt(kp.pk, index, msg, derive_seed(seed, 2));

    const std::uint64_t before = group.pairing_count();
    bool any = false;
    for (std::size_t t = 0; t < tokens.tokens.size(); ++t) {
        const auto tk = scheme.gen_token(kp.sk, tokens.tokens[t], derive_seed(seed, 3 + t));
        const bool hit = scheme.query(ct, tk, domain).has_value();
        if (hit != token_matches(tokens.tokens[t], index)) {
            throw Error(fmt::format("HVE query disagrees with token_matches for token {} and index {}",
                                    tokens.tokens[t].str(), index.str()));
        }
        any = any || hit;
    }
    const std::uint64_t delta = group.pairing_count() - before;
    const std::uint64_t expected = 2 * pairing_cost(tokens) + tokens.tokens.size();
    if (delta != expected) {
        throw Error(fmt::format("pairing counter moved by {}, expected {}", delta, expected));
    }
    if (any != tokens.source_zone.contains(user)) {
        throw Error(fmt::format("cell {} alert status differs between HVE and the zone", user));
    }
}

struct Prepared {
    Encoding encoding;
    int rl = 0;
    double ratio = 0.0;
};

std::vector<Prepared> prepare(const ExperimentConfig& config, const ProbabilityGrid& grid) {
    std::vector<Prepared> out;
    for (const MethodSpec& m : config.method_specs()) {
        Encoding enc = encode(grid, m);
        const int rl = enc.tree.reference_length();
        const double ratio = code_length_ratio(enc.tree, grid);
        out.push_back({std::move(enc), rl, ratio});
    }
    return out;
}

// Runs `trials` zones whose radius comes from `radius_of(trial)`.
template <class RadiusOf>
std::vector<Accumulator> run_trials(const ExperimentConfig& config, const ProbabilityGrid& grid,
                                    const std::vector<Prepared>& methods, std::uint64_t point_seed,
                                    RadiusOf radius_of) {
    const std::size_t n = grid.size();
    const std::size_t baseline_width = n <= 1 ? 1 : static_cast<std::size_t>(std::bit_width(n - 1));
    std::vector<Accumulator> acc(methods.size());
    for (int trial = 0; trial < config.trials; ++trial) {
        const auto t = static_cast<std::uint64_t>(trial);
        const double radius = radius_of(t);
        const AlertZone zone =
            sample_alert_zone(grid, config.cell_size_m, radius, derive_seed(derive_seed(point_seed, kZoneStream), t));
        const double baseline = static_cast<double>(zone.cell_ids.size() * baseline_width);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const TokenSet tokens = methods[m].encoding.tokens_for(zone);
            acc[m].cost += static_cast<double>(pairing_cost(tokens));
            acc[m].tokens += static_cast<double>(tokens.tokens.size());
            acc[m].baseline += baseline;
            if (trial < config.validate_trials) {
                validate_end_to_end(methods[m].encoding, tokens, n,
                                    derive_seed(derive_seed(point_seed, kHveStream), t * methods.size() + m));
                ++acc[m].validated;
            }
        }
    }
    return acc;
}

void append_rows(ExperimentResult& result, const ExperimentConfig& config, const std::vector<Prepared>& methods,
                 const std::vector<Accumulator>& acc, const std::string& label) {
    const double trials = config.trials;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        ResultRow row;
        row.method = methods[m].encoding.method.name();
        row.radius_label = label;
        row.mean_pairing_cost = acc[m].cost / trials;
        row.mean_tokens = acc[m].tokens / trials;
        row.mean_baseline_cost = acc[m].baseline / trials;
        row.improvement_pct = acc[m].baseline > 0.0 ? 100.0 * (acc[m].baseline - acc[m].cost) / acc[m].baseline : 0.0;
        row.rl = methods[m].rl;
        row.avg_max_ratio = methods[m].ratio;
        row.trials = config.trials;
        row.seed = config.seed;
        row.validated = acc[m].validated;
        result.rows.push_back(std::move(row));
    }
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    return run_experiment(config, load_distribution(config));
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ProbabilityGrid& grid) {
    config.validate();
    if (config.workload_mix) return run_workload_mix(config, grid);
    const auto start = std::chrono::steady_clock::now();
    const std::vector<Prepared> methods = prepare(config, grid);
    ExperimentResult result;
    for (std::size_t r = 0; r < config.radii_m.size(); ++r) {
        const double radius = config.radii_m[r];
        const auto acc =
            run_trials(config, grid, methods, derive_seed(config.seed, r), [radius](std::uint64_t) { return radius; });
        append_rows(result, config, methods, acc, fmt::format("{}", radius));
    }
    result.wall_time_s = elapsed_since(start);
    return result;
}

ExperimentResult run_workload_mix(const ExperimentConfig& config) {
    config.validate();
    return run_workload_mix(config, load_distribution(config));
}

ExperimentResult run_workload_mix(const ExperimentConfig& config, const ProbabilityGrid& grid) {
    config.validate();
    if (!config.workload_mix) throw ConfigError("config has no workload mix");
    const auto start = std::chrono::steady_clock::now();
    const std::vector<MixEntry>& mix = *config.workload_mix;
    const std::vector<Prepared> methods = prepare(config, grid);
    const std::uint64_t mix_seed = derive_seed(config.seed, kMixStream);
    auto radius_of = [&](std::uint64_t trial) {
        Rng rng(derive_seed(mix_seed, trial));
        const double u = uniform01(rng);
        double acc = 0.0;
        for (const MixEntry& e : mix) {
            acc += e.fraction;
            if (u < acc) return e.radius_m;
        }
        return mix.back().radius_m;
    };
    ExperimentResult result;
    const auto acc = run_trials(config, grid, methods, derive_seed(config.seed, 0), radius_of);
    append_rows(result, config, methods, acc, mix_label(mix));
    result.wall_time_s = elapsed_since(start);
    return result;
}

void write_results(const ExperimentResult& result, std::ostream& out, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        out << "method,radius_m,mean_pairing_cost,mean_tokens,improvement_pct,rl,avg_max_ratio,trials,seed\n";
        for (const ResultRow& r : result.rows) {
            out << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{},{:.6f},{},{}\n", r.method, r.radius_label,
                               r.mean_pairing_cost, r.mean_tokens, r.improvement_pct, r.rl, r.avg_max_ratio, r.trials,
                               r.seed);
        }
        return;
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const ResultRow& r : result.rows) {
        nlohmann::ordered_json j;
        j["method"] = r.method;
        j["radius_m"] = r.radius_label;
        j["mean_pairing_cost"] = r.mean_pairing_cost;
        j["mean_tokens"] = r.mean_tokens;
        j["improvement_pct"] = r.improvement_pct;
        j["rl"] = r.rl;
        j["avg_max_ratio"] = r.avg_max_ratio;
        j["trials"] = r.trials;
        j["seed"] = r.seed;
        rows.push_back(std::move(j));
    }
    out << nlohmann::ordered_json{{"results", rows}}.dump(2) << '\n';
}

void emit_results(const ExperimentResult& result, const std::filesystem::path& path, OutputFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError(fmt::format("cannot open '{}' for writing", path.string()));
    write_results(result, out, format);
    out.flush();
    if (!out) throw FileError(fmt::format("write to '{}' failed", path.string()));
}

DemoReport run_hve_demo(const Encoding& encoding, const AlertZone& zone, std::span<const int> user_cells,
                        std::uint64_t seed) {
    DemoReport report;
    const TokenSet minimized = encoding.tokens_for(zone);
    const TokenSet unminimized = per_cell_tokens(zone, encoding.indexes);
    report.minimized = minimized.tokens;
    report.unminimized = unminimized.tokens;
    report.sets_minimized = pairing_cost(minimized);
    report.sets_unminimized = pairing_cost(unminimized);

    const std::size_t width = encoding.indexes.width();
    hve::MockPairingGroup group(hve::GroupParams::mock_default(width));
    hve::MockScheme scheme(group, width);
    const hve::MockKeyPair kp = scheme.setup(derive_seed(seed, 0));
    Rng rng(derive_seed(seed, 1));
    const auto alert = group.random_target(rng);
    hve::MockMessageDomain domain;
    domain.add(alert);

    std::vector<hve::MockToken> min_tokens;
    std::vector<hve::MockToken> cell_tokens;
    std::uint64_t stream = 100;
    for (const Pattern& p : minimized.tokens) min_tokens.push_back(scheme.gen_token(kp.sk, p, derive_seed(seed, stream++)));
    for (const Pattern& p : unminimized.tokens) cell_tokens.push_back(scheme.gen_token(kp.sk, p, derive_seed(seed, stream++)));

    for (std::size_t u = 0; u < user_cells.size(); ++u) {
        DemoUser user;
        user.cell_id = user_cells[u];
        user.index = encoding.indexes.index_of(user.cell_id);
        user.in_zone = zone.contains(user.cell_id);
        const auto ct = scheme.encrypt(kp.pk, user.index, alert, derive_seed(seed, 10'000 + u));

        group.reset_pairing_count();
        for (const auto& tk : min_tokens) user.matched_minimized = scheme.query(ct, tk, domain).has_value() || user.matched_minimized;
        user.pairings_minimized = group.pairing_count();

        group.reset_pairing_count();
        for (const auto& tk : cell_tokens) user.matched_unminimized = scheme.query(ct, tk, domain).has_value() || user.matched_unminimized;
        user.pairings_unminimized = group.pairing_count();
        report.users.push_back(std::move(user));
    }
    return report;
}

}  // namespace geoalert::bench
