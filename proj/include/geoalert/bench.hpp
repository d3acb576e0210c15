#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geoalert/coding.hpp"
#include "geoalert/grid.hpp"
#include "geoalert/tokens.hpp"

namespace geoalert::bench {

struct MethodSpec {
    enum class Kind { Huffman, Balanced, Fixed, FixedMinimized, Bary };
    Kind kind = Kind::Huffman;
    int arity = 2;  // Bary only

    // Accepts huffman, balanced, fixed, fixed-minimized, bary(B), baryB, bary:B.
    // Throws ConfigError on anything else.
    static MethodSpec parse(std::string_view name);
    std::string name() const;
    bool operator==(const MethodSpec&) const = default;
};

struct SigmoidDistribution {
    double a = 0.99;
    double b = 100.0;
    std::uint64_t seed = 1;
};

struct CsvDistribution {
    std::filesystem::path path;
};

using Distribution = std::variant<SigmoidDistribution, CsvDistribution>;

struct MixEntry {
    double radius_m = 0.0;
    double fraction = 0.0;
};

inline constexpr double kShortRadiusM = 20.0;
inline constexpr double kLongRadiusM = 300.0;

// W1..W4: 90/75/25/10 percent short-radius zones, the rest long-radius.
std::vector<MixEntry> workload_preset(std::string_view label);
std::string mix_label(std::span<const MixEntry> mix);

struct ExperimentConfig {
    int rows = 32;
    int cols = 32;
    double cell_size_m = 10.0;
    Distribution distribution = SigmoidDistribution{};
    std::vector<std::string> methods = {"huffman", "balanced", "fixed", "fixed-minimized"};
    std::vector<double> radii_m = {10, 20, 50, 100, 200, 300};
    int trials = 200;
    std::optional<std::vector<MixEntry>> workload_mix;
    std::uint64_t seed = 1;
    // Trials (from the first) re-run end-to-end through the mock HVE backend.
    int validate_trials = 0;

    // Throws ConfigError on trials < 1, an unknown method, bad geometry, or a
    // mix whose fractions do not sum to 1 within 1e-9.
    void validate() const;
    std::vector<MethodSpec> method_specs() const;
};

struct ResultRow {
    std::string method;
    std::string radius_label;  // "20", or "20@0.9|300@0.1" for a mix
    double mean_pairing_cost = 0.0;
    double mean_tokens = 0.0;
    double improvement_pct = 0.0;
    int rl = 0;
    double avg_max_ratio = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    double mean_baseline_cost = 0.0;
    std::size_t validated = 0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    double wall_time_s = 0.0;  // informational, never written to result files
};

ProbabilityGrid load_distribution(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config, const ProbabilityGrid& grid);
// Throws ConfigError when the config has no workload mix.
ExperimentResult run_workload_mix(const ExperimentConfig& config);
ExperimentResult run_workload_mix(const ExperimentConfig& config, const ProbabilityGrid& grid);

// average_code_length / RL.
double code_length_ratio(const PrefixTree& tree, const ProbabilityGrid& grid);

enum class OutputFormat { Csv, Json };

void write_results(const ExperimentResult& result, std::ostream& out, OutputFormat format);
// Throws FileError when the file cannot be written.
void emit_results(const ExperimentResult& result, const std::filesystem::path& path, OutputFormat format);

// Encoding of a grid under one method, shared by the experiment and the CLI.
struct Encoding {
    MethodSpec method;
    PrefixTree tree;
    CellIndexMap indexes;
    std::optional<CodingTree> coding;  // prefix-tree methods only

    TokenSet tokens_for(const AlertZone& zone) const;
};

Encoding encode(const ProbabilityGrid& grid, const MethodSpec& method);

struct DemoUser {
    int cell_id = 0;
    Pattern index;
    bool in_zone = false;
    bool matched_minimized = false;
    bool matched_unminimized = false;
    std::uint64_t pairings_minimized = 0;
    std::uint64_t pairings_unminimized = 0;
};

struct DemoReport {
    std::vector<Pattern> minimized;
    std::vector<Pattern> unminimized;
    std::size_t sets_minimized = 0;
    std::size_t sets_unminimized = 0;
    std::vector<DemoUser> users;
};

// Encrypts each user's index, then queries it against every minimized token
// and every per-cell token, counting pairings on the mock backend.
DemoReport run_hve_demo(const Encoding& encoding, const AlertZone& zone, std::span<const int> user_cells,
                        std::uint64_t seed);

}  // namespace geoalert::bench
