// geoalert: probability grids, prefix-code encodings, alert tokens, mock HVE
// and the pairing-cost benchmark from one command line.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "geoalert/analysis.hpp"
#include "geoalert/bench.hpp"
#include "geoalert/coding.hpp"
#include "geoalert/errors.hpp"
#include "geoalert/grid.hpp"
#include "geoalert/json_io.hpp"
#include "geoalert/tokens.hpp"

namespace fs = std::filesystem;
using namespace geoalert;
using io::Json;

namespace {

// Where a command gets its grid from: a CSV, an explicit weight list, a
// uniform 2^bits grid, or (default) the sigmoid generator.
struct GridSource {
    std::string probs;
    std::vector<double> weights;
    int bits = 0;
    int rows = 32;
    int cols = 32;
    double a = 0.99;
    double b = 100.0;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--probs", probs, "probability CSV (row,col,probability)");
        cmd->add_option("--weights", weights, "explicit cell weights, one row")->delimiter(',');
        cmd->add_option("--uniform-bits", bits, "uniform grid of 2^bits cells");
        cmd->add_option("--rows", rows, "sigmoid grid rows")->check(CLI::PositiveNumber);
        cmd->add_option("--cols", cols, "sigmoid grid columns")->check(CLI::PositiveNumber);
        cmd->add_option("--a", a, "sigmoid inflection point");
        cmd->add_option("--b", b, "sigmoid steepness");
    }

    ProbabilityGrid load(std::uint64_t seed) const {
        if (!probs.empty()) {
            CsvLoadResult r = load_probabilities_csv(probs);
            if (r.missing_cells > 0) {
                std::cerr << fmt::format("note: {} cells missing from {}, weight 0\n", r.missing_cells, probs);
            }
            return std::move(r.grid);
        }
        if (!weights.empty()) return ProbabilityGrid::from_weights(weights);
        if (bits > 0) {
            if (bits > 20) throw ParameterError("--uniform-bits must be at most 20");
            return ProbabilityGrid::from_weights(std::vector<double>(std::size_t{1} << bits, 1.0));
        }
        return generate_sigmoid_probabilities(rows, cols, a, b, seed);
    }
};

// Writes to `path`, or stdout when it is empty or "-".
void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError(fmt::format("cannot open '{}' for writing", path));
    out << text;
    if (!out.flush()) throw FileError(fmt::format("write to '{}' failed", path));
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

AlertZone zone_from(const ProbabilityGrid& grid, const std::vector<int>& cells, std::optional<int> origin,
                    double cell_size, double radius, std::uint64_t seed) {
    if (!cells.empty()) return AlertZone::of(cells, grid.size());
    if (origin) return zone_around(grid, *origin, cell_size, radius);
    return sample_alert_zone(grid, cell_size, radius, seed);
}

Json encoding_json(const bench::Encoding& enc) {
    Json j;
    j["method"] = enc.method.name();
    j["arity"] = enc.tree.arity();
    j["rl"] = enc.tree.reference_length();
    j["index_width"] = enc.indexes.width();
    Json cells = Json::array();
    for (std::size_t c = 0; c < enc.indexes.size(); ++c) {
        const auto id = static_cast<int>(c);
        cells.push_back(Json{{"cell_id", id},
                             {"code", enc.tree.effective_code(enc.tree.leaf_of(id))},
                             {"index", enc.indexes.index_of(id).str()}});
    }
    j["cells"] = std::move(cells);
    if (enc.coding) {
        j["parent_leaf_counts"] = enc.coding->parent_leaf_counts();
        Json order = Json::array();
        for (const CodingLeaf& l : enc.coding->leaf_order()) order.push_back(l.codeword);
        j["leaf_order"] = std::move(order);
        j["tree"] = io::coding_tree_to_json(enc.tree, *enc.coding);
    } else {
        j["tree"] = io::tree_to_json(enc.tree);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probability-aware location encodings for HVE alert zones (mock pairing backend)"};
    app.require_subcommand(1);
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "random seed")->capture_default_str();

    // gen-probs
    auto* gen = app.add_subcommand("gen-probs", "sigmoid probability grid -> CSV");
    int gen_rows = 32;
    int gen_cols = 32;
    double gen_a = 0.99;
    double gen_b = 100.0;
    std::string gen_out;
    std::string gen_json;
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--rows", gen_rows)->check(CLI::PositiveNumber);
    gen->add_option("--cols", gen_cols)->check(CLI::PositiveNumber);
    gen->add_option("--a", gen_a, "inflection point");
    gen->add_option("--b", gen_b, "steepness");
    gen->add_option("-o,--out", gen_out, "CSV path (default stdout)");
    gen->add_option("--json", gen_json, "also write grid JSON here");

    // encode
    auto* enc_cmd = app.add_subcommand("encode", "grid -> tree/index JSON");
    GridSource enc_src;
    std::string enc_method = "huffman";
    std::string enc_out;
    std::string enc_csv;
    enc_src.add_options(enc_cmd);
    enc_cmd->add_option("--seed", seed, "random seed");
    enc_cmd->add_option("-m,--method", enc_method, "huffman | balanced | fixed | bary(B)");
    enc_cmd->add_option("-o,--out", enc_out, "JSON path (default stdout)");
    enc_cmd->add_option("--index-csv", enc_csv, "also write cell_id,index CSV here");

    // tokens
    auto* tok_cmd = app.add_subcommand("tokens", "alert zone -> token JSON");
    GridSource tok_src;
    std::string tok_method = "huffman";
    std::vector<int> tok_cells;
    std::optional<int> tok_origin;
    double tok_cell = 10.0;
    double tok_radius = 20.0;
    std::string tok_out;
    tok_src.add_options(tok_cmd);
    tok_cmd->add_option("--seed", seed, "random seed");
    tok_cmd->add_option("-m,--method", tok_method, "huffman | balanced | fixed | fixed-minimized | bary(B)");
    tok_cmd->add_option("--zone", tok_cells, "explicit alert cell ids")->delimiter(',');
    tok_cmd->add_option("--origin", tok_origin, "zone centre cell (default: weighted draw)");
    tok_cmd->add_option("--cell-size", tok_cell, "cell edge in metres")->check(CLI::PositiveNumber);
    tok_cmd->add_option("--radius", tok_radius, "zone radius in metres")->check(CLI::NonNegativeNumber);
    tok_cmd->add_option("-o,--out", tok_out, "JSON path (default stdout)");

    // hve-demo
    auto* demo_cmd = app.add_subcommand("hve-demo", "end-to-end match with pairing counter (insecure mock)");
    GridSource demo_src;
    std::string demo_method = "fixed-minimized";
    std::vector<int> demo_cells;
    std::vector<int> demo_users;
    std::string demo_out;
    std::string demo_dump;
    demo_src.add_options(demo_cmd);
    demo_cmd->add_option("--seed", seed, "random seed");
    demo_cmd->add_option("-m,--method", demo_method, "encoding and minimizer");
    demo_cmd->add_option("--zone", demo_cells, "alert cell ids")->delimiter(',')->required();
    demo_cmd->add_option("--users", demo_users, "user cell ids (default: every cell)")->delimiter(',');
    demo_cmd->add_option("-o,--out", demo_out, "JSON path (default stdout)");
    demo_cmd->add_option("--dump-dir", demo_dump, "write key, ciphertext and token JSON files here");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "pairing-cost experiment -> CSV/JSON");
    std::string bench_config;
    bench::ExperimentConfig cfg;
    double bench_a = 0.99;
    double bench_b = 100.0;
    std::string bench_probs;
    std::string bench_mix;
    std::string bench_out;
    std::string bench_format = "csv";
    bench_cmd->add_option("--seed", seed, "random seed");
    bench_cmd->add_option("-c,--config", bench_config, "JSON experiment config (flags are then ignored)");
    bench_cmd->add_option("--rows", cfg.rows);
    bench_cmd->add_option("--cols", cfg.cols);
    bench_cmd->add_option("--cell-size", cfg.cell_size_m);
    bench_cmd->add_option("--a", bench_a);
    bench_cmd->add_option("--b", bench_b);
    bench_cmd->add_option("--probs", bench_probs, "probability CSV instead of the sigmoid generator");
    bench_cmd->add_option("--methods", cfg.methods)->delimiter(',');
    bench_cmd->add_option("--radii", cfg.radii_m)->delimiter(',');
    bench_cmd->add_option("--trials", cfg.trials);
    bench_cmd->add_option("--workload", bench_mix, "W1..W4");
    bench_cmd->add_option("--validate", cfg.validate_trials, "trials to replay through the mock HVE");
    bench_cmd->add_option("-o,--out", bench_out, "results path (default stdout)");
    bench_cmd->add_option("-f,--format", bench_format)->check(CLI::IsMember({"csv", "json"}));

    // analyze
    auto* an_cmd = app.add_subcommand("analyze", "encoding overhead and bounds report");
    GridSource an_src;
    std::string an_method = "huffman";
    std::string an_out;
    an_src.add_options(an_cmd);
    an_cmd->add_option("--seed", seed, "random seed");
    an_cmd->add_option("-m,--method", an_method, "huffman | balanced | bary(B)");
    an_cmd->add_option("-o,--out", an_out, "JSON path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const ProbabilityGrid grid = generate_sigmoid_probabilities(gen_rows, gen_cols, gen_a, gen_b, seed);
            std::ostringstream csv;
            write_probabilities_csv(grid, csv);
            write_text(gen_out, csv.str());
            if (!gen_json.empty()) write_text(gen_json, dump(io::grid_to_json(grid)));
        } else if (*enc_cmd) {
            const ProbabilityGrid grid = enc_src.load(seed);
            const bench::Encoding enc = bench::encode(grid, bench::MethodSpec::parse(enc_method));
            write_text(enc_out, dump(encoding_json(enc)));
            if (!enc_csv.empty()) {
                std::ostringstream csv;
                io::write_index_csv(enc.indexes, csv);
                write_text(enc_csv, csv.str());
            }
        } else if (*tok_cmd) {
            const ProbabilityGrid grid = tok_src.load(seed);
            const bench::Encoding enc = bench::encode(grid, bench::MethodSpec::parse(tok_method));
            const AlertZone zone = zone_from(grid, tok_cells, tok_origin, tok_cell, tok_radius, seed);
            Json j = io::tokens_to_json(enc.tokens_for(zone));
            j["method"] = enc.method.name();
            write_text(tok_out, dump(j));
        } else if (*demo_cmd) {
            const ProbabilityGrid grid = demo_src.load(seed);
            const bench::Encoding enc = bench::encode(grid, bench::MethodSpec::parse(demo_method));
            const AlertZone zone = AlertZone::of(demo_cells, grid.size());
            if (demo_users.empty()) {
                for (std::size_t c = 0; c < grid.size(); ++c) demo_users.push_back(static_cast<int>(c));
            }
            const bench::DemoReport rep = bench::run_hve_demo(enc, zone, demo_users, seed);
            Json j;
            j["insecure_mock"] = true;
            j["method"] = enc.method.name();
            j["zone"] = zone.cell_ids;
            auto strs = [](const std::vector<Pattern>& ps) {
                std::vector<std::string> out;
                for (const Pattern& p : ps) out.push_back(p.str());
                return out;
            };
            j["minimized_tokens"] = strs(rep.minimized);
            j["unminimized_tokens"] = strs(rep.unminimized);
            j["pairing_sets_minimized"] = rep.sets_minimized;
            j["pairing_sets_unminimized"] = rep.sets_unminimized;
            Json users = Json::array();
            for (const bench::DemoUser& u : rep.users) {
                users.push_back(Json{{"cell_id", u.cell_id},
                                     {"index", u.index.str()},
                                     {"in_zone", u.in_zone},
                                     {"matched_minimized", u.matched_minimized},
                                     {"matched_unminimized", u.matched_unminimized},
                                     {"pairings_minimized", u.pairings_minimized},
                                     {"pairings_unminimized", u.pairings_unminimized}});
            }
            j["users"] = std::move(users);
            write_text(demo_out, dump(j));

            if (!demo_dump.empty()) {
                fs::create_directories(demo_dump);
                const std::size_t width = enc.indexes.width();
                const hve::GroupParams params = hve::GroupParams::mock_default(width);
                const hve::MockScheme scheme(hve::MockPairingGroup(params), width);
                const hve::MockKeyPair kp = scheme.setup(seed);
                write_text((fs::path(demo_dump) / "keypair.json").string(), dump(io::to_json(params, kp)));
                Rng rng(derive_seed(seed, 1));
                const auto msg = scheme.group().random_target(rng);
                for (int u : demo_users) {
                    const auto ct = scheme.encrypt(kp.pk, enc.indexes.index_of(u), msg, derive_seed(seed, 1000 + u));
                    write_text((fs::path(demo_dump) / fmt::format("ct_cell{}.json", u)).string(),
                               dump(io::to_json(params, ct)));
                }
                for (std::size_t t = 0; t < rep.minimized.size(); ++t) {
                    const auto tk = scheme.gen_token(kp.sk, rep.minimized[t], derive_seed(seed, 500'000 + t));
                    write_text((fs::path(demo_dump) / fmt::format("token{}.json", t)).string(),
                               dump(io::to_json(params, tk)));
                }
            }
        } else if (*bench_cmd) {
            bench::ExperimentConfig run;
            if (!bench_config.empty()) {
                std::ifstream in(bench_config);
                if (!in) throw FileError(fmt::format("cannot open config '{}'", bench_config));
                Json j;
                try {
                    j = Json::parse(in);
                } catch (const nlohmann::json::parse_error& e) {
                    throw ConfigError(fmt::format("{}: {}", bench_config, e.what()));
                }
                run = io::config_from_json(j);
            } else {
                run = cfg;
                run.seed = seed;
                if (!bench_probs.empty()) {
                    run.distribution = bench::CsvDistribution{bench_probs};
                } else {
                    run.distribution = bench::SigmoidDistribution{bench_a, bench_b, seed};
                }
                if (!bench_mix.empty()) run.workload_mix = bench::workload_preset(bench_mix);
            }
            const bench::ExperimentResult res = bench::run_experiment(run);
            std::ostringstream out;
            bench::write_results(res, out, bench_format == "json" ? bench::OutputFormat::Json : bench::OutputFormat::Csv);
            write_text(bench_out, out.str());
            std::cerr << fmt::format("{} rows in {:.2f} s\n", res.rows.size(), res.wall_time_s);
        } else if (*an_cmd) {
            const ProbabilityGrid grid = an_src.load(seed);
            const bench::MethodSpec m = bench::MethodSpec::parse(an_method);
            if (m.kind == bench::MethodSpec::Kind::Fixed || m.kind == bench::MethodSpec::Kind::FixedMinimized) {
                throw ConfigError("analyze needs a prefix-tree method");
            }
            const bench::Encoding enc = bench::encode(grid, m);
            Json j = io::report_to_json(overhead_report(enc.tree, grid));
            j["method"] = m.name();
            j["avg_max_ratio"] = bench::code_length_ratio(enc.tree, grid);
            j["average_code_length"] = average_code_length(enc.tree, grid);
            j["entropy"] = entropy(grid, static_cast<double>(enc.tree.arity()));
            j["kraft_sum"] = kraft_sum(enc.tree);
            if (grid.size() >= 2) {
                j["expected_le_estimate"] = expected_le_estimate(grid.size());
                j["expected_le_harmonic"] = expected_le_harmonic_approx(grid.size());
            }
            write_text(an_out, dump(j));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
