#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "geoalert/bench.hpp"
#include "geoalert/errors.hpp"

using namespace geoalert;
using namespace geoalert::bench;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.rows = 8;
    c.cols = 8;
    c.distribution = SigmoidDistribution{0.9, 20, 3};
    c.methods = {"huffman", "fixed", "fixed-minimized", "balanced"};
    c.radii_m = {10, 30};
    c.trials = 12;
    c.seed = 5;
    return c;
}

std::string render(const ExperimentResult& r, OutputFormat f) {
    std::ostringstream out;
    write_results(r, out, f);
    return out.str();
}

}  // namespace

TEST(Methods, ParseAndName) {
    EXPECT_EQ(MethodSpec::parse("huffman").kind, MethodSpec::Kind::Huffman);
    EXPECT_EQ(MethodSpec::parse("fixed-minimized").kind, MethodSpec::Kind::FixedMinimized);
    EXPECT_EQ(MethodSpec::parse("bary(3)"), (MethodSpec{MethodSpec::Kind::Bary, 3}));
    EXPECT_EQ(MethodSpec::parse("bary4").arity, 4);
    EXPECT_EQ(MethodSpec::parse("bary:5").arity, 5);
    EXPECT_EQ(MethodSpec::parse("bary(3)").name(), "bary(3)");
    EXPECT_THROW(MethodSpec::parse("bogus"), ConfigError);
    EXPECT_THROW(MethodSpec::parse("bary(1)"), ConfigError);
    EXPECT_THROW(MethodSpec::parse("bary(x)"), ConfigError);
}

TEST(Config, Validation) {
    ExperimentConfig c = small_config();
    EXPECT_NO_THROW(c.validate());
    c.trials = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.methods.push_back("bogus");
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(run_experiment(c), ConfigError);
    c = small_config();
    c.workload_mix = std::vector<MixEntry>{{20, 0.5}, {300, 0.4}};
    EXPECT_THROW(c.validate(), ConfigError);
    c.workload_mix = std::vector<MixEntry>{{20, 0.5}, {300, 0.5 + 5e-10}};
    EXPECT_NO_THROW(c.validate());
}

TEST(Workloads, Presets) {
    const auto w1 = workload_preset("W1");
    ASSERT_EQ(w1.size(), 2u);
    EXPECT_EQ(w1[0].radius_m, 20.0);
    EXPECT_DOUBLE_EQ(w1[0].fraction, 0.9);
    EXPECT_EQ(w1[1].radius_m, 300.0);
    EXPECT_NEAR(w1[1].fraction, 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(workload_preset("W2")[0].fraction, 0.75);
    EXPECT_DOUBLE_EQ(workload_preset("W3")[0].fraction, 0.25);
    const auto w4 = workload_preset("W4");
    EXPECT_DOUBLE_EQ(w4[0].fraction, 0.1);
    EXPECT_NEAR(w4[1].fraction, 0.9, 1e-15);
    EXPECT_THROW(workload_preset("W5"), ConfigError);
    EXPECT_EQ(mix_label(w1), "20@0.9|300@0.1");
}

TEST(Experiment, ThreeBitExampleCostsTwo) {
    const auto g = ProbabilityGrid::from_weights(std::vector<double>(8, 1.0));
    const Encoding enc = encode(g, MethodSpec::parse("fixed-minimized"));
    const TokenSet ts = enc.tokens_for(AlertZone::of({4, 0}, 8));
    ASSERT_EQ(ts.tokens.size(), 1u);
    EXPECT_EQ(ts.tokens[0].str(), "*00");
    EXPECT_EQ(pairing_cost(ts), 2u);
}

TEST(Experiment, WorkedExampleHuffmanCostsFour) {
    const auto g = ProbabilityGrid::from_weights({0.2, 0.1, 0.5, 0.4, 0.6});
    const Encoding enc = encode(g, MethodSpec::parse("huffman"));
    const AlertZone z = AlertZone::of({0, 2, 4}, 5);
    EXPECT_EQ(pairing_cost(enc.tokens_for(z)), 4u);
    EXPECT_EQ(pairing_cost(per_cell_tokens(z, enc.indexes)), 9u);
}

TEST(Experiment, RowsAndBaselineIdentity) {
    const ExperimentResult r = run_experiment(small_config());
    ASSERT_EQ(r.rows.size(), 8u);
    for (const ResultRow& row : r.rows) {
        if (row.method == "fixed") {
            EXPECT_DOUBLE_EQ(row.improvement_pct, 0.0);
            EXPECT_DOUBLE_EQ(row.mean_pairing_cost, row.mean_baseline_cost);
            // 64 cells: every alert cell costs 6 sets.
            EXPECT_DOUBLE_EQ(row.mean_pairing_cost, 6.0 * row.mean_tokens);
            EXPECT_DOUBLE_EQ(row.avg_max_ratio, 1.0);
        }
        if (row.method == "fixed-minimized") {
            EXPECT_GE(row.improvement_pct, 0.0);
        }
        EXPECT_NEAR(row.improvement_pct,
                    100.0 * (row.mean_baseline_cost - row.mean_pairing_cost) / row.mean_baseline_cost, 1e-9);
        EXPECT_EQ(row.trials, 12);
        EXPECT_EQ(row.seed, 5u);
    }
}

TEST(Experiment, MinimizedNeverWorseThanPerCellOnSameEncoding) {
    const auto g = generate_sigmoid_probabilities(8, 8, 0.9, 20, 4);
    for (const char* m : {"huffman", "balanced", "bary(3)", "fixed-minimized"}) {
        const Encoding enc = encode(g, MethodSpec::parse(m));
        for (std::uint64_t s = 0; s < 30; ++s) {
            const AlertZone z = sample_alert_zone(g, 10, 25, s);
            EXPECT_LE(pairing_cost(enc.tokens_for(z)), pairing_cost(per_cell_tokens(z, enc.indexes))) << m;
        }
    }
}

TEST(Experiment, EndToEndValidationAgrees) {
    ExperimentConfig c = small_config();
    c.methods = {"huffman", "fixed-minimized", "bary(3)", "balanced", "fixed"};
    c.validate_trials = 4;
    ExperimentResult r;
    ASSERT_NO_THROW(r = run_experiment(c));
    for (const ResultRow& row : r.rows) EXPECT_EQ(row.validated, 4u);
}

TEST(Experiment, DeterministicOutput) {
    const ExperimentConfig c = small_config();
    EXPECT_EQ(render(run_experiment(c), OutputFormat::Csv), render(run_experiment(c), OutputFormat::Csv));
    EXPECT_EQ(render(run_experiment(c), OutputFormat::Json), render(run_experiment(c), OutputFormat::Json));
    ExperimentConfig d = c;
    d.seed = 6;
    EXPECT_NE(render(run_experiment(c), OutputFormat::Csv), render(run_experiment(d), OutputFormat::Csv));
}

TEST(Experiment, DegenerateMixMatchesSingleRadius) {
    ExperimentConfig single = small_config();
    single.radii_m = {20};
    ExperimentConfig mix = single;
    mix.workload_mix = std::vector<MixEntry>{{20, 1.0}};
    const auto a = run_experiment(single);
    const auto b = run_workload_mix(mix);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(b.rows[i].radius_label, "20@1");
        EXPECT_DOUBLE_EQ(a.rows[i].mean_pairing_cost, b.rows[i].mean_pairing_cost);
        EXPECT_DOUBLE_EQ(a.rows[i].mean_tokens, b.rows[i].mean_tokens);
    }
    EXPECT_THROW(run_workload_mix(single), ConfigError);
}

TEST(Emit, RowCounts) {
    ExperimentConfig c = small_config();
    c.methods = {"huffman"};
    c.radii_m = {10};
    c.trials = 2;
    const std::string csv = render(run_experiment(c), OutputFormat::Csv);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_TRUE(csv.starts_with("method,radius_m,mean_pairing_cost,mean_tokens,improvement_pct,rl,avg_max_ratio,trials,seed\n"));

    c.methods = {"huffman", "balanced", "fixed", "fixed-minimized"};
    c.radii_m = {10, 20, 30, 40, 50};
    const std::string big = render(run_experiment(c), OutputFormat::Csv);
    EXPECT_EQ(std::count(big.begin(), big.end(), '\n'), 21);
}

TEST(Emit, FilesAreByteReproducible) {
    const auto dir = std::filesystem::temp_directory_path() / "geoalert_emit_test";
    std::filesystem::create_directories(dir);
    const ExperimentConfig c = small_config();
    for (OutputFormat f : {OutputFormat::Csv, OutputFormat::Json}) {
        emit_results(run_experiment(c), dir / "a.out", f);
        emit_results(run_experiment(c), dir / "b.out", f);
        std::ifstream a(dir / "a.out", std::ios::binary);
        std::ifstream b(dir / "b.out", std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        EXPECT_FALSE(sa.str().empty());
        EXPECT_EQ(sa.str(), sb.str());
    }
    EXPECT_THROW(emit_results(run_experiment(c), "/nonexistent/dir/out.csv", OutputFormat::Csv), FileError);
    std::filesystem::remove_all(dir);
}

TEST(CodeLengthRatio, Examples) {
    const auto g = ProbabilityGrid::from_weights({0.2, 0.1, 0.5, 0.4, 0.6});
    EXPECT_NEAR(code_length_ratio(build_huffman_tree(g), g), 13.0 / 18.0, 1e-12);
    EXPECT_DOUBLE_EQ(code_length_ratio(build_fixed_length(ProbabilityGrid::from_weights(std::vector<double>(8, 1))).first,
                                       ProbabilityGrid::from_weights(std::vector<double>(8, 1))),
                     1.0);
}

TEST(CodeLengthRatio, FallsAsSkewGrows) {
    // Averaged over seeds to smooth single-grid noise.
    auto mean_ratio = [](double a) {
        double s = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto g = generate_sigmoid_probabilities(32, 32, a, 20, seed);
            s += code_length_ratio(build_huffman_tree(g), g);
        }
        return s / 5;
    };
    const double r80 = mean_ratio(0.80);
    const double r90 = mean_ratio(0.90);
    const double r99 = mean_ratio(0.99);
    EXPECT_GT(r80, r90);
    EXPECT_GT(r90, r99);
    EXPECT_GT(r99, 0.0);
    EXPECT_LE(r80, 1.0);
}

TEST(HveDemo, PairingCounts) {
    const auto g = ProbabilityGrid::from_weights(std::vector<double>(8, 1.0));
    const Encoding enc = encode(g, MethodSpec::parse("fixed-minimized"));
    const std::vector<int> users{0, 4, 6, 1};
    const DemoReport rep = run_hve_demo(enc, AlertZone::of({4, 0}, 8), users, 9);
    EXPECT_EQ(rep.sets_minimized, 2u);
    EXPECT_EQ(rep.sets_unminimized, 6u);
    ASSERT_EQ(rep.users.size(), 4u);
    for (const DemoUser& u : rep.users) {
        EXPECT_EQ(u.pairings_minimized, 5u);
        EXPECT_EQ(u.pairings_unminimized, 14u);
        EXPECT_EQ(u.matched_minimized, u.in_zone);
        EXPECT_EQ(u.matched_unminimized, u.in_zone);
    }
    EXPECT_TRUE(rep.users[0].in_zone);
    EXPECT_FALSE(rep.users[2].in_zone);  // index 110, outside the zone
}
