#include "geoalert/grid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "geoalert/errors.hpp"

namespace geoalert {

ProbabilityGrid::ProbabilityGrid(int rows, int cols, std::vector<double> weights)
    : rows_(rows), cols_(cols), weights_(std::move(weights)) {
    if (rows_ < 1 || cols_ < 1) {
        throw DimensionError(fmt::format("grid dimensions {}x{} must be positive", rows_, cols_));
    }
    if (weights_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_)) {
        throw DimensionError(fmt::format("{} weights for a {}x{} grid", weights_.size(), rows_, cols_));
    }
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0) {
            throw ParameterError(fmt::format("cell weight {} is not a finite non-negative number", w));
        }
        total_ += w;
    }
    if (!(total_ > 0.0)) {
        throw DegenerateInputError("grid has zero total weight");
    }
}

ProbabilityGrid ProbabilityGrid::from_weights(std::vector<double> weights) {
    if (weights.empty()) {
        throw DimensionError("empty cell list");
    }
    const int n = static_cast<int>(weights.size());
    return ProbabilityGrid(1, n, std::move(weights));
}

double ProbabilityGrid::min_weight() const noexcept {
    return *std::min_element(weights_.begin(), weights_.end());
}

Cell ProbabilityGrid::cell(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= weights_.size()) {
        throw ParameterError(fmt::format("cell id {} out of range", id));
    }
    return Cell{id, id / cols_, id % cols_};
}

AlertZone AlertZone::of(std::vector<int> ids, std::size_t n) {
    if (ids.empty()) {
        throw ParameterError("alert zone is empty");
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.front() < 0 || static_cast<std::size_t>(ids.back()) >= n) {
        throw ParameterError(fmt::format("alert zone cell id out of range [0, {})", n));
    }
    AlertZone z;
    z.cell_ids = std::move(ids);
    return z;
}

bool AlertZone::contains(int id) const {
    return std::binary_search(cell_ids.begin(), cell_ids.end(), id);
}

double sigmoid(double x, double a, double b) { return 1.0 / (1.0 + std::exp(-b * (x - a))); }

ProbabilityGrid generate_sigmoid_probabilities(int rows, int cols, double a, double b,
                                               std::uint64_t seed) {
    if (rows < 1 || cols < 1) {
        throw DimensionError(fmt::format("grid dimensions {}x{} must be positive", rows, cols));
    }
    Rng rng(seed);
    std::vector<double> weights(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (double& w : weights) {
        w = sigmoid(uniform01(rng), a, b);
    }
    return ProbabilityGrid(rows, cols, std::move(weights));
}

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

int parse_int_field(const std::string& field, const char* name, std::size_t line) {
    int value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw ParseError(fmt::format("{} '{}' is not an integer", name, field), line);
    }
    if (value < 0) {
        throw ParseError(fmt::format("{} {} is negative", name, value), line);
    }
    return value;
}

double parse_probability_field(const std::string& field, std::size_t line) {
    // strtod accepts "inf"/"nan"; both are rejected below.
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
        throw ParseError(fmt::format("probability '{}' is not a number", field), line);
    }
    if (!std::isfinite(value) || value < 0.0) {
        throw ParseError(fmt::format("probability {} must be finite and >= 0", field), line);
    }
    return value;
}

}  // namespace

CsvLoadResult parse_probabilities_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("missing header `row,col,probability`", 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
    if (trim(line) != "row,col,probability") {
        throw ParseError("expected header `row,col,probability`", line_no);
    }

    std::map<std::pair<int, int>, double> cells;
    int max_row = -1;
    int max_col = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1) {
            fields.push_back(trim(line.substr(start, pos - start)));
        }
        fields.push_back(trim(line.substr(start)));
        if (fields.size() != 3) {
            throw ParseError(fmt::format("expected 3 fields, found {}", fields.size()), line_no);
        }
        const int row = parse_int_field(fields[0], "row", line_no);
        const int col = parse_int_field(fields[1], "col", line_no);
        const double p = parse_probability_field(fields[2], line_no);
        if (!cells.emplace(std::pair{row, col}, p).second) {
            throw DuplicateError(fmt::format("duplicate cell ({}, {})", row, col), line_no);
        }
        max_row = std::max(max_row, row);
        max_col = std::max(max_col, col);
    }
    if (cells.empty()) {
        throw ParseError("file contains no cells", line_no);
    }

    const int rows = max_row + 1;
    const int cols = max_col + 1;
    std::vector<double> weights(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
    for (const auto& [rc, p] : cells) {
        weights[static_cast<std::size_t>(rc.first) * cols + rc.second] = p;
    }
    const std::size_t missing = weights.size() - cells.size();
    return CsvLoadResult{ProbabilityGrid(rows, cols, std::move(weights)), missing};
}

CsvLoadResult load_probabilities_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FileError("cannot open " + path.string());
    }
    return parse_probabilities_csv(in);
}

void write_probabilities_csv(const ProbabilityGrid& grid, std::ostream& out) {
    out << "row,col,probability\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Cell c = grid.cell(static_cast<int>(i));
        out << fmt::format("{},{},{}\n", c.row, c.col, grid.weights()[i]);
    }
}

ProbabilityGrid normalize(const ProbabilityGrid& grid) {
    std::vector<double> w(grid.weights().begin(), grid.weights().end());
    const double total = grid.total_weight();
    for (double& x : w) x /= total;
    return ProbabilityGrid(grid.rows(), grid.cols(), std::move(w));
}

int draw_weighted_cell(const ProbabilityGrid& grid, Rng& rng) {
    const auto w = grid.weights();
    const double target = uniform01(rng) * grid.total_weight();
    double acc = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) continue;
        acc += w[i];
        last_positive = static_cast<int>(i);
        if (target < acc) return last_positive;
    }
    // Rounding can leave target == acc at the very end.
    return last_positive;
}

AlertZone zone_around(const ProbabilityGrid& grid, int origin, double cell_size_m, double radius_m) {
    if (!(cell_size_m > 0.0)) {
        throw ParameterError("cell size must be positive");
    }
    if (!(radius_m >= 0.0)) {
        throw ParameterError("radius must be non-negative");
    }
    const Cell o = grid.cell(origin);
    const double r_cells = radius_m / cell_size_m;
    // Tolerance keeps exact-boundary neighbours (distance == radius) inside.
    const double limit = r_cells * r_cells * (1.0 + 1e-12) + 1e-12;
    const int reach = static_cast<int>(std::floor(r_cells + 1e-9));
    AlertZone zone;
    for (int r = std::max(0, o.row - reach); r <= std::min(grid.rows() - 1, o.row + reach); ++r) {
        for (int c = std::max(0, o.col - reach); c <= std::min(grid.cols() - 1, o.col + reach); ++c) {
            const double dr = r - o.row;
            const double dc = c - o.col;
            if (dr * dr + dc * dc <= limit) {
                zone.cell_ids.push_back(grid.id_of(r, c));
            }
        }
    }
    zone.origin = origin;
    zone.radius_m = radius_m;
    return zone;
}

AlertZone sample_alert_zone(const ProbabilityGrid& grid, double cell_size_m, double radius_m,
                            std::uint64_t seed) {
    Rng rng(seed);
    const int origin = draw_weighted_cell(grid, rng);
    return zone_around(grid, origin, cell_size_m, radius_m);
}

double poisson_alert_pmf(int k) {
    if (k < 0) {
        throw ParameterError("k must be non-negative");
    }
    double p = std::exp(-1.0);
    for (int i = 2; i <= k; ++i) p /= i;
    return p;
}

std::vector<std::size_t> simulate_alert_counts(const ProbabilityGrid& grid, std::size_t draws,
                                               int max_k, std::uint64_t seed) {
    if (max_k < 0) {
        throw ParameterError("max_k must be non-negative");
    }
    const ProbabilityGrid p = normalize(grid);
    Rng rng(seed);
    std::vector<std::size_t> histogram(static_cast<std::size_t>(max_k) + 1, 0);
    for (std::size_t d = 0; d < draws; ++d) {
        int count = 0;
        for (double pi : p.weights()) {
            if (uniform01(rng) < pi) ++count;
        }
        ++histogram[static_cast<std::size_t>(std::min(count, max_k))];
    }
    return histogram;
}

}  // namespace geoalert
