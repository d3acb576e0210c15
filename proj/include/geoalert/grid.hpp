#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "geoalert/random.hpp"

namespace geoalert {

struct Cell {
    int id = 0;
    int row = 0;
    int col = 0;
};

// Partitioned map with a non-negative alert weight per cell. Cell ids are
// row-major. Weights are raw likelihoods and need not sum to one.
class ProbabilityGrid {
public:
    // Throws DimensionError on a size mismatch or empty grid, ParameterError on
    // a negative/non-finite weight, DegenerateInputError if every weight is 0.
    ProbabilityGrid(int rows, int cols, std::vector<double> weights);

    // Free-form cell list laid out as a single row.
    static ProbabilityGrid from_weights(std::vector<double> weights);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return weights_.size(); }

    std::span<const double> weights() const noexcept { return weights_; }
    double weight(int id) const { return weights_.at(static_cast<std::size_t>(id)); }
    double total_weight() const noexcept { return total_; }
    double min_weight() const noexcept;

    Cell cell(int id) const;
    int id_of(int row, int col) const { return row * cols_ + col; }

private:
    int rows_;
    int cols_;
    std::vector<double> weights_;
    double total_ = 0.0;
};

struct AlertZone {
    std::vector<int> cell_ids;  // sorted, unique
    std::optional<int> origin;
    std::optional<double> radius_m;

    // Sorts and deduplicates `ids`; throws ParameterError if empty or out of [0, n).
    static AlertZone of(std::vector<int> ids, std::size_t n);
    bool contains(int id) const;
};

double sigmoid(double x, double a, double b);

// One uniform draw x per cell (row-major), weight = 1/(1+exp(-b(x-a))).
ProbabilityGrid generate_sigmoid_probabilities(int rows, int cols, double a, double b,
                                               std::uint64_t seed);

struct CsvLoadResult {
    ProbabilityGrid grid;
    std::size_t missing_cells = 0;  // cells absent from the file, given weight 0
};

// Format: header `row,col,probability`, one cell per line. Grid extent is
// (max row + 1) x (max col + 1).
CsvLoadResult parse_probabilities_csv(std::istream& in);
CsvLoadResult load_probabilities_csv(const std::filesystem::path& path);
void write_probabilities_csv(const ProbabilityGrid& grid, std::ostream& out);

ProbabilityGrid normalize(const ProbabilityGrid& grid);

// Cell drawn with probability proportional to its weight.
int draw_weighted_cell(const ProbabilityGrid& grid, Rng& rng);

// All cells whose centre lies within `radius_m` of the origin cell's centre.
AlertZone zone_around(const ProbabilityGrid& grid, int origin, double cell_size_m, double radius_m);

AlertZone sample_alert_zone(const ProbabilityGrid& grid, double cell_size_m, double radius_m,
                            std::uint64_t seed);

// p(Y = k) = e^-1 / k! for the number of alerted cells.
double poisson_alert_pmf(int k);

// Monte-Carlo alert counts: each draw alerts cell i independently with
// probability p_i of the normalized grid. Returns histogram[k] = #draws with k
// alerted cells (length max_k + 1, the last bucket absorbs larger counts).
std::vector<std::size_t> simulate_alert_counts(const ProbabilityGrid& grid, std::size_t draws,
                                               int max_k, std::uint64_t seed);

}  // namespace geoalert
