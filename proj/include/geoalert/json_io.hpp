#pragma once

#include <iosfwd>

#include "json.hpp"

#include "geoalert/analysis.hpp"
#include "geoalert/bench.hpp"
#include "geoalert/coding.hpp"
#include "geoalert/grid.hpp"
#include "geoalert/hve.hpp"
#include "geoalert/tokens.hpp"

namespace geoalert::io {

using Json = nlohmann::ordered_json;

// {rows, cols, weights} with weights row-major.
Json grid_to_json(const ProbabilityGrid& grid);
ProbabilityGrid grid_from_json(const Json& j);

// Nested {code, weight, cellId?, children}. Dummies carry no cellId.
Json tree_to_json(const PrefixTree& tree);
// Same nesting plus {codeword, leafCount} on every node.
Json coding_tree_to_json(const PrefixTree& tree, const CodingTree& coding);

// Header `cell_id,index`, one row per cell in id order.
void write_index_csv(const CellIndexMap& map, std::ostream& out);

// {zone, tokens, pairing_cost}.
Json tokens_to_json(const TokenSet& tokens);

Json report_to_json(const OverheadReport& report);

// Mock HVE material. Every file carries {"insecure_mock": true, "params": {P, Q, width}}.
Json params_to_json(const hve::GroupParams& params);
hve::GroupParams params_from_json(const Json& j);
Json to_json(const hve::GroupParams& params, const hve::MockKeyPair& kp);
Json to_json(const hve::GroupParams& params, const hve::MockCiphertext& ct);
Json to_json(const hve::GroupParams& params, const hve::MockToken& tk);
hve::MockKeyPair key_pair_from_json(const Json& j);
hve::MockCiphertext ciphertext_from_json(const Json& j);
hve::MockToken token_from_json(const Json& j);

// Experiment config file. Unknown keys are rejected with ConfigError.
bench::ExperimentConfig config_from_json(const Json& j);

}  // namespace geoalert::io
