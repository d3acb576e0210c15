#include "geoalert/json_io.hpp"

#include <ostream>
#include <set>

#include <fmt/format.h>

#include "geoalert/errors.hpp"

namespace geoalert::io {

Json grid_to_json(const ProbabilityGrid& grid) {
    Json j;
    j["rows"] = grid.rows();
    j["cols"] = grid.cols();
    j["weights"] = std::vector<double>(grid.weights().begin(), grid.weights().end());
    return j;
}

ProbabilityGrid grid_from_json(const Json& j) {
    try {
        return ProbabilityGrid(j.at("rows").get<int>(), j.at("cols").get<int>(),
                               j.at("weights").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("bad grid JSON: {}", e.what()));
    }
}

namespace {

Json node_json(const PrefixTree& tree, std::size_t id, const CodingTree* coding) {
    const TreeNode& n = tree.node(id);
    Json j;
    j["code"] = n.code;
    j["weight"] = n.weight;
    if (n.cell_id) j["cellId"] = *n.cell_id;
    if (coding) {
        std::string cw = n.cell_id ? tree.effective_code(id) : n.code;
        cw.resize(static_cast<std::size_t>(coding->symbol_width()), kStar);
        j["codeword"] = cw;
        if (n.is_leaf()) {
            j["leafCount"] = n.cell_id ? 1 : 0;
        } else {
            j["leafCount"] = coding->leaf_count(cw).value_or(0);
        }
    }
    Json kids = Json::array();
    for (std::size_t c : n.children) kids.push_back(node_json(tree, c, coding));
    j["children"] = std::move(kids);
    return j;
}

Json element(const hve::GroupElement& e) { return Json{{"expP", e.exp_p}, {"expQ", e.exp_q}}; }
Json element(const hve::TargetElement& e) { return Json{{"expP", e.exp_p}, {"expQ", e.exp_q}}; }

Json elements(const std::vector<hve::GroupElement>& v) {
    Json a = Json::array();
    for (const auto& e : v) a.push_back(element(e));
    return a;
}

template <class T>
T read_element(const Json& j) {
    return T{j.at("expP").get<std::uint64_t>(), j.at("expQ").get<std::uint64_t>()};
}

std::vector<hve::GroupElement> read_elements(const Json& j) {
    std::vector<hve::GroupElement> out;
    for (const Json& e : j) out.push_back(read_element<hve::GroupElement>(e));
    return out;
}

Json envelope(const hve::GroupParams& params, std::string_view kind) {
    Json j;
    j["insecure_mock"] = true;
    j["kind"] = kind;
    j["params"] = params_to_json(params);
    return j;
}

void check_envelope(const Json& j, std::string_view kind) {
    if (!j.contains("insecure_mock") || j.at("insecure_mock") != true) {
        throw ConfigError("HVE file is not tagged insecure_mock");
    }
    if (j.at("kind").get<std::string>() != kind) {
        throw ConfigError(fmt::format("expected HVE {} file, got {}", kind, j.at("kind").get<std::string>()));
    }
}

template <class F>
auto guarded(std::string_view what, F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("bad {} JSON: {}", what, e.what()));
    }
}

}  // namespace

Json tree_to_json(const PrefixTree& tree) { return node_json(tree, tree.root(), nullptr); }

Json coding_tree_to_json(const PrefixTree& tree, const CodingTree& coding) {
    return node_json(tree, tree.root(), &coding);
}

void write_index_csv(const CellIndexMap& map, std::ostream& out) {
    out << "cell_id,index\n";
    for (std::size_t c = 0; c < map.size(); ++c) out << c << ',' << map.indexes()[c].str() << '\n';
}

Json tokens_to_json(const TokenSet& tokens) {
    Json j;
    j["zone"] = tokens.source_zone.cell_ids;
    Json t = Json::array();
    for (const Pattern& p : tokens.tokens) t.push_back(p.str());
    j["tokens"] = std::move(t);
    j["pairing_cost"] = pairing_cost(tokens);
    return j;
}

Json report_to_json(const OverheadReport& r) {
    Json j;
    j["n"] = r.n;
    j["arity"] = r.arity;
    j["rl"] = r.rl;
    j["fixed_width"] = r.fixed_width;
    j["le"] = r.le;
    j["depth_bound"] = r.depth_bound;
    j["golden_bound"] = r.golden_bound ? Json(*r.golden_bound) : Json(nullptr);
    return j;
}

Json params_to_json(const hve::GroupParams& params) {
    return Json{{"P", params.p}, {"Q", params.q}, {"width", params.width}};
}

hve::GroupParams params_from_json(const Json& j) {
    return guarded("params", [&] {
        hve::GroupParams p{j.at("P").get<std::uint64_t>(), j.at("Q").get<std::uint64_t>(),
                           j.at("width").get<std::size_t>()};
        p.validate();
        return p;
    });
}

Json to_json(const hve::GroupParams& params, const hve::MockKeyPair& kp) {
    Json j = envelope(params, "keypair");
    Json pk;
    pk["gq"] = element(kp.pk.gq);
    pk["V"] = element(kp.pk.V);
    pk["A"] = element(kp.pk.A);
    pk["U"] = elements(kp.pk.U);
    pk["H"] = elements(kp.pk.H);
    pk["W"] = elements(kp.pk.W);
    Json sk;
    sk["gq"] = element(kp.sk.gq);
    sk["a"] = kp.sk.a;
    sk["g"] = element(kp.sk.g);
    sk["v"] = element(kp.sk.v);
    sk["u"] = elements(kp.sk.u);
    sk["h"] = elements(kp.sk.h);
    sk["w"] = elements(kp.sk.w);
    j["public"] = std::move(pk);
    j["secret"] = std::move(sk);
    return j;
}

Json to_json(const hve::GroupParams& params, const hve::MockCiphertext& ct) {
    Json j = envelope(params, "ciphertext");
    j["c_prime"] = element(ct.c_prime);
    j["c0"] = element(ct.c0);
    j["c1"] = elements(ct.c1);
    j["c2"] = elements(ct.c2);
    return j;
}

Json to_json(const hve::GroupParams& params, const hve::MockToken& tk) {
    Json j = envelope(params, "token");
    j["pattern"] = tk.pattern.str();
    j["k0"] = element(tk.k0);
    Json comps = Json::array();
    for (const auto& c : tk.components) {
        comps.push_back(Json{{"position", c.position}, {"k1", element(c.k1)}, {"k2", element(c.k2)}});
    }
    j["components"] = std::move(comps);
    return j;
}

hve::MockKeyPair key_pair_from_json(const Json& j) {
    return guarded("key pair", [&] {
        check_envelope(j, "keypair");
        hve::MockKeyPair kp;
        const Json& pk = j.at("public");
        kp.pk.gq = read_element<hve::GroupElement>(pk.at("gq"));
        kp.pk.V = read_element<hve::GroupElement>(pk.at("V"));
        kp.pk.A = read_element<hve::TargetElement>(pk.at("A"));
        kp.pk.U = read_elements(pk.at("U"));
        kp.pk.H = read_elements(pk.at("H"));
        kp.pk.W = read_elements(pk.at("W"));
        const Json& sk = j.at("secret");
        kp.sk.gq = read_element<hve::GroupElement>(sk.at("gq"));
        kp.sk.a = sk.at("a").get<std::uint64_t>();
        kp.sk.g = read_element<hve::GroupElement>(sk.at("g"));
        kp.sk.v = read_element<hve::GroupElement>(sk.at("v"));
        kp.sk.u = read_elements(sk.at("u"));
        kp.sk.h = read_elements(sk.at("h"));
        kp.sk.w = read_elements(sk.at("w"));
        return kp;
    });
}

hve::MockCiphertext ciphertext_from_json(const Json& j) {
    return guarded("ciphertext", [&] {
        check_envelope(j, "ciphertext");
        hve::MockCiphertext ct;
        ct.c_prime = read_element<hve::TargetElement>(j.at("c_prime"));
        ct.c0 = read_element<hve::GroupElement>(j.at("c0"));
        ct.c1 = read_elements(j.at("c1"));
        ct.c2 = read_elements(j.at("c2"));
        return ct;
    });
}

hve::MockToken token_from_json(const Json& j) {
    return guarded("token", [&] {
        check_envelope(j, "token");
        hve::MockToken tk;
        tk.pattern = Pattern(j.at("pattern").get<std::string>());
        tk.k0 = read_element<hve::GroupElement>(j.at("k0"));
        for (const Json& c : j.at("components")) {
            tk.components.push_back({c.at("position").get<std::size_t>(),
                                     read_element<hve::GroupElement>(c.at("k1")),
                                     read_element<hve::GroupElement>(c.at("k2"))});
        }
        return tk;
    });
}

bench::ExperimentConfig config_from_json(const Json& j) {
    static const std::set<std::string> known = {"rows",   "cols",  "cell_size_m",  "distribution", "methods",
                                                "radii_m", "trials", "workload_mix", "seed",         "validate_trials"};
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
    return guarded("config", [&] {
        bench::ExperimentConfig c;
        c.rows = j.value("rows", c.rows);
        c.cols = j.value("cols", c.cols);
        c.cell_size_m = j.value("cell_size_m", c.cell_size_m);
        c.trials = j.value("trials", c.trials);
        c.seed = j.value("seed", c.seed);
        c.validate_trials = j.value("validate_trials", c.validate_trials);
        if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
        if (j.contains("radii_m")) c.radii_m = j.at("radii_m").get<std::vector<double>>();
        if (j.contains("distribution")) {
            const Json& d = j.at("distribution");
            const std::string type = d.at("type").get<std::string>();
            if (type == "sigmoid") {
                bench::SigmoidDistribution s;
                s.a = d.value("a", s.a);
                s.b = d.value("b", s.b);
                s.seed = d.value("seed", c.seed);
                c.distribution = s;
            } else if (type == "csv") {
                c.distribution = bench::CsvDistribution{d.at("path").get<std::string>()};
            } else {
                throw ConfigError(fmt::format("unknown distribution type '{}'", type));
            }
        } else if (auto* s = std::get_if<bench::SigmoidDistribution>(&c.distribution)) {
            s->seed = c.seed;
        }
        if (j.contains("workload_mix")) {
            const Json& m = j.at("workload_mix");
            if (m.is_string()) {
                c.workload_mix = bench::workload_preset(m.get<std::string>());
            } else {
                std::vector<bench::MixEntry> mix;
                for (const Json& e : m) mix.push_back({e.at("radius_m").get<double>(), e.at("fraction").get<double>()});
                c.workload_mix = std::move(mix);
            }
        }
        c.validate();
        return c;
    });
}

}  // namespace geoalert::io
