#pragma once

// JSON group specifications: either a named preset
//   {"preset": "free", "rank": 2}
//   {"preset": "free_abelian", "rank": 2}
//   {"preset": "free_product", "orders": [2, 2, 2]}
// or an explicit system
//   {"alphabet": ["a","A"], "inverses": ["A","a"], "rules": [["lhs","rhs"], ...]}

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphavg/errors.hpp"
#include "sphavg/group.hpp"

namespace sphavg {

inline RewritingSystem group_from_json(const nlohmann::json& spec) {
    if (!spec.is_object()) throw input_error("group spec must be a JSON object");
    if (spec.contains("preset")) {
        std::string preset = spec.at("preset").get<std::string>();
        if (preset == "free") {
            int rank = spec.at("rank").get<int>();
            if (rank < 1) throw input_error("free group rank must be >= 1");
            return make_free_group(rank);
        }
        if (preset == "free_abelian") {
            int rank = spec.at("rank").get<int>();
            if (rank < 1) throw input_error("free abelian rank must be >= 1");
            return make_free_abelian(rank);
        }
        if (preset == "free_product") {
            auto orders = spec.at("orders").get<std::vector<int>>();
            return make_free_product(orders);
        }
        throw input_error("unknown preset: " + preset);
    }

    if (!spec.contains("alphabet") || !spec.contains("inverses"))
        throw input_error("custom group spec needs \"alphabet\" and \"inverses\"");
    auto labels = spec.at("alphabet").get<std::vector<std::string>>();
    auto inverse_labels = spec.at("inverses").get<std::vector<std::string>>();
    if (labels.size() != inverse_labels.size())
        throw input_error("\"alphabet\" and \"inverses\" must have equal length");

    std::vector<symbol_t> inv;
    for (const auto& lbl : inverse_labels) {
        auto it = std::find(labels.begin(), labels.end(), lbl);
        if (it == labels.end()) throw input_error("inverse label not in alphabet: " + lbl);
        inv.push_back(static_cast<symbol_t>(it - labels.begin()));
    }
    GeneratorAlphabet alphabet(labels, inv);

    std::vector<RewriteRule> rules;
    if (spec.contains("rules")) {
        // labels are parsed through a rule-free system over the same alphabet
        RewritingSystem lexer(alphabet, {});
        for (const auto& rule : spec.at("rules")) {
            if (!rule.is_array() || rule.size() != 2)
                throw input_error("each rule must be a [lhs, rhs] pair");
            rules.push_back(RewriteRule{lexer.parse(rule[0].get<std::string>()),
                                        lexer.parse(rule[1].get<std::string>())});
        }
    }
    return RewritingSystem(std::move(alphabet), std::move(rules));
}

inline RewritingSystem group_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open group spec file: " + path);
    nlohmann::json spec;
    try {
        in >> spec;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("invalid JSON in " + path + ": " + e.what());
    }
    return group_from_json(spec);
}

} // namespace sphavg
