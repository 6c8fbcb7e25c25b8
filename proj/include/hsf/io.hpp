#pragma once

#include <json.hpp>

#include "hsf/forests.hpp"

namespace hsf {

// JSON adjacency lists with vertex-role tags:
// {"kind": "surface", "l": 1, "vertices": [{"role": "external", "label": 1}, ...],
//  "edges": [[0, 2], ...]}
nlohmann::json to_json(const Tree& t);
nlohmann::json to_json(const Partition& p);
nlohmann::json to_json(const Forest& w);

Tree tree_from_json(const nlohmann::json& j);
Partition partition_from_json(const nlohmann::json& j);
Forest forest_from_json(const nlohmann::json& j);

std::string to_string(Role r);
std::string to_string(TreeKind k);
Role parse_role(const std::string& s);
TreeKind parse_tree_kind(const std::string& s);

}  // namespace hsf
