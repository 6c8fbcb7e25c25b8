#include "hsf/io.hpp"

#include <stdexcept>

namespace hsf {

using nlohmann::json;

std::string to_string(Role r) {
  switch (r) {
    case Role::External: return "external";
    case Role::Surface: return "surface";
    case Role::Internal: return "internal";
    case Role::Root: return "root";
  }
  return "internal";
}

std::string to_string(TreeKind k) {
  switch (k) {
    case TreeKind::Surface: return "surface";
    case TreeKind::Rooted: return "rooted";
    case TreeKind::Bulk: return "bulk";
  }
  return "surface";
}

Role parse_role(const std::string& s) {
  if (s == "external") return Role::External;
  if (s == "surface") return Role::Surface;
  if (s == "internal") return Role::Internal;
  if (s == "root") return Role::Root;
  throw std::invalid_argument("unknown vertex role: " + s);
}

TreeKind parse_tree_kind(const std::string& s) {
  if (s == "surface") return TreeKind::Surface;
  if (s == "rooted") return TreeKind::Rooted;
  if (s == "bulk") return TreeKind::Bulk;
  throw std::invalid_argument("unknown tree kind: " + s);
}

json to_json(const Tree& t) {
  json v = json::array();
  for (const auto& x : t.vertices) v.push_back({{"role", to_string(x.role)}, {"label", x.label}});
  json e = json::array();
  for (const auto& [a, b] : t.edges) e.push_back({a, b});
  return {{"kind", to_string(t.kind)}, {"l", t.l}, {"vertices", v}, {"edges", e}};
}

json to_json(const Partition& p) { return {{"size", p.ground_size}, {"blocks", p.blocks}}; }

json to_json(const Forest& w) {
  json trees = json::array();
  for (const auto& t : w.trees) trees.push_back(to_json(t));
  return {{"l", w.l}, {"partition", to_json(w.partition)}, {"trees", trees}};
}

Tree tree_from_json(const json& j) {
  Tree t;
  t.kind = parse_tree_kind(j.value("kind", "surface"));
  t.l = j.value("l", 0);
  for (const auto& v : j.at("vertices"))
    t.vertices.push_back({parse_role(v.at("role").get<std::string>()), v.value("label", 0)});
  const int n = static_cast<int>(t.vertices.size());
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("edge must be a pair of vertex indices");
    int a = e[0].get<int>(), b = e[1].get<int>();
    if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("edge index out of range");
    t.edges.emplace_back(a, b);
  }
  return t;
}

Partition partition_from_json(const json& j) {
  Partition p;
  p.blocks = j.at("blocks").get<std::vector<std::vector<int>>>();
  int size = 0;
  for (const auto& b : p.blocks) size += static_cast<int>(b.size());
  p.ground_size = j.value("size", size);
  check_partition(p);
  return p;
}

Forest forest_from_json(const json& j) {
  Forest w;
  w.l = j.value("l", 0);
  w.partition = partition_from_json(j.at("partition"));
  for (const auto& t : j.at("trees")) w.trees.push_back(tree_from_json(t));
  return w;
}

}  // namespace hsf
