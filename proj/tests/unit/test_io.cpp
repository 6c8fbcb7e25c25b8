#include <doctest.h>

#include "hsf/io.hpp"

using namespace hsf;

TEST_SUITE("io") {

TEST_CASE("tree JSON round trip keeps the canonical code") {
  for (const auto& t : enumerate_surface_trees(2, 1, 4)) {
    auto j = to_json(t);
    Tree back = tree_from_json(nlohmann::json::parse(j.dump()));
    CHECK(canonical_code(back) == canonical_code(t));
    CHECK(back.l == t.l);
    CHECK(back.kind == t.kind);
  }
}

TEST_CASE("forest JSON round trip") {
  for (const auto& w : enumerate_all_forests(3, 1, 4)) {
    Forest back = forest_from_json(to_json(w));
    CHECK(back.partition == w.partition);
    REQUIRE(back.trees.size() == w.trees.size());
    for (std::size_t i = 0; i < w.trees.size(); ++i)
      CHECK(canonical_code(back.trees[i]) == canonical_code(w.trees[i]));
    CHECK(validate(back).ok);
  }
}

TEST_CASE("role tags") {
  auto j = to_json(chain_tree(1, 1, 1));
  CHECK(j["kind"] == "surface");
  CHECK(j["vertices"][0]["role"] == "external");
  for (Role r : {Role::External, Role::Surface, Role::Internal, Role::Root}) CHECK(parse_role(to_string(r)) == r);
  for (TreeKind k : {TreeKind::Surface, TreeKind::Rooted, TreeKind::Bulk})
    CHECK(parse_tree_kind(to_string(k)) == k);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS(parse_role("leaf"));
  CHECK_THROWS(tree_from_json(nlohmann::json{{"kind", "surface"}}));
  auto bad = to_json(Partition{3, {{1, 2}, {2, 3}}});
  CHECK_THROWS_AS(partition_from_json(bad), InvariantError);
}

}  // TEST_SUITE
