#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hsf {

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Role : std::uint8_t { External, Surface, Internal, Root };
enum class TreeKind : std::uint8_t { Surface, Rooted, Bulk };

struct Vertex {
  Role role = Role::Internal;
  int label = 0;  // external label y_i; 0 for the surface vertex and anonymous internals
};

// A surface tree, rooted tree or bulk tree. The loop budget l is metadata.
struct Tree {
  TreeKind kind = TreeKind::Surface;
  int l = 0;
  std::vector<Vertex> vertices;
  std::vector<std::pair<int, int>> edges;

  std::vector<int> degrees() const;
  int internal_count() const;
  int v2() const;
  int external_count() const;
  std::vector<int> external_labels() const;  // sorted
  int find_external(int label) const;        // vertex index or -1
  int find_role(Role r) const;               // first vertex with role r or -1
  // s used in the v2 bound: externals, plus the root for rooted trees
  int s_param() const;
};

using SurfaceTree = Tree;
using RootedTree = Tree;
using BulkTree = Tree;

struct Partition {
  int ground_size = 0;
  std::vector<std::vector<int>> blocks;  // sorted blocks, ordered by first element
};

bool operator==(const Partition& a, const Partition& b);
Partition canonical(Partition p);
void check_partition(const Partition& p);

struct Forest {
  Partition partition;
  std::vector<Tree> trees;  // trees[i] carries exactly the labels of partition.blocks[i]
  int l = 0;
};

struct Validation {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

// Largest v2 allowed: floor(3l - 2 + s/2) for l >= 1, else 0. Negative means none.
int v2_bound(int s, int l);

Validation validate(const Tree& t);
Validation validate(const Forest& w);

std::string canonical_code(const Tree& t);

std::vector<Partition> enumerate_partitions(int s);
// Removes s+1 and s+2 from P over sigma_{s+2}.
Partition reduce_partition(const Partition& p);
// Removes labels a, b and relabels the rest to 1..s preserving order.
Partition reduce_partition(const Partition& p, int a, int b);

std::vector<Tree> enumerate_surface_trees(const std::vector<int>& labels, int l, int max_internal);
std::vector<Tree> enumerate_surface_trees(int s, int l, int max_internal);
std::vector<Tree> enumerate_bulk_trees(const std::vector<int>& labels, int l, int max_internal);
// Root stands for z_1; labels are the remaining externals y_2..y_s.
std::vector<Tree> enumerate_rooted_trees(const std::vector<int>& labels, int l, int max_internal);
std::vector<Forest> enumerate_forests(const Partition& p, int l, int max_internal);
std::vector<Forest> enumerate_all_forests(int s, int l, int max_internal);

struct ReduceResult {
  Forest forest;
  bool tree_deleted = false;  // a tree carrying exactly the two cut legs was removed
};

ReduceResult reduce_forest(const Forest& w, int a, int b);

enum class MergeMode { A, B };

// Joins the bulk tree at external label x to the forest at external label y.
// Labels of the two inputs must be disjoint apart from the roles of x and y.
Forest merge(MergeMode mode, const Tree& bulk, int x, const Forest& w, int y);

// Hand-built shapes.
Tree chain_tree(int label, int internal, int l);            // y - z_1 - ... - z_k - 0
Tree bulk_chain(int a, int b, int internal, int l);         // y_a - z ... z - y_b
Tree star_tree(const std::vector<int>& labels, int l);      // one internal vertex joined to all and 0
// Degree-3 centre with v1, v2, v0 degree-2 vertices on the arms to y_1, y_2, 0.
Tree three_arm_tree(int v1, int v2, int v0, int l);

}  // namespace hsf
