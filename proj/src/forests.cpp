#include "hsf/forests.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace hsf {

// ---- Tree queries ----------------------------------------------------------

std::vector<int> Tree::degrees() const {
  std::vector<int> d(vertices.size(), 0);
  for (auto [a, b] : edges) {
    ++d[a];
    ++d[b];
  }
  return d;
}

int Tree::internal_count() const {
  return static_cast<int>(std::count_if(vertices.begin(), vertices.end(),
                                        [](const Vertex& v) { return v.role == Role::Internal; }));
}

int Tree::v2() const {
  auto d = degrees();
  int n = 0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].role == Role::Internal && d[i] == 2) ++n;
  return n;
}

int Tree::external_count() const {
  return static_cast<int>(std::count_if(vertices.begin(), vertices.end(),
                                        [](const Vertex& v) { return v.role == Role::External; }));
}

std::vector<int> Tree::external_labels() const {
  std::vector<int> out;
  for (const auto& v : vertices)
    if (v.role == Role::External) out.push_back(v.label);
  std::sort(out.begin(), out.end());
  return out;
}

int Tree::find_external(int label) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].role == Role::External && vertices[i].label == label) return static_cast<int>(i);
  return -1;
}

int Tree::find_role(Role r) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].role == r) return static_cast<int>(i);
  return -1;
}

int Tree::s_param() const { return external_count() + (kind == TreeKind::Rooted ? 1 : 0); }

// ---- Partitions ------------------------------------------------------------

bool operator==(const Partition& a, const Partition& b) {
  return a.ground_size == b.ground_size && a.blocks == b.blocks;
}

Partition canonical(Partition p) {
  for (auto& b : p.blocks) std::sort(b.begin(), b.end());
  std::sort(p.blocks.begin(), p.blocks.end());
  return p;
}

void check_partition(const Partition& p) {
  std::vector<int> seen(p.ground_size + 1, 0);
  for (const auto& b : p.blocks) {
    if (b.empty()) throw InvariantError("partition has an empty block");
    for (int e : b) {
      if (e < 1 || e > p.ground_size) throw InvariantError("partition element out of range");
      if (seen[e]++) throw InvariantError("partition element repeated");
    }
  }
  for (int e = 1; e <= p.ground_size; ++e)
    if (!seen[e]) throw InvariantError("partition does not cover the ground set");
}

std::vector<Partition> enumerate_partitions(int s) {
  if (s < 1) throw std::invalid_argument("enumerate_partitions: empty ground set");
  std::vector<Partition> out;
  // restricted growth strings a[0] = 0, a[i] <= 1 + max(a[0..i-1])
  std::vector<int> a(s, 0);
  std::function<void(int, int)> rec = [&](int i, int mx) {
    if (i == s) {
      Partition p{s, std::vector<std::vector<int>>(mx + 1)};
      for (int k = 0; k < s; ++k) p.blocks[a[k]].push_back(k + 1);
      out.push_back(canonical(std::move(p)));
      return;
    }
    for (int v = 0; v <= mx + 1; ++v) {
      a[i] = v;
      rec(i + 1, std::max(mx, v));
    }
  };
  a[0] = 0;
  rec(1, 0);
  return out;
}

Partition reduce_partition(const Partition& p) {
  if (p.ground_size < 3) throw InvariantError("reduce_partition needs s >= 1");
  return reduce_partition(p, p.ground_size - 1, p.ground_size);
}

Partition reduce_partition(const Partition& p, int a, int b) {
  check_partition(p);
  if (a == b || a < 1 || b < 1 || a > p.ground_size || b > p.ground_size)
    throw InvariantError("reduce_partition: bad cut labels");
  auto rank = [&](int e) { return e - (e > a ? 1 : 0) - (e > b ? 1 : 0); };
  Partition r{p.ground_size - 2, {}};
  for (const auto& blk : p.blocks) {
    std::vector<int> nb;
    for (int e : blk)
      if (e != a && e != b) nb.push_back(rank(e));
    if (!nb.empty()) r.blocks.push_back(std::move(nb));
  }
  return canonical(std::move(r));
}

// ---- Validation ------------------------------------------------------------

int v2_bound(int s, int l) {
  if (l <= 0) return 0;
  return (6 * l - 4 + s) / 2;  // floor(3l - 2 + s/2); numerator is >= 0 here
}

Validation validate(const Tree& t) {
  auto fail = [](std::string r) { return Validation{false, std::move(r)}; };
  const int V = static_cast<int>(t.vertices.size());
  if (V == 0) return fail("empty tree");
  if (static_cast<int>(t.edges.size()) != V - 1) return fail("edge count is not V-1");
  std::vector<std::vector<int>> adj(V);
  for (auto [a, b] : t.edges) {
    if (a < 0 || b < 0 || a >= V || b >= V || a == b) return fail("bad edge");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(V, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
  }
  if (reached != V) return fail("not connected");

  int n_surface = 0, n_root = 0, n_internal = 0;
  std::set<int> labels;
  auto deg = t.degrees();
  for (int i = 0; i < V; ++i) {
    const auto& v = t.vertices[i];
    switch (v.role) {
      case Role::External:
        if (deg[i] != 1) return fail("external vertex with incidence != 1");
        if (v.label < 1 || !labels.insert(v.label).second) return fail("bad or repeated external label");
        break;
      case Role::Surface:
        ++n_surface;
        if (deg[i] != 1) return fail("surface vertex with incidence != 1");
        break;
      case Role::Internal:
        ++n_internal;
        if (deg[i] < 2) return fail("internal vertex with incidence < 2");
        break;
      case Role::Root:
        ++n_root;
        if (deg[i] < 1 && V > 1) return fail("isolated root");
        break;
    }
  }
  int extra = 0;
  switch (t.kind) {
    case TreeKind::Surface:
      if (n_surface != 1 || n_root != 0) return fail("surface tree needs exactly one surface vertex");
      if (n_internal < 1) return fail("surface tree without internal vertex");
      break;
    case TreeKind::Bulk:
      if (n_surface != 0 || n_root != 0) return fail("bulk tree with surface or root vertex");
      if (n_internal < 1) return fail("bulk tree without internal vertex");
      break;
    case TreeKind::Rooted:
      if (n_root != 1 || n_surface != 0) return fail("rooted tree needs exactly one root");
      if (V > 1 && deg[t.find_role(Role::Root)] == 1) extra = 1;
      break;
  }
  int v2 = t.v2();
  if (t.l <= 0) {
    if (v2 != 0) return fail("v2 > 0 at loop order 0");
  } else if (v2 + extra > v2_bound(t.s_param(), t.l)) {
    return fail("v2 exceeds 3l-2+s/2");
  }
  return {};
}

Validation validate(const Forest& w) {
  try {
    check_partition(w.partition);
  } catch (const InvariantError& e) {
    return {false, e.what()};
  }
  if (w.trees.size() != w.partition.blocks.size()) return {false, "tree count differs from block count"};
  for (std::size_t i = 0; i < w.trees.size(); ++i) {
    const auto& t = w.trees[i];
    if (t.kind != TreeKind::Surface) return {false, "forest tree is not a surface tree"};
    if (t.l != w.l) return {false, "tree loop budget differs from forest"};
    if (t.external_labels() != w.partition.blocks[i]) return {false, "tree labels differ from its block"};
    auto v = validate(t);
    if (!v) return v;
  }
  return {};
}

// ---- Canonical form --------------------------------------------------------

std::string canonical_code(const Tree& t) {
  const int V = static_cast<int>(t.vertices.size());
  std::vector<std::vector<int>> adj(V);
  for (auto [a, b] : t.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  int root = -1;
  if (t.kind == TreeKind::Surface) root = t.find_role(Role::Surface);
  if (t.kind == TreeKind::Rooted) root = t.find_role(Role::Root);
  if (root < 0) {
    int best = 1 << 30;
    for (int i = 0; i < V; ++i)
      if (t.vertices[i].role == Role::External && t.vertices[i].label < best) {
        best = t.vertices[i].label;
        root = i;
      }
  }
  if (root < 0) root = 0;
  std::function<std::string(int, int)> code = [&](int v, int parent) {
    std::string tag;
    switch (t.vertices[v].role) {
      case Role::External: tag = "y" + std::to_string(t.vertices[v].label); break;
      case Role::Surface: tag = "S"; break;
      case Role::Root: tag = "R"; break;
      case Role::Internal: tag = "z"; break;
    }
    std::vector<std::string> kids;
    for (int w : adj[v])
      if (w != parent) kids.push_back(code(w, v));
    std::sort(kids.begin(), kids.end());
    std::string s = tag + "(";
    for (const auto& k : kids) s += k;
    return s + ")";
  };
  return code(root, -1);
}

// ---- Enumeration -----------------------------------------------------------

namespace {

// Leaf-labelled tree whose non-leaf vertices all have degree >= 3
// (a single edge when there are two leaves).
struct Topo {
  int n_vertices = 0;
  std::vector<int> leaf_vertex;  // leaf index -> vertex id
  std::vector<std::pair<int, int>> edges;
};

std::vector<Topo> reduced_topologies(int n) {
  std::vector<Topo> cur;
  Topo base;
  base.n_vertices = 2;
  base.leaf_vertex = {0, 1};
  base.edges = {{0, 1}};
  cur.push_back(base);
  for (int k = 2; k < n; ++k) {
    std::vector<Topo> next;
    for (const auto& t : cur) {
      std::vector<char> is_leaf(t.n_vertices, 0);
      for (int v : t.leaf_vertex) is_leaf[v] = 1;
      // attach to an existing internal vertex
      for (int v = 0; v < t.n_vertices; ++v) {
        if (is_leaf[v]) continue;
        Topo u = t;
        int L = u.n_vertices++;
        u.leaf_vertex.push_back(L);
        u.edges.push_back({v, L});
        next.push_back(std::move(u));
      }
      // subdivide an edge and hang the new leaf there
      for (std::size_t e = 0; e < t.edges.size(); ++e) {
        Topo u = t;
        int w = u.n_vertices++;
        int L = u.n_vertices++;
        auto [a, b] = u.edges[e];
        u.edges[e] = {a, w};
        u.edges.push_back({w, b});
        u.edges.push_back({w, L});
        u.leaf_vertex.push_back(L);
        next.push_back(std::move(u));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

// Builds a tree from a topology: leaf i gets leaf_roles[i], every other vertex
// is internal, and edge e is subdivided by sub[e] extra internal vertices.
Tree realize(const Topo& topo, const std::vector<Vertex>& leaf_roles, const std::vector<int>& sub,
             TreeKind kind, int l) {
  Tree t;
  t.kind = kind;
  t.l = l;
  std::vector<int> map(topo.n_vertices, -1);
  std::vector<int> leaf_of(topo.n_vertices, -1);
  for (std::size_t i = 0; i < topo.leaf_vertex.size(); ++i) leaf_of[topo.leaf_vertex[i]] = static_cast<int>(i);
  for (int v = 0; v < topo.n_vertices; ++v) {
    map[v] = static_cast<int>(t.vertices.size());
    t.vertices.push_back(leaf_of[v] >= 0 ? leaf_roles[leaf_of[v]] : Vertex{Role::Internal, 0});
  }
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    int prev = map[topo.edges[e].first];
    for (int k = 0; k < sub[e]; ++k) {
      int w = static_cast<int>(t.vertices.size());
      t.vertices.push_back({Role::Internal, 0});
      t.edges.push_back({prev, w});
      prev = w;
    }
    t.edges.push_back({prev, map[topo.edges[e].second]});
  }
  return t;
}

// All vectors of length n with nonnegative entries summing to at most total.
void compositions(int n, int total, std::vector<int>& cur, const std::function<void()>& visit) {
  if (static_cast<int>(cur.size()) == n) {
    visit();
    return;
  }
  for (int k = 0; k <= total; ++k) {
    cur.push_back(k);
    compositions(n, total - k, cur, visit);
    cur.pop_back();
  }
}

int topo_internal(const Topo& t) { return t.n_vertices - static_cast<int>(t.leaf_vertex.size()); }

std::vector<Tree> subdivided(const std::vector<Topo>& topos, const std::vector<Vertex>& leaves,
                             TreeKind kind, int l, int max_internal, int v2_offset) {
  std::vector<Tree> out;
  int bound = l <= 0 ? 0 : v2_bound(static_cast<int>(leaves.size()) - (kind == TreeKind::Surface ? 1 : 0), l) - v2_offset;
  if (l <= 0 && v2_offset > 0) bound = 0;
  if (bound < 0) return out;
  for (const auto& topo : topos) {
    int base = topo_internal(topo);
    int total = std::min(bound, max_internal - base);
    if (total < 0) continue;
    std::vector<int> cur;
    compositions(static_cast<int>(topo.edges.size()), total, cur, [&] {
      int added = std::accumulate(cur.begin(), cur.end(), 0);
      if (base + added < 1 && kind != TreeKind::Rooted) return;
      out.push_back(realize(topo, leaves, cur, kind, l));
    });
  }
  return out;
}

void check_labels(const std::vector<int>& labels) {
  std::set<int> s(labels.begin(), labels.end());
  if (s.size() != labels.size()) throw std::invalid_argument("repeated external labels");
  for (int x : labels)
    if (x < 1) throw std::invalid_argument("external labels must be >= 1");
}

}  // namespace

std::vector<Tree> enumerate_surface_trees(const std::vector<int>& labels, int l, int max_internal) {
  check_labels(labels);
  if (labels.empty()) throw std::invalid_argument("surface trees need s >= 1");
  if (l < 0) throw std::invalid_argument("loop budget must be >= 0");
  std::vector<Vertex> leaves{{Role::Surface, 0}};
  for (int x : labels) leaves.push_back({Role::External, x});
  return subdivided(reduced_topologies(static_cast<int>(leaves.size())), leaves, TreeKind::Surface, l,
                    max_internal, 0);
}

std::vector<Tree> enumerate_surface_trees(int s, int l, int max_internal) {
  std::vector<int> labels(s);
  std::iota(labels.begin(), labels.end(), 1);
  return enumerate_surface_trees(labels, l, max_internal);
}

std::vector<Tree> enumerate_bulk_trees(const std::vector<int>& labels, int l, int max_internal) {
  check_labels(labels);
  if (l < 0) throw std::invalid_argument("loop budget must be >= 0");
  if (labels.size() < 2) return {};
  std::vector<Vertex> leaves;
  for (int x : labels) leaves.push_back({Role::External, x});
  return subdivided(reduced_topologies(static_cast<int>(leaves.size())), leaves, TreeKind::Bulk, l,
                    max_internal, 0);
}

std::vector<Tree> enumerate_rooted_trees(const std::vector<int>& labels, int l, int max_internal) {
  check_labels(labels);
  if (l < 0) throw std::invalid_argument("loop budget must be >= 0");
  if (labels.empty()) {
    Tree t;
    t.kind = TreeKind::Rooted;
    t.l = l;
    t.vertices = {{Role::Root, 0}};
    return {t};
  }
  std::vector<Vertex> leaves{{Role::Root, 0}};
  for (int x : labels) leaves.push_back({Role::External, x});
  auto topos = reduced_topologies(static_cast<int>(leaves.size()));
  // root of incidence 1: the root is a leaf of the reduced topology
  auto out = subdivided(topos, leaves, TreeKind::Rooted, l, max_internal, 1);
  // root of incidence >= 2: contract the root leaf into its internal neighbour
  std::vector<Topo> contracted;
  std::vector<Vertex> croles;
  for (const auto& t : topos) {
    int r = t.leaf_vertex[0];
    int nb = -1;
    std::size_t er = 0;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
      if (t.edges[e].first == r) nb = t.edges[e].second, er = e;
      if (t.edges[e].second == r) nb = t.edges[e].first, er = e;
    }
    bool nb_leaf = std::find(t.leaf_vertex.begin(), t.leaf_vertex.end(), nb) != t.leaf_vertex.end();
    if (nb_leaf) continue;
    Topo c;
    c.n_vertices = t.n_vertices - 1;
    auto id = [&](int v) { return v == r ? nb : v; };
    std::vector<int> remap(t.n_vertices);
    for (int v = 0, k = 0; v < t.n_vertices; ++v) remap[v] = v == r ? -1 : k++;
    for (std::size_t e = 0; e < t.edges.size(); ++e)
      if (e != er) c.edges.push_back({remap[id(t.edges[e].first)], remap[id(t.edges[e].second)]});
    c.leaf_vertex.push_back(remap[nb]);
    for (std::size_t i = 1; i < t.leaf_vertex.size(); ++i) c.leaf_vertex.push_back(remap[t.leaf_vertex[i]]);
    contracted.push_back(std::move(c));
  }
  auto more = subdivided(contracted, leaves, TreeKind::Rooted, l, max_internal, 0);
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

std::vector<Forest> enumerate_forests(const Partition& p, int l, int max_internal) {
  check_partition(p);
  std::vector<std::vector<Tree>> per_block;
  double total = 1.0;
  for (const auto& b : p.blocks) {
    per_block.push_back(enumerate_surface_trees(b, l, max_internal));
    total *= static_cast<double>(per_block.back().size());
  }
  if (total > 5e6) throw CapacityError("forest enumeration exceeds 5e6 forests");
  std::vector<Forest> out;
  if (total == 0.0) return out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(per_block.size(), 0);
  while (true) {
    Forest f{p, {}, l};
    for (std::size_t k = 0; k < idx.size(); ++k) f.trees.push_back(per_block[k][idx[k]]);
    out.push_back(std::move(f));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == per_block[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

std::vector<Forest> enumerate_all_forests(int s, int l, int max_internal) {
  std::vector<Forest> out;
  for (const auto& p : enumerate_partitions(s)) {
    auto f = enumerate_forests(p, l, max_internal);
    out.insert(out.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
  }
  return out;
}

// ---- Reduction and merging -------------------------------------------------

namespace {

Tree without(const Tree& t, const std::vector<char>& removed) {
  Tree r;
  r.kind = t.kind;
  r.l = t.l;
  std::vector<int> map(t.vertices.size(), -1);
  for (std::size_t i = 0; i < t.vertices.size(); ++i)
    if (!removed[i]) {
      map[i] = static_cast<int>(r.vertices.size());
      r.vertices.push_back(t.vertices[i]);
    }
  for (auto [a, b] : t.edges)
    if (!removed[a] && !removed[b]) r.edges.push_back({map[a], map[b]});
  return r;
}

// Removes external leg `label`, then deletes internal vertices of incidence 1
// until every remaining internal vertex has incidence >= 2.
Tree cut_and_prune(const Tree& t, int label) {
  std::vector<char> removed(t.vertices.size(), 0);
  removed[t.find_external(label)] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> deg(t.vertices.size(), 0);
    for (auto [a, b] : t.edges)
      if (!removed[a] && !removed[b]) ++deg[a], ++deg[b];
    for (std::size_t i = 0; i < t.vertices.size(); ++i)
      if (!removed[i] && t.vertices[i].role == Role::Internal && deg[i] <= 1) {
        removed[i] = 1;
        changed = true;
      }
  }
  return without(t, removed);
}

Forest assemble(std::vector<Tree> trees, int ground, int l) {
  std::sort(trees.begin(), trees.end(), [](const Tree& a, const Tree& b) {
    return a.external_labels() < b.external_labels();
  });
  Forest f;
  f.l = l;
  f.partition.ground_size = ground;
  for (auto& t : trees) {
    t.l = l;
    f.partition.blocks.push_back(t.external_labels());
  }
  f.trees = std::move(trees);
  return f;
}

}  // namespace

ReduceResult reduce_forest(const Forest& w, int a, int b) {
  if (auto v = validate(w); !v) throw InvariantError("reduce_forest: invalid input forest: " + v.reason);
  const int ground = w.partition.ground_size;
  if (ground < 3) throw InvariantError("reduce_forest needs s >= 1");
  if (a == b) throw std::domain_error("reduce_forest: cut labels must differ");
  ReduceResult res;
  std::vector<Tree> trees = w.trees;
  for (int label : {a, b}) {
    bool found = false;
    for (auto& t : trees)
      if (t.find_external(label) >= 0) {
        t = cut_and_prune(t, label);
        found = true;
        break;
      }
    if (!found) throw std::domain_error("reduce_forest: label is not an external vertex");
  }
  std::vector<Tree> kept;
  for (auto& t : trees) {
    if (t.external_count() == 0) {
      res.tree_deleted = true;
      continue;
    }
    for (auto& v : t.vertices)
      if (v.role == Role::External) v.label -= (v.label > a ? 1 : 0) + (v.label > b ? 1 : 0);
    kept.push_back(std::move(t));
  }
  res.forest = assemble(std::move(kept), ground - 2, w.l + 1);
  if (!(res.forest.partition == reduce_partition(w.partition, a, b)))
    throw InvariantError("reduce_forest: partition bookkeeping mismatch");
  return res;
}

Forest merge(MergeMode mode, const Tree& bulk, int x, const Forest& w, int y) {
  if (bulk.kind != TreeKind::Bulk) throw std::domain_error("merge: first structure must be a bulk tree");
  int vx = bulk.find_external(x);
  if (vx < 0) throw std::domain_error("merge: label is not external in the bulk tree");
  int ty = -1, vy = -1;
  for (std::size_t i = 0; i < w.trees.size(); ++i)
    if ((vy = w.trees[i].find_external(y)) >= 0) {
      ty = static_cast<int>(i);
      break;
    }
  if (ty < 0) throw std::domain_error("merge: label is not external in the forest");
  std::set<int> left;
  for (int e : bulk.external_labels())
    if (e != x) left.insert(e);
  for (const auto& t : w.trees)
    for (int e : t.external_labels())
      if (e != y && left.count(e)) throw std::domain_error("merge: label sets overlap");

  const Tree& ft = w.trees[ty];
  auto neighbour = [](const Tree& t, int v) {
    for (auto [a, b] : t.edges) {
      if (a == v) return b;
      if (b == v) return a;
    }
    return -1;
  };
  int zb = neighbour(bulk, vx), zf = neighbour(ft, vy);

  Tree m;
  m.kind = TreeKind::Surface;
  m.l = bulk.l + w.l;
  std::vector<int> mf(ft.vertices.size(), -1), mb(bulk.vertices.size(), -1);
  for (std::size_t i = 0; i < ft.vertices.size(); ++i)
    if (static_cast<int>(i) != vy) {
      mf[i] = static_cast<int>(m.vertices.size());
      m.vertices.push_back(ft.vertices[i]);
    }
  for (std::size_t i = 0; i < bulk.vertices.size(); ++i)
    if (static_cast<int>(i) != vx) {
      mb[i] = static_cast<int>(m.vertices.size());
      m.vertices.push_back(bulk.vertices[i]);
    }
  for (auto [a, b] : ft.edges)
    if (a != vy && b != vy) m.edges.push_back({mf[a], mf[b]});
  for (auto [a, b] : bulk.edges)
    if (a != vx && b != vx) m.edges.push_back({mb[a], mb[b]});
  if (mode == MergeMode::A) {
    m.edges.push_back({mb[zb], mf[zf]});
  } else {
    int u = static_cast<int>(m.vertices.size());
    m.vertices.push_back({Role::Internal, 0});
    m.edges.push_back({mb[zb], u});
    m.edges.push_back({u, mf[zf]});
  }

  std::vector<Tree> trees;
  int ground = 0;
  for (std::size_t i = 0; i < w.trees.size(); ++i) {
    ground += w.trees[i].external_count();
    if (static_cast<int>(i) != ty) trees.push_back(w.trees[i]);
  }
  ground += bulk.external_count() - 2;
  trees.push_back(std::move(m));
  return assemble(std::move(trees), ground, bulk.l + w.l);
}

// ---- Hand-built shapes -----------------------------------------------------

Tree chain_tree(int label, int internal, int l) {
  Tree t;
  t.kind = TreeKind::Surface;
  t.l = l;
  t.vertices.push_back({Role::External, label});
  for (int k = 0; k < internal; ++k) {
    t.vertices.push_back({Role::Internal, 0});
    t.edges.push_back({k, k + 1});
  }
  t.vertices.push_back({Role::Surface, 0});
  t.edges.push_back({internal, internal + 1});
  return t;
}

Tree bulk_chain(int a, int b, int internal, int l) {
  Tree t = chain_tree(a, internal, l);
  t.kind = TreeKind::Bulk;
  t.vertices.back() = {Role::External, b};
  return t;
}

Tree star_tree(const std::vector<int>& labels, int l) {
  Tree t;
  t.kind = TreeKind::Surface;
  t.l = l;
  t.vertices.push_back({Role::Internal, 0});
  t.vertices.push_back({Role::Surface, 0});
  t.edges.push_back({0, 1});
  for (int x : labels) {
    t.edges.push_back({0, static_cast<int>(t.vertices.size())});
    t.vertices.push_back({Role::External, x});
  }
  return t;
}

Tree three_arm_tree(int v1, int v2, int v0, int l) {
  if (v1 < 0 || v2 < 0 || v0 < 0) throw std::domain_error("arm lengths must be >= 0");
  Tree t;
  t.kind = TreeKind::Surface;
  t.l = l;
  t.vertices.push_back({Role::Internal, 0});
  auto arm = [&](int k, Vertex end) {
    int prev = 0;
    for (int i = 0; i < k; ++i) {
      t.vertices.push_back({Role::Internal, 0});
      int cur = static_cast<int>(t.vertices.size()) - 1;
      t.edges.push_back({prev, cur});
      prev = cur;
    }
    t.vertices.push_back(end);
    t.edges.push_back({prev, static_cast<int>(t.vertices.size()) - 1});
  };
  arm(v1, {Role::External, 1});
  arm(v2, {Role::External, 2});
  arm(v0, {Role::Surface, 0});
  return t;
}

}  // namespace hsf
