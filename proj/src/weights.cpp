#include "hsf/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>

#include "hsf/kernels.hpp"
#include "hsf/quad.hpp"

namespace hsf {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
}

// Enumerations are reused across engines; they are pure functions of their keys.
template <class T>
const std::vector<T>& cached(std::map<std::tuple<int, int, int>, std::vector<T>>& store, std::mutex& mu,
                             std::tuple<int, int, int> key, auto&& make) {
  std::lock_guard lock(mu);
  auto it = store.find(key);
  if (it == store.end()) it = store.emplace(key, make()).first;
  return it->second;
}

const std::vector<Forest>& all_forests(int s, int l, int max_internal) {
  static std::map<std::tuple<int, int, int>, std::vector<Forest>> store;
  static std::mutex mu;
  return cached(store, mu, {s, l, max_internal}, [&] { return enumerate_all_forests(s, l, max_internal); });
}

const std::vector<Tree>& all_trees(Family f, int s, int l, int max_internal) {
  static std::map<std::tuple<int, int, int>, std::vector<Tree>> rooted, bulk;
  static std::mutex mu;
  if (f == Family::Rooted) {
    return cached(rooted, mu, {s, l, max_internal}, [&] {
      std::vector<int> labels;
      for (int i = 2; i <= s; ++i) labels.push_back(i);
      return enumerate_rooted_trees(labels, l, max_internal);
    });
  }
  return cached(bulk, mu, {s, l, max_internal}, [&] {
    std::vector<int> labels;
    for (int i = 1; i <= s; ++i) labels.push_back(i);
    return enumerate_bulk_trees(labels, l, max_internal);
  });
}

// Path a - z_1 - ... - z_k - b of a bulk chain, as vertex indices.
std::vector<int> bulk_chain_path(const Tree& t) {
  if (t.kind != TreeKind::Bulk || t.external_count() != 2) return {};
  auto deg = t.degrees();
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (t.vertices[v].role == Role::Internal && deg[v] != 2) return {};
  int start = -1;
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (t.vertices[v].role == Role::External) {
      start = static_cast<int>(v);
      break;
    }
  std::vector<int> path{start};
  int prev = -1, cur = start;
  while (true) {
    int next = -1;
    for (auto [a, b] : t.edges) {
      int o = a == cur ? b : (b == cur ? a : -1);
      if (o >= 0 && o != prev) {
        next = o;
        break;
      }
    }
    if (next < 0) break;
    path.push_back(next);
    prev = cur;
    cur = next;
    if (t.vertices[next].role != Role::Internal) break;
  }
  return path;
}

int edge_between(const Tree& t, int a, int b) {
  for (int e = 0; e < static_cast<int>(t.edges.size()); ++e) {
    auto [x, y] = t.edges[e];
    if ((x == a && y == b) || (x == b && y == a)) return e;
  }
  return -1;
}

}  // namespace

std::vector<LineKind> line_kinds(const Tree& t) {
  std::vector<LineKind> out;
  out.reserve(t.edges.size());
  for (auto [a, b] : t.edges) {
    Role ra = t.vertices[a].role, rb = t.vertices[b].role;
    if (ra == Role::External || rb == Role::External)
      out.push_back(LineKind::External);
    else if (ra == Role::Surface || rb == Role::Surface)
      out.push_back(LineKind::Surface);
    else
      out.push_back(LineKind::Internal);
  }
  return out;
}

Family parse_family(const std::string& name) {
  if (name == "surface") return Family::Surface;
  if (name == "rooted") return Family::Rooted;
  if (name == "bulk") return Family::Bulk;
  throw std::invalid_argument("unknown weight family: " + name);
}

void check_query(const WeightQuery& q) {
  check_cutoffs(q.cut);
  for (double t : q.tau)
    if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("tau must be finite and > 0");
  for (double y : q.positions)
    if (!std::isfinite(y)) throw std::domain_error("positions must be finite");
}

void check_lines(const Tree& t, const LineParams& lines, const CutoffPair& cut) {
  check_delta(lines.delta);
  auto in_range = [&](double L) { return L >= cut.lambda && L <= cut.lambda0; };
  auto kinds = line_kinds(t);
  for (int e = 0; e < static_cast<int>(kinds.size()); ++e) {
    if (kinds[e] == LineKind::Internal) {
      auto it = lines.internal.find(e);
      if (it == lines.internal.end()) throw std::domain_error("missing scale for internal line");
      if (!in_range(it->second)) throw std::domain_error("internal scale outside [lambda, lambda0]");
    } else if (kinds[e] == LineKind::Surface) {
      auto it = lines.surface.find(e);
      if (it == lines.surface.end()) throw std::domain_error("missing scale for surface line");
      if (!in_range(it->second)) throw std::domain_error("surface scale outside [lambda, lambda0]");
    } else {
      auto it = lines.external.find(e);
      if (it != lines.external.end() && !(it->second > 0.0)) throw std::domain_error("tau must be > 0");
    }
  }
}

LineParams uniform_lines(const Tree& t, double lambda_internal, double lambda_surface, double delta) {
  LineParams lp;
  lp.delta = delta;
  auto kinds = line_kinds(t);
  for (int e = 0; e < static_cast<int>(kinds.size()); ++e) {
    if (kinds[e] == LineKind::Internal) lp.internal[e] = lambda_internal;
    if (kinds[e] == LineKind::Surface) lp.surface[e] = lambda_surface;
  }
  return lp;
}

std::vector<double> edge_variances(const Tree& t, const LineParams& lines, const WeightQuery& q,
                                   bool doubled) {
  check_delta(lines.delta);
  const double f = 1.0 + lines.delta;
  auto kinds = line_kinds(t);
  std::vector<double> var(kinds.size());
  for (int e = 0; e < static_cast<int>(kinds.size()); ++e) {
    switch (kinds[e]) {
      case LineKind::Internal: {
        auto it = lines.internal.find(e);
        if (it == lines.internal.end()) throw std::domain_error("missing scale for internal line");
        var[e] = f / (it->second * it->second);
        break;
      }
      case LineKind::Surface: {
        auto it = lines.surface.find(e);
        if (it == lines.surface.end()) throw std::domain_error("missing scale for surface line");
        var[e] = f / (it->second * it->second);
        break;
      }
      case LineKind::External: {
        auto [a, b] = t.edges[e];
        int x = t.vertices[a].role == Role::External ? a : b;
        double tau;
        auto it = lines.external.find(e);
        if (it != lines.external.end()) {
          tau = it->second;
        } else {
          int label = t.vertices[x].label;
          if (label < 1 || label > static_cast<int>(q.tau.size()))
            throw std::domain_error("missing tau for external line");
          tau = q.tau[label - 1];
        }
        if (!(tau > 0.0)) throw std::domain_error("tau must be > 0");
        var[e] = f * (doubled ? 2.0 * tau : tau);
        break;
      }
    }
  }
  return var;
}

namespace {

double fixed_position(const Tree& t, int v, const WeightQuery& q) {
  const Vertex& x = t.vertices[v];
  auto at = [&](int label) {
    if (label < 1 || label > static_cast<int>(q.positions.size()))
      throw std::domain_error("missing position for external label");
    return q.positions[label - 1];
  };
  switch (x.role) {
    case Role::External: return at(x.label);
    case Role::Root: return at(1);
    default: return 0.0;
  }
}

}  // namespace

double weight_factor(const Tree& t, const LineParams& lines, const WeightQuery& q,
                     const std::vector<double>& internal_positions, bool doubled) {
  auto var = edge_variances(t, lines, q, doubled);
  std::vector<double> pos(t.vertices.size());
  std::size_t k = 0;
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    if (t.vertices[v].role == Role::Internal) {
      if (k >= internal_positions.size()) throw std::domain_error("missing internal vertex position");
      pos[v] = internal_positions[k++];
      if (!(pos[v] >= 0.0)) throw std::domain_error("internal vertices live on R+");
    } else {
      pos[v] = fixed_position(t, static_cast<int>(v), q);
    }
  }
  if (k != internal_positions.size()) throw std::domain_error("too many internal vertex positions");
  double w = 1.0;
  for (std::size_t e = 0; e < t.edges.size(); ++e)
    w *= p_bulk(var[e], pos[t.edges[e].first], pos[t.edges[e].second]);
  return w;
}

double weight_factor(const Forest& w, const std::vector<LineParams>& lines, const WeightQuery& q,
                     const std::vector<std::vector<double>>& internal_positions) {
  if (lines.size() != w.trees.size() || internal_positions.size() != w.trees.size())
    throw std::domain_error("one LineParams and one position list per tree");
  double out = 1.0;
  for (std::size_t i = 0; i < w.trees.size(); ++i)
    out *= weight_factor(w.trees[i], lines[i], q, internal_positions[i],
                         w.partition.blocks[i].size() == 1);
  return out;
}

WeightEngine::WeightEngine(WeightQuery q, SupOptions opt, std::vector<int> batched_labels,
                           std::vector<double> batch)
    : q_(std::move(q)), opt_(opt), batched_labels_(std::move(batched_labels)), batch_(std::move(batch)) {
  check_query(q_);
  if (!(q_.cut.lambda > 0.0)) throw std::domain_error("weight factors need lambda > 0");
  if (opt_.grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");
  if (!batched_labels_.empty() && batch_.empty())
    throw std::invalid_argument("batched labels need batch positions");
  if (q_.cut.lambda0 > q_.cut.lambda)
    scales_ = quad::logspace(q_.cut.lambda, q_.cut.lambda0, opt_.grid_points);
  else
    scales_ = {q_.cut.lambda};
}

std::vector<double> WeightEngine::positions_for(const Tree& t) const {
  std::vector<double> pos(t.vertices.size(), 0.0);
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    const Vertex& x = t.vertices[v];
    if (x.role == Role::External &&
        std::find(batched_labels_.begin(), batched_labels_.end(), x.label) != batched_labels_.end())
      continue;
    if (x.role != Role::Internal) pos[v] = fixed_position(t, static_cast<int>(v), q_);
  }
  return pos;
}

std::vector<char> WeightEngine::batched_for(const Tree& t) const {
  std::vector<char> b(t.vertices.size(), 0);
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (t.vertices[v].role == Role::External &&
        std::find(batched_labels_.begin(), batched_labels_.end(), t.vertices[v].label) !=
            batched_labels_.end())
      b[v] = 1;
  return b;
}

TreeIntegrator& WeightEngine::integrator(double li, double ls, TreeKind kind) {
  auto key = std::make_tuple(li, ls, static_cast<int>(kind));
  auto it = grids_.find(key);
  if (it != grids_.end()) return *it->second;

  double tau_min = std::numeric_limits<double>::infinity(), tau_max = 0.0;
  for (double t : q_.tau) {
    tau_min = std::min(tau_min, t);
    tau_max = std::max(tau_max, t);
  }
  double inv2 = 1.0 / (li * li);
  if (kind != TreeKind::Bulk) inv2 = std::max(inv2, 1.0 / (ls * ls));
  // delta < 1 bounds every line variance by twice its undilated value
  const double v0 = opt_.depth * 2.0 * inv2;
  double h = std::min({1.0 / li, 1.0 / ls, std::sqrt(tau_min)});
  h *= opt_.panel_ratio;

  auto batched = [&](int label) {
    return std::find(batched_labels_.begin(), batched_labels_.end(), label) != batched_labels_.end();
  };
  double zmax;
  if (kind == TreeKind::Bulk) {
    double top = 0.0;
    for (std::size_t j = 0; j < q_.positions.size(); ++j)
      if (!batched(static_cast<int>(j) + 1)) top = std::max(top, q_.positions[j]);
    for (double u : batch_) top = std::max(top, u);
    zmax = top + opt_.z_sigmas * std::sqrt(v0 + 2.0 * tau_max);
  } else {
    // Internal vertices are tied to the anchor through internal and surface
    // lines; external legs shift them by at most y v0 / (v0 + tau).
    double anchor = kind == TreeKind::Rooted && !q_.positions.empty() ? std::max(0.0, q_.positions[0]) : 0.0;
    double shift = 0.0;
    for (std::size_t j = 0; j < q_.positions.size() && j < q_.tau.size(); ++j) {
      if (batched(static_cast<int>(j) + 1)) continue;
      double d = q_.positions[j] - anchor;
      if (d > 0.0) shift = std::max(shift, d * v0 / (v0 + q_.tau[j]));
    }
    zmax = anchor + shift + opt_.z_sigmas * std::sqrt(v0);
  }
  auto ti = std::make_unique<TreeIntegrator>(make_grid(zmax, h), batch_);
  return *grids_.emplace(key, std::move(ti)).first->second;
}

Eigen::RowVectorXd WeightEngine::bulk_chain_value(const Tree& t, const std::vector<double>& var) {
  auto path = bulk_chain_path(t);
  auto bat = batched_for(t);
  auto pos = positions_for(t);
  const int a = path.front(), b = path.back();
  const int k = static_cast<int>(path.size()) - 2;
  const std::size_t n = (bat[a] || bat[b]) ? batch_.size() : 1;
  auto ya = [&](std::size_t j) { return bat[a] ? batch_[j] : pos[a]; };
  auto yb = [&](std::size_t j) { return bat[b] ? batch_[j] : pos[b]; };
  Eigen::RowVectorXd out(static_cast<Eigen::Index>(n));
  if (k == 1) {
    const double A = var[edge_between(t, a, path[1])], B = var[edge_between(t, path[1], b)];
    const double s = std::sqrt(A * B / (A + B));
    for (std::size_t j = 0; j < n; ++j) {
      double mu = (B * ya(j) + A * yb(j)) / (A + B);
      out(static_cast<Eigen::Index>(j)) = p_bulk(A + B, ya(j), yb(j)) * normal_cdf(mu / s);
    }
  } else {
    const double A = var[edge_between(t, a, path[1])], C = var[edge_between(t, path[1], path[2])],
                 B = var[edge_between(t, path[2], b)];
    const double s1 = std::sqrt(A * C / (A + C));
    const double width = std::sqrt(std::min(B, A + C));
    for (std::size_t j = 0; j < n; ++j) {
      const double y0 = ya(j), y1 = yb(j);
      auto f = [&](double z) {
        double mu = (C * y0 + A * z) / (A + C);
        return p_bulk(B, z, y1) * p_bulk(A + C, y0, z) * normal_cdf(mu / s1);
      };
      double hi = std::max({0.0, y0, y1}) + 10.0 * std::sqrt(A + B + C);
      // the whole-line integral bounds the value; a per-panel relative
      // tolerance alone stalls on panels deep in the tails
      double floor = 1e-12 * p_bulk(A + B + C, y0, y1) + std::numeric_limits<double>::min();
      out(static_cast<Eigen::Index>(j)) = quad::gk_split(f, 0.0, hi, width, floor, 1e-10);
    }
  }
  return out;
}

Eigen::RowVectorXd WeightEngine::evaluate(const Tree& t, double delta, bool doubled, double li, double ls) {
  auto var = edge_variances(t, uniform_lines(t, li, ls, delta), q_, doubled);
  if (opt_.bulk_chain_closed_form && t.kind == TreeKind::Bulk) {
    auto path = bulk_chain_path(t);
    int k = static_cast<int>(path.size()) - 2;
    if (path.size() >= 3 && k >= 1 && k <= 2 && t.vertices[path.back()].role == Role::External)
      return bulk_chain_value(t, var);
  }
  return integrator(li, ls, t.kind).integrate(t, var, positions_for(t), batched_for(t));
}

Eigen::RowVectorXd WeightEngine::tree_at(const Tree& t, double delta, bool doubled, double li, double ls) {
  check_delta(delta);
  auto r = evaluate(t, delta, doubled, li, ls);
  if (r.size() == 1 && width() > 1) return Eigen::RowVectorXd::Constant(static_cast<Eigen::Index>(width()), r(0));
  return r;
}

namespace {

struct Candidate {
  double li, ls;
  int family;  // 0 endpoint, 1 common, 2 surface only
  int index;
};

std::vector<Candidate> candidates(const Tree& t, const std::vector<double>& scales) {
  bool has_int = false, has_surf = false;
  for (auto k : line_kinds(t)) {
    has_int = has_int || k == LineKind::Internal;
    has_surf = has_surf || k == LineKind::Surface;
  }
  const double L = scales.front();
  std::vector<Candidate> out{{L, L, 0, 0}};
  for (int i = 1; i < static_cast<int>(scales.size()); ++i) {
    // without internal lines the common family is the surface-only one
    if (has_int) out.push_back({scales[i], scales[i], 1, i});
    if (has_surf) out.push_back({L, scales[i], 2, i});
  }
  return out;
}

}  // namespace

Eigen::RowVectorXd WeightEngine::tree(const Tree& t, double delta, bool doubled) {
  check_delta(delta);
  if (t.internal_count() > opt_.max_internal) throw CapacityError("tree exceeds the internal-vertex cap");
  auto cand = candidates(t, scales_);
  Eigen::RowVectorXd endpoint = tree_at(t, delta, doubled, cand[0].li, cand[0].ls);
  Eigen::RowVectorXd best = endpoint;
  for (std::size_t i = 1; i < cand.size(); ++i) best = best.cwiseMax(tree_at(t, delta, doubled, cand[i].li, cand[i].ls));
  for (Eigen::Index j = 0; j < best.size(); ++j) {
    ++diag_.evaluations;
    if (endpoint(j) > 0.0) {
      double g = best(j) / endpoint(j);
      if (g > 1.01) ++diag_.grid_beats_endpoint;
      diag_.worst_gain = std::max(diag_.worst_gain, g);
    }
  }
  return best;
}

WeightValue WeightEngine::tree_detail(const Tree& t, double delta, bool doubled) {
  if (!batch_.empty()) throw std::logic_error("tree_detail needs an unbatched engine");
  check_delta(delta);
  if (t.internal_count() > opt_.max_internal) throw CapacityError("tree exceeds the internal-vertex cap");
  auto cand = candidates(t, scales_);
  auto value = [&](double li, double ls) { return tree_at(t, delta, doubled, li, ls)(0); };
  WeightValue out;
  out.endpoint = value(cand[0].li, cand[0].ls);
  out.value = out.endpoint;
  out.lambda_internal = cand[0].li;
  out.lambda_surface = cand[0].ls;
  Candidate top = cand[0];
  for (std::size_t i = 1; i < cand.size(); ++i) {
    double v = value(cand[i].li, cand[i].ls);
    if (v > out.value) {
      out.value = v;
      top = cand[i];
      out.lambda_internal = cand[i].li;
      out.lambda_surface = cand[i].ls;
    }
  }
  if (opt_.refine && scales_.size() > 1) {
    // Polish along the family of the best point; the endpoint belongs to both.
    std::vector<int> families = top.family == 0 ? std::vector<int>{1, 2} : std::vector<int>{top.family};
    for (int fam : families) {
      bool present = std::any_of(cand.begin(), cand.end(), [&](const Candidate& c) { return c.family == fam; });
      if (!present) continue;
      const int n = static_cast<int>(scales_.size());
      int lo = std::max(0, top.index - 1), hi = std::min(n - 1, top.index + 1);
      double a = std::log(scales_[lo]), b = std::log(scales_[hi]);
      const double L = scales_.front();
      auto at = [&](double x) {
        double g = std::exp(x);
        return fam == 1 ? value(g, g) : value(L, g);
      };
      const double r = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b - r * (b - a), d = a + r * (b - a);
      double fc = at(c), fd = at(d);
      for (int it = 0; it < 40 && b - a > 1e-7; ++it) {
        if (fc > fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - r * (b - a);
          fc = at(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + r * (b - a);
          fd = at(d);
        }
      }
      double x = fc > fd ? c : d, fx = std::max(fc, fd);
      if (fx > out.value) {
        out.value = fx;
        double g = std::exp(x);
        out.lambda_internal = fam == 1 ? g : L;
        out.lambda_surface = g;
      }
      // the refinement evaluates many one-off scales; drop their grids
      for (auto it2 = grids_.begin(); it2 != grids_.end();) {
        double li = std::get<0>(it2->first), ls = std::get<1>(it2->first);
        bool on_grid = std::find(scales_.begin(), scales_.end(), li) != scales_.end() &&
                       std::find(scales_.begin(), scales_.end(), ls) != scales_.end();
        it2 = on_grid ? std::next(it2) : grids_.erase(it2);
      }
    }
  }
  ++diag_.evaluations;
  if (out.endpoint > 0.0) {
    double g = out.value / out.endpoint;
    if (g > 1.01) ++diag_.grid_beats_endpoint;
    diag_.worst_gain = std::max(diag_.worst_gain, g);
  }
  return out;
}

Eigen::RowVectorXd WeightEngine::forest(const Forest& w, double delta) {
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Ones(static_cast<Eigen::Index>(width()));
  for (std::size_t i = 0; i < w.trees.size(); ++i) {
    Eigen::RowVectorXd r = tree(w.trees[i], delta, w.partition.blocks[i].size() == 1);
    if (r.size() == 1)
      out *= r(0);
    else
      out = out.cwiseProduct(r);
  }
  return out;
}

Eigen::RowVectorXd WeightEngine::global(int s, int l, Family f, double delta) {
  if (s < 0 || l < 0) throw std::domain_error("s and l must be >= 0");
  const auto n = static_cast<Eigen::Index>(width());
  if (f == Family::Surface && s == 0) return Eigen::RowVectorXd::Ones(n);
  if (f == Family::Rooted && s == 1) return Eigen::RowVectorXd::Ones(n);
  if (s > 4 || l > 3) throw CapacityError("global weight factors are enumerated for s <= 4, l <= 3");
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(n);
  auto add = [&](const Eigen::RowVectorXd& r) {
    if (r.size() == 1)
      out.array() += r(0);
    else
      out += r;
  };
  if (f == Family::Surface) {
    for (const Forest& w : all_forests(s, l, opt_.max_internal)) add(forest(w, delta));
  } else {
    for (const Tree& t : all_trees(f, s, l, opt_.max_internal)) add(tree(t, delta, false));
  }
  return out;
}

Eigen::RowVectorXd WeightEngine::chain_sum(int label, int l, double delta) {
  const auto n = static_cast<Eigen::Index>(width());
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(n);
  int vmax = v2_bound(1, l);
  for (int k = 1; k <= vmax; ++k) {
    Eigen::RowVectorXd r = tree(chain_tree(label, k, l), delta, true);
    if (r.size() == 1)
      out.array() += r(0);
    else
      out += r;
  }
  return out;
}

WeightValue integrated_weight_factor(const Tree& t, const WeightQuery& q, double delta,
                                     const SupOptions& opt, bool doubled) {
  if (auto v = validate(t); !v) throw std::domain_error("invalid tree: " + v.reason);
  if (t.internal_count() > opt.max_internal) throw CapacityError("tree exceeds the internal-vertex cap");
  WeightEngine eng(q, opt);
  return eng.tree_detail(t, delta, doubled);
}

double integrated_weight_factor(const Forest& w, const WeightQuery& q, double delta, const SupOptions& opt) {
  WeightEngine eng(q, opt);
  double out = 1.0;
  for (std::size_t i = 0; i < w.trees.size(); ++i)
    out *= eng.tree_detail(w.trees[i], delta, w.partition.blocks[i].size() == 1).value;
  return out;
}

double global_weight_factor(int s, int l, const WeightQuery& q, Family f, double delta, const SupOptions& opt) {
  if ((f == Family::Surface && s == 0) || (f == Family::Rooted && s == 1)) return 1.0;
  SupOptions o = opt;
  o.refine = false;
  WeightEngine eng(q, o);
  return eng.global(s, l, f, delta)(0);
}

namespace {

// Walks from the centre through one neighbour until a fixed vertex; returns
// the edges crossed, in order.
std::vector<int> arm(const Tree& t, int centre, int first) {
  std::vector<int> edges{edge_between(t, centre, first)};
  int prev = centre, cur = first;
  while (t.vertices[cur].role == Role::Internal) {
    int next = -1;
    for (auto [a, b] : t.edges) {
      int o = a == cur ? b : (b == cur ? a : -1);
      if (o >= 0 && o != prev) next = o;
    }
    if (next < 0) throw std::domain_error("dangling arm");
    edges.push_back(edge_between(t, cur, next));
    prev = cur;
    cur = next;
  }
  return edges;
}

double product_integral(double a, double ya, double b, double yb, double c, double yc) {
  // int_0^inf of three Gaussians in z is one Gaussian times a normal cdf
  double prec = 1.0 / a + 1.0 / b + 1.0 / c;
  double mean = (ya / a + yb / b + yc / c) / prec;
  double var = 1.0 / prec;
  double q = ya * ya / a + yb * yb / b + yc * yc / c - mean * mean * prec;
  double norm = std::pow(2.0 * std::numbers::pi, -1.5) / std::sqrt(a * b * c);
  return norm * std::exp(-0.5 * q) * std::sqrt(2.0 * std::numbers::pi * var) * normal_cdf(mean / std::sqrt(var));
}

double fixed_scale_integral(const Tree& t, const std::vector<double>& var, const WeightQuery& q) {
  double vmin = *std::min_element(var.begin(), var.end());
  double vsum = 0.0;
  for (double v : var) vsum += v;
  double top = 0.0;
  for (double y : q.positions) top = std::max(top, y);
  std::vector<double> pos(t.vertices.size(), 0.0);
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (t.vertices[v].role != Role::Internal) pos[v] = fixed_position(t, static_cast<int>(v), q);
  TreeIntegrator ti(make_grid(top + 8.0 * std::sqrt(vsum), 0.5 * std::sqrt(vmin)));
  return ti.integrate_scalar(t, var, pos);
}

}  // namespace

ChainCollapse chain_collapse(const Tree& t, const LineParams& lines, const WeightQuery& q) {
  if (t.kind != TreeKind::Surface || t.external_count() != 2)
    throw std::domain_error("chain collapse needs an s = 2 surface tree");
  check_lines(t, lines, q.cut);
  auto deg = t.degrees();
  int centre = -1;
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    if (t.vertices[v].role != Role::Internal) continue;
    if (deg[v] == 3) {
      if (centre >= 0) throw std::domain_error("chain collapse needs exactly one vertex of degree 3");
      centre = static_cast<int>(v);
    } else if (deg[v] != 2) {
      throw std::domain_error("chain collapse needs internal degrees 2 and 3 only");
    }
  }
  if (centre < 0) throw std::domain_error("chain collapse needs a vertex of degree 3");

  ChainCollapse out;
  const double f = 1.0 + lines.delta;
  double inv_l1 = 0.0;
  auto var = edge_variances(t, lines, q, false);
  for (auto [a, b] : t.edges) {
    int n = a == centre ? b : (b == centre ? a : -1);
    if (n < 0) continue;
    auto edges = arm(t, centre, n);
    int end_edge = edges.back();
    auto [ea, eb] = t.edges[end_edge];
    int end = t.vertices[ea].role == Role::Internal ? eb : ea;
    const int vcount = static_cast<int>(edges.size()) - 1;
    double inner = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) inner += var[edges[i]] / f;
    if (t.vertices[end].role == Role::Surface) {
      out.v0 = vcount;
      inv_l1 = inner + var[end_edge] / f;
    } else {
      double tau = var[end_edge] / f;
      if (t.vertices[end].label == 1) {
        out.v1 = vcount;
        out.c1 = tau + inner;
      } else {
        out.v2 = vcount;
        out.c2 = tau + inner;
      }
    }
  }
  out.lambda1 = 1.0 / std::sqrt(inv_l1);
  out.bound = product_integral(f * out.c1, q.positions.at(0), f * out.c2, q.positions.at(1), f * inv_l1, 0.0);
  out.weight = fixed_scale_integral(t, var, q);
  return out;
}

ChainPairCollapse chain_pair_collapse(const Forest& w, const std::vector<LineParams>& lines,
                                      const WeightQuery& q) {
  if (w.trees.size() != 2 || w.partition.blocks.size() != 2 || w.partition.blocks[0].size() != 1 ||
      w.partition.blocks[1].size() != 1)
    throw std::domain_error("chain pair collapse needs the forest of two singleton chains");
  if (lines.size() != 2) throw std::domain_error("one LineParams per tree");
  ChainPairCollapse out;
  out.weight = 1.0;
  out.bound = 1.0;
  for (int i = 0; i < 2; ++i) {
    const Tree& t = w.trees[i];
    if (t.kind != TreeKind::Surface || t.external_count() != 1 || t.v2() != t.internal_count())
      throw std::domain_error("chain pair collapse needs chains");
    check_lines(t, lines[i], q.cut);
    const double f = 1.0 + lines[i].delta;
    auto var = edge_variances(t, lines[i], q, true);
    double c = 0.0;
    for (double v : var) c += v / f;
    int label = t.external_labels().front();
    (i == 0 ? out.c1 : out.c2) = c;
    (i == 0 ? out.v21 : out.v22) = t.internal_count();
    out.bound *= p_bulk(f * c, q.positions.at(label - 1), 0.0);
    out.weight *= fixed_scale_integral(t, var, q);
  }
  return out;
}

double chain_integral_nested(double y, const std::vector<double>& variances, double end) {
  if (variances.size() < 2) throw std::domain_error("a chain needs at least two lines");
  // g_k(z) = int_0^inf p(v_k; z, w) g_{k+1}(w) dw, with the last factor fixed at `end`.
  std::function<double(std::size_t, double)> g = [&](std::size_t k, double z) -> double {
    if (k + 1 == variances.size()) return p_bulk(variances[k], z, end);
    double s = std::sqrt(variances[k]);
    // g_{k+1}(w) <= p(rest; w, end) by the semigroup property, so it varies on
    // that scale and is negligible 12 widths away from end
    double rest = 0.0;
    for (std::size_t j = k + 1; j < variances.size(); ++j) rest += variances[j];
    double r = std::sqrt(rest);
    double lo = std::max({0.0, z - 12.0 * s, end - 12.0 * r}), hi = std::min(z + 12.0 * s, end + 12.0 * r);
    if (!(hi > lo)) return 0.0;
    double width = std::min(s, r);
    auto f = [&](double w) { return p_bulk(variances[k], z, w) * g(k + 1, w); };
    // a fixed-rule estimate sets the absolute floor, so tail panels stop early
    int n = static_cast<int>(std::ceil((hi - lo) / width));
    auto rule = quad::gauss_legendre<8>(quad::linspace(lo, hi, n + 1));
    double crude = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) crude += rule.w[i] * std::abs(f(rule.x[i]));
    return quad::gk_split(f, lo, hi, width, 1e-11 * crude, 1e-10);
  };
  return g(0, y);
}

}  // namespace hsf
