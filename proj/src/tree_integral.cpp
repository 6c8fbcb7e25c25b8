#include "hsf/tree_integral.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "hsf/kernels.hpp"

namespace hsf {

quad::Rule make_grid(double zmax, double h) {
  if (!(zmax > 0.0) || !(h > 0.0)) throw std::domain_error("grid needs zmax > 0 and h > 0");
  int n = std::max(1, static_cast<int>(std::ceil(zmax / h)));
  std::vector<double> br(n + 1);
  for (int i = 0; i <= n; ++i) br[i] = zmax * i / n;
  return quad::gauss_legendre<8>(br);
}

struct TreeIntegrator::Ctx {
  const Tree& t;
  const std::vector<double>& var;
  const std::vector<double>& pos;
  const std::vector<char>& batched;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbour, edge)
};

namespace {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;

// Elementwise product with broadcasting of single columns.
MatrixXd mul(const MatrixXd& a, const MatrixXd& b) {
  if (a.cols() == b.cols()) return a.cwiseProduct(b);
  if (a.cols() == 1) return b.array().colwise() * a.col(0).array();
  if (b.cols() == 1) return a.array().colwise() * b.col(0).array();
  throw std::logic_error("batch width mismatch");
}

RowVectorXd mul_row(const RowVectorXd& a, const RowVectorXd& b) {
  if (a.size() == b.size()) return a.cwiseProduct(b);
  if (a.size() == 1) return b * a(0);
  if (b.size() == 1) return a * b(0);
  throw std::logic_error("batch width mismatch");
}

}  // namespace

TreeIntegrator::TreeIntegrator(quad::Rule rule, std::vector<double> batch)
    : rule_(std::move(rule)), batch_(std::move(batch)) {
  x_ = Eigen::Map<const Eigen::VectorXd>(rule_.x.data(), rule_.x.size());
  w_ = Eigen::Map<const Eigen::VectorXd>(rule_.w.data(), rule_.w.size());
}

const Eigen::MatrixXd& TreeIntegrator::edge_matrix(double var) {
  auto key = std::bit_cast<std::uint64_t>(var);
  auto it = edge_cache_.find(key);
  if (it != edge_cache_.end()) return it->second;
  const Eigen::Index n = x_.size();
  MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) k(i, j) = p_bulk(var, x_(i), x_(j)) * w_(j);
  return edge_cache_.emplace(key, std::move(k)).first->second;
}

const Eigen::MatrixXd& TreeIntegrator::batch_matrix(double var) {
  auto key = std::bit_cast<std::uint64_t>(var);
  auto it = batch_cache_.find(key);
  if (it != batch_cache_.end()) return it->second;
  const Eigen::Index n = x_.size(), nb = static_cast<Eigen::Index>(batch_.size());
  MatrixXd k(n, nb);
  for (Eigen::Index j = 0; j < nb; ++j)
    for (Eigen::Index i = 0; i < n; ++i) k(i, j) = p_bulk(var, x_(i), batch_[j]);
  return batch_cache_.emplace(key, std::move(k)).first->second;
}

// Product of all messages arriving at internal vertex v, except from parent.
Eigen::MatrixXd TreeIntegrator::product_at(const Ctx& c, int v, int parent) {
  MatrixXd f = MatrixXd::Ones(x_.size(), 1);
  for (auto [n, e] : c.adj[v])
    if (n != parent) f = mul(f, grid_message(c, n, v, e));
  return f;
}

// The branch rooted at v, seen on the grid of its internal parent.
Eigen::MatrixXd TreeIntegrator::grid_message(const Ctx& c, int v, int parent, int edge) {
  const double var = c.var[edge];
  if (c.t.vertices[v].role == Role::Internal) {
    MatrixXd f = product_at(c, v, parent);
    return edge_matrix(var) * f;
  }
  MatrixXd k;
  if (c.batched[v]) {
    k = batch_matrix(var);
  } else {
    k.resize(x_.size(), 1);
    for (Eigen::Index i = 0; i < x_.size(); ++i) k(i, 0) = p_bulk(var, x_(i), c.pos[v]);
  }
  RowVectorXd rest = branch_at_fixed(c, v, parent);
  if (rest.size() == 1) return k * rest(0);
  if (k.cols() == 1) return k * rest;
  return k.array().rowwise() * rest.array();
}

// The branch rooted at v, seen from its fixed parent.
Eigen::RowVectorXd TreeIntegrator::point_message(const Ctx& c, int v, int parent, int edge) {
  const double var = c.var[edge];
  const bool pb = c.batched[parent];
  if (c.t.vertices[v].role == Role::Internal) {
    MatrixXd f = product_at(c, v, parent);
    if (!pb) {
      Eigen::VectorXd k(x_.size());
      for (Eigen::Index i = 0; i < x_.size(); ++i) k(i) = p_bulk(var, c.pos[parent], x_(i)) * w_(i);
      return k.transpose() * f;
    }
    MatrixXd kw = batch_matrix(var).array().colwise() * w_.array();
    if (f.cols() == 1) return f.col(0).transpose() * kw;
    return kw.cwiseProduct(f).colwise().sum();
  }
  RowVectorXd k;
  const bool vb = c.batched[v];
  if (pb && vb) {
    k = RowVectorXd::Constant(static_cast<Eigen::Index>(batch_.size()), p_bulk(var, 0.0, 0.0));
  } else if (pb || vb) {
    double p = pb ? c.pos[v] : c.pos[parent];
    k.resize(static_cast<Eigen::Index>(batch_.size()));
    for (std::size_t j = 0; j < batch_.size(); ++j) k(j) = p_bulk(var, batch_[j], p);
  } else {
    k = RowVectorXd::Constant(1, p_bulk(var, c.pos[v], c.pos[parent]));
  }
  return mul_row(k, branch_at_fixed(c, v, parent));
}

Eigen::RowVectorXd TreeIntegrator::branch_at_fixed(const Ctx& c, int v, int parent) {
  RowVectorXd r = RowVectorXd::Ones(1);
  for (auto [n, e] : c.adj[v])
    if (n != parent) r = mul_row(r, point_message(c, n, v, e));
  return r;
}

Eigen::RowVectorXd TreeIntegrator::integrate(const Tree& t, const std::vector<double>& edge_var,
                                             const std::vector<double>& pos,
                                             const std::vector<char>& batched) {
  const int nv = static_cast<int>(t.vertices.size());
  if (static_cast<int>(edge_var.size()) != static_cast<int>(t.edges.size()) ||
      static_cast<int>(pos.size()) != nv || static_cast<int>(batched.size()) != nv)
    throw std::invalid_argument("tree integrator: size mismatch");
  for (int v = 0; v < nv; ++v)
    if (batched[v] && batch_.empty()) throw std::invalid_argument("batched leaf without batch positions");
  Ctx c{t, edge_var, pos, batched, std::vector<std::vector<std::pair<int, int>>>(nv)};
  for (int e = 0; e < static_cast<int>(t.edges.size()); ++e) {
    auto [a, b] = t.edges[e];
    c.adj[a].push_back({b, e});
    c.adj[b].push_back({a, e});
  }

  int root = -1;
  for (int v = 0; v < nv && root < 0; ++v)
    if (batched[v])
      for (auto [n, e] : c.adj[v])
        if (t.vertices[n].role == Role::Internal) {
          root = n;
          break;
        }
  for (int v = 0; v < nv && root < 0; ++v)
    if (t.vertices[v].role == Role::Internal) root = v;

  RowVectorXd out;
  if (root >= 0) {
    MatrixXd f = product_at(c, root, -1);
    out = w_.transpose() * f;
  } else {
    int start = 0;
    while (start < nv - 1 && batched[start]) ++start;
    out = branch_at_fixed(c, start, -1);
  }
  if (out.size() == 1 && !batch_.empty()) {
    bool any = false;
    for (char b : batched) any = any || b;
    if (any) out = RowVectorXd::Constant(static_cast<Eigen::Index>(batch_.size()), out(0));
  }
  return out;
}

double TreeIntegrator::integrate_scalar(const Tree& t, const std::vector<double>& edge_var,
                                        const std::vector<double>& pos) {
  std::vector<char> none(t.vertices.size(), 0);
  RowVectorXd r = integrate(t, edge_var, pos, none);
  return r(0);
}

}  // namespace hsf
