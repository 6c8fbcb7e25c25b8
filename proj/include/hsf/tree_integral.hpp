#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "hsf/forests.hpp"
#include "hsf/quad.hpp"

namespace hsf {

// Composite 8-point Gauss-Legendre grid on [0, zmax] with panels no wider than h.
quad::Rule make_grid(double zmax, double h);

// Integrates a product of bulk heat kernels over the positions in R+ of all
// internal vertices of a tree, by passing messages from the leaves inward on a
// quadrature grid. Leaves flagged as batched take every position in `batch`
// simultaneously, so one call returns a row of values, one per batch position.
// Messages are collected at an internal vertex next to a batched leaf, so a
// single batched leaf costs one grid-by-batch product.
class TreeIntegrator {
 public:
  TreeIntegrator(quad::Rule rule, std::vector<double> batch = {});

  // edge_var: variance of each edge of t. pos: position of each fixed vertex
  // (external, surface, root), indexed by vertex. batched: per-vertex flag.
  Eigen::RowVectorXd integrate(const Tree& t, const std::vector<double>& edge_var,
                               const std::vector<double>& pos, const std::vector<char>& batched);

  double integrate_scalar(const Tree& t, const std::vector<double>& edge_var,
                          const std::vector<double>& pos);

  const quad::Rule& rule() const { return rule_; }
  const std::vector<double>& batch() const { return batch_; }
  std::size_t batch_size() const { return batch_.empty() ? 1 : batch_.size(); }

 private:
  struct Ctx;
  const Eigen::MatrixXd& edge_matrix(double var);    // K(x_i, x_j) w_j
  const Eigen::MatrixXd& batch_matrix(double var);   // K(x_i, b_j)
  Eigen::MatrixXd product_at(const Ctx& c, int v, int parent);
  Eigen::MatrixXd grid_message(const Ctx& c, int v, int parent, int edge);
  Eigen::RowVectorXd point_message(const Ctx& c, int v, int parent, int edge);
  Eigen::RowVectorXd branch_at_fixed(const Ctx& c, int v, int parent);

  quad::Rule rule_;
  std::vector<double> batch_;
  Eigen::VectorXd x_, w_;
  std::unordered_map<std::uint64_t, Eigen::MatrixXd> edge_cache_;
  std::unordered_map<std::uint64_t, Eigen::MatrixXd> batch_cache_;
};

}  // namespace hsf
