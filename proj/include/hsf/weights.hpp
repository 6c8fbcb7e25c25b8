#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "hsf/forests.hpp"
#include "hsf/propagators.hpp"
#include "hsf/tree_integral.hpp"

namespace hsf {

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class LineKind : std::uint8_t { Internal, External, Surface };

// Lines touching an external vertex are external, lines touching the surface
// vertex are surface lines, everything else (including root lines) is internal.
std::vector<LineKind> line_kinds(const Tree& t);

// Scales attached to the lines of one tree, keyed by edge index.
struct LineParams {
  std::map<int, double> internal;  // Lambda_I
  std::map<int, double> external;  // tau_J; falls back to the query's tau for the label
  std::map<int, double> surface;   // tilde Lambda_k
  double delta = 0.1;
};

struct WeightQuery {
  std::vector<double> positions;  // y_1..y_s; for rooted trees positions[0] is z_1
  std::vector<double> tau;        // tau_1..tau_s
  CutoffPair cut{1.0, 1.0};
};

void check_query(const WeightQuery& q);
void check_lines(const Tree& t, const LineParams& lines, const CutoffPair& cut);

// Every internal line at lambda_internal and every surface line at lambda_surface.
LineParams uniform_lines(const Tree& t, double lambda_internal, double lambda_surface, double delta);

// Variance of each edge; singleton trees of a forest pass doubled = true.
std::vector<double> edge_variances(const Tree& t, const LineParams& lines, const WeightQuery& q,
                                   bool doubled = false);

// Pointwise product of heat kernels. internal_positions lists the internal
// vertices in vertex order.
double weight_factor(const Tree& t, const LineParams& lines, const WeightQuery& q,
                     const std::vector<double>& internal_positions, bool doubled = false);
double weight_factor(const Forest& w, const std::vector<LineParams>& lines, const WeightQuery& q,
                     const std::vector<std::vector<double>>& internal_positions);

struct SupOptions {
  int grid_points = 16;      // per log-grid family, endpoints included
  bool refine = true;        // golden-section polish of the best grid scale
  double panel_ratio = 1.0;  // GL panel width over the narrowest kernel width
  double z_sigmas = 6.0;     // grid extent in path standard deviations
  int depth = 4;             // lines on the longest path to an anchor
  int max_internal = 8;
  bool bulk_chain_closed_form = true;  // semi-analytic bulk chains with 1-2 internal vertices
};

struct WeightValue {
  double value = 0.0;
  double endpoint = 0.0;  // all lines at lambda
  double lambda_internal = 0.0;
  double lambda_surface = 0.0;
};

struct WeightDiagnostics {
  long evaluations = 0;          // tree sups computed (per batch column)
  long grid_beats_endpoint = 0;  // sup above 1.01 x endpoint
  double worst_gain = 1.0;       // largest sup / endpoint seen
};

enum class Family { Surface, Rooted, Bulk };

Family parse_family(const std::string& name);

// Sup over line scales of the internal-vertex integral of weight_factor.
// Scales are searched on the endpoint, a common log grid and a surface-only
// log grid; the best point is polished when opt.refine is set.
class WeightEngine {
 public:
  explicit WeightEngine(WeightQuery q, SupOptions opt = {}, std::vector<int> batched_labels = {},
                        std::vector<double> batch = {});

  Eigen::RowVectorXd tree(const Tree& t, double delta, bool doubled = false);
  WeightValue tree_detail(const Tree& t, double delta, bool doubled = false);  // unbatched only
  Eigen::RowVectorXd tree_at(const Tree& t, double delta, bool doubled, double lambda_internal,
                             double lambda_surface);
  Eigen::RowVectorXd forest(const Forest& w, double delta);
  Eigen::RowVectorXd global(int s, int l, Family f, double delta);
  // Sum over the single-label chains with the label's tau doubled.
  Eigen::RowVectorXd chain_sum(int label, int l, double delta);

  std::size_t width() const { return batch_.empty() ? 1 : batch_.size(); }
  const std::vector<double>& batch() const { return batch_; }
  const WeightQuery& query() const { return q_; }
  const WeightDiagnostics& diagnostics() const { return diag_; }

 private:
  TreeIntegrator& integrator(double li, double ls, TreeKind kind);
  Eigen::RowVectorXd evaluate(const Tree& t, double delta, bool doubled, double li, double ls);
  Eigen::RowVectorXd bulk_chain_value(const Tree& t, const std::vector<double>& var);
  std::vector<double> positions_for(const Tree& t) const;
  std::vector<char> batched_for(const Tree& t) const;

  WeightQuery q_;
  SupOptions opt_;
  std::vector<int> batched_labels_;
  std::vector<double> batch_;
  std::vector<double> scales_;
  std::map<std::tuple<double, double, int>, std::unique_ptr<TreeIntegrator>> grids_;
  WeightDiagnostics diag_;
};

WeightValue integrated_weight_factor(const Tree& t, const WeightQuery& q, double delta,
                                     const SupOptions& opt = {}, bool doubled = false);
double integrated_weight_factor(const Forest& w, const WeightQuery& q, double delta,
                                const SupOptions& opt = {});
double global_weight_factor(int s, int l, const WeightQuery& q, Family f, double delta,
                            const SupOptions& opt = {});

// Three-arm s=2 surface tree collapsed onto a single internal vertex.
struct ChainCollapse {
  int v1 = 0, v2 = 0, v0 = 0;  // degree-2 vertices on the arms to y_1, y_2, 0
  double c1 = 0.0, c2 = 0.0;
  double lambda1 = 0.0;        // tilde Lambda_1
  double bound = 0.0;          // single integral over z
  double weight = 0.0;         // internal-vertex integral at the given scales
  int v() const { return v1 + v2 + v0; }
};

ChainCollapse chain_collapse(const Tree& t, const LineParams& lines, const WeightQuery& q);

// Forest of two chains: product of p_B(c~_i (1+delta); y_i, 0).
struct ChainPairCollapse {
  double c1 = 0.0, c2 = 0.0;
  double bound = 0.0;
  double weight = 0.0;
  int v21 = 0, v22 = 0;
};

ChainPairCollapse chain_pair_collapse(const Forest& w, const std::vector<LineParams>& lines,
                                      const WeightQuery& q);

// Integral over R+ of a chain given as (variance, next) with the fixed ends,
// by nested adaptive Gauss-Kronrod. Used as an independent check of the grid.
double chain_integral_nested(double y, const std::vector<double>& variances, double end);

}  // namespace hsf
