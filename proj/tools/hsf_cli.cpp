#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsf/flow.hpp"
#include "hsf/forests.hpp"
#include "hsf/io.hpp"
#include "hsf/kernels.hpp"
#include "hsf/lemmas.hpp"
#include "hsf/propagators.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSchema = "hsf/1";

struct Common {
  std::string config;
  std::string out_dir;
};

fs::path output_dir(const Common& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("HSF_OUTPUT_DIR")) return env;
  return ".";
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  return json::parse(in);
}

template <class T>
void override(const json& cfg, const char* key, T& target) {
  if (cfg.contains(key)) target = cfg.at(key).get<T>();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

hsf::BoundaryKind make_bc(const std::string& name, double c) {
  hsf::Bc kind = hsf::parse_bc(name);
  if (kind == hsf::Bc::Robin) return hsf::BoundaryKind::robin(c);
  return {kind, 0.0};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  return json::parse(in);
}

// ---------------------------------------------------------------------------

struct KernelArgs {
  std::string bc = "neumann", part = "full";
  double c = 0.0, m = 1.0, tau = 1.0, z = 0.0, zp = 0.0;
};

int run_kernel(KernelArgs a, const Common& common) {
  json cfg = load_config(common.config);
  override(cfg, "bc", a.bc);
  override(cfg, "c", a.c);
  override(cfg, "m", a.m);
  override(cfg, "tau", a.tau);
  override(cfg, "z", a.z);
  override(cfg, "zp", a.zp);
  override(cfg, "part", a.part);
  hsf::KernelContext ctx{a.m, make_bc(a.bc, a.c)};
  hsf::KernelQuery q{a.tau, a.z, a.zp};
  double v;
  if (a.part == "full") v = ctx.bc.kind == hsf::Bc::Bulk ? hsf::eval_bulk(q) : hsf::eval_kernel(ctx, q);
  else if (a.part == "surface") v = hsf::eval_surface_kernel(ctx, q);
  else throw std::invalid_argument("part must be full or surface");
  emit({{"schema", kSchema},
        {"query", {{"bc", a.bc}, {"c", a.c}, {"m", a.m}, {"tau", a.tau}, {"z", a.z}, {"zp", a.zp}, {"part", a.part}}},
        {"value", v}});
  return 0;
}

struct PropArgs {
  std::string bc = "neumann", part = "full";
  double c = 0.0, m = 1.0, p = 0.0, z = 0.0, zp = 0.0, lambda = 0.0, lambda0 = 1.0;
  bool closed = false;
  bool proper_time = false;
};

int run_prop(PropArgs a, const Common& common) {
  json cfg = load_config(common.config);
  override(cfg, "bc", a.bc);
  override(cfg, "c", a.c);
  override(cfg, "m", a.m);
  override(cfg, "p", a.p);
  override(cfg, "z", a.z);
  override(cfg, "zp", a.zp);
  override(cfg, "lambda", a.lambda);
  override(cfg, "lambda0", a.lambda0);
  override(cfg, "part", a.part);
  override(cfg, "closed", a.closed);
  override(cfg, "proper_time", a.proper_time);
  auto bc = make_bc(a.bc, a.c);
  json query = {{"bc", a.bc}, {"c", a.c}, {"m", a.m}, {"p", a.p}, {"z", a.z}, {"zp", a.zp}};
  if (a.closed) {
    emit({{"schema", kSchema},
          {"query", query},
          {"value", hsf::closed_form_propagator(bc, a.p, a.z, a.zp, a.m)},
          {"method", "closed_form"}});
    return 0;
  }
  if (a.proper_time) {
    emit({{"schema", kSchema},
          {"query", query},
          {"value", hsf::proper_time_propagator(bc, a.p, a.z, a.zp, a.m)},
          {"method", "proper_time_closed_form"}});
    return 0;
  }
  hsf::PropagatorQuery q{a.p, a.z, a.zp, {a.m, bc}, {a.lambda, a.lambda0}};
  query["lambda"] = a.lambda;
  query["lambda0"] = a.lambda0;
  query["part"] = a.part;
  emit({{"schema", kSchema},
        {"query", query},
        {"value", hsf::flowing_propagator(q, hsf::parse_part(a.part))},
        {"method", "proper_time_gauss_kronrod"}});
  return 0;
}

// ---------------------------------------------------------------------------

struct ForestArgs {
  std::string action, kind = "forests", input, bulk, mode = "A";
  int s = 2, l = 1, max_internal = 8, a = 0, b = 0, x = 0, y = 0;
};

json validation_json(const hsf::Validation& v) { return {{"ok", v.ok}, {"reason", v.reason}}; }

int run_forest(ForestArgs a, const Common& common) {
  json cfg = load_config(common.config);
  override(cfg, "kind", a.kind);
  override(cfg, "s", a.s);
  override(cfg, "l", a.l);
  override(cfg, "max_internal", a.max_internal);
  json out = {{"schema", kSchema}, {"action", a.action}};
  bool ok = true;
  if (a.action == "enumerate") {
    json items = json::array();
    auto push_tree = [&](const hsf::Tree& t) {
      auto v = hsf::validate(t);
      ok = ok && v.ok;
      items.push_back({{"tree", hsf::to_json(t)}, {"valid", validation_json(v)}});
    };
    if (a.kind == "forests") {
      for (const auto& w : hsf::enumerate_all_forests(a.s, a.l, a.max_internal)) {
        auto v = hsf::validate(w);
        ok = ok && v.ok;
        items.push_back({{"forest", hsf::to_json(w)}, {"valid", validation_json(v)}});
      }
    } else if (a.kind == "surface") {
      for (const auto& t : hsf::enumerate_surface_trees(a.s, a.l, a.max_internal)) push_tree(t);
    } else if (a.kind == "bulk" || a.kind == "rooted") {
      std::vector<int> labels;
      for (int i = a.kind == "rooted" ? 2 : 1; i <= a.s; ++i) labels.push_back(i);
      auto trees = a.kind == "bulk" ? hsf::enumerate_bulk_trees(labels, a.l, a.max_internal)
                                    : hsf::enumerate_rooted_trees(labels, a.l, a.max_internal);
      for (const auto& t : trees) push_tree(t);
    } else {
      throw std::invalid_argument("kind must be forests, surface, bulk or rooted");
    }
    out["query"] = {{"kind", a.kind}, {"s", a.s}, {"l", a.l}, {"max_internal", a.max_internal}};
    out["count"] = items.size();
    out["items"] = items;
  } else if (a.action == "validate") {
    json j = read_json_file(a.input);
    hsf::Validation v = j.contains("trees") ? hsf::validate(hsf::forest_from_json(j))
                                            : hsf::validate(hsf::tree_from_json(j));
    ok = v.ok;
    out["valid"] = validation_json(v);
  } else if (a.action == "reduce") {
    auto w = hsf::forest_from_json(read_json_file(a.input));
    auto r = hsf::reduce_forest(w, a.a, a.b);
    auto v = hsf::validate(r.forest);
    ok = v.ok;
    out["forest"] = hsf::to_json(r.forest);
    out["tree_deleted"] = r.tree_deleted;
    out["valid"] = validation_json(v);
  } else if (a.action == "merge") {
    auto t = hsf::tree_from_json(read_json_file(a.bulk));
    auto w = hsf::forest_from_json(read_json_file(a.input));
    if (a.mode != "A" && a.mode != "B") throw std::invalid_argument("mode must be A or B");
    auto m = hsf::merge(a.mode == "A" ? hsf::MergeMode::A : hsf::MergeMode::B, t, a.x, w, a.y);
    auto v = hsf::validate(m);
    ok = v.ok;
    out["forest"] = hsf::to_json(m);
    out["valid"] = validation_json(v);
  }
  emit(out);
  if (!common.out_dir.empty() || std::getenv("HSF_OUTPUT_DIR"))
    write_file(output_dir(common) / ("forest_" + a.action + ".json"), out.dump(2) + "\n");
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct LemmaArgs {
  std::string lemma;
  hsf::SweepConfig sweep;
};

std::string lemma_csv(const hsf::SweepReport& r) {
  std::ostringstream os;
  os << "check";
  for (const auto& c : r.columns) os << "," << c;
  os << ",lhs,rhs,ratio,limit,ok\n";
  for (const auto& row : r.rows) {
    os << row.check;
    for (double p : row.params) os << "," << fmt(p);
    os << "," << fmt(row.lhs) << "," << fmt(row.rhs) << "," << fmt(row.ratio) << "," << fmt(row.limit)
       << "," << (row.ok ? 1 : 0) << "\n";
  }
  return os.str();
}

json lemma_summary(const hsf::SweepReport& r, const hsf::SweepConfig& cfg) {
  json checks = json::object();
  for (const auto& [name, c] : r.checks)
    checks[name] = {{"samples", c.samples},         {"violations", c.violations},
                    {"ratio_min", c.ratio_min},     {"ratio_max", c.ratio_max},
                    {"constant", c.constant},       {"batch_spread", c.batch_spread}};
  return {{"schema", kSchema},
          {"lemma", r.lemma},
          {"samples", cfg.samples},
          {"seed", cfg.seed},
          {"violations", r.violations()},
          {"worst_spread", r.worst_spread()},
          {"passed", r.passed()},
          {"checks", checks},
          {"constants", r.constants},
          {"notes", r.notes},
          {"diagnostics",
           {{"evaluations", r.diagnostics.evaluations},
            {"grid_beats_endpoint", r.diagnostics.grid_beats_endpoint},
            {"worst_gain", r.diagnostics.worst_gain}}},
          {"seconds", r.seconds}};
}

int run_lemma_cmd(LemmaArgs a, const Common& common) {
  json cfg = load_config(common.config);
  override(cfg, "lemma", a.lemma);
  override(cfg, "samples", a.sweep.samples);
  override(cfg, "seed", a.sweep.seed);
  override(cfg, "s", a.sweep.s);
  override(cfg, "l", a.sweep.l);
  override(cfg, "batches", a.sweep.batches);
  auto r = hsf::run_lemma(a.lemma, a.sweep);
  fs::path dir = output_dir(common);
  write_file(dir / ("lemma_" + a.lemma + ".csv"), lemma_csv(r));
  json s = lemma_summary(r, a.sweep);
  write_file(dir / ("lemma_" + a.lemma + ".json"), s.dump(2) + "\n");
  emit(s);
  return r.passed() ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct FlowArgs {
  std::string action;
  std::string bc = "robin";
  double coupling = 1.0, m = 1.0, c = 1.0, lambda0 = 50.0, lambda = 0.0;
  int steps_per_decade = 400, z_nodes = 257;
  double z_max = 10.0, lambda_min = 1e-2;
  double p = 0.5, y1 = 0.3, y2 = 0.7;
  bool zero_e = false;
  std::vector<double> c_list{1, 10, 100, 1000};
  std::vector<double> tau{1, 1, 1, 1}, y{0.5, 0.5, 0.5, 0.5};
  int r1 = 0, r2 = 0, points = 41;
};

hsf::flow::FlowConfig flow_config(FlowArgs& a, const json& cfg) {
  override(cfg, "coupling", a.coupling);
  override(cfg, "m", a.m);
  override(cfg, "c", a.c);
  override(cfg, "bc", a.bc);
  override(cfg, "lambda0", a.lambda0);
  override(cfg, "lambda", a.lambda);
  if (cfg.contains("grid")) {
    override(cfg.at("grid"), "z_nodes", a.z_nodes);
    override(cfg.at("grid"), "z_max", a.z_max);
  }
  if (cfg.contains("schedule")) {
    override(cfg.at("schedule"), "steps_per_decade", a.steps_per_decade);
    override(cfg.at("schedule"), "lambda_min", a.lambda_min);
  }
  hsf::flow::FlowConfig f;
  f.coupling = a.coupling;
  f.mass = a.m;
  f.bc = make_bc(a.bc, a.c);
  f.lambda0 = a.lambda0;
  f.steps_per_decade = a.steps_per_decade;
  f.lambda_min = a.lambda_min;
  f.z_nodes = a.z_nodes;
  f.z_max = a.z_max;
  return f;
}

json config_json(const hsf::flow::FlowConfig& f, const FlowArgs& a) {
  return {{"coupling", f.coupling}, {"m", f.mass},  {"bc", a.bc}, {"c", f.bc.c}, {"lambda0", f.lambda0},
          {"grid", {{"z_nodes", f.z_nodes}, {"z_max", f.z_max}}},
          {"schedule", {{"steps_per_decade", f.steps_per_decade}, {"lambda_min", f.lambda_min}}}};
}

int run_flow(FlowArgs a, const Common& common) {
  json cfg = load_config(common.config);
  override(cfg, "p", a.p);
  override(cfg, "y1", a.y1);
  override(cfg, "y2", a.y2);
  override(cfg, "c_list", a.c_list);
  override(cfg, "r1", a.r1);
  override(cfg, "r2", a.r2);
  auto f = flow_config(a, cfg);
  json out = {{"schema", kSchema}, {"action", a.action}, {"config", config_json(f, a)}};
  fs::path dir = output_dir(common);
  bool ok = true;
  namespace fl = hsf::flow;

  if (a.action == "tadpole") {
    std::ostringstream csv;
    if (f.bc.kind == hsf::Bc::Bulk) {
      auto t = fl::integrate_bulk_tadpole(f);
      csv << "lambda,a1\n";
      for (const auto& c : t.series) csv << fmt(c.lambda) << "," << fmt(c.s) << "\n";
      ok = std::abs(t.a_zero) < 1e-8;
      out["a1_lambda0"] = t.a_lambda0;
      out["a1_zero"] = t.a_zero;
    } else {
      auto t = fl::integrate_surface_tadpole(f);
      csv << "lambda,s1,e1\n";
      for (const auto& c : t.series) csv << fmt(c.lambda) << "," << fmt(c.s) << "," << fmt(c.e) << "\n";
      double scale = std::max(std::abs(t.s_lambda0), std::abs(t.e_lambda0));
      ok = std::abs(t.s_zero) < 1e-6 * std::max(scale, 1.0) && std::abs(t.e_zero) < 1e-6 * std::max(scale, 1.0) &&
           std::abs(t.e_lambda0 - t.h_lambda0) < 1e-10;
      out["s1_lambda0"] = t.s_lambda0;
      out["e1_lambda0"] = t.e_lambda0;
      out["h1_lambda0"] = t.h_lambda0;
      out["round_trip"] = {{"s1_zero", t.s_zero}, {"e1_zero", t.e_zero}, {"h1_zero", t.h_zero}};
      out["additivity_residual"] = t.additivity_residual;
    }
    write_file(dir / "flow_tadpole.csv", csv.str());
  } else if (a.action == "fourpoint") {
    override(cfg, "tau", a.tau);
    override(cfg, "y", a.y);
    fl::FourPointKinematics k;
    k.tau = a.tau;
    k.y = a.y;
    auto r = fl::one_loop_four_point(f, a.lambda, k);
    out["lambda"] = r.lambda;
    out["bulk_folded"] = r.bulk_folded;
    out["contact_folded"] = r.contact_folded;
    out["surface_folded"] = r.surface_folded;
    std::ostringstream csv;
    csv << "z,c1,c1_lambda0\n";
    for (std::size_t i = 0; i < r.z.size(); ++i) csv << fmt(r.z[i]) << "," << fmt(r.c[i]) << "," << fmt(r.c_ct[i]) << "\n";
    write_file(dir / "flow_fourpoint.csv", csv.str());
  } else if (a.action == "robin-limit") {
    auto r = fl::robin_dirichlet_limit(f, a.lambda, a.c_list);
    out["c"] = r.c;
    out["value"] = r.value;
    out["gap"] = r.gap;
    out["dirichlet"] = r.dirichlet;
    out["neumann"] = r.neumann;
    out["neumann_gap"] = r.neumann_gap;
    out["extrapolated"] = r.extrapolated;
    out["extrapolation_error"] = r.extrapolation_error;
    out["decreasing"] = r.decreasing;
    ok = r.decreasing && r.extrapolation_error < 0.02;
  } else if (a.action == "amputation") {
    override(cfg, "zero_e", a.zero_e);
    auto rc = f;
    rc.bc = hsf::BoundaryKind::robin(a.c);
    auto t = fl::integrate_surface_tadpole(rc);
    double e = a.zero_e ? 0.0 : t.e_lambda0;
    auto r = fl::amputation_comparison(t.s_lambda0, e, a.c, a.m, a.p, a.y1, a.y2);
    out["s_ct"] = t.s_lambda0;
    out["e_ct"] = e;
    out["kappa"] = r.kappa;
    out["interior"] = {{"numeric", r.interior}, {"closed", r.interior_closed}};
    out["eq127"] = {{"lhs", r.lhs127}, {"rhs", r.rhs127}, {"lhs_closed", r.lhs127_closed},
                    {"rhs_closed", r.rhs127_closed}, {"strict", r.strict127}};
    out["eq128"] = {{"lhs", r.lhs128}, {"rhs", r.rhs128}, {"lhs_closed", r.lhs128_closed},
                    {"rhs_closed", r.rhs128_closed}, {"strict", r.strict128}};
    out["boundary_derivative"] = {{"y_then_z", r.dz_limit_y_then_z}, {"z_then_y", r.dz_limit_z_then_y}};
    out["degenerate"] = r.degenerate;
    ok = r.degenerate ? (!r.strict127 && !r.strict128) : (r.strict127 && r.strict128);
  } else if (a.action == "power-counting") {
    auto r = fl::power_counting_probe(f, a.r1, a.r2, a.points);
    auto fit = [](const fl::ScalingFit& s) {
      return json{{"exponent", s.exponent}, {"intercept", s.intercept}, {"r2", s.r2}, {"vanishes", s.vanishes}};
    };
    out["bulk"] = fit(r.bulk);
    out["surface"] = fit(r.surface);
    out["gap"] = r.gap;
    ok = std::abs(r.gap - 1.0) <= 0.2;
    std::ostringstream csv;
    csv << "lambda,bulk_flow,surface_flow\n";
    for (std::size_t i = 0; i < r.lambda.size(); ++i)
      csv << fmt(r.lambda[i]) << "," << fmt(r.bulk_flow[i]) << "," << fmt(r.surface_flow[i]) << "\n";
    write_file(dir / "flow_power_counting.csv", csv.str());
  }
  out["passed"] = ok;
  write_file(dir / ("flow_" + a.action + ".json"), out.dump(2) + "\n");
  emit(out);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-space flow-equation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config, "JSON file whose keys override the flags");
  app.add_option("--out-dir", common.out_dir, "Output directory (default: $HSF_OUTPUT_DIR or .)");

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "Evaluate a heat kernel");
  kernel->add_option("--bc", ka.bc, "bulk, dirichlet, neumann or robin");
  kernel->add_option("--c", ka.c, "Robin parameter");
  kernel->add_option("--m", ka.m, "Mass");
  kernel->add_option("--tau", ka.tau, "Proper time");
  kernel->add_option("--z", ka.z);
  kernel->add_option("--zp", ka.zp);
  kernel->add_option("--part", ka.part, "full or surface");

  PropArgs pa;
  auto* prop = app.add_subcommand("prop", "Evaluate a flowing or closed-form propagator");
  prop->add_option("--bc", pa.bc);
  prop->add_option("--c", pa.c);
  prop->add_option("--m", pa.m);
  prop->add_option("--p", pa.p);
  prop->add_option("--z", pa.z);
  prop->add_option("--zp", pa.zp);
  prop->add_option("--lambda", pa.lambda, "Infrared scale");
  prop->add_option("--lambda0", pa.lambda0, "Ultraviolet cutoff");
  prop->add_option("--part", pa.part, "full, bulk or surface");
  prop->add_flag("--closed", pa.closed, "Unregularized closed form");
  prop->add_flag("--proper-time", pa.proper_time, "Exact proper-time integral with no cutoffs");

  ForestArgs fa;
  auto* forest = app.add_subcommand("forest", "Enumerate, reduce, merge or validate forests");
  forest->add_option("action", fa.action)->required()->check(CLI::IsMember({"enumerate", "reduce", "merge", "validate"}));
  forest->add_option("--kind", fa.kind, "forests, surface, bulk or rooted");
  forest->add_option("--s", fa.s);
  forest->add_option("--l", fa.l);
  forest->add_option("--max-internal", fa.max_internal);
  forest->add_option("--input", fa.input, "Forest (or tree for validate) JSON file");
  forest->add_option("--bulk", fa.bulk, "Bulk tree JSON file for merge");
  forest->add_option("--mode", fa.mode, "Merge mode A or B");
  forest->add_option("--a", fa.a, "First label to cut");
  forest->add_option("--b", fa.b, "Second label to cut");
  forest->add_option("--x", fa.x, "Bulk-tree label joined by merge");
  forest->add_option("--y", fa.y, "Forest label joined by merge");

  LemmaArgs la;
  auto* lemma = app.add_subcommand("lemma", "Seeded inequality sweep");
  lemma->add_option("--lemma", la.lemma)->required()->check(
      CLI::IsMember({"reduction", "ff-fusion", "tf-fusion", "chain", "testfn"}));
  lemma->add_option("--samples", la.sweep.samples);
  lemma->add_option("--seed", la.sweep.seed);
  lemma->add_option("--s", la.sweep.s);
  lemma->add_option("--l", la.sweep.l);
  lemma->add_option("--batches", la.sweep.batches);

  FlowArgs fl;
  auto* flow = app.add_subcommand("flow", "One-loop flow experiments");
  flow->add_option("action", fl.action)->required()->check(
      CLI::IsMember({"tadpole", "fourpoint", "robin-limit", "amputation", "power-counting"}));
  flow->add_option("--coupling", fl.coupling, "Quartic coupling");
  flow->add_option("--m", fl.m);
  flow->add_option("--c", fl.c, "Robin parameter");
  flow->add_option("--bc", fl.bc);
  flow->add_option("--lambda0", fl.lambda0);
  flow->add_option("--lambda", fl.lambda, "Scale at which results are reported");
  flow->add_option("--steps-per-decade", fl.steps_per_decade);
  flow->add_option("--z-nodes", fl.z_nodes);
  flow->add_option("--p", fl.p, "Momentum for amputation");
  flow->add_option("--y1", fl.y1);
  flow->add_option("--y2", fl.y2);
  flow->add_flag("--zero-e", fl.zero_e, "Force e = 0 in amputation");
  flow->add_option("--c-list", fl.c_list, "Robin parameters for robin-limit");
  flow->add_option("--tau", fl.tau, "Four proper times for fourpoint");
  flow->add_option("--y", fl.y, "Four positions for fourpoint");
  flow->add_option("--r1", fl.r1);
  flow->add_option("--r2", fl.r2);
  flow->add_option("--points", fl.points);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*kernel) return run_kernel(ka, common);
    if (*prop) return run_prop(pa, common);
    if (*forest) return run_forest(fa, common);
    if (*lemma) return run_lemma_cmd(la, common);
    if (*flow) return run_flow(fl, common);
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    // out-of-range flag values
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
