#include "kan3/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>

#include "json.hpp"
#include "kan3/blender.hpp"
#include "kan3/ergodic.hpp"
#include "kan3/parallel.hpp"

namespace kan3 {

using json = nlohmann::ordered_json;

KanSetup setup_from_config(const ExperimentConfig& c) {
  KanSetup s;
  s.matrix = {{{c.matrix[0], c.matrix[1]}, {c.matrix[2], c.matrix[3]}}};
  s.t = c.t;
  s.n0 = c.n0;
  s.epsilon = c.epsilon;
  s.center_scale = c.center_scale;
  s.layout.box_area_fraction = c.layout_box_area_fraction;
  s.layout.plateau = c.layout_plateau;
  s.layout.chart_half = c.layout_chart_half;
  s.layout.quadrature_n = c.layout_quadrature_n;
  s.fields.theta0 = c.theta0;
  return s;
}

namespace {

const char* label_name(std::uint8_t l) {
  switch (static_cast<BasinLabel>(l)) {
    case BasinLabel::Torus0: return "TORUS0";
    case BasinLabel::Torus1: return "TORUS1";
    default: return "UNDECIDED";
  }
}

class Context {
 public:
  Context(const ExperimentConfig& c, const std::string& experiment, bool write)
      : cfg(c), threads(resolve_threads(c.threads)), write_(write), dir_(c.out + "/" + experiment) {
    manifest.experiment = experiment;
    manifest.config_text = print_config(c);
    manifest.config_hash = fnv1a(manifest.config_text);
    manifest.code_version = code_version();
    if (write_) make_directories(dir_);
  }

  void emit(const std::string& name, const std::string& bytes) {
    manifest.outputs.push_back({name, fnv1a(bytes), bytes.size()});
    if (write_) write_file(dir_ + "/" + name, bytes);
  }
  void check(const std::string& name, bool ok) { manifest.checks.emplace_back(name, ok); }

  template <class F>
  auto timed(const std::string& name, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      manifest.timings.emplace_back(name,
                                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    };
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      finish();
    } else {
      auto r = f();
      finish();
      return r;
    }
  }
  double last_timing() const { return manifest.timings.empty() ? 0.0 : manifest.timings.back().second; }

  void finish_manifest() {
    if (write_) write_file(dir_ + "/manifest.json", manifest.to_json());
  }

  const ExperimentConfig& cfg;
  int threads;
  RunManifest manifest;
  json report;

 private:
  bool write_;
  std::string dir_;
};

std::shared_ptr<const KanMap> build_K(Context& ctx) {
  return ctx.timed("build", [&] { return std::make_shared<const KanMap>(make_K(make_params(setup_from_config(ctx.cfg)))); });
}

json condition_json(const ConditionReport& r) {
  return {{"t", r.t},
          {"K1", {{"pass", r.k1}, {"max_defect", r.k1_max_defect}}},
          {"K2",
           {{"pass", r.k2},
            {"r_fixed_points", r.r_fixed_count},
            {"s_fixed_points", r.s_fixed_count},
            {"r_multipliers", {r.r_mult0, r.r_mult1}},
            {"s_multipliers", {r.s_mult0, r.s_mult1}}}},
          {"K3",
           {{"pass", r.k3},
            {"min", r.k3_min},
            {"max", r.k3_max},
            {"lower", r.k3_lower},
            {"upper", r.k3_upper},
            {"lambda_inv", r.lambda_inv},
            {"lambda", r.lambda}}},
          {"K4", {{"pass", r.k4}, {"integral_torus0", r.k4_integral0}, {"integral_torus1", r.k4_integral1}, {"bound", r.k4_bound}}}};
}

void run_verify(Context& ctx) {
  auto K = build_K(ctx);
  auto r = ctx.timed("verify", [&] { return verify_kan_conditions(*K, ctx.cfg.verify_quadrature_n, ctx.cfg.verify_theta_n); });
  ctx.report["conditions"] = condition_json(r);
  ctx.check("K1", r.k1);
  ctx.check("K2", r.k2);
  ctx.check("K3", r.k3);
  ctx.check("K4", r.k4 && r.k4_integral0 <= r.k4_bound + 1e-3 && r.k4_integral1 <= r.k4_bound + 1e-3);
  ctx.check("runtime_under_60s", ctx.last_timing() < 60.0);
}

double sup_diff(const Vec3& a, const Vec3& b) {
  return std::max({std::fabs(a[0] - b[0]), std::fabs(a[1] - b[1]), std::fabs(a[2] - b[2])});
}

void run_blender(Context& ctx) {
  const BlenderModel m = default_blender();
  const double p_err = sup_diff(model_map(m, m.P), m.P);
  const double o_err = sup_diff(model_map(m, m.O), m.O);
  const GeometryReport g = certify_geometry(m);
  const bool cones = certify_cones(m, 0.1);
  auto d = ctx.timed("dichotomy", [&] {
    return verify_dichotomy(m, ctx.cfg.blender_samples, ctx.cfg.blender_max_iter, ctx.cfg.seed, ctx.threads);
  });
  const double dichotomy_time = ctx.last_timing();

  auto K = build_K(ctx);
  const BlenderModel mk = blender_from_kan(*K);
  auto cons = ctx.timed("consistency", [&] { return consistency_with_kan(*K, mk, ctx.cfg.consistency_samples, ctx.cfg.seed); });

  ctx.report["model"] = {{"lambda_pow", m.lambda_pow}, {"mu", m.mu}, {"lambda_prime", m.lambda_prime}, {"eps0", m.eps0}};
  ctx.report["fixed_points"] = {{"P_error", p_err}, {"O_error", o_err}};
  ctx.report["geometry"] = {{"two_components", g.two_components},
                            {"avoids_u_boundary", g.avoids_u_boundary},
                            {"avoids_ss_boundary", g.avoids_ss_boundary}};
  ctx.report["cones_eps0_0.1"] = cones;
  ctx.report["dichotomy"] = {{"samples", d.n_samples},
                             {"failures", d.failures},
                             {"ratio_violations", d.ratio_violations},
                             {"max_steps", d.max_steps},
                             {"min_ratio", d.min_ratio}};
  ctx.report["consistency"] = {{"model_lambda_pow", mk.lambda_pow},
                               {"model_mu", mk.mu},
                               {"samples", cons.samples},
                               {"sup_error", cons.sup_error},
                               {"error_at_P", cons.error_at_P}};

  CsvTable t{{"sample", "w0", "steps", "bound"}, {}};
  for (std::size_t i = 0; i < d.steps.size(); ++i)
    t.add({std::to_string(i), format_number(d.widths[i]), std::to_string(d.steps[i]), std::to_string(d.bounds[i])});
  ctx.emit("dichotomy.csv", t.str());

  ctx.check("fixed_points", p_err <= 1e-12 && o_err <= 1e-12);
  ctx.check("geometry", g.all());
  ctx.check("cones", cones);
  ctx.check("dichotomy_hits", d.failures == 0);
  ctx.check("dichotomy_ratio", d.ratio_violations == 0);
  ctx.check("dichotomy_runtime_under_10s", dichotomy_time < 10.0);
  ctx.check("consistency", cons.sup_error <= 1e-6);
}

GridSpec grid_of(const ExperimentConfig& c) { return {c.grid_nx, c.grid_ny, c.grid_nth, c.grid_samples}; }
CoarseSpec coarse_of(const ExperimentConfig& c) { return {c.coarse_nx, c.coarse_ny, c.coarse_nth}; }

// Labels table, per-level images, coarse-cell table; returns the intermingle report.
IntermingleReport emit_basin(Context& ctx, const BasinGrid& b, const std::string& prefix) {
  const GridSpec& g = b.grid;
  CsvTable t{{"i", "j", "k", "s", "x", "y", "theta", "label"}, {}};
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.nth; ++k) {
        std::size_t cell = (static_cast<std::size_t>(i) * g.ny + j) * g.nth + k;
        for (int s = 0; s < g.samples_per_cell; ++s) {
          Point3 p = b.sample_point(cell, s);
          t.add({std::to_string(i), std::to_string(j), std::to_string(k), std::to_string(s), format_number(p.base.x),
                 format_number(p.base.y), format_number(p.theta),
                 label_name(b.labels[cell * g.samples_per_cell + s])});
        }
      }
  ctx.emit(prefix + "labels.csv", t.str());

  for (int k = 0; k < g.nth; ++k) {
    std::vector<std::uint8_t> img(static_cast<std::size_t>(g.nx) * g.ny);
    for (int row = 0; row < g.ny; ++row)
      for (int i = 0; i < g.nx; ++i) {
        int j = g.ny - 1 - row;
        std::size_t cell = (static_cast<std::size_t>(i) * g.ny + j) * g.nth + k;
        img[static_cast<std::size_t>(row) * g.nx + i] = b.labels[cell * g.samples_per_cell];
      }
    char name[32];
    std::snprintf(name, sizeof name, "slice_%02d.ppm", k);
    ctx.emit(prefix + name, ppm_bytes(img, g.nx, g.ny));
  }

  IntermingleReport r = intermingled_test(b, coarse_of(ctx.cfg));
  CsvTable ct{{"ci", "cj", "ck", "torus0", "torus1", "undecided", "both"}, {}};
  const CoarseSpec& c = r.coarse;
  for (int i = 0; i < c.cx; ++i)
    for (int j = 0; j < c.cy; ++j)
      for (int k = 0; k < c.cth; ++k) {
        const auto& n = r.cell_counts[(static_cast<std::size_t>(i) * c.cy + j) * c.cth + k];
        std::size_t tot = n[0] + n[1] + n[2];
        bool both = n[0] > 0 && n[1] > 0 && n[0] >= r.min_fraction * tot && n[1] >= r.min_fraction * tot;
        ct.add({std::to_string(i), std::to_string(j), std::to_string(k), std::to_string(n[0]), std::to_string(n[1]),
                std::to_string(n[2]), both ? "1" : "0"});
      }
  ctx.emit(prefix + "coarse.csv", ct.str());
  return r;
}

json intermingle_json(const IntermingleReport& r) {
  return {{"torus0", r.torus0},
          {"torus1", r.torus1},
          {"undecided", r.undecided},
          {"decided_fraction", r.decided_fraction},
          {"undecided_rate", r.undecided_rate},
          {"coarse_cells", r.cells_total},
          {"coarse_cells_both", r.cells_both},
          {"coarse_pass_fraction", r.pass_fraction}};
}

void run_basin(Context& ctx) {
  auto K = build_K(ctx);
  const auto& c = ctx.cfg;
  auto b = ctx.timed("classify", [&] { return classify_basins(*K, grid_of(c), c.iterations, c.tail, c.delta, c.seed, ctx.threads); });
  IntermingleReport r = emit_basin(ctx, b, "");
  ctx.report["grid"] = {{"nx", c.grid_nx}, {"ny", c.grid_ny}, {"nth", c.grid_nth}, {"samples", c.grid_samples},
                        {"n", c.iterations}, {"tail", c.tail}, {"delta", c.delta}};
  ctx.report["intermingle"] = intermingle_json(r);
  ctx.check("decided_99", r.decided_fraction >= 0.99);
  ctx.check("both_labels", r.torus0 > 0 && r.torus1 > 0);
  ctx.check("coarse_both_95", r.pass_fraction >= 0.95);
}

void run_lyapunov(Context& ctx) {
  auto K = build_K(ctx);
  const auto& c = ctx.cfg;
  auto r = ctx.timed("quadrature", [&] { return verify_kan_conditions(*K, c.verify_quadrature_n, c.verify_theta_n); });
  const TorusPoint2 x{counter_uniform(c.seed, 7, 0), counter_uniform(c.seed, 7, 1)};
  double l0 = 0.0, l1 = 0.0;
  ctx.timed("orbits", [&] {
    std::vector<double> out(2);
    parallel_for(2, ctx.threads, [&](std::size_t i) { out[i] = center_lyapunov(*K, {x, i == 0 ? 0.0 : -1.0}, c.lyapunov_n); });
    l0 = out[0];
    l1 = out[1];
  });
  const double rel0 = std::fabs(l0 - r.k4_integral0) / std::fabs(r.k4_integral0);
  const double rel1 = std::fabs(l1 - r.k4_integral1) / std::fabs(r.k4_integral1);
  ctx.report["seed_point"] = {x.x, x.y};
  ctx.report["n"] = c.lyapunov_n;
  ctx.report["torus0"] = {{"orbit", l0}, {"quadrature", r.k4_integral0}, {"relative_error", rel0}};
  ctx.report["torus1"] = {{"orbit", l1}, {"quadrature", r.k4_integral1}, {"relative_error", rel1}};
  ctx.check("torus0_matches_quadrature_5pct", rel0 <= 0.05);
  ctx.check("both_negative", l0 < 0.0 && l1 < 0.0);
}

void run_gibbs(Context& ctx) {
  auto K = build_K(ctx);
  const auto& c = ctx.cfg;
  const Point3 seed{{counter_uniform(c.seed, 11, 0), counter_uniform(c.seed, 11, 1)},
                    -1.0 + 2.0 * counter_uniform(c.seed, 11, 2)};
  json rows = json::array();
  CsvTable t{{"n", "mass_torus0", "mass_torus1", "tube_mass", "tv_defect"}, {}};
  double mass_long = 0.0, tv_long = 0.0, tv_short = 0.0;
  for (long n : {c.gibbs_n_short, c.gibbs_n}) {
    ctx.timed("push_" + std::to_string(n), [&] {
      EmpiricalMeasure m = push_u_disk(*K, seed, c.gibbs_u_length, n, c.gibbs_samples, ctx.threads);
      EmpiricalMeasure fm = push_forward(*K, m, ctx.threads);
      const double m0 = m.tube_mass(TorusSelector::Zero, c.delta);
      const double m1 = m.tube_mass(TorusSelector::One, c.delta);
      const double tv = tv_binned(m, fm);
      rows.push_back({{"n", n}, {"mass_torus0", m0}, {"mass_torus1", m1}, {"tv_defect", tv}});
      t.add({std::to_string(n), format_number(m0), format_number(m1), format_number(m0 + m1), format_number(tv)});
      if (n == c.gibbs_n) {
        mass_long = m0 + m1;
        tv_long = tv;
      } else {
        tv_short = tv;
      }
    });
  }
  ctx.report["seed_point"] = {seed.base.x, seed.base.y, seed.theta};
  ctx.report["u_length"] = c.gibbs_u_length;
  ctx.report["disk_samples"] = c.gibbs_samples;
  ctx.report["delta"] = c.delta;
  ctx.report["measures"] = rows;
  ctx.emit("gibbs.csv", t.str());
  ctx.check("tube_mass_90", mass_long >= 0.9);
  ctx.check("tv_defect_005", tv_long <= 0.05);
  ctx.check("tv_decreases", tv_long < tv_short);
}

void run_coverage(Context& ctx) {
  auto K = build_K(ctx);
  const auto& c = ctx.cfg;
  CoverageSpec spec{c.coverage_nx, c.coverage_ny, c.coverage_nth, c.coverage_L, c.coverage_budget};
  json objs = json::object();
  CsvTable t{{"object", "cell", "hit"}, {}};
  for (CoverageObject o : {CoverageObject::ForwardFiberP, CoverageObject::BackwardFiberQ, CoverageObject::ForwardUDiskP,
                           CoverageObject::BackwardStableP}) {
    auto r = ctx.timed(std::string("coverage_") + to_string(o),
                       [&] { return manifold_coverage(*K, o, c.coverage_depth, spec, ctx.threads); });
    objs[to_string(o)] = {{"fraction", r.fraction},
                          {"depth", r.depth},
                          {"depth_full", r.depth_full},
                          {"points_used", r.points_used},
                          {"budget_exhausted", r.budget_exhausted}};
    for (std::size_t i = 0; i < r.hit.size(); ++i) t.add({to_string(o), std::to_string(i), std::to_string(r.hit[i])});
    if (o == CoverageObject::ForwardFiberP) ctx.check("forward_fiber_p_full", r.fraction == 1.0 && !r.budget_exhausted);
    if (o == CoverageObject::BackwardFiberQ) ctx.check("backward_fiber_q_full", r.fraction == 1.0 && !r.budget_exhausted);
  }
  ctx.report["grid"] = {{"nx", c.coverage_nx}, {"ny", c.coverage_ny}, {"nth", c.coverage_nth}, {"L", c.coverage_L},
                        {"budget", c.coverage_budget}, {"depth", c.coverage_depth}};
  ctx.report["objects"] = objs;
  ctx.emit("coverage.csv", t.str());
}

json mixing_json(const MixingTable& m) {
  json out = json::array();
  for (std::size_t p = 0; p < m.pairs.size(); ++p) {
    std::vector<long> row(m.counts[p].begin(), m.counts[p].end());
    out.push_back({{"pair", m.pairs[p].name}, {"first_hit", m.first_hit(p)}, {"counts", row}});
  }
  return out;
}

void emit_mixing(Context& ctx, const MixingTable& m, const std::string& name) {
  CsvTable t{{"pair", "n", "count"}, {}};
  for (std::size_t p = 0; p < m.pairs.size(); ++p)
    for (int n = 0; n <= m.N; ++n) t.add({m.pairs[p].name, std::to_string(n), std::to_string(m.counts[p][n])});
  ctx.emit(name, t.str());
}

void run_mixing(Context& ctx) {
  auto K = build_K(ctx);
  const auto& c = ctx.cfg;
  const Region3 Ua{0, 1, 0, 1, 0.05, 0.95};
  const Region3 lower{0, 1, 0, 1, -1.0, 0.0};
  long flipped = 0;
  ctx.timed("flip", [&] {
    std::vector<std::uint8_t> ok(static_cast<std::size_t>(c.mixing_flip_samples));
    parallel_for(ok.size(), ctx.threads, [&](std::size_t i) {
      Point3 p = Ua.sample(counter_uniform(c.seed, 13, i, 0), counter_uniform(c.seed, 13, i, 1),
                           counter_uniform(c.seed, 13, i, 2));
      ok[i] = lower.contains(K->apply(p)) ? 1 : 0;
    });
    for (auto v : ok) flipped += v;
  });
  std::vector<RegionPair> pairs = {{"Ua-Ua", Ua, Ua}, {"Ua-Ud", Ua, {0, 1, 0, 1, -0.95, -0.05}}};
  auto m = ctx.timed("diagnostic", [&] { return mixing_diagnostic(*K, pairs, c.mixing_N, c.mixing_samples, c.seed, ctx.threads); });
  bool odd_empty = true;
  for (int n = 1; n <= m.N; n += 2) odd_empty = odd_empty && !m.hit(0, n);
  ctx.report["flip"] = {{"samples", c.mixing_flip_samples}, {"into_lower_half", flipped}};
  ctx.report["pairs"] = mixing_json(m);
  emit_mixing(ctx, m, "mixing.csv");
  ctx.check("flip_all", flipped == c.mixing_flip_samples);
  ctx.check("odd_returns_empty", odd_empty);
  ctx.check("opposite_hit_at_1", m.hit(1, 1));
}

std::string status_text(const SkewMap& g, TorusSelector w, const ExperimentConfig& c) {
  try {
    return to_string(su_torus_status(g, w, c.perturb_depth, c.perturb_tol));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Inconclusive) throw;
    return "Inconclusive";
  }
}

void run_perturb(Context& ctx) {
  auto K = build_K(ctx);
  const auto& c = ctx.cfg;
  const TorusSelector broken = c.perturb_torus == 0 ? TorusSelector::Zero : TorusSelector::One;
  const TorusSelector kept = c.perturb_torus == 0 ? TorusSelector::One : TorusSelector::Zero;
  const std::uint8_t kept_label = c.perturb_torus == 0 ? 1 : 0;

  PerturbedMap g = break_torus(K, c.perturb_eta, broken);
  PerturbedMap g0 = break_torus(K, 0.0, broken);
  std::string sb, sk, s00, s01;
  ctx.timed("su_status", [&] {
    sb = status_text(g, broken, c);
    sk = status_text(g, kept, c);
    s00 = status_text(g0, TorusSelector::Zero, c);
    s01 = status_text(g0, TorusSelector::One, c);
  });

  auto b = ctx.timed("classify", [&] { return classify_basins(g, grid_of(c), c.iterations, c.tail, c.delta, c.seed, ctx.threads); });
  IntermingleReport r = emit_basin(ctx, b, "");
  const std::size_t decided = r.torus0 + r.torus1;
  const double kept_share =
      decided ? static_cast<double>(kept_label == 1 ? r.torus1 : r.torus0) / static_cast<double>(decided) : 0.0;

  auto m = ctx.timed("mixing", [&] {
    return mixing_diagnostic(g, standard_region_pairs(), c.mixing_N, c.mixing_samples, c.seed, ctx.threads);
  });
  bool all_hit = true;
  for (std::size_t p = 0; p < m.pairs.size(); ++p)
    for (int n = 16; n <= std::min(64, m.N); ++n) all_hit = all_hit && m.hit(p, n);
  emit_mixing(ctx, m, "mixing.csv");

  // eta = 0 leaves K unchanged: spot-check labels on a small grid.
  bool eta0_identical = true;
  ctx.timed("eta0_labels", [&] {
    GridSpec small{4, 4, c.grid_nth, 1};
    auto bk = classify_basins(*K, small, c.iterations, c.tail, c.delta, c.seed, ctx.threads);
    auto bg = classify_basins(g0, small, c.iterations, c.tail, c.delta, c.seed, ctx.threads);
    eta0_identical = bk.labels == bg.labels;
  });

  ctx.report["eta"] = c.perturb_eta;
  ctx.report["broken_torus"] = c.perturb_torus;
  ctx.report["ball"] = {{"center", {g.ball_center().x, g.ball_center().y}}, {"radius", g.ball_radius()}};
  ctx.report["status"] = {{"broken", sb}, {"kept", sk}, {"eta0_torus0", s00}, {"eta0_torus1", s01}};
  ctx.report["intermingle"] = intermingle_json(r);
  ctx.report["kept_share_of_decided"] = kept_share;
  ctx.report["mixing"] = mixing_json(m);
  ctx.report["eta0_labels_identical"] = eta0_identical;

  ctx.check("broken_reports_broken", sb == "Broken");
  ctx.check("kept_reports_continuation", sk == "Continuation");
  ctx.check("kept_share_99", kept_share >= 0.99);
  ctx.check("mixing_hits_16_64", all_hit && m.N >= 64);
  ctx.check("eta0_continuation", s00 == "Continuation" && s01 == "Continuation");
  ctx.check("eta0_labels_identical", eta0_identical);
}

const std::map<std::string, std::function<void(Context&)>>& table() {
  static const std::map<std::string, std::function<void(Context&)>> t = {
      {"verify", run_verify},     {"blender", run_blender}, {"basin", run_basin},   {"lyapunov", run_lyapunov},
      {"gibbs", run_gibbs},       {"coverage", run_coverage}, {"mixing", run_mixing}, {"perturb", run_perturb}};
  return t;
}

}  // namespace

RunResult run(const ExperimentConfig& c, const std::string& experiment, bool write_files) {
  auto it = table().find(experiment);
  if (it == table().end()) throw Error(ErrorKind::InvalidArgument, "unknown experiment '" + experiment + "'");
  Context ctx(c, experiment, write_files);
  try {
    it->second(ctx);
  } catch (const Error& e) {
    ctx.manifest.error = e.what();
  }
  std::string report = ctx.report.dump(2) + "\n";
  ctx.emit("report.json", report);
  ctx.finish_manifest();
  return {ctx.manifest, report};
}

}  // namespace kan3
