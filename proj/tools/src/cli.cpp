#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <random>

#include <CLI11.hpp>

#include "run_config.hpp"
#include "skt/acceptance.hpp"
#include "skt/version.hpp"

namespace skt::cli {

namespace {

// Raw flag values; folded into a RunConfig before any command runs.
struct Flags {
  std::string config_path;
  std::string family;
  std::string alpha, f, psi_size;
  std::vector<std::string> psi;
  std::optional<double> beta;
  std::optional<int> p, nu;
  std::string xi;
  std::string point, velocity;
  std::optional<double> horizon, tol, threshold, rel_tol, abs_tol, max_step, scale;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> directions;
  std::optional<int> max_order, expect;
  std::string monitor;
  std::string model_file, out_path, csv_path;
  std::optional<unsigned> threads;
  bool normalize = false;
  bool expect_complete = false;
  std::vector<int> only;
};

struct Context {
  RunConfig cfg;
  const Flags& flags;
  std::ostream& out;
  std::ostream& err;
};

YAML::Node chart_node_from_flags(const Flags& fl) {
  YAML::Node n;
  n["family"] = fl.family;
  if (!fl.alpha.empty()) n["alpha"] = fl.alpha;
  if (fl.beta) n["beta"] = *fl.beta;
  if (!fl.f.empty()) n["f"] = fl.f;
  if (fl.nu) n["nu"] = *fl.nu;
  if (fl.p) n["p"] = *fl.p;
  if (!fl.psi.empty()) {
    // "i,j=expr" entries, 1-based, completed symmetrically
    const int p = fl.p.value_or(1);
    std::vector<std::vector<std::string>> psi(static_cast<std::size_t>(p),
                                              std::vector<std::string>(static_cast<std::size_t>(p), "0"));
    for (const auto& item : fl.psi) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("--psi", "expected 'i,j=expression', got '" + item + "'");
      const auto idx = parse_list(item.substr(0, eq), "--psi");
      if (idx.size() != 2) throw ConfigError("--psi", "expected two indices in '" + item + "'");
      const int i = static_cast<int>(idx[0]), j = static_cast<int>(idx[1]);
      if (i < 1 || j < 1 || i > p || j > p) {
        throw ConfigError("--psi", "indices of '" + item + "' outside 1.." + std::to_string(p) + " (set --p)");
      }
      psi[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = item.substr(eq + 1);
      psi[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)] = item.substr(eq + 1);
    }
    n["psi"] = psi;
  }
  if (!fl.xi.empty()) {
    const auto v = parse_list(fl.xi, "--xi");
    const int nu = fl.nu.value_or(1);
    if (v.size() != static_cast<std::size_t>(nu * nu)) {
      throw ConfigError("--xi", "expected " + std::to_string(nu * nu) + " row-major entries for nu = " +
                                    std::to_string(nu));
    }
    YAML::Node xi;
    for (int i = 0; i < nu; ++i) {
      YAML::Node row;
      for (int j = 0; j < nu; ++j) row.push_back(v[static_cast<std::size_t>(i * nu + j)]);
      xi.push_back(row);
    }
    n["xi"] = xi;
  }
  return n;
}

RunConfig config_from_flags(const Flags& fl) {
  RunConfig cfg;
  if (!fl.config_path.empty()) cfg = load_config_file(fl.config_path);
  RunConfig o;
  if (!fl.family.empty()) {
    parse_chart(chart_node_from_flags(fl), o, "chart");
  } else if (!fl.alpha.empty() || fl.beta || !fl.f.empty() || fl.nu || fl.p || !fl.psi.empty() || !fl.xi.empty()) {
    throw ConfigError("--family", "family parameters were given without --family");
  }
  if (!fl.point.empty()) o.point = parse_list(fl.point, "--point");
  if (!fl.velocity.empty()) o.velocity = parse_list(fl.velocity, "--velocity");
  auto positive = [](const std::optional<double>& v, const char* key) {
    if (v && !(*v > 0.0)) throw ConfigError(key, "must be positive");
    return v;
  };
  o.horizon = positive(fl.horizon, "--horizon");
  o.tolerance = positive(fl.tol, "--tol");
  o.threshold = positive(fl.threshold, "--threshold");
  o.rel_tol = positive(fl.rel_tol, "--rel-tol");
  o.abs_tol = positive(fl.abs_tol, "--abs-tol");
  if (fl.max_step && *fl.max_step < 0.0) throw ConfigError("--max-step", "must be non-negative");
  o.max_step = fl.max_step;
  o.seed = fl.seed;
  if (fl.directions && *fl.directions == 0) throw ConfigError("--directions", "must be at least 1");
  o.directions = fl.directions;
  if (fl.max_order && *fl.max_order < 1) throw ConfigError("--max-order", "must be at least 1");
  o.max_order = fl.max_order;
  if (!fl.monitor.empty()) o.monitor = parse_monitor(fl.monitor, "--monitor");
  if (!fl.model_file.empty()) o.model_file = fl.model_file;
  if (fl.threads && *fl.threads == 0) throw ConfigError("--threads", "must be at least 1");
  o.threads = fl.threads;
  if (!fl.out_path.empty()) o.report_path = fl.out_path;
  if (!fl.csv_path.empty()) o.csv_path = fl.csv_path;
  merge_into(cfg, o);
  return cfg;
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes the report and a one-line summary; returns `code`.
int emit(Context& ctx, const std::string& command, Json result, const std::string& summary, int code) {
  // output paths do not affect results; leaving them out keeps reports comparable
  RunConfig embedded = ctx.cfg;
  embedded.report_path.reset();
  embedded.csv_path.reset();
  Json report{{"tool", "skt"},
              {"version", kVersion},
              {"command", command},
              {"config", config_to_json(embedded)},
              {"seed", ctx.cfg.seed ? Json(*ctx.cfg.seed) : Json(nullptr)},
              {"status", code == kSuccess ? "pass" : "fail"},
              {"result", std::move(result)}};
  if (!ctx.flags.normalize) report["generated_at"] = timestamp();
  const std::string text = report.dump(2) + "\n";
  if (ctx.cfg.report_path) {
    std::ofstream f(*ctx.cfg.report_path, std::ios::binary);
    if (!f) throw ConfigError("output.report", "cannot write '" + *ctx.cfg.report_path + "'");
    f << text;
    ctx.out << summary << "\n";
  } else {
    ctx.out << text;
    if (!summary.empty()) ctx.err << summary << "\n";
  }
  return code;
}

std::span<const double> span_of(const std::vector<double>& v) { return {v.data(), v.size()}; }

ZeroModel model_from_context(const RunConfig& cfg) {
  if (cfg.model_file) {
    std::ifstream f(*cfg.model_file);
    if (!f) throw ConfigError("model_file", "cannot read '" + *cfg.model_file + "'");
    Json doc;
    try {
      doc = Json::parse(f);
    } catch (const Json::exception& e) {
      throw ConfigError("model_file", std::string("not valid JSON: ") + e.what());
    }
    try {
      return model_from_json(doc);
    } catch (const ModelError& e) {
      throw ConfigError("model_file", e.what());
    }
  }
  const Chart chart = make_chart(cfg);
  const auto p = require_point(cfg, chart);
  return model_at(chart, span_of(p));
}

Vector require_velocity(const RunConfig& cfg, const Chart& chart) {
  if (!cfg.velocity) throw ConfigError("velocity", "required");
  if (cfg.velocity->size() != chart.dim()) {
    throw ConfigError("velocity", "has " + std::to_string(cfg.velocity->size()) + " components, chart dimension is " +
                                      std::to_string(chart.dim()));
  }
  return Eigen::Map<const Vector>(cfg.velocity->data(), static_cast<Eigen::Index>(cfg.velocity->size()));
}

Box to_box(const BoxConfig& b, std::size_t dim, const char* key) {
  if (b.lower.size() != dim) throw ConfigError(key, "must have " + std::to_string(dim) + " axes");
  return Box{b.lower, b.upper, b.cells};
}

std::string symmetry_message(const SymmetryReport& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s violation %.3g at [%d,%d,%d,%d]", s.worst_kind.c_str(), s.worst,
                s.worst_index[0] + 1, s.worst_index[1] + 1, s.worst_index[2] + 1, s.worst_index[3] + 1);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_catalog_list(Context& ctx) {
  Json fams = Json::array();
  for (const auto& f : family_list()) {
    fams.push_back({{"id", f.id}, {"coordinates", f.coordinates}, {"metric", f.metric}});
  }
  Json presets = Json::object();
  for (const auto& [name, text] : lorentz_presets()) presets[name] = text;
  return emit(ctx, "catalog list", {{"families", fams}, {"lorentz_presets", presets}},
              std::to_string(fams.size()) + " families", kSuccess);
}

int cmd_curvature(Context& ctx) {
  const Chart chart = make_chart(ctx.cfg);
  const auto p = require_point(ctx.cfg, chart);
  const CurvatureData d = curvature_at(chart, span_of(p));
  Json r = to_json(d);
  r["scalar_from_riemann"] = scalar_from_riemann(d);
  r["curvature_range_rank"] = curvature_range_rank(chart, span_of(p), ctx.cfg.tolerance.value_or(1e-9));
  r["symmetries"] = to_json(check_symmetries(model_at(chart, span_of(p)), 1e-9));
  char buf[64];
  std::snprintf(buf, sizeof buf, "scalar curvature %.17g", d.scalar);
  return emit(ctx, "curvature", std::move(r), buf, kSuccess);
}

int cmd_check_skew(Context& ctx) {
  const ZeroModel model = model_from_context(ctx.cfg);
  const double tol = ctx.cfg.tolerance.value_or(kDefaultTolerance);
  const auto sym = check_symmetries(model, tol);
  const auto comm = is_skew_tsankov(model, tol);
  const bool pass = sym.pass && comm.pass;
  std::string summary = pass ? "pass" : "fail";
  if (!sym.pass) summary += ": " + symmetry_message(sym);
  if (!comm.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, ": commutator norm %.3g exceeds %.3g", comm.worst_norm, comm.threshold);
    summary += buf;
  }
  return emit(ctx, "check skew-tsankov", {{"symmetries", to_json(sym)}, {"commutators", to_json(comm)}, {"pass", pass}},
              summary, pass ? kSuccess : kCheckFailed);
}

int cmd_check_nilpotency(Context& ctx) {
  const ZeroModel model = model_from_context(ctx.cfg);
  const auto r = nilpotency_order(model, ctx.cfg.max_order.value_or(6), ctx.cfg.tolerance.value_or(kDefaultTolerance));
  Json j = to_json(r);
  const std::string summary = r.order ? "order " + std::to_string(*r.order)
                                      : "not nilpotent within bound " + std::to_string(r.max_order);
  int code = kSuccess;
  if (ctx.flags.expect) {
    j["expected_order"] = *ctx.flags.expect;
    if (r.order != ctx.flags.expect) code = kCheckFailed;
  }
  return emit(ctx, "check nilpotency", std::move(j), summary, code);
}

int cmd_decompose(Context& ctx) {
  const ZeroModel model = model_from_context(ctx.cfg);
  const double tol = ctx.cfg.tolerance.value_or(kDefaultTolerance);
  const auto sym = check_symmetries(model, tol);
  if (!sym.pass) {
    return emit(ctx, "decompose", {{"symmetries", to_json(sym)}, {"error", symmetry_message(sym)}},
                "fail: " + symmetry_message(sym), kCheckFailed);
  }
  std::mt19937_64 rng(ctx.cfg.seed.value_or(0));
  try {
    const auto blocks = decompose(model, rng, {tol, 8});
    const double rec = max_abs_difference(reconstruct(blocks, model.inner()), model.tensor());
    Json j = to_json(blocks);
    j["reconstruction_error"] = rec;
    j["symmetries"] = to_json(sym);
    return emit(ctx, "decompose", std::move(j), std::to_string(blocks.planes.size()) + " blocks", kSuccess);
  } catch (const ModelError& e) {
    return emit(ctx, "decompose", {{"symmetries", to_json(sym)}, {"error", e.what()}},
                std::string("fail: ") + e.what(), kCheckFailed);
  }
}

int cmd_geodesic(Context& ctx) {
  const Chart chart = make_chart(ctx.cfg);
  const auto p = require_point(ctx.cfg, chart);
  const Vector v = require_velocity(ctx.cfg, chart);
  const double horizon = ctx.cfg.horizon.value_or(10.0);
  GeodesicState init{Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())), v, 0.0};
  const auto tr = integrate(chart, init, horizon, integrate_options(ctx.cfg));
  if (ctx.cfg.csv_path) {
    std::ofstream f(*ctx.cfg.csv_path, std::ios::binary);
    if (!f) throw ConfigError("output.csv", "cannot write '" + *ctx.cfg.csv_path + "'");
    write_trajectory_csv(f, chart, tr);
  }
  Json events = Json::array();
  for (const auto& e : tr.events) events.push_back(to_json(e));
  Json j{{"events", events},
         {"samples", tr.samples.size()},
         {"accepted_steps", tr.accepted_steps},
         {"rejected_steps", tr.rejected_steps},
         {"error_estimate", tr.error_estimate},
         {"drift", tr.drift},
         {"initial_speed_norm", tr.speed_norm.front()},
         {"final_position", to_json(tr.final_state().position)},
         {"final_velocity", to_json(tr.final_state().velocity)},
         {"final_affine_param", tr.final_state().affine_param},
         {"options", to_json(integrate_options(ctx.cfg))}};
  return emit(ctx, "geodesic", std::move(j),
              to_string(tr.terminal().kind) + " at affine parameter " + std::to_string(tr.terminal().affine_param),
              kSuccess);
}

int cmd_probe_completeness(Context& ctx) {
  const Chart chart = make_chart(ctx.cfg);
  const auto p = require_point(ctx.cfg, chart);
  if (!ctx.cfg.seed) ctx.cfg.seed = 0;
  const auto rep = completeness_probe(chart, span_of(p), ctx.cfg.directions.value_or(64),
                                      ctx.cfg.horizon.value_or(50.0), *ctx.cfg.seed, integrate_options(ctx.cfg),
                                      ctx.cfg.threads.value_or(0));
  const auto reached = rep.count(EventKind::HorizonReached);
  const bool complete = reached == rep.directions.size();
  Json j = to_json(rep);
  j["all_reached_horizon"] = complete;
  j["note"] = "finite-horizon probe; reaching the horizon is evidence of completeness, not proof";
  const int code = ctx.flags.expect_complete && !complete ? kCheckFailed : kSuccess;
  return emit(ctx, "probe completeness", std::move(j),
              std::to_string(reached) + "/" + std::to_string(rep.directions.size()) + " directions reached the horizon",
              code);
}

int cmd_probe_blowup(Context& ctx) {
  const Chart chart = make_chart(ctx.cfg);
  const auto p = require_point(ctx.cfg, chart);
  const Vector v = require_velocity(ctx.cfg, chart);
  const Monitor quantity = ctx.cfg.monitor.value_or(Monitor::ScalarCurvature);
  if (quantity == Monitor::None) throw ConfigError("monitor", "probe blowup needs scalar_curvature or ricci_vv");
  GeodesicState init{Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())), v, 0.0};
  const auto res = blowup_probe(chart, init, quantity, ctx.cfg.threshold.value_or(1e6), ctx.cfg.horizon.value_or(10.0),
                                integrate_options(ctx.cfg));
  if (ctx.cfg.csv_path) {
    std::ofstream f(*ctx.cfg.csv_path, std::ios::binary);
    if (!f) throw ConfigError("output.csv", "cannot write '" + *ctx.cfg.csv_path + "'");
    write_trajectory_csv(f, chart, res.trajectory);
  }
  Json j{{"quantity", to_string(quantity)},
         {"threshold", ctx.cfg.threshold.value_or(1e6)},
         {"crossing", res.crossing ? Json(*res.crossing) : Json("none")},
         {"terminal", to_json(res.trajectory.terminal())},
         {"samples", res.trajectory.samples.size()}};
  const std::string summary =
      res.crossing ? "crossing at affine parameter " + std::to_string(*res.crossing) : std::string("none");
  return emit(ctx, "probe blowup", std::move(j), summary, kSuccess);
}

int cmd_expmap_coverage(Context& ctx) {
  const Chart chart = make_chart(ctx.cfg);
  const auto p = require_point(ctx.cfg, chart);
  const std::size_t n = chart.dim();
  if (!ctx.cfg.velocity_box || !ctx.cfg.target_box) {
    if (n != 3) throw ConfigError("velocity_box", "required for charts that are not 3-dimensional");
    // the documented pair for the lorentz_mf charts at the origin
    const double pi = 3.141592653589793;
    if (!ctx.cfg.velocity_box) ctx.cfg.velocity_box = BoxConfig{{pi - 0.15, -1.0, -1.0}, {pi + 0.15, 2.0, 1.0}, {13, 13, 21}};
    if (!ctx.cfg.target_box) ctx.cfg.target_box = BoxConfig{{pi - 0.1, -0.5, -0.5}, {pi + 0.1, 0.5, 1.5}, {2, 2, 4}};
  }
  Box vel = to_box(*ctx.cfg.velocity_box, n, "velocity_box");
  const Box target = to_box(*ctx.cfg.target_box, n, "target_box");
  if (ctx.flags.scale) vel = vel.scaled(*ctx.flags.scale);
  const auto rep = exp_coverage(chart, span_of(p), vel, target, integrate_options(ctx.cfg, exp_map_defaults()),
                                ctx.cfg.threads.value_or(0));
  Json j = to_json(rep);
  j["velocity_box_used"] = {{"lower", vel.lower}, {"upper", vel.upper}, {"cells", vel.cells}};
  char buf[96];
  std::snprintf(buf, sizeof buf, "coverage %.6g (%zu uncovered cells)", rep.coverage, rep.uncovered.size());
  return emit(ctx, "expmap coverage", std::move(j), buf, kSuccess);
}

int cmd_verify_paper(Context& ctx) {
  AcceptanceOptions opts;
  opts.threads = ctx.cfg.threads.value_or(0);
  opts.only = ctx.flags.only;
  for (int id : opts.only) {
    if (id < 1 || id > acceptance_criterion_count()) {
      throw ConfigError("--only", "no criterion " + std::to_string(id));
    }
  }
  std::ostream& lines = ctx.cfg.report_path ? ctx.out : ctx.err;
  const auto results = run_acceptance(opts, [&](const CriterionResult& r) { lines << format_result(r) << std::endl; });
  Json arr = Json::array();
  std::size_t passed = 0;
  for (const auto& r : results) {
    Json e{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}};
    if (!ctx.flags.normalize) e["seconds"] = r.seconds;
    arr.push_back(std::move(e));
    passed += r.pass ? 1 : 0;
  }
  const bool ok = passed == results.size();
  return emit(ctx, "verify paper", {{"criteria", arr}, {"passed", passed}, {"total", results.size()}},
              std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed",
              ok ? kSuccess : kCheckFailed);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudo-Riemannian curvature, skew-Tsankov checks and geodesic probes", "skt"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Flags fl;

  app.add_option("--config", fl.config_path, "YAML run configuration")->check(CLI::ExistingFile);
  app.add_option("--family", fl.family, "warped3d | mbeta | dunn | fiedler | lorentz_mf");
  app.add_option("--alpha", fl.alpha, "warped3d: alpha(x1, x2)");
  app.add_option("--beta", fl.beta, "mbeta: beta > 0");
  app.add_option("--p", fl.p, "dunn: half dimension");
  app.add_option("--psi", fl.psi, "dunn: 'i,j=expression' (1-based, repeatable)");
  app.add_option("--nu", fl.nu, "fiedler: number of u coordinates");
  app.add_option("--xi", fl.xi, "fiedler: Xi entries, row-major, comma separated");
  app.add_option("--f", fl.f, "fiedler: f(u); lorentz_mf: f(y) or a preset name");
  app.add_option("--point", fl.point, "base point, comma separated");
  app.add_option("--velocity", fl.velocity, "initial velocity, comma separated");
  app.add_option("--horizon", fl.horizon, "affine parameter horizon");
  app.add_option("--seed", fl.seed, "random seed");
  app.add_option("--directions", fl.directions, "number of sampled directions");
  app.add_option("--tol", fl.tol, "check tolerance");
  app.add_option("--max-order", fl.max_order, "nilpotency search bound");
  app.add_option("--monitor,--quantity", fl.monitor, "none | scalar_curvature | ricci_vv");
  app.add_option("--threshold", fl.threshold, "blow-up threshold");
  app.add_option("--rel-tol", fl.rel_tol, "integrator relative tolerance");
  app.add_option("--abs-tol", fl.abs_tol, "integrator absolute tolerance");
  app.add_option("--max-step", fl.max_step, "integrator maximum step (0: horizon/100)");
  app.add_option("--model-file", fl.model_file, "ZeroModel JSON document");
  app.add_option("--threads", fl.threads, "worker threads (default: SKT_THREADS or 1)");
  app.add_option("--out", fl.out_path, "write the JSON report here instead of stdout");
  app.add_option("--csv", fl.csv_path, "write the trajectory CSV here");
  app.add_flag("--normalize", fl.normalize, "omit timestamps and timings from reports");

  auto* catalog = app.add_subcommand("catalog", "Family catalog");
  catalog->require_subcommand(1);
  auto* catalog_list = catalog->add_subcommand("list", "List families and presets");
  auto* curvature = app.add_subcommand("curvature", "Metric, Christoffels, curvature at a point");
  auto* check = app.add_subcommand("check", "Algebraic checks on the curvature model at a point");
  check->require_subcommand(1);
  auto* check_skew = check->add_subcommand("skew-tsankov", "Curvature symmetries and operator commutativity");
  auto* check_nil = check->add_subcommand("nilpotency", "Nilpotency order of the curvature operators");
  check_nil->add_option("--expect", fl.expect, "fail unless the order equals this");
  auto* decomp = app.add_subcommand("decompose", "Two-plane block decomposition of a Riemannian model");
  auto* geodesic = app.add_subcommand("geodesic", "Integrate one geodesic");
  auto* probe = app.add_subcommand("probe", "Geodesic probes");
  probe->require_subcommand(1);
  auto* probe_complete = probe->add_subcommand("completeness", "Sampled-direction finite-horizon probe");
  probe_complete->add_flag("--expect-complete", fl.expect_complete, "fail unless every direction reaches the horizon");
  auto* probe_blowup = probe->add_subcommand("blowup", "First crossing of a curvature threshold");
  auto* expmap = app.add_subcommand("expmap", "Exponential map probes");
  expmap->require_subcommand(1);
  auto* expmap_cov = expmap->add_subcommand("coverage", "Bin exp_P of a velocity grid into a target grid");
  expmap_cov->add_option("--scale", fl.scale, "scale the velocity box half-widths, keeping the cell size");
  auto* verify = app.add_subcommand("verify", "Acceptance suite");
  verify->require_subcommand(1);
  auto* verify_paper = verify->add_subcommand("paper", "Run every acceptance criterion");
  verify_paper->add_option("--only", fl.only, "criterion ids to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    Context ctx{config_from_flags(fl), fl, out, err};
    if (catalog_list->parsed()) return cmd_catalog_list(ctx);
    if (curvature->parsed()) return cmd_curvature(ctx);
    if (check_skew->parsed()) return cmd_check_skew(ctx);
    if (check_nil->parsed()) return cmd_check_nilpotency(ctx);
    if (decomp->parsed()) return cmd_decompose(ctx);
    if (geodesic->parsed()) return cmd_geodesic(ctx);
    if (probe_complete->parsed()) return cmd_probe_completeness(ctx);
    if (probe_blowup->parsed()) return cmd_probe_blowup(ctx);
    if (expmap_cov->parsed()) return cmd_expmap_coverage(ctx);
    if (verify_paper->parsed()) return cmd_verify_paper(ctx);
    err << "error: no command\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IntegrationError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ChartError& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace skt::cli
