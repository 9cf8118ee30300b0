#include "run_config.hpp"

#include <charconv>
#include <set>

namespace skt::cli {

namespace {

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& key) {
  if (!node.IsMap()) throw ConfigError(key, "expected a table");
  for (const auto& kv : node) {
    const auto name = kv.first.as<std::string>();
    if (!allowed.contains(name)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(key.empty() ? name : key + "." + name, "unknown key (expected one of: " + list + ")");
    }
  }
}

std::string join(const std::string& key, const std::string& child) { return key.empty() ? child : key + "." + child; }

double as_double(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError(key, "expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "expected a number, got '" + n.Scalar() + "'");
  }
}

long as_int(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError(key, "expected an integer");
  try {
    return n.as<long>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "expected an integer, got '" + n.Scalar() + "'");
  }
}

std::string as_text(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError(key, "expected a string");
  return n.Scalar();
}

std::vector<double> as_doubles(const YAML::Node& n, const std::string& key) {
  if (n.IsScalar()) return parse_list(n.Scalar(), key);
  if (!n.IsSequence()) throw ConfigError(key, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_double(n[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> as_texts(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ConfigError(key, "expected a list");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_text(n[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<std::string>> as_text_matrix(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ConfigError(key, "expected a list of rows");
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_texts(n[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

BoxConfig parse_box(const YAML::Node& n, const std::string& key) {
  check_keys(n, {"lower", "upper", "cells"}, key);
  for (const char* k : {"lower", "upper", "cells"}) {
    if (!n[k]) throw ConfigError(join(key, k), "required");
  }
  BoxConfig b;
  b.lower = as_doubles(n["lower"], join(key, "lower"));
  b.upper = as_doubles(n["upper"], join(key, "upper"));
  for (double c : as_doubles(n["cells"], join(key, "cells"))) {
    if (c < 1 || c != static_cast<int>(c)) throw ConfigError(join(key, "cells"), "cell counts must be positive integers");
    b.cells.push_back(static_cast<int>(c));
  }
  if (b.lower.size() != b.upper.size() || b.lower.size() != b.cells.size()) {
    throw ConfigError(key, "lower, upper and cells must have the same length");
  }
  for (std::size_t i = 0; i < b.lower.size(); ++i) {
    if (!(b.lower[i] < b.upper[i])) throw ConfigError(key, "lower must be below upper on every axis");
  }
  return b;
}

}  // namespace

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(pos, end - pos);
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError(key, "empty entry in list '" + text + "'");
    item = item.substr(first, last - first + 1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size()) {
      throw ConfigError(key, "'" + item + "' is not a number");
    }
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

Monitor parse_monitor(const std::string& text, const std::string& key) {
  if (text == "none") return Monitor::None;
  if (text == "scalar_curvature") return Monitor::ScalarCurvature;
  if (text == "ricci_vv") return Monitor::RicciVV;
  throw ConfigError(key, "expected none, scalar_curvature or ricci_vv, got '" + text + "'");
}

void parse_chart(const YAML::Node& node, RunConfig& cfg, const std::string& key) {
  if (!node.IsMap()) throw ConfigError(key, "expected a table");
  if (node["family"]) {
    const std::string id = as_text(node["family"], join(key, "family"));
    FamilySpec spec;
    if (id == "warped3d") {
      check_keys(node, {"family", "alpha"}, key);
      Warped3dParams p;
      if (node["alpha"]) p.alpha = as_text(node["alpha"], join(key, "alpha"));
      spec.params = p;
    } else if (id == "mbeta") {
      check_keys(node, {"family", "beta"}, key);
      MBetaParams p;
      if (node["beta"]) p.beta = as_double(node["beta"], join(key, "beta"));
      spec.params = p;
    } else if (id == "dunn") {
      check_keys(node, {"family", "p", "psi"}, key);
      DunnParams p;
      if (node["p"]) p.p = static_cast<int>(as_int(node["p"], join(key, "p")));
      if (node["psi"]) p.psi = as_text_matrix(node["psi"], join(key, "psi"));
      spec.params = p;
    } else if (id == "fiedler") {
      check_keys(node, {"family", "nu", "xi", "f"}, key);
      FiedlerParams p;
      if (node["nu"]) p.nu = static_cast<int>(as_int(node["nu"], join(key, "nu")));
      if (node["f"]) p.f = as_text(node["f"], join(key, "f"));
      if (node["xi"]) {
        const YAML::Node& xi = node["xi"];
        const std::string xk = join(key, "xi");
        if (!xi.IsSequence()) throw ConfigError(xk, "expected a list of rows");
        p.xi = Matrix(static_cast<Eigen::Index>(xi.size()), static_cast<Eigen::Index>(xi.size()));
        for (std::size_t i = 0; i < xi.size(); ++i) {
          const auto row = as_doubles(xi[i], xk + "[" + std::to_string(i) + "]");
          if (row.size() != xi.size()) throw ConfigError(xk, "must be a square matrix");
          for (std::size_t j = 0; j < row.size(); ++j) {
            p.xi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
          }
        }
      }
      spec.params = p;
    } else if (id == "lorentz_mf") {
      check_keys(node, {"family", "f"}, key);
      LorentzMfParams p;
      if (node["f"]) p.f = as_text(node["f"], join(key, "f"));
      spec.params = p;
    } else {
      throw ConfigError(join(key, "family"), "unknown family '" + id +
                                                  "' (expected warped3d, mbeta, dunn, fiedler or lorentz_mf)");
    }
    try {
      validate(spec);
    } catch (const Error& e) {
      throw ConfigError(key, e.what());
    }
    cfg.family = spec;
    cfg.custom.reset();
    return;
  }
  check_keys(node, {"metric", "signature", "guards", "coordinates"}, key);
  if (!node["metric"]) throw ConfigError(join(key, "metric"), "required (or give 'family')");
  if (!node["signature"]) throw ConfigError(join(key, "signature"), "required for a custom chart");
  CustomChart c;
  c.metric = as_text_matrix(node["metric"], join(key, "metric"));
  const YAML::Node& sig = node["signature"];
  check_keys(sig, {"p", "q"}, join(key, "signature"));
  if (!sig["p"] || !sig["q"]) throw ConfigError(join(key, "signature"), "needs both p and q");
  c.signature = {static_cast<int>(as_int(sig["p"], join(key, "signature.p"))),
                 static_cast<int>(as_int(sig["q"], join(key, "signature.q")))};
  if (node["guards"]) c.guards = as_texts(node["guards"], join(key, "guards"));
  if (node["coordinates"]) c.coordinates = as_texts(node["coordinates"], join(key, "coordinates"));
  cfg.custom = c;
  cfg.family.reset();
  // building validates structure and expressions up front
  make_chart(cfg);
}

RunConfig parse_config(const YAML::Node& doc) {
  RunConfig cfg;
  if (!doc || doc.IsNull()) return cfg;
  check_keys(doc,
             {"chart", "point", "velocity", "horizon", "seed", "directions", "tolerance", "max_order", "monitor",
              "threshold", "integrator", "velocity_box", "target_box", "model_file", "threads", "output"},
             "");
  if (doc["chart"]) parse_chart(doc["chart"], cfg);
  if (doc["point"]) cfg.point = as_doubles(doc["point"], "point");
  if (doc["velocity"]) cfg.velocity = as_doubles(doc["velocity"], "velocity");
  if (doc["horizon"]) {
    cfg.horizon = as_double(doc["horizon"], "horizon");
    if (!(*cfg.horizon > 0.0)) throw ConfigError("horizon", "must be positive");
  }
  if (doc["seed"]) {
    const long s = as_int(doc["seed"], "seed");
    if (s < 0) throw ConfigError("seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (doc["directions"]) {
    const long d = as_int(doc["directions"], "directions");
    if (d < 1) throw ConfigError("directions", "must be at least 1");
    cfg.directions = static_cast<std::size_t>(d);
  }
  if (doc["tolerance"]) {
    cfg.tolerance = as_double(doc["tolerance"], "tolerance");
    if (!(*cfg.tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
  }
  if (doc["max_order"]) {
    cfg.max_order = static_cast<int>(as_int(doc["max_order"], "max_order"));
    if (*cfg.max_order < 1) throw ConfigError("max_order", "must be at least 1");
  }
  if (doc["monitor"]) cfg.monitor = parse_monitor(as_text(doc["monitor"], "monitor"), "monitor");
  if (doc["threshold"]) {
    cfg.threshold = as_double(doc["threshold"], "threshold");
    if (!(*cfg.threshold > 0.0)) throw ConfigError("threshold", "must be positive");
  }
  if (const YAML::Node& in = doc["integrator"]) {
    check_keys(in, {"rel_tol", "abs_tol", "max_step"}, "integrator");
    if (in["rel_tol"]) cfg.rel_tol = as_double(in["rel_tol"], "integrator.rel_tol");
    if (in["abs_tol"]) cfg.abs_tol = as_double(in["abs_tol"], "integrator.abs_tol");
    if (in["max_step"]) cfg.max_step = as_double(in["max_step"], "integrator.max_step");
    if (cfg.rel_tol && !(*cfg.rel_tol > 0.0)) throw ConfigError("integrator.rel_tol", "must be positive");
    if (cfg.abs_tol && !(*cfg.abs_tol > 0.0)) throw ConfigError("integrator.abs_tol", "must be positive");
    if (cfg.max_step && !(*cfg.max_step >= 0.0)) throw ConfigError("integrator.max_step", "must be non-negative");
  }
  if (doc["velocity_box"]) cfg.velocity_box = parse_box(doc["velocity_box"], "velocity_box");
  if (doc["target_box"]) cfg.target_box = parse_box(doc["target_box"], "target_box");
  if (doc["model_file"]) cfg.model_file = as_text(doc["model_file"], "model_file");
  if (doc["threads"]) {
    const long t = as_int(doc["threads"], "threads");
    if (t < 1) throw ConfigError("threads", "must be at least 1");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (const YAML::Node& out = doc["output"]) {
    check_keys(out, {"report", "csv"}, "output");
    if (out["report"]) cfg.report_path = as_text(out["report"], "output.report");
    if (out["csv"]) cfg.csv_path = as_text(out["csv"], "output.csv");
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  YAML::Node doc;
  try {
    doc = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("config", "cannot read '" + path + "'");
  } catch (const YAML::Exception& e) {
    throw ConfigError("config", "'" + path + "' is not valid YAML: " + e.what());
  }
  return parse_config(doc);
}

void merge_into(RunConfig& base, const RunConfig& o) {
  if (o.family) {
    base.family = o.family;
    base.custom.reset();
  }
  if (o.custom) {
    base.custom = o.custom;
    base.family.reset();
  }
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(base.point, o.point);
  take(base.velocity, o.velocity);
  take(base.horizon, o.horizon);
  take(base.seed, o.seed);
  take(base.directions, o.directions);
  take(base.tolerance, o.tolerance);
  take(base.max_order, o.max_order);
  take(base.monitor, o.monitor);
  take(base.threshold, o.threshold);
  take(base.rel_tol, o.rel_tol);
  take(base.abs_tol, o.abs_tol);
  take(base.max_step, o.max_step);
  take(base.velocity_box, o.velocity_box);
  take(base.target_box, o.target_box);
  take(base.model_file, o.model_file);
  take(base.threads, o.threads);
  take(base.report_path, o.report_path);
  take(base.csv_path, o.csv_path);
}

Chart make_chart(const RunConfig& cfg) {
  if (cfg.family) {
    try {
      return build(*cfg.family);
    } catch (const Error& e) {
      throw ConfigError("chart", e.what());
    }
  }
  if (!cfg.custom) throw ConfigError("chart", "required (use --family or a config file with a chart table)");
  const CustomChart& c = *cfg.custom;
  const std::size_t n = c.metric.size();
  if (n == 0) throw ConfigError("chart.metric", "must not be empty");
  std::vector<std::string> names = c.coordinates;
  if (!names.empty() && names.size() != n) {
    throw ConfigError("chart.coordinates", "expected " + std::to_string(n) + " names");
  }
  VariableTable table = default_variables(n);
  for (std::size_t i = 0; i < names.size(); ++i) table[names[i]] = static_cast<int>(i);
  std::vector<std::vector<Expression>> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string rk = "chart.metric[" + std::to_string(i) + "]";
    if (c.metric[i].size() != n) throw ConfigError(rk, "expected " + std::to_string(n) + " entries");
    for (std::size_t j = 0; j < n; ++j) {
      try {
        g[i].push_back(parse(c.metric[i][j], n, table));
      } catch (const ParseError& e) {
        throw ConfigError(rk + "[" + std::to_string(j) + "]", e.what());
      }
    }
  }
  std::vector<DomainGuard> guards;
  for (std::size_t i = 0; i < c.guards.size(); ++i) {
    try {
      guards.push_back(parse_guard(c.guards[i], n, table));
    } catch (const ParseError& e) {
      throw ConfigError("chart.guards[" + std::to_string(i) + "]", e.what());
    }
  }
  try {
    return Chart(c.signature, std::move(g), std::move(guards), names);
  } catch (const Error& e) {
    throw ConfigError("chart", e.what());
  }
}

std::vector<double> require_point(const RunConfig& cfg, const Chart& chart) {
  if (!cfg.point) throw ConfigError("point", "required");
  const auto& p = *cfg.point;
  if (p.size() != chart.dim()) {
    throw ConfigError("point", "has " + std::to_string(p.size()) + " coordinates, chart dimension is " +
                                   std::to_string(chart.dim()));
  }
  try {
    metric_at(chart, std::span<const double>(p.data(), p.size()));
  } catch (const ChartError& e) {
    throw ConfigError("point", e.what());
  }
  return p;
}

IntegrateOptions integrate_options(const RunConfig& cfg, IntegrateOptions o) {
  if (cfg.rel_tol) o.rel_tol = *cfg.rel_tol;
  if (cfg.abs_tol) o.abs_tol = *cfg.abs_tol;
  if (cfg.max_step) o.max_step = *cfg.max_step;
  if (cfg.monitor) o.monitor = *cfg.monitor;
  if (cfg.threshold) o.blowup_threshold = *cfg.threshold;
  return o;
}

Json config_to_json(const RunConfig& cfg) {
  Json j = Json::object();
  if (cfg.family) j["chart"] = to_json(*cfg.family);
  if (cfg.custom) {
    j["chart"] = {{"metric", cfg.custom->metric},
                  {"signature", to_json(cfg.custom->signature)},
                  {"guards", cfg.custom->guards},
                  {"coordinates", cfg.custom->coordinates}};
  }
  auto put = [&j](const char* k, const auto& v) {
    if (v) j[k] = *v;
  };
  put("point", cfg.point);
  put("velocity", cfg.velocity);
  put("horizon", cfg.horizon);
  put("seed", cfg.seed);
  put("directions", cfg.directions);
  put("tolerance", cfg.tolerance);
  put("max_order", cfg.max_order);
  if (cfg.monitor) j["monitor"] = to_string(*cfg.monitor);
  put("threshold", cfg.threshold);
  Json in = Json::object();
  if (cfg.rel_tol) in["rel_tol"] = *cfg.rel_tol;
  if (cfg.abs_tol) in["abs_tol"] = *cfg.abs_tol;
  if (cfg.max_step) in["max_step"] = *cfg.max_step;
  if (!in.empty()) j["integrator"] = in;
  auto box = [](const BoxConfig& b) { return Json{{"lower", b.lower}, {"upper", b.upper}, {"cells", b.cells}}; };
  if (cfg.velocity_box) j["velocity_box"] = box(*cfg.velocity_box);
  if (cfg.target_box) j["target_box"] = box(*cfg.target_box);
  put("model_file", cfg.model_file);
  put("threads", cfg.threads);
  Json out = Json::object();
  if (cfg.report_path) out["report"] = *cfg.report_path;
  if (cfg.csv_path) out["csv"] = *cfg.csv_path;
  if (!out.empty()) j["output"] = out;
  return j;
}

}  // namespace skt::cli
