#include "skt/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "skt/error.hpp"

namespace skt {

namespace {

Matrix matrix_from_json(const Json& j, std::size_t n, const char* what) {
  Matrix m(n, n);
  if (!j.is_array()) throw ModelError(std::string(what) + " must be an array");
  if (j.size() == n * n && (n == 0 || !j[0].is_array())) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) m(i, k) = j[i * n + k].get<double>();
    }
    return m;
  }
  if (j.size() != n) throw ModelError(std::string(what) + " must have " + std::to_string(n * n) + " entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) {
      throw ModelError(std::string(what) + " row " + std::to_string(i + 1) + " must have " + std::to_string(n) +
                       " entries");
    }
    for (std::size_t k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Json nested(const Tensor3<double>& t) {
  const std::size_t n = t.dim();
  Json out = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json a = Json::array();
    for (std::size_t j = 0; j < n; ++j) {
      Json b = Json::array();
      for (std::size_t k = 0; k < n; ++k) b.push_back(t(i, j, k));
      a.push_back(std::move(b));
    }
    out.push_back(std::move(a));
  }
  return out;
}

Json orbit_entries(const Tensor4<double>& t) {
  const std::size_t n = t.dim();
  Json entries = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) {
          if (k < i || (k == i && l < j)) continue;
          const double v = t(i, j, k, l);
          if (v != 0.0) entries.push_back({i + 1, j + 1, k + 1, l + 1, v});
        }
      }
    }
  }
  return entries;
}

}  // namespace

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json to_json(const Signature& s) { return {{"p", s.p}, {"q", s.q}}; }

Json model_to_json(const ZeroModel& model) {
  const std::size_t n = model.dim();
  Json inner = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) inner.push_back(model.inner()(i, k));
  }
  return {{"dim", n}, {"inner", std::move(inner)}, {"entries", orbit_entries(model.tensor())}};
}

ZeroModel model_from_json(const Json& doc) {
  try {
    if (!doc.is_object()) throw ModelError("model document must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
      if (key != "dim" && key != "inner" && key != "entries" && key != "signature") {
        throw ModelError("unknown model key '" + key + "'");
      }
    }
    if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long>() < 1) {
      throw ModelError("'dim' must be a positive integer");
    }
    const auto n = doc["dim"].get<std::size_t>();
    if (!doc.contains("inner")) throw ModelError("'inner' is required");
    Matrix inner = matrix_from_json(doc["inner"], n, "'inner'");
    Tensor4<double> tensor(n);
    std::vector<char> set(n * n * n * n, 0);
    const Json& entries = doc.contains("entries") ? doc["entries"] : Json::array();
    if (!entries.is_array()) throw ModelError("'entries' must be an array");
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const Json& row = entries[e];
      const std::string where = "entries[" + std::to_string(e) + "]";
      if (!row.is_array() || row.size() != 5) throw ModelError(where + " must be [i, j, k, l, value]");
      std::size_t idx[4];
      for (int a = 0; a < 4; ++a) {
        if (!row[a].is_number_integer()) throw ModelError(where + " index must be an integer");
        const long v = row[a].get<long>();
        if (v < 1 || static_cast<std::size_t>(v) > n) {
          throw ModelError(where + " index " + std::to_string(v) + " outside 1.." + std::to_string(n));
        }
        idx[a] = static_cast<std::size_t>(v - 1);
      }
      const double value = row[4].get<double>();
      const auto [i, j, k, l] = idx;
      if ((i == j || k == l) && value != 0.0) {
        throw ModelError(where + " is forced to vanish by antisymmetry");
      }
      Tensor4<double> single(n);
      single.set_with_symmetries(i, j, k, l, value);
      const std::size_t slots[8][4] = {{i, j, k, l}, {j, i, k, l}, {i, j, l, k}, {j, i, l, k},
                                       {k, l, i, j}, {l, k, i, j}, {k, l, j, i}, {l, k, j, i}};
      for (const auto& s : slots) {
        const std::size_t flat = ((s[0] * n + s[1]) * n + s[2]) * n + s[3];
        const double v = single(s[0], s[1], s[2], s[3]);
        if (set[flat] && std::abs(tensor.data()[flat] - v) > 1e-12 * std::max(1.0, std::abs(v))) {
          throw ModelError(where + " conflicts with an earlier entry on component [" + std::to_string(s[0] + 1) +
                           "," + std::to_string(s[1] + 1) + "," + std::to_string(s[2] + 1) + "," +
                           std::to_string(s[3] + 1) + "]");
        }
        tensor.data()[flat] = v;
        set[flat] = 1;
      }
    }
    ZeroModel model(std::move(inner), std::move(tensor));
    if (doc.contains("signature")) {
      const Json& s = doc["signature"];
      const Signature declared{s.at("p").get<int>(), s.at("q").get<int>()};
      if (!(declared == model.signature())) throw ModelError("'signature' does not match the inner product");
    }
    return model;
  } catch (const Json::exception& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  }
}

Json to_json(const CurvatureData& d) {
  const std::size_t n = d.riemann.dim();
  Json riemann = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json a = Json::array();
    for (std::size_t j = 0; j < n; ++j) {
      Json b = Json::array();
      for (std::size_t k = 0; k < n; ++k) {
        Json c = Json::array();
        for (std::size_t l = 0; l < n; ++l) c.push_back(d.riemann(i, j, k, l));
        b.push_back(std::move(c));
      }
      a.push_back(std::move(b));
    }
    riemann.push_back(std::move(a));
  }
  return {{"point", to_json(d.point)},
          {"metric", to_json(d.metric)},
          {"inverse_metric", to_json(d.inverse_metric)},
          {"gamma_first", nested(d.gamma_first)},
          {"gamma_second", nested(d.gamma_second)},
          {"riemann", std::move(riemann)},
          {"riemann_entries", orbit_entries(d.riemann)},
          {"ricci", to_json(d.ricci)},
          {"scalar", d.scalar}};
}

Json to_json(const SymmetryReport& r) {
  Json out{{"pass", r.pass}, {"worst", r.worst}};
  if (!r.worst_kind.empty()) {
    out["worst_kind"] = r.worst_kind;
    out["worst_index"] = {r.worst_index[0] + 1, r.worst_index[1] + 1, r.worst_index[2] + 1, r.worst_index[3] + 1};
  }
  return out;
}

Json to_json(const CommutatorReport& r) {
  return {{"pass", r.pass},
          {"worst_norm", r.worst_norm},
          {"threshold", r.threshold},
          {"worst_pairs",
           {{r.worst_pairs[0] + 1, r.worst_pairs[1] + 1}, {r.worst_pairs[2] + 1, r.worst_pairs[3] + 1}}}};
}

Json to_json(const NilpotencyReport& r) {
  Json out{{"max_order", r.max_order}, {"level_norms", r.level_norms}};
  if (r.order) {
    out["order"] = *r.order;
  } else {
    out["order"] = nullptr;
    out["outcome"] = "not nilpotent within bound";
  }
  return out;
}

Json to_json(const BlockDecomposition& d) {
  Json planes = Json::array();
  for (const auto& p : d.planes) {
    planes.push_back({{"first", to_json(p.first)}, {"second", to_json(p.second)}, {"curvature", p.curvature}});
  }
  Json kernel = Json::array();
  for (Eigen::Index c = 0; c < d.kernel_basis.cols(); ++c) kernel.push_back(to_json(Vector(d.kernel_basis.col(c))));
  return {{"planes", std::move(planes)}, {"eigencurvatures", d.eigencurvatures()}, {"kernel_basis", std::move(kernel)}};
}

Json to_json(const GeodesicEvent& e) {
  return {{"kind", to_string(e.kind)}, {"affine_param", e.affine_param}, {"payload", e.payload}};
}

Json to_json(const IntegrateOptions& o) {
  return {{"rel_tol", o.rel_tol},
          {"abs_tol", o.abs_tol},
          {"max_step", o.max_step},
          {"initial_step", o.initial_step},
          {"monitor", to_string(o.monitor)},
          {"blowup_threshold", o.blowup_threshold},
          {"event_resolution", o.event_resolution},
          {"max_steps", o.max_steps}};
}

Json to_json(const ProbeReport& r) {
  Json dirs = Json::array();
  for (const auto& d : r.directions) {
    dirs.push_back({{"velocity", to_json(d.velocity)},
                    {"speed_norm", d.speed_norm},
                    {"outcome", to_string(d.outcome)},
                    {"end_param", d.end_param},
                    {"payload", d.payload},
                    {"max_drift", d.max_drift},
                    {"max_abs_monitor", d.max_abs_monitor}});
  }
  Json counts = Json::object();
  for (EventKind k : {EventKind::Blowup, EventKind::ChartExit, EventKind::StepCollapse, EventKind::HorizonReached}) {
    counts[to_string(k)] = r.count(k);
  }
  return {{"base_point", r.base_point}, {"horizon", r.horizon}, {"seed", r.seed}, {"options", to_json(r.options)},
          {"counts", std::move(counts)}, {"directions", std::move(dirs)}};
}

Json to_json(const CoverageReport& r) {
  return {{"coverage", r.coverage},
          {"samples", r.samples},
          {"unreachable", r.unreachable},
          {"outside_target", r.outside_target},
          {"uncovered", r.uncovered},
          {"uncovered_cells", r.uncovered_cells},
          {"note", "heuristic: coverage below 1 is evidence of non-surjectivity, not proof"}};
}

Json to_json(const FamilySpec& spec) {
  Json out{{"family", spec.id()}};
  std::visit(
      [&out](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Warped3dParams>) {
          out["alpha"] = p.alpha;
        } else if constexpr (std::is_same_v<P, MBetaParams>) {
          out["beta"] = p.beta;
        } else if constexpr (std::is_same_v<P, DunnParams>) {
          out["p"] = p.p;
          out["psi"] = p.psi;
        } else if constexpr (std::is_same_v<P, FiedlerParams>) {
          out["nu"] = p.nu;
          if (p.xi.size() > 0) out["xi"] = to_json(p.xi);
          out["f"] = p.f;
        } else {
          out["f"] = p.f;
          out["f_resolved"] = resolve_lorentz_f(p.f);
        }
      },
      spec.params);
  return out;
}

void write_trajectory_csv(std::ostream& out, const Chart& chart, const GeodesicTrajectory& traj) {
  const auto& names = chart.coordinate_names();
  out << "affine_param";
  for (const auto& n : names) out << ',' << n;
  for (const auto& n : names) out << ",v_" << n;
  out << ",speed_norm,monitor\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t s = 0; s < traj.samples.size(); ++s) {
    const auto& st = traj.samples[s];
    put(st.affine_param);
    for (Eigen::Index i = 0; i < st.position.size(); ++i) {
      out << ',';
      put(st.position[i]);
    }
    for (Eigen::Index i = 0; i < st.velocity.size(); ++i) {
      out << ',';
      put(st.velocity[i]);
    }
    out << ',';
    put(traj.speed_norm[s]);
    out << ',';
    put(traj.monitor[s]);
    out << '\n';
  }
}

}  // namespace skt
