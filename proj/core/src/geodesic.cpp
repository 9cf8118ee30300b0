#include "skt/geodesic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace skt {

namespace {

// Dormand-Prince 5(4) tableau; the geodesic system is autonomous, so the
// stage nodes are not needed.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// Fifth-order weights minus embedded fourth-order weights.
constexpr double kE[7] = {71.0 / 57600,      0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200,
                          22.0 / 525,        -1.0 / 40};

Vector acceleration(const Chart& chart, const Vector& x, const Vector& v, MetricCheck check) {
  const std::size_t n = chart.dim();
  const ChristoffelAt gamma = christoffel_at(chart, std::span<const double>(x.data(), x.size()), check);
  Vector a = Vector::Zero(n);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) sum += gamma.second(k, i, j) * v[i] * v[j];
    }
    a[k] = -sum;
  }
  return a;
}

class Stepper {
 public:
  Stepper(const Chart& chart, std::size_t n) : chart_(chart), n_(n) {}

  // dY/ds for Y = (x, v); returns false (with a message) outside the domain.
  bool derivative(const Vector& y, Vector& dy, std::string& message) const {
    if (!y.allFinite()) {
      message = "state is not finite";
      return false;
    }
    try {
      // Stage points only need a usable inverse; the signature is checked
      // at accepted states.
      dy.resize(2 * n_);
      dy.head(n_) = y.tail(n_);
      dy.tail(n_) = acceleration(chart_, y.head(n_), y.tail(n_), MetricCheck::Nondegenerate);
    } catch (const ChartError& e) {
      message = e.what();
      return false;
    }
    if (!dy.allFinite()) {
      message = "geodesic equation is not finite";
      return false;
    }
    return true;
  }

  // One DOPRI5 step from (y, k1 = f(y)); fills y_new, err, k7 = f(y_new).
  bool step(const Vector& y, const Vector& k1, double h, Vector& y_new, Vector& err, Vector& k7,
            std::string& message) const {
    Vector k[7];
    k[0] = k1;
    for (int s = 1; s < 7; ++s) {
      Vector ys = y;
      for (int j = 0; j < s; ++j) {
        if (kA[s][j] != 0.0) ys += (h * kA[s][j]) * k[j];
      }
      if (!derivative(ys, k[s], message)) return false;
      if (s == 6) y_new = ys;
    }
    err = Vector::Zero(y.size());
    for (int s = 0; s < 7; ++s) {
      if (kE[s] != 0.0) err += (h * kE[s]) * k[s];
    }
    k7 = k[6];
    return true;
  }

 private:
  const Chart& chart_;
  std::size_t n_;
};

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, double atol, double rtol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    sum += (err[i] / sc) * (err[i] / sc);
  }
  return std::sqrt(sum / static_cast<double>(err.size()));
}

double speed_norm_at(const Chart& chart, const Vector& x, const Vector& v) {
  return v.dot(metric_values(chart, std::span<const double>(x.data(), x.size())) * v);
}

bool full_check(const Chart& chart, const Vector& y, std::size_t n, std::string& message) {
  try {
    metric_at(chart, std::span<const double>(y.data(), n));
  } catch (const ChartError& e) {
    message = e.what();
    return false;
  }
  return true;
}

}  // namespace

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Blowup: return "blowup";
    case EventKind::ChartExit: return "chart_exit";
    case EventKind::StepCollapse: return "step_collapse";
    case EventKind::HorizonReached: return "horizon_reached";
  }
  return "unknown";
}

std::string to_string(Monitor monitor) {
  switch (monitor) {
    case Monitor::None: return "none";
    case Monitor::ScalarCurvature: return "scalar_curvature";
    case Monitor::RicciVV: return "ricci_vv";
  }
  return "unknown";
}

GeodesicRhs geodesic_rhs(const Chart& chart, const GeodesicState& state) {
  return {state.velocity, acceleration(chart, state.position, state.velocity, MetricCheck::Full)};
}

double monitor_value(const Chart& chart, Monitor monitor, const GeodesicState& state) {
  if (monitor == Monitor::None) return std::numeric_limits<double>::quiet_NaN();
  const CurvatureData d =
      curvature_at(chart, std::span<const double>(state.position.data(), state.position.size()));
  if (monitor == Monitor::ScalarCurvature) return d.scalar;
  return state.velocity.dot(d.ricci * state.velocity);
}

GeodesicTrajectory integrate(const Chart& chart, const GeodesicState& init, double horizon,
                             const IntegrateOptions& opts) {
  const std::size_t n = chart.dim();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw IntegrationError("horizon must be positive and finite");
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) throw IntegrationError("tolerances must be positive");
  if (opts.max_step < 0.0 || opts.initial_step < 0.0) throw IntegrationError("step sizes must be non-negative");
  if (!(opts.blowup_threshold > 0.0) || !(opts.event_resolution > 0.0)) {
    throw IntegrationError("blow-up threshold and event resolution must be positive");
  }
  if (static_cast<std::size_t>(init.position.size()) != n || static_cast<std::size_t>(init.velocity.size()) != n) {
    throw IntegrationError("initial state dimension does not match chart dimension " + std::to_string(n));
  }
  if (!init.velocity.allFinite()) throw IntegrationError("initial velocity is not finite");
  try {
    metric_at(chart, std::span<const double>(init.position.data(), init.position.size()));
  } catch (const ChartError& e) {
    throw IntegrationError(std::string("initial point outside the chart domain: ") + e.what());
  }

  const double s0 = init.affine_param;
  const double s_end = s0 + horizon;
  const double max_step = opts.max_step > 0.0 ? opts.max_step : horizon / 100.0;
  Stepper stepper(chart, n);

  GeodesicTrajectory traj;
  auto record = [&](const Vector& y, double s, double monitor) {
    GeodesicState st{y.head(n), y.tail(n), s};
    const double speed = speed_norm_at(chart, st.position, st.velocity);
    if (!traj.speed_norm.empty()) traj.drift = std::max(traj.drift, std::abs(speed - traj.speed_norm.front()));
    if (!opts.record_samples && traj.samples.size() >= 2) {
      traj.samples.back() = std::move(st);
      traj.speed_norm.back() = speed;
      traj.monitor.back() = monitor;
    } else {
      traj.samples.push_back(std::move(st));
      traj.speed_norm.push_back(speed);
      traj.monitor.push_back(monitor);
    }
  };
  auto monitor_at = [&](const Vector& y) {
    return monitor_value(chart, opts.monitor, GeodesicState{y.head(n), y.tail(n), 0.0});
  };
  auto over = [&](double m) { return opts.monitor != Monitor::None && !(std::abs(m) < opts.blowup_threshold); };

  Vector y(2 * n);
  y << init.position, init.velocity;
  double s = s0;
  double m0 = opts.monitor == Monitor::None ? std::numeric_limits<double>::quiet_NaN() : monitor_at(y);
  record(y, s, m0);
  auto finish = [&](EventKind kind, double at, std::string payload) {
    traj.events.push_back({kind, at, std::move(payload)});
    return traj;
  };
  if (over(m0)) return finish(EventKind::Blowup, s, "monitor above threshold at start");

  Vector k1;
  std::string message;
  if (!stepper.derivative(y, k1, message)) return finish(EventKind::ChartExit, s, message);

  double h = opts.initial_step;
  if (h <= 0.0) {
    double d0 = 0.0, d1 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = opts.abs_tol + opts.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / y.size());
    d1 = std::sqrt(d1 / y.size());
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::max(h, 1e-6 * horizon);
  }
  h = std::min(h, max_step);

  double facold = 1e-4;
  constexpr double kSafe = 0.9, kBeta = 0.04, kExpo = 0.2 - kBeta * 0.75;
  Vector y_new, err, k7;
  std::size_t steps = 0;
  while (true) {
    if (steps++ >= opts.max_steps) return finish(EventKind::StepCollapse, s, "step budget exhausted");
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s));
    bool last = false;
    if (s + h >= s_end - h_min) {
      h = s_end - s;
      last = true;
    }
    if (!stepper.step(y, k1, h, y_new, err, k7, message) || !full_check(chart, y_new, n, message)) {
      ++traj.rejected_steps;
      h *= 0.25;
      if (h < h_min) return finish(EventKind::ChartExit, s, message);
      continue;
    }
    const double e = error_norm(err, y, y_new, opts.abs_tol, opts.rel_tol);
    if (!std::isfinite(e)) {
      ++traj.rejected_steps;
      h *= 0.25;
      if (h < h_min) return finish(EventKind::StepCollapse, s, "non-finite error estimate");
      continue;
    }
    const double fac11 = std::pow(std::max(e, 1e-300), kExpo);
    if (e > 1.0) {
      ++traj.rejected_steps;
      h /= std::min(5.0, fac11 / kSafe);
      if (h < h_min) return finish(EventKind::StepCollapse, s, "step size underflow");
      continue;
    }
    // accepted
    ++traj.accepted_steps;
    traj.error_estimate += err.cwiseAbs().maxCoeff();
    double m = std::numeric_limits<double>::quiet_NaN();
    if (opts.monitor != Monitor::None) {
      bool monitor_ok = true;
      try {
        m = monitor_at(y_new);
      } catch (const ChartError&) {
        monitor_ok = false;
      }
      if (!monitor_ok || over(m)) {
        // bisect the crossing over a single step from the last accepted state
        double lo = 0.0, hi = h;
        Vector y_hi = y_new, y_try, e_try, k_try;
        double m_hi = m;
        while (hi - lo > opts.event_resolution) {
          const double mid = 0.5 * (lo + hi);
          bool above = true;
          double m_mid = std::numeric_limits<double>::quiet_NaN();
          if (stepper.step(y, k1, mid, y_try, e_try, k_try, message)) {
            try {
              m_mid = monitor_at(y_try);
              above = over(m_mid);
            } catch (const ChartError&) {
              above = true;
            }
          }
          if (above) {
            hi = mid;
            if (std::isfinite(m_mid)) {
              y_hi = y_try;
              m_hi = m_mid;
            }
          } else {
            lo = mid;
          }
        }
        if (!std::isfinite(m_hi)) {
          return finish(EventKind::ChartExit, s + hi, "monitor undefined past affine parameter " + std::to_string(s + lo));
        }
        record(y_hi, s + hi, m_hi);
        return finish(EventKind::Blowup, s + hi, to_string(opts.monitor) + " = " + std::to_string(m_hi));
      }
    }
    s = last ? s_end : s + h;
    y = y_new;
    k1 = k7;
    record(y, s, m);
    if (last) return finish(EventKind::HorizonReached, s, "");
    double fac = fac11 / std::pow(facold, kBeta);
    fac = std::clamp(fac / kSafe, 0.2, 10.0);
    facold = std::max(e, 1e-4);
    h = std::min(h / fac, max_step);
  }
}

BlowupResult blowup_probe(const Chart& chart, const GeodesicState& init, Monitor quantity, double threshold,
                          double horizon, IntegrateOptions opts) {
  if (quantity == Monitor::None) throw IntegrationError("blowup_probe needs a monitored quantity");
  opts.monitor = quantity;
  opts.blowup_threshold = threshold;
  BlowupResult r;
  r.trajectory = integrate(chart, init, horizon, opts);
  if (r.trajectory.terminal().kind == EventKind::Blowup) r.crossing = r.trajectory.terminal().affine_param;
  return r;
}

std::size_t ProbeReport::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(directions.begin(), directions.end(), [&](const DirectionOutcome& d) { return d.outcome == kind; }));
}

unsigned default_threads() {
  if (const char* env = std::getenv("SKT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(std::min(v, 256L));
  }
  return 1;
}

namespace {

// Runs body(i) for i in [0, count) on up to `threads` workers.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double uniform01(std::mt19937_64& rng) {
  // 53 random bits in (0, 1]
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::vector<Vector> sample_directions(const Chart& chart, std::span<const double> base_point, std::size_t count,
                                      std::uint64_t seed) {
  const std::size_t n = chart.dim();
  const MetricAt at = metric_at(chart, base_point);
  std::mt19937_64 rng(seed);
  std::vector<Vector> out;
  out.reserve(count);
  while (out.size() < count) {
    Vector v(n);
    for (std::size_t i = 0; i < n; i += 2) {
      const double r = std::sqrt(-2.0 * std::log(uniform01(rng)));
      const double phi = 2.0 * std::numbers::pi * uniform01(rng);
      v[i] = r * std::cos(phi);
      if (i + 1 < n) v[i + 1] = r * std::sin(phi);
    }
    const double norm = v.norm();
    if (!(norm > 1e-12)) continue;
    v /= norm;
    if (chart.signature().riemannian()) v /= std::sqrt(v.dot(at.metric * v));
    out.push_back(std::move(v));
  }
  return out;
}

ProbeReport completeness_probe(const Chart& chart, std::span<const double> base_point, std::size_t directions,
                               double horizon, std::uint64_t seed, IntegrateOptions opts, unsigned threads) {
  ProbeReport report;
  report.base_point.assign(base_point.begin(), base_point.end());
  report.horizon = horizon;
  report.seed = seed;
  opts.record_samples = false;
  report.options = opts;
  const std::vector<Vector> dirs = sample_directions(chart, base_point, directions, seed);
  const Vector base = Eigen::Map<const Vector>(base_point.data(), static_cast<Eigen::Index>(base_point.size()));
  report.directions.resize(dirs.size());
  parallel_for(dirs.size(), threads, [&](std::size_t i) {
    const GeodesicTrajectory t = integrate(chart, GeodesicState{base, dirs[i], 0.0}, horizon, opts);
    DirectionOutcome& o = report.directions[i];
    o.velocity = dirs[i];
    o.speed_norm = t.speed_norm.front();
    o.outcome = t.terminal().kind;
    o.end_param = t.terminal().affine_param;
    o.payload = t.terminal().payload;
    o.max_drift = t.max_drift();
    for (double m : t.monitor) {
      if (std::isfinite(m)) o.max_abs_monitor = std::max(o.max_abs_monitor, std::abs(m));
    }
  });
  return report;
}

IntegrateOptions exp_map_defaults() {
  IntegrateOptions o;
  o.rel_tol = 1e-8;
  o.abs_tol = 1e-10;
  o.max_step = 1.0;
  o.record_samples = false;
  return o;
}

Vector exp_map(const Chart& chart, std::span<const double> base_point, const Vector& v,
               const IntegrateOptions& opts) {
  const Vector base = Eigen::Map<const Vector>(base_point.data(), static_cast<Eigen::Index>(base_point.size()));
  const GeodesicTrajectory t = integrate(chart, GeodesicState{base, v, 0.0}, 1.0, opts);
  if (t.terminal().kind != EventKind::HorizonReached) throw UnreachableError(t.terminal());
  return t.final_state().position;
}

std::size_t Box::total() const {
  std::size_t t = 1;
  for (int c : cells) t *= static_cast<std::size_t>(c);
  return t;
}

Vector Box::center(std::size_t flat) const {
  const std::size_t d = cells.size();
  Vector x(d);
  for (std::size_t a = d; a-- > 0;) {
    const auto c = static_cast<std::size_t>(cells[a]);
    const std::size_t k = flat % c;
    flat /= c;
    x[a] = lower[a] + (static_cast<double>(k) + 0.5) * (upper[a] - lower[a]) / static_cast<double>(c);
  }
  return x;
}

std::optional<std::size_t> Box::locate(const Vector& x) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < cells.size(); ++a) {
    if (!(x[a] >= lower[a] && x[a] < upper[a])) return std::nullopt;
    const auto k = std::min<std::size_t>(
        static_cast<std::size_t>((x[a] - lower[a]) / (upper[a] - lower[a]) * cells[a]), cells[a] - 1);
    flat = flat * static_cast<std::size_t>(cells[a]) + k;
  }
  return flat;
}

Box Box::scaled(double factor) const {
  Box b = *this;
  for (std::size_t a = 0; a < cells.size(); ++a) {
    const double mid = 0.5 * (lower[a] + upper[a]);
    const double half = 0.5 * (upper[a] - lower[a]) * factor;
    b.lower[a] = mid - half;
    b.upper[a] = mid + half;
    b.cells[a] = std::max(1, static_cast<int>(std::lround(cells[a] * factor)));
  }
  return b;
}

namespace {

void check_box(const Box& b, std::size_t dim, const char* what) {
  if (b.lower.size() != dim || b.upper.size() != dim || b.cells.size() != dim) {
    throw IntegrationError(std::string(what) + " box must have " + std::to_string(dim) + " axes");
  }
  for (std::size_t a = 0; a < dim; ++a) {
    if (!(b.upper[a] > b.lower[a]) || b.cells[a] < 1) {
      throw IntegrationError(std::string(what) + " box axis " + std::to_string(a + 1) + " is malformed");
    }
  }
}

}  // namespace

CoverageReport exp_coverage(const Chart& chart, std::span<const double> base_point, const Box& velocity_box,
                            const Box& target_box, const IntegrateOptions& opts, unsigned threads) {
  check_box(velocity_box, chart.dim(), "velocity");
  check_box(target_box, chart.dim(), "target");
  const std::size_t samples = velocity_box.total();
  // -1: unreachable, -2: outside target, otherwise target cell
  std::vector<long long> hit(samples, -2);
  parallel_for(samples, threads, [&](std::size_t i) {
    try {
      const Vector image = exp_map(chart, base_point, velocity_box.center(i), opts);
      if (auto cell = target_box.locate(image)) hit[i] = static_cast<long long>(*cell);
    } catch (const UnreachableError&) {
      hit[i] = -1;
    }
  });
  CoverageReport r;
  r.samples = samples;
  std::vector<char> covered(target_box.total(), 0);
  for (long long h : hit) {
    if (h == -1) {
      ++r.unreachable;
    } else if (h == -2) {
      ++r.outside_target;
    } else {
      covered[static_cast<std::size_t>(h)] = 1;
    }
  }
  std::size_t count = 0;
  for (std::size_t c = 0; c < covered.size(); ++c) {
    if (covered[c]) {
      ++count;
      continue;
    }
    r.uncovered.push_back(c);
    std::vector<int> idx(target_box.cells.size());
    std::size_t f = c;
    for (std::size_t a = idx.size(); a-- > 0;) {
      idx[a] = static_cast<int>(f % static_cast<std::size_t>(target_box.cells[a]));
      f /= static_cast<std::size_t>(target_box.cells[a]);
    }
    r.uncovered_cells.push_back(std::move(idx));
  }
  r.coverage = static_cast<double>(count) / static_cast<double>(covered.size());
  return r;
}

}  // namespace skt
