#pragma once

// Geodesic integration with event detection, and the probes built on it:
// curvature blow-up, finite-horizon completeness, and exponential-map
// sampling.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skt/chart.hpp"
#include "skt/error.hpp"

namespace skt {

struct GeodesicState {
  Vector position;
  Vector velocity;
  double affine_param = 0.0;
};

enum class EventKind { Blowup, ChartExit, StepCollapse, HorizonReached };

std::string to_string(EventKind kind);

struct GeodesicEvent {
  EventKind kind = EventKind::HorizonReached;
  double affine_param = 0.0;
  std::string payload;
};

/// Scalar watched along a trajectory for blow-up.
enum class Monitor { None, ScalarCurvature, RicciVV };

std::string to_string(Monitor monitor);

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.0;       // 0 selects horizon / 100
  double initial_step = 0.0;   // 0 selects an automatic first step
  Monitor monitor = Monitor::None;
  double blowup_threshold = 1e6;
  double event_resolution = 1e-9;
  std::size_t max_steps = 2'000'000;
  bool record_samples = true;  // false keeps only the first and last states
};

struct GeodesicTrajectory {
  std::vector<GeodesicState> samples;
  std::vector<double> speed_norm;  // g(v, v) at each sample
  std::vector<double> monitor;     // monitored scalar at each sample, NaN without a monitor
  std::vector<GeodesicEvent> events;
  double error_estimate = 0.0;     // sum of accepted local error estimates (max-norm)
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double drift = 0.0;              // max_s |g(v,v)(s) - g(v,v)(0)| over all accepted states

  const GeodesicEvent& terminal() const { return events.back(); }
  const GeodesicState& final_state() const { return samples.back(); }
  double max_drift() const { return drift; }
};

struct GeodesicRhs {
  Vector velocity;
  Vector acceleration;
};

/// a^k = -Gamma^k_ij v^i v^j. Throws ChartError outside the domain.
GeodesicRhs geodesic_rhs(const Chart& chart, const GeodesicState& state);

/// Monitored scalar at a state: tau, or rho(v, v).
double monitor_value(const Chart& chart, Monitor monitor, const GeodesicState& state);

/// Dormand-Prince 5(4) with PI step control, stopping at the first event.
/// Throws IntegrationError for invalid options or an initial state outside
/// the domain.
GeodesicTrajectory integrate(const Chart& chart, const GeodesicState& init, double horizon,
                             const IntegrateOptions& opts = {});

struct BlowupResult {
  std::optional<double> crossing;  // first affine parameter with |monitor| >= threshold
  GeodesicTrajectory trajectory;
};

BlowupResult blowup_probe(const Chart& chart, const GeodesicState& init, Monitor quantity, double threshold,
                          double horizon, IntegrateOptions opts = {});

struct DirectionOutcome {
  Vector velocity;
  double speed_norm = 0.0;  // g(v, v) of the initial velocity
  EventKind outcome = EventKind::HorizonReached;
  double end_param = 0.0;
  std::string payload;
  double max_drift = 0.0;
  double max_abs_monitor = 0.0;
};

struct ProbeReport {
  std::vector<double> base_point;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  IntegrateOptions options;
  std::vector<DirectionOutcome> directions;

  std::size_t count(EventKind kind) const;
};

/// Unit vectors drawn uniformly from the Euclidean coordinate sphere,
/// rescaled to g-unit length when the metric is Riemannian.
std::vector<Vector> sample_directions(const Chart& chart, std::span<const double> base_point, std::size_t count,
                                      std::uint64_t seed);

/// Integrates each sampled direction to the horizon; directions run in
/// parallel on `threads` workers (0 reads SKT_THREADS, default 1).
ProbeReport completeness_probe(const Chart& chart, std::span<const double> base_point, std::size_t directions,
                               double horizon, std::uint64_t seed, IntegrateOptions opts = {},
                               unsigned threads = 0);

/// The geodesic from (base, v) stopped an event before parameter 1.
class UnreachableError : public IntegrationError {
 public:
  UnreachableError(GeodesicEvent event)
      : IntegrationError("exp map unreachable: " + to_string(event.kind) + " at affine parameter " +
                         std::to_string(event.affine_param) + (event.payload.empty() ? "" : " (" + event.payload + ")")),
        event_(std::move(event)) {}
  const GeodesicEvent& event() const noexcept { return event_; }

 private:
  GeodesicEvent event_;
};

IntegrateOptions exp_map_defaults();

/// gamma_v(1). Throws UnreachableError.
Vector exp_map(const Chart& chart, std::span<const double> base_point, const Vector& v,
               const IntegrateOptions& opts = exp_map_defaults());

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> cells;  // per-axis resolution

  std::size_t total() const;
  /// Cell-centred sample of multi-index `flat` (row-major, last axis fastest).
  Vector center(std::size_t flat) const;
  /// Flat index of the cell containing x, if inside.
  std::optional<std::size_t> locate(const Vector& x) const;
  /// Same centre, half-widths scaled by `factor`, same cell size.
  Box scaled(double factor) const;
};

struct CoverageReport {
  double coverage = 0.0;
  std::size_t samples = 0;
  std::size_t unreachable = 0;
  std::size_t outside_target = 0;
  std::vector<std::size_t> uncovered;  // flat target cell indices
  std::vector<std::vector<int>> uncovered_cells;  // multi-indices
};

/// Maps the cell centres of `velocity_box` through exp_P and bins the images
/// into `target_box`. A coverage below 1 is heuristic evidence only.
CoverageReport exp_coverage(const Chart& chart, std::span<const double> base_point, const Box& velocity_box,
                            const Box& target_box, const IntegrateOptions& opts = exp_map_defaults(),
                            unsigned threads = 0);

/// Thread count from SKT_THREADS (at least 1).
unsigned default_threads();

}  // namespace skt
