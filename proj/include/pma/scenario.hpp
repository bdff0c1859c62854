#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pma/control.hpp"
#include "pma/disturbance.hpp"
#include "pma/errors.hpp"
#include "pma/plant.hpp"
#include "pma/stability.hpp"
#include "pma/trajectory.hpp"
#include "pma/tuner.hpp"

namespace pma {

enum class ControllerKind { kIdoPsmc, kPsmc, kDoSmc, kSmc };

const char* to_string(ControllerKind kind);
ControllerKind controller_from_string(const std::string& name);

inline bool uses_proxy(ControllerKind k) {
  return k == ControllerKind::kIdoPsmc || k == ControllerKind::kPsmc;
}
inline bool uses_observer(ControllerKind k) {
  return k == ControllerKind::kIdoPsmc || k == ControllerKind::kDoSmc;
}

/// Published gain set; the observer gains replace the reported l2 = 0 with a
/// Hurwitz double pole at -20.
PsmcGains<double> published_gains(double m_p = 15.0);

struct Scenario {
  std::string name = "scenario";
  Trajectory<double> trajectory;
  double duration = 20.0;
  double dt = 1e-3;
  int proxy_substeps = 1;  // proxy RK4 steps per sample
  PmaParams<double> plant;    // truth
  PmaParams<double> nominal;  // controller model
  double load_mass = 0.0;     // added to the plant mass only
  DisturbanceProfile<double> disturbance;
  ControllerKind controller = ControllerKind::kIdoPsmc;
  PsmcGains<double> gains = published_gains();
  SmcGains<double> smc{177.4, 174.4, 50.0, 0.5};
  double window_start = 2.0;
  double window_end = 20.0;
  std::optional<double> eps;  // stability eps override; else from the disturbance
  bool force = false;         // run even if the gain gate fails
  std::string trace_path;     // empty = no file
  std::uint64_t seed = 0;

  void validate() const;
  PmaParams<double> plant_truth() const;
  double stability_eps() const;
  std::size_t sample_count() const;
};

struct TraceRow {
  double t = 0, xd = 0, x = 0, xp = 0, u = 0, sq = 0, sp = 0, tau = 0, tau_hat = 0,
         taudot_hat = 0;
  bool saturated = false;
};

struct SimTrace {
  double dt = 0;
  std::vector<TraceRow> rows;
};

struct MetricsReport {
  double mae = 0;
  double iae = 0;
  double window_start = 0;
  double window_end = 0;
  double sup_sq = 0;
  std::size_t samples = 0;
};

/// MAE = max |xd - x|, IAE = mean |xd - x|, sup |Sq| over samples with t in the window.
MetricsReport metrics(const SimTrace& trace, double window_start, double window_end);

struct RunResult {
  SimTrace trace;
  MetricsReport metrics;
  std::optional<StabilityReport<double>> stability;  // PSMC-family controllers only
  // 1-norm of (ep, xp - x, xp' - x') per row; empty without a proxy
  std::vector<double> coupling_error;
  // max |Sp - (Sq - (ep'' + c1 ep' + c2 ep))| over the run
  double manifold_residual = 0;
};

/// A run stopped by a diverged or singular state; carries the partial trace.
class SimulationAborted : public Error {
 public:
  SimulationAborted(ErrorKind kind, const std::string& what, SimTrace partial)
      : Error(kind, what), partial_(std::move(partial)) {}
  const SimTrace& partial() const noexcept { return partial_; }

 private:
  SimTrace partial_;
};

StabilityReport<double> gate_report(const Scenario& s);

/// Tuning objective over every row of the trace.
double objective(const SimTrace& trace, double lambda_tradeoff);

/// Scores a candidate on `base` over its metrics window; aborted runs score `penalty`.
Evaluator scenario_evaluator(const Scenario& base, double lambda_tradeoff, double penalty);
/// Stability gate at the scenario's eps.
Gate scenario_gate(const Scenario& base);

/// Closed loop per sample: reference, observer, control law, proxy, plant.
RunResult run_scenario(const Scenario& s);

enum class Family { kMpSweep, kFixedFreqCompare, kChirpCompare, kLoadSweep };

Family family_from_string(const std::string& name);
const char* to_string(Family f);

struct FamilyRow {
  std::string label;
  ControllerKind controller = ControllerKind::kIdoPsmc;
  MetricsReport metrics;
  bool ok = false;
  std::string error;
};

/// Member scenarios of a family, derived from `base`.
std::vector<Scenario> family_members(Family family, const Scenario& base);

/// Runs the members concurrently. Member failures are recorded per row.
std::vector<FamilyRow> run_family(Family family, const Scenario& base,
                                  std::vector<RunResult>* results = nullptr);

}  // namespace pma
