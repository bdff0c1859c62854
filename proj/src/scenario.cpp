#include "pma/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace pma {

const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kIdoPsmc: return "ido-psmc";
    case ControllerKind::kPsmc: return "psmc";
    case ControllerKind::kDoSmc: return "do-smc";
    case ControllerKind::kSmc: return "smc";
  }
  return "?";
}

ControllerKind controller_from_string(const std::string& name) {
  if (name == "ido-psmc") return ControllerKind::kIdoPsmc;
  if (name == "psmc") return ControllerKind::kPsmc;
  if (name == "do-smc") return ControllerKind::kDoSmc;
  if (name == "smc") return ControllerKind::kSmc;
  throw ConfigError("unknown controller '" + name + "'");
}

PsmcGains<double> published_gains(double m_p) {
  return {14218.8, 177.4, 174.4, 2473.5, 1916.0, 194.2, 40.0, 400.0, m_p};
}

void Scenario::validate() const {
  trajectory.validate();
  plant.validate();
  nominal.validate();
  if (!(duration > 0)) throw DomainError("scenario: duration must be > 0");
  if (!(dt > 0)) throw DomainError("scenario: dt must be > 0");
  if (!(load_mass >= 0)) throw DomainError("scenario: load mass must be >= 0");
  if (!(window_start >= 0 && window_end <= duration + 0.5 * dt && window_start <= window_end))
    throw DomainError("scenario: metrics window must lie within [0, duration]");
  if (uses_proxy(controller) || uses_observer(controller)) {
    if (uses_proxy(controller)) gains.validate();
    if (uses_observer(controller)) ObserverGains<double>::make(gains.l1, gains.l2);
  } else if (!(smc.phi > 0)) {
    throw DomainError("scenario: smc boundary layer width must be > 0");
  }
}

PmaParams<double> Scenario::plant_truth() const {
  PmaParams<double> p = plant;
  p.mass += load_mass;
  return p;
}

double Scenario::stability_eps() const { return eps ? *eps : disturbance.bound(); }

std::size_t Scenario::sample_count() const {
  return std::size_t(std::llround(duration / dt)) + 1;
}

MetricsReport metrics(const SimTrace& trace, double window_start, double window_end) {
  const double slack = 1e-9 * std::max(1.0, std::abs(window_end));
  MetricsReport m;
  m.window_start = window_start;
  m.window_end = window_end;
  double sum = 0;
  for (const auto& r : trace.rows) {
    if (r.t < window_start - slack || r.t > window_end + slack) continue;
    const double e = std::abs(r.xd - r.x);
    m.mae = std::max(m.mae, e);
    if (std::isfinite(r.sq)) m.sup_sq = std::max(m.sup_sq, std::abs(r.sq));
    sum += e;
    ++m.samples;
  }
  if (m.samples == 0) throw DomainError("metrics: empty window");
  m.iae = sum / double(m.samples);
  return m;
}

StabilityReport<double> gate_report(const Scenario& s) {
  return check_gains(s.gains, s.stability_eps());
}

double objective(const SimTrace& trace, double lambda_tradeoff) {
  std::vector<double> xd, x;
  xd.reserve(trace.rows.size());
  x.reserve(trace.rows.size());
  for (const auto& r : trace.rows) {
    xd.push_back(r.xd);
    x.push_back(r.x);
  }
  return objective(xd, x, lambda_tradeoff);
}

Evaluator scenario_evaluator(const Scenario& base, double lambda_tradeoff, double penalty) {
  return [base, lambda_tradeoff, penalty](const Gains8& v) {
    Scenario s = base;
    s.gains = PsmcGains<double>::from_vector(v, base.gains.m_p);
    s.force = true;  // the gate has already been applied by the tuner
    s.trace_path.clear();
    try {
      const RunResult r = run_scenario(s);
      SimTrace window;
      for (const auto& row : r.trace.rows)
        if (row.t >= s.window_start - 1e-9 && row.t <= s.window_end + 1e-9)
          window.rows.push_back(row);
      return objective(window, lambda_tradeoff);
    } catch (const SimulationAborted&) {
      return penalty;
    }
  };
}

Gate scenario_gate(const Scenario& base) {
  const double eps = base.stability_eps();
  const double m_p = base.gains.m_p;
  return [eps, m_p](const Gains8& v) {
    return check_gains(PsmcGains<double>::from_vector(v, m_p), eps);
  };
}

RunResult run_scenario(const Scenario& s) {
  s.validate();
  RunResult result;
  if (uses_proxy(s.controller)) {
    result.stability = gate_report(s);
    if (!result.stability->feasible && !s.force)
      throw Error(ErrorKind::kInfeasibleGains, "gain set fails the stability gate");
  }

  const PmaParams<double> truth = s.plant_truth();
  const std::size_t n = s.sample_count();
  const double dt = s.dt;
  const bool proxied = uses_proxy(s.controller);
  const bool observed = uses_observer(s.controller);
  const ObserverGains<double> obs_gains{s.gains.l1, s.gains.l2};

  PlantState<double> plant;  // at rest at x = 0, p_prev = 0
  const auto ref_at = [&](double t) { return reference_at(s.trajectory, t); };
  ProxyState<double> proxy = ProxyState<double>::at_reference(ref_at(0.0));
  ObserverState<double> obs = ObserverState<double>::at_rest(obs_gains, plant.xdot);
  double int_exd = 0;  // for the SMC family
  Direction ctrl_dir = Direction::kInflating;
  double ctrl_prev = 0;
  Measurement<double> prev_meas{};
  double prev_u = 0;

  SimTrace& trace = result.trace;
  trace.dt = dt;
  trace.rows.reserve(n);

  try {
    for (std::size_t k = 0; k < n; ++k) {
      const double t = double(k) * dt;
      plant.t = t;
      const Reference<double> ref = ref_at(t);
      const Measurement<double> meas{plant.x, plant.xdot};

      if (observed && k > 0)
        obs = observer_step(obs_gains, obs, prev_meas, prev_u, s.nominal, ctrl_dir, dt, meas);

      const NominalContext<double> nominal{s.nominal, ctrl_dir, ctrl_prev};
      ControlOutput<double> out;
      switch (s.controller) {
        case ControllerKind::kIdoPsmc: out = ido_psmc(s.gains, nominal, ref, meas, proxy, obs); break;
        case ControllerKind::kPsmc: out = psmc(s.gains, nominal, ref, meas, proxy); break;
        case ControllerKind::kDoSmc: out = do_smc(s.smc, nominal, ref, meas, int_exd, obs); break;
        case ControllerKind::kSmc: out = smc(s.smc, nominal, ref, meas, int_exd); break;
      }

      TraceRow row{t, ref.xd, meas.x, proxied ? proxy.xp : std::nan(""), out.u, out.sq,
                   proxied ? out.sp : std::nan(""), s.disturbance.eval(t),
                   observed ? obs.tau_hat : 0.0, observed ? obs.taudot_hat : 0.0, out.saturated};
      trace.rows.push_back(row);

      if (proxied) {
        const double ep_dot = proxy.xp - meas.x;
        const double ep_ddot = proxy.xp_dot - meas.xdot;
        const double identity =
            out.sq - (ep_ddot + s.gains.c1 * ep_dot + s.gains.c2 * proxy.ep);
        result.manifold_residual = std::max(result.manifold_residual, std::abs(out.sp - identity));
        result.coupling_error.push_back(std::abs(proxy.ep) + std::abs(ep_dot) + std::abs(ep_ddot));
      }

      if (k + 1 == n) break;

      ctrl_dir = detect_direction(ctrl_dir, ctrl_prev, out.u);
      ctrl_prev = out.u;
      if (proxied) {
        proxy = proxy_step(s.gains, [&](double off) { return ref_at(t + off); }, meas, proxy, dt, s.proxy_substeps);
      } else {
        int_exd = advance_tracking_integral(int_exd, ref, meas.x, dt);
      }
      plant = step(truth, plant, out.u, s.disturbance, dt);
      prev_meas = meas;
      prev_u = out.u;
    }
  } catch (const DivergedError& e) {
    const double t = trace.rows.empty() ? 0.0 : trace.rows.back().t;
    throw SimulationAborted(e.kind(), std::string(e.what()) + " (sample t=" + std::to_string(t) + ")",
                            trace);
  } catch (const SingularGainError& e) {
    throw SimulationAborted(e.kind(), e.what(), trace);
  }

  result.metrics =
      metrics(trace, s.window_start, std::min(s.window_end, trace.rows.back().t));
  return result;
}

Family family_from_string(const std::string& name) {
  if (name == "mp-sweep") return Family::kMpSweep;
  if (name == "fixed-freq-compare") return Family::kFixedFreqCompare;
  if (name == "chirp-compare") return Family::kChirpCompare;
  if (name == "load-sweep") return Family::kLoadSweep;
  throw ConfigError("unknown family '" + name + "'");
}

const char* to_string(Family f) {
  switch (f) {
    case Family::kMpSweep: return "mp-sweep";
    case Family::kFixedFreqCompare: return "fixed-freq-compare";
    case Family::kChirpCompare: return "chirp-compare";
    case Family::kLoadSweep: return "load-sweep";
  }
  return "?";
}

namespace {

std::string trimmed_number(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::vector<Scenario> compare_all(const Scenario& base, const Trajectory<double>& traj) {
  std::vector<Scenario> out;
  for (auto kind : {ControllerKind::kIdoPsmc, ControllerKind::kPsmc, ControllerKind::kDoSmc,
                    ControllerKind::kSmc}) {
    Scenario s = base;
    s.trajectory = traj;
    s.controller = kind;
    s.name = to_string(kind);
    out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<Scenario> family_members(Family family, const Scenario& base) {
  std::vector<Scenario> out;
  const auto& tr = base.trajectory;
  switch (family) {
    case Family::kMpSweep:
      for (double mp : {0.5, 1.0, 5.0, 10.0, 15.0}) {
        Scenario s = base;
        s.controller = ControllerKind::kIdoPsmc;
        s.gains.m_p = mp;
        s.name = "mp=" + trimmed_number(mp);
        out.push_back(s);
      }
      break;
    case Family::kFixedFreqCompare:
      out = compare_all(base, Trajectory<double>::fixed_sine(tr.amplitude, 0.25, tr.offset));
      break;
    case Family::kChirpCompare:
      out = compare_all(base, Trajectory<double>::linear_chirp(tr.amplitude, 0.1, 0.5, 20.0, tr.offset));
      break;
    case Family::kLoadSweep:
      for (double load : {0.0, 2.5, 5.0}) {
        Scenario s = base;
        s.controller = ControllerKind::kIdoPsmc;
        s.load_mass = load;
        s.name = "load=" + trimmed_number(load) + "kg";
        out.push_back(s);
      }
      break;
  }
  return out;
}

std::vector<FamilyRow> run_family(Family family, const Scenario& base,
                                  std::vector<RunResult>* results) {
  const auto members = family_members(family, base);
  std::vector<std::future<RunResult>> jobs;
  for (const auto& m : members) {
    Scenario local = m;
    local.trace_path.clear();
    jobs.push_back(std::async(std::launch::async, [local] { return run_scenario(local); }));
  }
  std::vector<FamilyRow> rows;
  if (results) results->clear();
  for (std::size_t i = 0; i < members.size(); ++i) {
    FamilyRow row;
    row.label = members[i].name;
    row.controller = members[i].controller;
    try {
      RunResult r = jobs[i].get();
      row.metrics = r.metrics;
      row.ok = true;
      if (results) results->push_back(std::move(r));
    } catch (const SimulationAborted& e) {
      row.error = e.what();
      if (results) results->push_back(RunResult{e.partial(), {}, std::nullopt, {}, 0});
    } catch (const std::exception& e) {
      row.error = e.what();
      if (results) results->push_back(RunResult{});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pma
