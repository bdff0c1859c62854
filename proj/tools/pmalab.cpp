// pmalab: command-line front end of the PMA control laboratory.
//
//   pmalab simulate <scenario-file>
//   pmalab family <name> <base-scenario-file>
//   pmalab tune <fa-config-file>
//   pmalab check-gains <gains-file>
//
// Exit codes: 0 ok, 2 invalid config, 3 infeasible gains (without --force),
// 4 simulation diverged. Results go to --out, else $PMA_LAB_OUT, else ./pmalab-out.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pma/config.hpp"
#include "pma/output.hpp"
#include "pma/scenario.hpp"
#include "pma/tuner.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kInvalidConfig = 2, kInfeasible = 3, kDiverged = 4 };

std::string safe_name(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')) c = '_';
  return s;
}

fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PMA_LAB_OUT"); env && *env) return env;
  return "pmalab-out";
}

std::ofstream create(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void write_summaries(const fs::path& dir, const std::string& title,
                     const std::vector<pma::FamilyRow>& rows) {
  pma::write_summary_text(std::cout, title, rows);
  auto txt = create(dir / "summary.txt");
  pma::write_summary_text(txt, title, rows);
  auto kv = create(dir / "summary.kv");
  pma::write_summary_kv(kv, title, rows);
}

void write_stability(const fs::path& dir, const pma::StabilityReport<double>& r) {
  auto txt = create(dir / "stability.txt");
  pma::write_stability_text(txt, r);
  auto kv = create(dir / "stability.kv");
  pma::write_stability_kv(kv, r);
}

int simulate(const std::string& file, bool force, const fs::path& root) {
  pma::Scenario s = pma::load_scenario(file);
  s.force = s.force || force;
  const fs::path dir = root / safe_name(s.name);
  const fs::path trace_path = s.trace_path.empty() ? dir / "trace.csv" : fs::path(s.trace_path);

  if (pma::uses_proxy(s.controller)) {
    const auto gate = pma::gate_report(s);
    write_stability(dir, gate);
    if (!gate.feasible && !s.force) {
      pma::write_stability_text(std::cerr, gate);
      std::cerr << "gain set fails the stability gate; rerun with --force to simulate anyway\n";
      return kInfeasible;
    }
  }

  try {
    const pma::RunResult r = pma::run_scenario(s);
    pma::write_trace_csv(trace_path, r.trace);
    pma::FamilyRow row{s.name, s.controller, r.metrics, true, {}};
    write_summaries(dir, s.name, {row});
    pma::write_plot(dir, "tracking", s.name, {pma::to_string(s.controller)}, {&r.trace});
  } catch (const pma::SimulationAborted& e) {
    pma::write_trace_csv(trace_path, e.partial());
    std::cerr << "simulation diverged: " << e.what() << "\npartial trace: " << trace_path << '\n';
    return kDiverged;
  }
  std::cout << "trace: " << trace_path << '\n';
  return kOk;
}

int family(const std::string& name, const std::string& file, bool force, const fs::path& root) {
  const pma::Family fam = pma::family_from_string(name);
  pma::Scenario base = pma::load_scenario(file);
  base.force = base.force || force;
  const fs::path dir = root / safe_name(name);

  // Every family runs at least one proxy-based member.
  {
    const auto gate = pma::gate_report(base);
    write_stability(dir, gate);
    if (!gate.feasible && !base.force) {
      pma::write_stability_text(std::cerr, gate);
      std::cerr << "gain set fails the stability gate; rerun with --force to simulate anyway\n";
      return kInfeasible;
    }
  }

  std::vector<pma::RunResult> results;
  const auto rows = pma::run_family(fam, base, &results);
  std::vector<std::string> labels;
  std::vector<const pma::SimTrace*> traces;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    pma::write_trace_csv(dir / (safe_name(rows[i].label) + ".csv"), results[i].trace);
    if (!results[i].trace.rows.empty()) {
      labels.push_back(rows[i].label);
      traces.push_back(&results[i].trace);
    }
  }
  write_summaries(dir, name, rows);
  if (!traces.empty()) pma::write_plot(dir, name, name, labels, traces);
  return kOk;
}

int tune(const std::string& file, const fs::path& root) {
  const pma::TuneJob job = pma::load_tune_job(file);
  const fs::path dir = root / safe_name(job.name);
  const auto evaluate =
      pma::scenario_evaluator(job.scenario, job.fa.lambda_tradeoff, job.fa.penalty);
  const auto gate = pma::scenario_gate(job.scenario);

  pma::TuneResult result;
  try {
    result = pma::run(job.fa, evaluate, gate);
  } catch (const pma::ExhaustedBudgetError& e) {
    std::cerr << e.what() << '\n';
    return kInfeasible;
  }

  auto history = create(dir / "history.csv");
  pma::write_history_csv(history, result.history);
  const auto best = pma::PsmcGains<double>::from_vector(result.best.s, job.scenario.gains.m_p);
  auto gains = create(dir / "best_gains.ini");
  pma::write_gains(gains, best);

  pma::write_gains(std::cout, best);
  std::cout << "best objective = " << pma::format_number(result.best.objective) << '\n'
            << "plant evaluations = " << result.evaluations << '\n'
            << "history: " << (dir / "history.csv") << '\n';
  return kOk;
}

int check_gains(const std::string& file, double eps, bool force, const fs::path& root) {
  const auto g = pma::load_gains(file);
  const auto report = pma::check_gains(g, eps);
  pma::write_stability_text(std::cout, report);
  write_stability(root / "check-gains", report);
  return report.feasible || force ? kOk : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pneumatic muscle actuator control laboratory"};
  app.require_subcommand(1);
  std::string out_dir;
  bool force = false;
  app.add_option("-o,--out", out_dir, "Output directory (overrides $PMA_LAB_OUT)");
  app.add_flag("-f,--force", force, "Run even if the gains fail the stability gate");

  std::string scenario_file, family_name, fa_file, gains_file;
  double eps = 0.0;

  auto* sim = app.add_subcommand("simulate", "Run one scenario");
  sim->add_option("scenario-file", scenario_file)->required()->check(CLI::ExistingFile);
  auto* fam = app.add_subcommand("family", "Run an experiment family");
  fam->add_option("name", family_name, "mp-sweep | fixed-freq-compare | chirp-compare | load-sweep")
      ->required();
  fam->add_option("base-scenario-file", scenario_file)->required()->check(CLI::ExistingFile);
  auto* tun = app.add_subcommand("tune", "Constrained firefly gain search");
  tun->add_option("fa-config-file", fa_file)->required()->check(CLI::ExistingFile);
  auto* chk = app.add_subcommand("check-gains", "Evaluate the stability gate for a gain set");
  chk->add_option("gains-file", gains_file)->required()->check(CLI::ExistingFile);
  chk->add_option("--eps", eps, "Disturbance bound eps")->check(CLI::NonNegativeNumber);

  for (auto* sub : {sim, fam, tun, chk}) {
    sub->add_option("-o,--out", out_dir, "Output directory (overrides $PMA_LAB_OUT)");
    sub->add_flag("-f,--force", force, "Run even if the gains fail the stability gate");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  const fs::path root = output_root(out_dir);
  try {
    if (*sim) return simulate(scenario_file, force, root);
    if (*fam) return family(family_name, scenario_file, force, root);
    if (*tun) return tune(fa_file, root);
    if (*chk) return check_gains(gains_file, eps, force, root);
  } catch (const pma::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const pma::Error& e) {
    if (e.kind() == pma::ErrorKind::kInfeasibleGains) {
      std::cerr << e.what() << '\n';
      return kInfeasible;
    }
    if (e.kind() == pma::ErrorKind::kDomain) {
      std::cerr << "invalid config: " << e.what() << '\n';
      return kInvalidConfig;
    }
    std::cerr << "simulation diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
