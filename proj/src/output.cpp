#include "pma/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace pma {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  // snprintf honours LC_NUMERIC; force the decimal point.
  for (char* c = buf; *c; ++c)
    if (*c == ',') *c = '.';
  return buf;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows) {
    out << format_number(r.t) << ',' << format_number(r.xd) << ',' << format_number(r.x) << ','
        << format_number(r.xp) << ',' << format_number(r.u) << ',' << format_number(r.sq) << ','
        << format_number(r.sp) << ',' << format_number(r.tau) << ',' << format_number(r.tau_hat)
        << ',' << format_number(r.taudot_hat) << ',' << (r.saturated ? 1 : 0) << '\n';
  }
}

void write_trace_csv(const fs::path& path, const SimTrace& trace) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kDomain, "cannot write '" + path.string() + "'");
  write_trace_csv(out, trace);
}

void write_summary_text(std::ostream& out, const std::string& title,
                        const std::vector<FamilyRow>& rows) {
  std::size_t w = 7;
  for (const auto& r : rows) w = std::max(w, r.label.size());
  out << title << '\n';
  out << std::left << std::setw(int(w) + 2) << "variant" << std::setw(10) << "controller"
      << std::right << std::setw(20) << "MAE [m]" << std::setw(20) << "IAE [m]" << std::setw(20)
      << "sup|S_q|" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(int(w) + 2) << r.label << std::setw(10) << to_string(r.controller)
        << std::right;
    if (r.ok)
      out << std::setw(20) << format_number(r.metrics.mae) << std::setw(20)
          << format_number(r.metrics.iae) << std::setw(20) << format_number(r.metrics.sup_sq);
    else
      out << "  failed: " << r.error;
    out << '\n';
  }
}

void write_summary_kv(std::ostream& out, const std::string& title,
                      const std::vector<FamilyRow>& rows) {
  out << "title = " << title << '\n' << "members = " << rows.size() << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string p = std::to_string(i) + ".";
    out << p << "label = " << r.label << '\n'
        << p << "controller = " << to_string(r.controller) << '\n'
        << p << "ok = " << (r.ok ? "true" : "false") << '\n';
    if (r.ok) {
      out << p << "mae = " << format_number(r.metrics.mae) << '\n'
          << p << "iae = " << format_number(r.metrics.iae) << '\n'
          << p << "sup_sq = " << format_number(r.metrics.sup_sq) << '\n'
          << p << "window_start = " << format_number(r.metrics.window_start) << '\n'
          << p << "window_end = " << format_number(r.metrics.window_end) << '\n'
          << p << "samples = " << r.metrics.samples << '\n';
    } else {
      out << p << "error = " << r.error << '\n';
    }
  }
}

void write_stability_text(std::ostream& out, const StabilityReport<double>& r) {
  const auto line = [&](const char* name, const std::string& value) {
    out << std::left << std::setw(22) << name << value << '\n';
  };
  line("feasible", r.feasible ? "yes" : "no");
  line("eps", format_number(r.eps));
  line("lambda1", format_number(r.lambda1));
  line("varpi", format_number(r.varpi));
  line("Kc", "[[" + format_number(r.kc.xx) + ", " + format_number(r.kc.xy) + "], [" +
                 format_number(r.kc.xy) + ", " + format_number(r.kc.yy) + "]]");
  line("Kc eigenvalues", format_number(r.kc_eigs(0)) + ", " + format_number(r.kc_eigs(1)));
  line("lambda_min(Km)", format_number(r.km_min));
  line("lambda2", format_number(r.lambda2));
  line("Gamma required", format_number(r.gamma_required));
  std::string v;
  for (const auto& s : r.violations) v += (v.empty() ? "" : "; ") + s;
  line("violations", v.empty() ? "none" : v);
}

void write_stability_kv(std::ostream& out, const StabilityReport<double>& r) {
  out << "feasible = " << (r.feasible ? "true" : "false") << '\n'
      << "eps = " << format_number(r.eps) << '\n'
      << "lambda1 = " << format_number(r.lambda1) << '\n'
      << "varpi = " << format_number(r.varpi) << '\n'
      << "kc_11 = " << format_number(r.kc.xx) << '\n'
      << "kc_12 = " << format_number(r.kc.xy) << '\n'
      << "kc_22 = " << format_number(r.kc.yy) << '\n'
      << "km_min = " << format_number(r.km_min) << '\n'
      << "lambda2 = " << format_number(r.lambda2) << '\n'
      << "gamma_required = " << format_number(r.gamma_required) << '\n'
      << "violations = ";
  for (std::size_t i = 0; i < r.violations.size(); ++i) out << (i ? ";" : "") << r.violations[i];
  out << '\n';
}

void write_plot(const fs::path& dir, const std::string& stem, const std::string& title,
                const std::vector<std::string>& labels, const std::vector<const SimTrace*>& traces) {
  if (labels.size() != traces.size() || traces.empty())
    throw DomainError("write_plot: need one label per trace");
  fs::create_directories(dir);

  const SimTrace* longest = *std::max_element(
      traces.begin(), traces.end(),
      [](const SimTrace* a, const SimTrace* b) { return a->rows.size() < b->rows.size(); });
  {
    std::ofstream dat(dir / (stem + ".dat"));
    dat << "# t x_d";
    for (const auto& l : labels) dat << " x[" << l << "]";
    for (const auto& l : labels) dat << " e[" << l << "]";
    dat << '\n';
    for (std::size_t k = 0; k < longest->rows.size(); ++k) {
      dat << format_number(longest->rows[k].t) << ' ' << format_number(longest->rows[k].xd);
      for (const auto* tr : traces)
        dat << ' ' << (k < tr->rows.size() ? format_number(tr->rows[k].x) : "nan");
      for (const auto* tr : traces)
        dat << ' '
            << (k < tr->rows.size() ? format_number(tr->rows[k].xd - tr->rows[k].x) : "nan");
      dat << '\n';
    }
  }

  std::ofstream gp(dir / (stem + ".gp"));
  const std::size_t n = traces.size();
  gp << "# gnuplot " << stem << ".gp\n"
     << "set terminal pngcairo size 900,700\n"
     << "set output '" << stem << ".png'\n"
     << "set datafile missing 'nan'\n"
     << "set multiplot layout 2,1 title '" << title << "'\n"
     << "set xlabel 't [s]'\nset ylabel 'x [m]'\nset key outside right\n"
     << "plot '" << stem << ".dat' using 1:2 with lines dt 2 lw 2 title 'x_d'";
  for (std::size_t i = 0; i < n; ++i)
    gp << ", \\\n     '' using 1:" << 3 + i << " with lines title '" << labels[i] << "'";
  gp << "\nset ylabel 'x_d - x [m]'\nplot ";
  for (std::size_t i = 0; i < n; ++i)
    gp << (i ? ", \\\n     " : "") << "'" << stem << ".dat' using 1:" << 3 + n + i
       << " with lines title '" << labels[i] << "'";
  gp << "\nunset multiplot\n";
}

void write_history_csv(std::ostream& out, const std::vector<GenerationStats>& history) {
  out << kHistoryHeader << '\n';
  for (const auto& g : history)
    out << g.generation << ',' << format_number(g.best_h) << ',' << format_number(g.mean_h) << ','
        << g.feasible_count << '\n';
}

}  // namespace pma
