#pragma once

// Result files: trace CSV, summary tables, gnuplot figures, tuning history.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pma/scenario.hpp"
#include "pma/stability.hpp"
#include "pma/tuner.hpp"

namespace pma {

inline constexpr const char* kTraceHeader =
    "t,x_d,x,x_p,u,S_q,S_p,tau,tau_hat,taudot_hat,saturated";
inline constexpr const char* kHistoryHeader = "generation,best_h,mean_h,feasible_count";

/// 12 significant digits, '.' decimal point regardless of locale.
std::string format_number(double v);

void write_trace_csv(std::ostream& out, const SimTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const SimTrace& trace);

/// Aligned table: label, controller, MAE, IAE, sup|Sq| (or the member's error).
void write_summary_text(std::ostream& out, const std::string& title,
                        const std::vector<FamilyRow>& rows);
/// `key = value` lines, one block of keys per row prefixed by its index.
void write_summary_kv(std::ostream& out, const std::string& title,
                      const std::vector<FamilyRow>& rows);

void write_stability_text(std::ostream& out, const StabilityReport<double>& r);
void write_stability_kv(std::ostream& out, const StabilityReport<double>& r);

/// Writes <stem>.dat (t, x_d, then x and x_d - x per trace) and <stem>.gp,
/// a gnuplot script rendering <stem>.png with tracking and error panels.
/// Traces must share the time grid; shorter ones are padded with NaN.
void write_plot(const std::filesystem::path& dir, const std::string& stem,
                const std::string& title, const std::vector<std::string>& labels,
                const std::vector<const SimTrace*>& traces);

void write_history_csv(std::ostream& out, const std::vector<GenerationStats>& history);

}  // namespace pma
