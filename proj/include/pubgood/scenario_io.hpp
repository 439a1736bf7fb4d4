#ifndef PUBGOOD_SCENARIO_IO_HPP
#define PUBGOOD_SCENARIO_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "pubgood/model.hpp"
#include "pubgood/oracle.hpp"
#include "pubgood/sim.hpp"

// File formats: scenario documents (JSON), the run trace (CSV) and the
// machine-readable report (JSON). Numeric text uses shortest round-trip
// decimals, so identical inputs serialize to identical bytes everywhere.

namespace pubgood {

/// A parsed scenario document. Top-level keys: L, stepsize{r}, agents
/// (array of {alpha, w, utility{kind, a, b, c, p?}}), optional mu0, optional
/// run{max_iters, window, eps_feasible, eps_stall, lambda_cap_Lambda}.
/// Unknown keys are rejected. Utility kinds in files: "log-log", "quad-log".
struct ScenarioFile {
  Scenario scenario;
  std::optional<std::vector<double>> mu0;
  std::optional<std::int64_t> max_iters;
  std::optional<int> window;
  std::optional<double> eps_feasible;  // applied to both residual tolerances
  std::optional<double> eps_stall;
  std::optional<double> lambda_cap;  // user-chosen envelope constant

  /// Materializes run options (defaults: max_iters 100000, window 500,
  /// eps_stall 1e-6, residual tolerances 1e-2 * max(1, L)).
  RunOptions run_options() const;
};

/// Throws Error(Parse) with key-path context on malformed documents.
ScenarioFile parse_scenario_file(const std::string& text);

std::string serialize_scenario_file(const ScenarioFile& file);

/// Column contract: k,g,g_min,s_norm_sq,r_norm_sq,payability_gap,
/// coherence_gap,zeta -- one row per recorded iteration, LF line endings.
void write_trace_csv(std::ostream& os, const Trace& trace);
void write_trace_csv_file(const std::string& path, const Trace& trace);

std::string run_report_json(const RunResult& result);
std::string oracle_report_json(const OracleResult& oracle);
std::string compare_report_json(const RunResult& result, const OracleResult& oracle,
                                const DiagnosticsReport& diag);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace pubgood

#endif
