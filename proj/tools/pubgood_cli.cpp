// Command-line front end: `run` executes the message exchange, `oracle`
// solves the centralized problem, `compare` does both and emits the full
// diagnostics report. Talks to the library through the C API only.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pubgood.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct ScenarioHandle {
  pg_scenario* s = nullptr;
  ~ScenarioHandle() { pg_scenario_free(s); }
};

struct RunHandle {
  pg_run* r = nullptr;
  ~RunHandle() { pg_run_free(r); }
};

struct OracleHandle {
  pg_oracle* o = nullptr;
  ~OracleHandle() { pg_oracle_free(o); }
};

int complain(const std::string& context) {
  std::cerr << "error: " << context << ": " << pg_last_error() << "\n";
  return kExitError;
}

// mu0 seed files hold plain numbers; separators may be whitespace, commas,
// or JSON-array brackets.
bool read_mu0_file(const std::string& path, std::vector<double>& out) {
  std::ifstream is(path);
  if (!is) return false;
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  for (char& ch : text)
    if (ch == ',' || ch == '[' || ch == ']') ch = ' ';
  std::istringstream ss(text);
  double v = 0.0;
  while (ss >> v) out.push_back(v);
  return ss.eof();
}

bool write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  return static_cast<bool>(os);
}

int load_scenario(const std::string& path, ScenarioHandle& scenario) {
  if (pg_scenario_load_file(path.c_str(), &scenario.s) != PG_OK)
    return complain("loading '" + path + "'");
  if (pg_scenario_validate(scenario.s) != PG_OK) return complain("validating '" + path + "'");
  return kExitOk;
}

struct RunFlags {
  std::string scenario_path;
  std::string trace_path;
  std::string report_path;
  std::string mu0_path;
  int64_t max_iters = -1;
};

int execute_run(const RunFlags& flags, bool with_diagnostics) {
  ScenarioHandle scenario;
  if (int rc = load_scenario(flags.scenario_path, scenario); rc != kExitOk) return rc;

  pg_run_options opts;
  if (pg_scenario_run_options(scenario.s, &opts) != PG_OK) return complain("run options");
  if (flags.max_iters > 0) opts.max_iters = flags.max_iters;

  std::vector<double> mu0;
  if (!flags.mu0_path.empty()) {
    if (!read_mu0_file(flags.mu0_path, mu0)) {
      std::cerr << "error: cannot read mu0 seed file '" << flags.mu0_path << "'\n";
      return kExitError;
    }
    opts.mu0 = mu0.data();
    opts.mu0_len = mu0.size();
  }

  RunHandle run;
  if (pg_run_execute(scenario.s, &opts, &run.r) != PG_OK) return complain("run");

  std::string report;
  if (with_diagnostics) {
    OracleHandle oracle;
    if (pg_oracle_solve(scenario.s, 0.0, &oracle.o) != PG_OK) return complain("oracle");
    char* json = nullptr;
    if (pg_diagnostics_json(scenario.s, run.r, oracle.o, &opts, &json) != PG_OK)
      return complain("diagnostics");
    report = json;
    pg_string_free(json);
  } else {
    char* json = nullptr;
    if (pg_run_report_json(run.r, &json) != PG_OK) return complain("report");
    report = json;
    pg_string_free(json);
  }

  if (!flags.trace_path.empty() &&
      pg_run_write_trace_csv(run.r, flags.trace_path.c_str()) != PG_OK)
    return complain("writing trace '" + flags.trace_path + "'");

  if (flags.report_path.empty()) {
    std::cout << report;
  } else if (!write_text_file(flags.report_path, report)) {
    std::cerr << "error: cannot write report '" << flags.report_path << "'\n";
    return kExitError;
  }

  double pay = 0.0, coh = 0.0;
  pg_run_residuals(run.r, &pay, &coh);
  std::cerr << "x* = " << pg_run_x_star(run.r) << "  g_min = " << pg_run_g_min(run.r)
            << "  k_min = " << pg_run_k_min(run.r)
            << "  iterations = " << pg_run_iterations(run.r) << "  residuals = (" << pay << ", "
            << coh << ")\n";

  return pg_run_termination(run.r) == PG_TERM_MAX_ITERS ? kExitNotConverged : kExitOk;
}

int execute_oracle(const std::string& path, double tol) {
  ScenarioHandle scenario;
  if (int rc = load_scenario(path, scenario); rc != kExitOk) return rc;

  OracleHandle oracle;
  if (pg_oracle_solve(scenario.s, tol, &oracle.o) != PG_OK) return complain("oracle");

  const size_t m = pg_scenario_agent_count(scenario.s);
  std::vector<double> t(m);
  pg_oracle_t(oracle.o, t.data(), m);

  std::printf("x* = %.10g\n", pg_oracle_x(oracle.o));
  for (size_t i = 0; i < m; ++i) std::printf("t*_%zu = %.10g\n", i + 1, t[i]);
  std::printf("value = %.10g\n", pg_oracle_value(oracle.o));
  std::printf("inner multiplier = %.10g\n", pg_oracle_inner_multiplier(oracle.o));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized public-good provisioning: subgradient message "
               "exchange and centralized verification"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* cmd_run = app.add_subcommand("run", "execute the message exchange");
  cmd_run->add_option("scenario", run_flags.scenario_path, "scenario JSON file")->required();
  cmd_run->add_option("--max-iters", run_flags.max_iters, "iteration budget override");
  cmd_run->add_option("--trace", run_flags.trace_path, "write the iteration trace CSV here");
  cmd_run->add_option("--report", run_flags.report_path, "write the JSON report here (default stdout)");
  cmd_run->add_option("--seed-mu0", run_flags.mu0_path, "file with initial mu values");

  RunFlags cmp_flags;
  CLI::App* cmd_compare =
      app.add_subcommand("compare", "run, solve centrally, and emit diagnostics");
  cmd_compare->add_option("scenario", cmp_flags.scenario_path, "scenario JSON file")->required();
  cmd_compare->add_option("--max-iters", cmp_flags.max_iters, "iteration budget override");
  cmd_compare->add_option("--trace", cmp_flags.trace_path, "write the iteration trace CSV here");
  cmd_compare->add_option("--report", cmp_flags.report_path, "write the JSON report here (default stdout)");
  cmd_compare->add_option("--seed-mu0", cmp_flags.mu0_path, "file with initial mu values");

  std::string oracle_path;
  double oracle_tol = 0.0;
  CLI::App* cmd_oracle = app.add_subcommand("oracle", "solve the centralized problem");
  cmd_oracle->add_option("scenario", oracle_path, "scenario JSON file")->required();
  cmd_oracle->add_option("--tol", oracle_tol, "search bracket width (default 1e-8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  if (cmd_run->parsed()) return execute_run(run_flags, /*with_diagnostics=*/false);
  if (cmd_compare->parsed()) return execute_run(cmp_flags, /*with_diagnostics=*/true);
  if (cmd_oracle->parsed()) return execute_oracle(oracle_path, oracle_tol);
  return kExitError;
}
