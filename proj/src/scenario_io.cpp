#include "pubgood/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace pubgood {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Parse, path.empty() ? what : path + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) parse_fail(path, "unknown key '" + it.key() + "'");
  }
}

double require_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) parse_fail(path, std::string("missing key '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) parse_fail(path + "." + key, "expected a number");
  return v.get<double>();
}

std::int64_t require_integer(const json& obj, const std::string& path, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) parse_fail(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

UtilitySpec parse_utility(const json& obj, const std::string& path) {
  if (!obj.is_object()) parse_fail(path, "expected an object");
  if (!obj.contains("kind") || !obj.at("kind").is_string())
    parse_fail(path, "missing string key 'kind'");
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "log-log") {
    reject_unknown_keys(obj, path, {"kind", "a", "b", "c"});
    return UtilitySpec::log_log(require_number(obj, path, "a"), require_number(obj, path, "b"),
                                require_number(obj, path, "c"));
  }
  if (kind == "quad-log") {
    reject_unknown_keys(obj, path, {"kind", "a", "b", "c", "p"});
    return UtilitySpec::quad_log(require_number(obj, path, "a"), require_number(obj, path, "p"),
                                 require_number(obj, path, "b"), require_number(obj, path, "c"));
  }
  parse_fail(path + ".kind", "unknown utility kind '" + kind + "'");
}

std::vector<double> parse_number_array(const json& v, const std::string& path) {
  if (!v.is_array()) parse_fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) parse_fail(path, "expected an array of numbers");
    out.push_back(v[i].get<double>());
  }
  return out;
}

ordered_json utility_json(const UtilitySpec& u) {
  ordered_json j;
  switch (u.kind) {
    case UtilityKind::LogLog:
      j["kind"] = "log-log";
      j["a"] = u.a;
      j["b"] = u.b;
      j["c"] = u.c;
      break;
    case UtilityKind::QuadLog:
      j["kind"] = "quad-log";
      j["a"] = u.a;
      j["p"] = u.p;
      j["b"] = u.b;
      j["c"] = u.c;
      break;
    case UtilityKind::External:
      throw Error(ErrorCode::InvalidArgument,
                  "serialize: external utilities have no file representation");
  }
  return j;
}

}  // namespace

ScenarioFile parse_scenario_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  if (!doc.is_object()) parse_fail("", "scenario document must be a JSON object");
  reject_unknown_keys(doc, "", {"L", "stepsize", "agents", "mu0", "run"});

  ScenarioFile file;
  file.scenario.L = require_number(doc, "", "L");

  if (!doc.contains("stepsize") || !doc.at("stepsize").is_object())
    parse_fail("", "missing object key 'stepsize'");
  reject_unknown_keys(doc.at("stepsize"), "stepsize", {"r"});
  file.scenario.stepsize.r = require_number(doc.at("stepsize"), "stepsize", "r");

  if (!doc.contains("agents") || !doc.at("agents").is_array())
    parse_fail("", "missing array key 'agents'");
  const json& agents = doc.at("agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    const json& a = agents[i];
    if (!a.is_object()) parse_fail(path, "expected an object");
    reject_unknown_keys(a, path, {"alpha", "w", "utility"});
    AgentSpec spec;
    spec.alpha = require_number(a, path, "alpha");
    spec.w = require_number(a, path, "w");
    if (!a.contains("utility")) parse_fail(path, "missing key 'utility'");
    spec.utility = parse_utility(a.at("utility"), path + ".utility");
    file.scenario.agents.push_back(std::move(spec));
  }

  if (doc.contains("mu0")) file.mu0 = parse_number_array(doc.at("mu0"), "mu0");

  if (doc.contains("run")) {
    const json& run = doc.at("run");
    if (!run.is_object()) parse_fail("run", "expected an object");
    reject_unknown_keys(run, "run",
                        {"max_iters", "window", "eps_feasible", "eps_stall", "lambda_cap_Lambda"});
    if (run.contains("max_iters")) file.max_iters = require_integer(run, "run", "max_iters");
    if (run.contains("window"))
      file.window = static_cast<int>(require_integer(run, "run", "window"));
    if (run.contains("eps_feasible")) file.eps_feasible = require_number(run, "run", "eps_feasible");
    if (run.contains("eps_stall")) file.eps_stall = require_number(run, "run", "eps_stall");
    if (run.contains("lambda_cap_Lambda"))
      file.lambda_cap = require_number(run, "run", "lambda_cap_Lambda");
  }
  return file;
}

RunOptions ScenarioFile::run_options() const {
  RunOptions opts;
  if (max_iters) opts.max_iters = *max_iters;
  if (window) opts.term.window = *window;
  if (eps_feasible) {
    opts.term.eps_feasible = *eps_feasible;
    opts.term.eps_coherence = *eps_feasible;
  }
  if (eps_stall) opts.term.eps_stall = *eps_stall;
  if (mu0) opts.mu0 = mu0;
  return opts;
}

std::string serialize_scenario_file(const ScenarioFile& file) {
  ordered_json doc;
  doc["L"] = file.scenario.L;
  doc["stepsize"] = ordered_json{{"r", file.scenario.stepsize.r}};
  ordered_json agents = ordered_json::array();
  for (const AgentSpec& a : file.scenario.agents) {
    ordered_json ja;
    ja["alpha"] = a.alpha;
    ja["w"] = a.w;
    ja["utility"] = utility_json(a.utility);
    agents.push_back(std::move(ja));
  }
  doc["agents"] = std::move(agents);
  if (file.mu0) doc["mu0"] = *file.mu0;
  if (file.max_iters || file.window || file.eps_feasible || file.eps_stall || file.lambda_cap) {
    ordered_json run;
    if (file.max_iters) run["max_iters"] = *file.max_iters;
    if (file.window) run["window"] = *file.window;
    if (file.eps_feasible) run["eps_feasible"] = *file.eps_feasible;
    if (file.eps_stall) run["eps_stall"] = *file.eps_stall;
    if (file.lambda_cap) run["lambda_cap_Lambda"] = *file.lambda_cap;
    doc["run"] = std::move(run);
  }
  return doc.dump(2) + "\n";
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "k,g,g_min,s_norm_sq,r_norm_sq,payability_gap,coherence_gap,zeta\n";
  for (const IterationRecord& rec : trace) {
    os << rec.k << ',' << format_double(rec.g) << ',' << format_double(rec.g_min) << ','
       << format_double(rec.s_norm_sq) << ',' << format_double(rec.r_norm_sq) << ','
       << format_double(rec.payability_gap) << ',' << format_double(rec.coherence_gap) << ','
       << format_double(rec.zeta) << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const Trace& trace) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open trace file '" + path + "' for writing");
  write_trace_csv(os, trace);
  if (!os) throw Error(ErrorCode::Io, "failed writing trace file '" + path + "'");
}

namespace {

ordered_json run_json(const RunResult& r) {
  ordered_json j;
  j["x_star"] = r.x_star;
  j["x_i"] = r.x_i;
  j["t"] = r.t;
  j["lambda"] = r.duals.lambda;
  j["mu"] = r.duals.mu;
  j["charges"] = r.charges;
  j["g_i"] = r.g_i;
  j["g_min"] = r.g_min;
  j["k_min"] = r.k_min;
  j["iterations"] = r.iterations;
  j["termination"] = to_string(r.termination);
  j["residuals"] =
      ordered_json{{"payability", r.payability_residual}, {"coherence", r.coherence_residual}};
  return j;
}

ordered_json oracle_json(const OracleResult& o) {
  ordered_json j;
  j["x_opt"] = o.x_opt;
  j["t_opt"] = o.t_opt;
  j["value"] = o.value;
  j["inner_multiplier"] = o.inner_multiplier;
  return j;
}

ordered_json diag_json(const DiagnosticsReport& d) {
  ordered_json j;
  j["oracle_value"] = d.oracle_value;
  j["duality_gap"] = d.duality_gap;
  j["relative_gap"] = d.relative_gap;
  j["weak_duality_ok"] = d.weak_duality_ok;
  j["weak_duality_min_margin"] = d.weak_duality_min_margin;
  j["g_min_monotone"] = d.gmin_monotone;
  j["upsilon"] = d.upsilon;
  j["upsilon_ok"] = d.upsilon_ok;
  j["upsilon_first_violation_k"] = d.upsilon_first_violation_k;
  j["upsilon_max_ratio"] = d.upsilon_max_ratio;
  j["envelope_ok"] = d.envelope_ok;
  j["envelope_min_margin"] = d.envelope_min_margin;
  j["lambda_bound"] =
      ordered_json{{"value", d.lambda_bound}, {"estimated", d.lambda_estimated}};
  j["residuals"] =
      ordered_json{{"payability", d.payability_residual}, {"coherence", d.coherence_residual}};
  j["budget_residual"] = d.budget_residual;
  j["budget_bound"] = d.budget_bound;
  j["charge_identity_max_error"] = d.charge_identity_max_error;
  return j;
}

}  // namespace

std::string run_report_json(const RunResult& result) {
  ordered_json j;
  j["run"] = run_json(result);
  return j.dump(2) + "\n";
}

std::string oracle_report_json(const OracleResult& oracle) {
  ordered_json j;
  j["oracle"] = oracle_json(oracle);
  return j.dump(2) + "\n";
}

std::string compare_report_json(const RunResult& result, const OracleResult& oracle,
                                const DiagnosticsReport& diag) {
  ordered_json j;
  j["run"] = run_json(result);
  j["oracle"] = oracle_json(oracle);
  j["diagnostics"] = diag_json(diag);
  return j.dump(2) + "\n";
}

}  // namespace pubgood
