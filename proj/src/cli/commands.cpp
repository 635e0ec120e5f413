#include <fmt/format.h>

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcp/cli.hpp"
#include "qcp/core.hpp"
#include "qcp/curve.hpp"
#include "qcp/errors.hpp"
#include "qcp/global_bound.hpp"
#include "qcp/montecarlo.hpp"
#include "qcp/online_opt.hpp"
#include "qcp/verify.hpp"

namespace qcp {

namespace {

using nlohmann::json;

struct UsageError : Error {
  using Error::Error;
};

struct Output {
  std::string path;  // empty: the caller's stream

  void write(std::ostream& fallback, const std::string& text) const {
    if (path.empty()) {
      fallback << text;
      return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw UsageError(fmt::format("cannot open '{}' for writing", path));
    file << text;
    if (!file) throw UsageError(fmt::format("failed writing '{}'", path));
  }
};

// ---------------------------------------------------------------- curve

struct CurveArgs {
  std::size_t n = 31;
  CurveGrid grid;
  bool asymptotic = false;
  std::string format = "csv";
  Output out;
};

int cmd_curve(const CurveArgs& a, std::ostream& out, std::ostream& err) {
  CurveTable table;
  try {
    table = compute_curve(a.n, a.grid, a.asymptotic);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (!table.invariants_hold()) {
    err << "error: curve violates p_online <= p_global or grid ordering\n";
    return kExitVerification;
  }
  a.out.write(out, a.format == "json" ? to_json(table).dump(2) + "\n" : to_csv(table));
  return kExitOk;
}

// ---------------------------------------------------------------- strengths

struct StrengthsArgs {
  std::size_t n = 0;
  double c = 0.0;
  std::string method = "auto";
  std::string format = "text";
  Output out;
};

OnlineSolution build_strategy(std::size_t n, Overlap c, const std::string& method) {
  if (method == "closed") return closed_form_strengths(n, c);
  if (method == "recursive") return recursive_strengths(n, c);
  if (method == "numeric") return optimize_strengths(n, c);
  return best_online(n, c);
}

int cmd_strengths(const StrengthsArgs& a, std::ostream& out) {
  if (a.n < 2) throw UsageError("--n must be at least 2");
  if (!(a.c >= 0.0 && a.c < 1.0)) throw UsageError("--c must lie in [0, 1)");
  const Overlap c(a.c);
  const OnlineSolution sol = build_strategy(a.n, c, a.method);

  std::vector<bool> saturated(a.n - 1, false);
  for (std::size_t j : sol.saturated_positions) saturated[j - 1] = true;

  std::string text;
  if (a.format == "json") {
    json strengths = json::array();
    json flags = json::array();
    for (std::size_t j = 1; j < a.n; ++j) {
      strengths.push_back(sol.schedule.strength(j));
      flags.push_back(static_cast<bool>(saturated[j - 1]));
    }
    const json doc{{"n", a.n},
                   {"c", a.c},
                   {"method", std::string(to_string(sol.method))},
                   {"strengths", strengths},
                   {"saturated", flags},
                   {"success", sol.success()}};
    text = doc.dump(2) + "\n";
  } else {
    text = fmt::format("# n = {}, c = {}, method = {}, success = {:.12g}\n", a.n, a.c,
                       to_string(sol.method), sol.success());
    text += fmt::format("{:>8}  {:>10}  {}\n", "position", "strength", "saturated");
    for (std::size_t j = 1; j < a.n; ++j) {
      text += fmt::format("{:>8}  {:>10.6f}  {}\n", j, sol.schedule.strength(j),
                          saturated[j - 1] ? "yes" : "no");
    }
  }
  a.out.write(out, text);
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  VerifyOptions options;
  Output out;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const auto suites = run_verification(a.options);
  bool all = true;
  json list = json::array();
  for (const auto& s : suites) {
    all = all && s.passed;
    list.push_back(to_json(s));
    if (!s.passed && s.failure) {
      err << fmt::format("suite {} failed at n = {}, c = {}, position = {} (max residual {:.3e})\n",
                         s.name, s.failure->n, s.failure->c, s.failure->position, s.max_residual);
    }
  }
  const json doc{{"passed", all},
                 {"n_max", a.options.n_max},
                 {"seed", a.options.seed},
                 {"self_test", a.options.inject_fault},
                 {"suites", list}};
  a.out.write(out, doc.dump(2) + "\n");
  return all ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::optional<std::size_t> n;
  double c = 0.0;
  std::string strategy = "online";
  std::string schedule_file;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  Output out;
};

std::vector<double> read_schedule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("cannot read schedule file '{}'", path));
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw UsageError(
            fmt::format("schedule entry {} ('{}') is not a number", values.size() + 1, token));
      }
      values.push_back(v);
    }
  }
  return values;
}

StrengthSchedule simulated_schedule(const SimulateArgs& a, Overlap c) {
  if (a.strategy == "custom") {
    if (a.schedule_file.empty()) throw UsageError("--strategy custom needs --schedule-file");
    auto values = read_schedule_file(a.schedule_file);
    if (a.n && *a.n != values.size() + 1) {
      throw UsageError(
          fmt::format("--n {} needs {} strengths, file has {}", *a.n, *a.n - 1, values.size()));
    }
    return StrengthSchedule(c, std::move(values));
  }
  if (!a.n) throw UsageError(fmt::format("--strategy {} needs --n", a.strategy));
  if (*a.n < 2) throw UsageError("--n must be at least 2");
  if (a.strategy == "fl") return fl_solution(*a.n, c).schedule;
  if (a.strategy == "sl") return sl_solution(*a.n, c).schedule;
  return best_online(*a.n, c).schedule;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const Overlap c(a.c);
  const StrengthSchedule schedule = simulated_schedule(a, c);
  const SimulationReport report = run_experiment(schedule, a.trials, a.seed, a.threads);
  const DetectionProfile exact = evaluate_strategy(schedule);
  const ChiSquareResult chi = chi_square_test(report, exact);

  const json doc{
      {"n", report.n},
      {"c", report.c},
      {"strategy", a.strategy},
      {"trials", report.trials},
      {"seed", report.seed},
      {"strengths", std::vector<double>(schedule.strengths().begin(), schedule.strengths().end())},
      {"detections_per_position", report.detections_per_position},
      {"change_points_drawn", report.change_points_drawn},
      {"inconclusive", report.inconclusive},
      {"wrong_identifications", report.wrong_identifications},
      {"empirical_success", report.empirical_success},
      {"standard_error", report.standard_error},
      {"exact_success", exact.average},
      {"exact_per_position", exact.per_position},
      {"z_score", success_z_score(report, exact.average)},
      {"position_z_scores", position_z_scores(report, exact)},
      {"chi_square", chi.statistic},
      {"chi_square_dof", chi.degrees_of_freedom},
      {"chi_square_p_value", chi.p_value}};
  a.out.write(out, doc.dump(2) + "\n");
  if (report.wrong_identifications > 0) {
    err << fmt::format("error: {} wrong identifications\n", report.wrong_identifications);
    return kExitVerification;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "Exact identification of a quantum change point: bounds, online strategies, "
      "verification and simulation"};
  app.name("qcp");
  app.require_subcommand(1);

  CurveArgs curve_args;
  auto* curve = app.add_subcommand("curve", "Success probability versus overlap (CSV or JSON)");
  curve->add_option("--n", curve_args.n, "String length")->capture_default_str();
  curve->add_option("--c-min", curve_args.grid.c_min, "First overlap")->capture_default_str();
  curve->add_option("--c-max", curve_args.grid.c_max, "Last overlap")->capture_default_str();
  curve->add_option("--step", curve_args.grid.step, "Grid step")->capture_default_str();
  curve->add_flag("--asymptotic", curve_args.asymptotic, "Large-n limits instead of finite n");
  curve->add_flag("--include-endpoint", curve_args.grid.include_endpoint,
                  "Keep c = 1 in the grid (all columns 0)");
  curve->add_option("--format", curve_args.format)
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  curve->add_option("--out", curve_args.out.path, "Output file (default stdout)");

  StrengthsArgs strengths_args;
  auto* strengths = app.add_subcommand("strengths", "Print an online strength schedule");
  strengths->add_option("--n", strengths_args.n, "String length")->required();
  strengths->add_option("--c", strengths_args.c, "Overlap")->required();
  strengths->add_option("--method", strengths_args.method)
      ->check(CLI::IsMember({"auto", "closed", "recursive", "numeric"}))
      ->capture_default_str();
  strengths->add_option("--format", strengths_args.format)
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  strengths->add_option("--out", strengths_args.out.path, "Output file (default stdout)");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Run the cross-check suites");
  verify->add_option("--n-max", verify_args.options.n_max, "Largest string length")
      ->capture_default_str();
  verify
      ->add_option("--schedules", verify_args.options.random_schedules,
                   "Random schedules per n for the brute-force oracle")
      ->capture_default_str();
  verify->add_option("--seed", verify_args.options.seed)->capture_default_str();
  verify->add_flag("--self-test", verify_args.options.inject_fault,
                   "Inject a perturbed strength; the run must fail");
  std::string verify_format = "json";
  verify->add_option("--format", verify_format, "Only json is supported")
      ->check(CLI::IsMember({"json"}));
  verify->add_option("--out", verify_args.out.path, "Output file (default stdout)");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of an online strategy");
  simulate->add_option("--n", sim_args.n, "String length (inferred for custom schedules)");
  simulate->add_option("--c", sim_args.c, "Overlap")->required();
  simulate->add_option("--strategy", sim_args.strategy)
      ->check(CLI::IsMember({"online", "fl", "sl", "custom"}))
      ->capture_default_str();
  simulate->add_option("--schedule-file", sim_args.schedule_file,
                       "Whitespace-separated strengths x(1..n-1) for --strategy custom");
  simulate->add_option("--trials", sim_args.trials)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", sim_args.seed)->required();
  simulate->add_option("--threads", sim_args.threads, "Worker threads (0: all cores)");
  std::string simulate_format = "json";
  simulate->add_option("--format", simulate_format, "Only json is supported")
      ->check(CLI::IsMember({"json"}));
  simulate->add_option("--out", sim_args.out.path, "Output file (default stdout)");

  std::vector<const char*> argv{"qcp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*curve) return cmd_curve(curve_args, out, err);
    if (*strengths) return cmd_strengths(strengths_args, out);
    if (*verify) return cmd_verify(verify_args, out, err);
    if (*simulate) return cmd_simulate(sim_args, out, err);
  } catch (const InvalidMeasurement& e) {
    err << "error: " << e.what();
    if (e.position() != 0) err << " (index " << e.position() << ")";
    err << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace qcp
