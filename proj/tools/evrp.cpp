#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evrp/evrp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoPlan = 2;
constexpr int kExitInputError = 3;
constexpr int kExitUsage = 64;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw evrp::ParseError("cannot open instance file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Options {
  std::string instance_path;
  std::string variant;
  std::optional<double> alpha;
  std::vector<double> alphas;
  std::optional<long long> node_limit;
  bool json = false;
  bool table1_style = false;
};

evrp::ObjectiveSpec resolve_spec(const Options& opt,
                                 const evrp::InstanceDocument& doc) {
  evrp::ObjectiveSpec spec;
  if (doc.default_objective) spec = *doc.default_objective;
  if (!opt.variant.empty()) {
    const auto variant = evrp::variant_from_name(opt.variant);
    if (!variant) {
      throw evrp::ParseError("unknown variant '" + opt.variant +
                             "' (expected base, quad or linear)");
    }
    spec.variant = *variant;
  }
  if (opt.alpha) {
    if (!(*opt.alpha >= 0.0) || !std::isfinite(*opt.alpha)) {
      throw evrp::ParseError("alpha must be finite and >= 0");
    }
    spec.alpha = *opt.alpha;
  }
  return spec;
}

evrp::Instance load_instance(const Options& opt, evrp::InstanceDocument& doc) {
  doc = evrp::parse_instance_document(read_file(opt.instance_path));
  const evrp::Instance inst = doc.to_instance();
  const auto violations = evrp::validate_instance(inst);
  if (!violations.empty()) {
    std::string message = "instance failed validation:";
    for (const evrp::Violation& v : violations) {
      message += "\n  " + v.field + ": " + v.message;
    }
    throw evrp::ParseError(message);
  }
  return inst;
}

void emit_report(const Options& opt, const evrp::InstanceDocument& doc,
                 const evrp::ReportDocument& report) {
  if (opt.json) {
    std::cout << evrp::serialize_report(report);
    return;
  }
  std::vector<std::string> vehicle_ids;
  for (const evrp::Vehicle& v : doc.vehicles) vehicle_ids.push_back(v.id);
  std::cout << evrp::report_to_text(report, vehicle_ids, doc.depot,
                                    opt.table1_style);
}

int run_solve(const Options& opt, bool exhaustive) {
  evrp::InstanceDocument doc;
  const evrp::Instance inst = load_instance(opt, doc);
  const evrp::ObjectiveSpec spec = resolve_spec(opt, doc);
  const evrp::ObjectiveSpec base_spec{evrp::ObjectiveVariant::base, 0.0};

  evrp::SolverConfig cfg;
  cfg.node_limit = opt.node_limit;
  const evrp::SolveResult result = exhaustive
                                       ? evrp::solve_bruteforce(inst, spec)
                                       : evrp::solve(inst, spec, cfg);
  const evrp::SolveResult base = exhaustive
                                     ? evrp::solve_bruteforce(inst, base_spec)
                                     : evrp::solve(inst, base_spec);
  double cost_diff = 0.0;
  if (base.route_cost != 0.0) {
    cost_diff = 100.0 * (result.route_cost - base.route_cost) / base.route_cost;
  }

  evrp::ReportDocument report;
  report.entries.push_back(evrp::make_report_entry(
      doc.node_ids(), evrp::fit_default_curve(), spec.variant, spec.alpha,
      result, cost_diff));
  emit_report(opt, doc, report);
  return kExitOk;
}

int run_sweep(const Options& opt) {
  evrp::InstanceDocument doc;
  const evrp::Instance inst = load_instance(opt, doc);
  const evrp::ObjectiveSpec spec = resolve_spec(opt, doc);

  const auto points = evrp::sweep_alpha(inst, spec.variant, opt.alphas);
  evrp::ReportDocument report;
  const evrp::WoehlerCurve curve = evrp::fit_default_curve();
  for (const evrp::SweepPoint& point : points) {
    report.entries.push_back(evrp::make_report_entry(
        doc.node_ids(), curve, spec.variant, point.alpha, point.result,
        point.cost_diff_percent));
  }
  emit_report(opt, doc, report);
  return kExitOk;
}

int run_validate(const Options& opt) {
  const evrp::InstanceDocument doc =
      evrp::parse_instance_document(read_file(opt.instance_path));
  const evrp::Instance inst = doc.to_instance();
  const auto violations = evrp::validate_instance(inst);
  if (!violations.empty()) {
    std::cerr << "instance failed validation:\n";
    for (const evrp::Violation& v : violations) {
      std::cerr << "  " << v.field << ": " << v.message << "\n";
    }
    return kExitInputError;
  }
  std::cout << "ok: " << inst.node_count << " nodes, " << inst.vehicle_count()
            << " vehicles\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fleet routing with battery depth-of-discharge objectives"};
  app.require_subcommand(1);

  Options opt;
  double alpha_flag = 0.0;
  long long node_limit_flag = 0;

  auto add_instance = [&opt](CLI::App* cmd) {
    cmd->add_option("--instance", opt.instance_path, "instance file (JSON)")
        ->required();
  };
  auto add_objective = [&](CLI::App* cmd) {
    cmd->add_option("--variant", opt.variant,
                    "objective variant: base, quad or linear");
    cmd->add_option("--alpha", alpha_flag, "degradation weight (>= 0)");
  };
  auto add_output = [&opt](CLI::App* cmd) {
    cmd->add_flag("--json", opt.json, "emit a machine-readable report");
    cmd->add_flag("--table1-style", opt.table1_style,
                  "print cycle estimates as rounded upper bounds");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "find the optimal plan");
  add_instance(solve_cmd);
  add_objective(solve_cmd);
  add_output(solve_cmd);
  solve_cmd->add_option("--node-limit", node_limit_flag,
                        "stop the search after this many nodes");

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "exhaustive search (ground truth)");
  add_instance(oracle_cmd);
  add_objective(oracle_cmd);
  add_output(oracle_cmd);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "solve once per alpha and tabulate");
  add_instance(sweep_cmd);
  add_objective(sweep_cmd);
  add_output(sweep_cmd);
  sweep_cmd
      ->add_option("--alphas", opt.alphas,
                   "strictly increasing alphas, e.g. 0,0.5,2")
      ->required()
      ->delimiter(',');

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check an instance file");
  add_instance(validate_cmd);

  CLI::App* genref_cmd = app.add_subcommand(
      "gen-reference", "print the bundled reference instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (solve_cmd->count("--alpha") || oracle_cmd->count("--alpha") ||
      sweep_cmd->count("--alpha")) {
    opt.alpha = alpha_flag;
  }
  if (solve_cmd->count("--node-limit")) {
    if (node_limit_flag <= 0) {
      std::cerr << "--node-limit must be positive\n";
      return kExitUsage;
    }
    opt.node_limit = node_limit_flag;
  }

  try {
    if (app.got_subcommand(solve_cmd)) return run_solve(opt, false);
    if (app.got_subcommand(oracle_cmd)) return run_solve(opt, true);
    if (app.got_subcommand(sweep_cmd)) return run_sweep(opt);
    if (app.got_subcommand(validate_cmd)) return run_validate(opt);
    if (app.got_subcommand(genref_cmd)) {
      std::cout << evrp::serialize_instance(evrp::reference_document());
      return kExitOk;
    }
  } catch (const evrp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const evrp::SolveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoPlan;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
