// Command-line front end: one command per invocation, JSON report on
// stdout or --output. Exit codes: 0 when the command's postcondition
// holds, 1 for usage and parse failures, 2 when the run completed but a
// check failed.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "levijet/cli_io.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw levijet::ParseError("cannot open input file", path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_report(const levijet::Json& report, const std::string& output_path) {
  const std::string text = report.dump(2) + "\n";
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw levijet::ParseError("cannot open output file", output_path);
  out << text;
}

levijet::RunMode parse_mode(const std::string& s) {
  if (s == "formal") return levijet::RunMode::Formal;
  if (s == "scheduled") return levijet::RunMode::Scheduled;
  throw levijet::ParseError("mode must be 'formal' or 'scheduled'", "--mode");
}

levijet::PlanVariant parse_variant(const std::string& s) {
  if (s == "main") return levijet::PlanVariant::MainText;
  if (s == "appendix") return levijet::PlanVariant::Appendix;
  throw levijet::ParseError("variant must be 'main' or 'appendix'",
                            "--variant");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "levijet: exact Levi normal forms for polynomial-jet Poisson "
      "structures and Lie algebroids"};
  app.require_subcommand(1);

  std::string input_path, output_path, mode_str, t0_str, variant_str;
  int degree = 0, max_steps = 0, n = 0, d_max = 8;

  auto add_common = [&](CLI::App* cmd, bool with_run_flags) {
    cmd->add_option("--input", input_path, "problem file (JSON)")
        ->required();
    cmd->add_option("--output", output_path, "report path (default stdout)");
    if (with_run_flags) {
      cmd->add_option("--mode", mode_str, "formal|scheduled");
      cmd->add_option("--degree", degree, "truncation degree override");
      cmd->add_option("--t0", t0_str, "schedule start (rational, > 1)");
      cmd->add_option("--max-steps", max_steps, "iteration cap override");
      cmd->add_option("--variant", variant_str, "main|appendix");
    }
  };

  CLI::App* c_validate = app.add_subcommand(
      "validate", "check structure constants and the bivector");
  add_common(c_validate, false);

  CLI::App* c_normalize =
      app.add_subcommand("normalize", "run the normalization iteration");
  add_common(c_normalize, true);

  CLI::App* c_algebroid = app.add_subcommand(
      "algebroid", "normalize an algebroid problem (dual-bundle encoding)");
  add_common(c_algebroid, true);

  CLI::App* c_cohomology = app.add_subcommand(
      "cohomology", "verify the homotopy identity on both modules");
  add_common(c_cohomology, false);
  c_cohomology->add_option("--degree", degree, "truncation degree override");

  CLI::App* c_schedule =
      app.add_subcommand("schedule", "plan and validate iteration constants");
  c_schedule->add_option("--n", n, "manifold dimension")->required();
  c_schedule->add_option("--variant", variant_str, "main|appendix");
  c_schedule->add_option("--t0", t0_str, "schedule start (rational, > 1)");
  c_schedule->add_option("--d-max", d_max, "steps to tabulate");
  c_schedule->add_option("--output", output_path, "report path");

  CLI::App* c_axioms = app.add_subcommand(
      "axioms", "check the smoothing and interpolation inequalities");
  add_common(c_axioms, false);

  CLI11_PARSE(app, argc, argv);

  try {
    levijet::CommandResult result;
    if (app.got_subcommand(c_validate)) {
      result = levijet::cmd_validate(read_file(input_path));
    } else if (app.got_subcommand(c_normalize) ||
               app.got_subcommand(c_algebroid)) {
      CLI::App* cmd = app.got_subcommand(c_normalize) ? c_normalize
                                                      : c_algebroid;
      levijet::CliOverrides ov;
      if (cmd->count("--mode")) ov.mode = parse_mode(mode_str);
      if (cmd->count("--degree")) ov.degree = degree;
      if (cmd->count("--t0")) ov.t0 = levijet::parse_rational(t0_str, "--t0");
      if (cmd->count("--max-steps")) ov.max_steps = max_steps;
      if (cmd->count("--variant")) ov.variant = parse_variant(variant_str);
      result = app.got_subcommand(c_normalize)
                   ? levijet::cmd_normalize(read_file(input_path), ov)
                   : levijet::cmd_algebroid(read_file(input_path), ov);
    } else if (app.got_subcommand(c_cohomology)) {
      std::optional<int> deg;
      if (c_cohomology->count("--degree")) deg = degree;
      result = levijet::cmd_cohomology(read_file(input_path), deg);
    } else if (app.got_subcommand(c_schedule)) {
      const levijet::PlanVariant variant =
          c_schedule->count("--variant") ? parse_variant(variant_str)
                                         : levijet::PlanVariant::MainText;
      const levijet::Rational t0 =
          c_schedule->count("--t0")
              ? levijet::parse_rational(t0_str, "--t0")
              : levijet::Rational(16);
      result = levijet::cmd_schedule(n, variant, t0, d_max);
    } else {
      result = levijet::cmd_axioms(read_file(input_path));
    }
    write_report(result.report, output_path);
    return result.ok ? 0 : 2;
  } catch (const levijet::ParseError& e) {
    levijet::Json err{{"format", levijet::kReportFormat},
                      {"error", {{"kind", "parse"},
                                 {"message", e.what()},
                                 {"where", e.where}}}};
    std::cout << err.dump(2) << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    levijet::Json err{{"format", levijet::kReportFormat},
                      {"error", {{"kind", "usage"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 1;
  }
}
