#ifndef LEVIJET_CLI_IO_HPP
#define LEVIJET_CLI_IO_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "levijet/levi_engine.hpp"

// Batch interface: problem-file parsing, command dispatch and JSON
// reporting. Reports use exact rational strings throughout; any decimal
// rendering is marked "approx". Keys are emitted in a fixed order and all
// content except the timing fields is a pure function of the input bytes,
// so reports are byte-comparable after stripping "timing_ms".

namespace levijet {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "levijet 0.1.0";
inline constexpr const char* kProblemFormat = "levi-problem/1";
inline constexpr const char* kReportFormat = "levi-report/1";

/// Parse failure with a location: a byte offset for malformed JSON, a
/// JSON-pointer-style path for a well-formed file with bad content.
struct ParseError : std::runtime_error {
  ParseError(const std::string& message, const std::string& where_)
      : std::runtime_error(message + (where_.empty() ? "" : " at " + where_)),
        where(where_) {}
  std::string where;
};

struct ScheduleOptions {
  std::optional<Rational> t0;
  PlanVariant variant = PlanVariant::MainText;
  std::optional<Rational> tau;
  int max_steps = -1;  // -1: automatic
};

/// One self-describing run input. Poisson files carry structure constants
/// and a bivector; algebroid files carry bracket and anchor jets over the
/// base variables. `homothety`, when not 1, rescales the bivector by the
/// weighted dilation before the run (degree-k terms scale by t^{1-k}).
struct ProblemFile {
  ProblemMode kind = ProblemMode::Poisson;
  int degree = 1;
  RunMode mode = RunMode::Formal;
  ScheduleOptions schedule;
  Rational homothety = Rational(1);
  std::optional<StructureData> data;   // Poisson
  std::optional<JetBivector> pi;       // Poisson
  std::optional<AlgebroidData> algebroid;
};

ProblemFile parse_problem(const std::string& text);
std::string serialize_problem(const ProblemFile& file);
Json problem_to_json(const ProblemFile& file);
ProblemFile problem_from_json(const Json& j);

/// Instantiates the runnable problem: applies a degree override and the
/// homothety, converts algebroid data. Throws std::invalid_argument on
/// inconsistent content (the same errors as algebroid_to_poisson).
LeviProblem to_problem(const ProblemFile& file,
                       std::optional<int> degree_override = std::nullopt);

/// Rational string round-trip used by the schemas: accepted spellings match
/// -?[0-9]+(/[1-9][0-9]*)? and serialization is the canonical reduced form.
Rational parse_rational(const std::string& text, const std::string& where);
std::string rational_string(const Rational& value);

/// Command-line overrides applied on top of the problem file.
struct CliOverrides {
  std::optional<RunMode> mode;
  std::optional<int> degree;
  std::optional<Rational> t0;
  std::optional<int> max_steps;
  std::optional<PlanVariant> variant;
};

/// A finished command: the report document and whether its postcondition
/// holds (process exit 0 iff `ok`). Parse and usage failures throw instead.
struct CommandResult {
  Json report;
  bool ok = false;
};

CommandResult cmd_validate(const std::string& input_text);
CommandResult cmd_normalize(const std::string& input_text,
                            const CliOverrides& overrides);
CommandResult cmd_algebroid(const std::string& input_text,
                            const CliOverrides& overrides);
CommandResult cmd_cohomology(const std::string& input_text,
                             std::optional<int> degree_override);
CommandResult cmd_schedule(int n, PlanVariant variant, const Rational& t0,
                           int d_max);
CommandResult cmd_axioms(const std::string& input_text);

/// FNV-1a 64-bit over the raw input bytes, rendered as 16 hex digits.
std::string input_hash(const std::string& text);

/// Strips every "timing_ms" member, recursively: the determinism invariant
/// (byte-identical reports for identical inputs) holds on the stripped form.
Json strip_timing(const Json& j);

}  // namespace levijet

#endif
