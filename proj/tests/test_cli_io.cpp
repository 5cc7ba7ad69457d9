#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "levijet/cli_io.hpp"

using namespace levijet;

namespace {

int eps(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
      (i == 2 && j == 0 && k == 1))
    return 1;
  return -1;
}

StructureData so3_data() {
  StructureData d;
  d.n = 3;
  d.m = 3;
  d.c.assign(3, std::vector<std::vector<Rational>>(
                    3, std::vector<Rational>(3, Rational(0))));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) d.c[i][j][k] = Rational(eps(i, j, k));
  d.a.assign(3, std::vector<std::vector<Rational>>());
  return d;
}

JetPoly var(int n, int cap, int i) { return JetPoly::variable(n, cap, i); }

// Poisson fixture: so(3) pushed through Id + (x2^2, 0, x1 x3).
ProblemFile so3_file(int degree) {
  const int n = 3;
  ProblemFile f;
  f.kind = ProblemMode::Poisson;
  f.degree = degree;
  f.data = so3_data();
  std::vector<JetPoly> disp(n, JetPoly(n, degree));
  disp[0] = var(n, degree, 1) * var(n, degree, 1);
  disp[2] = var(n, degree, 0) * var(n, degree, 2);
  f.pi = pushforward(model_bivector(*f.data, degree),
                     JetDiffeo::from_displacement(disp));
  return f;
}

// Action algebroid of the rotation algebra along fields conjugated by
// Id + (x1^2, 0, 0): the bracket keeps the structure constants while the
// anchor becomes a nonlinear (but exactly compatible) family of fields.
ProblemFile rotation_algebroid_file(int degree) {
  const int nb = 3, nf = 3;
  AlgebroidData alg;
  alg.fiber_dim = nf;
  alg.base_dim = nb;
  alg.m = 3;
  alg.bracket.assign(nf, std::vector<std::vector<JetPoly>>(
                             nf, std::vector<JetPoly>(nf, JetPoly(nb, degree))));
  alg.anchor.assign(nf, std::vector<JetPoly>(nb, JetPoly(nb, degree)));

  std::vector<JetPoly> disp(nb, JetPoly(nb, degree));
  disp[0] = var(nb, degree, 0) * var(nb, degree, 0);
  const JetDiffeo psi = JetDiffeo::from_displacement(disp);
  const JetDiffeo psi_inv = invert(psi);

  for (int i = 0; i < 3; ++i) {
    std::vector<JetPoly> rot(nb, JetPoly(nb, degree));
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        if (eps(i, j, k) == 0) continue;
        alg.bracket[i][j][k] = JetPoly::constant(nb, degree, Rational(eps(i, j, k)));
        rot[j] += Rational(eps(i, j, k)) * var(nb, degree, k);
      }
    }
    // Pushforward of the rotation field through psi, component by component.
    for (int j = 0; j < nb; ++j) {
      JetPoly acc(nb, degree);
      for (int u = 0; u < nb; ++u) {
        acc += psi.component(j).derivative(u) * rot[u];
      }
      alg.anchor[i][j] = compose(acc, psi_inv);
    }
  }

  ProblemFile f;
  f.kind = ProblemMode::Algebroid;
  f.degree = degree;
  f.algebroid = std::move(alg);
  return f;
}

}  // namespace

TEST_CASE("problem files round-trip through their serialization") {
  for (const ProblemFile& file : {so3_file(4), rotation_algebroid_file(3)}) {
    const std::string text = serialize_problem(file);
    const ProblemFile back = parse_problem(text);
    CHECK(serialize_problem(back) == text);
    CHECK(back.kind == file.kind);
    CHECK(back.degree == file.degree);
  }

  // Optional fields survive the trip.
  ProblemFile file = so3_file(3);
  file.mode = RunMode::Scheduled;
  file.schedule.t0 = Rational(20);
  file.schedule.variant = PlanVariant::Appendix;
  file.schedule.tau = Rational(2);
  file.schedule.max_steps = 7;
  file.homothety = Rational(3, 2);
  const ProblemFile back = parse_problem(serialize_problem(file));
  CHECK(back.mode == RunMode::Scheduled);
  REQUIRE(back.schedule.t0.has_value());
  CHECK(*back.schedule.t0 == Rational(20));
  CHECK(back.schedule.variant == PlanVariant::Appendix);
  REQUIRE(back.schedule.tau.has_value());
  CHECK(*back.schedule.tau == Rational(2));
  CHECK(back.schedule.max_steps == 7);
  CHECK(back.homothety == Rational(3, 2));
  CHECK(serialize_problem(back) == serialize_problem(file));
}

TEST_CASE("parser rejects malformed input with located errors") {
  try {
    parse_problem("{ not json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.where.rfind("byte ", 0) == 0);
  }

  const Json good = Json::parse(serialize_problem(so3_file(3)));

  Json doc = good;
  doc["format"] = "levi-problem/2";
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);

  doc = good;
  doc["degree"] = 0;
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);

  doc = good;
  doc["bivector"][0]["terms"][0][1] = "1/0";
  try {
    problem_from_json(doc);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("1/0") != std::string::npos);
    CHECK(e.where.rfind("/bivector/0/terms", 0) == 0);
  }

  doc = good;
  doc["bivector"][0]["terms"][0][0] = Json::array({1});
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);

  doc = good;
  doc["bivector"][0]["terms"].push_back(doc["bivector"][0]["terms"][0]);
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);  // duplicate exponents

  doc = good;
  doc["bivector"].push_back(doc["bivector"][0]);
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);  // duplicate pair

  doc = good;
  doc["degree"] = 1;  // quadratic terms now exceed the truncation degree
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);

  doc = good;
  doc["schedule"]["t0"] = "1";
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);

  doc = good;
  doc["mode"] = "analytic";
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);

  doc = Json::parse(serialize_problem(rotation_algebroid_file(3)));
  doc["bracket"][0]["coeffs"][2] = Json::array();  // now an all-zero entry
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);
}

TEST_CASE("problem instantiation honors degree override and homothety") {
  ProblemFile plain = so3_file(4);
  const LeviProblem base = to_problem(plain);
  CHECK(base.cap == 4);
  CHECK(base.pi == *plain.pi);

  const LeviProblem capped = to_problem(plain, 3);
  CHECK(capped.cap == 3);
  CHECK(capped.pi.upper(0, 1) == plain.pi->upper(0, 1).recapped(3));

  ProblemFile scaled = so3_file(4);
  scaled.homothety = Rational(3);
  CHECK(to_problem(scaled).pi == base.pi.homothety(Rational(3)));
  CHECK(validate_problem(to_problem(scaled)).all_passed());
}

TEST_CASE("validate command") {
  const std::string good_text = serialize_problem(so3_file(4));
  const CommandResult good = cmd_validate(good_text);
  CHECK(good.ok);
  CHECK(good.report["format"] == kReportFormat);
  CHECK(good.report["tool"] == kToolVersion);
  CHECK(good.report["command"] == "validate");
  CHECK(good.report["passed"] == true);
  CHECK(good.report["input"]["kind"] == "poisson");
  CHECK(good.report["input_hash"] == input_hash(good_text));
  for (const Json& row : good.report["validation"]) {
    CHECK(row["passed"] == true);
  }

  // A non-Poisson bivector fails on the jacobiator row, with a witness.
  ProblemFile bad = so3_file(4);
  bad.pi->upper(0, 1) += var(3, 4, 0) * var(3, 4, 0);
  const CommandResult res = cmd_validate(serialize_problem(bad));
  CHECK_FALSE(res.ok);
  bool saw = false;
  for (const Json& row : res.report["validation"]) {
    if (row["name"] == "jacobiator vanishes modulo degree > cap-1") {
      saw = true;
      CHECK(row["passed"] == false);
      CHECK_FALSE(row["witness"].get<std::string>().empty());
    }
  }
  CHECK(saw);

  // Inconsistent algebroid data surfaces as a failing row, not a crash.
  ProblemFile alg = rotation_algebroid_file(3);
  alg.algebroid->anchor[0][0] += JetPoly::constant(3, 3, Rational(1));
  const CommandResult alg_res = cmd_validate(serialize_problem(alg));
  CHECK_FALSE(alg_res.ok);
  CHECK(alg_res.report["validation"][0]["name"] == "algebroid data consistent");
  CHECK(alg_res.report["validation"][0]["passed"] == false);
}

TEST_CASE("normalize command produces a deterministic report") {
  const std::string text = serialize_problem(so3_file(5));
  const CommandResult first = cmd_normalize(text, {});
  CHECK(first.ok);
  const Json& run = first.report["run"];
  CHECK(run["mode"] == "formal");
  CHECK(run["converged"] == true);
  CHECK(run["composition_consistent"] == true);
  CHECK(run["final_relations"]["ok"] == true);
  CHECK(run["constants"]["s"] == 2);
  CHECK(run["constants"]["A"] == 21);
  CHECK_FALSE(run["iterations"].empty());
  CHECK_FALSE(run["transformations"].empty());
  for (const Json& t : run["transformations"]) {
    CHECK(t["direct_equals_assembled_xx"] == true);
    CHECK(t["direct_equals_assembled_xy"] == true);
    CHECK(t["differential_expansion_xx"] == true);
    CHECK(t["differential_expansion_xy"] == true);
    CHECK(t["jacobiator_zero_after"] == true);
  }
  // The last iteration reports an exactly-normal structure.
  CHECK(run["iterations"].back()["error_order"] == "infinity");

  // Byte-determinism after stripping the timing fields.
  const CommandResult second = cmd_normalize(text, {});
  CHECK(strip_timing(first.report).dump() == strip_timing(second.report).dump());
  CHECK(first.report.contains("timing_ms"));
  CHECK_FALSE(strip_timing(first.report).contains("timing_ms"));

  // Overrides flow into the echoed input and the run.
  CliOverrides ov;
  ov.mode = RunMode::Scheduled;
  const CommandResult sched = cmd_normalize(text, ov);
  CHECK(sched.ok);
  CHECK(sched.report["input"]["mode"] == "scheduled");
  CHECK(sched.report["run"]["mode"] == "scheduled");
  REQUIRE(sched.report["run"].contains("audit"));
  const Json& audit = sched.report["run"]["audit"];
  CHECK(audit["limitation"].get<std::string>().find("reported, not gated") !=
        std::string::npos);
  CHECK_FALSE(audit["steps"].empty());

  // Validation failures yield a report with ok = false and no run.
  ProblemFile bad = so3_file(4);
  bad.pi->upper(0, 1) += var(3, 4, 0);
  const CommandResult failed = cmd_normalize(serialize_problem(bad), {});
  CHECK_FALSE(failed.ok);
  CHECK(failed.report["run"].is_null());
}

TEST_CASE("algebroid command normalizes section data") {
  const std::string text = serialize_problem(rotation_algebroid_file(4));
  const CommandResult res = cmd_algebroid(text, {});
  CHECK(res.ok);
  const Json& run = res.report["run"];
  CHECK(run["converged"] == true);
  CHECK(run["final_relations"]["ok"] == true);
  CHECK_FALSE(run["transformations"].empty());
  for (const Json& t : run["transformations"]) {
    CHECK(t["fiberwise_linear_after"] == true);
  }

  // The command refuses Poisson inputs.
  CHECK_THROWS_AS(cmd_algebroid(serialize_problem(so3_file(3)), {}),
                  std::invalid_argument);
}

TEST_CASE("cohomology command verifies both modules") {
  // Semidirect-product model on 6 variables: both coefficient modules are
  // nontrivial (at n = m the y-fields module would be empty).
  ProblemFile file;
  file.kind = ProblemMode::Poisson;
  file.degree = 3;
  StructureData d = so3_data();
  d.n = 6;
  d.a.assign(3, std::vector<std::vector<Rational>>(
                    3, std::vector<Rational>(3, Rational(0))));
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) d.a[i][a][b] = Rational(eps(i, a, b));
  file.data = d;
  file.pi = model_bivector(d, 3);
  const CommandResult res = cmd_cohomology(serialize_problem(file), 3);
  CHECK(res.ok);
  CHECK(res.report["passed"] == true);
  REQUIRE(res.report["modules"].size() == 2);
  CHECK(res.report["modules"][0]["module"] == "functions");
  CHECK(res.report["modules"][1]["module"] == "y-fields");
  for (const Json& mod : res.report["modules"]) {
    CHECK(mod["all_passed"] == true);
    CHECK_FALSE(mod["identity_checks"].empty());
    CHECK_FALSE(mod["dimensions"].empty());
  }
}

TEST_CASE("schedule command reports constants and sequence") {
  const CommandResult res =
      cmd_schedule(3, PlanVariant::MainText, Rational(20), 3);
  CHECK(res.ok);
  CHECK(res.report["constants"]["n"] == 3);
  CHECK(res.report["constants"]["s"] == 2);
  CHECK(res.report["constants"]["A"] == 21);
  CHECK(res.report["constants"]["epsilon"] == "1/176");
  CHECK(res.report["t0_too_small"] == false);
  REQUIRE(res.report["sequence"].size() == 4);
  CHECK(res.report["sequence"][0]["radius"] == "2");
  CHECK(res.report["sequence"][1]["radius"] == "3/2");
  CHECK(res.report["sequence"][1]["exponent"]["num"] == "3");
  CHECK(res.report["sequence"][1]["exponent"]["den"] == "2");
  for (const Json& row : res.report["validator"]) CHECK(row["passed"] == true);

  // t0 = 16 falls below the summability cutoff at d = 0.
  const CommandResult small =
      cmd_schedule(3, PlanVariant::MainText, Rational(16), 3);
  CHECK_FALSE(small.ok);
  CHECK(small.report["t0_too_small"] == true);
  CHECK(small.report["sequence"][0]["cutoff_ok"] == false);

  CHECK_THROWS_AS(cmd_schedule(0, PlanVariant::MainText, Rational(16), 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(cmd_schedule(3, PlanVariant::MainText, Rational(1), 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(cmd_schedule(3, PlanVariant::MainText, Rational(16), -1),
                  std::invalid_argument);
}

TEST_CASE("axioms command checks both norm flavors") {
  const CommandResult res = cmd_axioms(serialize_problem(so3_file(4)));
  CHECK(res.ok);
  CHECK(res.report["passed"] == true);
  REQUIRE(res.report["flavors"].size() == 2);
  CHECK(res.report["flavors"][0]["flavor"] == "spectral-degree");
  CHECK(res.report["flavors"][1]["flavor"] == "majorant-absolute");
  for (const Json& flavor : res.report["flavors"]) {
    CHECK(flavor["all_passed"] == true);
    CHECK(flavor["checks"].size() == 4);
  }
  CHECK(res.report["sample_count"].get<int>() > 3);
}

TEST_CASE("input hashing and timing strip") {
  CHECK(input_hash("") == "cbf29ce484222325");
  CHECK(input_hash("a") == "af63dc4c8601ec8c");
  CHECK(input_hash("levi") == input_hash("levi"));
  CHECK(input_hash("levi") != input_hash("levj"));
  CHECK(input_hash("x").size() == 16);

  const Json nested{{"timing_ms", 12},
                    {"keep", 1},
                    {"inner", Json{{"timing_ms", 7}, {"value", "v"}}},
                    {"list", Json::array({Json{{"timing_ms", 3}, {"d", 0}}})}};
  const Json stripped = strip_timing(nested);
  CHECK_FALSE(stripped.contains("timing_ms"));
  CHECK(stripped["keep"] == 1);
  CHECK_FALSE(stripped["inner"].contains("timing_ms"));
  CHECK(stripped["inner"]["value"] == "v");
  CHECK_FALSE(stripped["list"][0].contains("timing_ms"));
  CHECK(stripped["list"][0]["d"] == 0);
}
