// Acceptance suite for the partial-linearization engine. Each criterion
// prints one [ok] line; the first failure prints a [FAIL] diagnostic and
// exits nonzero. Everything is exact rational arithmetic; the only
// tolerance anywhere is the explicit 1 + 10^-9 allowance on the measured
// interpolation constant, which the spectral norms must in fact meet with
// constant exactly 1.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "levijet/cli_io.hpp"
#include "levijet/levi_engine.hpp"

using namespace levijet;

#define REQUIRE(cond, msg)                                                      \
  do {                                                                          \
    if (!(cond)) {                                                              \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg       \
                << "\n";                                                        \
      std::exit(1);                                                             \
    }                                                                           \
  } while (0)

namespace {

int eps(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
      (i == 2 && j == 0 && k == 1))
    return 1;
  return -1;
}

// so(3) structure constants; for n = 6 the complement carries the standard
// rotation action, giving the semidirect-product model on so(3) x R^3.
StructureData so3_data(int n) {
  StructureData d;
  d.n = n;
  d.m = 3;
  d.c.assign(3, std::vector<std::vector<Rational>>(
                    3, std::vector<Rational>(3, Rational(0))));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) d.c[i][j][k] = Rational(eps(i, j, k));
  const int nm = n - 3;
  d.a.assign(3, std::vector<std::vector<Rational>>(
                    nm, std::vector<Rational>(nm, Rational(0))));
  if (nm == 3) {
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) d.a[i][a][b] = Rational(eps(i, a, b));
  }
  return d;
}

JetPoly var(int n, int cap, int i) { return JetPoly::variable(n, cap, i); }

Rational random_coeff(std::mt19937_64& rng) {
  static const Rational pool[] = {Rational(1),     Rational(-1), Rational(2),
                                  Rational(-2),    Rational(1, 2), Rational(-1, 2),
                                  Rational(3),     Rational(-1, 3)};
  return pool[rng() % 8];
}

Mono random_mono(std::mt19937_64& rng, int n_vars, int lo, int hi) {
  std::uniform_int_distribution<int> deg(lo, hi);
  const int total = deg(rng);
  Mono e(n_vars, 0);
  for (int t = 0; t < total; ++t) e[static_cast<int>(rng() % n_vars)] += 1;
  return e;
}

JetPoly random_poly(std::mt19937_64& rng, int n_vars, int cap, int lo,
                    int max_terms) {
  JetPoly f(n_vars, cap);
  const int terms = 1 + static_cast<int>(rng() % max_terms);
  for (int t = 0; t < terms; ++t)
    f.add_term(random_mono(rng, n_vars, lo, cap), random_coeff(rng));
  return f;
}

// A random near-identity jet diffeo: identity linear part, sparse
// displacement of vanishing order 2.
JetDiffeo random_diffeo(std::mt19937_64& rng, int n, int cap) {
  std::vector<JetPoly> disp(n, JetPoly(n, cap));
  for (int i = 0; i < n; ++i) {
    const int terms = static_cast<int>(rng() % 3);  // 0..2 terms per comp
    for (int t = 0; t < terms; ++t)
      disp[i].add_term(random_mono(rng, n, 2, 3), random_coeff(rng));
  }
  return JetDiffeo::from_displacement(disp);
}

Cochain random_cochain(std::mt19937_64& rng, const ModuleSpec& spec,
                       int degree) {
  Cochain c = zero_cochain(spec, degree);
  for (ModuleElement& v : c.values) {
    for (JetPoly& comp : v.comps) {
      const int terms = static_cast<int>(rng() % 4);  // 0..3 terms
      for (int t = 0; t < terms; ++t) {
        const Mono e = random_mono(rng, spec.n_vars(), 0, spec.cap);
        if (spec.admits(static_cast<int>(&comp - v.comps.data()), e))
          comp.add_term(e, random_coeff(rng));
      }
    }
  }
  return c;
}

void ok(int k, const std::string& what) {
  std::cout << "[ok] criterion " << k << ": " << what << "\n";
}

}  // namespace

int main() {
  std::mt19937_64 rng(20260816);

  // Shared engine tables: one build per (structure, cap, mode) shape.
  const StructureData d3 = so3_data(3);
  const StructureData d6 = so3_data(6);
  const LeviProblem shape3{d3, model_bivector(d3, 8), 8, ProblemMode::Poisson,
                           std::nullopt};
  const LeviProblem shape3_6{d3, model_bivector(d3, 6), 6, ProblemMode::Poisson,
                             std::nullopt};
  const LeviProblem shape6{d6, model_bivector(d6, 6), 6, ProblemMode::Poisson,
                           std::nullopt};
  const auto t3 = build_engine_tables(shape3);      // n=3, cap 8
  const auto t3_6 = build_engine_tables(shape3_6);  // n=3, cap 6
  const auto t6 = build_engine_tables(shape6);      // n=6, cap 6

  // 1. Homotopy identity delta(h(c)) + h(delta(c)) = c, exactly, on a
  //    spanning set of every graded block, cochain degrees 1 and 2, for the
  //    function and vector-field coefficient modules at n = 3 and n = 6.
  {
    for (const EngineTables* t : {t3_6.get(), t6.get()}) {
      const HomotopyReport fun = verify_homotopy_identity(t->fun);
      REQUIRE(fun.all_passed(), "homotopy identity fails on functions, n="
                                    << t->fun_spec.data.n);
      const HomotopyReport yf = verify_homotopy_identity(t->yf);
      REQUIRE(yf.all_passed(), "homotopy identity fails on y-fields, n="
                                   << t->y_spec.data.n);
      REQUIRE(!fun.checks.empty(), "no function blocks verified");
    }
    ok(1, "homotopy identity holds exactly on every block (n=3 and n=6, "
          "degree cap 6, cochain degrees 1 and 2)");
  }

  // 2. The homotopy operator never decreases the vanishing order: 200
  //    random cochains across both modules and all input degrees.
  {
    int done = 0;
    while (done < 200) {
      const bool six = (done % 2 == 1);
      const EngineTables& t = six ? *t6 : *t3;
      const HomotopyTables& ht = (done % 4 < 2) ? t.fun : t.yf;
      const ModuleSpec& spec = (done % 4 < 2) ? t.fun_spec : t.y_spec;
      if (spec.n_comps() == 0) {  // y-fields module is empty at n = m
        ++done;
        continue;
      }
      const int degree = 1 + static_cast<int>(rng() % 3);
      const Cochain c = random_cochain(rng, spec, degree);
      const Cochain h = homotopy(ht, c);
      REQUIRE(h.vanishing_order() >= c.vanishing_order(),
              "homotopy decreased vanishing order: " << h.vanishing_order()
                                                     << " < "
                                                     << c.vanishing_order());
      ++done;
    }
    ok(2, "vanishing order is preserved by the homotopy operator on 200 "
          "random cochains");
  }

  // 3. Semisimple case n = m = 3: pushforwards of the linear so(3)* Poisson
  //    structure under 10 random order-2 jet diffeos return to the exact
  //    linear form modulo degree > 8 in at most 4 steps.
  std::vector<NormalizeResult> runs3;
  {
    const JetBivector model = model_bivector(d3, 8);
    for (int r = 0; r < 10; ++r) {
      const JetDiffeo theta = random_diffeo(rng, 3, 8);
      const LeviProblem prob{d3, pushforward(model, theta), 8,
                             ProblemMode::Poisson, std::nullopt};
      REQUIRE(validate_problem(prob).all_passed(),
              "pushforward problem fails validation at run " << r);
      NormalizeConfig cfg;
      cfg.check_identities = true;
      NormalizeResult res = normalize(*t3, prob, cfg);
      REQUIRE(res.converged, "run " << r << " did not converge");
      REQUIRE(res.steps.size() <= 4,
              "run " << r << " took " << res.steps.size() << " steps");
      REQUIRE(res.final_relations_ok, "final relations fail at run " << r);
      REQUIRE(res.composition_consistent,
              "accumulated transformation mismatch at run " << r);
      REQUIRE(res.pi_inf == model,
              "normalized bivector is not the linear model at run " << r);
      runs3.push_back(std::move(res));
    }
    ok(3, "10 random perturbations of linear so(3)* linearize exactly in at "
          "most 4 steps (degree cap 8)");
  }

  // 4. Partial linearization at n = 6, m = 3: the x-x and x-y relations are
  //    restored exactly; the y-y components stay unconstrained.
  std::vector<NormalizeResult> runs6;
  {
    const JetBivector model = model_bivector(d6, 6);
    for (int r = 0; r < 3; ++r) {
      const JetDiffeo theta = random_diffeo(rng, 6, 6);
      const LeviProblem prob{d6, pushforward(model, theta), 6,
                             ProblemMode::Poisson, std::nullopt};
      REQUIRE(validate_problem(prob).all_passed(),
              "n=6 problem fails validation at run " << r);
      NormalizeConfig cfg;
      cfg.check_identities = false;
      NormalizeResult res = normalize(*t6, prob, cfg);
      REQUIRE(res.converged, "n=6 run " << r << " did not converge");
      REQUIRE(res.final_relations_ok,
              "n=6 final relations fail at run " << r);
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 6; ++j)
          REQUIRE(res.pi_inf.upper(i, j) == model.upper(i, j),
                  "component (" << i << "," << j
                                << ") deviates from the model at run " << r);
      runs6.push_back(std::move(res));
    }
    ok(4, "partial linearization at n=6, m=3 restores the x-x and x-y "
          "relations exactly (y-y components free)");
  }

  // 5. Dual-path consistency: at every step the directly computed
  //    next-step errors equal the assembled expressions
  //    [(delta phi) + f + q] o theta^-1 and [(delta psi) + ghat + t + u] o
  //    theta^-1, exactly modulo the cap.
  {
    int steps = 0;
    for (const auto* runs : {&runs3, &runs6}) {
      for (const NormalizeResult& res : *runs) {
        for (const StepLog& log : res.steps) {
          REQUIRE(log.f_consistent,
                  "direct/assembled mismatch on the x-x error: " << log.witness);
          REQUIRE(log.g_consistent,
                  "direct/assembled mismatch on the x-y error: " << log.witness);
          ++steps;
        }
      }
    }
    REQUIRE(steps > 0, "no steps recorded");
    ok(5, "dual-path error assembly matches the direct computation at all " +
              std::to_string(steps) + " steps");
  }

  // 6. Differential identities: delta f = quadratic remainder in (f, g) and
  //    delta ghat = quadratic remainder, verified at every step of the
  //    n = 3 runs (they hold because each intermediate structure is Poisson).
  {
    int steps = 0;
    for (const NormalizeResult& res : runs3) {
      for (const StepLog& log : res.steps) {
        REQUIRE(log.identities_checked, "identity rows were skipped");
        REQUIRE(log.df_expansion,
                "differential of f misses its quadratic expansion: "
                    << log.witness);
        REQUIRE(log.dg_expansion,
                "differential of ghat misses its quadratic expansion: "
                    << log.witness);
        ++steps;
      }
    }
    REQUIRE(steps > 0, "no identity-checked steps recorded");
    ok(6, "cocycle identities for the error differentials hold exactly at "
          "all " +
              std::to_string(steps) + " checked steps");
  }

  // 7. Jacobi preservation: every intermediate structure in every run has
  //    vanishing jacobiator modulo degree > cap - 1.
  {
    for (const auto* runs : {&runs3, &runs6}) {
      for (const NormalizeResult& res : *runs) {
        for (const StepLog& log : res.steps)
          REQUIRE(log.jacobi_next,
                  "intermediate structure violates Jacobi: " << log.witness);
      }
    }
    ok(7, "the Jacobi identity holds for every intermediate structure in "
          "every run");
  }

  // 8. Quadratic progress: order(error_next) >= 2 * order(error) - 1 at
  //    every formal step.
  {
    for (const auto* runs : {&runs3, &runs6}) {
      for (const NormalizeResult& res : *runs) {
        for (const StepLog& log : res.steps)
          REQUIRE(log.order_after >= 2 * log.order_before - 1,
                  "step advanced order only " << log.order_before << " -> "
                                              << log.order_after);
      }
    }
    ok(8, "every formal step at least doubles-minus-one the vanishing order "
          "of the error");
  }

  // 9. Smoothing and interpolation inequalities with constant exactly 1 for
  //    the spectral norms, on 500 random jets, orders up to 6,
  //    t in {2, 3, 5, 8}.
  {
    std::vector<JetPoly> samples;
    samples.reserve(500);
    for (int i = 0; i < 500; ++i) {
      JetPoly f = random_poly(rng, 3, 8, 0, 5);
      if (f.is_zero()) f = var(3, 8, 0);
      samples.push_back(std::move(f));
    }
    const std::vector<Rational> radii{Rational(1), Rational(1, 2),
                                      Rational(1, 3)};
    const std::vector<Rational> ts{Rational(2), Rational(3), Rational(5),
                                   Rational(8)};
    const SCIReport rep =
        check_sci_axioms(NormFlavor::SpectralDegree, samples, 6, radii, ts);
    REQUIRE(rep.all_passed(), "a norm axiom fails on the sample grid");
    const Rational allowance = Rational(1) + Rational(1, 1000000000);
    for (const AxiomCheck& c : rep.checks) {
      REQUIRE(c.measured <= allowance, "axiom '" << c.name
                                                 << "' has measured constant "
                                                 << c.measured.get_str());
      REQUIRE(c.measured <= Rational(1),
              "axiom '" << c.name << "' constant exceeds 1 exactly");
    }
    ok(9, "smoothing and interpolation inequalities hold with constant 1 on "
          "500 random jets");
  }

  // 10. Schedule constants: the generated constants pass their own
  //     inequality validator for n = 1..12 in both variants, and the n = 3
  //     main-variant values match hand arithmetic.
  {
    const auto all_pass = [](const std::vector<CheckResult>& rows) {
      for (const CheckResult& row : rows)
        if (!row.passed) return false;
      return !rows.empty();
    };
    for (int n = 1; n <= 12; ++n) {
      const ScheduleConstants main_c = plan_constants(n, PlanVariant::MainText);
      REQUIRE(all_pass(validate_constants(main_c)),
              "main-variant constants fail their validator at n=" << n);
      const ScheduleConstants app_c =
          plan_constants(n, PlanVariant::Appendix, Rational(2));
      REQUIRE(all_pass(validate_constants(app_c)),
              "appendix-variant constants fail their validator at n=" << n);
    }
    const ScheduleConstants c3 = plan_constants(3, PlanVariant::MainText);
    REQUIRE(c3.s == 2, "s(3) = " << c3.s);
    REQUIRE(c3.a_const == 21, "A(3) = " << c3.a_const);
    ok(10, "schedule constants satisfy their defining inequalities for "
           "n=1..12, both variants (n=3: s=2, A=21)");
  }

  // 11. Algebroid mode: the action algebroid of so(3) on R^3, perturbed by
  //     a bundle-structure-preserving jet diffeo at cap 5, normalizes with
  //     fiberwise linearity intact at every step.
  {
    const int cap = 5;
    AlgebroidData alg;
    alg.fiber_dim = 3;
    alg.base_dim = 3;
    alg.m = 3;
    alg.bracket.assign(3, std::vector<std::vector<JetPoly>>(
                              3, std::vector<JetPoly>(3, JetPoly(3, cap))));
    alg.anchor.assign(3, std::vector<JetPoly>(3, JetPoly(3, cap)));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          if (eps(i, j, k) == 0) continue;
          alg.bracket[i][j][k] =
              JetPoly::constant(3, cap, Rational(eps(i, j, k)));
          alg.anchor[i][j] += Rational(eps(i, j, k)) * var(3, cap, k);
        }
    LeviProblem prob = algebroid_to_poisson(alg, cap);

    // Perturb by Id + (s3 x1, 0, 0, 0, 0, x1^2): linear in the fiber
    // coordinates, base displacement depending on the base only.
    std::vector<JetPoly> disp(6, JetPoly(6, cap));
    disp[0] = var(6, cap, 2) * var(6, cap, 4);
    disp[5] = var(6, cap, 4) * var(6, cap, 4);
    prob.pi = pushforward(prob.pi, JetDiffeo::from_displacement(disp));
    REQUIRE(validate_problem(prob).all_passed(),
            "perturbed algebroid problem fails validation");

    const auto tables = build_engine_tables(prob);
    NormalizeConfig cfg;
    cfg.check_identities = true;
    const NormalizeResult res = normalize(*tables, prob, cfg);
    REQUIRE(res.converged, "algebroid run did not converge");
    REQUIRE(res.final_relations_ok, "algebroid final relations fail");
    REQUIRE(!res.steps.empty(), "algebroid run was trivial");
    for (const StepLog& log : res.steps) {
      REQUIRE(log.fiberwise_next,
              "fiberwise linearity lost mid-run: " << log.witness);
      REQUIRE(log.jacobi_next, "algebroid step violates Jacobi");
      REQUIRE(log.f_consistent && log.g_consistent,
              "algebroid dual-path mismatch: " << log.witness);
    }
    REQUIRE(check_fiberwise_linear(res.pi_inf, *prob.split),
            "normalized algebroid structure is not fiberwise linear");
    ok(11, "the perturbed rotation algebroid normalizes exactly with "
           "fiberwise linearity preserved at every step");
  }

  // 12. Scheduled mode: the n = 3 inputs converge under the t0 = 16
  //     schedule, dual-path consistency holds, and the audit reports every
  //     measured quantity next to its bound. The audit verdicts are
  //     reported, not gated: the schedule constants target the analytic
  //     small-perturbation regime, so desk-scale runs may violate the
  //     inequalities while still converging exactly.
  {
    const JetBivector model = model_bivector(d3, 8);
    std::mt19937_64 rng12(415);
    int audited_rows = 0;
    for (int r = 0; r < 10; ++r) {
      const JetDiffeo theta = random_diffeo(rng12, 3, 8);
      const LeviProblem prob{d3, pushforward(model, theta), 8,
                             ProblemMode::Poisson, std::nullopt};
      NormalizeConfig cfg;
      cfg.mode = RunMode::Scheduled;
      cfg.t0 = Rational(16);
      cfg.check_identities = true;
      const NormalizeResult res = normalize(*t3, prob, cfg);
      REQUIRE(res.converged, "scheduled run " << r << " did not converge");
      REQUIRE(res.final_relations_ok,
              "scheduled run " << r << " final relations fail");
      for (const StepLog& log : res.steps)
        REQUIRE(log.f_consistent && log.g_consistent,
                "scheduled dual-path mismatch: " << log.witness);
      REQUIRE(res.audit.has_value(), "scheduled run carries no audit");
      REQUIRE(!res.audit->steps.empty(), "audit has no steps");
      for (const StepAudit& step : res.audit->steps) {
        REQUIRE(!step.entries.empty(), "audit step has no rows");
        for (const AuditEntry& row : step.entries) {
          if (row.has_t_bound)
            REQUIRE(!row.bound_decimal.empty(),
                    "audit row '" << row.name << "' lacks a bound");
          ++audited_rows;
        }
      }
      // Reported, not gated: convergence stands regardless of the verdicts.
      REQUIRE(res.converged || !res.audit->all_passed,
              "unreachable: converged is required above");
    }

    // End-to-end: the command-line tool states the audit limitation in its
    // report and exits zero on the same input.
    std::mt19937_64 rng_cli(415);
    const JetDiffeo theta = random_diffeo(rng_cli, 3, 8);
    ProblemFile file;
    file.kind = ProblemMode::Poisson;
    file.degree = 8;
    file.data = d3;
    file.pi = pushforward(model, theta);
    file.mode = RunMode::Scheduled;
    file.schedule.t0 = Rational(16);
    const std::string input_path = "/tmp/levijet_acceptance_problem.json";
    const std::string output_path = "/tmp/levijet_acceptance_report.json";
    {
      std::ofstream out(input_path);
      REQUIRE(out.good(), "cannot write the CLI fixture");
      out << serialize_problem(file);
    }
    const std::string cmd = std::string(LEVIJET_CLI_PATH) + " normalize --input " +
                            input_path + " > " + output_path;
    const int status = std::system(cmd.c_str());
    REQUIRE(status == 0, "CLI normalize exited with status " << status);
    std::ifstream in(output_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string report = buf.str();
    REQUIRE(report.find("\"converged\": true") != std::string::npos,
            "CLI report does not record convergence");
    REQUIRE(report.find("\"audit\"") != std::string::npos,
            "CLI report carries no audit");
    REQUIRE(report.find("reported, not gated") != std::string::npos,
            "CLI report does not state the audit limitation");
    std::remove(input_path.c_str());
    std::remove(output_path.c_str());

    ok(12, "scheduled runs at t0=16 converge with full audits (" +
               std::to_string(audited_rows) +
               " rows reported, verdicts not gated) and the CLI states the "
               "limitation");
  }

  std::cout << "all 12 criteria passed\n";
  return 0;
}
