#include "levijet/cli_io.hpp"

#include <chrono>
#include <cstdint>
#include <sstream>

#include "levijet/nash_moser_driver.hpp"

namespace levijet {

namespace {

long ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - start)
      .count();
}

// --- JSON field access with located errors -------------------------------

const Json& field(const Json& j, const std::string& key,
                  const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError("missing field '" + key + "'", where);
  }
  return j.at(key);
}

int int_field(const Json& j, const std::string& key,
              const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer()) {
    throw ParseError("field '" + key + "' must be an integer", where);
  }
  return v.get<int>();
}

std::string str_field(const Json& j, const std::string& key,
                      const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_string()) {
    throw ParseError("field '" + key + "' must be a string", where);
  }
  return v.get<std::string>();
}

// --- jet term lists -------------------------------------------------------

Json poly_to_json(const JetPoly& p) {
  Json out = Json::array();
  for (const auto& [mono, coef] : p.terms()) {
    Json exps = Json::array();
    for (int e : mono) exps.push_back(e);
    out.push_back(Json::array({exps, rational_string(coef)}));
  }
  return out;
}

JetPoly poly_from_json(const Json& j, int n_vars, int cap,
                       const std::string& where) {
  if (!j.is_array()) throw ParseError("term list must be an array", where);
  JetPoly p(n_vars, cap);
  int idx = 0;
  for (const Json& term : j) {
    const std::string tw = where + "/" + std::to_string(idx++);
    if (!term.is_array() || term.size() != 2) {
      throw ParseError("term must be [exponents, rational]", tw);
    }
    const Json& exps = term[0];
    if (!exps.is_array() || static_cast<int>(exps.size()) != n_vars) {
      throw ParseError(
          "exponent vector must have length " + std::to_string(n_vars), tw);
    }
    Mono mono(n_vars, 0);
    for (int v = 0; v < n_vars; ++v) {
      if (!exps[v].is_number_integer() || exps[v].get<int>() < 0) {
        throw ParseError("exponents must be non-negative integers", tw);
      }
      mono[v] = exps[v].get<int>();
    }
    if (total_degree(mono) > cap) {
      throw ParseError("term degree exceeds the truncation degree " +
                           std::to_string(cap),
                       tw);
    }
    if (!term[1].is_string()) {
      throw ParseError("coefficient must be a rational string", tw);
    }
    if (p.coeff(mono) != 0) throw ParseError("duplicate exponent vector", tw);
    p.add_term(mono, parse_rational(term[1].get<std::string>(), tw));
  }
  return p;
}

// --- nested rational arrays for structure constants ------------------------

Json constants_to_json(
    const std::vector<std::vector<std::vector<Rational>>>& arr) {
  Json out = Json::array();
  for (const auto& plane : arr) {
    Json jp = Json::array();
    for (const auto& row : plane) {
      Json jr = Json::array();
      for (const Rational& v : row) jr.push_back(rational_string(v));
      jp.push_back(jr);
    }
    out.push_back(jp);
  }
  return out;
}

std::vector<std::vector<std::vector<Rational>>> constants_from_json(
    const Json& j, int d0, int d1, int d2, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != d0) {
    throw ParseError("expected an array of length " + std::to_string(d0),
                     where);
  }
  std::vector<std::vector<std::vector<Rational>>> out(d0);
  for (int i = 0; i < d0; ++i) {
    const Json& plane = j[i];
    const std::string wi = where + "/" + std::to_string(i);
    if (!plane.is_array() || static_cast<int>(plane.size()) != d1) {
      throw ParseError("expected an array of length " + std::to_string(d1),
                       wi);
    }
    out[i].resize(d1);
    for (int a = 0; a < d1; ++a) {
      const Json& row = plane[a];
      const std::string wa = wi + "/" + std::to_string(a);
      if (!row.is_array() || static_cast<int>(row.size()) != d2) {
        throw ParseError("expected an array of length " + std::to_string(d2),
                         wa);
      }
      out[i][a].reserve(d2);
      for (int b = 0; b < d2; ++b) {
        if (!row[b].is_string()) {
          throw ParseError("structure constants must be rational strings",
                           wa + "/" + std::to_string(b));
        }
        out[i][a].push_back(parse_rational(row[b].get<std::string>(),
                                           wa + "/" + std::to_string(b)));
      }
    }
  }
  return out;
}

// --- report fragments -------------------------------------------------------

Json check_rows(const std::vector<CheckResult>& checks) {
  Json out = Json::array();
  for (const CheckResult& c : checks) {
    out.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"witness", c.witness}});
  }
  return out;
}

Json bivector_to_json(const JetBivector& pi) {
  Json out = Json::array();
  for (int i = 0; i < pi.n_vars(); ++i) {
    for (int j = i + 1; j < pi.n_vars(); ++j) {
      if (pi.upper(i, j).is_zero()) continue;
      out.push_back(
          {{"pair", Json::array({i, j})}, {"terms", poly_to_json(pi.upper(i, j))}});
    }
  }
  return out;
}

Json order_json(int order) {
  if (order >= kOrderInfinity) return Json("infinity");
  return Json(order);
}

Json variant_json(PlanVariant v) {
  return v == PlanVariant::MainText ? "main" : "appendix";
}

PlanVariant variant_from_string(const std::string& s,
                                const std::string& where) {
  if (s == "main") return PlanVariant::MainText;
  if (s == "appendix") return PlanVariant::Appendix;
  throw ParseError("variant must be 'main' or 'appendix'", where);
}

Json constants_json(const ScheduleConstants& c) {
  return Json{{"variant", variant_json(c.variant)},
              {"n", c.n},
              {"s", c.s},
              {"A", c.a_const},
              {"epsilon", rational_string(c.epsilon)},
              {"tau", rational_string(c.tau)},
              {"l", c.l},
              {"L", c.big_l},
              {"t0", rational_string(c.t0)}};
}

Json step_metrics_json(const StepMetrics& sm) {
  Json out{{"d", sm.d},
           {"error_order", order_json(sm.zeta_order)},
           {"spectral_radius", rational_string(sm.spectral_radius)},
           {"majorant_radius", rational_string(sm.majorant_radius)},
           {"structure_low_spectral", rational_string(sm.f_low_spectral)},
           {"structure_high_spectral", rational_string(sm.f_high_spectral)},
           {"structure_low_majorant", rational_string(sm.f_low_majorant)},
           {"structure_high_majorant", rational_string(sm.f_high_majorant)},
           {"error_low_spectral", rational_string(sm.zeta_low_spectral)},
           {"error_high_spectral", rational_string(sm.zeta_high_spectral)},
           {"error_low_majorant", rational_string(sm.zeta_low_majorant)},
           {"error_high_majorant", rational_string(sm.zeta_high_majorant)}};
  if (sm.has_outgoing) {
    out["transformation_low_spectral"] = rational_string(sm.chi_low_spectral);
    out["transformation_low_majorant"] = rational_string(sm.chi_low_majorant);
  }
  out["smoothing_cutoff"] = sm.smoothing_cutoff < 0
                                ? Json(nullptr)
                                : Json(rational_string(sm.smoothing_cutoff));
  out["timing_ms"] = sm.timing_ms;
  return out;
}

Json step_log_json(const StepLog& lg) {
  Json out{{"order_before", order_json(lg.order_before)},
           {"order_after", order_json(lg.order_after)},
           {"smoothing_t", lg.smoothing_t ? Json(rational_string(*lg.smoothing_t))
                                          : Json(nullptr)},
           {"direct_equals_assembled_xx", lg.f_consistent},
           {"direct_equals_assembled_xy", lg.g_consistent},
           {"identities_checked", lg.identities_checked}};
  if (lg.identities_checked) {
    out["differential_expansion_xx"] = lg.df_expansion;
    out["differential_expansion_xy"] = lg.dg_expansion;
  }
  out["jacobiator_zero_after"] = lg.jacobi_next;
  out["fiberwise_linear_after"] = lg.fiberwise_next;
  out["witness"] = lg.witness;
  return out;
}

bool step_log_ok(const StepLog& lg, bool algebroid) {
  if (!lg.f_consistent || !lg.g_consistent || !lg.jacobi_next) return false;
  if (lg.identities_checked && (!lg.df_expansion || !lg.dg_expansion)) return false;
  if (algebroid && !lg.fiberwise_next) return false;
  return true;
}

constexpr const char* kAuditLimitation =
    "the inequality audit is reported, not gated: the schedule constants "
    "target the analytic small-perturbation regime, so desk-scale jet runs "
    "may violate them while still converging exactly";

Json audit_json(const ScheduleAudit& audit) {
  Json steps = Json::array();
  for (const StepAudit& sa : audit.steps) {
    Json rows = Json::array();
    for (const AuditEntry& e : sa.entries) {
      Json row{{"name", e.name}, {"measured", rational_string(e.measured)}};
      if (e.has_t_bound) {
        row["bound_exponent"] =
            Json{{"num", e.bound_num.get_str()}, {"den", e.bound_den.get_str()}};
        row["bound_decimal"] = e.bound_decimal + " (approx)";
      }
      row["passed"] = e.passed;
      row["note"] = e.note;
      rows.push_back(row);
    }
    steps.push_back({{"d", sa.d}, {"rows", rows}});
  }
  return Json{{"t0", rational_string(audit.t0)},
              {"all_passed", audit.all_passed},
              {"bounded_low_norm_constant",
               rational_string(audit.bounded_low_norm_constant)},
              {"t0_lower_decimal", audit.t0_lower_decimal.empty()
                                       ? Json(nullptr)
                                       : Json(audit.t0_lower_decimal + " (approx)")},
              {"t0_upper_decimal", audit.t0_upper_decimal.empty()
                                       ? Json(nullptr)
                                       : Json(audit.t0_upper_decimal + " (approx)")},
              {"feasibility", audit.feasibility},
              {"limitation", kAuditLimitation},
              {"steps", steps}};
}

Json report_skeleton(const std::string& command, const std::string& input_text,
                     const ProblemFile* echo) {
  Json report{{"format", kReportFormat},
              {"tool", kToolVersion},
              {"command", command},
              {"input_hash", input_hash(input_text)}};
  if (echo) report["input"] = problem_to_json(*echo);
  return report;
}

ProblemFile with_overrides(ProblemFile file, const CliOverrides& overrides) {
  if (overrides.mode) file.mode = *overrides.mode;
  if (overrides.degree) {
    if (*overrides.degree < 1) {
      throw std::invalid_argument("degree override must be >= 1");
    }
    file.degree = *overrides.degree;
  }
  if (overrides.t0) file.schedule.t0 = *overrides.t0;
  if (overrides.max_steps) file.schedule.max_steps = *overrides.max_steps;
  if (overrides.variant) file.schedule.variant = *overrides.variant;
  return file;
}

CommandResult run_normalize(const std::string& command,
                            const std::string& input_text,
                            const CliOverrides& overrides,
                            bool require_algebroid) {
  const auto start = std::chrono::steady_clock::now();
  const ProblemFile file =
      with_overrides(parse_problem(input_text), overrides);
  if (require_algebroid && file.kind != ProblemMode::Algebroid) {
    throw std::invalid_argument(
        "the algebroid command requires an algebroid problem file");
  }

  CommandResult res;
  res.report = report_skeleton(command, input_text, &file);
  const LeviProblem problem = to_problem(file);

  const ValidationReport validation = validate_problem(problem);
  res.report["validation"] = check_rows(validation.checks);
  if (!validation.all_passed()) {
    res.report["run"] = nullptr;
    res.report["timing_ms"] = ms_since(start);
    res.ok = false;
    return res;
  }

  NormalizeConfig cfg;
  cfg.mode = file.mode;
  cfg.variant = file.schedule.variant;
  cfg.tau = file.schedule.tau;
  cfg.t0 = file.schedule.t0;
  cfg.max_steps = file.schedule.max_steps;

  Json run;
  bool run_ok = false;
  try {
    const auto tables = build_engine_tables(problem);
    const NormalizeResult nr = normalize(*tables, problem, cfg);

    run["mode"] = file.mode == RunMode::Formal ? "formal" : "scheduled";
    run["constants"] = constants_json(nr.constants);
    run["converged"] = nr.converged;
    run["composition_consistent"] = nr.composition_consistent;

    Json iterations = Json::array();
    for (const StepMetrics& sm : nr.metrics.steps) {
      iterations.push_back(step_metrics_json(sm));
    }
    run["iterations"] = iterations;

    Json transformations = Json::array();
    bool steps_ok = true;
    for (const StepLog& lg : nr.steps) {
      transformations.push_back(step_log_json(lg));
      steps_ok = steps_ok &&
                 step_log_ok(lg, problem.mode == ProblemMode::Algebroid);
    }
    run["transformations"] = transformations;

    Json failures = Json::array();
    for (const std::string& s : nr.final_relation_failures) failures.push_back(s);
    run["final_relations"] = Json{{"ok", nr.final_relations_ok},
                                  {"failures", failures},
                                  {"note",
                                   "x-x and x-y brackets equal the model "
                                   "exactly modulo the truncation; the y-y "
                                   "components are free and reported as is"}};
    run["final_bivector"] = bivector_to_json(nr.pi_inf);
    Json disp = Json::array();
    for (int i = 0; i < problem.data.n; ++i) {
      disp.push_back({{"component", i},
                      {"terms", poly_to_json(nr.theta_inf.displacement()[i])}});
    }
    run["transformation_displacement"] = disp;
    if (nr.audit) run["audit"] = audit_json(*nr.audit);

    run_ok = nr.converged && nr.composition_consistent &&
             nr.final_relations_ok && steps_ok;
  } catch (const std::logic_error& e) {
    run["error"] = e.what();
    run_ok = false;
  }
  res.report["run"] = run;
  res.report["timing_ms"] = ms_since(start);
  res.ok = run_ok;
  return res;
}

}  // namespace

// --- rational strings -------------------------------------------------------

Rational parse_rational(const std::string& text, const std::string& where) {
  const std::optional<Rational> r = parse_rational(text);
  if (!r) throw ParseError("malformed rational '" + text + "'", where);
  return *r;
}

std::string rational_string(const Rational& value) { return to_string(value); }

std::string input_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

Json strip_timing(const Json& j) {
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [key, value] : j.items()) {
      if (key == "timing_ms") continue;
      out[key] = strip_timing(value);
    }
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const Json& v : j) out.push_back(strip_timing(v));
    return out;
  }
  return j;
}

// --- problem files -----------------------------------------------------------

Json problem_to_json(const ProblemFile& file) {
  Json j{{"format", kProblemFormat},
         {"kind", file.kind == ProblemMode::Poisson ? "poisson" : "algebroid"},
         {"degree", file.degree},
         {"mode", file.mode == RunMode::Formal ? "formal" : "scheduled"}};

  Json sched = Json::object();
  if (file.schedule.t0) sched["t0"] = rational_string(*file.schedule.t0);
  sched["variant"] = variant_json(file.schedule.variant);
  if (file.schedule.tau) sched["tau"] = rational_string(*file.schedule.tau);
  sched["max_steps"] = file.schedule.max_steps;
  j["schedule"] = sched;
  if (file.homothety != 1) j["homothety"] = rational_string(file.homothety);

  if (file.kind == ProblemMode::Poisson) {
    j["n"] = file.data->n;
    j["m"] = file.data->m;
    j["c"] = constants_to_json(file.data->c);
    j["a"] = constants_to_json(file.data->a);
    j["bivector"] = bivector_to_json(*file.pi);
  } else {
    const AlgebroidData& alg = *file.algebroid;
    j["fiber_dim"] = alg.fiber_dim;
    j["base_dim"] = alg.base_dim;
    j["m"] = alg.m;
    Json bracket = Json::array();
    for (int i = 0; i < alg.fiber_dim; ++i) {
      for (int jj = i + 1; jj < alg.fiber_dim; ++jj) {
        bool any = false;
        for (const JetPoly& p : alg.bracket[i][jj]) any = any || !p.is_zero();
        if (!any) continue;
        Json coeffs = Json::array();
        for (const JetPoly& p : alg.bracket[i][jj]) {
          coeffs.push_back(poly_to_json(p));
        }
        bracket.push_back(
            {{"pair", Json::array({i, jj})}, {"coeffs", coeffs}});
      }
    }
    j["bracket"] = bracket;
    Json anchor = Json::array();
    for (int i = 0; i < alg.fiber_dim; ++i) {
      Json row = Json::array();
      for (const JetPoly& p : alg.anchor[i]) row.push_back(poly_to_json(p));
      anchor.push_back(row);
    }
    j["anchor"] = anchor;
  }
  return j;
}

ProblemFile problem_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("problem file must be an object", "/");
  const std::string fmt = str_field(j, "format", "/format");
  if (fmt != kProblemFormat) {
    throw ParseError("unsupported format '" + fmt + "'", "/format");
  }

  ProblemFile file;
  const std::string kind = str_field(j, "kind", "/kind");
  if (kind == "poisson") {
    file.kind = ProblemMode::Poisson;
  } else if (kind == "algebroid") {
    file.kind = ProblemMode::Algebroid;
  } else {
    throw ParseError("kind must be 'poisson' or 'algebroid'", "/kind");
  }

  file.degree = int_field(j, "degree", "/degree");
  if (file.degree < 1) throw ParseError("degree must be >= 1", "/degree");

  if (j.contains("mode")) {
    const std::string mode = str_field(j, "mode", "/mode");
    if (mode == "formal") {
      file.mode = RunMode::Formal;
    } else if (mode == "scheduled") {
      file.mode = RunMode::Scheduled;
    } else {
      throw ParseError("mode must be 'formal' or 'scheduled'", "/mode");
    }
  }

  if (j.contains("schedule")) {
    const Json& sched = j.at("schedule");
    if (!sched.is_object()) {
      throw ParseError("schedule options must be an object", "/schedule");
    }
    if (sched.contains("t0")) {
      file.schedule.t0 = parse_rational(
          str_field(sched, "t0", "/schedule/t0"), "/schedule/t0");
      if (*file.schedule.t0 <= 1) {
        throw ParseError("t0 must be > 1", "/schedule/t0");
      }
    }
    if (sched.contains("variant")) {
      file.schedule.variant = variant_from_string(
          str_field(sched, "variant", "/schedule/variant"),
          "/schedule/variant");
    }
    if (sched.contains("tau")) {
      file.schedule.tau = parse_rational(
          str_field(sched, "tau", "/schedule/tau"), "/schedule/tau");
    }
    if (sched.contains("max_steps")) {
      file.schedule.max_steps =
          int_field(sched, "max_steps", "/schedule/max_steps");
    }
  }

  if (j.contains("homothety")) {
    file.homothety = parse_rational(
        str_field(j, "homothety", "/homothety"), "/homothety");
    if (file.homothety == 0) {
      throw ParseError("homothety must be nonzero", "/homothety");
    }
  }

  if (file.kind == ProblemMode::Poisson) {
    const int n = int_field(j, "n", "/n");
    const int m = int_field(j, "m", "/m");
    if (n < 1 || m < 1 || m > n) {
      throw ParseError("need 1 <= m <= n", "/m");
    }
    StructureData data;
    data.n = n;
    data.m = m;
    data.c = constants_from_json(field(j, "c", "/c"), m, m, m, "/c");
    if (j.contains("a") || n > m) {
      data.a = constants_from_json(field(j, "a", "/a"), m, n - m, n - m, "/a");
    } else {
      data.a.assign(m, std::vector<std::vector<Rational>>());
    }
    file.data = std::move(data);

    JetBivector pi(n, file.degree);
    const Json& biv = field(j, "bivector", "/bivector");
    if (!biv.is_array()) {
      throw ParseError("bivector must be an array of components", "/bivector");
    }
    int idx = 0;
    for (const Json& comp : biv) {
      const std::string cw = "/bivector/" + std::to_string(idx++);
      const Json& pair = field(comp, "pair", cw);
      if (!pair.is_array() || pair.size() != 2 ||
          !pair[0].is_number_integer() || !pair[1].is_number_integer()) {
        throw ParseError("pair must be [i, j] integers", cw);
      }
      const int a = pair[0].get<int>();
      const int b = pair[1].get<int>();
      if (a < 0 || b <= a || b >= n) {
        throw ParseError("component indices must satisfy 0 <= i < j < n", cw);
      }
      if (!pi.upper(a, b).is_zero()) {
        throw ParseError("duplicate bivector component", cw);
      }
      pi.upper(a, b) =
          poly_from_json(field(comp, "terms", cw), n, file.degree, cw + "/terms");
    }
    file.pi = std::move(pi);
  } else {
    AlgebroidData alg;
    alg.fiber_dim = int_field(j, "fiber_dim", "/fiber_dim");
    alg.base_dim = int_field(j, "base_dim", "/base_dim");
    alg.m = int_field(j, "m", "/m");
    if (alg.fiber_dim < 1 || alg.base_dim < 1 || alg.m < 1 ||
        alg.m > alg.fiber_dim) {
      throw ParseError(
          "need fiber_dim >= 1, base_dim >= 1 and 1 <= m <= fiber_dim", "/m");
    }
    const int nf = alg.fiber_dim;
    const int nb = alg.base_dim;
    alg.bracket.assign(nf, std::vector<std::vector<JetPoly>>(
                               nf, std::vector<JetPoly>(
                                       nf, JetPoly(nb, file.degree))));
    alg.anchor.assign(nf, std::vector<JetPoly>(nb, JetPoly(nb, file.degree)));

    const Json& bracket = field(j, "bracket", "/bracket");
    if (!bracket.is_array()) {
      throw ParseError("bracket must be an array of pair entries", "/bracket");
    }
    int idx = 0;
    for (const Json& entry : bracket) {
      const std::string ew = "/bracket/" + std::to_string(idx++);
      const Json& pair = field(entry, "pair", ew);
      if (!pair.is_array() || pair.size() != 2 ||
          !pair[0].is_number_integer() || !pair[1].is_number_integer()) {
        throw ParseError("pair must be [i, j] integers", ew);
      }
      const int a = pair[0].get<int>();
      const int b = pair[1].get<int>();
      if (a < 0 || b <= a || b >= nf) {
        throw ParseError(
            "bracket indices must satisfy 0 <= i < j < fiber_dim", ew);
      }
      const Json& coeffs = field(entry, "coeffs", ew);
      if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != nf) {
        throw ParseError(
            "coeffs must list one term list per section (" +
                std::to_string(nf) + ")",
            ew);
      }
      bool any = false;
      for (int k = 0; k < nf; ++k) {
        alg.bracket[a][b][k] = poly_from_json(
            coeffs[k], nb, file.degree, ew + "/coeffs/" + std::to_string(k));
        alg.bracket[b][a][k] = -alg.bracket[a][b][k];
        any = any || !alg.bracket[a][b][k].is_zero();
      }
      if (!any) throw ParseError("all-zero bracket entry; omit it instead", ew);
    }

    const Json& anchor = field(j, "anchor", "/anchor");
    if (!anchor.is_array() || static_cast<int>(anchor.size()) != nf) {
      throw ParseError(
          "anchor must list one row per section (" + std::to_string(nf) + ")",
          "/anchor");
    }
    for (int i = 0; i < nf; ++i) {
      const Json& row = anchor[i];
      const std::string rw = "/anchor/" + std::to_string(i);
      if (!row.is_array() || static_cast<int>(row.size()) != nb) {
        throw ParseError(
            "anchor row must list one term list per base variable (" +
                std::to_string(nb) + ")",
            rw);
      }
      for (int v = 0; v < nb; ++v) {
        alg.anchor[i][v] = poly_from_json(row[v], nb, file.degree,
                                          rw + "/" + std::to_string(v));
      }
    }
    file.algebroid = std::move(alg);
  }
  return file;
}

ProblemFile parse_problem(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), "byte " + std::to_string(e.byte));
  }
  return problem_from_json(j);
}

std::string serialize_problem(const ProblemFile& file) {
  return problem_to_json(file).dump(2) + "\n";
}

LeviProblem to_problem(const ProblemFile& file,
                       std::optional<int> degree_override) {
  const int cap = degree_override.value_or(file.degree);
  if (cap < 1) throw std::invalid_argument("to_problem: degree must be >= 1");

  LeviProblem problem;
  if (file.kind == ProblemMode::Poisson) {
    problem.data = *file.data;
    problem.cap = cap;
    problem.mode = ProblemMode::Poisson;
    JetBivector pi(problem.data.n, cap);
    for (int i = 0; i < problem.data.n; ++i) {
      for (int j = i + 1; j < problem.data.n; ++j) {
        pi.upper(i, j) = file.pi->upper(i, j).recapped(cap);
      }
    }
    problem.pi = std::move(pi);
  } else {
    AlgebroidData alg = *file.algebroid;
    if (degree_override) {
      for (auto& plane : alg.bracket) {
        for (auto& row : plane) {
          for (JetPoly& p : row) p = p.recapped(cap);
        }
      }
      for (auto& row : alg.anchor) {
        for (JetPoly& p : row) p = p.recapped(cap);
      }
    }
    problem = algebroid_to_poisson(alg, cap);
  }
  if (file.homothety != 1) {
    problem.pi = problem.pi.homothety(file.homothety);
  }
  return problem;
}

// --- commands ---------------------------------------------------------------

CommandResult cmd_validate(const std::string& input_text) {
  const auto start = std::chrono::steady_clock::now();
  const ProblemFile file = parse_problem(input_text);
  CommandResult res;
  res.report = report_skeleton("validate", input_text, &file);
  try {
    const LeviProblem problem = to_problem(file);
    const ValidationReport validation = validate_problem(problem);
    res.report["validation"] = check_rows(validation.checks);
    res.ok = validation.all_passed();
  } catch (const std::invalid_argument& e) {
    // Algebroid data that fails conversion is a validation failure, not a
    // crash: report the converter's witness as a failing row.
    res.report["validation"] = Json::array(
        {Json{{"name", "algebroid data consistent"},
              {"passed", false},
              {"witness", e.what()}}});
    res.ok = false;
  }
  res.report["passed"] = res.ok;
  res.report["timing_ms"] = ms_since(start);
  return res;
}

CommandResult cmd_normalize(const std::string& input_text,
                            const CliOverrides& overrides) {
  return run_normalize("normalize", input_text, overrides, false);
}

CommandResult cmd_algebroid(const std::string& input_text,
                            const CliOverrides& overrides) {
  return run_normalize("algebroid", input_text, overrides, true);
}

CommandResult cmd_cohomology(const std::string& input_text,
                             std::optional<int> degree_override) {
  const auto start = std::chrono::steady_clock::now();
  const ProblemFile file = parse_problem(input_text);
  CommandResult res;
  res.report = report_skeleton("cohomology", input_text, &file);

  const LeviProblem problem = to_problem(file, degree_override);
  const ValidationReport structure = validate_structure(problem.data);
  res.report["structure"] = check_rows(structure.checks);
  if (!structure.all_passed()) {
    res.report["modules"] = nullptr;
    res.report["timing_ms"] = ms_since(start);
    res.ok = false;
    return res;
  }

  const auto tables = build_engine_tables(problem);
  bool all = true;
  Json modules = Json::array();
  const struct {
    const char* name;
    const HomotopyTables* tables;
  } rows[] = {{"functions", &tables->fun}, {"y-fields", &tables->yf}};
  for (const auto& mod : rows) {
    const HomotopyReport rep = verify_homotopy_identity(*mod.tables);
    Json checks = Json::array();
    for (const HomotopyCheck& c : rep.checks) {
      Json key = Json::array();
      for (int v : c.block_key) key.push_back(v);
      checks.push_back({{"block", key},
                        {"cochain_degree", c.cochain_degree},
                        {"passed", c.passed},
                        {"witness", c.witness}});
    }
    Json dims = Json::array();
    for (const CohomologyRow& r : cohomology_dimensions(*mod.tables)) {
      Json key = Json::array();
      for (int v : r.block_key) key.push_back(v);
      dims.push_back({{"block", key},
                      {"dim", r.dim},
                      {"trivial_dim", r.trivial_dim},
                      {"ker_delta", r.ker_delta},
                      {"im_delta", r.im_delta}});
    }
    modules.push_back({{"module", mod.name},
                       {"identity_checks", checks},
                       {"all_passed", rep.all_passed()},
                       {"dimensions", dims}});
    all = all && rep.all_passed();
  }
  res.report["modules"] = modules;
  res.report["passed"] = all;
  res.report["timing_ms"] = ms_since(start);
  res.ok = all;
  return res;
}

CommandResult cmd_schedule(int n, PlanVariant variant, const Rational& t0,
                           int d_max) {
  const auto start = std::chrono::steady_clock::now();
  if (n < 1) throw std::invalid_argument("schedule: n must be >= 1");
  if (t0 <= 1) throw std::invalid_argument("schedule: t0 must be > 1");
  if (d_max < 0) throw std::invalid_argument("schedule: d_max must be >= 0");

  ScheduleConstants constants = plan_constants(n, variant);
  constants.t0 = t0;
  const std::vector<CheckResult> rows = validate_constants(constants);
  const ScheduleSequence seq = schedule(constants, d_max);

  CommandResult res;
  res.report = report_skeleton("schedule", "", nullptr);
  res.report.erase("input_hash");
  res.report["constants"] = constants_json(constants);
  res.report["validator"] = check_rows(rows);
  Json entries = Json::array();
  for (const ScheduleEntry& e : seq.entries) {
    entries.push_back({{"d", e.d},
                       {"exponent", Json{{"num", e.exp_num.get_str()},
                                         {"den", e.exp_den.get_str()}}},
                       {"radius", rational_string(e.r)},
                       {"t_decimal", e.t_decimal + " (approx)"},
                       {"cutoff_ok", e.cutoff_ok}});
  }
  res.report["sequence"] = entries;
  res.report["t0_too_small"] = seq.t0_too_small();

  bool ok = !seq.t0_too_small();
  for (const CheckResult& c : rows) ok = ok && c.passed;
  res.report["passed"] = ok;
  res.report["timing_ms"] = ms_since(start);
  res.ok = ok;
  return res;
}

CommandResult cmd_axioms(const std::string& input_text) {
  const auto start = std::chrono::steady_clock::now();
  const ProblemFile file = parse_problem(input_text);
  CommandResult res;
  res.report = report_skeleton("axioms", input_text, &file);

  const LeviProblem problem = to_problem(file);
  std::vector<JetPoly> samples;
  for (int i = 0; i < problem.data.n; ++i) {
    for (int j = i + 1; j < problem.data.n; ++j) {
      if (!problem.pi.upper(i, j).is_zero()) {
        samples.push_back(problem.pi.upper(i, j));
      }
    }
  }
  // A deterministic enrichment: pairwise products stretch the degree range
  // so the t^{p-q} scaling is exercised away from the linear band.
  const std::size_t base_count = std::min<std::size_t>(samples.size(), 4);
  for (std::size_t a = 0; a < base_count; ++a) {
    for (std::size_t b = a; b < base_count; ++b) {
      samples.push_back(samples[a] * samples[b]);
    }
  }
  if (samples.empty()) {
    throw std::invalid_argument("axioms: the bivector has no nonzero terms");
  }

  const std::vector<Rational> radii = {Rational(1), Rational(1, 2),
                                       Rational(1, 3)};
  const std::vector<Rational> ts = {Rational(2), Rational(3), Rational(5),
                                    Rational(8)};
  bool all = true;
  Json flavors = Json::array();
  for (const NormFlavor flavor :
       {NormFlavor::SpectralDegree, NormFlavor::MajorantAbsolute}) {
    const SCIReport rep = check_sci_axioms(flavor, samples, 6, radii, ts);
    Json checks = Json::array();
    for (const AxiomCheck& c : rep.checks) {
      checks.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"measured", rational_string(c.measured)},
                        {"witness", c.witness}});
    }
    flavors.push_back(
        {{"flavor", flavor == NormFlavor::SpectralDegree ? "spectral-degree"
                                                         : "majorant-absolute"},
         {"checks", checks},
         {"all_passed", rep.all_passed()}});
    all = all && rep.all_passed();
  }
  res.report["flavors"] = flavors;
  res.report["sample_count"] = static_cast<int>(samples.size());
  res.report["passed"] = all;
  res.report["timing_ms"] = ms_since(start);
  res.ok = all;
  return res;
}

}  // namespace levijet
