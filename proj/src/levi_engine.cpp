#include "levijet/levi_engine.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace levijet {

namespace {

std::string pair_tag(int i, int j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

std::string mixed_tag(int i, int a) {
  std::ostringstream os;
  os << "(" << i << ";" << a << ")";
  return os.str();
}

// f entry at an arbitrary (i, u) via antisymmetry; zero jet on i == u.
JetPoly f_entry(const Cochain& f, int m, int n, int cap, int i, int u) {
  if (i == u) return JetPoly(n, cap);
  if (i < u) return f.values[combination_rank(m, {i, u})].comps[0];
  return -f.values[combination_rank(m, {u, i})].comps[0];
}

// {F, y_a}_d = -{y_a, F}_d for the coordinate function y_a.
JetPoly bracket_with_y(const JetBivector& pi_d, int m, int a,
                       const JetPoly& f) {
  return -coordinate_bracket(pi_d, m + a, f);
}

}  // namespace

JetBivector model_bivector(const StructureData& data, int cap) {
  const int n = data.n;
  const int m = data.m;
  JetBivector model(n, cap);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        model.upper(i, j).add_term(mono_variable(n, k), data.c[i][j][k]);
      }
    }
    for (int a = 0; a < n - m; ++a) {
      for (int b = 0; b < n - m; ++b) {
        model.upper(i, m + a).add_term(mono_variable(n, m + b), data.a[i][a][b]);
      }
    }
  }
  return model;
}

ValidationReport validate_problem(const LeviProblem& problem) {
  ValidationReport rep;
  auto row = [&rep](const std::string& name, bool passed,
                    const std::string& witness) {
    rep.checks.push_back({name, passed, passed ? "" : witness});
  };

  const ValidationReport structure = validate_structure(problem.data);
  {
    std::string witness;
    for (const CheckResult& c : structure.checks) {
      if (!c.passed) {
        witness = c.name + (c.witness.empty() ? "" : " at " + c.witness);
        break;
      }
    }
    row("structure data valid", structure.all_passed(), witness);
  }

  const int n = problem.data.n;
  const int m = problem.data.m;
  const bool shape_ok =
      problem.pi.n_vars() == n && problem.pi.cap() == problem.cap &&
      problem.cap >= 1;
  {
    std::ostringstream os;
    os << "bivector on " << problem.pi.n_vars() << " variables with cap "
       << problem.pi.cap() << ", problem declares (" << n << ", "
       << problem.cap << ")";
    row("bivector shape matches (n, cap)", shape_ok, os.str());
  }
  if (!shape_ok) return rep;

  {
    bool ok = true;
    std::string witness;
    for (int i = 0; i < n && ok; ++i) {
      for (int j = i + 1; j < n && ok; ++j) {
        if (problem.pi.upper(i, j).vanishing_order() < 1) {
          ok = false;
          witness = "component " + pair_tag(i, j) + " has a constant term";
        }
      }
    }
    row("bivector vanishes at the origin", ok, witness);
  }

  const JetBivector model = model_bivector(problem.data, problem.cap);
  {
    bool ok = true;
    std::string witness;
    for (int i = 0; i < m && ok; ++i) {
      for (int j = i + 1; j < m && ok; ++j) {
        if (!(problem.pi.upper(i, j).homogeneous_part(1) ==
              model.upper(i, j))) {
          ok = false;
          witness = "component " + pair_tag(i, j);
        }
      }
    }
    row("x-x linear parts match the model", ok, witness);
  }
  {
    bool ok = true;
    std::string witness;
    for (int i = 0; i < m && ok; ++i) {
      for (int j = m; j < n && ok; ++j) {
        if (!(problem.pi.upper(i, j).homogeneous_part(1) ==
              model.upper(i, j))) {
          ok = false;
          witness = "component " + pair_tag(i, j);
        }
      }
    }
    row("x-y linear parts match the model", ok, witness);
  }

  {
    const JetTrivector jac = schouten_jacobiator(problem.pi);
    bool ok = jac.is_zero();
    std::string witness;
    if (!ok) {
      for (int i = 0; i < n && witness.empty(); ++i) {
        for (int j = i + 1; j < n && witness.empty(); ++j) {
          for (int k = j + 1; k < n && witness.empty(); ++k) {
            const JetPoly& comp = jac.upper(i, j, k);
            if (!comp.is_zero()) {
              std::ostringstream os;
              os << "triple (" << i << "," << j << "," << k
                 << "), first monomial ";
              const auto& term = *comp.terms().begin();
              os << "[";
              for (std::size_t v = 0; v < term.first.size(); ++v) {
                if (v) os << " ";
                os << term.first[v];
              }
              os << "]";
              witness = os.str();
            }
          }
        }
      }
    }
    row("jacobiator vanishes modulo degree > cap-1", ok, witness);
  }

  if (problem.mode == ProblemMode::Algebroid) {
    const bool split_ok = problem.split.has_value() &&
                          problem.split->fiber_total >= m &&
                          problem.split->fiber_total <= n;
    row("fiber split present and in range [m, n]", split_ok,
        problem.split ? "fiber_total = " + std::to_string(problem.split->fiber_total)
                      : "split missing");
    if (split_ok) {
      row("bivector fiberwise linear",
          check_fiberwise_linear(problem.pi, *problem.split), "");
    }
  } else {
    row("no fiber split outside algebroid mode", !problem.split.has_value(),
        "split present");
  }
  return rep;
}

std::unique_ptr<EngineTables> build_engine_tables(const LeviProblem& problem) {
  auto tables = std::make_unique<EngineTables>();
  const ModuleKind fun_kind = problem.mode == ProblemMode::Algebroid
                                  ? ModuleKind::FiberwiseLinear
                                  : ModuleKind::Functions;
  const std::optional<AlgebroidSplit> split =
      problem.mode == ProblemMode::Algebroid ? problem.split : std::nullopt;
  tables->fun_spec = build_module(problem.data, fun_kind, problem.cap, split);
  tables->y_spec =
      build_module(problem.data, ModuleKind::YFields, problem.cap, split);
  tables->cas = casimir_element(problem.data);
  tables->fun = build_homotopy_tables(tables->fun_spec, tables->cas);
  tables->yf = build_homotopy_tables(tables->y_spec, tables->cas);
  return tables;
}

int ErrorCochains::order() const {
  return std::min(f.vanishing_order(), g.vanishing_order());
}

ErrorCochains error_cochains(const EngineTables& tables,
                             const LeviProblem& problem,
                             const JetBivector& pi_d) {
  const int n = problem.data.n;
  const int m = problem.data.m;
  const JetBivector model = model_bivector(problem.data, problem.cap);

  ErrorCochains ec;
  ec.f = zero_cochain(tables.fun_spec, 2);
  const auto pairs = combinations(m, 2);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const int i = pairs[r][0];
    const int j = pairs[r][1];
    JetPoly dev = pi_d.upper(i, j) - model.upper(i, j);
    if (dev.vanishing_order() < 2) {
      throw std::logic_error(
          "error_cochains: linear part of the x-x bracket deviates from the "
          "model at " +
          pair_tag(i, j));
    }
    ec.f.values[r].comps[0] = std::move(dev);
    if (!element_admissible(tables.fun_spec, ec.f.values[r])) {
      throw std::logic_error("error_cochains: x-x error at " + pair_tag(i, j) +
                             " leaves the coefficient module");
    }
  }

  ec.g = zero_cochain(tables.y_spec, 1);
  for (int i = 0; i < m; ++i) {
    for (int a = 0; a < n - m; ++a) {
      JetPoly dev = pi_d.upper(i, m + a) - model.upper(i, m + a);
      if (dev.vanishing_order() < 2) {
        throw std::logic_error(
            "error_cochains: linear part of the x-y bracket deviates from "
            "the model at " +
            mixed_tag(i, a));
      }
      ec.g.values[i].comps[a] = std::move(dev);
    }
    if (!element_admissible(tables.y_spec, ec.g.values[i])) {
      throw std::logic_error("error_cochains: x-y error row " +
                             std::to_string(i) +
                             " leaves the coefficient module");
    }
  }
  return ec;
}

Cochain corrected_g(const EngineTables& tables, const LeviProblem& problem,
                    const JetBivector& pi_d, const Cochain& f,
                    const Cochain& g) {
  const int m = problem.data.m;
  const int nm = problem.data.n - m;
  const Cochain hf = homotopy(tables.fun, f);
  Cochain ghat = g;
  for (int i = 0; i < m; ++i) {
    const JetPoly& hfi = hf.values[i].comps[0];
    for (int a = 0; a < nm; ++a) {
      ghat.values[i].comps[a] -= bracket_with_y(pi_d, m, a, hfi);
    }
  }
  return ghat;
}

QuadraticTerms quadratic_terms(const EngineTables& tables,
                               const LeviProblem& problem,
                               const JetBivector& pi_d, const Cochain& f,
                               const Cochain& g,
                               const std::vector<JetPoly>& phi,
                               const std::vector<JetPoly>& psi) {
  const int n = problem.data.n;
  const int m = problem.data.m;
  const int nm = n - m;
  const int cap = problem.cap;
  if (static_cast<int>(phi.size()) != m ||
      static_cast<int>(psi.size()) != nm) {
    throw std::invalid_argument("quadratic_terms: update component count");
  }

  QuadraticTerms out;
  out.q = zero_cochain(tables.fun_spec, 2);
  const auto pairs = combinations(m, 2);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const int i = pairs[r][0];
    const int j = pairs[r][1];
    JetPoly acc(n, cap);
    for (int u = 0; u < m; ++u) {
      acc += f_entry(f, m, n, cap, i, u) * phi[j].derivative(u);
      acc -= f_entry(f, m, n, cap, j, u) * phi[i].derivative(u);
    }
    for (int b = 0; b < nm; ++b) {
      acc += g.values[i].comps[b] * phi[j].derivative(m + b);
      acc -= g.values[j].comps[b] * phi[i].derivative(m + b);
    }
    acc += poisson_bracket(pi_d, phi[i], phi[j]);
    out.q.values[r].comps[0] = std::move(acc);
  }

  const Cochain hf = homotopy(tables.fun, f);
  out.t = zero_cochain(tables.y_spec, 1);
  out.u = zero_cochain(tables.y_spec, 1);
  for (int i = 0; i < m; ++i) {
    const JetPoly smoothed_loss = hf.values[i].comps[0] + phi[i];
    for (int a = 0; a < nm; ++a) {
      JetPoly acc(n, cap);
      for (int u = 0; u < m; ++u) {
        acc += f_entry(f, m, n, cap, i, u) * psi[a].derivative(u);
      }
      for (int b = 0; b < nm; ++b) {
        acc += g.values[i].comps[b] * psi[a].derivative(m + b);
      }
      acc += poisson_bracket(pi_d, phi[i], psi[a]);
      out.t.values[i].comps[a] = std::move(acc);
      out.u.values[i].comps[a] = bracket_with_y(pi_d, m, a, smoothed_loss);
    }
  }
  return out;
}

namespace {

struct RawSolve {
  ErrorCochains ec;
  Cochain ghat;
  Cochain hf;  // degree 1, function coefficients
  std::vector<JetPoly> displacement;  // (-hf_1..-hf_m, -hg_1..-hg_{n-m})
};

RawSolve solve_raw(const EngineTables& tables, const LeviProblem& problem,
                   const JetBivector& pi_d) {
  const int m = problem.data.m;
  const int nm = problem.data.n - m;
  RawSolve raw;
  raw.ec = error_cochains(tables, problem, pi_d);
  raw.ghat = corrected_g(tables, problem, pi_d, raw.ec.f, raw.ec.g);
  raw.hf = homotopy(tables.fun, raw.ec.f);
  const Cochain hg = homotopy(tables.yf, raw.ghat);
  raw.displacement.reserve(problem.data.n);
  for (int i = 0; i < m; ++i) {
    raw.displacement.push_back(-raw.hf.values[i].comps[0]);
  }
  for (int a = 0; a < nm; ++a) {
    raw.displacement.push_back(-hg.values[0].comps[a]);
  }
  return raw;
}

// Everything measured about one executed transformation. theta is the final
// (possibly low-passed) diffeomorphism; raw carries the pre-step cochains.
StepLog complete_step(const EngineTables& tables, const LeviProblem& problem,
                      const JetBivector& pi_d, const RawSolve& raw,
                      const JetDiffeo& theta, const JetDiffeo& theta_inv,
                      const JetBivector& pi_next, bool check_identities) {
  const int n = problem.data.n;
  const int m = problem.data.m;
  const int nm = n - m;
  const int cap = problem.cap;

  StepLog log;
  log.order_before = raw.ec.order();

  const auto& disp = theta.displacement();
  const std::vector<JetPoly> phi(disp.begin(), disp.begin() + m);
  const std::vector<JetPoly> psi(disp.begin() + m, disp.end());

  const ErrorCochains after = error_cochains(tables, problem, pi_next);
  log.order_after = after.order();

  const QuadraticTerms qtu =
      quadratic_terms(tables, problem, pi_d, raw.ec.f, raw.ec.g, phi, psi);

  Cochain cphi = zero_cochain(tables.fun_spec, 1);
  for (int i = 0; i < m; ++i) cphi.values[i].comps[0] = phi[i];
  const Cochain dphi = ce_differential(tables.fun_spec, cphi);

  Cochain cpsi = zero_cochain(tables.y_spec, 0);
  cpsi.values[0].comps = psi;
  const Cochain dpsi = ce_differential(tables.y_spec, cpsi);

  auto note = [&log](const std::string& text) {
    if (log.witness.empty()) log.witness = text;
  };

  log.f_consistent = true;
  const auto pairs = combinations(m, 2);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const JetPoly assembled =
        compose(dphi.values[r].comps[0] + raw.ec.f.values[r].comps[0] +
                    qtu.q.values[r].comps[0],
                theta_inv);
    if (!(assembled == after.f.values[r].comps[0])) {
      log.f_consistent = false;
      note("direct and assembled x-x errors disagree at " +
           pair_tag(pairs[r][0], pairs[r][1]));
      break;
    }
  }

  log.g_consistent = true;
  for (int i = 0; i < m && log.g_consistent; ++i) {
    for (int a = 0; a < nm; ++a) {
      const JetPoly assembled =
          compose(dpsi.values[i].comps[a] + raw.ghat.values[i].comps[a] +
                      qtu.t.values[i].comps[a] + qtu.u.values[i].comps[a],
                  theta_inv);
      if (!(assembled == after.g.values[i].comps[a])) {
        log.g_consistent = false;
        note("direct and assembled x-y errors disagree at " + mixed_tag(i, a));
        break;
      }
    }
  }

  if (check_identities) {
    log.identities_checked = true;
    const Cochain df = ce_differential(tables.fun_spec, raw.ec.f);
    auto fent = [&](int i, int u) { return f_entry(raw.ec.f, m, n, cap, i, u); };
    auto gent = [&](int i, int a) -> const JetPoly& {
      return raw.ec.g.values[i].comps[a];
    };

    log.df_expansion = true;
    const auto triples = combinations(m, 3);
    for (std::size_t r = 0; r < triples.size(); ++r) {
      JetPoly expr(n, cap);
      const int t0 = triples[r][0], t1 = triples[r][1], t2 = triples[r][2];
      const int cyc[3][3] = {{t0, t1, t2}, {t1, t2, t0}, {t2, t0, t1}};
      for (const auto& abc : cyc) {
        const JetPoly fbc = f_entry(raw.ec.f, m, n, cap, abc[1], abc[2]);
        for (int u = 0; u < m; ++u) expr += fent(abc[0], u) * fbc.derivative(u);
        for (int b = 0; b < nm; ++b) {
          expr += gent(abc[0], b) * fbc.derivative(m + b);
        }
      }
      if (!(df.values[r].comps[0] == expr)) {
        log.df_expansion = false;
        note("differential of the x-x error differs from its quadratic "
             "expansion at (" +
             std::to_string(t0) + "," + std::to_string(t1) + "," +
             std::to_string(t2) + ")");
        break;
      }
    }

    log.dg_expansion = true;
    const Cochain dghat = ce_differential(tables.y_spec, raw.ghat);
    const Cochain hdf = homotopy(tables.fun, df);
    std::vector<std::vector<JetPoly>> k(m);  // k[i][a] = {h(f)_i, y_a}_d
    for (int i = 0; i < m; ++i) {
      k[i].reserve(nm);
      for (int a = 0; a < nm; ++a) {
        k[i].push_back(bracket_with_y(pi_d, m, a, raw.hf.values[i].comps[0]));
      }
    }
    for (std::size_t r = 0; r < pairs.size() && log.dg_expansion; ++r) {
      const int i = pairs[r][0];
      const int j = pairs[r][1];
      const JetPoly& hfi = raw.hf.values[i].comps[0];
      const JetPoly& hfj = raw.hf.values[j].comps[0];
      JetPoly w(n, cap);
      for (int u = 0; u < m; ++u) {
        w += fent(i, u) * hfj.derivative(u) - fent(j, u) * hfi.derivative(u);
      }
      for (int b = 0; b < nm; ++b) {
        w += gent(i, b) * hfj.derivative(m + b) -
             gent(j, b) * hfi.derivative(m + b);
      }
      for (int a = 0; a < nm; ++a) {
        JetPoly expr(n, cap);
        for (int u = 0; u < m; ++u) {
          expr -= fent(i, u) * gent(j, a).derivative(u);
          expr += fent(j, u) * gent(i, a).derivative(u);
          expr += fent(i, u) * k[j][a].derivative(u);
          expr -= fent(j, u) * k[i][a].derivative(u);
        }
        for (int b = 0; b < nm; ++b) {
          expr -= gent(i, b) * gent(j, a).derivative(m + b);
          expr += gent(j, b) * gent(i, a).derivative(m + b);
          expr += gent(i, b) * k[j][a].derivative(m + b);
          expr -= gent(j, b) * k[i][a].derivative(m + b);
        }
        expr += poisson_bracket(pi_d, hfi, gent(j, a));
        expr -= poisson_bracket(pi_d, hfj, gent(i, a));
        expr += coordinate_bracket(pi_d, m + a, w);
        expr -= coordinate_bracket(pi_d, m + a, hdf.values[r].comps[0]);
        if (!(dghat.values[r].comps[a] == expr)) {
          log.dg_expansion = false;
          note("differential of the corrected x-y error differs from its "
               "quadratic expansion at " +
               pair_tag(i, j) + " component " + std::to_string(a));
          break;
        }
      }
    }
  }

  log.jacobi_next = schouten_jacobiator(pi_next).is_zero();
  if (!log.jacobi_next) note("jacobiator of the stepped structure is nonzero");
  log.fiberwise_next = problem.mode != ProblemMode::Algebroid ||
                       check_fiberwise_linear(pi_next, *problem.split);
  if (!log.fiberwise_next) note("stepped structure is not fiberwise linear");
  return log;
}

}  // namespace

StepOutcome step(const EngineTables& tables, const LeviProblem& problem,
                 const JetBivector& pi_d,
                 const std::optional<Rational>& smoothing_t,
                 bool check_identities) {
  RawSolve raw = solve_raw(tables, problem, pi_d);
  std::vector<JetPoly> disp = raw.displacement;
  if (smoothing_t) {
    for (JetPoly& comp : disp) comp = smoothing(comp, *smoothing_t);
  }
  StepOutcome out;
  out.theta = JetDiffeo::from_displacement(std::move(disp));
  out.theta_inv = invert(out.theta);
  out.pi_next = pushforward(pi_d, out.theta, out.theta_inv);
  out.log = complete_step(tables, problem, pi_d, raw, out.theta, out.theta_inv,
                          out.pi_next, check_identities);
  out.log.smoothing_t = smoothing_t;
  return out;
}

namespace {

// The driver calls solve, then (in scheduled mode) trans_smooth, then
// action, once per step in that order; the context carries the pre-step
// cochains from solve to action so the step record is assembled exactly
// once. The post-loop consistency pushforward arrives with no pending
// solve and takes the plain path.
struct RunContext {
  const EngineTables* tables = nullptr;
  const LeviProblem* problem = nullptr;
  JetBivector model;
  bool check_identities = true;
  std::vector<StepLog> steps;
  std::optional<RawSolve> pending;
  std::optional<Rational> pending_smoothing;
  std::optional<JetBivector> pending_pi;
};

}  // namespace

NormalizeResult normalize(const EngineTables& tables,
                          const LeviProblem& problem,
                          const NormalizeConfig& config) {
  {
    const ValidationReport rep = validate_problem(problem);
    if (!rep.all_passed()) {
      for (const CheckResult& c : rep.checks) {
        if (!c.passed) {
          throw std::invalid_argument(
              "normalize: problem invalid: " + c.name +
              (c.witness.empty() ? "" : " (" + c.witness + ")"));
        }
      }
    }
  }

  NormalizeResult res;
  res.constants = plan_constants(problem.data.n, config.variant, config.tau);
  if (config.t0) res.constants.t0 = *config.t0;

  int log2_bound = 0;
  while ((1 << log2_bound) < problem.cap) ++log2_bound;
  int max_steps = config.max_steps;
  if (max_steps < 0) {
    max_steps = log2_bound + 2;
    if (config.mode == RunMode::Scheduled) {
      // Lead-in until the low-pass cutoff clears the cap and the iteration
      // proceeds unclipped.
      mpz_class num = 1, den = 1;
      int lead = 0;
      while (lead <= 64 &&
             certified_compare(Rational(problem.cap), res.constants.t0, num,
                               den) > 0) {
        num *= 3;
        den *= 2;
        ++lead;
      }
      if (lead > 64) {
        throw std::invalid_argument(
            "normalize: t0 too close to 1 for an automatic step bound");
      }
      max_steps += lead;
    }
  }

  RunContext ctx;
  ctx.tables = &tables;
  ctx.problem = &problem;
  ctx.model = model_bivector(problem.data, problem.cap);
  ctx.check_identities = config.check_identities;

  const int n = problem.data.n;
  const int m = problem.data.m;
  const int cap = problem.cap;

  SCIInstance<JetBivector, JetDiffeo> inst;
  inst.spectral = [](const JetBivector& e, long k, const Rational& rho) {
    return spectral_norm(e, static_cast<int>(k), rho);
  };
  inst.majorant = [](const JetBivector& e, long k, const Rational& rho) {
    return majorant_norm(e, static_cast<int>(k), rho);
  };
  inst.trans_spectral = [](const JetDiffeo& t, long k, const Rational& rho) {
    return spectral_norm(JetVectorField{t.displacement()},
                         static_cast<int>(k), rho);
  };
  inst.trans_majorant = [](const JetDiffeo& t, long k, const Rational& rho) {
    return majorant_norm(JetVectorField{t.displacement()},
                         static_cast<int>(k), rho);
  };
  inst.smooth = [](const JetBivector& e, const Rational& t) {
    return smoothing(e, t);
  };
  inst.trans_smooth = [&ctx](const JetDiffeo& t, const Rational& cut) {
    ctx.pending_smoothing = cut;
    std::vector<JetPoly> disp = t.displacement();
    for (JetPoly& comp : disp) comp = smoothing(comp, cut);
    return JetDiffeo::from_displacement(std::move(disp));
  };
  inst.project = [&ctx, n, m](const JetBivector& e) {
    JetBivector out = e;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < n; ++j) out.upper(i, j) = ctx.model.upper(i, j);
    }
    return out;
  };
  inst.error = [&ctx, n, m, cap](const JetBivector& e) {
    JetBivector out(n, cap);
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < n; ++j) {
        out.upper(i, j) = e.upper(i, j) - ctx.model.upper(i, j);
      }
    }
    return out;
  };
  inst.recombine = [](const JetBivector& p, const JetBivector& z) {
    JetBivector out = p;
    out += z;
    return out;
  };
  inst.solve = [&ctx](const JetBivector& pi_d) -> std::optional<JetDiffeo> {
    RawSolve raw = solve_raw(*ctx.tables, *ctx.problem, pi_d);
    JetDiffeo theta = JetDiffeo::from_displacement(raw.displacement);
    ctx.pending = std::move(raw);
    ctx.pending_pi = pi_d;
    ctx.pending_smoothing.reset();
    return theta;
  };
  inst.action = [&ctx](const JetDiffeo& theta, const JetBivector& pi_d) {
    const JetDiffeo theta_inv = invert(theta);
    JetBivector pi_next = pushforward(pi_d, theta, theta_inv);
    if (ctx.pending) {
      StepLog log =
          complete_step(*ctx.tables, *ctx.problem, *ctx.pending_pi,
                        *ctx.pending, theta, theta_inv, pi_next,
                        ctx.check_identities);
      log.smoothing_t = ctx.pending_smoothing;
      ctx.steps.push_back(std::move(log));
      ctx.pending.reset();
      ctx.pending_pi.reset();
      ctx.pending_smoothing.reset();
    }
    return pi_next;
  };
  inst.compose = [](const JetDiffeo& outer, const JetDiffeo& inner) {
    return compose(outer, inner);
  };
  inst.identity = [n, cap]() { return JetDiffeo(n, cap); };
  inst.equal = [](const JetBivector& a, const JetBivector& b) {
    return a == b;
  };
  inst.order = [](const JetBivector& e) { return e.vanishing_order(); };

  RunResult<JetBivector, JetDiffeo> run_res =
      run(inst, problem.pi, res.constants, config.mode, max_steps);

  res.converged = run_res.converged();
  res.theta_inf = std::move(run_res.accumulated);
  res.pi_inf = std::move(run_res.final_element);
  res.metrics = std::move(run_res.log.metrics);
  res.audit = std::move(run_res.log.audit);
  res.steps = std::move(ctx.steps);
  res.composition_consistent = res.metrics.composition_consistent;

  if (config.mode == RunMode::Formal && config.max_steps < 0 &&
      !res.converged) {
    throw std::logic_error(
        "normalize: formal iteration missed the guaranteed step bound");
  }

  res.final_relations_ok = true;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!(res.pi_inf.upper(i, j) == ctx.model.upper(i, j))) {
        res.final_relations_ok = false;
        res.final_relation_failures.push_back(
            (j < m ? std::string("x-x component ") : std::string("x-y component ")) +
            pair_tag(i, j) + " differs from the model");
      }
    }
  }
  return res;
}

LeviProblem algebroid_to_poisson(const AlgebroidData& alg, int cap) {
  const int nf = alg.fiber_dim;
  const int nb = alg.base_dim;
  const int m = alg.m;
  if (nf < 1 || nb < 1 || m < 1 || m > nf) {
    throw std::invalid_argument(
        "algebroid_to_poisson: need fiber_dim >= 1, base_dim >= 1 and "
        "1 <= m <= fiber_dim");
  }
  if (cap < 1) throw std::invalid_argument("algebroid_to_poisson: cap < 1");
  auto base_shaped = [nb](const JetPoly& p) { return p.n_vars() == nb; };
  if (static_cast<int>(alg.bracket.size()) != nf ||
      static_cast<int>(alg.anchor.size()) != nf) {
    throw std::invalid_argument("algebroid_to_poisson: section count");
  }
  for (int i = 0; i < nf; ++i) {
    if (static_cast<int>(alg.bracket[i].size()) != nf ||
        static_cast<int>(alg.anchor[i].size()) != nb) {
      throw std::invalid_argument("algebroid_to_poisson: array shapes");
    }
    for (int j = 0; j < nf; ++j) {
      if (static_cast<int>(alg.bracket[i][j].size()) != nf) {
        throw std::invalid_argument("algebroid_to_poisson: array shapes");
      }
      for (const JetPoly& p : alg.bracket[i][j]) {
        if (!base_shaped(p)) {
          throw std::invalid_argument(
              "algebroid_to_poisson: bracket coefficients must be jets in "
              "the base variables");
        }
      }
    }
    for (const JetPoly& p : alg.anchor[i]) {
      if (!base_shaped(p)) {
        throw std::invalid_argument(
            "algebroid_to_poisson: anchor entries must be jets in the base "
            "variables");
      }
    }
  }

  const Mono origin = mono_unit(nb);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nb; ++j) {
      if (alg.anchor[i][j].coeff(origin) != 0) {
        throw std::invalid_argument(
            "algebroid_to_poisson: anchor does not vanish at the origin "
            "(section " +
            std::to_string(i) + ", base variable " + std::to_string(j) + ")");
      }
    }
  }
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) {
      for (int k = 0; k < nf; ++k) {
        if (!(alg.bracket[i][j][k] == -alg.bracket[j][i][k])) {
          throw std::invalid_argument(
              "algebroid_to_poisson: brackets are not antisymmetric at (" +
              std::to_string(i) + "," + std::to_string(j) + "," +
              std::to_string(k) + ")");
        }
      }
    }
  }

  StructureData data;
  data.n = nf + nb;
  data.m = m;
  const int nm = data.n - m;
  data.c.assign(m, std::vector<std::vector<Rational>>(
                       m, std::vector<Rational>(m, Rational(0))));
  data.a.assign(m, std::vector<std::vector<Rational>>(
                       nm, std::vector<Rational>(nm, Rational(0))));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < nf; ++k) {
        const Rational v = alg.bracket[i][j][k].coeff(origin);
        if (k < m) {
          data.c[i][j][k] = v;
        } else if (v != 0) {
          throw std::invalid_argument(
              "algebroid_to_poisson: the leading sections do not close at "
              "the origin (bracket (" +
              std::to_string(i) + "," + std::to_string(j) + ") meets section " +
              std::to_string(k) + ")");
        }
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int a = 0; a < nf - m; ++a) {
      for (int k = 0; k < nf; ++k) {
        const Rational v = alg.bracket[i][m + a][k].coeff(origin);
        if (k >= m) {
          data.a[i][a][k - m] = v;
        } else if (v != 0) {
          throw std::invalid_argument(
              "algebroid_to_poisson: the complement sections are not "
              "invariant at the origin (bracket (" +
              std::to_string(i) + "," + std::to_string(m + a) +
              ") meets section " + std::to_string(k) + ")");
        }
      }
    }
    for (int j = 0; j < nb; ++j) {
      for (int k = 0; k < nb; ++k) {
        data.a[i][(nf - m) + j][(nf - m) + k] =
            alg.anchor[i][j].coeff(mono_variable(nb, k));
      }
    }
  }

  auto embed = [&](const JetPoly& p) {
    JetPoly out(data.n, cap);
    for (const auto& term : p.terms()) {
      Mono e(data.n, 0);
      for (int v = 0; v < nb; ++v) e[nf + v] = term.first[v];
      out.add_term(e, term.second);
    }
    return out;
  };

  JetBivector pi(data.n, cap);
  for (int i = 0; i < nf; ++i) {
    for (int j = i + 1; j < nf; ++j) {
      JetPoly comp(data.n, cap);
      for (int k = 0; k < nf; ++k) {
        comp += embed(alg.bracket[i][j][k]) *
                JetPoly::variable(data.n, cap, k);
      }
      pi.upper(i, j) = std::move(comp);
    }
    for (int j = 0; j < nb; ++j) {
      pi.upper(i, nf + j) = embed(alg.anchor[i][j]);
    }
  }

  LeviProblem problem;
  problem.data = std::move(data);
  problem.pi = std::move(pi);
  problem.cap = cap;
  problem.mode = ProblemMode::Algebroid;
  problem.split = AlgebroidSplit{nf};

  const ValidationReport rep = validate_problem(problem);
  if (!rep.all_passed()) {
    for (const CheckResult& c : rep.checks) {
      if (!c.passed) {
        throw std::invalid_argument(
            "algebroid_to_poisson: induced problem invalid: " + c.name +
            (c.witness.empty() ? "" : " (" + c.witness + ")"));
      }
    }
  }
  return problem;
}

bool check_fiberwise_linear(const JetBivector& pi,
                            const AlgebroidSplit& split) {
  const int n = pi.n_vars();
  const int nf = split.fiber_total;
  auto fiber_degree = [nf](const Mono& e) {
    int d = 0;
    for (int v = 0; v < nf; ++v) d += e[v];
    return d;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const JetPoly& comp = pi.upper(i, j);
      if (j < nf) {
        for (const auto& term : comp.terms()) {
          if (fiber_degree(term.first) > 1) return false;
        }
      } else if (i < nf) {
        for (const auto& term : comp.terms()) {
          if (fiber_degree(term.first) != 0) return false;
        }
      } else {
        if (!comp.is_zero()) return false;
      }
    }
  }
  return true;
}

}  // namespace levijet
