#include "levijet/nash_moser_driver.hpp"

#include <mpfr.h>

#include <cstdio>

namespace levijet {

namespace {

double ln_approx(const Rational& x) {
  mpfr_t v;
  mpfr_init2(v, 128);
  mpfr_set_q(v, x.get_mpq_t(), MPFR_RNDN);
  mpfr_log(v, v, MPFR_RNDN);
  const double r = mpfr_get_d(v, MPFR_RNDN);
  mpfr_clear(v);
  return r;
}

std::string exp_decimal(double log_value) {
  mpfr_t v;
  mpfr_init2(v, 128);
  mpfr_set_d(v, log_value, MPFR_RNDN);
  mpfr_exp(v, v, MPFR_RNDN);
  char buf[64];
  mpfr_snprintf(buf, sizeof buf, "%.6Rg", v);
  mpfr_clear(v);
  return buf;
}

}  // namespace

ScheduleAudit audit_schedule(const RunMetrics& metrics,
                             const ScheduleConstants& constants,
                             const Rational& t0) {
  if (t0 <= 1) throw std::invalid_argument("audit_schedule: t0 must exceed 1");
  ScheduleAudit audit;
  audit.t0 = t0;
  audit.bounded_low_norm_constant = Rational(0);

  bool has_lower = false, has_upper = false;
  double lower_log = 0, upper_log = 0;

  mpz_class n3 = 1, n2 = 1;
  for (const StepMetrics& sm : metrics.steps) {
    StepAudit sa;
    sa.d = sm.d;
    auto add = [&](const std::string& name, const Rational& measured,
                   const mpz_class& bnum, const mpz_class& bden) {
      AuditEntry e;
      e.name = name;
      e.measured = measured;
      e.bound_num = bnum;
      e.bound_den = bden;
      e.bound_decimal = power_decimal(t0, bnum, bden);
      const int c = certified_compare(measured, t0, bnum, bden);
      e.passed = c < 0;
      if (!e.passed) {
        audit.all_passed = false;
        e.note = bnum > 0 ? "needs larger t0" : "needs smaller t0";
        if (c == 0) e.note += " (measured equals bound)";
      }
      if (measured > 0) {
        // ln t0 must stay above (growth rows) or below (decay rows) this.
        const double pivot =
            ln_approx(measured) * mpz_get_d(bden.get_mpz_t()) /
            mpz_get_d(bnum.get_mpz_t());
        if (bnum > 0) {
          if (!has_lower || pivot > lower_log) lower_log = pivot;
          has_lower = true;
        } else {
          if (!has_upper || pivot < upper_log) upper_log = pivot;
          has_upper = true;
        }
      }
      sa.entries.push_back(e);
    };

    if (sm.has_outgoing) {
      add("outgoing transformation low norm < t^(-1/2)", sm.chi_low_spectral,
          -n3, n2 * 2);
    }
    add("structure high norm < t^A", sm.f_high_spectral,
        n3 * constants.a_const, n2);
    {
      AuditEntry e;
      e.name = "structure low norm bounded";
      e.measured = sm.f_low_spectral;
      e.has_t_bound = false;
      e.passed = true;
      const Rational implied = sm.f_low_spectral * Rational(sm.d + 2, sm.d + 1);
      if (implied > audit.bounded_low_norm_constant) {
        audit.bounded_low_norm_constant = implied;
      }
      e.note = "implied constant " + to_string(implied);
      sa.entries.push_back(e);
    }
    add("error high norm < t^A", sm.zeta_high_spectral,
        n3 * constants.a_const, n2);
    add("error low norm < t^(-1)", sm.zeta_low_spectral, -n3, n2);
    audit.steps.push_back(std::move(sa));
    n3 *= 3;
    n2 *= 2;
  }

  if (has_lower) audit.t0_lower_decimal = exp_decimal(lower_log);
  if (has_upper) audit.t0_upper_decimal = exp_decimal(upper_log);
  if (has_lower && has_upper) {
    audit.feasibility =
        lower_log < upper_log
            ? "every t0 strictly between " + audit.t0_lower_decimal + " and " +
                  audit.t0_upper_decimal + " passes all observed steps"
            : "no single t0 satisfies all observed steps; growth rows need "
              "t0 above " +
                  audit.t0_lower_decimal + " while decay rows need t0 below " +
                  audit.t0_upper_decimal;
  } else if (has_lower) {
    audit.feasibility =
        "every t0 strictly above " + audit.t0_lower_decimal + " passes";
  } else if (has_upper) {
    audit.feasibility =
        "every t0 in (1, " + audit.t0_upper_decimal + ") passes";
  } else {
    audit.feasibility = "no binding constraints observed";
  }
  return audit;
}

}  // namespace levijet
