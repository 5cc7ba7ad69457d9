#include "levijet/schedule_norms.hpp"

#include <mpfr.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace levijet {

namespace {

std::string vs(const Rational& lhs, const std::string& rel, const Rational& rhs) {
  return to_string(lhs) + " " + rel + " " + to_string(rhs);
}

// v = g^e with e maximal (g not itself a proper power); (v, 1) when v is not
// a proper power. Requires v >= 2.
std::pair<mpz_class, unsigned long> minimal_power(const mpz_class& v) {
  const unsigned long bits = mpz_sizeinbase(v.get_mpz_t(), 2);
  for (unsigned long e = bits; e >= 2; --e) {
    mpz_class root;
    if (mpz_root(root.get_mpz_t(), v.get_mpz_t(), e) != 0) return {root, e};
  }
  return {v, 1};
}

// X^E == Y^F for integers X, Y >= 1 and positive integer exponents.
bool power_equal(const mpz_class& x, const mpz_class& e, const mpz_class& y,
                 const mpz_class& f) {
  if (x == 1 || y == 1) return x == 1 && y == 1;
  const auto [gx, ex] = minimal_power(x);
  const auto [gy, ey] = minimal_power(y);
  return gx == gy && mpz_class(ex) * e == mpz_class(ey) * f;
}

}  // namespace

std::vector<CheckResult> validate_constants(const ScheduleConstants& c) {
  std::vector<CheckResult> rows;
  auto push = [&rows](const std::string& name, bool ok, const std::string& w) {
    rows.push_back({name, ok, ok ? "" : w});
  };
  push("n >= 1", c.n >= 1, "n = " + std::to_string(c.n));
  push("s = floor(n/2)+1", c.n >= 1 && c.s == c.n / 2 + 1,
       "s = " + std::to_string(c.s));
  push("0 < epsilon < 1", c.epsilon > 0 && c.epsilon < 1,
       "epsilon = " + to_string(c.epsilon));
  const Rational three_quarters_neg(-3, 4);
  if (c.variant == PlanVariant::MainText) {
    push("A = 6s+9", c.a_const == 6 * c.s + 9, "A = " + std::to_string(c.a_const));
    push("A > 6s+8", c.a_const > 6 * c.s + 8, "A = " + std::to_string(c.a_const));
    const Rational lhs = -(1 - c.epsilon) + c.a_const * c.epsilon;
    push("-(1-eps) + A eps < -3/4", lhs < three_quarters_neg,
         vs(lhs, ">=", three_quarters_neg));
    push("l > s", c.l > c.s, "l = " + std::to_string(c.l));
    const bool l_ok = c.l >= 2 && Rational(3 * c.s + 5, c.l - 1) < c.epsilon;
    push("(3s+5)/(l-1) < eps", l_ok,
         c.l >= 2 ? vs(Rational(3 * c.s + 5, c.l - 1), ">=", c.epsilon)
                  : "l < 2");
  } else {
    push("A = 6s+5", c.a_const == 6 * c.s + 5, "A = " + std::to_string(c.a_const));
    push("A > 6s+4", c.a_const > 6 * c.s + 4, "A = " + std::to_string(c.a_const));
    push("tau >= 0", c.tau >= 0, "tau = " + to_string(c.tau));
    const Rational lhs =
        -(1 - c.epsilon) + Rational(c.a_const) * (1 + c.tau / 2) * c.epsilon;
    push("-(1-eps) + A(1+tau/2) eps < -3/4", lhs < three_quarters_neg,
         vs(lhs, ">=", three_quarters_neg));
    push("l > 3s+3", c.l > 3 * c.s + 3, "l = " + std::to_string(c.l));
    const bool l_ok = c.l >= 2 && Rational(2 * c.s + 2, c.l - 1) < c.epsilon;
    push("(2s+2)/(l-1) < eps", l_ok,
         c.l >= 2 ? vs(Rational(2 * c.s + 2, c.l - 1), ">=", c.epsilon)
                  : "l < 2");
  }
  push("L = 2l-1", c.big_l == 2 * c.l - 1, "L = " + std::to_string(c.big_l));
  push("t0 > 1", c.t0 > 1, "t0 = " + to_string(c.t0));
  return rows;
}

ScheduleConstants plan_constants(int n, PlanVariant variant,
                                 std::optional<Rational> tau) {
  if (n < 1) throw std::invalid_argument("plan_constants: n must be >= 1");
  ScheduleConstants c;
  c.variant = variant;
  c.n = n;
  c.s = n / 2 + 1;
  Rational lower;
  if (variant == PlanVariant::MainText) {
    c.a_const = 6 * c.s + 9;
    // Half the supremum admissible: (A+1) eps < 1/4.
    c.epsilon = Rational(1, 8 * (c.a_const + 1));
    lower = std::max(Rational(c.s),
                     Rational(1 + Rational(3 * c.s + 5) / c.epsilon));
  } else {
    if (!tau || *tau < 0) {
      throw std::invalid_argument(
          "plan_constants: Appendix variant requires tau >= 0");
    }
    c.tau = *tau;
    c.a_const = 6 * c.s + 5;
    // Half the supremum admissible: (1 + A(1+tau/2)) eps < 1/4.
    c.epsilon = Rational(1) / (8 * (1 + Rational(c.a_const) * (1 + c.tau / 2)));
    lower = std::max(Rational(3 * c.s + 3),
                     Rational(1 + Rational(2 * c.s + 2) / c.epsilon));
  }
  // Smallest integer strictly above the bound.
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), lower.get_num().get_mpz_t(),
             lower.get_den().get_mpz_t());
  c.l = mpz_get_si(fl.get_mpz_t()) + 1;
  c.big_l = 2 * c.l - 1;
  for (const CheckResult& row : validate_constants(c)) {
    if (!row.passed) {
      throw std::logic_error("plan_constants: generated constants fail '" +
                             row.name + "'");
    }
  }
  return c;
}

std::string power_decimal(const Rational& base, const mpz_class& num,
                          const mpz_class& den) {
  if (base <= 0) throw std::invalid_argument("power_decimal: base <= 0");
  if (den <= 0) throw std::invalid_argument("power_decimal: den <= 0");
  mpfr_t e, b;
  mpfr_init2(e, 128);
  mpfr_init2(b, 128);
  mpfr_set_z(e, num.get_mpz_t(), MPFR_RNDN);
  mpfr_div_z(e, e, den.get_mpz_t(), MPFR_RNDN);
  mpfr_set_q(b, base.get_mpq_t(), MPFR_RNDN);
  mpfr_log(b, b, MPFR_RNDN);
  mpfr_mul(e, e, b, MPFR_RNDN);
  mpfr_exp(e, e, MPFR_RNDN);
  char buf[64];
  mpfr_snprintf(buf, sizeof buf, "%.6Rg", e);
  mpfr_clear(e);
  mpfr_clear(b);
  return buf;
}

ScheduleSequence schedule(const ScheduleConstants& c, int d_max) {
  if (c.t0 <= 1) throw std::invalid_argument("schedule: t0 must exceed 1");
  if (d_max < 0) throw std::invalid_argument("schedule: d_max must be >= 0");
  ScheduleSequence seq;
  seq.t0 = c.t0;
  mpz_class num = 1, den = 1;
  for (int d = 0; d <= d_max; ++d) {
    ScheduleEntry e;
    e.d = d;
    e.exp_num = num;
    e.exp_den = den;
    e.r = Rational(d + 2, d + 1);
    e.t_decimal = power_decimal(c.t0, num, den);
    // t_d^{-1/2} < 1/(d+2)^2, exactly: (d+2)^2 < t0^{num/(2 den)}.
    const long dd = d + 2;
    e.cutoff_ok =
        certified_compare(Rational(dd * dd), c.t0, num, den * 2) < 0;
    if (!e.cutoff_ok && seq.first_invalid_d < 0) seq.first_invalid_d = d;
    seq.entries.push_back(std::move(e));
    num *= 3;
    den *= 2;
  }
  return seq;
}

int certified_compare(const Rational& x, const Rational& base,
                      const mpz_class& num, const mpz_class& den) {
  if (base <= 1) throw std::invalid_argument("certified_compare: base <= 1");
  if (den <= 0) throw std::invalid_argument("certified_compare: den <= 0");
  if (x <= 0) return -1;
  if (x == 1) return num > 0 ? -1 : (num == 0 ? 0 : 1);
  if (num == 0) return x < 1 ? -1 : 1;

  const mpz_class& p = x.get_num();
  const mpz_class& q = x.get_den();
  const mpz_class& bp = base.get_num();
  const mpz_class& bq = base.get_den();
  const mpz_class n_abs = abs(num);

  // Exact integer power comparison when the operands stay moderate.
  const double bits_left =
      static_cast<double>(std::max(mpz_sizeinbase(p.get_mpz_t(), 2),
                                   mpz_sizeinbase(q.get_mpz_t(), 2))) *
      mpz_get_d(den.get_mpz_t());
  const double bits_right =
      static_cast<double>(std::max(mpz_sizeinbase(bp.get_mpz_t(), 2),
                                   mpz_sizeinbase(bq.get_mpz_t(), 2))) *
      mpz_get_d(n_abs.get_mpz_t());
  if (bits_left + bits_right < 6.0e7 && den.fits_ulong_p() &&
      n_abs.fits_ulong_p()) {
    mpz_class pe, qe, bpe, bqe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), den.get_ui());
    mpz_pow_ui(qe.get_mpz_t(), q.get_mpz_t(), den.get_ui());
    mpz_pow_ui(bpe.get_mpz_t(), bp.get_mpz_t(), n_abs.get_ui());
    mpz_pow_ui(bqe.get_mpz_t(), bq.get_mpz_t(), n_abs.get_ui());
    // x^den ? base^num, cleared of denominators.
    const mpz_class lhs = num > 0 ? pe * bqe : pe * bpe;
    const mpz_class rhs = num > 0 ? qe * bpe : qe * bqe;
    return cmp(lhs, rhs) < 0 ? -1 : (lhs == rhs ? 0 : 1);
  }

  // Exact equality test first (powers in lowest terms stay in lowest terms).
  const bool equal =
      num > 0 ? power_equal(p, den, bp, n_abs) && power_equal(q, den, bq, n_abs)
              : power_equal(p, den, bq, n_abs) && power_equal(q, den, bp, n_abs);
  if (equal) return 0;

  // Certified directed-rounding comparison of den*ln(x) against num*ln(base);
  // terminates because equality was excluded.
  for (mpfr_prec_t prec = 128; prec <= (mpfr_prec_t(1) << 24); prec *= 2) {
    mpfr_t xlo, xhi, blo, bhi, llo, lhi, rlo, rhi;
    mpfr_inits2(prec, xlo, xhi, blo, bhi, llo, lhi, rlo, rhi, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_q(xlo, x.get_mpq_t(), MPFR_RNDD);
    mpfr_log(xlo, xlo, MPFR_RNDD);
    mpfr_set_q(xhi, x.get_mpq_t(), MPFR_RNDU);
    mpfr_log(xhi, xhi, MPFR_RNDU);
    mpfr_set_q(blo, base.get_mpq_t(), MPFR_RNDD);
    mpfr_log(blo, blo, MPFR_RNDD);
    mpfr_set_q(bhi, base.get_mpq_t(), MPFR_RNDU);
    mpfr_log(bhi, bhi, MPFR_RNDU);
    mpfr_mul_z(llo, xlo, den.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(lhi, xhi, den.get_mpz_t(), MPFR_RNDU);
    if (num > 0) {
      mpfr_mul_z(rlo, blo, num.get_mpz_t(), MPFR_RNDD);
      mpfr_mul_z(rhi, bhi, num.get_mpz_t(), MPFR_RNDU);
    } else {
      mpfr_mul_z(rlo, bhi, num.get_mpz_t(), MPFR_RNDD);
      mpfr_mul_z(rhi, blo, num.get_mpz_t(), MPFR_RNDU);
    }
    const bool less = mpfr_cmp(lhi, rlo) < 0;
    const bool greater = mpfr_cmp(llo, rhi) > 0;
    mpfr_clears(xlo, xhi, blo, bhi, llo, lhi, rlo, rhi, static_cast<mpfr_ptr>(nullptr));
    if (less) return -1;
    if (greater) return 1;
  }
  throw std::logic_error("certified_compare: precision exhausted");
}

mpz_class floor_power(const Rational& base, const mpz_class& num,
                      const mpz_class& den) {
  if (base <= 1) throw std::invalid_argument("floor_power: base <= 1");
  if (den <= 0) throw std::invalid_argument("floor_power: den <= 0");
  if (num == 0) return 1;
  if (num < 0) return 0;
  for (mpfr_prec_t prec = 128; prec <= (mpfr_prec_t(1) << 24); prec *= 2) {
    mpfr_t lo, hi, e;
    mpfr_inits2(prec, lo, hi, e, static_cast<mpfr_ptr>(nullptr));
    // All factors are positive, so directed rounding composes monotonically.
    mpfr_set_q(lo, base.get_mpq_t(), MPFR_RNDD);
    mpfr_log(lo, lo, MPFR_RNDD);
    mpfr_mul_z(lo, lo, num.get_mpz_t(), MPFR_RNDD);
    mpfr_div_z(lo, lo, den.get_mpz_t(), MPFR_RNDD);
    mpfr_exp(lo, lo, MPFR_RNDD);
    mpfr_set_q(hi, base.get_mpq_t(), MPFR_RNDU);
    mpfr_log(hi, hi, MPFR_RNDU);
    mpfr_mul_z(hi, hi, num.get_mpz_t(), MPFR_RNDU);
    mpfr_div_z(hi, hi, den.get_mpz_t(), MPFR_RNDU);
    mpfr_exp(hi, hi, MPFR_RNDU);
    mpz_class k_lo, k_hi;
    mpfr_get_z(k_lo.get_mpz_t(), lo, MPFR_RNDD);
    mpfr_get_z(k_hi.get_mpz_t(), hi, MPFR_RNDD);
    mpfr_clears(lo, hi, e, static_cast<mpfr_ptr>(nullptr));
    if (k_hi - k_lo <= 2) {
      for (mpz_class k = k_lo; k <= k_hi; ++k) {
        if (certified_compare(Rational(k), base, num, den) <= 0 &&
            certified_compare(Rational(k + 1), base, num, den) > 0) {
          return k;
        }
      }
    }
  }
  throw std::logic_error("floor_power: precision exhausted");
}

Rational majorant_norm(const JetPoly& f, int k, const Rational& r) {
  if (k < 0 || r <= 0) {
    throw std::invalid_argument("majorant_norm: need k >= 0 and r > 0");
  }
  if (f.is_zero()) return Rational(0);
  const int n = f.n_vars();
  const int kk = std::min(k, f.top_degree());
  Rational best(0);
  for (int kb = 0; kb <= kk; ++kb) {
    const Rational scale = pow_rational(r, -kb);
    for (const Mono& beta : monomials_of_degree(n, kb)) {
      Rational sum(0);
      for (const auto& [gamma, cg] : f.terms()) {
        bool dominated = true;
        for (int j = 0; j < n; ++j) {
          if (gamma[j] < beta[j]) {
            dominated = false;
            break;
          }
        }
        if (!dominated) continue;
        Rational term = abs(cg);
        for (int j = 0; j < n; ++j) {
          for (int step = 0; step < beta[j]; ++step) term *= gamma[j] - step;
        }
        sum += term * pow_rational(r, total_degree(gamma));
      }
      sum *= scale;
      if (sum > best) best = sum;
    }
  }
  return best;
}

Rational majorant_norm(const JetVectorField& f, int k, const Rational& r) {
  Rational best(0);
  for (const JetPoly& c : f.comps) best = std::max(best, majorant_norm(c, k, r));
  return best;
}

Rational majorant_norm(const JetBivector& f, int k, const Rational& r) {
  Rational best(0);
  for (int i = 0; i < f.n_vars(); ++i) {
    for (int j = i + 1; j < f.n_vars(); ++j) {
      best = std::max(best, majorant_norm(f.upper(i, j), k, r));
    }
  }
  return best;
}

Rational spectral_norm(const JetPoly& f, int k, const Rational& r) {
  if (k < 0) throw std::invalid_argument("spectral_norm: need k >= 0");
  if (r <= 0 || r > 1) {
    throw std::invalid_argument("spectral_norm: need 0 < r <= 1");
  }
  const int top = f.top_degree();
  std::vector<Rational> weight(std::max(0, top) + 1, Rational(0));
  for (int d = 0; d <= top; ++d) {
    weight[d] = pow_rational(Rational(std::max(1, d)), k) * pow_rational(r, d);
  }
  Rational sum(0);
  for (const auto& [mono, c] : f.terms()) {
    sum += abs(c) * weight[total_degree(mono)];
  }
  return sum;
}

Rational spectral_norm(const JetVectorField& f, int k, const Rational& r) {
  Rational best(0);
  for (const JetPoly& c : f.comps) best = std::max(best, spectral_norm(c, k, r));
  return best;
}

Rational spectral_norm(const JetBivector& f, int k, const Rational& r) {
  Rational best(0);
  for (int i = 0; i < f.n_vars(); ++i) {
    for (int j = i + 1; j < f.n_vars(); ++j) {
      best = std::max(best, spectral_norm(f.upper(i, j), k, r));
    }
  }
  return best;
}

JetPoly smoothing(const JetPoly& f, const Rational& t) {
  if (t <= 1) throw std::invalid_argument("smoothing: need t > 1");
  JetPoly out(f.n_vars(), f.cap());
  for (const auto& [mono, c] : f.terms()) {
    if (Rational(total_degree(mono)) <= t) out.add_term(mono, c);
  }
  return out;
}

JetVectorField smoothing(const JetVectorField& f, const Rational& t) {
  JetVectorField out = f;
  for (JetPoly& c : out.comps) c = smoothing(c, t);
  return out;
}

JetBivector smoothing(const JetBivector& f, const Rational& t) {
  JetBivector out(f.n_vars(), f.cap());
  for (int i = 0; i < f.n_vars(); ++i) {
    for (int j = i + 1; j < f.n_vars(); ++j) {
      out.upper(i, j) = smoothing(f.upper(i, j), t);
    }
  }
  return out;
}

bool SCIReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

SCIReport check_sci_axioms(NormFlavor flavor,
                           const std::vector<JetPoly>& samples, int max_order,
                           const std::vector<Rational>& radii,
                           const std::vector<Rational>& ts) {
  if (max_order < 0) throw std::invalid_argument("check_sci_axioms: max_order");
  const bool spectral = flavor == NormFlavor::SpectralDegree;
  auto norm = [&](const JetPoly& f, int k, const Rational& r) {
    return spectral ? spectral_norm(f, k, r) : majorant_norm(f, k, r);
  };

  AxiomCheck mono{"monotonicity", true, Rational(0), ""};
  AxiomCheck sm1{"smoothing low-pass bound", true, Rational(0), ""};
  AxiomCheck sm2{"smoothing remainder bound", true, Rational(0), ""};
  AxiomCheck interp{"interpolation", true, Rational(0), ""};

  auto note_ratio = [](AxiomCheck& chk, const Rational& lhs, const Rational& rhs,
                       bool gate_at_one, std::size_t sample,
                       const std::string& detail) {
    if (rhs == 0) {
      if (lhs != 0) {
        chk.passed = false;
        if (chk.witness.empty()) {
          chk.witness = "sample " + std::to_string(sample) + ": " + detail +
                        ": no finite constant";
        }
      }
      return;
    }
    const Rational c = lhs / rhs;
    if (c > chk.measured) chk.measured = c;
    if (gate_at_one && lhs > rhs) {
      chk.passed = false;
      if (chk.witness.empty()) {
        chk.witness = "sample " + std::to_string(sample) + ": " + detail +
                      ": constant " + to_string(c);
      }
    }
  };

  for (std::size_t si = 0; si < samples.size(); ++si) {
    const JetPoly& f = samples[si];
    // Norm table for this sample.
    std::vector<std::vector<Rational>> nf(max_order + 1);
    for (int k = 0; k <= max_order; ++k) {
      for (const Rational& r : radii) nf[k].push_back(norm(f, k, r));
    }

    // Monotonicity in k and r (both flavors must pass exactly).
    for (int k = 0; k <= max_order; ++k) {
      for (int k2 = 0; k2 <= k; ++k2) {
        for (std::size_t ri = 0; ri < radii.size(); ++ri) {
          for (std::size_t ri2 = 0; ri2 < radii.size(); ++ri2) {
            if (radii[ri2] > radii[ri]) continue;
            note_ratio(mono, nf[k2][ri2], nf[k][ri], true, si,
                       "monotonicity k " + std::to_string(k2) + "<=" +
                           std::to_string(k));
          }
        }
      }
    }

    for (const Rational& t : ts) {
      const JetPoly sf = smoothing(f, t);
      JetPoly rest = f;
      rest -= sf;
      for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        const Rational& r = radii[ri];
        for (int p = 0; p <= max_order; ++p) {
          for (int q = 0; q <= p; ++q) {
            note_ratio(sm1, norm(sf, p, r), pow_rational(t, p - q) * nf[q][ri],
                       spectral, si,
                       "low-pass p=" + std::to_string(p) + " q=" +
                           std::to_string(q) + " t=" + to_string(t));
            note_ratio(sm2, norm(rest, q, r), pow_rational(t, q - p) * nf[p][ri],
                       spectral, si,
                       "remainder p=" + std::to_string(p) + " q=" +
                           std::to_string(q) + " t=" + to_string(t));
          }
        }
      }
    }

    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      for (int p = 0; p <= max_order; ++p) {
        for (int q = 0; q <= p; ++q) {
          for (int w = 0; w <= q; ++w) {
            if (p == w) continue;
            note_ratio(interp, pow_rational(nf[q][ri], p - w),
                       pow_rational(nf[w][ri], p - q) *
                           pow_rational(nf[p][ri], q - w),
                       spectral, si,
                       "interpolation p=" + std::to_string(p) + " q=" +
                           std::to_string(q) + " r=" + std::to_string(w));
          }
        }
      }
    }
  }

  SCIReport rep;
  rep.flavor = flavor;
  rep.checks = {mono, sm1, sm2, interp};
  return rep;
}

}  // namespace levijet
