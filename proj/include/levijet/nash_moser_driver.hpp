#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levijet/schedule_norms.hpp"

namespace levijet {

enum class RunMode { Formal, Scheduled };
enum class RunStatus { Converged, Unconverged, SolverFailure };

/// Abstract iteration instance. Element is the structure being normalized,
/// Trans a near-identity transformation acting on it. All callbacks must be
/// pure; `order` returns the vanishing order of an element and must return
/// kOrderInfinity exactly when the element is zero modulo the truncation
/// (the driver applies it to error(f)). `recombine(project(f), error(f))`
/// must reproduce f; it is checked on every snapshot in Scheduled mode when
/// supplied.
template <typename Element, typename Trans>
struct SCIInstance {
  std::function<Rational(const Element&, long, const Rational&)> spectral;
  std::function<Rational(const Element&, long, const Rational&)> majorant;
  std::function<Rational(const Trans&, long, const Rational&)> trans_spectral;
  std::function<Rational(const Trans&, long, const Rational&)> trans_majorant;
  std::function<Element(const Element&, const Rational&)> smooth;
  std::function<Trans(const Trans&, const Rational&)> trans_smooth;
  std::function<Element(const Element&)> project;
  std::function<Element(const Element&)> error;
  std::function<std::optional<Trans>(const Element&)> solve;
  std::function<Element(const Trans&, const Element&)> action;
  std::function<Trans(const Trans&, const Trans&)> compose;  // (outer, inner)
  std::function<Trans()> identity;
  std::function<bool(const Element&, const Element&)> equal;
  std::function<int(const Element&)> order;
  std::function<Element(const Element&, const Element&)> recombine;
};

/// Measured quantities for one state of the iteration. Spectral norms are
/// taken at radius r_d/2 (the spectral weights require radius <= 1),
/// majorant norms at r_d itself. The outgoing transformation's norms are
/// recorded on the state it leaves.
struct StepMetrics {
  int d = 0;
  int zeta_order = 0;
  Rational spectral_radius;
  Rational majorant_radius;
  Rational f_low_spectral, f_high_spectral;
  Rational f_low_majorant, f_high_majorant;
  Rational zeta_low_spectral, zeta_high_spectral;
  Rational zeta_low_majorant, zeta_high_majorant;
  bool has_outgoing = false;
  Rational chi_low_spectral, chi_low_majorant;
  Rational smoothing_cutoff;  // floor(t_d); -1 in Formal mode
  long timing_ms = 0;
};

struct RunMetrics {
  RunMode mode = RunMode::Formal;
  RunStatus status = RunStatus::Unconverged;
  std::vector<StepMetrics> steps;
  bool composition_consistent = false;
  int final_zeta_order = 0;
  std::string failure_note;
};

/// One audited inequality: measured value against t0^{bound_num/bound_den}.
/// Rows without a t-power bound (the bounded-low-norm row) report the
/// implied constant instead and always pass.
struct AuditEntry {
  std::string name;
  Rational measured;
  bool has_t_bound = true;
  mpz_class bound_num, bound_den;
  std::string bound_decimal;
  bool passed = true;
  std::string note;
};

struct StepAudit {
  int d = 0;
  std::vector<AuditEntry> entries;
};

/// A posteriori audit of a run against the schedule for a given t0. The
/// growth-type rows (high norms < t^A) push t0 up, the decay-type rows
/// (low norms < negative powers) push it down; the report carries both
/// binding directions and the window, when one exists, as decimal
/// annotations. Verdicts themselves are exact.
struct ScheduleAudit {
  Rational t0;
  std::vector<StepAudit> steps;
  bool all_passed = true;
  std::string t0_lower_decimal;
  std::string t0_upper_decimal;
  std::string feasibility;
  Rational bounded_low_norm_constant;
};

ScheduleAudit audit_schedule(const RunMetrics& metrics,
                             const ScheduleConstants& constants,
                             const Rational& t0);

template <typename Element, typename Trans>
struct IterationLog {
  RunMetrics metrics;
  std::vector<Element> snapshots;
  std::optional<ScheduleAudit> audit;
};

template <typename Element, typename Trans>
struct RunResult {
  Element final_element;
  Trans accumulated;
  IterationLog<Element, Trans> log;
  bool converged() const { return log.metrics.status == RunStatus::Converged; }
};

/// The iteration f^{d+1} = Phi-hat . f^d. The solver supplies the raw
/// near-identity transformation; in Scheduled mode the driver low-passes it
/// with cutoff floor(t_d) before applying (Formal mode applies it as is)
/// and accumulates Psi = Phi-hat_d o ... o Phi-hat_1. Success is the error
/// vanishing exactly modulo truncation. The radius sequence r_d enters the
/// logged norms only: jets are global, so no domain bookkeeping applies.
template <typename Element, typename Trans>
RunResult<Element, Trans> run(const SCIInstance<Element, Trans>& inst,
                              const Element& f0,
                              const ScheduleConstants& constants, RunMode mode,
                              int max_steps) {
  if (!inst.spectral || !inst.majorant || !inst.trans_spectral ||
      !inst.trans_majorant || !inst.trans_smooth || !inst.project ||
      !inst.error || !inst.solve || !inst.action || !inst.compose ||
      !inst.identity || !inst.equal || !inst.order) {
    throw std::invalid_argument("run: instance callback missing");
  }
  if (max_steps < 0) throw std::invalid_argument("run: max_steps < 0");
  if (mode == RunMode::Scheduled) {
    for (const CheckResult& row : validate_constants(constants)) {
      if (!row.passed) {
        throw std::invalid_argument("run: schedule constants fail '" +
                                    row.name + "'");
      }
    }
  }

  RunResult<Element, Trans> res{f0, inst.identity(), {}};
  RunMetrics& met = res.log.metrics;
  met.mode = mode;
  Element f = f0;
  mpz_class exp_num = 1, exp_den = 1;
  for (int d = 0;; ++d) {
    const auto t_start = std::chrono::steady_clock::now();
    const Element zeta = inst.error(f);
    StepMetrics sm;
    sm.d = d;
    sm.zeta_order = inst.order(zeta);
    sm.majorant_radius = Rational(d + 2, d + 1);
    sm.spectral_radius = sm.majorant_radius / 2;
    sm.f_low_spectral = inst.spectral(f, constants.l, sm.spectral_radius);
    sm.f_high_spectral = inst.spectral(f, constants.big_l, sm.spectral_radius);
    sm.f_low_majorant = inst.majorant(f, constants.l, sm.majorant_radius);
    sm.f_high_majorant = inst.majorant(f, constants.big_l, sm.majorant_radius);
    sm.zeta_low_spectral = inst.spectral(zeta, constants.l, sm.spectral_radius);
    sm.zeta_high_spectral =
        inst.spectral(zeta, constants.big_l, sm.spectral_radius);
    sm.zeta_low_majorant = inst.majorant(zeta, constants.l, sm.majorant_radius);
    sm.zeta_high_majorant =
        inst.majorant(zeta, constants.big_l, sm.majorant_radius);
    sm.smoothing_cutoff = Rational(-1);
    res.log.snapshots.push_back(f);

    if (mode == RunMode::Scheduled) {
      const Element p = inst.project(f);
      if (!inst.equal(inst.project(p), p)) {
        throw std::logic_error("run: projection is not idempotent");
      }
      if (inst.recombine && !inst.equal(inst.recombine(p, zeta), f)) {
        throw std::logic_error("run: error map inconsistent with projection");
      }
    }

    const auto finish = [&](RunStatus st) {
      sm.timing_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
      met.steps.push_back(sm);
      met.status = st;
      met.final_zeta_order = sm.zeta_order;
    };

    if (sm.zeta_order >= kOrderInfinity) {
      finish(RunStatus::Converged);
      break;
    }
    if (d >= max_steps) {
      finish(RunStatus::Unconverged);
      break;
    }
    std::optional<Trans> phi = inst.solve(f);
    if (!phi) {
      met.failure_note = "solver failed at step " + std::to_string(d) +
                         " (error order " + std::to_string(sm.zeta_order) + ")";
      finish(RunStatus::SolverFailure);
      break;
    }
    if (mode == RunMode::Scheduled) {
      const mpz_class cutoff = floor_power(constants.t0, exp_num, exp_den);
      sm.smoothing_cutoff = Rational(cutoff);
      // Any parameter with the same integer part selects the same terms,
      // and cutoff + 1/2 stays > 1 even when the cutoff is 1.
      *phi = inst.trans_smooth(*phi, Rational(cutoff) + Rational(1, 2));
    }
    sm.has_outgoing = true;
    sm.chi_low_spectral =
        inst.trans_spectral(*phi, constants.l, sm.spectral_radius);
    sm.chi_low_majorant =
        inst.trans_majorant(*phi, constants.l, sm.majorant_radius);
    f = inst.action(*phi, f);
    res.accumulated = inst.compose(*phi, res.accumulated);
    sm.timing_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();
    met.steps.push_back(sm);
    exp_num *= 3;
    exp_den *= 2;
  }
  res.final_element = f;
  met.composition_consistent = inst.equal(inst.action(res.accumulated, f0), f);
  if (mode == RunMode::Scheduled) {
    res.log.audit = audit_schedule(met, constants, constants.t0);
  }
  return res;
}

}  // namespace levijet
