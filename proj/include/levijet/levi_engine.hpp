#ifndef LEVIJET_LEVI_ENGINE_HPP
#define LEVIJET_LEVI_ENGINE_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "levijet/ce_complex.hpp"
#include "levijet/jet_algebra.hpp"
#include "levijet/lie_core.hpp"
#include "levijet/nash_moser_driver.hpp"
#include "levijet/schedule_norms.hpp"

namespace levijet {

enum class ProblemMode { Poisson, Algebroid };

/// A partial-linearization problem: a bivector jet on R^n, coordinates split
/// (x_1..x_m, y_1..y_{n-m}), whose linear part realizes the model on the
/// x-x and x-y components ({x_i,x_j} linear part sum_k c_ij^k x_k,
/// {x_i,y_a} linear part sum_b a_ia^b y_b). Algebroid mode adds the
/// fiber/base split: the first split->fiber_total variables are fiber
/// coordinates and the bivector is fiberwise linear.
struct LeviProblem {
  StructureData data;
  JetBivector pi;
  int cap = 0;
  ProblemMode mode = ProblemMode::Poisson;
  std::optional<AlgebroidSplit> split;
};

/// The model linear bivector of the structure data: x-x and x-y components
/// as above, y-y components zero.
JetBivector model_bivector(const StructureData& data, int cap);

/// Checks the problem invariants: structure data valid, pi vanishes at the
/// origin, linear parts match the model on the x rows, jacobiator zero
/// modulo degree > cap-1, and (algebroid mode) the split is in range with
/// pi fiberwise linear. Witnesses carry the first offending component.
ValidationReport validate_problem(const LeviProblem& problem);

/// Module specs and homotopy tables for the two coefficient modules of a
/// problem shape: function-type coefficients (Functions, or FiberwiseLinear
/// in algebroid mode) and vector-field-type coefficients (YFields, split in
/// algebroid mode). Built once per (data, cap, mode) and shared across
/// runs; heap-only because the homotopy tables point into the specs.
struct EngineTables {
  ModuleSpec fun_spec;
  ModuleSpec y_spec;
  CasimirElement cas;
  HomotopyTables fun;
  HomotopyTables yf;

  EngineTables() = default;
  EngineTables(const EngineTables&) = delete;
  EngineTables& operator=(const EngineTables&) = delete;
};

std::unique_ptr<EngineTables> build_engine_tables(const LeviProblem& problem);

/// The deviation of a structure from the model, as cochains over g:
///   f (degree 2, function coefficients)      f_ij = {x_i,x_j}_d - model
///   g (degree 1, vector-field coefficients)  g_ia = {x_i,y_a}_d - model
struct ErrorCochains {
  Cochain f;
  Cochain g;

  /// min of the two vanishing orders; kOrderInfinity when both are zero.
  int order() const;
};

/// Throws std::logic_error naming the offending component when a linear
/// part deviates from the model; otherwise every entry has vanishing order
/// at least 2.
ErrorCochains error_cochains(const EngineTables& tables,
                             const LeviProblem& problem,
                             const JetBivector& pi_d);

/// ghat = g - sum_i (sum_a {h(f)_i, y_a}_d d/dy_a) ox xi_i^*, the corrected
/// degree-1 cochain whose differential is quadratic in the errors.
Cochain corrected_g(const EngineTables& tables, const LeviProblem& problem,
                    const JetBivector& pi_d, const Cochain& f,
                    const Cochain& g);

/// The quadratic remainders of one step, for the update chi = (phi, psi):
///   q_ij = sum_u (f_iu dphi_j/dx_u - f_ju dphi_i/dx_u)
///        + sum_b (g_ib dphi_j/dy_b - g_jb dphi_i/dy_b) + {phi_i,phi_j}_d
///   t_ia = sum_u f_iu dpsi_a/dx_u + sum_b g_ib dpsi_a/dy_b + {phi_i,psi_a}_d
///   u_ia = {h(f)_i + phi_i, y_a}_d
/// u vanishes identically when phi = -h(f) (no smoothing cut).
struct QuadraticTerms {
  Cochain q;  // degree 2, function coefficients
  Cochain t;  // degree 1, vector-field coefficients
  Cochain u;  // degree 1, vector-field coefficients
};

QuadraticTerms quadratic_terms(const EngineTables& tables,
                               const LeviProblem& problem,
                               const JetBivector& pi_d, const Cochain& f,
                               const Cochain& g,
                               const std::vector<JetPoly>& phi,
                               const std::vector<JetPoly>& psi);

/// Per-step verification record. The two dual-path rows compare the errors
/// of pi_next computed directly against the assembled expressions
///   f_next = [(delta phi) + f + q] o theta^{-1}
///   g_next = [(delta psi) + ghat + t + u] o theta^{-1}
/// exactly modulo the cap. The identity rows compare the differential of
/// (f, ghat) against their quadratic expansions in (f, g); they hold
/// exactly whenever pi_d is Poisson modulo the cap. jacobi_next is the
/// jacobiator of pi_next modulo degree > cap-1; fiberwise_next applies in
/// algebroid mode only (true elsewhere).
struct StepLog {
  int order_before = 0;
  int order_after = 0;
  std::optional<Rational> smoothing_t;
  bool f_consistent = false;
  bool g_consistent = false;
  bool identities_checked = false;
  bool df_expansion = false;
  bool dg_expansion = false;
  bool jacobi_next = false;
  bool fiberwise_next = true;
  std::string witness;  // first failed row, with component tuple
};

struct StepOutcome {
  JetDiffeo theta;
  JetDiffeo theta_inv;
  JetBivector pi_next;
  StepLog log;
};

/// One iteration step: phi = -S(h(f)), psi = -S(h(ghat)), theta = Id +
/// (phi, psi), pi_next = pushforward. smoothing_t empty means S = Id
/// (formal step); check_identities toggles the two differential-identity
/// rows (the dual-path rows always run).
StepOutcome step(const EngineTables& tables, const LeviProblem& problem,
                 const JetBivector& pi_d,
                 const std::optional<Rational>& smoothing_t,
                 bool check_identities = true);

struct NormalizeConfig {
  RunMode mode = RunMode::Formal;
  PlanVariant variant = PlanVariant::MainText;
  std::optional<Rational> tau;  // appendix variant only
  std::optional<Rational> t0;   // scheduled mode; constants default otherwise
  int max_steps = -1;           // -1: automatic (guaranteed enough in formal)
  bool check_identities = true;
};

struct NormalizeResult {
  bool converged = false;
  JetDiffeo theta_inf;
  JetBivector pi_inf;
  ScheduleConstants constants;
  RunMetrics metrics;
  std::optional<ScheduleAudit> audit;
  std::vector<StepLog> steps;  // one per executed transformation
  bool composition_consistent = false;
  bool final_relations_ok = false;
  std::vector<std::string> final_relation_failures;
};

/// Runs the iteration to convergence (error zero modulo the cap) or
/// max_steps. Throws std::invalid_argument when validate_problem fails; in
/// formal mode with automatic max_steps, non-convergence is a logic error
/// (the order at least doubles-minus-one per step, so ceil(log2 cap) + 2
/// steps always suffice).
NormalizeResult normalize(const EngineTables& tables,
                          const LeviProblem& problem,
                          const NormalizeConfig& config);

/// Section data of a Lie algebroid over (R^base_dim, 0) with fiber
/// dimension fiber_dim, whose first m sections span the compact model.
/// bracket[i][j][k] is the coefficient of e_k in [e_i, e_j] and
/// anchor[i][j] the x_j-component of the anchor of e_i; both are jets in
/// the base variables only.
struct AlgebroidData {
  int fiber_dim = 0;
  int base_dim = 0;
  int m = 0;
  std::vector<std::vector<std::vector<JetPoly>>> bracket;
  std::vector<std::vector<JetPoly>> anchor;
};

/// The induced fiberwise-linear bivector on the dual bundle, as a problem
/// in the variables (s_1..s_m, v_1..v_{fiber_dim-m}, x_1..x_{base_dim}):
/// {e_i,e_j} = [e_i,e_j], {e_i,x_j} = anchor, {x_i,x_j} = 0. Throws
/// std::invalid_argument when the anchor does not vanish at the origin,
/// the brackets are not antisymmetric, the model rows fail to close, or
/// the induced bivector violates the Jacobi identity modulo the cap.
LeviProblem algebroid_to_poisson(const AlgebroidData& alg, int cap);

/// True iff fiber-fiber components have degree <= 1 in the fiber
/// variables, fiber-base components are base functions, and base-base
/// components vanish.
bool check_fiberwise_linear(const JetBivector& pi, const AlgebroidSplit& split);

}  // namespace levijet

#endif
