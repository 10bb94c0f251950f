#pragma once

#include "saddlekit/oracle.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace saddlekit {

// Inexact solver handle for the composite prox subproblem
//
//   argmin_z  <g, z - c> + psi(z) + H/2 |z - c|^2
//
// to objective residual <= tol with probability >= 1 - conf.  tol = +inf means
// any point (in particular c itself) is acceptable.
using ProxSolver = std::function<Vec(const Vec& g, const Vec& c, double H,
                                     double tol, double conf)>;

// Closed-form solver for the fully quadratic subproblem
//   argmin_z <g, z> + 1/2 z' Q z + q' z + H/2 |z - c|^2.
Vec quadratic_prox(const Vec& g, const Mat& Q, const Vec& q, double H,
                   const Vec& c);

// One inexact prox-subproblem solve; thin dispatcher around the handle with
// the vacuous-tolerance shortcut.
Vec am_prox_subproblem(const Vec& grad_phi_md, const Vec& x_md, double H,
                       double tol, double conf, const ProxSolver& inner);

struct AMConfig {
  double H = 0.0;          // must satisfy H >= 2 * smoothness of phi
  int max_iter = 1000;
  double subproblem_tol = std::numeric_limits<double>::infinity();
  double subproblem_conf = 0.0;
  // Optional measured stop: exit once |grad phi + grad psi|^2 / (2 mu) <= gap.
  double target_gap = 0.0;
  double mu = 0.0;
};

struct TracePoint {
  long k = 0;
  double value = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  Counts counts;  // cumulative ledger snapshot at this iteration
};

struct SolveReport {
  Vec x_best;
  double value_gap = std::numeric_limits<double>::quiet_NaN();
  long iterations = 0;
  Counts ledger;
  std::vector<TracePoint> trace;
  bool certified = false;
  // Coefficient sequence A_1..A_k of the last (or only) stage.
  std::vector<double> A_seq;
  // Restart points z_0, z_1, ..., z_K (restarted runs only).
  std::vector<Vec> restarts;
};

// Accelerated meta-iteration on F = phi + psi: momentum point, inexact prox
// step on the linearized model of phi, dual-averaging update.  Records the
// value phi+psi at each prox point (or exact_value if given) and the residual
// |grad phi + grad psi| there.
SolveReport am_run(const CountedOracle& phi, const CountedOracle& psi,
                   const ProxSolver& prox, const AMConfig& cfg, Vec x0,
                   const std::function<double(const Vec&)>& exact_value = {});

// Restart wrapper for mu-strongly convex F: stages of
// N = max(ceil(sqrt(128 H / mu)), 1) meta-iterations, each halving the
// distance to the minimizer, K = ceil(2 log2(mu R0^2 / (4 eps))) stages.
SolveReport restarted_am(const CountedOracle& phi, const CountedOracle& psi,
                         const ProxSolver& prox, double H, double mu,
                         double eps, double sigma, Vec x0, double R0,
                         const std::function<double(const Vec&)>& exact_value = {});

// Internal workhorse: restarted meta-iterations with the measured stop
// |grad F|^2 / (2 mu) <= eps, iteration cap = safety * theoretical budget.
// Returns the first iterate meeting the stop (or the last one at the cap).
Vec ram_minimize(const CountedOracle& phi, const CountedOracle& psi,
                 const ProxSolver& prox, double H, double mu, double eps,
                 Vec x0, double safety = 2.0, long* iterations_out = nullptr);

// Accuracy plan for running the restarted scheme to (eps, sigma) on
// F = phi + psi with an inexact oracle and inexact subproblem solves.
struct ToleranceBudget {
  double eps = 0.0;
  double sigma = 0.0;
  double delta1 = 0.0;       // oracle slack, lower branch
  double delta2 = 0.0;       // oracle slack, upper branch
  double sigma0 = 0.0;       // per-call oracle confidence budget
  double eps_f_tilde = 0.0;  // subproblem objective-residual target
  double sigma_tilde = 0.0;  // per-subproblem confidence budget
  long K_restarts = 0;
  long N_inner = 0;
  long total_iterations = 0;
};

ToleranceBudget plan_tolerances(double eps, double sigma, double L_phi,
                                double L_psi, double mu, double H, double R0);

}  // namespace saddlekit
