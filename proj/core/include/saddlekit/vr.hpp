#pragma once

#include "saddlekit/am.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace saddlekit {

// Finite-sum composite minimization
//   min_x  phi(x) + psi(x),   phi = (1/n) sum_i phi_i,
// phi mu-strongly convex with component smoothness Li, psi convex smooth and
// prox-friendly.
struct FiniteSumProblem {
  int n = 0;
  std::function<Vec(int, const Vec&)> grad_i;  // caller counts
  std::vector<double> Li;
  double mu = 0.0;
  std::function<double(const Vec&)> value;  // full phi + psi, optional
  std::function<Vec(const Vec&, double)> psi_prox;  // prox_{gamma psi}
  double L_psi = 0.0;
};

struct LsvrgReport {
  long iterations = 0;
  long budget = 0;
  double step = 0.0;
};

// Loopless SVRG with importance sampling (p_i proportional to Li) and
// snapshot probability 1/n.  Runs the full theoretical budget
//   ceil(safety * (sqrt(n) + sqrt(2 D_L Lbar / mu))^2 * ln(1/(eps sigma))),
// D_L = 4 - 3 mu / Lbar, which guarantees E F(x) - F* <= eps sigma and thus
// P{F(x) - F* > eps} <= sigma by Markov.
Vec lsvrg_solve(const FiniteSumProblem& p, double eps, double sigma,
                std::uint64_t seed, Vec x0, double safety = 1.0,
                LsvrgReport* report = nullptr);

// Finite-sum monotone saddle operator for
//   min_x max_y  f(x) + (1/m) sum_i G_i(x, y) - h(y)
// accessed through scaled component operators and prox resolvents.
struct SagaSaddleProblem {
  int m = 0;
  int dx = 0, dy = 0;
  // component partial gradients of G_i (caller counts one unit per call)
  std::function<Vec(int, const Vec&, const Vec&)> Gx_i, Gy_i;
  std::vector<double> L_G_i;
  double mu_x = 0.0, mu_y = 0.0;  // strong convexity of f and h
  // argmin f(x) + c2 |x - x'|^2 and argmin h(y) + c2 |y - y'|^2
  std::function<Vec(const Vec&, double)> prox_f, prox_h;
};

struct SagaReport {
  long iterations = 0;
  long budget = 0;
  double eta = 0.0;     // per-step contraction modulus of the bound
  double lambda = 0.0;  // resolvent step
  std::vector<std::pair<Vec, Vec>> iterates;  // filled only when requested
  bool keep_iterates = false;
};

// Per-step contraction modulus eta = 1 / max{3m/2, 3 Lbar^2} of the scaled
// operator with Lbar = 2 L_G / min{mu_x, mu_y}.
double saga_sp_eta(const SagaSaddleProblem& p);

// SAGA iteration on the scaled operator: importance-sampled difference
// estimator, joint prox resolvent, uniform resampling of the stored table
// entry.  Stops on the fixed-point displacement surrogate or at the budget
//   ceil(safety * (4/eta) * ln(2 R2 / (eps sigma))).
std::pair<Vec, Vec> saga_sp_solve(const SagaSaddleProblem& p, double eps,
                                  double sigma, std::uint64_t seed, Vec x0,
                                  Vec y0, double safety = 2.0,
                                  SagaReport* report = nullptr);

// Joint resolvent (prox_f^lam, prox_h^lam) of the scaled monotone part at z;
// lam is the resolvent step, scale = (mu_x, mu_y).
std::pair<Vec, Vec> prox_saddle(const SagaSaddleProblem& p, double lam,
                                const Vec& x, const Vec& y);

}  // namespace saddlekit
