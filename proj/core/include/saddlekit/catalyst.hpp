#pragma once

#include "saddlekit/saddle.hpp"
#include "saddlekit/vr.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace saddlekit {

enum class CatalystCriterion { Absolute, Relative };

struct CatalystConfig {
  double mu = 0.0;
  double H = 0.0;
  CatalystCriterion criterion = CatalystCriterion::Absolute;
  double rho = -1.0;  // default 0.9 sqrt(q)
  long max_stages = 100000;
  double safety = 1.0;
};

struct StageSchedule {
  double q = 0.0;
  double rho = 0.0;
  double delta_k = 0.0;  // relative criterion constant sqrt(q)/(2-sqrt(q))
  long N_stages = 0;
  std::vector<double> eps_k;  // absolute criterion targets
  std::vector<double> sigma_k;
};

StageSchedule catalyst_schedule(const CatalystConfig& cfg, double gap0,
                                double eps, double sigma);

// Inner solver handle: approximate argmin F(x) + H/2 |x - center|^2 to the
// given target, warm-started.
using CatalystInner = std::function<Vec(const Vec& center, double H,
                                        double eps_k, double sigma_k,
                                        const Vec& warm)>;

struct CatalystResult {
  Vec x;
  long stages = 0;
  std::vector<Vec> iterates;
  StageSchedule schedule;
};

// Inertial proximal-point acceleration around the inner solver.
CatalystResult catalyst_run(const CatalystInner& inner,
                            const CatalystConfig& cfg, Vec x0, double gap0,
                            double eps, double sigma);

// Confidence boosting by Markov's inequality: a solver guaranteeing expected
// gap <= target, run at target eps * sigma, yields an (eps, sigma)-solution.
std::function<Vec(std::uint64_t seed)> markov_boost(
    const std::function<Vec(double mean_target, std::uint64_t seed)>& solver,
    double eps, double sigma);

// Literal per-loop tolerance maps of the nested prox pipeline (exposed for
// verification; the runtime scheduler uses measured surrogates instead
// because the literal chain underflows double precision when composed).
struct PipelineTolerances {
  double eps_x = 0.0, eps_y = 0.0;
  double sigma_x = 0.0, sigma_y = 0.0;
};

PipelineTolerances pipeline_loop1_tolerances(double eps, double sigma,
                                             double mu_x, double mu_y,
                                             double L_G, double Mh);
PipelineTolerances pipeline_loop2_tolerances(double eps_x_p, double eps_y_p,
                                             double sigma_x_p,
                                             double sigma_y_p, double mu_x,
                                             double mu_y, double L_G,
                                             double Mf, double Mh);
// returns {eps, -, sigma, -} packed in eps_x / sigma_x
PipelineTolerances pipeline_loop3_tolerances(double eps_x, double eps_y,
                                             double sigma_x, double sigma_y,
                                             double mu_x, double L_G,
                                             double Mf);

struct PipelineConfig {
  double H1 = -1.0, H2 = -1.0;  // default max(mu, L_G / sqrt(m_G))
  double gap0 = -1.0;           // upper bound on the initial primal gap
  double safety = 2.0;
};

struct PipelineResult {
  Vec x, y;
  Counts ledger;
  long stages1 = 0, stages2 = 0;
  long saga_iterations = 0;
};

// Prox-friendly pipeline: outer inertial prox loop in x, middle inertial
// prox loop in y, innermost variance-reduced saddle solver on the doubly
// regularized problem.  Requires prox handles on the problem and
// mu sqrt(m_G) <= L_G on both sides.
PipelineResult prox_pipeline_solve(const SaddleProblem& p, double eps,
                                   double sigma, PipelineConfig cfg = {},
                                   std::uint64_t seed = 0);

}  // namespace saddlekit
