#pragma once

#include "saddlekit/am.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace saddlekit {

// Composite saddle problem
//
//   min_x max_y  f(x) + G(x, y) - h(y),
//
// f mu_x-strongly convex and L_f-smooth, h mu_y-strongly convex and
// L_h-smooth, G convex-concave and L_G-smooth, with finite-sum structure
// G = (1/m_G) sum G_i and h = (1/m_h) sum h_i.  Access is purely through
// counted oracles; prox handles are optional.
struct SaddleProblem {
  int dx = 0, dy = 0;
  int m_h = 1, m_G = 1;
  double L_f = 0, mu_x = 0, L_G = 0, L_h = 0, mu_y = 0;
  std::vector<double> L_G_i;  // per-component smoothness of G_i

  std::function<double(const Vec&)> f_val;
  std::function<Vec(const Vec&)> f_grad;  // counts GradF
  std::function<double(const Vec&)> h_val;
  std::function<Vec(const Vec&)> h_grad;  // counts m_h x GradH
  std::function<double(const Vec&, const Vec&)> G_val;
  std::function<Vec(const Vec&, const Vec&)> Gx;  // counts m_G x GradXG
  std::function<Vec(const Vec&, const Vec&)> Gy;  // counts m_G x GradYG
  // Component access (counts a single unit per call).
  std::function<Vec(int, const Vec&, const Vec&)> Gx_i, Gy_i;
  std::function<Vec(int, const Vec&)> h_grad_i;
  // Optional prox handles: argmin_x f(x) + c2 |x - x'|^2 (and same for h).
  std::function<Vec(const Vec&, double)> prox_f;
  std::function<Vec(const Vec&, double)> prox_h;

  LedgerPtr ledger;

  void validate() const;
};

enum class LoopOrder { Standard, Inverse };
enum class SlidingH { HgeG, HleG, ProxH };
enum class SlidingF { FgeG, FleG };

// Nested three-loop plan.  Standard order linearizes the max-component at the
// middle level and f at the innermost one; Inverse order swaps the two.
struct FrameworkPlan {
  LoopOrder order = LoopOrder::Standard;
  SlidingH sliding_h = SlidingH::HgeG;
  SlidingF sliding_f = SlidingF::FgeG;
  double H1 = 0, H2 = 0, H3 = 0;
  // Per-level accuracy targets derived from eps.
  double eps1 = 0, eps2 = 0, eps3 = 0;
  double delta_sliding = 0;  // inexactness target for sliding oracles
  // Child-over-parent tolerance contraction used for oracle slack.
  double kappa = 0.05;
  double safety = 2.0;
};

// Derive a plan: order from L_f vs L_G, sliding variants from L_h vs L_G
// (prox handle takes precedence) and L_f vs L_G, step constants from the
// smoothness of each level, accuracy chain from eps.  Asserts the chain
// inequalities; throws ConfigError when they cannot hold.
FrameworkPlan plan_framework(const SaddleProblem& p, double eps,
                             std::optional<LoopOrder> order = {},
                             std::optional<SlidingH> sliding_h = {},
                             std::optional<SlidingF> sliding_f = {});

struct SaddleSolution {
  Vec x_hat, y_hat;
  double eps_target = 0;
  double sigma_target = 0;
  Counts ledger;
  long outer_iterations = 0;
};

// Full nested solve to duality gap eps with confidence 1 - sigma.
SaddleSolution solve_saddle(const SaddleProblem& p, double eps, double sigma,
                            std::optional<FrameworkPlan> plan = {});

// Inexact oracle for g_c(x) = max_y { G(x, y) - h(y) - H/2 |y - y0|^2 },
// realized by a warm-started nested scheme chosen by `variant`.  The returned
// oracle carries spec (0, delta, sigma, 2 Lg) with
// Lg = L_G + 2 L_G^2 / (mu_y + H).  The prox center y0 can be rebound between
// evaluations through the returned handle.
class SlidingMaxOracle {
 public:
  SlidingMaxOracle(const SaddleProblem& p, double H, Vec y0, double delta,
                   double sigma, SlidingH variant);
  CountedOracle oracle() const;
  void set_center(const Vec& y0);
  // Inner maximizer from the most recent evaluation (refined to `delta`).
  Vec inner_point() const;
  Vec refine(const Vec& x, double delta) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Same construction for r(y) = max_x { -f(x) - G(x, y) }.
class SlidingMinOracle {
 public:
  SlidingMinOracle(const SaddleProblem& p, double delta, double sigma,
                   SlidingF variant);
  CountedOracle oracle() const;  // oracle of r as a function of y
  Vec inner_point() const;
  Vec refine(const Vec& y, double delta) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Outer loop over y on h + r with prox subproblems delegated to the swapped
// x-problem; returns the approximate outer minimizer.
Vec loop1_outer(const SaddleProblem& p, const FrameworkPlan& plan, double eps1,
                Vec y0);

// Solve min_y { h(y) + r(y) + H1/2 |y - c|^2 } through the equivalent
// min_x { f(x) + g_c(x) }; returns (x_hat, y_hat).
std::pair<Vec, Vec> loop2_swap_and_solve(const SaddleProblem& p,
                                         const FrameworkPlan& plan,
                                         const Vec& c, double tol);

// Innermost fully quadratic prox model
//   argmin_u <grad_g, u> + <grad_f_model, u>
//            + H2/2 |u - x_l_md|^2 + H3/2 |u - u_m_md|^2.
Vec loop3_quadratic_prox(const Vec& grad_g, const Vec& grad_f_model, double H2,
                         double H3, const Vec& x_md, const Vec& x_l_md);

// Given an eps_y-solution y_hat of the outer problem, recover the primal
// partner x_hat = argmin_x { f(x) + G(x, y_hat) } to accuracy eps_x.
Vec recover_pair(const SaddleProblem& p, const Vec& y_hat, double eps_x,
                 double sigma_x, SlidingF variant = SlidingF::FgeG);

}  // namespace saddlekit
