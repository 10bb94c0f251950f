#include "saddlekit/saddle.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace saddlekit {

namespace {

// psi(u) = <g, u> + sum_j cj/2 |u - centers_j|^2, exact and uncounted.
CountedOracle make_linquad(Vec g, std::vector<std::pair<double, Vec>> quads) {
  double csum = 0;
  for (const auto& q : quads) csum += q.first;
  const Eigen::Index dim = g.size();
  return CountedOracle(
      [g = std::move(g), quads = std::move(quads)](const Vec& u) {
        double v = g.dot(u);
        Vec gr = g;
        for (const auto& [cq, ctr] : quads) {
          const Vec d = u - ctr;
          v += 0.5 * cq * d.squaredNorm();
          gr += cq * d;
        }
        return Eval{v, gr};
      },
      OracleSpec::exact(csum, csum), OracleClass::GradF, nullptr, 0, dim,
      csum);
}

CountedOracle f_oracle(const SaddleProblem& p) {
  auto fv = p.f_val;
  auto fg = p.f_grad;
  return CountedOracle(
      [fv, fg](const Vec& x) { return Eval{fv(x), fg(x)}; },
      OracleSpec::exact(p.L_f, p.mu_x), OracleClass::GradF, nullptr, 0, p.dx,
      p.L_f);
}

CountedOracle h_oracle(const SaddleProblem& p) {
  auto hv = p.h_val;
  auto hg = p.h_grad;
  return CountedOracle(
      [hv, hg](const Vec& y) { return Eval{hv(y), hg(y)}; },
      OracleSpec::exact(p.L_h, p.mu_y), OracleClass::GradH, nullptr, 0, p.dy,
      p.L_h);
}

}  // namespace

void SaddleProblem::validate() const {
  if (dx < 1 || dy < 1) throw ConfigError("SaddleProblem: bad dimensions");
  if (!(mu_x > 0) || !(mu_y > 0))
    throw ConfigError("SaddleProblem: mu_x, mu_y must be positive");
  if (!(L_f >= mu_x) || !(L_h >= mu_y) || !(L_G > 0))
    throw ConfigError("SaddleProblem: inconsistent smoothness constants");
  if (!f_val || !f_grad || !h_val || !h_grad || !G_val || !Gx || !Gy)
    throw ConfigError("SaddleProblem: missing oracle handle");
}

Vec loop3_quadratic_prox(const Vec& grad_g, const Vec& grad_f_model, double H2,
                         double H3, const Vec& x_md, const Vec& x_l_md) {
  return (H2 * x_l_md + H3 * x_md - grad_g - grad_f_model) / (H2 + H3);
}

// ---------------------------------------------------------------------------
// Sliding oracle for g_c(x) = max_y { G(x,y) - h(y) - H/2 |y - y0|^2 }.
// ---------------------------------------------------------------------------

struct SlidingMaxOracle::Impl {
  SaddleProblem p;
  double H;
  Vec y0;
  double delta;
  double sigma;
  SlidingH variant;
  mutable Vec y_warm, inner_warm, last_y;

  Impl(const SaddleProblem& prob, double H_, Vec y0_, double delta_,
       double sigma_, SlidingH v)
      : p(prob), H(H_), y0(std::move(y0_)), delta(delta_), sigma(sigma_),
        variant(v) {}

  double Lg() const {
    return p.L_G + 2.0 * p.L_G * p.L_G / (p.mu_y + H);
  }

  Vec solve(const Vec& x, double eps_gap) const {
    Vec start = y_warm.size() ? y_warm : y0;
    Vec y;
    switch (variant) {
      case SlidingH::HgeG:
      case SlidingH::ProxH: {
        // outer loop linearizes -G(x, .)
        auto Gv = p.G_val;
        auto Gyf = p.Gy;
        CountedOracle phiA(
            [Gv, Gyf, x](const Vec& yy) {
              return Eval{-Gv(x, yy), Vec(-Gyf(x, yy))};
            },
            OracleSpec::exact(p.L_G), OracleClass::GradYG, nullptr, 0, p.dy,
            p.L_G);
        CountedOracle psiA = sum_oracles(
            h_oracle(p), make_linquad(Vec::Zero(p.dy), {{H, y0}}));
        const double HA = 2.0 * p.L_G;
        ProxSolver proxA;
        if (variant == SlidingH::ProxH) {
          if (!p.prox_h)
            throw ConfigError("sliding_max_oracle: ProxH needs a prox handle");
          auto ph = p.prox_h;
          const Vec y0c = y0;
          const double Hc = H;
          proxA = [ph, y0c, Hc](const Vec& g, const Vec& c, double HA_,
                                double, double) {
            const double cs = Hc + HA_;
            const Vec ctr = (Hc * y0c + HA_ * c - g) / cs;
            return ph(ctr, cs / 2.0);
          };
        } else {
          // inner loop linearizes h over the remaining quadratic model
          proxA = [this](const Vec& g, const Vec& c, double HA_, double tol,
                         double) {
            CountedOracle phiB = h_oracle(p);
            CountedOracle psiB = make_linquad(g, {{H, y0}, {HA_, c}});
            const double HB = 2.0 * p.L_h;
            ProxSolver proxB = [&](const Vec& gB, const Vec& umd, double HB_,
                                   double, double) {
              return Vec((H * y0 + HA_ * c + HB_ * umd - gB - g) /
                         (H + HA_ + HB_));
            };
            Vec w = inner_warm.size() ? inner_warm : c;
            Vec u = ram_minimize(phiB, psiB, proxB, HB, p.mu_y + H + HA_,
                                 std::max(tol, 1e-15), w);
            inner_warm = u;
            return u;
          };
        }
        y = ram_minimize(phiA, psiA, proxA, HA, p.mu_y + H,
                         std::max(eps_gap, 1e-15), start);
        break;
      }
      case SlidingH::HleG: {
        // outer loop linearizes h; inner loop linearizes -G(x, .)
        CountedOracle phiA = h_oracle(p);
        auto Gv = p.G_val;
        auto Gyf = p.Gy;
        CountedOracle psiA(
            [Gv, Gyf, x, this](const Vec& yy) {
              const Vec d = yy - y0;
              return Eval{-Gv(x, yy) + 0.5 * H * d.squaredNorm(),
                          Vec(-Gyf(x, yy) + H * d)};
            },
            OracleSpec::exact(p.L_G + H, H), OracleClass::GradYG, nullptr, 0,
            p.dy, p.L_G + H);
        const double HA = 2.0 * p.L_h;
        ProxSolver proxA = [this, &x, Gv, Gyf](const Vec& g, const Vec& c,
                                               double HA_, double tol,
                                               double) {
          CountedOracle phiB(
              [Gv, Gyf, x](const Vec& yy) {
                return Eval{-Gv(x, yy), Vec(-Gyf(x, yy))};
              },
              OracleSpec::exact(p.L_G), OracleClass::GradYG, nullptr, 0, p.dy,
              p.L_G);
          CountedOracle psiB = make_linquad(g, {{H, y0}, {HA_, c}});
          const double HB = 2.0 * p.L_G;
          ProxSolver proxB = [&](const Vec& gB, const Vec& umd, double HB_,
                                 double, double) {
            return Vec((H * y0 + HA_ * c + HB_ * umd - gB - g) /
                       (H + HA_ + HB_));
          };
          Vec w = inner_warm.size() ? inner_warm : c;
          Vec u = ram_minimize(phiB, psiB, proxB, HB, H + HA_,
                               std::max(tol, 1e-15), w);
          inner_warm = u;
          return u;
        };
        y = ram_minimize(phiA, psiA, proxA, HA, p.mu_y + H,
                         std::max(eps_gap, 1e-15), start);
        break;
      }
    }
    y_warm = y;
    last_y = y;
    return y;
  }

  Eval eval(const Vec& x) const {
    const Vec y = solve(x, delta / 2.0);
    const double v =
        p.G_val(x, y) - p.h_val(y) - 0.5 * H * (y - y0).squaredNorm();
    return Eval{v, p.Gx(x, y)};
  }
};

SlidingMaxOracle::SlidingMaxOracle(const SaddleProblem& p, double H, Vec y0,
                                   double delta, double sigma,
                                   SlidingH variant)
    : impl_(std::make_shared<Impl>(p, H, std::move(y0), delta, sigma,
                                   variant)) {
  if (!(H >= 0)) throw ConfigError("sliding_max_oracle: H must be >= 0");
  if (!(delta > 0)) throw ConfigError("sliding_max_oracle: delta must be > 0");
}

CountedOracle SlidingMaxOracle::oracle() const {
  auto impl = impl_;
  OracleSpec spec;
  spec.delta2 = impl->delta;
  spec.sigma0 = impl->sigma;
  spec.L = 2.0 * impl->Lg();
  return CountedOracle([impl](const Vec& x) { return impl->eval(x); }, spec,
                       OracleClass::GradXG, nullptr, 0, impl->p.dx,
                       impl->Lg());
}

void SlidingMaxOracle::set_center(const Vec& y0) { impl_->y0 = y0; }
Vec SlidingMaxOracle::inner_point() const { return impl_->last_y; }
Vec SlidingMaxOracle::refine(const Vec& x, double delta) const {
  return impl_->solve(x, delta);
}

// ---------------------------------------------------------------------------
// Sliding oracle for r(y) = max_x { -f(x) - G(x, y) }.
// ---------------------------------------------------------------------------

struct SlidingMinOracle::Impl {
  SaddleProblem p;
  double delta;
  double sigma;
  SlidingF variant;
  mutable Vec x_warm, inner_warm, last_x;

  Impl(const SaddleProblem& prob, double delta_, double sigma_, SlidingF v)
      : p(prob), delta(delta_), sigma(sigma_), variant(v) {}

  double Lr() const { return p.L_G + 2.0 * p.L_G * p.L_G / p.mu_x; }

  // argmin_x f(x) + G(x, y)
  Vec solve(const Vec& y, double eps_gap) const {
    Vec start = x_warm.size() ? x_warm : Vec(Vec::Zero(p.dx));
    Vec x;
    if (variant == SlidingF::FgeG) {
      // outer linearizes G(., y), inner linearizes f
      auto Gv = p.G_val;
      auto Gxf = p.Gx;
      CountedOracle phiA(
          [Gv, Gxf, y](const Vec& xx) {
            return Eval{Gv(xx, y), Gxf(xx, y)};
          },
          OracleSpec::exact(p.L_G), OracleClass::GradXG, nullptr, 0, p.dx,
          p.L_G);
      CountedOracle psiA = f_oracle(p);
      const double HA = 2.0 * p.L_G;
      ProxSolver proxA = [this](const Vec& g, const Vec& c, double HA_,
                                double tol, double) {
        CountedOracle phiB = f_oracle(p);
        CountedOracle psiB = make_linquad(g, {{HA_, c}});
        const double HB = 2.0 * p.L_f;
        ProxSolver proxB = [&](const Vec& gB, const Vec& umd, double HB_,
                               double, double) {
          return Vec((HA_ * c + HB_ * umd - gB - g) / (HA_ + HB_));
        };
        Vec w = inner_warm.size() ? inner_warm : c;
        Vec u = ram_minimize(phiB, psiB, proxB, HB, p.mu_x + HA_,
                             std::max(tol, 1e-15), w);
        inner_warm = u;
        return u;
      };
      x = ram_minimize(phiA, psiA, proxA, HA, p.mu_x,
                       std::max(eps_gap, 1e-15), start);
    } else {
      // outer linearizes f, inner linearizes G(., y)
      CountedOracle phiA = f_oracle(p);
      auto Gv = p.G_val;
      auto Gxf = p.Gx;
      CountedOracle psiA(
          [Gv, Gxf, y](const Vec& xx) {
            return Eval{Gv(xx, y), Gxf(xx, y)};
          },
          OracleSpec::exact(p.L_G), OracleClass::GradXG, nullptr, 0, p.dx,
          p.L_G);
      const double HA = 2.0 * p.L_f;
      ProxSolver proxA = [this, &y, Gv, Gxf](const Vec& g, const Vec& c,
                                             double HA_, double tol, double) {
        CountedOracle phiB(
            [Gv, Gxf, y](const Vec& xx) {
              return Eval{Gv(xx, y), Gxf(xx, y)};
            },
            OracleSpec::exact(p.L_G), OracleClass::GradXG, nullptr, 0, p.dx,
            p.L_G);
        CountedOracle psiB = make_linquad(g, {{HA_, c}});
        const double HB = 2.0 * p.L_G;
        ProxSolver proxB = [&](const Vec& gB, const Vec& umd, double HB_,
                               double, double) {
          return Vec((HA_ * c + HB_ * umd - gB - g) / (HA_ + HB_));
        };
        Vec w = inner_warm.size() ? inner_warm : c;
        Vec u = ram_minimize(phiB, psiB, proxB, HB, HA_,
                             std::max(tol, 1e-15), w);
        inner_warm = u;
        return u;
      };
      x = ram_minimize(phiA, psiA, proxA, HA, p.mu_x,
                       std::max(eps_gap, 1e-15), start);
    }
    x_warm = x;
    last_x = x;
    return x;
  }

  Eval eval(const Vec& y) const {
    const Vec x = solve(y, delta / 2.0);
    return Eval{-p.f_val(x) - p.G_val(x, y), Vec(-p.Gy(x, y))};
  }
};

SlidingMinOracle::SlidingMinOracle(const SaddleProblem& p, double delta,
                                   double sigma, SlidingF variant)
    : impl_(std::make_shared<Impl>(p, delta, sigma, variant)) {
  if (!(delta > 0)) throw ConfigError("sliding_min_oracle: delta must be > 0");
}

CountedOracle SlidingMinOracle::oracle() const {
  auto impl = impl_;
  OracleSpec spec;
  spec.delta2 = impl->delta;
  spec.sigma0 = impl->sigma;
  spec.L = 2.0 * impl->Lr();
  return CountedOracle([impl](const Vec& y) { return impl->eval(y); }, spec,
                       OracleClass::GradYG, nullptr, 0, impl->p.dy,
                       impl->Lr());
}

Vec SlidingMinOracle::inner_point() const { return impl_->last_x; }
Vec SlidingMinOracle::refine(const Vec& y, double delta) const {
  return impl_->solve(y, delta);
}

// ---------------------------------------------------------------------------
// Plan and nested solve.
// ---------------------------------------------------------------------------

FrameworkPlan plan_framework(const SaddleProblem& p, double eps,
                             std::optional<LoopOrder> order,
                             std::optional<SlidingH> sliding_h,
                             std::optional<SlidingF> sliding_f) {
  p.validate();
  if (!(eps > 0)) throw ConfigError("plan_framework: eps must be positive");
  FrameworkPlan plan;
  plan.order = order.value_or(p.L_f >= p.L_G ? LoopOrder::Standard
                                             : LoopOrder::Inverse);
  if (sliding_h) {
    plan.sliding_h = *sliding_h;
  } else if (p.prox_h) {
    plan.sliding_h = SlidingH::ProxH;
  } else {
    plan.sliding_h = p.L_h >= p.L_G ? SlidingH::HgeG : SlidingH::HleG;
  }
  if (plan.sliding_h == SlidingH::ProxH && !p.prox_h)
    throw ConfigError("plan_framework: ProxH sliding without a prox handle");
  plan.sliding_f =
      sliding_f.value_or(p.L_f >= p.L_G ? SlidingF::FgeG : SlidingF::FleG);

  plan.H1 = 2.0 * p.L_G;
  const double Lg1 = p.L_G + 2.0 * p.L_G * p.L_G / (p.mu_y + plan.H1);
  if (plan.order == LoopOrder::Standard) {
    plan.H2 = 2.0 * Lg1;
    plan.H3 = 2.0 * p.L_f;
  } else {
    plan.H2 = 2.0 * p.L_f;
    plan.H3 = 2.0 * Lg1;
  }

  const double amp = 1.0 + 2.0 * p.L_G * p.L_G / (p.mu_x * p.mu_y);
  plan.eps1 = eps / (2.0 * amp);
  const double tol1 = plan.eps1 * 0.1;  // subproblem residual at level 1
  const double swap_factor =
      std::pow((plan.H1 + p.mu_y) / (4.0 * p.L_G), 2) * p.mu_x /
      (p.L_h + plan.H1 + p.L_G + 2.0 * p.L_G * p.L_G / p.mu_x);
  plan.eps2 = swap_factor * tol1;
  plan.eps3 = 0.1 * plan.eps2;
  plan.delta_sliding = plan.kappa * plan.eps1;
  // accuracy-propagation chain must hold by construction
  if (!(plan.eps2 <= swap_factor * tol1 * (1.0 + 1e-12)) ||
      !(plan.eps3 <= plan.eps2) || !(plan.eps1 < eps))
    throw ConfigError("plan_framework: accuracy chain violated");
  if (plan.eps3 < 1e-15)
    throw ConfigError(
        "plan_framework: eps too small for double-precision nested solve");
  return plan;
}

namespace {

struct Loop2Context {
  const SaddleProblem& p;
  const FrameworkPlan& plan;
  // warm state shared across loop-2 invocations
  Vec x_warm;
  std::shared_ptr<SlidingMaxOracle> gmax;  // rebound to each center

  explicit Loop2Context(const SaddleProblem& prob, const FrameworkPlan& pl)
      : p(prob), plan(pl) {}

  // solve min_y { h(y) + r(y) + H1/2 |y - c|^2 } via the swapped problem
  // min_x { f(x) + g_c(x) }; returns (x_hat, y_hat).
  std::pair<Vec, Vec> solve(const Vec& c, double tol) {
    const double eps2 = std::max(plan.eps2 * std::min(1.0, tol / plan.eps1),
                                 1e-14);
    const double delta2 = std::max(plan.kappa * eps2, 1e-14);
    if (!gmax) {
      gmax = std::make_shared<SlidingMaxOracle>(p, plan.H1, c, delta2, 0.0,
                                                plan.sliding_h);
    } else {
      gmax->set_center(c);
    }
    CountedOracle g_or = gmax->oracle();
    CountedOracle f_or = f_oracle(p);
    Vec start = x_warm.size() ? x_warm : Vec(Vec::Zero(p.dx));
    Vec x_hat;
    if (plan.order == LoopOrder::Standard) {
      // level 2 linearizes g_c, level 3 linearizes f
      ProxSolver prox2 = [&](const Vec& gg, const Vec& xmd, double H2,
                             double tol3, double) {
        CountedOracle phi3 = f_oracle(p);
        CountedOracle psi3 = make_linquad(gg, {{H2, xmd}});
        ProxSolver prox3 = [&](const Vec& gf, const Vec& umd, double H3,
                               double, double) {
          return loop3_quadratic_prox(gg, gf, H2, H3, umd, xmd);
        };
        return ram_minimize(phi3, psi3, prox3, plan.H3, p.mu_x + H2,
                            std::max(tol3, 1e-15), xmd);
      };
      x_hat = ram_minimize(g_or, f_or, prox2, plan.H2, p.mu_x,
                           std::max(eps2, 1e-14), start);
    } else {
      // level 2 linearizes f, level 3 linearizes g_c
      ProxSolver prox2 = [&](const Vec& gf, const Vec& xmd, double H2,
                             double tol3, double) {
        CountedOracle phi3 = g_or;
        CountedOracle psi3 = make_linquad(gf, {{H2, xmd}});
        ProxSolver prox3 = [&](const Vec& gg, const Vec& umd, double H3,
                               double, double) {
          return loop3_quadratic_prox(gg, gf, H2, H3, umd, xmd);
        };
        return ram_minimize(phi3, psi3, prox3, plan.H3, H2,
                            std::max(tol3, 1e-15), xmd);
      };
      x_hat = ram_minimize(f_or, g_or, prox2, plan.H2, p.mu_x,
                           std::max(eps2, 1e-14), start);
    }
    x_warm = x_hat;
    Vec y_hat = gmax->refine(x_hat, delta2);
    return {x_hat, y_hat};
  }
};

}  // namespace

Vec loop1_outer(const SaddleProblem& p, const FrameworkPlan& plan, double eps1,
                Vec y0) {
  auto rmin = std::make_shared<SlidingMinOracle>(
      p, std::max(plan.delta_sliding, 1e-14), 0.0, plan.sliding_f);
  CountedOracle psi1 = sum_oracles(h_oracle(p), rmin->oracle());
  CountedOracle phi1 = CountedOracle::zero(p.dy);
  auto ctx = std::make_shared<Loop2Context>(p, plan);
  ProxSolver prox1 = [ctx](const Vec&, const Vec& c, double, double tol,
                           double) {
    return ctx->solve(c, tol).second;
  };
  return ram_minimize(phi1, psi1, prox1, plan.H1, p.mu_y,
                      std::max(eps1, 1e-13), std::move(y0), plan.safety);
}

std::pair<Vec, Vec> loop2_swap_and_solve(const SaddleProblem& p,
                                         const FrameworkPlan& plan,
                                         const Vec& c, double tol) {
  Loop2Context ctx(p, plan);
  return ctx.solve(c, tol);
}

Vec recover_pair(const SaddleProblem& p, const Vec& y_hat, double eps_x,
                 double, SlidingF variant) {
  SlidingMinOracle rmin(p, std::max(2.0 * eps_x, 1e-14), 0.0, variant);
  return rmin.refine(y_hat, std::max(eps_x, 1e-14));
}

SaddleSolution solve_saddle(const SaddleProblem& p, double eps, double sigma,
                            std::optional<FrameworkPlan> plan_in) {
  p.validate();
  if (!(eps > 0)) throw ConfigError("solve_saddle: eps must be positive");
  if (sigma < 0 || sigma >= 1)
    throw ConfigError("solve_saddle: sigma must lie in [0, 1)");
  const FrameworkPlan plan =
      plan_in ? *plan_in : plan_framework(p, eps);

  const Counts before = p.ledger ? p.ledger->snapshot() : Counts{};
  SaddleSolution sol;
  sol.eps_target = eps;
  sol.sigma_target = sigma;

  Vec y_hat = loop1_outer(p, plan, plan.eps1, Vec::Zero(p.dy));
  const double eps_x = std::min(
      eps / 4.0, plan.eps1 * p.mu_x * p.mu_y / (4.0 * p.L_G * p.L_G));
  Vec x_hat = recover_pair(p, y_hat, eps_x, sigma, plan.sliding_f);

  sol.x_hat = std::move(x_hat);
  sol.y_hat = std::move(y_hat);
  sol.ledger = (p.ledger ? p.ledger->snapshot() : Counts{}) - before;
  return sol;
}

}  // namespace saddlekit
