#include "saddlekit/catalyst.hpp"

#include <cmath>

namespace saddlekit {

StageSchedule catalyst_schedule(const CatalystConfig& cfg, double gap0,
                                double eps, double sigma) {
  if (!(cfg.mu > 0) || !(cfg.H > 0))
    throw ConfigError("catalyst_schedule: mu and H must be positive");
  if (!(gap0 > 0) || !(eps > 0))
    throw ConfigError("catalyst_schedule: gap0 and eps must be positive");
  StageSchedule s;
  s.q = cfg.mu / (cfg.mu + cfg.H);
  const double sq = std::sqrt(s.q);
  s.rho = cfg.rho > 0 ? cfg.rho : 0.9 * sq;
  if (!(s.rho < sq))
    throw ConfigError("catalyst_schedule: need rho < sqrt(q)");
  s.delta_k = sq / (2.0 - sq);
  const double arg = 8.0 * (1.0 - s.rho) * gap0 * (cfg.H + cfg.mu) /
                     (0.01 * cfg.mu * eps);
  long N = static_cast<long>(
      std::ceil(cfg.safety * (std::sqrt(cfg.mu + cfg.H) /
                              (0.9 * std::sqrt(cfg.mu))) *
                std::max(1.0, std::log(arg))));
  N = std::max<long>(1, std::min<long>(N, cfg.max_stages));
  s.N_stages = N;
  s.eps_k.resize(N);
  s.sigma_k.resize(N);
  for (long k = 0; k < N; ++k) {
    s.eps_k[k] = (2.0 / 9.0) * gap0 * std::pow(1.0 - s.rho, k + 1);
    s.sigma_k[k] = sigma > 0 ? sigma / N : 0.0;
  }
  return s;
}

CatalystResult catalyst_run(const CatalystInner& inner,
                            const CatalystConfig& cfg, Vec x0, double gap0,
                            double eps, double sigma) {
  if (!inner) throw ConfigError("catalyst_run: missing inner solver");
  CatalystResult res;
  res.schedule = catalyst_schedule(cfg, gap0, eps, sigma);
  const StageSchedule& s = res.schedule;

  const double q = s.q;
  double alpha_prev = std::sqrt(q);
  Vec x_prev = x0;
  Vec x_md = std::move(x0);
  Vec x_k;
  for (long k = 0; k < s.N_stages; ++k) {
    double target = s.eps_k[k];
    if (cfg.criterion == CatalystCriterion::Relative) {
      // relative target delta_k/2 * H |x - x_md|^2, estimated at warm start
      const double dist2 = (x_prev - x_md).squaredNorm();
      target = std::max(0.5 * s.delta_k * cfg.H * dist2, 1e-14);
    }
    x_k = inner(x_md, cfg.H, target, s.sigma_k[k], x_prev);
    // alpha_k solves alpha^2 = (1 - alpha) alpha_prev^2 + q alpha
    const double b = alpha_prev * alpha_prev - q;
    const double alpha =
        0.5 * (-b + std::sqrt(b * b + 4.0 * alpha_prev * alpha_prev));
    const double beta = alpha_prev * (1.0 - alpha_prev) /
                        (alpha_prev * alpha_prev + alpha);
    x_md = x_k + beta * (x_k - x_prev);
    x_prev = x_k;
    alpha_prev = alpha;
    res.iterates.push_back(x_k);
    ++res.stages;
  }
  res.x = x_k;
  return res;
}

std::function<Vec(std::uint64_t)> markov_boost(
    const std::function<Vec(double mean_target, std::uint64_t seed)>& solver,
    double eps, double sigma) {
  if (!solver) throw ConfigError("markov_boost: missing solver");
  if (!(eps > 0) || !(sigma > 0) || sigma >= 1)
    throw ConfigError("markov_boost: need eps > 0 and sigma in (0, 1)");
  const double target = eps * sigma;
  return [solver, target](std::uint64_t seed) { return solver(target, seed); };
}

PipelineTolerances pipeline_loop1_tolerances(double eps, double sigma,
                                             double mu_x, double mu_y,
                                             double L_G, double Mh) {
  PipelineTolerances t;
  const double e4 = eps * eps * eps * eps;
  t.eps_y = std::min({mu_y * eps / 8.0, e4 * mu_y / (72.0 * Mh * Mh),
                      eps * mu_y / (24.0 * (L_G + 2.0 * L_G * L_G / mu_x))});
  t.eps_x = std::min(t.eps_y * mu_x * mu_y / (4.0 * L_G * L_G), eps / 3.0);
  t.sigma_x = t.sigma_y = sigma / 2.0;
  return t;
}

PipelineTolerances pipeline_loop2_tolerances(double eps_x_p, double eps_y_p,
                                             double sigma_x_p,
                                             double sigma_y_p, double mu_x,
                                             double mu_y, double L_G,
                                             double Mf, double Mh) {
  PipelineTolerances t;
  const double ex4 = std::pow(eps_x_p, 4);
  const double ey4 = std::pow(eps_y_p, 4);
  t.eps_x = std::min({mu_x * eps_x_p / 8.0, ex4 * mu_x / (32.0 * Mf * Mf),
                      eps_x_p * mu_x /
                          (16.0 * (L_G + 2.0 * L_G * L_G / mu_y))});
  t.eps_y = std::min({mu_y * eps_y_p / 2.0,
                      t.eps_x * mu_x * mu_y / (4.0 * L_G * L_G),
                      ey4 * mu_y / (8.0 * Mh * Mh),
                      eps_y_p * mu_y / (2.0 * L_G)});
  t.sigma_x = sigma_x_p / 2.0;
  t.sigma_y = std::min(sigma_x_p / 2.0, sigma_y_p);
  return t;
}

PipelineTolerances pipeline_loop3_tolerances(double eps_x, double eps_y,
                                             double sigma_x, double sigma_y,
                                             double mu_x, double L_G,
                                             double Mf) {
  PipelineTolerances t;
  const double ex4 = std::pow(eps_x, 4);
  t.eps_x = std::min({eps_y, eps_x * mu_x / 2.0, eps_x * mu_x / (2.0 * L_G),
                      ex4 * mu_x / (8.0 * Mf * Mf)});
  t.sigma_x = std::min(sigma_x, sigma_y);
  t.eps_y = t.eps_x;
  t.sigma_y = t.sigma_x;
  return t;
}

PipelineResult prox_pipeline_solve(const SaddleProblem& p, double eps,
                                   double sigma, PipelineConfig cfg,
                                   std::uint64_t seed) {
  p.validate();
  if (!p.prox_f || !p.prox_h)
    throw ConfigError("prox_pipeline_solve: prox handles required");
  if (!(eps > 0)) throw ConfigError("prox_pipeline_solve: eps must be > 0");
  const double rm = std::sqrt(static_cast<double>(p.m_G));
  if (p.mu_x * rm > p.L_G * (1.0 + 1e-12) ||
      p.mu_y * rm > p.L_G * (1.0 + 1e-12))
    throw ConfigError(
        "prox_pipeline_solve: requires mu sqrt(m_G) <= L_G on both sides");
  const double H1 = cfg.H1 > 0 ? cfg.H1 : std::max(p.mu_x, p.L_G / rm);
  const double H2 = cfg.H2 > 0 ? cfg.H2 : std::max(p.mu_y, p.L_G / rm);
  const double gap0 = cfg.gap0 > 0 ? cfg.gap0 : 1.0;

  PipelineResult res;
  const Counts before = p.ledger ? p.ledger->snapshot() : Counts{};

  const double mux_r = p.mu_x + H1;
  const double muy_r = p.mu_y + H2;
  // child targets contracted from the parent through the coupling constant
  const double couple = 1.0 + p.L_G * p.L_G / (mux_r * muy_r);

  Vec y_last = Vec::Zero(p.dy);
  Vec x_inner_last = Vec::Zero(p.dx);
  std::uint64_t call = 0;

  // innermost solver: doubly regularized saddle by variance reduction
  auto saga_inner = [&](const Vec& cx, const Vec& cy, double target,
                        const Vec& wx, const Vec& wy) {
    SagaSaddleProblem sp;
    sp.m = p.m_G;
    sp.dx = p.dx;
    sp.dy = p.dy;
    sp.Gx_i = p.Gx_i;
    sp.Gy_i = p.Gy_i;
    sp.L_G_i = p.L_G_i;
    sp.mu_x = mux_r;
    sp.mu_y = muy_r;
    sp.prox_f = [&](const Vec& xp, double c2) {
      // argmin f + H1/2 |x - cx|^2 + c2 |x - xp|^2
      const double cs = 0.5 * H1 + c2;
      return p.prox_f((0.5 * H1 * cx + c2 * xp) / cs, cs);
    };
    sp.prox_h = [&](const Vec& yp, double c2) {
      const double cs = 0.5 * H2 + c2;
      return p.prox_h((0.5 * H2 * cy + c2 * yp) / cs, cs);
    };
    SagaReport srep;
    auto [xh, yh] = saga_sp_solve(sp, target, sigma > 0 ? sigma : 0.0,
                                  seed + 0x9e3779b97f4a7c15ull * (++call), wx,
                                  wy, cfg.safety, &srep);
    res.saga_iterations += srep.iterations;
    return std::make_pair(xh, yh);
  };

  CatalystConfig c1;
  c1.mu = p.mu_x;
  c1.H = H1;
  c1.safety = 1.0;
  CatalystInner inner1 = [&](const Vec& cx, double, double eps_k, double,
                             const Vec& warm) {
    // solve min_x f(x) + max_y{G - h} + H1/2 |x - cx|^2 via the y-loop
    CatalystConfig c2;
    c2.mu = p.mu_y;
    c2.H = H2;
    c2.safety = 1.0;
    const double eps_k2 = eps_k / (2.0 * couple);
    CatalystInner inner2 = [&](const Vec& cy, double, double eps_l, double,
                               const Vec& warm_y) {
      // distance-squared target for the strongly monotone inner problem
      const double target =
          std::max(1e-14, 2.0 * eps_l / (mux_r + muy_r) / couple);
      auto [xh, yh] = saga_inner(cx, cy, target, x_inner_last.size()
                                                     ? x_inner_last
                                                     : warm,
                                 warm_y);
      x_inner_last = xh;
      return yh;
    };
    CatalystResult r2 =
        catalyst_run(inner2, c2, y_last, gap0 + eps_k, eps_k2, sigma);
    y_last = r2.x;
    res.stages2 += r2.stages;
    return x_inner_last;
  };
  CatalystResult r1 =
      catalyst_run(inner1, c1, Vec::Zero(p.dx), gap0, eps / 2.0, sigma);
  res.stages1 = r1.stages;
  res.x = r1.x;
  res.y = y_last;
  res.ledger = (p.ledger ? p.ledger->snapshot() : Counts{}) - before;
  return res;
}

}  // namespace saddlekit
