#include "saddlekit/am.hpp"

#include <cmath>

namespace saddlekit {

namespace {

Counts ledger_snapshot(const CountedOracle& phi, const CountedOracle& psi) {
  if (phi.ledger()) return phi.ledger()->snapshot();
  if (psi.ledger()) return psi.ledger()->snapshot();
  return Counts{};
}

void check_H(const CountedOracle& phi, double H) {
  if (!(H > 0)) throw ConfigError("am: H must be positive");
  if (H < 2.0 * phi.smoothness() * (1.0 - 1e-12))
    throw ConfigError("am: H below 2x smoothness of the linearized part");
}

}  // namespace

Vec quadratic_prox(const Vec& g, const Mat& Q, const Vec& q, double H,
                   const Vec& c) {
  Mat M = Q;
  M.diagonal().array() += H;
  return M.ldlt().solve(H * c - g - q);
}

Vec am_prox_subproblem(const Vec& grad_phi_md, const Vec& x_md, double H,
                       double tol, double conf, const ProxSolver& inner) {
  if (!std::isfinite(tol) && tol > 0) return x_md;
  if (!inner) throw ConfigError("am_prox_subproblem: no subproblem solver");
  return inner(grad_phi_md, x_md, H, tol, conf);
}

SolveReport am_run(const CountedOracle& phi, const CountedOracle& psi,
                   const ProxSolver& prox, const AMConfig& cfg, Vec x0,
                   const std::function<double(const Vec&)>& exact_value) {
  check_H(phi, cfg.H);
  const double H = cfg.H;
  SolveReport rep;
  const Counts before = ledger_snapshot(phi, psi);

  double A = 0.0;
  Vec x_t = x0;
  Vec x = std::move(x0);
  Vec x_md, gsum;
  for (int k = 0; k < cfg.max_iter; ++k) {
    const double a = (1.0 + std::sqrt(1.0 + 8.0 * H * A)) / (4.0 * H);
    const double A1 = A + a;
    x_md = (A / A1) * x_t + (a / A1) * x;
    const Eval ephi_md = phi(x_md);
    x_t = am_prox_subproblem(ephi_md.grad, x_md, H, cfg.subproblem_tol,
                             cfg.subproblem_conf, prox);
    const Eval ephi = phi(x_t);
    const Eval epsi = psi(x_t);
    gsum = ephi.grad + epsi.grad;
    x -= a * gsum;
    A = A1;
    rep.A_seq.push_back(A);
    ++rep.iterations;
    const double val =
        exact_value ? exact_value(x_t) : ephi.value + epsi.value;
    rep.trace.push_back(
        {rep.iterations, val, gsum.norm(), ledger_snapshot(phi, psi)});
    if (cfg.target_gap > 0 && cfg.mu > 0 &&
        gsum.squaredNorm() / (2.0 * cfg.mu) <= cfg.target_gap) {
      rep.certified = true;
      break;
    }
  }
  rep.x_best = x_t;
  rep.ledger = ledger_snapshot(phi, psi) - before;
  if (exact_value && !rep.trace.empty())
    rep.value_gap = rep.trace.back().value;
  return rep;
}

SolveReport restarted_am(const CountedOracle& phi, const CountedOracle& psi,
                         const ProxSolver& prox, double H, double mu,
                         double eps, double sigma, Vec x0, double R0,
                         const std::function<double(const Vec&)>& exact_value) {
  if (!(mu > 0)) throw ConfigError("restarted_am: mu must be positive");
  if (!(eps > 0)) throw ConfigError("restarted_am: eps must be positive");
  if (!(R0 > 0)) throw ConfigError("restarted_am: R0 must be positive");
  const ToleranceBudget plan = plan_tolerances(
      eps, sigma, phi.smoothness(), psi.smoothness(), mu, H, R0);

  SolveReport rep;
  const Counts before = ledger_snapshot(phi, psi);
  Vec z = std::move(x0);
  rep.restarts.push_back(z);
  for (long k = 0; k < plan.K_restarts; ++k) {
    AMConfig cfg;
    cfg.H = H;
    cfg.max_iter = static_cast<int>(plan.N_inner);
    cfg.subproblem_tol = plan.eps_f_tilde;
    cfg.subproblem_conf = plan.sigma_tilde;
    SolveReport stage = am_run(phi, psi, prox, cfg, z, exact_value);
    z = stage.x_best;
    rep.restarts.push_back(z);
    for (auto& t : stage.trace) {
      t.k += rep.iterations;
      rep.trace.push_back(t);
    }
    rep.iterations += stage.iterations;
    rep.A_seq = std::move(stage.A_seq);
    if (exact_value && exact_value(z) <= eps) break;
  }
  rep.x_best = z;
  rep.certified = true;
  rep.ledger = ledger_snapshot(phi, psi) - before;
  if (exact_value) rep.value_gap = exact_value(z);
  return rep;
}

Vec ram_minimize(const CountedOracle& phi, const CountedOracle& psi,
                 const ProxSolver& prox, double H, double mu, double eps,
                 Vec x0, double safety, long* iterations_out) {
  check_H(phi, H);
  if (!(mu > 0) || !(eps > 0))
    throw ConfigError("ram_minimize: mu and eps must be positive");
  const long N =
      std::max<long>(1, static_cast<long>(std::ceil(std::sqrt(128.0 * H / mu))));
  const double R0 = x0.norm() + 1.0;
  const double stages_guess =
      std::max(1.0, std::log2(std::max(4.0, mu * R0 * R0 / eps)));
  const long cap = static_cast<long>(
      std::ceil(safety * (std::sqrt(512.0 * H / mu) + 2.0) * stages_guess)) + N;
  const double sub_tol = eps * 0.1;

  Vec z = std::move(x0);
  Vec best = z;
  double best_s = std::numeric_limits<double>::infinity();
  long iters = 0;
  while (iters < cap) {
    double A = 0.0;
    Vec x_t = z;
    Vec x = z;
    for (long i = 0; i < N && iters < cap; ++i, ++iters) {
      const double a = (1.0 + std::sqrt(1.0 + 8.0 * H * A)) / (4.0 * H);
      const double A1 = A + a;
      const Vec x_md = (A / A1) * x_t + (a / A1) * x;
      const Eval ephi_md = phi(x_md);
      x_t = am_prox_subproblem(ephi_md.grad, x_md, H, sub_tol, 0.0, prox);
      const Eval ephi = phi(x_t);
      const Eval epsi = psi(x_t);
      const Vec gsum = ephi.grad + epsi.grad;
      x -= a * gsum;
      A = A1;
      const double s = gsum.squaredNorm() / (2.0 * mu);
      if (s < best_s) {
        best_s = s;
        best = x_t;
      }
      if (s <= eps) {
        if (iterations_out) *iterations_out = iters + 1;
        return best;
      }
    }
    z = x_t;
  }
  if (iterations_out) *iterations_out = iters;
  return best;
}

ToleranceBudget plan_tolerances(double eps, double sigma, double L_phi,
                                double L_psi, double mu, double H, double R0) {
  if (!(eps > 0)) throw ConfigError("plan_tolerances: eps must be positive");
  if (!(mu > 0)) throw ConfigError("plan_tolerances: mu must be positive");
  if (!(H > 0)) throw ConfigError("plan_tolerances: H must be positive");
  if (!(R0 > 0)) throw ConfigError("plan_tolerances: R0 must be positive");
  if (sigma < 0 || sigma >= 1)
    throw ConfigError("plan_tolerances: sigma must lie in [0, 1)");
  ToleranceBudget b;
  b.eps = eps;
  b.sigma = sigma;
  const double c = 864.0 * 864.0;
  const double L = L_phi + L_psi;
  double d = std::numeric_limits<double>::infinity();
  if (L_phi > 0) d = std::min(d, eps * mu / (c * L_phi));
  if (L_psi > 0) d = std::min(d, eps * mu / (c * L_psi));
  d = std::min(d, eps * mu * mu / (c * (L + H) * (L + H)));
  d = std::min(d, std::pow(eps, 1.5) / (5.0 * std::sqrt(8.0 * H * R0 * R0)));
  b.delta1 = b.delta2 = d;
  b.eps_f_tilde = eps * mu * mu / (c * (L + H) * (L + H));
  const double ratio = mu * R0 * R0 / (4.0 * eps);
  b.K_restarts =
      ratio > 1.0 ? static_cast<long>(std::ceil(2.0 * std::log2(ratio))) : 0;
  b.N_inner =
      std::max<long>(1, static_cast<long>(std::ceil(std::sqrt(128.0 * H / mu))));
  b.total_iterations = b.K_restarts * b.N_inner;
  const double log_term = std::log2(std::max(2.0, mu * R0 * R0 / eps));
  const double denom =
      2.0 * (16.0 * std::sqrt(2.0) * std::sqrt(H / mu) + 2.0) * log_term;
  b.sigma0 = b.sigma_tilde = sigma > 0 ? sigma / denom : 0.0;
  return b;
}

}  // namespace saddlekit
