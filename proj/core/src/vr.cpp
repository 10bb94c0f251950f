#include "saddlekit/vr.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace saddlekit {

Vec lsvrg_solve(const FiniteSumProblem& p, double eps, double sigma,
                std::uint64_t seed, Vec x0, double safety,
                LsvrgReport* report) {
  if (p.n < 1 || static_cast<int>(p.Li.size()) != p.n)
    throw ConfigError("lsvrg_solve: bad component description");
  if (!(p.mu > 0)) throw ConfigError("lsvrg_solve: mu must be positive");
  if (!(eps > 0)) throw ConfigError("lsvrg_solve: eps must be positive");
  if (!p.grad_i || !p.psi_prox)
    throw ConfigError("lsvrg_solve: missing handles");

  const double Lbar =
      std::accumulate(p.Li.begin(), p.Li.end(), 0.0) / p.n;
  const double DL = std::max(1.0, 4.0 - 3.0 * p.mu / Lbar);
  const double sig = sigma > 0 ? sigma : 0.5;
  const double root = std::sqrt(static_cast<double>(p.n)) +
                      std::sqrt(2.0 * DL * Lbar / p.mu);
  const long budget = static_cast<long>(
      std::ceil(safety * root * root *
                std::max(1.0, std::log(1.0 / (eps * sig)))));
  const double gamma = 1.0 / (6.0 * Lbar + 2.0 * p.L_psi);

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(p.Li.begin(), p.Li.end());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double Lsum = std::accumulate(p.Li.begin(), p.Li.end(), 0.0);

  Vec x = std::move(x0);
  Vec w = x;
  Vec full = Vec::Zero(x.size());
  for (int i = 0; i < p.n; ++i) full += p.grad_i(i, w);
  full /= p.n;

  for (long t = 0; t < budget; ++t) {
    const int i = pick(rng);
    const double pi = p.Li[i] / Lsum;
    const Vec g = (p.grad_i(i, x) - p.grad_i(i, w)) / (p.n * pi) + full;
    x = p.psi_prox(x - gamma * g, gamma);
    if (uni(rng) < 1.0 / p.n) {
      w = x;
      full.setZero();
      for (int j = 0; j < p.n; ++j) full += p.grad_i(j, w);
      full /= p.n;
    }
    if (report) report->iterations = t + 1;
  }
  if (report) {
    report->budget = budget;
    report->step = gamma;
  }
  return x;
}

double saga_sp_eta(const SagaSaddleProblem& p) {
  const double L_G =
      std::accumulate(p.L_G_i.begin(), p.L_G_i.end(), 0.0) / p.m;
  const double Lbar = 2.0 * L_G / std::min(p.mu_x, p.mu_y);
  return 1.0 / std::max(1.5 * p.m, 3.0 * Lbar * Lbar);
}

std::pair<Vec, Vec> prox_saddle(const SagaSaddleProblem& p, double lam,
                                const Vec& x, const Vec& y) {
  return {p.prox_f(x, p.mu_x / (2.0 * lam)),
          p.prox_h(y, p.mu_y / (2.0 * lam))};
}

std::pair<Vec, Vec> saga_sp_solve(const SagaSaddleProblem& p, double eps,
                                  double sigma, std::uint64_t seed, Vec x0,
                                  Vec y0, double safety, SagaReport* report) {
  if (p.m < 1 || static_cast<int>(p.L_G_i.size()) != p.m)
    throw ConfigError("saga_sp_solve: bad component description");
  if (!(p.mu_x > 0) || !(p.mu_y > 0))
    throw ConfigError("saga_sp_solve: mu_x, mu_y must be positive");
  if (!(eps > 0)) throw ConfigError("saga_sp_solve: eps must be positive");
  if (!p.Gx_i || !p.Gy_i || !p.prox_f || !p.prox_h)
    throw ConfigError("saga_sp_solve: missing handles");

  const double L_G =
      std::accumulate(p.L_G_i.begin(), p.L_G_i.end(), 0.0) / p.m;
  const double Lbar = 2.0 * L_G / std::min(p.mu_x, p.mu_y);
  const double eta = saga_sp_eta(p);
  const double lam =
      1.0 / std::max(1.5 * p.m - 1.0, Lbar * Lbar + 3.0 * Lbar * Lbar);
  const double sig = sigma > 0 ? sigma : 0.5;

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(p.L_G_i.begin(), p.L_G_i.end());
  std::uniform_int_distribution<int> resample(0, p.m - 1);
  const double Lsum =
      std::accumulate(p.L_G_i.begin(), p.L_G_i.end(), 0.0);

  // scaled component operator B_i(z) = (1/m) (Gx_i/mu_x, -Gy_i/mu_y)
  auto Bx = [&](int i, const Vec& x, const Vec& y) {
    return Vec(p.Gx_i(i, x, y) / (p.m * p.mu_x));
  };
  auto By = [&](int i, const Vec& x, const Vec& y) {
    return Vec(-p.Gy_i(i, x, y) / (p.m * p.mu_y));
  };

  Vec x = std::move(x0), y = std::move(y0);
  std::vector<Vec> wx(p.m), wy(p.m);
  Vec Wx = Vec::Zero(p.dx), Wy = Vec::Zero(p.dy);
  for (int i = 0; i < p.m; ++i) {
    wx[i] = Bx(i, x, y);
    wy[i] = By(i, x, y);
    Wx += wx[i];
    Wy += wy[i];
  }

  long budget = 0;
  long t = 0;
  const double stop_disp = (eta / 8.0) * std::sqrt(eps);
  while (true) {
    const int i = pick(rng);
    const double pi = p.L_G_i[i] / Lsum;
    const Vec vx = Bx(i, x, y);
    const Vec vy = By(i, x, y);
    const Vec ux = Wx + (vx - wx[i]) / pi;
    const Vec uy = Wy + (vy - wy[i]) / pi;
    auto [xn, yn] = prox_saddle(p, lam, x - lam * ux, y - lam * uy);
    // uniform resample of the stored table entry at the pre-step point
    const int j = resample(rng);
    const Vec njx = Bx(j, x, y);
    const Vec njy = By(j, x, y);
    Wx += njx - wx[j];
    Wy += njy - wy[j];
    wx[j] = njx;
    wy[j] = njy;

    const double disp =
        std::sqrt((xn - x).squaredNorm() + (yn - y).squaredNorm());
    x = xn;
    y = yn;
    ++t;
    if (report && report->keep_iterates) report->iterates.emplace_back(x, y);
    if (budget == 0) {
      const double R2 = std::max(
          1e-12, std::max(disp * disp * 64.0 / (eta * eta), eps));
      budget = static_cast<long>(
          std::ceil(safety * (4.0 / eta) *
                    std::max(1.0, std::log(2.0 * R2 / (eps * sig))))) + 1;
    }
    if (disp <= stop_disp || t >= budget) break;
  }
  if (report) {
    report->iterations = t;
    report->budget = budget;
    report->eta = eta;
    report->lambda = lam;
  }
  return {x, y};
}

}  // namespace saddlekit
