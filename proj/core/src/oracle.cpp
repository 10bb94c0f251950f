#include "saddlekit/oracle.hpp"

#include <cmath>
#include <random>

namespace saddlekit {

CountedOracle sum_oracles(const CountedOracle& a, const CountedOracle& b) {
  if (!a.valid() || !b.valid())
    throw ConfigError("sum_oracles: empty operand");
  if (a.dim() >= 0 && b.dim() >= 0 && a.dim() != b.dim())
    throw ConfigError("sum_oracles: dimension mismatch");
  const Eigen::Index dim = a.dim() >= 0 ? a.dim() : b.dim();
  OracleSpec spec = sum_specs(a.spec(), b.spec());
  const double smooth = a.smoothness() + b.smoothness();
  auto fa = a;
  auto fb = b;
  return CountedOracle(
      [fa, fb](const Vec& x) {
        Eval ea = fa(x);
        Eval eb = fb(x);
        return Eval{ea.value + eb.value, ea.grad + eb.grad};
      },
      spec, a.cls(), nullptr, 0, dim, smooth);
}

CountedOracle max_function_oracle(
    std::function<double(const Vec&, const Vec&)> objective,
    std::function<Vec(const Vec&, const Vec&)> grad_x, double L_F, double mu_y,
    InnerMaxSolver inner, double delta, double sigma, OracleClass cls,
    LedgerPtr ledger, std::uint64_t multiplicity, Eigen::Index dim) {
  if (L_F <= 0 || mu_y <= 0)
    throw ConfigError("max_function_oracle: L_F and mu_y must be positive");
  if (delta < 0 || sigma < 0 || sigma >= 1)
    throw ConfigError("max_function_oracle: need delta >= 0, sigma in [0,1)");
  const double Lg = L_F + 2.0 * L_F * L_F / mu_y;
  OracleSpec spec;
  spec.delta1 = 0.0;
  spec.delta2 = delta;
  spec.sigma0 = sigma;
  spec.L = 2.0 * Lg;
  spec.mu = 0.0;
  return CountedOracle(
      [objective, grad_x, inner, delta, sigma](const Vec& x) {
        Vec y = inner(x, delta / 2.0, sigma);
        return Eval{objective(x, y), grad_x(x, y)};
      },
      spec, cls, std::move(ledger), multiplicity, dim, Lg);
}

EnvelopeCheckResult oracle_envelope_check(
    const CountedOracle& oracle, const std::function<double(const Vec&)>& truth,
    Eigen::Index dim, int samples, std::uint64_t seed, double radius,
    double tol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](double scale) {
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = scale * gauss(rng);
    return v;
  };
  const OracleSpec& s = oracle.spec();
  EnvelopeCheckResult res;
  res.worst_lower = std::numeric_limits<double>::infinity();
  res.worst_upper = std::numeric_limits<double>::infinity();
  for (int t = 0; t < samples; ++t) {
    Vec x = draw(radius);
    Vec z = x + draw(radius);
    Eval e = oracle(x);
    const double model = e.value + e.grad.dot(z - x);
    const double gap = truth(z) - model;
    const double d2 = (z - x).squaredNorm();
    // lower margin: gap - (mu/2 d^2 - delta1) >= -tol
    const double lo = gap - (0.5 * s.mu * d2 - s.delta1);
    // upper margin: (L/2 d^2 + delta2) - gap >= -tol
    const double up = (0.5 * s.L * d2 + s.delta2) - gap;
    res.worst_lower = std::min(res.worst_lower, lo);
    res.worst_upper = std::min(res.worst_upper, up);
    if (lo < -tol || up < -tol) ++res.violations;
  }
  res.ok = res.violations == 0;
  return res;
}

}  // namespace saddlekit
