#pragma once

#include "saddlekit/types.hpp"

#include <cstdint>
#include <functional>
#include <utility>

namespace saddlekit {

// First-order inexactness certificate.  An oracle with spec (delta1, delta2,
// sigma0, L, mu) returns, with probability >= 1 - sigma0, a pair (v, g) such
// that for all z
//
//   mu/2 |z-x|^2 - delta1  <=  F(z) - v - <g, z-x>  <=  L/2 |z-x|^2 + delta2.
//
// Exact oracles have delta1 = delta2 = sigma0 = 0 and L equal to the true
// smoothness constant.  Max-type oracles built from inner solves carry
// L = 2 * (true smoothness); the underlying smoothness is tracked separately
// on the oracle itself.
struct OracleSpec {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double sigma0 = 0.0;
  double L = 0.0;
  double mu = 0.0;

  static OracleSpec exact(double L, double mu = 0.0) {
    OracleSpec s;
    s.L = L;
    s.mu = mu;
    return s;
  }
};

// Componentwise combination rule for sums F = F_a + F_b: deltas add, failure
// probabilities add (clamped at 1), L and mu add.
inline OracleSpec sum_specs(const OracleSpec& a, const OracleSpec& b) {
  OracleSpec s;
  s.delta1 = a.delta1 + b.delta1;
  s.delta2 = a.delta2 + b.delta2;
  s.sigma0 = std::min(1.0, a.sigma0 + b.sigma0);
  s.L = a.L + b.L;
  s.mu = a.mu + b.mu;
  return s;
}

struct Eval {
  double value = 0.0;
  Vec grad;
};

// A first-order oracle that increments a shared ledger on every call.  One
// logical call may stand for `multiplicity` component evaluations (e.g. a full
// gradient of an m-term finite sum counts m).
class CountedOracle {
 public:
  using Fn = std::function<Eval(const Vec&)>;

  CountedOracle() = default;
  CountedOracle(Fn fn, OracleSpec spec, OracleClass cls, LedgerPtr ledger,
                std::uint64_t multiplicity = 1, Eigen::Index dim = -1,
                double smoothness = -1.0)
      : fn_(std::move(fn)),
        spec_(spec),
        cls_(cls),
        ledger_(std::move(ledger)),
        mult_(multiplicity),
        dim_(dim),
        smooth_(smoothness >= 0 ? smoothness : spec.L) {}

  // An oracle for the zero function; never counts.
  static CountedOracle zero(Eigen::Index dim = -1) {
    return CountedOracle(
        [](const Vec& x) { return Eval{0.0, Vec::Zero(x.size())}; },
        OracleSpec{}, OracleClass::GradF, nullptr, 0, dim, 0.0);
  }

  Eval operator()(const Vec& x) const {
    if (!fn_) throw ConfigError("CountedOracle: empty oracle evaluated");
    if (dim_ >= 0 && x.size() != dim_)
      throw ConfigError("CountedOracle: dimension mismatch");
    if (ledger_ && mult_ > 0) ledger_->add(cls_, mult_);
    return fn_(x);
  }

  bool valid() const { return static_cast<bool>(fn_); }
  const OracleSpec& spec() const { return spec_; }
  OracleClass cls() const { return cls_; }
  Eigen::Index dim() const { return dim_; }
  // True smoothness of the underlying function (envelope L may be twice it).
  double smoothness() const { return smooth_; }
  const LedgerPtr& ledger() const { return ledger_; }

 private:
  Fn fn_;
  OracleSpec spec_;
  OracleClass cls_ = OracleClass::GradF;
  LedgerPtr ledger_;
  std::uint64_t mult_ = 1;
  Eigen::Index dim_ = -1;
  double smooth_ = 0.0;
};

// Oracle for F_a + F_b.  Counting happens through the summand oracles; the
// sum itself adds no extra ledger entries.
CountedOracle sum_oracles(const CountedOracle& a, const CountedOracle& b);

// Inexact max-function oracle for g(x) = max_y { F(x, y) - w(y) } where
// F(., y) has smoothness L_F in x and w is mu_y-strongly convex.  `objective`
// evaluates F(x, y) - w(y), `grad_x` evaluates the partial x-gradient of F.
// The inner solver must return y with objective gap <= inner_eps with
// probability >= 1 - sigma (in function value).  The result is a
// (0, delta, sigma, 2 Lg)-oracle with Lg = L_F + 2 L_F^2 / mu_y.
using InnerMaxSolver =
    std::function<Vec(const Vec& x, double inner_eps, double sigma)>;

CountedOracle max_function_oracle(
    std::function<double(const Vec&, const Vec&)> objective,
    std::function<Vec(const Vec&, const Vec&)> grad_x, double L_F, double mu_y,
    InnerMaxSolver inner, double delta, double sigma, OracleClass cls,
    LedgerPtr ledger, std::uint64_t multiplicity = 1, Eigen::Index dim = -1);

// Empirical validation of the oracle envelope against ground truth values.
// Draws `samples` base points and displacement points from seeded gaussians
// and checks both envelope inequalities with additive slack `tol`.
struct EnvelopeCheckResult {
  bool ok = true;
  int violations = 0;
  double worst_lower = 0.0;  // most negative margin of the lower inequality
  double worst_upper = 0.0;  // most negative margin of the upper inequality
};

EnvelopeCheckResult oracle_envelope_check(
    const CountedOracle& oracle, const std::function<double(const Vec&)>& truth,
    Eigen::Index dim, int samples, std::uint64_t seed, double radius = 1.0,
    double tol = 1e-9);

}  // namespace saddlekit
