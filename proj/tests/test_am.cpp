#include <doctest.h>

#include <saddlekit/am.hpp>

#include <cmath>
#include <random>

using namespace saddlekit;

namespace {

struct Quad {
  Mat Q;
  Vec q;
  double L, mu;
  CountedOracle oracle(LedgerPtr ledger = nullptr) const {
    Mat Qc = Q;
    Vec qc = q;
    return CountedOracle(
        [Qc, qc](const Vec& x) {
          return Eval{0.5 * x.dot(Qc * x) + qc.dot(x), Qc * x + qc};
        },
        OracleSpec::exact(L, mu), OracleClass::GradF, std::move(ledger), 1,
        Q.rows());
  }
  double value(const Vec& x) const { return 0.5 * x.dot(Q * x) + q.dot(x); }
  Vec minimizer() const { return Q.ldlt().solve(-q); }
};

Quad make_quad(int d, double mu, double L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(M);
  Mat U = qr.householderQ();
  Vec eig(d);
  for (int i = 0; i < d; ++i)
    eig[i] = d == 1 ? L : mu + (L - mu) * i / (d - 1.0);
  Quad p;
  p.Q = U * eig.asDiagonal() * U.transpose();
  p.q = Vec(d);
  for (int i = 0; i < d; ++i) p.q[i] = g(rng);
  p.L = L;
  p.mu = mu;
  return p;
}

ProxSolver exact_quad_prox(const Quad& p) {
  Mat Q = p.Q;
  Vec q = p.q;
  return [Q, q](const Vec& g, const Vec& c, double H, double, double) {
    return quadratic_prox(g, Q, q, H, c);
  };
}

}  // namespace

TEST_CASE("quadratic prox matches the stationarity system") {
  Quad p = make_quad(4, 0.5, 3.0, 1);
  Vec g(4), c(4);
  g << 1, -1, 0.5, 2;
  c << 0.1, 0.2, -0.3, 0;
  double H = 2.0;
  Vec z = quadratic_prox(g, p.Q, p.q, H, c);
  // optimality: g + Qz + q + H (z - c) = 0
  Vec res = g + p.Q * z + p.q + H * (z - c);
  CHECK(res.norm() == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("vacuous subproblem tolerance returns the momentum point") {
  Vec g(2), c(2);
  g << 1, 2;
  c << -1, 3;
  int calls = 0;
  ProxSolver inner = [&](const Vec&, const Vec&, double, double, double) {
    ++calls;
    return Vec(Vec::Zero(2));
  };
  Vec z = am_prox_subproblem(g, c, 1.0,
                             std::numeric_limits<double>::infinity(), 0, inner);
  CHECK((z - c).norm() == 0.0);
  CHECK(calls == 0);
}

TEST_CASE("step size H below twice the smoothness is rejected") {
  Quad p = make_quad(3, 0.5, 2.0, 2);
  AMConfig cfg;
  cfg.H = 3.9;  // needs >= 4
  cfg.max_iter = 5;
  CHECK_THROWS_AS(
      am_run(p.oracle(), CountedOracle::zero(3), exact_quad_prox(Quad{
                 Mat::Zero(3, 3), Vec::Zero(3), 0, 0}),
             cfg, Vec::Zero(3)),
      ConfigError);
}

TEST_CASE("coefficient identity a_k^2 / A_k = 1 / (2H) holds exactly") {
  Quad p = make_quad(3, 0.2, 1.7, 3);
  AMConfig cfg;
  cfg.H = 3.4;
  cfg.max_iter = 400;
  Quad zero{Mat::Zero(3, 3), Vec::Zero(3), 0, 0};
  SolveReport r = am_run(p.oracle(), CountedOracle::zero(3),
                         exact_quad_prox(zero), cfg, Vec::Zero(3));
  REQUIRE(r.A_seq.size() == 400);
  double prev = 0.0;
  for (double A : r.A_seq) {
    double a = A - prev;
    CHECK(std::abs(a * a / A - 1.0 / (2.0 * cfg.H)) <= 1e-12 * A);
    prev = A;
  }
  // growth A_k >= k^2 / (8H) hence the k^-2 value rate
  double k = static_cast<double>(r.A_seq.size());
  CHECK(r.A_seq.back() >= k * k / (8.0 * cfg.H) * (1 - 1e-12));
}

TEST_CASE("meta-iteration obeys the 4 H R^2 / k^2 value bound") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Quad p = make_quad(5, 0.3, 4.0, 100 + seed);
    Vec xstar = p.minimizer();
    double fstar = p.value(xstar);
    Vec x0 = Vec::Ones(5);
    double R2 = (x0 - xstar).squaredNorm();
    AMConfig cfg;
    cfg.H = 2 * p.L;
    cfg.max_iter = 120;
    SolveReport r = am_run(p.oracle(), CountedOracle::zero(5),
                           exact_quad_prox(p), cfg, x0,
                           [&](const Vec& x) { return p.value(x) - fstar; });
    for (const TracePoint& t : r.trace) {
      if (t.k == 0) continue;
      CHECK(t.value <= 4.0 * cfg.H * R2 / (t.k * t.k) + 1e-12);
    }
    CHECK(r.trace.back().value <= 1e-2);  // k^-2 decay, no restarts here
  }
}

TEST_CASE("restarted scheme contracts and stays within the step budget") {
  Quad p = make_quad(4, 0.5, 5.0, 42);
  Vec xstar = p.minimizer();
  Vec x0 = xstar + Vec::Ones(4);
  double R0 = 2.1;  // > |x0 - xstar| = 2
  double H = 2 * p.L;
  double eps = 1e-8;
  double fstar = p.value(xstar);
  SolveReport r = restarted_am(
      p.oracle(), CountedOracle::zero(4), exact_quad_prox(p), H, p.mu, eps,
      0.1, x0, R0, [&](const Vec& x) { return p.value(x) - fstar; });
  CHECK(r.value_gap <= eps);
  double budget = (16.0 * std::sqrt(2.0) * std::sqrt(H / p.mu) + 2.0) *
                  std::log2(p.mu * R0 * R0 / eps);
  CHECK(static_cast<double>(r.iterations) <= budget + 1);
  // each stage halves the distance to the minimizer
  for (std::size_t s = 1; s < r.restarts.size(); ++s) {
    double before = (r.restarts[s - 1] - xstar).norm();
    double after = (r.restarts[s] - xstar).norm();
    CHECK(after <= 0.5 * before + 1e-9);
  }
}

TEST_CASE("measured-stop workhorse reaches the target") {
  Quad p = make_quad(6, 0.4, 3.0, 9);
  Vec xstar = p.minimizer();
  double fstar = p.value(xstar);
  long iters = 0;
  Vec x = ram_minimize(p.oracle(), CountedOracle::zero(6), exact_quad_prox(p),
                       2 * p.L, p.mu, 1e-9, Vec::Zero(6), 2.0, &iters);
  CHECK(p.value(x) - fstar <= 1e-9);
  CHECK(iters > 0);
}

TEST_CASE("tolerance plan: frozen values and budget arithmetic") {
  double eps = 1e-2, sigma = 0.1, mu = 1.0, H = 2.0, R0 = 1.0;
  ToleranceBudget b = plan_tolerances(eps, sigma, 1.0, 1.0, mu, H, R0);
  CHECK(b.eps == eps);
  CHECK(b.sigma == sigma);

  // delta = min over the four branches; here the (L+H)^2 branch is active:
  // eps mu^2 / (864^2 (L+H)^2) with L = L_phi + L_psi = 2, H = 2.
  double c864 = 864.0 * 864.0;
  double branch1 = eps * mu / (c864 * 1.0);
  double branch3 = eps * mu * mu / (c864 * 16.0);
  double branch4 = std::pow(eps, 1.5) / (5.0 * std::sqrt(8.0 * H * R0 * R0));
  CHECK(branch3 < branch1);
  CHECK(branch3 < branch4);
  CHECK(b.delta2 == doctest::Approx(branch3).epsilon(1e-14));
  CHECK(b.delta1 == doctest::Approx(branch3).epsilon(1e-14));
  CHECK(b.eps_f_tilde == doctest::Approx(branch3).epsilon(1e-14));

  // K = ceil(2 log2(mu R0^2 / (4 eps))) = ceil(2 log2 25) = 10
  CHECK(b.K_restarts == 10);
  // N = ceil(sqrt(128 H / mu)) = ceil(16) = 16
  CHECK(b.N_inner == 16);
  CHECK(b.total_iterations == b.K_restarts * b.N_inner);

  // per-call confidence split over the full iteration budget
  double denom = 2.0 * (16.0 * std::sqrt(2.0) * std::sqrt(H / mu) + 2.0) *
                 std::log2(mu * R0 * R0 / eps);
  CHECK(b.sigma0 == doctest::Approx(sigma / denom).epsilon(1e-12));
  CHECK(b.sigma_tilde == doctest::Approx(sigma / denom).epsilon(1e-12));
}

TEST_CASE("tolerance plan: no restarts needed when already inside the ball") {
  ToleranceBudget b = plan_tolerances(1.0, 0.1, 1.0, 0.0, 1.0, 2.0, 1.0);
  CHECK(b.K_restarts == 0);
}
