#include "saddlekit/problems.hpp"

#include <json.hpp>

#include <cmath>
#include <random>

namespace saddlekit {

namespace {

Mat random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = gauss(rng);
  Eigen::HouseholderQR<Mat> qr(M);
  Mat Q = qr.householderQ();
  // fix signs for reproducibility
  Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

Mat spd_with_spectrum(int d, double lo, double hi, std::mt19937_64& rng) {
  Vec eig(d);
  if (d == 1) {
    eig[0] = lo;
  } else {
    for (int i = 0; i < d; ++i)
      eig[i] = lo + (hi - lo) * static_cast<double>(i) / (d - 1);
  }
  Mat Q = random_orthogonal(d, rng);
  Mat M = Q * eig.asDiagonal() * Q.transpose();
  return 0.5 * (M + M.transpose());
}

std::vector<double> weights_avg_one(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.5, 1.5);
  std::vector<double> w(m);
  double sum = 0;
  for (auto& v : w) sum += (v = uni(rng));
  for (auto& v : w) v *= m / sum;
  return w;
}

}  // namespace

double QuadraticSaddleInstance::f(const Vec& x) const {
  return 0.5 * x.dot(A * x) + a.dot(x);
}
Vec QuadraticSaddleInstance::grad_f(const Vec& x) const { return A * x + a; }
double QuadraticSaddleInstance::h(const Vec& y) const {
  return 0.5 * y.dot(C * y) + c.dot(y);
}
Vec QuadraticSaddleInstance::grad_h(const Vec& y) const { return C * y + c; }
double QuadraticSaddleInstance::G(const Vec& x, const Vec& y) const {
  return x.dot(B * y);
}
double QuadraticSaddleInstance::saddle_value(const Vec& x, const Vec& y) const {
  return f(x) + G(x, y) - h(y);
}

QuadraticSaddleInstance generate(const GenerateTargets& t, std::uint64_t seed) {
  if (t.dx < 1 || t.dy < 1) throw ConfigError("generate: dimensions must be >= 1");
  if (!(t.mu_x > 0) || !(t.mu_y > 0))
    throw ConfigError("generate: mu_x and mu_y must be positive");
  if (t.L_f < t.mu_x || t.L_h < t.mu_y)
    throw ConfigError("generate: need L_f >= mu_x and L_h >= mu_y");
  if (!(t.L_G > 0)) throw ConfigError("generate: L_G must be positive");
  if (t.m_h < 1 || t.m_G < 1) throw ConfigError("generate: m_h, m_G >= 1");
  if (t.dx == 1 && t.L_f != t.mu_x)
    throw ConfigError("generate: dx == 1 forces L_f == mu_x");
  if (t.dy == 1 && t.L_h != t.mu_y)
    throw ConfigError("generate: dy == 1 forces L_h == mu_y");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  QuadraticSaddleInstance inst;
  inst.dx = t.dx;
  inst.dy = t.dy;
  inst.m_h = t.m_h;
  inst.m_G = t.m_G;
  inst.seed = seed;
  inst.L_f = t.L_f;
  inst.mu_x = t.mu_x;
  inst.L_G = t.L_G;
  inst.L_h = t.L_h;
  inst.mu_y = t.mu_y;

  inst.A = spd_with_spectrum(t.dx, t.mu_x, t.L_f, rng);
  inst.C = spd_with_spectrum(t.dy, t.mu_y, t.L_h, rng);

  const int k = std::min(t.dx, t.dy);
  Vec sv(k);
  sv[0] = t.L_G;
  for (int i = 1; i < k; ++i)
    sv[i] = t.L_G * (0.3 + 0.7 * static_cast<double>(k - 1 - i) / (k - 1));
  Mat U = random_orthogonal(t.dx, rng).leftCols(k);
  Mat V = random_orthogonal(t.dy, rng).leftCols(k);
  inst.B = U * sv.asDiagonal() * V.transpose();

  inst.a = Vec(t.dx);
  for (int i = 0; i < t.dx; ++i) inst.a[i] = gauss(rng);
  inst.c = Vec(t.dy);
  for (int i = 0; i < t.dy; ++i) inst.c[i] = gauss(rng);

  inst.w = weights_avg_one(t.m_G, rng);
  inst.s = weights_avg_one(t.m_h, rng);
  inst.c_i.resize(t.m_h);
  Mat noise(t.dy, t.m_h);
  for (int j = 0; j < t.m_h; ++j)
    for (int i = 0; i < t.dy; ++i) noise(i, j) = gauss(rng);
  const Vec noise_mean = noise.rowwise().mean();
  for (int j = 0; j < t.m_h; ++j)
    inst.c_i[j] = inst.c + (noise.col(j) - noise_mean);
  return inst;
}

std::pair<Vec, Vec> kkt_solve(const QuadraticSaddleInstance& inst) {
  const int n = inst.dx + inst.dy;
  Mat K = Mat::Zero(n, n);
  K.topLeftCorner(inst.dx, inst.dx) = inst.A;
  K.topRightCorner(inst.dx, inst.dy) = inst.B;
  K.bottomLeftCorner(inst.dy, inst.dx) = inst.B.transpose();
  K.bottomRightCorner(inst.dy, inst.dy) = -inst.C;
  Vec rhs(n);
  rhs.head(inst.dx) = -inst.a;
  rhs.tail(inst.dy) = inst.c;
  Vec z = K.fullPivLu().solve(rhs);
  return {z.head(inst.dx), z.tail(inst.dy)};
}

double brute_force_gap(const QuadraticSaddleInstance& inst, const Vec& x,
                       const Vec& y) {
  // max over y' at fixed x
  const Vec r = inst.B.transpose() * x - inst.c;
  const Vec y_star = inst.C.ldlt().solve(r);
  const double phi_max = inst.f(x) + 0.5 * r.dot(y_star);
  // min over x' at fixed y
  const Vec x_star = inst.A.ldlt().solve(-(inst.a + inst.B * y));
  const double psi_min =
      inst.f(x_star) + x_star.dot(inst.B * y) - inst.h(y);
  return phi_max - psi_min;
}

double saddle_optimum(const QuadraticSaddleInstance& inst) {
  auto [xs, ys] = kkt_solve(inst);
  return inst.saddle_value(xs, ys);
}

SaddleProblem make_saddle_problem(const QuadraticSaddleInstance& inst,
                                  LedgerPtr ledger) {
  SaddleProblem p;
  p.dx = inst.dx;
  p.dy = inst.dy;
  p.m_h = inst.m_h;
  p.m_G = inst.m_G;
  p.L_f = inst.L_f;
  p.mu_x = inst.mu_x;
  p.L_G = inst.L_G;
  p.L_h = inst.L_h;
  p.mu_y = inst.mu_y;
  p.L_G_i.resize(inst.m_G);
  for (int i = 0; i < inst.m_G; ++i) p.L_G_i[i] = inst.w[i] * inst.L_G;
  p.ledger = ledger;

  auto in = std::make_shared<QuadraticSaddleInstance>(inst);
  p.f_val = [in](const Vec& x) { return in->f(x); };
  p.f_grad = [in, ledger](const Vec& x) {
    ledger->add(OracleClass::GradF);
    return in->grad_f(x);
  };
  p.h_val = [in](const Vec& y) { return in->h(y); };
  p.h_grad = [in, ledger](const Vec& y) {
    ledger->add(OracleClass::GradH, in->m_h);
    return in->grad_h(y);
  };
  p.G_val = [in](const Vec& x, const Vec& y) { return in->G(x, y); };
  p.Gx = [in, ledger](const Vec&, const Vec& y) {
    ledger->add(OracleClass::GradXG, in->m_G);
    return Vec(in->B * y);
  };
  p.Gy = [in, ledger](const Vec& x, const Vec&) {
    ledger->add(OracleClass::GradYG, in->m_G);
    return Vec(in->B.transpose() * x);
  };
  p.Gx_i = [in, ledger](int i, const Vec&, const Vec& y) {
    ledger->add(OracleClass::GradXG);
    return Vec(in->w[i] * (in->B * y));
  };
  p.Gy_i = [in, ledger](int i, const Vec& x, const Vec&) {
    ledger->add(OracleClass::GradYG);
    return Vec(in->w[i] * (in->B.transpose() * x));
  };
  p.h_grad_i = [in, ledger](int i, const Vec& y) {
    ledger->add(OracleClass::GradH);
    return Vec(in->s[i] * (in->C * y) + in->c_i[i]);
  };
  p.prox_f = [in, ledger](const Vec& xp, double c2) {
    ledger->add(OracleClass::ProxF);
    Mat M = in->A;
    M.diagonal().array() += 2.0 * c2;
    return Vec(M.ldlt().solve(2.0 * c2 * xp - in->a));
  };
  p.prox_h = [in, ledger](const Vec& yp, double c2) {
    ledger->add(OracleClass::ProxH);
    Mat M = in->C;
    M.diagonal().array() += 2.0 * c2;
    return Vec(M.ldlt().solve(2.0 * c2 * yp - in->c));
  };
  return p;
}

namespace {

nlohmann::ordered_json mat_to_json(const Mat& M) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

Mat mat_from_json(const nlohmann::json& j) {
  const auto r = j.size();
  const auto c = r ? j[0].size() : 0;
  Mat M(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < c; ++k) M(i, k) = j[i][k].get<double>();
  return M;
}

nlohmann::ordered_json vec_to_json(const Vec& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const nlohmann::json& j) {
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

std::string instance_to_json(const QuadraticSaddleInstance& inst) {
  nlohmann::ordered_json j;
  j["dx"] = inst.dx;
  j["dy"] = inst.dy;
  j["m_h"] = inst.m_h;
  j["m_G"] = inst.m_G;
  j["L_f"] = inst.L_f;
  j["mu_x"] = inst.mu_x;
  j["L_G"] = inst.L_G;
  j["L_h"] = inst.L_h;
  j["mu_y"] = inst.mu_y;
  j["seed"] = inst.seed;
  j["A"] = mat_to_json(inst.A);
  j["B"] = mat_to_json(inst.B);
  j["C"] = mat_to_json(inst.C);
  j["a"] = vec_to_json(inst.a);
  j["c"] = vec_to_json(inst.c);
  j["w"] = inst.w;
  j["s"] = inst.s;
  nlohmann::ordered_json ci = nlohmann::ordered_json::array();
  for (const auto& v : inst.c_i) ci.push_back(vec_to_json(v));
  j["c_i"] = ci;
  return j.dump(2);
}

QuadraticSaddleInstance instance_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("instance_from_json: ") + e.what());
  }
  QuadraticSaddleInstance inst;
  try {
    inst.dx = j.at("dx").get<int>();
    inst.dy = j.at("dy").get<int>();
    inst.m_h = j.at("m_h").get<int>();
    inst.m_G = j.at("m_G").get<int>();
    inst.L_f = j.at("L_f").get<double>();
    inst.mu_x = j.at("mu_x").get<double>();
    inst.L_G = j.at("L_G").get<double>();
    inst.L_h = j.at("L_h").get<double>();
    inst.mu_y = j.at("mu_y").get<double>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.A = mat_from_json(j.at("A"));
    inst.B = mat_from_json(j.at("B"));
    inst.C = mat_from_json(j.at("C"));
    inst.a = vec_from_json(j.at("a"));
    inst.c = vec_from_json(j.at("c"));
    inst.w = j.at("w").get<std::vector<double>>();
    inst.s = j.at("s").get<std::vector<double>>();
    for (const auto& v : j.at("c_i")) inst.c_i.push_back(vec_from_json(v));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("instance_from_json: ") + e.what());
  }
  if (inst.A.rows() != inst.dx || inst.C.rows() != inst.dy ||
      inst.B.rows() != inst.dx || inst.B.cols() != inst.dy ||
      static_cast<int>(inst.w.size()) != inst.m_G ||
      static_cast<int>(inst.s.size()) != inst.m_h)
    throw ConfigError("instance_from_json: inconsistent shapes");
  return inst;
}

}  // namespace saddlekit
