#pragma once

#include "saddlekit/saddle.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace saddlekit {

// Synthetic instance with quadratic f, h and bilinear G:
//
//   f(x)   = 1/2 x'Ax + a'x
//   G(x,y) = x'By,           G_i(x,y) = w_i x'By,  avg w_i = 1
//   h(y)   = 1/2 y'Cy + c'y, h_i(y)   = 1/2 s_i y'Cy + c_i'y, avg s_i = 1
//
// Spectra are placed exactly: eig(A) in [mu_x, L_f], eig(C) in [mu_y, L_h],
// singular values of B bounded by L_G with the top one equal to L_G, so the
// declared constants are exact (L_G = |B|_2, L_G^i = w_i L_G).
struct QuadraticSaddleInstance {
  int dx = 0, dy = 0;
  int m_h = 1, m_G = 1;
  Mat A, B, C;
  Vec a, c;
  std::vector<double> w;      // G component weights
  std::vector<double> s;      // h component curvature weights
  std::vector<Vec> c_i;       // h component linear terms, avg = c
  double L_f = 0, mu_x = 0, L_G = 0, L_h = 0, mu_y = 0;
  std::uint64_t seed = 0;

  double f(const Vec& x) const;
  Vec grad_f(const Vec& x) const;
  double h(const Vec& y) const;
  Vec grad_h(const Vec& y) const;
  double G(const Vec& x, const Vec& y) const;
  double saddle_value(const Vec& x, const Vec& y) const;
};

struct GenerateTargets {
  int dx = 4, dy = 4;
  double L_f = 2.0, mu_x = 0.5;
  double L_G = 1.0;
  double L_h = 2.0, mu_y = 0.5;
  int m_h = 1, m_G = 1;
};

QuadraticSaddleInstance generate(const GenerateTargets& t, std::uint64_t seed);

// Exact saddle point from the stationarity system
//   A x + a + B y = 0,   B'x - C y - c = 0.
std::pair<Vec, Vec> kkt_solve(const QuadraticSaddleInstance& inst);

// Duality gap max_y S(x, y') - min_x' S(x', y) through the closed-form
// partial optima; independent test oracle for every solver.
double brute_force_gap(const QuadraticSaddleInstance& inst, const Vec& x,
                       const Vec& y);

// Saddle value at the exact saddle point.
double saddle_optimum(const QuadraticSaddleInstance& inst);

// Counted-oracle view of an instance.
SaddleProblem make_saddle_problem(const QuadraticSaddleInstance& inst,
                                  LedgerPtr ledger);

// JSON round trip (byte-stable field order).
std::string instance_to_json(const QuadraticSaddleInstance& inst);
QuadraticSaddleInstance instance_from_json(const std::string& text);

}  // namespace saddlekit
