#pragma once

#include <Eigen/Dense>

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

namespace saddlekit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown on invalid parameters / malformed configuration.  The CLI maps this
// to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iteration budget is exhausted before the target accuracy is
// certified.  The CLI maps this to exit code 3.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

enum class OracleClass : int {
  GradF = 0,   // gradient of f (one component)
  GradH = 1,   // gradient of one h_i component
  GradXG = 2,  // partial x-gradient of one G_i component
  GradYG = 3,  // partial y-gradient of one G_i component
  ProxF = 4,   // proximal step w.r.t. f
  ProxH = 5,   // proximal step w.r.t. h
};

inline constexpr int kNumOracleClasses = 6;

inline const char* oracle_class_name(OracleClass c) {
  switch (c) {
    case OracleClass::GradF: return "grad_f";
    case OracleClass::GradH: return "grad_h";
    case OracleClass::GradXG: return "grad_xg";
    case OracleClass::GradYG: return "grad_yg";
    case OracleClass::ProxF: return "prox_f";
    case OracleClass::ProxH: return "prox_h";
  }
  return "?";
}

// Plain snapshot of per-class call counts.
struct Counts {
  std::array<std::uint64_t, kNumOracleClasses> c{};

  std::uint64_t operator[](OracleClass k) const {
    return c[static_cast<int>(k)];
  }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto v : c) s += v;
    return s;
  }
  Counts& operator+=(const Counts& o) {
    for (int i = 0; i < kNumOracleClasses; ++i) c[i] += o.c[i];
    return *this;
  }
  Counts operator-(const Counts& o) const {
    Counts r;
    for (int i = 0; i < kNumOracleClasses; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
};

// Shared monotone counters, safe for concurrent increments.  Always held by
// shared_ptr; every oracle constructed from the same problem instance shares
// one ledger.
class CallLedger {
 public:
  void add(OracleClass k, std::uint64_t n = 1) {
    c_[static_cast<int>(k)].fetch_add(n, std::memory_order_relaxed);
  }
  std::uint64_t get(OracleClass k) const {
    return c_[static_cast<int>(k)].load(std::memory_order_relaxed);
  }
  Counts snapshot() const {
    Counts s;
    for (int i = 0; i < kNumOracleClasses; ++i)
      s.c[i] = c_[i].load(std::memory_order_relaxed);
    return s;
  }
  void reset() {
    for (auto& a : c_) a.store(0, std::memory_order_relaxed);
  }

 private:
  std::array<std::atomic<std::uint64_t>, kNumOracleClasses> c_{};
};

using LedgerPtr = std::shared_ptr<CallLedger>;

inline LedgerPtr make_ledger() { return std::make_shared<CallLedger>(); }

}  // namespace saddlekit
