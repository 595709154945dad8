#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace stclf {

// State/input dimensions in this library are small (n, m <= a handful), so
// vectors use fixed-capacity stack storage to keep evaluation allocation-free.
constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

// Constraint-row-indexed quantities (right-hand sides, multipliers) can
// exceed kMaxDim -- a polytope over m inputs carries 2^(m+1) + 2m rows -- so
// they use heap-backed storage.
using DynVec = Eigen::VectorXd;

// Absolute threshold below which a decay coefficient is treated as exactly
// zero.  Sign-dependent branching (support sets, index sets) must be
// deterministic under floating-point noise.
constexpr double kZeroTol = 1e-12;

// Absolute tolerance for polytope membership and solver witnesses.
constexpr double kFeasTol = 1e-9;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct EvaluatorError : std::runtime_error {
  explicit EvaluatorError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyPolytopeError : std::runtime_error {
  explicit EmptyPolytopeError(const std::string& what) : std::runtime_error(what) {}
};

struct NoBoundExistsError : std::runtime_error {
  explicit NoBoundExistsError(const std::string& what) : std::runtime_error(what) {}
};

struct NonPositiveDwellError : std::runtime_error {
  explicit NonPositiveDwellError(const std::string& what) : std::runtime_error(what) {}
};

struct GeometryInfeasibleError : std::runtime_error {
  explicit GeometryInfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Process exit codes used by the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,      // unusable configuration
  kExitHypothesis = 3,  // problem-setup failure (no bound / non-positive dwell / empty polytope)
  kExitViolation = 4,   // a certified invariant was violated at runtime
};

// Axis-aligned box region of the state space.
struct StateBox {
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vec& x, double tol = 0.0) const {
    for (int i = 0; i < dim(); ++i) {
      if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
    }
    return true;
  }

  Vec clamp(const Vec& x) const {
    Vec y = x;
    for (int i = 0; i < dim(); ++i) {
      if (y[i] < lo[i]) y[i] = lo[i];
      if (y[i] > hi[i]) y[i] = hi[i];
    }
    return y;
  }
};

}  // namespace stclf
