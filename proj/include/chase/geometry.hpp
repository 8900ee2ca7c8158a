#pragma once

#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "chase/common.hpp"
#include "chase/norms.hpp"

namespace chase {

/// Closed halfspace { x : normal . x <= offset }.
template <typename S>
struct Halfspace {
  Eigen::Matrix<S, Eigen::Dynamic, 1> normal;
  S offset;

  template <typename Derived>
  S violation(const Eigen::MatrixBase<Derived>& x) const {
    return normal.dot(x) - offset;
  }
};

/// Intersection of finitely many halfspaces, A x <= b.
template <typename S>
class HPolytope {
 public:
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

  HPolytope() = default;
  HPolytope(Mat a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() == 0 || a_.rows() != b_.size())
      throw ValidationError("polytope needs matching, nonempty A and b");
    for (Index i = 0; i < a_.rows(); ++i)
      if (a_.row(i).norm() <= S(1e-14))
        throw ValidationError("polytope row " + std::to_string(i) + " has zero normal");
  }

  Index dim() const { return a_.cols(); }
  Index size() const { return a_.rows(); }
  const Mat& a() const { return a_; }
  const Vec& b() const { return b_; }

  Halfspace<S> halfspace(Index i) const { return {a_.row(i).transpose(), b_[i]}; }

  template <typename Derived>
  S max_violation(const Eigen::MatrixBase<Derived>& x) const {
    return ((a_ * x) - b_).maxCoeff();
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x, S tol = S(1e-9)) const {
    return max_violation(x) <= tol;
  }

 private:
  Mat a_;
  Vec b_;
};

using HPolytoped = HPolytope<double>;

/// Feasibility and boundedness certificate produced at validation time.
struct PolytopeCert {
  Vector chebyshev_center;
  double inradius = 0.0;   // Euclidean inradius (0 for flat bodies)
  Vector axis_lo, axis_hi; // certified per-axis ranges
  double radius_bound = 0.0;  // Euclidean bound on ||x||_2 over the body
};

/// Certify that P is nonempty (Chebyshev-center LP) and bounded (per-axis
/// support LPs).  Throws ValidationError when empty, UnboundedError when any
/// axis range escapes the solver's guard box.
PolytopeCert certify(const HPolytoped& p);

/// Circumradius bound from the origin in the ambient norm, from the
/// certified axis ranges.
double circumradius_from_origin(const PolytopeCert& cert, NormTag tag);

struct SupportResult {
  double value = 0.0;
  Vector point;
};

/// h_P(theta) = max theta . x over P, with an attaining witness.  When a
/// certificate is supplied the witness is checked against its radius bound
/// (UnboundedError on violation).
SupportResult support(const HPolytoped& p, const Vector& theta,
                      const PolytopeCert* cert = nullptr, double tol = 1e-8);

/// Euclidean projection onto P (Dykstra's algorithm with closed-form fast
/// paths for boxes and single halfspaces).  The result satisfies all
/// halfspaces within tol_feas = 1e-9 * scale; MaxIterationsError otherwise.
Vector euclid_project(const Vector& x, const HPolytoped& p, double tol_proj = 1e-8);

/// Convex piecewise-linear function f(x) = max_i (a_i . x + c_i).
template <typename S>
class MaxAffine {
 public:
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

  MaxAffine() = default;
  MaxAffine(Mat gradients, Vec intercepts)
      : a_(std::move(gradients)), c_(std::move(intercepts)) {
    if (a_.rows() == 0 || a_.rows() != c_.size())
      throw ValidationError("max-affine needs matching, nonempty pieces");
  }

  Index dim() const { return a_.cols(); }
  Index pieces() const { return a_.rows(); }
  const Mat& gradients() const { return a_; }
  const Vec& intercepts() const { return c_; }

  /// True when some piece is identically zero (a_i = 0, c_i = 0), which
  /// certifies f >= 0 everywhere.
  bool has_zero_piece(S tol = S(1e-14)) const {
    for (Index i = 0; i < a_.rows(); ++i)
      if (a_.row(i).template lpNorm<Eigen::Infinity>() <= tol && std::abs(c_[i]) <= tol)
        return true;
    return false;
  }

  template <typename Derived>
  S value(const Eigen::MatrixBase<Derived>& x) const {
    return (a_ * x + c_).maxCoeff();
  }

  /// Value plus the gradient of an achieving piece (lowest index on ties).
  template <typename Derived>
  std::pair<S, Vec> value_and_subgradient(const Eigen::MatrixBase<Derived>& x) const {
    Vec vals = a_ * x + c_;
    Index best = 0;
    for (Index i = 1; i < vals.size(); ++i)
      if (vals[i] > vals[best]) best = i;
    return {vals[best], a_.row(best).transpose()};
  }

 private:
  Mat a_;
  Vec c_;
};

using MaxAffined = MaxAffine<double>;

}  // namespace chase
