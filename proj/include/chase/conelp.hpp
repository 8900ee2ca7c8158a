#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "chase/common.hpp"

namespace chase {

/// Sparse row of the constraint matrix G in  min c'x  s.t.  Gx + s = h,
/// s in (R_+)^nl x SOC(q_1) x ... x SOC(q_k).
struct SparseRow {
  struct Entry {
    int col;
    double a;
  };
  std::vector<Entry> e;

  void add(int col, double a) {
    if (a != 0.0) e.push_back({col, a});
  }
  double dot(const Vector& x) const {
    double r = 0.0;
    for (const Entry& t : e) r += t.a * x[t.col];
    return r;
  }
  void axpy(double alpha, Vector& out) const {
    if (alpha == 0.0) return;
    for (const Entry& t : e) out[t.col] += alpha * t.a;
  }
};

struct ConeDims {
  Index nl = 0;             // leading nonnegative rows
  std::vector<Index> soc;   // sizes (>= 2) of trailing second-order blocks

  Index total() const {
    Index t = nl;
    for (Index q : soc) t += q;
    return t;
  }
  /// Barrier degree: 1 per LP row, 1 per SOC block.
  Index degree() const { return nl + static_cast<Index>(soc.size()); }
};

struct ConeProblem {
  Index nvar = 0;
  std::vector<SparseRow> rows;  // dims.total() rows: LP block first, then SOCs
  Vector h;
  Vector c;
  ConeDims dims;

  // Structure hints for the block-tridiagonal backend.  group_of_var maps
  // each variable to a path group; any row may only touch one group or two
  // adjacent groups, except rows listed in dense_rows (handled by a low-rank
  // correction).  Leave group_of_var empty when using the dense backend.
  std::vector<int> group_of_var;
  int ngroups = 0;
  std::vector<int> dense_rows;

  void mul_G(const Vector& x, Vector& out) const {
    const Index m = static_cast<Index>(rows.size());
    out.resize(m);
    for (Index i = 0; i < m; ++i) out[i] = rows[i].dot(x);
  }
  void mul_GT(const Vector& y, Vector& out) const {
    out = Vector::Zero(nvar);
    for (size_t i = 0; i < rows.size(); ++i) rows[i].axpy(y[static_cast<Index>(i)], out);
  }
};

/// Nesterov-Todd scaling data for one second-order block.
struct SocScaling {
  double eta = 1.0;       // W = eta * P(v)
  double eta2inv = 1.0;   // 1 / eta^2
  Vector v;               // spectral square root of wbar, det(v) = 1
  Vector jwbar;           // J * wbar; W^-2 = eta2inv * (2 jwbar jwbar' - J)
};

/// Factorization backend for the scaled normal matrix
/// M = G' W^-2 G + reg I restricted to the rows it owns.
class KktBackend {
 public:
  virtual ~KktBackend() = default;
  virtual void prepare(const ConeProblem& p) = 0;
  /// lp_weight[i] = z_i / s_i for the LP rows (= the diagonal of W^-2).
  virtual void factor(const ConeProblem& p, const Vector& lp_weight,
                      const std::vector<SocScaling>& soc) = 0;
  virtual void solve(Vector& b) const = 0;
};

class KktDense final : public KktBackend {
 public:
  void prepare(const ConeProblem& p) override;
  void factor(const ConeProblem& p, const Vector& lp_weight,
              const std::vector<SocScaling>& soc) override;
  void solve(Vector& b) const override;

 private:
  Matrix m_;
  Eigen::LDLT<Matrix> ldlt_;
  Vector scratch_;
};

/// Block-tridiagonal backend for path-structured programs: variables are
/// grouped along the path and every non-listed row touches at most two
/// adjacent groups.  Rows listed in dense_rows (at most a handful, e.g. a
/// level-set budget row spanning the whole path) enter through a
/// Sherman-Morrison-Woodbury correction.
class KktBlockTridiag final : public KktBackend {
 public:
  void prepare(const ConeProblem& p) override;
  void factor(const ConeProblem& p, const Vector& lp_weight,
              const std::vector<SocScaling>& soc) override;
  void solve(Vector& b) const override;

 private:
  void band_solve(Vector& b) const;

  int ng_ = 0;
  std::vector<int> offset_, size_, group_of_, local_of_;
  std::vector<Matrix> diag_;   // D_g, square
  std::vector<Matrix> sub_;    // E_g = block (g, g-1), g >= 1
  std::vector<Eigen::LLT<Matrix>> llt_;
  std::vector<Matrix> xup_;    // X_g = D~_g^-1 E_{g+1}', used by both sweeps

  std::vector<char> is_dense_row_;
  std::vector<Vector> wood_g_;   // dense row directions (as dense vectors)
  std::vector<Vector> wood_q_;   // M_band^-1 g
  std::vector<double> wood_w_;   // row weights
  Matrix wood_cap_;
  mutable Vector tmp_;
};

struct IpmOptions {
  double tol = 1e-8;        // relative gap target
  double feas_tol = 0.0;    // 0 -> derived from tol
  int max_iter = 100;
};

struct WarmStart {
  Vector x;
  Vector z;
};

struct IpmResult {
  bool ok = false;
  int iters = 0;
  double pobj = 0.0;
  double dobj = 0.0;
  double gap_abs = 0.0;
  double resid_p = 0.0;
  double resid_d = 0.0;
  Vector x, s, z;
};

/// Degenerate programs (redundant rows, an objective parallel to a facet
/// normal, repeated identical cost blocks) can leave one residual oscillating
/// just above the strict stopping test while the iterate is optimal to
/// machine precision.  Callers accept such stalls when every convergence
/// measure sits within a small multiple of the requested tolerance.
bool nearly_converged(const IpmResult& res, double tol);

/// Solve the cone program with the given KKT backend.  `warm` optionally
/// seeds x and z (slacks are re-derived and pushed into the cone interior);
/// if a warm-started run fails to converge, one cold restart is attempted
/// before reporting failure.
IpmResult solve_cone(const ConeProblem& p, KktBackend& kkt, const IpmOptions& opt,
                     const WarmStart* warm = nullptr);

/// Convenience wrapper with an internal dense backend.
IpmResult solve_cone_dense(const ConeProblem& p, const IpmOptions& opt,
                           const WarmStart* warm = nullptr);

}  // namespace chase
