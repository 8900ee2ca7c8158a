#include "chase/conelp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace chase {

namespace {

struct SocLayout {
  Index off;
  Index q;
};

std::vector<SocLayout> soc_layout(const ConeDims& dims) {
  std::vector<SocLayout> blocks;
  Index off = dims.nl;
  for (Index q : dims.soc) {
    blocks.push_back({off, q});
    off += q;
  }
  return blocks;
}

double jdot(const Eigen::Ref<const Vector>& u) {
  return u[0] * u[0] - u.tail(u.size() - 1).squaredNorm();
}

// Enumerate the rank-1 terms of G' W^-2 G.  For every term, calls
// fn(weight, entries) where entries is a column/value list.  SOC blocks
// contribute one synthetic merged row plus sign-flipped copies of their own
// rows; see SocScaling.  Rows flagged in `skip` are left out.
template <class Fn>
void for_each_rank1(const ConeProblem& p, const Vector& lp_weight,
                    const std::vector<SocScaling>& soc, const std::vector<char>& skip,
                    std::vector<SparseRow::Entry>& scratch, std::vector<int>& stamp,
                    std::vector<double>& acc, Fn&& fn) {
  for (Index i = 0; i < p.dims.nl; ++i) {
    if (!skip.empty() && skip[i]) continue;
    fn(lp_weight[i], p.rows[i].e);
  }
  Index off = p.dims.nl;
  if (stamp.size() < static_cast<size_t>(p.nvar)) {
    stamp.assign(p.nvar, -1);
    acc.assign(p.nvar, 0.0);
  }
  for (size_t b = 0; b < p.dims.soc.size(); ++b) {
    const Index q = p.dims.soc[b];
    const SocScaling& sc = soc[b];
    // ghat = sum_k (J wbar)_k g_k, merged over the block's rows.
    scratch.clear();
    for (Index k = 0; k < q; ++k) {
      double w = sc.jwbar[k];
      for (const SparseRow::Entry& t : p.rows[off + k].e) {
        if (stamp[t.col] != static_cast<int>(b) + 1000000) {
          stamp[t.col] = static_cast<int>(b) + 1000000;
          acc[t.col] = 0.0;
          scratch.push_back({t.col, 0.0});
        }
        acc[t.col] += w * t.a;
      }
    }
    for (SparseRow::Entry& t : scratch) t.a = acc[t.col];
    fn(2.0 * sc.eta2inv, scratch);
    fn(-sc.eta2inv, p.rows[off].e);
    for (Index k = 1; k < q; ++k) fn(sc.eta2inv, p.rows[off + k].e);
    off += q;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Dense KKT backend

void KktDense::prepare(const ConeProblem& p) {
  m_.resize(p.nvar, p.nvar);
  scratch_.resize(p.nvar);
}

void KktDense::factor(const ConeProblem& p, const Vector& lp_weight,
                      const std::vector<SocScaling>& soc) {
  m_.setZero(p.nvar, p.nvar);
  std::vector<char> no_skip;
  std::vector<SparseRow::Entry> scratch;
  std::vector<int> stamp;
  std::vector<double> acc;
  for_each_rank1(p, lp_weight, soc, no_skip, scratch, stamp, acc,
                 [&](double w, const std::vector<SparseRow::Entry>& ent) {
                   for (const auto& ti : ent)
                     for (const auto& tj : ent) m_(ti.col, tj.col) += w * ti.a * tj.a;
                 });
  double reg = 1e-12 * (1.0 + m_.trace() / double(p.nvar));
  for (int attempt = 0; attempt < 4; ++attempt) {
    Matrix mm = m_;
    mm.diagonal().array() += reg;
    ldlt_.compute(mm);
    if (ldlt_.info() == Eigen::Success && ldlt_.isPositive()) return;
    reg *= 1e4;
  }
}

void KktDense::solve(Vector& b) const { b = ldlt_.solve(b); }

// ---------------------------------------------------------------------------
// Block-tridiagonal KKT backend

void KktBlockTridiag::prepare(const ConeProblem& p) {
  ng_ = p.ngroups;
  size_.assign(ng_, 0);
  group_of_.resize(p.nvar);
  local_of_.resize(p.nvar);
  for (Index v = 0; v < p.nvar; ++v) {
    int g = p.group_of_var[v];
    group_of_[v] = g;
    local_of_[v] = size_[g]++;
  }
  offset_.assign(ng_, 0);
  for (int g = 1; g < ng_; ++g) offset_[g] = offset_[g - 1] + size_[g - 1];
  diag_.resize(ng_);
  sub_.resize(ng_);
  llt_.resize(ng_);
  xup_.resize(ng_);
  for (int g = 0; g < ng_; ++g) {
    diag_[g].resize(size_[g], size_[g]);
    if (g > 0) sub_[g].resize(size_[g], size_[g - 1]);
  }
  is_dense_row_.assign(p.rows.size(), 0);
  for (int r : p.dense_rows) is_dense_row_[r] = 1;
  wood_g_.clear();
  for (int r : p.dense_rows) {
    Vector g = Vector::Zero(p.nvar);
    for (const auto& t : p.rows[r].e) g[t.col] += t.a;
    wood_g_.push_back(std::move(g));
  }
  wood_q_.resize(wood_g_.size());
  wood_w_.resize(wood_g_.size());
  tmp_.resize(p.nvar);
}

void KktBlockTridiag::factor(const ConeProblem& p, const Vector& lp_weight,
                             const std::vector<SocScaling>& soc) {
  for (int g = 0; g < ng_; ++g) {
    diag_[g].setZero();
    if (g > 0) sub_[g].setZero();
  }
  std::vector<SparseRow::Entry> scratch;
  std::vector<int> stamp;
  std::vector<double> acc;
  double trace = 0.0;
  for_each_rank1(p, lp_weight, soc, is_dense_row_, scratch, stamp, acc,
                 [&](double w, const std::vector<SparseRow::Entry>& ent) {
                   for (const auto& ti : ent) {
                     trace += w * ti.a * ti.a;
                     for (const auto& tj : ent) {
                       int gi = group_of_[ti.col], gj = group_of_[tj.col];
                       double v = w * ti.a * tj.a;
                       if (gi == gj) diag_[gi](local_of_[ti.col], local_of_[tj.col]) += v;
                       else if (gi == gj + 1) sub_[gi](local_of_[ti.col], local_of_[tj.col]) += v;
                       // gi == gj - 1 is the transpose entry, filled by symmetry
                     }
                   }
                 });
  const Index n = p.nvar;
  double reg = 1e-12 * (1.0 + trace / double(n));
  for (int attempt = 0;; ++attempt) {
    bool ok = true;
    for (int g = 0; g < ng_ && ok; ++g) {
      Matrix s = diag_[g];
      s.diagonal().array() += reg;
      if (g > 0) s.noalias() -= sub_[g] * xup_[g - 1];
      llt_[g].compute(s);
      if (llt_[g].info() != Eigen::Success) ok = false;
      else if (g + 1 < ng_) xup_[g] = llt_[g].solve(sub_[g + 1].transpose());
    }
    if (ok) break;
    reg *= 1e4;
    if (attempt >= 5) break;  // proceed with best effort
  }
  // Low-rank correction for the dense rows.
  const int k = static_cast<int>(wood_g_.size());
  if (k > 0) {
    Matrix cap(k, k);
    for (int i = 0; i < k; ++i) {
      wood_w_[i] = lp_weight[p.dense_rows[i]];
      wood_q_[i] = wood_g_[i];
      band_solve(wood_q_[i]);
    }
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        cap(i, j) = (i == j ? 1.0 : 0.0) + wood_w_[i] * wood_g_[i].dot(wood_q_[j]);
    wood_cap_ = cap;
  }
}

void KktBlockTridiag::band_solve(Vector& b) const {
  for (int g = 1; g < ng_; ++g)
    b.segment(offset_[g], size_[g]).noalias() -=
        xup_[g - 1].transpose() * b.segment(offset_[g - 1], size_[g - 1]);
  for (int g = 0; g < ng_; ++g) {
    auto seg = b.segment(offset_[g], size_[g]);
    seg = llt_[g].solve(seg.eval());
  }
  for (int g = ng_ - 2; g >= 0; --g)
    b.segment(offset_[g], size_[g]).noalias() -= xup_[g] * b.segment(offset_[g + 1], size_[g + 1]);
}

void KktBlockTridiag::solve(Vector& b) const {
  band_solve(b);
  const int k = static_cast<int>(wood_g_.size());
  if (k == 0) return;
  if (k == 1) {
    double gy = wood_g_[0].dot(b);
    double denom = 1.0 + wood_w_[0] * wood_g_[0].dot(wood_q_[0]);
    b.noalias() -= wood_q_[0] * (wood_w_[0] * gy / denom);
    return;
  }
  Vector rhs(k);
  for (int i = 0; i < k; ++i) rhs[i] = wood_w_[i] * wood_g_[i].dot(b);
  Vector alpha = wood_cap_.partialPivLu().solve(rhs);
  for (int i = 0; i < k; ++i) b.noalias() -= wood_q_[i] * alpha[i];
}

// ---------------------------------------------------------------------------
// Interior-point driver

namespace {

struct ConeState {
  const ConeDims* dims;
  std::vector<SocLayout> blocks;
  Vector lam;                     // scaled point, lam = W z = W^-1 s
  Vector lp_w2;                   // z_i / s_i on LP rows
  std::vector<SocScaling> soc;

  void init(const ConeDims& d) {
    dims = &d;
    blocks = soc_layout(d);
    lam.resize(d.total());
    lp_w2.resize(d.total());
    soc.resize(blocks.size());
  }

  bool update(const Vector& s, const Vector& z) {
    const Index nl = dims->nl;
    for (Index i = 0; i < nl; ++i) {
      if (s[i] <= 0.0 || z[i] <= 0.0) return false;
      lp_w2[i] = z[i] / s[i];
      lam[i] = std::sqrt(s[i] * z[i]);
    }
    for (size_t b = 0; b < blocks.size(); ++b) {
      const Index off = blocks[b].off, q = blocks[b].q;
      auto sb = s.segment(off, q);
      auto zb = z.segment(off, q);
      double ds = jdot(sb), dz = jdot(zb);
      if (ds <= 0.0 || dz <= 0.0 || sb[0] <= 0.0 || zb[0] <= 0.0) return false;
      double ss = std::sqrt(ds), zz = std::sqrt(dz);
      Vector sbar = sb / ss, zbar = zb / zz;
      double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
      Vector wbar = sbar;
      wbar[0] += zbar[0];
      wbar.tail(q - 1) -= zbar.tail(q - 1);
      wbar /= 2.0 * gamma;
      SocScaling& sc = soc[b];
      sc.eta = std::sqrt(ss / zz);
      sc.eta2inv = zz / ss;
      sc.jwbar = wbar;
      sc.jwbar.tail(q - 1) *= -1.0;
      sc.v = wbar;
      sc.v[0] += 1.0;
      sc.v /= std::sqrt(2.0 * (wbar[0] + 1.0));
      // lam = W z = eta (2 v (v'z) - J z)
      auto lb = lam.segment(off, q);
      double vz = sc.v.dot(zb);
      lb = 2.0 * vz * sc.v;
      lb[0] -= zb[0];
      lb.tail(q - 1) += zb.tail(q - 1);
      lb *= sc.eta;
    }
    return true;
  }

  // out = W^-1 u  (also = W^-T u; W is symmetric).
  void apply_winv(const Vector& u, Vector& out) const {
    const Index nl = dims->nl;
    out.resize(u.size());
    for (Index i = 0; i < nl; ++i) out[i] = std::sqrt(lp_w2[i]) * u[i];
    for (size_t b = 0; b < blocks.size(); ++b) {
      const Index off = blocks[b].off, q = blocks[b].q;
      const SocScaling& sc = soc[b];
      auto ub = u.segment(off, q);
      auto ob = out.segment(off, q);
      // W^-1 u = eta^-1 (2 (Jv)((Jv)'u) - J u)
      double jvu = sc.v[0] * ub[0] - sc.v.tail(q - 1).dot(ub.tail(q - 1));
      ob = 2.0 * jvu * sc.v;
      ob.tail(q - 1) *= -1.0;
      ob[0] -= ub[0];
      ob.tail(q - 1) += ub.tail(q - 1);
      ob /= sc.eta;
    }
  }

  void apply_w(const Vector& u, Vector& out) const {
    const Index nl = dims->nl;
    out.resize(u.size());
    for (Index i = 0; i < nl; ++i) out[i] = u[i] / std::sqrt(lp_w2[i]);
    for (size_t b = 0; b < blocks.size(); ++b) {
      const Index off = blocks[b].off, q = blocks[b].q;
      const SocScaling& sc = soc[b];
      auto ub = u.segment(off, q);
      auto ob = out.segment(off, q);
      double vu = sc.v.dot(ub);
      ob = 2.0 * vu * sc.v;
      ob[0] -= ub[0];
      ob.tail(q - 1) += ub.tail(q - 1);
      ob *= sc.eta;
    }
  }

  // out = W^-2 u = eta^-2 (2 jwbar (jwbar'u) - J u) blockwise.
  void apply_winv2(const Vector& u, Vector& out) const {
    const Index nl = dims->nl;
    out.resize(u.size());
    for (Index i = 0; i < nl; ++i) out[i] = lp_w2[i] * u[i];
    for (size_t b = 0; b < blocks.size(); ++b) {
      const Index off = blocks[b].off, q = blocks[b].q;
      const SocScaling& sc = soc[b];
      auto ub = u.segment(off, q);
      auto ob = out.segment(off, q);
      double ju = sc.jwbar.dot(ub);
      ob = 2.0 * ju * sc.jwbar;
      ob[0] -= ub[0];
      ob.tail(q - 1) += ub.tail(q - 1);
      ob *= sc.eta2inv;
    }
  }

  // out = u o v (Jordan product).
  void jordan_prod(const Vector& u, const Vector& v, Vector& out) const {
    const Index nl = dims->nl;
    out.resize(u.size());
    for (Index i = 0; i < nl; ++i) out[i] = u[i] * v[i];
    for (const SocLayout& blk : blocks) {
      auto ub = u.segment(blk.off, blk.q);
      auto vb = v.segment(blk.off, blk.q);
      auto ob = out.segment(blk.off, blk.q);
      double dot = ub.dot(vb);
      ob.tail(blk.q - 1) = ub[0] * vb.tail(blk.q - 1) + vb[0] * ub.tail(blk.q - 1);
      ob[0] = dot;
    }
  }

  // out = lam \ d  (solve lam o out = d).
  void jordan_div(const Vector& d, Vector& out) const {
    const Index nl = dims->nl;
    out.resize(d.size());
    for (Index i = 0; i < nl; ++i) out[i] = d[i] / lam[i];
    for (const SocLayout& blk : blocks) {
      auto lb = lam.segment(blk.off, blk.q);
      auto db = d.segment(blk.off, blk.q);
      auto ob = out.segment(blk.off, blk.q);
      double a = lb[0];
      auto bvec = lb.tail(blk.q - 1);
      double det = a * a - bvec.squaredNorm();
      if (std::abs(det) < 1e-300) det = det >= 0 ? 1e-300 : -1e-300;
      double x0 = (a * db[0] - bvec.dot(db.tail(blk.q - 1))) / det;
      ob[0] = x0;
      ob.tail(blk.q - 1) = (db.tail(blk.q - 1) - x0 * bvec) / a;
    }
  }

  // Largest step alpha with u + alpha du staying in the cone (capped).
  double max_step(const Vector& u, const Vector& du) const {
    const double cap = 1e18;
    double alpha = cap;
    const Index nl = dims->nl;
    for (Index i = 0; i < nl; ++i)
      if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
    for (const SocLayout& blk : blocks) {
      auto ub = u.segment(blk.off, blk.q);
      auto db = du.segment(blk.off, blk.q);
      double det = jdot(ub);
      if (det <= 0.0) return 0.0;
      double sd = std::sqrt(det);
      Vector uhat = ub / sd;
      Vector what = uhat;
      what.tail(blk.q - 1) *= -1.0;  // J uhat
      what[0] += 1.0;
      what /= std::sqrt(2.0 * (uhat[0] + 1.0));
      double wd = what.dot(db);
      Vector rho = 2.0 * wd * what;
      rho[0] -= db[0];
      rho.tail(blk.q - 1) += db.tail(blk.q - 1);
      rho /= sd;
      double lam_min = rho[0] - rho.tail(blk.q - 1).norm();
      if (lam_min < 0.0) alpha = std::min(alpha, -1.0 / lam_min);
    }
    return alpha;
  }

  void identity(Vector& e) const {
    e = Vector::Zero(dims->total());
    e.head(dims->nl).setOnes();
    for (const SocLayout& blk : blocks) e[blk.off] = 1.0;
  }
};

void init_point(const ConeProblem& p, const WarmStart* warm, Vector& x, Vector& s, Vector& z) {
  const Index m = p.dims.total();
  const bool have_warm = warm != nullptr && warm->x.size() == p.nvar;
  x = have_warm ? warm->x : Vector::Zero(p.nvar);
  Vector slack(m);
  p.mul_G(x, slack);
  slack = p.h - slack;
  double hs = 1.0 + p.h.lpNorm<Eigen::Infinity>();
  double floor_s = have_warm ? std::max(1e-4 * hs, 1e-8) : std::max(1.0, 0.05 * hs);
  s.resize(m);
  for (Index i = 0; i < p.dims.nl; ++i) s[i] = std::max(slack[i], floor_s);
  Index off = p.dims.nl;
  for (Index q : p.dims.soc) {
    s.segment(off + 1, q - 1) = slack.segment(off + 1, q - 1);
    s[off] = std::max(slack[off], s.segment(off + 1, q - 1).norm() + floor_s);
    off += q;
  }
  const bool warm_z = have_warm && warm->z.size() == m;
  z.resize(m);
  double floor_z = warm_z ? 1e-6 : 1.0;
  if (warm_z) {
    for (Index i = 0; i < p.dims.nl; ++i) z[i] = std::max(warm->z[i], floor_z);
    off = p.dims.nl;
    for (Index q : p.dims.soc) {
      z.segment(off + 1, q - 1) = warm->z.segment(off + 1, q - 1);
      z[off] = std::max(warm->z[off], z.segment(off + 1, q - 1).norm() + floor_z);
      off += q;
    }
  } else {
    z.setZero();
    for (Index i = 0; i < p.dims.nl; ++i) z[i] = 1.0;
    off = p.dims.nl;
    for (Index q : p.dims.soc) {
      z[off] = 1.0;
      off += q;
    }
  }
}

IpmResult run_ipm(const ConeProblem& p, KktBackend& kkt, const IpmOptions& opt,
                  const WarmStart* warm) {
  IpmResult res;
  const Index m = p.dims.total();
  const double deg = double(p.dims.degree());
  const double gtol = std::max(0.3 * opt.tol, 1e-12);
  const double ftol = opt.feas_tol > 0.0 ? opt.feas_tol : std::max(0.3 * opt.tol, 1e-10);

  Vector x, s, z;
  init_point(p, warm, x, s, z);

  ConeState cone;
  cone.init(p.dims);
  Vector e;
  cone.identity(e);

  Vector gx(m), rz(m), rx(p.nvar), d(m), u1(m), u2(m), u3(m), tmp(m);
  Vector ws(m), wz(m), corr(m);
  Vector dx(p.nvar), ds(m), dz(m), dxc(p.nvar), dsc(m), dzc(m);
  Vector rhs0(p.nvar), mv(p.nvar), cor(p.nvar), gv(m), wgv(m);

  const double hnorm = 1.0 + p.h.lpNorm<Eigen::Infinity>();
  const double cnorm = 1.0 + p.c.lpNorm<Eigen::Infinity>();

  // out = G' W^-2 G v; used for iterative refinement of the normal solves,
  // which lose accuracy when the scaling degenerates near convergence.
  auto apply_normal = [&](const Vector& v, Vector& out) {
    p.mul_G(v, gv);
    cone.apply_winv2(gv, wgv);
    p.mul_GT(wgv, out);
  };

  double best_score = std::numeric_limits<double>::infinity();
  Vector best_x = x, best_s = s, best_z = z;
  IpmResult best_stats;

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    p.mul_G(x, gx);
    rz = gx + s - p.h;
    p.mul_GT(z, rx);
    rx += p.c;
    double gap = s.dot(z);
    double pobj = p.c.dot(x);
    double dobj = -p.h.dot(z);
    res.iters = iter;
    res.pobj = pobj;
    res.dobj = dobj;
    res.gap_abs = gap;
    res.resid_p = rz.lpNorm<Eigen::Infinity>() / hnorm;
    res.resid_d = rx.lpNorm<Eigen::Infinity>() / cnorm;
    double relgap = gap / (1.0 + std::abs(pobj));
    if (res.resid_p <= ftol && res.resid_d <= ftol && relgap <= gtol) {
      res.ok = true;
      break;
    }
    double score = std::max({res.resid_p, res.resid_d, relgap});
    if (!std::isfinite(score)) break;  // numerical breakdown; fall back to best iterate
    if (score < best_score) {
      best_score = score;
      best_x = x;
      best_s = s;
      best_z = z;
      best_stats = res;
    }
    if (iter == opt.max_iter) break;

    if (!cone.update(s, z)) break;
    double mu = gap / deg;
    kkt.factor(p, cone.lp_w2, cone.soc);

    auto direction = [&](const Vector& dvec, Vector& ox, Vector& os, Vector& oz) {
      cone.jordan_div(dvec, u1);
      cone.apply_winv(u1, u2);
      cone.apply_winv2(rz, u3);
      tmp = u2 - u3;
      p.mul_GT(tmp, ox);
      ox -= rx;
      rhs0 = ox;
      kkt.solve(ox);
      double rhs_scale = 1.0 + rhs0.lpNorm<Eigen::Infinity>();
      for (int round = 0; round < 3; ++round) {
        apply_normal(ox, mv);
        cor = rhs0 - mv;
        if (cor.lpNorm<Eigen::Infinity>() <= 1e-13 * rhs_scale) break;
        kkt.solve(cor);
        ox += cor;
      }
      Vector gdx(m);
      p.mul_G(ox, gdx);
      gdx += rz;  // t = rz + G dx
      cone.apply_winv2(gdx, oz);
      oz -= u2;
      os = -gdx;
    };

    // Affine (predictor) direction: d = lam o lam.
    cone.jordan_prod(cone.lam, cone.lam, d);
    direction(d, dx, ds, dz);
    double ap = cone.max_step(s, ds);
    double ad = cone.max_step(z, dz);
    double alpha_aff = std::min({1.0, ap, ad});
    double gap_aff = (s + alpha_aff * ds).dot(z + alpha_aff * dz);
    double sigma = std::clamp(gap_aff / gap, 0.0, 1.0);
    sigma = sigma * sigma * sigma;

    // Combined direction with Mehrotra correction.
    cone.apply_winv(ds, ws);
    cone.apply_w(dz, wz);
    cone.jordan_prod(ws, wz, corr);
    d += corr;
    d -= (sigma * mu) * e;
    direction(d, dxc, dsc, dzc);
    ap = cone.max_step(s, dsc);
    ad = cone.max_step(z, dzc);
    double alpha = std::min({1.0, 0.99 * ap, 0.99 * ad});
    if (alpha < 1e-11) break;  // stalled
    x += alpha * dxc;
    s += alpha * dsc;
    z += alpha * dzc;
  }
  if (!res.ok && best_score < std::numeric_limits<double>::infinity()) {
    // Report the most balanced iterate seen rather than a degenerate tail.
    double cur = std::max({res.resid_p, res.resid_d, res.gap_abs / (1.0 + std::abs(res.pobj))});
    if (best_score < cur || !std::isfinite(cur)) {
      res = best_stats;
      res.x = std::move(best_x);
      res.s = std::move(best_s);
      res.z = std::move(best_z);
      return res;
    }
  }
  res.x = std::move(x);
  res.s = std::move(s);
  res.z = std::move(z);
  return res;
}

}  // namespace

IpmResult solve_cone(const ConeProblem& p, KktBackend& kkt, const IpmOptions& opt,
                     const WarmStart* warm) {
  IpmResult res = run_ipm(p, kkt, opt, warm);
  if (!res.ok && warm != nullptr) res = run_ipm(p, kkt, opt, nullptr);
  return res;
}

IpmResult solve_cone_dense(const ConeProblem& p, const IpmOptions& opt, const WarmStart* warm) {
  KktDense kkt;
  kkt.prepare(p);
  return solve_cone(p, kkt, opt, warm);
}

bool nearly_converged(const IpmResult& res, double tol) {
  const double bar = 100.0 * tol;
  const double relgap = res.gap_abs / (1.0 + std::abs(res.pobj));
  return res.resid_p <= bar && res.resid_d <= bar && relgap <= bar;
}

}  // namespace chase
