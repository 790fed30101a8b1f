#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "mahlerlab/core.hpp"

namespace mahlerlab {

/// Visit all k-subsets of {0,..,n-1} in lexicographic order.
inline void for_each_combination(int n, int k,
                                 const std::function<void(const std::vector<int>&)>& fn) {
  if (k > n || k <= 0) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Columns form an orthonormal basis of the hyperplane orthogonal to v.
inline Mat orthonormal_complement(const Vec& v) {
  const int d = static_cast<int>(v.size());
  Eigen::HouseholderQR<Mat> qr(v);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  return q.rightCols(d - 1);
}

/// One-dimensional kernel direction of a (d-1) x d row system; empty if the
/// rows are rank deficient.
inline Vec kernel_direction(const Mat& rows) {
  Eigen::FullPivLU<Mat> lu(rows);
  lu.setThreshold(1e-10);
  if (lu.rank() != rows.rows()) return Vec();
  Mat ker = lu.kernel();
  if (ker.cols() != 1) return Vec();
  Vec v = ker.col(0);
  return v / v.norm();
}

// ---------------------------------------------------------------------------
// Dense simplex solver, desk scale.  Standard form: min c.z  s.t. E z = f,
// z >= 0.  Bland's rule throughout, so no cycling.
// ---------------------------------------------------------------------------

enum class LpStatus { Optimal, Infeasible, Unbounded, Stalled };

struct LpResult {
  LpStatus status = LpStatus::Stalled;
  Vec x;
  double objective = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline LpStatus simplex_iterate(Mat& T, Vec& rhs, const Vec& cost,
                                std::vector<int>& basis, int ncols,
                                double eps = 1e-11, int max_iter = 20000) {
  const int m = static_cast<int>(T.rows());
  for (int iter = 0; iter < max_iter; ++iter) {
    Vec dual = Vec::Zero(ncols);
    for (int i = 0; i < m; ++i)
      if (cost[basis[i]] != 0.0) dual += cost[basis[i]] * T.row(i).head(ncols).transpose();
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (cost[j] - dual[j] < -eps) { enter = j; break; }  // Bland
    }
    if (enter < 0) return LpStatus::Optimal;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) > eps) {
        double ratio = rhs[i] / T(i, enter);
        if (ratio < best - eps || (ratio < best + eps &&
                                   (leave < 0 || basis[i] < basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return LpStatus::Unbounded;
    double piv = T(leave, enter);
    T.row(leave) /= piv;
    rhs[leave] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      double factor = T(i, enter);
      if (factor != 0.0) {
        T.row(i) -= factor * T.row(leave);
        rhs[i] -= factor * rhs[leave];
      }
    }
    basis[leave] = enter;
  }
  return LpStatus::Stalled;
}

}  // namespace detail

/// min c.z  s.t.  E z = f, z >= 0.
inline LpResult lp_solve_standard(Mat E, Vec f, const Vec& c) {
  const int m = static_cast<int>(E.rows());
  const int n = static_cast<int>(E.cols());
  for (int i = 0; i < m; ++i) {
    if (f[i] < 0) { E.row(i) *= -1.0; f[i] *= -1.0; }
  }
  // Phase I tableau with one artificial per row.
  Mat T(m, n + m);
  T.leftCols(n) = E;
  T.rightCols(m) = Mat::Identity(m, m);
  Vec rhs = f;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;
  Vec phase1 = Vec::Zero(n + m);
  phase1.tail(m).setOnes();
  LpStatus st = detail::simplex_iterate(T, rhs, phase1, basis, n + m);
  LpResult res;
  if (st == LpStatus::Stalled) { res.status = st; return res; }
  double infeas = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= n) infeas += rhs[i];
  double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  if (infeas > 1e-8 * scale) { res.status = LpStatus::Infeasible; return res; }
  // Pivot residual artificials out where possible; rows that cannot pivot are
  // redundant and stay at value zero.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    int enter = -1;
    for (int j = 0; j < n; ++j)
      if (std::abs(T(i, j)) > 1e-9) { enter = j; break; }
    if (enter < 0) continue;
    double piv = T(i, enter);
    T.row(i) /= piv; rhs[i] /= piv;
    for (int k = 0; k < m; ++k) {
      if (k == i) continue;
      double factor = T(k, enter);
      if (factor != 0.0) { T.row(k) -= factor * T.row(i); rhs[k] -= factor * rhs[i]; }
    }
    basis[i] = enter;
  }
  Vec phase2 = Vec::Zero(n + m);
  phase2.head(n) = c;
  // Forbid artificials from re-entering by pricing them prohibitively.
  phase2.tail(m).setConstant(1e30);
  st = detail::simplex_iterate(T, rhs, phase2, basis, n + m);
  if (st != LpStatus::Optimal) { res.status = st; return res; }
  res.status = LpStatus::Optimal;
  res.x = Vec::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = rhs[i];
  res.objective = c.dot(res.x);
  return res;
}

/// max c.x  s.t.  A x <= b, x free.
inline LpResult lp_max(const Vec& c, const Mat& A, const Vec& b) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  Mat E(m, 2 * d + m);
  E.leftCols(d) = A;
  E.middleCols(d, d) = -A;
  E.rightCols(m) = Mat::Identity(m, m);
  Vec cost = Vec::Zero(2 * d + m);
  cost.head(d) = -c;
  cost.segment(d, d) = c;
  LpResult inner = lp_solve_standard(E, b, cost);
  LpResult res;
  res.status = inner.status;
  if (inner.status == LpStatus::Optimal) {
    res.x = inner.x.head(d) - inner.x.segment(d, d);
    res.objective = c.dot(res.x);
  }
  return res;
}

/// Phase-I infeasibility of {lambda >= 0, V^T lambda = p, sum lambda = 1};
/// zero (within tolerance) iff p lies in the convex hull of the rows of V.
inline bool point_in_hull(const Mat& points, const Vec& p, double tol = 1e-9) {
  const int k = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  Mat E(d + 1, k);
  E.topRows(d) = points.transpose();
  E.row(d).setOnes();
  Vec f(d + 1);
  f.head(d) = p;
  f[d] = 1.0;
  double scale = std::max(1.0, points.cwiseAbs().maxCoeff());
  Mat Es = E / scale;
  Vec fs = f / scale;
  LpResult r = lp_solve_standard(Es, fs, Vec::Zero(k));
  if (r.status == LpStatus::Optimal) {
    Vec resid = E * r.x - f;
    return resid.cwiseAbs().maxCoeff() <= tol * scale;
  }
  return false;
}

/// Bisection for the boundary of a convex membership predicate along a ray:
/// largest t in [0, hi] with inside(t) true; inside(0) must hold.
inline double bisect_boundary(const std::function<bool(double)>& inside, double hi,
                              int iters = 60) {
  double lo = 0.0;
  if (inside(hi)) return hi;
  for (int i = 0; i < iters; ++i) {
    double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Nelder-Mead simplex minimization; fcn may return +inf outside its domain.
inline Vec nelder_mead(const std::function<double(const Vec&)>& fcn, Vec start,
                       double step = 0.1, int max_iter = 600, double ftol = 1e-12) {
  const int d = static_cast<int>(start.size());
  std::vector<Vec> pts(d + 1, start);
  std::vector<double> f(d + 1);
  for (int i = 0; i < d; ++i) pts[i + 1][i] += step;
  for (int i = 0; i <= d; ++i) f[i] = fcn(pts[i]);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<int> ord(d + 1);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return f[a] < f[b]; });
    std::vector<Vec> sp(d + 1);
    std::vector<double> sf(d + 1);
    for (int i = 0; i <= d; ++i) { sp[i] = pts[ord[i]]; sf[i] = f[ord[i]]; }
    pts = sp; f = sf;
    if (std::abs(f[d] - f[0]) <= ftol * (std::abs(f[0]) + ftol)) break;
    Vec centroid = Vec::Zero(d);
    for (int i = 0; i < d; ++i) centroid += pts[i];
    centroid /= d;
    Vec refl = centroid + (centroid - pts[d]);
    double fr = fcn(refl);
    if (fr < f[0]) {
      Vec expd = centroid + 2.0 * (centroid - pts[d]);
      double fe = fcn(expd);
      if (fe < fr) { pts[d] = expd; f[d] = fe; }
      else { pts[d] = refl; f[d] = fr; }
    } else if (fr < f[d - 1]) {
      pts[d] = refl; f[d] = fr;
    } else {
      Vec contr = centroid + 0.5 * (pts[d] - centroid);
      double fc = fcn(contr);
      if (fc < f[d]) { pts[d] = contr; f[d] = fc; }
      else {
        for (int i = 1; i <= d; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          f[i] = fcn(pts[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= d; ++i)
    if (f[i] < f[best]) best = i;
  return pts[best];
}

/// Golden-section minimum of a convex scalar function on [lo, hi].
inline double convex_min_scalar(const std::function<double(double)>& fcn, double lo,
                                double hi, double tol = 1e-12) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = fcn(x1), f2 = fcn(x2);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = fcn(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = fcn(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace mahlerlab
