#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mahlerlab/core.hpp"
#include "mahlerlab/numerics.hpp"

namespace mahlerlab {

/// Vertex description of a convex body; rows of `vertices` are points in R^dim.
struct VPolytope {
  int dim = 0;
  Mat vertices;  // (#vertices) x dim
};

/// Halfspace description: row i means <normals.row(i), x> <= offsets[i].
struct HPolytope {
  int dim = 0;
  Mat normals;
  Vec offsets;
};

/// Membership-oracle body for non-polytopal sets.  The inner ball sits at
/// `interior_point`, the outer ball at the origin.
struct ConvexOracle {
  int dim = 0;
  std::function<bool(const Vec&, double)> contains;
  Vec interior_point;
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  std::function<double(const Vec&)> gauge_fn;   // optional closed form
  std::function<Vec(const Vec&)> project;       // optional Euclidean projection
};

inline VPolytope make_vpolytope(Mat verts) {
  VPolytope p;
  p.dim = static_cast<int>(verts.cols());
  p.vertices = std::move(verts);
  return p;
}

inline double circumradius(const VPolytope& p) {
  return p.vertices.rowwise().norm().maxCoeff();
}

inline Vec vertex_centroid(const VPolytope& p) {
  return p.vertices.colwise().mean().transpose();
}

inline VPolytope translate(const VPolytope& p, const Vec& shift) {
  VPolytope q = p;
  q.vertices.rowwise() += shift.transpose();
  return q;
}

inline VPolytope scale(const VPolytope& p, double s) {
  VPolytope q = p;
  q.vertices *= s;
  return q;
}

/// Largest t such that all points +-t e_j lie in conv(vertices); positive iff
/// the origin is strictly interior, -1 if the origin is not even in the hull.
inline double origin_depth(const VPolytope& p) {
  const int m = static_cast<int>(p.vertices.rows());
  const int d = p.dim;
  double R = std::max(1.0, circumradius(p));
  Mat V = p.vertices / R;
  double depth = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j) {
    for (double sgn : {1.0, -1.0}) {
      // max t  s.t.  V^T lambda = t sgn e_j, sum lambda = 1, lambda,t >= 0
      Mat E = Mat::Zero(d + 1, m + 1);
      E.topLeftCorner(d, m) = V.transpose();
      E(j, m) = -sgn;
      E.row(d).head(m).setOnes();
      Vec f = Vec::Zero(d + 1);
      f[d] = 1.0;
      Vec c = Vec::Zero(m + 1);
      c[m] = -1.0;
      LpResult r = lp_solve_standard(E, f, c);
      if (r.status != LpStatus::Optimal) return -1.0;
      depth = std::min(depth, -r.objective * R);
    }
  }
  return depth;
}

/// Polar body of a V-polytope with the origin interior: one halfspace per
/// vertex.  The result is bounded because P is full-dimensional.
inline HPolytope polar(const VPolytope& p, double tol = 1e-9) {
  double depth = origin_depth(p);
  if (depth <= tol * std::max(1.0, circumradius(p)))
    throw OriginNotInterior("polar: origin not strictly interior (depth " +
                            std::to_string(depth) + ")");
  HPolytope h;
  h.dim = p.dim;
  h.normals = p.vertices;
  h.offsets = Vec::Ones(p.vertices.rows());
  return h;
}

inline bool is_bounded(const HPolytope& h) {
  for (int j = 0; j < h.dim; ++j) {
    for (double sgn : {1.0, -1.0}) {
      Vec c = Vec::Zero(h.dim);
      c[j] = sgn;
      LpResult r = lp_max(c, h.normals, h.offsets);
      if (r.status == LpStatus::Unbounded) return false;
      if (r.status != LpStatus::Optimal) throw Degenerate("is_bounded: LP failed");
    }
  }
  return true;
}

namespace detail {

inline Mat dedupe_and_sort_rows(const std::vector<Vec>& rows, int d, double tol) {
  std::vector<Vec> kept;
  for (const Vec& r : rows) {
    bool dup = false;
    for (const Vec& k : kept) {
      if ((r - k).cwiseAbs().maxCoeff() <= tol) { dup = true; break; }
    }
    if (!dup) kept.push_back(r);
  }
  std::sort(kept.begin(), kept.end(), [](const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  });
  Mat out(kept.size(), d);
  for (size_t i = 0; i < kept.size(); ++i) out.row(i) = kept[i];
  return out;
}

}  // namespace detail

/// Exact vertex enumeration by brute force over dim-subsets of halfspaces.
/// Intended scale: dim <= 8, a few dozen halfspaces.
inline VPolytope vertices_of(const HPolytope& h, double tol = kDedupeTol) {
  const int d = h.dim;
  const int m = static_cast<int>(h.normals.rows());
  if (m < d + 1) throw Unbounded("vertices_of: too few halfspaces to bound R^" +
                                 std::to_string(d));
  if (!is_bounded(h)) throw Unbounded("vertices_of: polyhedron unbounded");
  // Normalized copy for uniform feasibility slack.
  Mat A = h.normals;
  Vec b = h.offsets;
  for (int i = 0; i < m; ++i) {
    double nn = A.row(i).norm();
    if (nn < 1e-14) throw Degenerate("vertices_of: zero normal");
    A.row(i) /= nn;
    b[i] /= nn;
  }
  std::vector<Vec> cands;
  Mat sub(d, d);
  Vec rhs(d);
  for_each_combination(m, d, [&](const std::vector<int>& idx) {
    for (int i = 0; i < d; ++i) {
      sub.row(i) = A.row(idx[i]);
      rhs[i] = b[idx[i]];
    }
    Eigen::FullPivLU<Mat> lu(sub);
    lu.setThreshold(1e-10);
    if (lu.rank() < d) return;  // singular subset: skipped, not an error
    Vec x = lu.solve(rhs);
    double slack_tol = tol * std::max(1.0, x.norm());
    if (((A * x - b).array() <= slack_tol).all()) cands.push_back(x);
  });
  if (cands.empty()) throw Degenerate("vertices_of: empty polytope");
  double scale = 1.0;
  for (const Vec& c : cands) scale = std::max(scale, c.norm());
  VPolytope p;
  p.dim = d;
  p.vertices = detail::dedupe_and_sort_rows(cands, d, tol * scale);
  return p;
}

/// Drop vertices lying in the convex hull of the others.
inline VPolytope reduce(const VPolytope& p, double tol = kDedupeTol) {
  const int m = static_cast<int>(p.vertices.rows());
  double scale = std::max(1.0, circumradius(p));
  std::vector<Vec> kept;
  for (int i = 0; i < m; ++i) {
    Mat others(m - 1, p.dim);
    int r = 0;
    for (int j = 0; j < m; ++j)
      if (j != i) others.row(r++) = p.vertices.row(j);
    if (!point_in_hull(others, p.vertices.row(i).transpose(), tol * scale))
      kept.push_back(p.vertices.row(i).transpose());
  }
  if (kept.empty()) throw Degenerate("reduce: no extreme points");
  VPolytope q;
  q.dim = p.dim;
  q.vertices = detail::dedupe_and_sort_rows(kept, p.dim, tol * scale);
  return q;
}

/// Facet description of a V-polytope, obtained from the polar of a copy
/// shifted to its vertex centroid.  Rows come back normalized.
inline HPolytope hrep_of(const VPolytope& p) {
  Vec c = vertex_centroid(p);
  VPolytope q = translate(p, -c);
  HPolytope pol = polar(q);
  VPolytope w = vertices_of(pol);
  HPolytope h;
  h.dim = p.dim;
  h.normals = Mat(w.vertices.rows(), p.dim);
  h.offsets = Vec(w.vertices.rows());
  for (int i = 0; i < w.vertices.rows(); ++i) {
    Vec n = w.vertices.row(i).transpose();
    double nn = n.norm();
    h.normals.row(i) = n / nn;
    h.offsets[i] = (1.0 + n.dot(c)) / nn;
  }
  return h;
}

// --- gauges and supports ----------------------------------------------------

inline double support(const VPolytope& p, const Vec& u) {
  return (p.vertices * u).maxCoeff();
}

inline double support(const HPolytope& h, const Vec& u) {
  LpResult r = lp_max(u, h.normals, h.offsets);
  if (r.status == LpStatus::Unbounded) throw Unbounded("support: unbounded direction");
  if (r.status != LpStatus::Optimal) throw Degenerate("support: LP failed");
  return r.objective;
}

inline double gauge(const HPolytope& h, const Vec& x) {
  double g = 0.0;
  for (int i = 0; i < h.normals.rows(); ++i) {
    if (h.offsets[i] <= 0)
      throw OriginNotInterior("gauge: halfspace offset not positive");
    g = std::max(g, h.normals.row(i).dot(x) / h.offsets[i]);
  }
  return g;
}

/// Gauge of a V-polytope via the hull LP min{sum lambda : V^T lambda = x}.
inline double gauge(const VPolytope& p, const Vec& x) {
  const int m = static_cast<int>(p.vertices.rows());
  if (x.norm() < 1e-300) return 0.0;
  double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  Mat E = p.vertices.transpose() / scale;
  LpResult r = lp_solve_standard(E, x / scale, Vec::Ones(m));
  if (r.status != LpStatus::Optimal)
    throw OriginNotInterior("gauge: point not in the cone of the vertices");
  return r.objective;
}

inline double gauge(const ConvexOracle& body, const Vec& x, double tol = 1e-10) {
  if (body.gauge_fn) return body.gauge_fn(x);
  double nx = x.norm();
  if (nx < 1e-300) return 0.0;
  double lo = nx / body.outer_radius * 0.5;
  double hi = nx / body.inner_radius * 2.0 + 1.0;
  // contains(x/s) is monotone in s once past the gauge
  for (int i = 0; i < 200 && hi - lo > tol * std::max(1.0, lo); ++i) {
    double mid = 0.5 * (lo + hi);
    (body.contains(x / mid, tol) ? hi : lo) = mid;
  }
  return hi;
}

// --- triangulation and facet incidence --------------------------------------

inline std::vector<int> facet_vertex_indices(const VPolytope& p, const Vec& normal,
                                             double offset, double tol) {
  std::vector<int> idx;
  for (int i = 0; i < p.vertices.rows(); ++i) {
    if (std::abs(p.vertices.row(i).dot(normal) - offset) <= tol) idx.push_back(i);
  }
  return idx;
}

namespace detail {

inline void triangulate_recursive(const VPolytope& p, const std::vector<int>& global_idx,
                                  std::vector<std::vector<int>>& out) {
  const int d = p.dim;
  const int m = static_cast<int>(p.vertices.rows());
  if (d == 1) {
    int lo = 0, hi = 0;
    for (int i = 1; i < m; ++i) {
      if (p.vertices(i, 0) < p.vertices(lo, 0)) lo = i;
      if (p.vertices(i, 0) > p.vertices(hi, 0)) hi = i;
    }
    out.push_back({global_idx[lo], global_idx[hi]});
    return;
  }
  if (m == d + 1) {  // already a simplex
    std::vector<int> all(global_idx);
    out.push_back(all);
    return;
  }
  HPolytope facets = hrep_of(p);
  double tol = kDedupeTol * std::max(1.0, circumradius(p));
  const int apex = 0;
  for (int f = 0; f < facets.normals.rows(); ++f) {
    Vec n = facets.normals.row(f).transpose();
    double b = facets.offsets[f];
    if (std::abs(p.vertices.row(apex).dot(n) - b) <= tol) continue;  // apex on facet
    std::vector<int> on = facet_vertex_indices(p, n, b, tol);
    Mat basis = orthonormal_complement(n);
    Vec ref = p.vertices.row(on[0]).transpose();
    Mat chart(on.size(), d - 1);
    std::vector<int> sub_idx(on.size());
    for (size_t i = 0; i < on.size(); ++i) {
      chart.row(i) = ((p.vertices.row(on[i]).transpose() - ref).transpose() * basis);
      sub_idx[i] = global_idx[on[i]];
    }
    VPolytope fp = make_vpolytope(chart);
    std::vector<std::vector<int>> sub;
    triangulate_recursive(fp, sub_idx, sub);
    for (auto& s : sub) {
      s.push_back(global_idx[apex]);
      out.push_back(s);
    }
  }
}

}  // namespace detail

/// Triangulation of P into dim-simplices using only its own vertices
/// (fan from the first vertex over non-incident facets, recursively).
inline std::vector<std::vector<int>> polytope_triangulation(const VPolytope& p) {
  std::vector<int> idx(p.vertices.rows());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::vector<int>> out;
  detail::triangulate_recursive(p, idx, out);
  return out;
}

/// (dim-1)-simplices triangulating the whole boundary of P, as vertex index
/// lists of size dim.
inline std::vector<std::vector<int>> boundary_triangulation(const VPolytope& p,
                                                            const HPolytope& facets) {
  const int d = p.dim;
  std::vector<std::vector<int>> out;
  double tol = kDedupeTol * std::max(1.0, circumradius(p));
  for (int f = 0; f < facets.normals.rows(); ++f) {
    Vec n = facets.normals.row(f).transpose();
    double b = facets.offsets[f];
    std::vector<int> on = facet_vertex_indices(p, n, b, tol);
    if (static_cast<int>(on.size()) < d)
      throw Degenerate("boundary_triangulation: facet with too few vertices");
    if (d == 1) {
      out.push_back({on[0]});
      continue;
    }
    Mat basis = orthonormal_complement(n);
    Vec ref = p.vertices.row(on[0]).transpose();
    Mat chart(on.size(), d - 1);
    for (size_t i = 0; i < on.size(); ++i)
      chart.row(i) = ((p.vertices.row(on[i]).transpose() - ref).transpose() * basis);
    std::vector<std::vector<int>> sub;
    detail::triangulate_recursive(make_vpolytope(chart), on, sub);
    for (auto& s : sub) out.push_back(s);
  }
  return out;
}

// --- Minkowski sums ----------------------------------------------------------

struct MinkowskiResult {
  bool inside = false;
  double gauge = std::numeric_limits<double>::quiet_NaN();
  bool stalled = false;
};

namespace detail {

/// Alternating projections for x in sum_i scaled bodies at a fixed global
/// scale.  Returns the residual gap reached.
inline double split_feasibility(const Vec& x,
                                const std::vector<std::pair<double, ConvexOracle>>& terms,
                                double global, int max_iter, double tol) {
  const int k = static_cast<int>(terms.size());
  const int d = static_cast<int>(x.size());
  std::vector<Vec> z(k, Vec::Zero(d));
  double total = 0.0;
  for (const auto& t : terms) total += std::abs(t.first) * t.second.outer_radius;
  if (total <= 0) return x.norm();
  for (int i = 0; i < k; ++i)
    z[i] = x * (std::abs(terms[i].first) * terms[i].second.outer_radius / total);
  double gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    for (int i = 0; i < k; ++i) {
      double alpha = global * terms[i].first;
      if (alpha <= 1e-15) { z[i].setZero(); continue; }
      z[i] = alpha * terms[i].second.project(z[i] / alpha);
    }
    Vec resid = x;
    for (int i = 0; i < k; ++i) resid -= z[i];
    gap = resid.norm();
    if (gap <= tol) return gap;
    for (int i = 0; i < k; ++i) z[i] += resid / k;
  }
  return gap;
}

}  // namespace detail

/// Does x lie in sum_i scale_i * body_i?  Bisection over the global scale of
/// the sum with alternating-projection feasibility for the split.  Classifies
/// correctly outside a tol-shell of the boundary; a stalled split solver is
/// reported and the point treated as boundary.
inline MinkowskiResult minkowski_membership_detail(
    const Vec& x, const std::vector<std::pair<double, ConvexOracle>>& terms,
    double tol = 1e-6) {
  for (const auto& t : terms)
    if (!t.second.project)
      throw Error("minkowski_membership: body without projection oracle");
  MinkowskiResult res;
  double rsum = 0.0;
  for (const auto& t : terms) rsum += t.first * t.second.inner_radius;
  if (x.norm() < 1e-14) { res.inside = true; res.gauge = 0.0; return res; }
  double feas_tol = tol * std::max(1.0, x.norm());
  auto feasible = [&](double s) {
    return detail::split_feasibility(x, terms, s, 200, feas_tol) <= feas_tol;
  };
  double hi = std::max(1.0, x.norm() / std::max(rsum, 1e-12)) * 2.0;
  int guard = 0;
  while (!feasible(hi) && guard++ < 30) hi *= 2.0;
  if (guard >= 30) { res.stalled = true; res.inside = false; return res; }
  double lo = 0.0;
  while (hi - lo > tol * std::max(1.0, lo)) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  res.gauge = hi;
  res.inside = hi <= 1.0 + tol;
  return res;
}

inline bool minkowski_membership(const Vec& x,
                                 const std::vector<std::pair<double, ConvexOracle>>& terms,
                                 double tol = 1e-6) {
  return minkowski_membership_detail(x, terms, tol).inside;
}

}  // namespace mahlerlab
