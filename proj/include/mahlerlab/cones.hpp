#pragma once

#include <utility>
#include <vector>

#include "mahlerlab/bodies.hpp"
#include "mahlerlab/moments.hpp"

namespace mahlerlab {

/// Proper (closed, pointed, full-dimensional) polyhedral cone in R^ambient,
/// carried as unit ray generators plus a simplicial triangulation whose cells
/// are ambient-sized ray index sets.  dual_rays is filled when a construction
/// knows the facet normals (equivalently the extreme rays of the dual cone);
/// it may be empty.
struct PolyhedralCone {
  int ambient = 0;
  Mat rays;                              // rows, unit norm
  std::vector<std::vector<int>> cells;
  Vec cell_log_det;                      // log |det G_cell|
  Vec interior_primal;                   // strictly interior direction
  Vec interior_dual;                     // strictly interior to the dual cone
  Mat dual_rays;                         // rows; 0 x ambient when unknown
};

namespace detail {

inline Vec dual_seed_lp(const Mat& rays) {
  const int m = static_cast<int>(rays.rows());
  const int d = static_cast<int>(rays.cols());
  // max delta s.t. <y, g_i> <= -delta, |y_j| <= 1
  Mat A(m + 2 * d, d + 1);
  Vec b(m + 2 * d);
  A.setZero();
  for (int i = 0; i < m; ++i) {
    A.row(i).head(d) = rays.row(i);
    A(i, d) = 1.0;
    b[i] = 0.0;
  }
  for (int j = 0; j < d; ++j) {
    A(m + 2 * j, j) = 1.0;
    b[m + 2 * j] = 1.0;
    A(m + 2 * j + 1, j) = -1.0;
    b[m + 2 * j + 1] = 1.0;
  }
  Vec c = Vec::Zero(d + 1);
  c[d] = 1.0;
  LpResult r = lp_max(c, A, b);
  if (r.status != LpStatus::Optimal || r.objective <= 1e-9)
    throw NotProper("cone is not pointed (no strictly separating functional)");
  return r.x.head(d);
}

}  // namespace detail

inline PolyhedralCone make_cone(Mat rays, std::vector<std::vector<int>> cells,
                                Mat dual_rays = Mat()) {
  PolyhedralCone v;
  v.ambient = static_cast<int>(rays.cols());
  for (int i = 0; i < rays.rows(); ++i) {
    double nn = rays.row(i).norm();
    if (nn < 1e-14) throw NotProper("make_cone: zero ray");
    rays.row(i) /= nn;
  }
  v.rays = std::move(rays);
  v.cells = std::move(cells);
  v.cell_log_det = Vec(v.cells.size());
  Mat g(v.ambient, v.ambient);
  for (size_t c = 0; c < v.cells.size(); ++c) {
    if (static_cast<int>(v.cells[c].size()) != v.ambient)
      throw NotProper("make_cone: cell size != ambient dimension");
    for (int i = 0; i < v.ambient; ++i) g.col(i) = v.rays.row(v.cells[c][i]).transpose();
    double det = g.determinant();
    if (std::abs(det) < 1e-12)
      throw NotProper("make_cone: degenerate triangulation cell");
    v.cell_log_det[c] = std::log(std::abs(det));
  }
  v.interior_primal = v.rays.colwise().mean().transpose();
  v.interior_primal /= v.interior_primal.norm();
  v.interior_dual = detail::dual_seed_lp(v.rays);
  if (dual_rays.size() > 0) {
    for (int i = 0; i < dual_rays.rows(); ++i) dual_rays.row(i) /= dual_rays.row(i).norm();
    v.dual_rays = std::move(dual_rays);
  } else {
    v.dual_rays = Mat(0, v.ambient);
  }
  return v;
}

/// Simplicial cone spanned by the rows of `gens`.
inline PolyhedralCone simplicial_cone(const Mat& gens) {
  std::vector<int> cell(gens.cols());
  std::iota(cell.begin(), cell.end(), 0);
  return make_cone(gens, {cell});
}

inline PolyhedralCone orthant_cone(int ambient) {
  return simplicial_cone(Mat::Identity(ambient, ambient));
}

/// Barycentric coordinates margin: max over cells of min_i coeff_i when x is
/// written in the cell's ray basis.  Positive implies x in the cone.
inline double cone_membership_margin(const PolyhedralCone& v, const Vec& x) {
  double best = -std::numeric_limits<double>::infinity();
  Mat g(v.ambient, v.ambient);
  for (const auto& cell : v.cells) {
    for (int i = 0; i < v.ambient; ++i) g.col(i) = v.rays.row(cell[i]).transpose();
    Vec a = g.partialPivLu().solve(x);
    best = std::max(best, a.minCoeff());
  }
  return best;
}

/// Strict membership in the open dual cone: all ray products negative.
inline bool in_dual_interior(const PolyhedralCone& v, const Vec& y, double margin = 0.0) {
  return ((v.rays * y).array() < -margin).all();
}

/// The cone {(t, t x) : t >= 0, x in K} over a body, triangulated by the fan
/// triangulation of K lifted to the rays (1, vertex).
inline PolyhedralCone cone_over(const VPolytope& k) {
  const int n = k.dim;
  Mat rays(k.vertices.rows(), n + 1);
  rays.col(0).setOnes();
  rays.rightCols(n) = k.vertices;
  std::vector<std::vector<int>> cells = polytope_triangulation(k);
  return make_cone(std::move(rays), std::move(cells));
}

namespace detail {

/// Cross-section triangulation: scale each ray w to <w, anchor> = -1, build
/// the section polytope in a chart of the hyperplane, and lift its
/// triangulation back to ray indices.
inline std::vector<std::vector<int>> section_cells(const Mat& rays, const Vec& anchor) {
  const int d = static_cast<int>(rays.cols());
  Vec prods = rays * anchor;
  if ((prods.array() >= -1e-12).any())
    throw NotProper("section_cells: anchor not strictly dual-interior");
  Vec origin = -anchor / anchor.squaredNorm();
  Mat basis = orthonormal_complement(anchor);
  Mat chart(rays.rows(), d - 1);
  for (int i = 0; i < rays.rows(); ++i) {
    Vec w = rays.row(i).transpose() / (-prods[i]);
    chart.row(i) = ((w - origin).transpose() * basis);
  }
  return polytope_triangulation(make_vpolytope(chart));
}

}  // namespace detail

/// Dual cone V* = {y : <x,y> <= 0 for all x in V}.  Extreme rays are facet
/// normals of V, found from (ambient-1)-subsets of V's rays; the involution
/// (V*)* = V holds on ray sets up to positive scaling.
inline PolyhedralCone dual_cone(const PolyhedralCone& v, double tol = 1e-9) {
  const int d = v.ambient;
  const int m = static_cast<int>(v.rays.rows());
  std::vector<Vec> cands;
  Mat sub(d - 1, d);
  for_each_combination(m, d - 1, [&](const std::vector<int>& idx) {
    for (int i = 0; i < d - 1; ++i) sub.row(i) = v.rays.row(idx[i]);
    Vec w = kernel_direction(sub);
    if (w.size() == 0) return;
    Vec prods = v.rays * w;
    double mx = prods.maxCoeff(), mn = prods.minCoeff();
    if (mx <= tol) cands.push_back(w);
    else if (mn >= -tol) cands.push_back(-w);
  });
  if (cands.empty()) throw NotProper("dual_cone: no facets found");
  Mat dr = detail::dedupe_and_sort_rows(cands, d, 1e-8);
  std::vector<std::vector<int>> cells = detail::section_cells(dr, v.interior_primal);
  return make_cone(dr, std::move(cells), v.rays);
}

/// Attach dual ray data (facet normals) to a cone, computing them if needed.
inline PolyhedralCone with_dual_rays(const PolyhedralCone& v) {
  if (v.dual_rays.rows() > 0) return v;
  PolyhedralCone copy = v;
  copy.dual_rays = dual_cone(v).rays;
  return copy;
}

/// Dual of cone_over(K) as {(-t, t w) : w in K polar}, triangulated by the
/// polar body's own fan so no second enumeration path is needed.
inline PolyhedralCone dual_of_cone_over(const VPolytope& k_polar,
                                        const PolyhedralCone& cone_over_k) {
  const int n = k_polar.dim;
  Mat rays(k_polar.vertices.rows(), n + 1);
  rays.col(0).setConstant(-1.0);
  rays.rightCols(n) = k_polar.vertices;
  std::vector<std::vector<int>> cells = polytope_triangulation(k_polar);
  return make_cone(std::move(rays), std::move(cells), cone_over_k.rays);
}

/// V1 x V2 with the product triangulation (cells are unions of factor cells).
inline PolyhedralCone cartesian_product(const PolyhedralCone& a, const PolyhedralCone& b) {
  const int d = a.ambient + b.ambient;
  Mat rays = Mat::Zero(a.rays.rows() + b.rays.rows(), d);
  rays.topLeftCorner(a.rays.rows(), a.ambient) = a.rays;
  rays.bottomRightCorner(b.rays.rows(), b.ambient) = b.rays;
  std::vector<std::vector<int>> cells;
  for (const auto& ca : a.cells) {
    for (const auto& cb : b.cells) {
      std::vector<int> cell = ca;
      for (int i : cb) cell.push_back(static_cast<int>(a.rays.rows()) + i);
      cells.push_back(std::move(cell));
    }
  }
  Mat dual(0, d);
  if (a.dual_rays.rows() > 0 && b.dual_rays.rows() > 0) {
    dual = Mat::Zero(a.dual_rays.rows() + b.dual_rays.rows(), d);
    dual.topLeftCorner(a.dual_rays.rows(), a.ambient) = a.dual_rays;
    dual.bottomRightCorner(b.dual_rays.rows(), b.ambient) = b.dual_rays;
  }
  return make_cone(std::move(rays), std::move(cells), std::move(dual));
}

/// Seeded proper simplicial cone with rays (1, u_i) around the first axis.
inline PolyhedralCone random_simplicial_cone(int ambient, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0x636f6e65);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Mat rays(ambient, ambient);
    for (int i = 0; i < ambient; ++i) {
      rays(i, 0) = 1.0;
      for (int j = 1; j < ambient; ++j) rays(i, j) = unif(rng);
    }
    Mat g = rays.transpose();
    if (std::abs(g.determinant()) > 1e-3) return simplicial_cone(rays);
  }
  throw NotProper("random_simplicial_cone: could not draw a full-rank ray set");
}

}  // namespace mahlerlab
