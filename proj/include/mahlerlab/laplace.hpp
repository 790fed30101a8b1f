#pragma once

#include <vector>

#include "mahlerlab/cones.hpp"

namespace mahlerlab {

/// Value, gradient and Hessian of the logarithmic Laplace transform
/// Phi_V(y) = log int_V exp<y,x> dx at a point of the open dual cone.
struct LaplaceEval {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

namespace detail {

struct CellTerms {
  Vec log_w;                // per cell
  std::vector<Vec> s;       // sum_i g_i / p_i
  std::vector<Mat> d;       // sum_i g_i g_i^T / p_i^2
};

inline CellTerms cell_terms(const PolyhedralCone& v, const Vec& y, bool with_matrices) {
  const int dim = v.ambient;
  Vec prods = -(v.rays * y);  // p_i = -<y, g_i>
  double floor = 1e-12 * std::max(1.0, y.norm());
  if (prods.minCoeff() <= floor)
    throw OutsideDualInterior("laplace_eval: point not strictly inside the dual cone");
  CellTerms t;
  const int nc = static_cast<int>(v.cells.size());
  t.log_w = Vec(nc);
  t.s.resize(nc);
  if (with_matrices) t.d.resize(nc);
  for (int c = 0; c < nc; ++c) {
    double lw = v.cell_log_det[c];
    Vec s = Vec::Zero(dim);
    Mat d = with_matrices ? Mat::Zero(dim, dim) : Mat();
    for (int i : v.cells[c]) {
      double p = prods[i];
      lw -= std::log(p);
      Vec g = v.rays.row(i).transpose();
      s += g / p;
      if (with_matrices) d += (g * g.transpose()) / (p * p);
    }
    t.log_w[c] = lw;
    t.s[c] = std::move(s);
    if (with_matrices) t.d[c] = std::move(d);
  }
  return t;
}

}  // namespace detail

inline double laplace_value(const PolyhedralCone& v, const Vec& y) {
  Vec prods = -(v.rays * y);
  double floor = 1e-12 * std::max(1.0, y.norm());
  if (prods.minCoeff() <= floor)
    throw OutsideDualInterior("laplace_value: point not strictly inside the dual cone");
  Vec logs(v.cells.size());
  for (size_t c = 0; c < v.cells.size(); ++c) {
    double lw = v.cell_log_det[c];
    for (int i : v.cells[c]) lw -= std::log(prods[i]);
    logs[c] = lw;
  }
  return log_sum_exp(logs);
}

inline LaplaceEval laplace_eval(const PolyhedralCone& v, const Vec& y) {
  const int dim = v.ambient;
  detail::CellTerms t = detail::cell_terms(v, y, true);
  LaplaceEval out;
  out.value = log_sum_exp(t.log_w);
  out.gradient = Vec::Zero(dim);
  Mat m2 = Mat::Zero(dim, dim);
  for (size_t c = 0; c < v.cells.size(); ++c) {
    double w = std::exp(t.log_w[c] - out.value);
    out.gradient += w * t.s[c];
    m2 += w * (t.s[c] * t.s[c].transpose() + t.d[c]);
  }
  out.hessian = m2 - out.gradient * out.gradient.transpose();
  return out;
}

/// Third derivative tensor of Phi_V as slices T[k](i,j) = d^3 Phi / dy_i dy_j dy_k.
inline std::vector<Mat> laplace_third(const PolyhedralCone& v, const Vec& y) {
  const int dim = v.ambient;
  Vec prods = -(v.rays * y);
  double floor = 1e-12 * std::max(1.0, y.norm());
  if (prods.minCoeff() <= floor)
    throw OutsideDualInterior("laplace_third: point not strictly inside the dual cone");
  detail::CellTerms t = detail::cell_terms(v, y, true);
  double value = log_sum_exp(t.log_w);
  Vec m1 = Vec::Zero(dim);
  Mat m2 = Mat::Zero(dim, dim);
  std::vector<Mat> m3(dim, Mat::Zero(dim, dim));
  for (size_t c = 0; c < v.cells.size(); ++c) {
    double w = std::exp(t.log_w[c] - value);
    const Vec& s = t.s[c];
    const Mat& d = t.d[c];
    Mat e_sum_base = s * s.transpose() + d;
    m1 += w * s;
    m2 += w * e_sum_base;
    // cell third moment: s_i s_j s_k + s_i d_jk + s_j d_ik + s_k d_ij + e_ijk
    Mat e_k = Mat::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
      Mat slice = s[k] * e_sum_base + s * d.row(k) + d.col(k) * s.transpose();
      m3[k] += w * slice;
    }
    for (int i : v.cells[c]) {
      Vec g = v.rays.row(i).transpose();
      double p3 = std::pow(prods[i], 3);
      Mat gg = g * g.transpose();
      for (int k = 0; k < dim; ++k) m3[k] += w * (2.0 * g[k] / p3) * gg;
    }
  }
  std::vector<Mat> third(dim);
  for (int k = 0; k < dim; ++k) {
    third[k] = m3[k]
             - m2 * m1[k]
             - m1 * m2.row(k)
             - m2.col(k) * m1.transpose()
             + 2.0 * m1[k] * (m1 * m1.transpose());
  }
  return third;
}

// ---------------------------------------------------------------------------
// Hyperplane sections K_y = {z in V : <z,y> = -1}
// ---------------------------------------------------------------------------

/// Section body with its ambient embedding: vertices are the rays rescaled to
/// the hyperplane <.,y> = -1, and the cone's triangulation restricts to a
/// triangulation of the section.
struct SectionBody {
  Vec y;
  Vec origin;           // point of the hyperplane closest to 0
  Mat basis;            // ambient x (ambient-1) orthonormal chart of y-perp
  Mat vertices_ambient; // rows
  VPolytope chart;      // section in chart coordinates
  std::vector<std::vector<int>> cells;
};

inline SectionBody section(const PolyhedralCone& v, const Vec& y) {
  Vec prods = -(v.rays * y);
  if (prods.minCoeff() <= 1e-12 * std::max(1.0, y.norm()))
    throw OutsideDualInterior("section: y not strictly inside the dual cone");
  SectionBody s;
  s.y = y;
  s.origin = -y / y.squaredNorm();
  s.basis = orthonormal_complement(y);
  s.vertices_ambient = Mat(v.rays.rows(), v.ambient);
  Mat chart(v.rays.rows(), v.ambient - 1);
  for (int i = 0; i < v.rays.rows(); ++i) {
    Vec z = v.rays.row(i).transpose() / prods[i];
    s.vertices_ambient.row(i) = z;
    chart.row(i) = ((z - s.origin).transpose() * s.basis);
  }
  s.chart = make_vpolytope(chart);
  s.cells = v.cells;
  return s;
}

struct SectionMoments {
  MomentData chart;          // exact moments in the orthonormal chart
  Vec barycenter_ambient;
  Mat covariance_ambient;    // rank n, kernel spanned by y
};

inline SectionMoments section_moments(const SectionBody& s) {
  const int n = s.chart.dim;
  std::vector<MomentData> parts;
  parts.reserve(s.cells.size());
  Mat simplex(n + 1, n);
  for (const auto& cell : s.cells) {
    for (int i = 0; i <= n; ++i) simplex.row(i) = s.chart.vertices.row(cell[i]);
    parts.push_back(simplex_moments(simplex));
  }
  SectionMoments out;
  out.chart = combine_weighted(parts);
  out.barycenter_ambient = s.origin + s.basis * out.chart.barycenter;
  out.covariance_ambient = s.basis * out.chart.covariance * s.basis.transpose();
  return out;
}

inline SectionMoments section_moments(const PolyhedralCone& v, const Vec& y) {
  return section_moments(section(v, y));
}

}  // namespace mahlerlab
