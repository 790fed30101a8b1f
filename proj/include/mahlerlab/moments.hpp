#pragma once

#include <cmath>
#include <optional>

#include "mahlerlab/bodies.hpp"

namespace mahlerlab {

/// Volume, barycenter, and normalized second-moment matrix of a body;
/// covariance = second_moment - b b^T.
struct MomentData {
  double volume = 0.0;
  Vec barycenter;
  Mat second_moment;
  Mat covariance;
};

inline MomentData combine_weighted(const std::vector<MomentData>& parts) {
  MomentData out;
  if (parts.empty()) throw Degenerate("combine_weighted: no parts");
  const int d = static_cast<int>(parts.front().barycenter.size());
  out.barycenter = Vec::Zero(d);
  out.second_moment = Mat::Zero(d, d);
  for (const MomentData& m : parts) {
    out.volume += m.volume;
    out.barycenter += m.volume * m.barycenter;
    out.second_moment += m.volume * m.second_moment;
  }
  if (out.volume <= 0) throw Degenerate("combine_weighted: zero volume");
  out.barycenter /= out.volume;
  out.second_moment /= out.volume;
  out.covariance = out.second_moment - out.barycenter * out.barycenter.transpose();
  return out;
}

/// Closed-form moments of a simplex: the single audited kernel all exact
/// moments route through.
inline MomentData simplex_moments(const Mat& verts) {
  const int n = static_cast<int>(verts.cols());
  if (verts.rows() != n + 1) throw DimensionMismatch("simplex_moments: need n+1 vertices");
  Mat edges(n, n);
  for (int i = 0; i < n; ++i) edges.row(i) = verts.row(i + 1) - verts.row(0);
  double det = edges.determinant();
  double volume = std::abs(det);
  for (int i = 2; i <= n; ++i) volume /= i;
  if (volume <= 0) throw Degenerate("simplex_moments: degenerate simplex");
  MomentData m;
  m.volume = volume;
  m.barycenter = verts.colwise().mean().transpose();
  Vec s = verts.colwise().sum().transpose();
  Mat outer = Mat::Zero(n, n);
  for (int i = 0; i <= n; ++i)
    outer += verts.row(i).transpose() * verts.row(i);
  m.second_moment = (outer + s * s.transpose()) / double((n + 1) * (n + 2));
  m.covariance = m.second_moment - m.barycenter * m.barycenter.transpose();
  return m;
}

/// Exact moments of a V-polytope by a fan triangulation from an interior
/// apex over the boundary; independent of the apex by additivity.
inline MomentData body_moments(const VPolytope& p,
                               std::optional<Vec> apex = std::nullopt) {
  const int n = p.dim;
  if (n == 1) {
    double lo = p.vertices.col(0).minCoeff();
    double hi = p.vertices.col(0).maxCoeff();
    if (hi - lo <= 0) throw Degenerate("body_moments: flat segment");
    MomentData m;
    m.volume = hi - lo;
    m.barycenter = Vec::Constant(1, 0.5 * (lo + hi));
    m.second_moment = Mat::Constant(1, 1, (lo * lo + lo * hi + hi * hi) / 3.0);
    m.covariance = m.second_moment - m.barycenter * m.barycenter.transpose();
    return m;
  }
  HPolytope facets = hrep_of(p);
  std::vector<std::vector<int>> boundary = boundary_triangulation(p, facets);
  Vec a = apex.value_or(vertex_centroid(p));
  std::vector<MomentData> parts;
  parts.reserve(boundary.size());
  Mat simplex(n + 1, n);
  for (const std::vector<int>& b : boundary) {
    simplex.row(0) = a.transpose();
    for (int i = 0; i < n; ++i) simplex.row(i + 1) = p.vertices.row(b[i]);
    Mat edges(n, n);
    for (int i = 0; i < n; ++i) edges.row(i) = simplex.row(i + 1) - simplex.row(0);
    if (std::abs(edges.determinant()) < 1e-300) continue;  // apex on this facet
    parts.push_back(simplex_moments(simplex));
  }
  return combine_weighted(parts);
}

inline double volume(const VPolytope& p) { return body_moments(p).volume; }

/// Isotropic constant L = (det cov / vol^2)^(1/(2n)).
inline double isotropic_constant(const MomentData& m, int n) {
  Eigen::LLT<Mat> llt(m.covariance);
  if (llt.info() != Eigen::Success)
    throw SingularCovariance("isotropic_constant: covariance not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return std::exp((logdet - 2.0 * std::log(m.volume)) / (2.0 * n));
}

/// Kuperberg bilinear functional on raw second moments: trace(M_K M_P).
/// Equals Tr[cov cov] only when both barycenters vanish, which is the
/// intended use; callers should center first.
inline double phi_functional(const MomentData& mk, const MomentData& mp) {
  if (mk.second_moment.rows() != mp.second_moment.rows())
    throw DimensionMismatch("phi_functional: dimension mismatch");
  return (mk.second_moment * mp.second_moment).trace();
}

/// True if the barycenter is negligible relative to the body's extent, the
/// regime where phi_functional equals the covariance form.
inline bool phi_centered_ok(const MomentData& m, double outer_radius) {
  return m.barycenter.norm() <= 1e-6 * std::max(1.0, outer_radius);
}

}  // namespace mahlerlab
