#pragma once

#include "mahlerlab/legendre.hpp"

namespace mahlerlab {

/// Floating-body membership as a sublevel set of the Legendre transform:
/// x in V_delta iff Phi_V^*(x) <= kappa_float(n) - log delta.
inline bool floating_contains(const PolyhedralCone& v, double delta, const Vec& x,
                              double tol = 0.0) {
  LegendreResult r = legendre(v, x);
  return r.value <= kappa_float(v.ambient - 1) - std::log(delta) + tol;
}

/// Signed slack of the sublevel test (positive inside V_delta).
inline double floating_margin(const PolyhedralCone& v, double delta, const Vec& x) {
  return kappa_float(v.ambient - 1) - std::log(delta) - legendre(v, x).value;
}

/// Volume of the truncated cone C_y = {z in V : <z,y> >= -1} by exact section
/// geometry (pyramid over K_y), with no use of the transform.
inline double truncated_cone_volume(const PolyhedralCone& v, const Vec& y) {
  SectionMoments sm = section_moments(v, y);
  return sm.chart.volume / (v.ambient * y.norm());
}

/// Independent floating-body oracle: minimize Vol(C_y) over y in T_x by
/// multistart derivative-free descent in the chart of T_x, and compare the
/// smallest cap volume against delta.
inline double min_cap_volume(const PolyhedralCone& v, const PolyhedralCone& vdual,
                             const Vec& x, int trials, std::uint64_t seed = 1234) {
  SectionBody tx = section(vdual, x);
  const int n = tx.chart.dim;
  auto logvol = [&](const Vec& c) {
    Vec y = tx.origin + tx.basis * c;
    if (!in_dual_interior(v, y, 1e-13 * y.norm()))
      return std::numeric_limits<double>::infinity();
    try {
      return std::log(truncated_cone_volume(v, y));
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  // starts: chart barycenter plus random convex combinations of the vertices
  Rng rng = make_stream(seed, 0x666c6f61);
  std::vector<Vec> starts;
  starts.push_back(vertex_centroid(tx.chart));
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (int t = 1; t < trials; ++t) {
    Vec w(tx.chart.vertices.rows());
    for (int i = 0; i < w.size(); ++i) w[i] = gamma(rng);
    w /= w.sum();
    starts.push_back(tx.chart.vertices.transpose() * w);
  }
  double best = std::numeric_limits<double>::infinity();
  double diam = 2.0 * circumradius(tx.chart);
  for (const Vec& s : starts) {
    Vec c = nelder_mead(logvol, s, 0.05 * diam, 500, 1e-14);
    c = nelder_mead(logvol, c, 0.005 * diam, 300, 1e-14);
    best = std::min(best, logvol(c));
  }
  (void)n;
  return std::exp(best);
}

inline bool floating_oracle(const PolyhedralCone& v, const PolyhedralCone& vdual,
                            double delta, const Vec& x, int trials = 8,
                            std::uint64_t seed = 1234) {
  return min_cap_volume(v, vdual, x, trials, seed) >= delta;
}

// ---------------------------------------------------------------------------
// Self-convolution Psi_V(x) = -log Vol(V cap (x - V))
// ---------------------------------------------------------------------------

inline double self_convolution(const PolyhedralCone& v, const PolyhedralCone& vdual,
                               const Vec& x) {
  const int d = v.ambient;
  const Mat& normals = vdual.rays;  // facet normals of V
  const int m = static_cast<int>(normals.rows());
  Mat a(2 * m, d);
  Vec b(2 * m);
  a.topRows(m) = normals;
  b.head(m).setZero();
  a.bottomRows(m) = -normals;
  b.tail(m) = -(normals * x);
  VPolytope cap;
  try {
    cap = vertices_of(HPolytope{d, a, b});
  } catch (const Degenerate&) {
    throw EmptyIntersection("self_convolution: x outside the open cone");
  }
  if (cap.vertices.rows() < d + 1)
    throw EmptyIntersection("self_convolution: intersection not full-dimensional");
  return -std::log(body_moments(cap).volume);
}

/// Slack of the sandwich lower bound Psi >= Phi* + kappa_conv; zero exactly
/// when the matched section T_x is centrally symmetric.
inline double convolution_lower_slack(const PolyhedralCone& v,
                                      const PolyhedralCone& vdual, const Vec& x) {
  double psi = self_convolution(v, vdual, x);
  double phistar = legendre(v, x).value;
  return psi - phistar - kappa_conv(v.ambient - 1);
}

/// (Psi - Phi*)/n, the per-dimension slack of the crude upper bound.
inline double convolution_upper_slack(const PolyhedralCone& v,
                                      const PolyhedralCone& vdual, const Vec& x) {
  double psi = self_convolution(v, vdual, x);
  double phistar = legendre(v, x).value;
  return (psi - phistar) / (v.ambient - 1.0);
}

}  // namespace mahlerlab
