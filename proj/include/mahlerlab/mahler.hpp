#pragma once

#include "mahlerlab/legendre.hpp"

namespace mahlerlab {

/// Mahler volume of K with respect to an interior point p, via exact volumes
/// of K - p and its polar.
inline double mahler_at(const VPolytope& k, const Vec& p, double tol = 1e-9) {
  VPolytope shifted = translate(k, -p);
  if (origin_depth(shifted) <= tol * std::max(1.0, circumradius(shifted)))
    throw PointNotInterior("mahler_at: point not interior");
  double vk = body_moments(shifted).volume;
  double vp = body_moments(vertices_of(polar(shifted))).volume;
  return vk * vp;
}

struct SantaloResult {
  double sbar = 0.0;        // from the cone/Legendre route
  Vec point;                // Santalo point of K
  double sbar_direct = 0.0; // exact Mahler volume at the found point
  double sbar_fallback = 0.0;
  Vec point_fallback;
  double route_gap = 0.0;   // relative disagreement between the two routes
};

/// Santalo point and minimal Mahler volume.  Primary route: K is the section
/// {1} x K of cone_over(K), whose Santalo point is read off the Legendre
/// argmax over the dual cone; fallback: direct derivative-free minimization
/// of p -> s_p(K).  Both are computed and compared.
inline SantaloResult mahler_santalo(const VPolytope& k, double tol = 1e-9) {
  const int n = k.dim;
  Vec shift = vertex_centroid(k);
  VPolytope kc = translate(k, -shift);
  if (origin_depth(kc) <= tol) throw Degenerate("mahler_santalo: flat body");

  PolyhedralCone v = cone_over(kc);
  VPolytope kpolar = vertices_of(polar(kc));
  PolyhedralCone vdual = dual_of_cone_over(kpolar, v);
  Vec minus_e = Vec::Zero(n + 1);
  minus_e[0] = -1.0;
  // J on the dual cone at -e: Phi_{(V*)*} = Phi_V, and the Legendre argmax
  // over int(V) rescales to the Santalo point of the section {1} x K.
  LegendreResult lr = legendre(vdual, minus_e);
  double j = laplace_value(v, minus_e) - lr.value;
  SantaloResult out;
  out.sbar = std::exp(j - kappa_mahler(n));
  Vec t = lr.argmax / (n + 1.0);  // lies on {z_0 = 1}
  out.point = t.tail(n) + shift;
  out.sbar_direct = mahler_at(k, out.point);

  // derivative-free fallback from the body barycenter
  MomentData m = body_moments(kc);
  auto objective = [&](const Vec& p) {
    try {
      return mahler_at(kc, p);
    } catch (const PointNotInterior&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  Vec p0 = nelder_mead(objective, m.barycenter, 0.05 * circumradius(kc), 400, 1e-13);
  out.point_fallback = p0 + shift;
  out.sbar_fallback = mahler_at(kc, p0);
  out.route_gap = std::abs(out.sbar_fallback - out.sbar) / out.sbar;
  return out;
}

// ---------------------------------------------------------------------------
// Product identity: three independent routes to the same Mahler volume
// ---------------------------------------------------------------------------

/// Mahler volume of a cone section at an interior point of the section,
/// computed exactly in the section's chart.
inline double section_mahler_at(const SectionBody& s, const Vec& ambient_point) {
  Vec q = s.basis.transpose() * (ambient_point - s.origin);
  return mahler_at(s.chart, q);
}

struct ProductIdentity {
  double section_primal = 0.0;  // s_{r x0}(K_{y0})
  double section_dual = 0.0;    // s_{r y0}(T_{x0})
  double transform_product = 0.0;
  double residual = 0.0;        // max relative discrepancy
};

inline ProductIdentity product_identity_check(const PolyhedralCone& v,
                                              const PolyhedralCone& vdual,
                                              const Vec& x0, const Vec& y0) {
  const int n = v.ambient - 1;
  double ip = x0.dot(y0);
  if (ip >= 0) throw Error("product_identity_check: <x0,y0> must be negative");
  double r = -1.0 / ip;
  ProductIdentity out;
  out.section_primal = section_mahler_at(section(v, y0), r * x0);
  out.section_dual = section_mahler_at(section(vdual, x0), r * y0);
  double logc = (n + 1.0) * std::log(-ip) - 2.0 * log_factorial(n) +
                laplace_value(v, y0) + laplace_value(vdual, x0);
  out.transform_product = std::exp(logc);
  double lo = std::min({out.section_primal, out.section_dual, out.transform_product});
  double hi = std::max({out.section_primal, out.section_dual, out.transform_product});
  out.residual = (hi - lo) / hi;
  return out;
}

// ---------------------------------------------------------------------------
// Tilde polarity of the matched sections K_y - x and T_x - y
// ---------------------------------------------------------------------------

struct TildePolarity {
  bool polar = false;
  double vertex_residual = 0.0;
};

/// With <x,y> = -1, verifies that K_y - x (in y-perp) and T_x - y (in x-perp)
/// are exact polars under the ambient pairing, by computing the polar of each
/// side and matching vertex sets in the chart of the other.
inline TildePolarity tilde_polarity_check(const PolyhedralCone& v,
                                          const PolyhedralCone& vdual, const Vec& x,
                                          const Vec& y, double tol = 1e-8) {
  if (std::abs(x.dot(y) + 1.0) > 1e-9)
    throw Error("tilde_polarity_check: <x,y> must equal -1");
  SectionBody ky = section(v, y);
  SectionBody tx = section(vdual, x);
  Mat basis_x = orthonormal_complement(x);  // chart of the subspace x-perp
  Mat basis_y = orthonormal_complement(y);
  Mat ktilde = ky.vertices_ambient.rowwise() - x.transpose();
  Mat ttilde = tx.vertices_ambient.rowwise() - y.transpose();

  auto one_side = [&](const Mat& primal, const Mat& dual_expected, const Mat& chart) {
    // polar of primal inside the chart subspace: normals chart^T v_i
    Mat normals = primal * chart;
    HPolytope h{static_cast<int>(chart.cols()), normals, Vec::Ones(normals.rows())};
    VPolytope pol = vertices_of(h);
    Mat expected(dual_expected.rows(), chart.cols());
    for (int i = 0; i < dual_expected.rows(); ++i)
      expected.row(i) = dual_expected.row(i) * chart;
    VPolytope exp_poly = reduce(make_vpolytope(expected));
    if (pol.vertices.rows() != exp_poly.vertices.rows())
      return std::numeric_limits<double>::infinity();
    return (pol.vertices - exp_poly.vertices).cwiseAbs().maxCoeff();
  };

  double r1 = one_side(ktilde, ttilde, basis_x);
  double r2 = one_side(ttilde, ktilde, basis_y);
  TildePolarity out;
  out.vertex_residual = std::max(r1, r2);
  out.polar = out.vertex_residual <= tol;
  return out;
}

// ---------------------------------------------------------------------------
// Projective stationarity of J at the canonical section
// ---------------------------------------------------------------------------

enum class StationarityClass { CandidateMin, CandidateMax, Saddle, NotStationary };

struct Stationarity {
  Vec grad_j;             // (n+1)-vector (0, (n+1) b(K polar))
  Mat d_matrix;           // (n+2) cov(K polar) - cov(K)^{-1}/(n+2)
  double eig_min = 0.0;
  double eig_max = 0.0;
  StationarityClass classification = StationarityClass::NotStationary;
};

inline Stationarity projective_stationarity(const VPolytope& k, double tol = 1e-8) {
  const int n = k.dim;
  MomentData mk = body_moments(k);
  VPolytope kc = translate(k, -mk.barycenter);
  MomentData mkc = body_moments(kc);
  VPolytope kp = vertices_of(polar(kc));
  MomentData mp = body_moments(kp);
  Stationarity out;
  out.grad_j = Vec::Zero(n + 1);
  out.grad_j.tail(n) = (n + 1.0) * mp.barycenter;
  if (mp.barycenter.norm() <= tol * std::max(1.0, circumradius(kp))) {
    out.d_matrix = (n + 2.0) * mp.covariance -
                   mkc.covariance.inverse() / (n + 2.0);
    Eigen::SelfAdjointEigenSolver<Mat> eig(out.d_matrix);
    out.eig_min = eig.eigenvalues().minCoeff();
    out.eig_max = eig.eigenvalues().maxCoeff();
    double scale = std::max(1.0, out.d_matrix.cwiseAbs().maxCoeff());
    if (out.eig_min >= -tol * scale) out.classification = StationarityClass::CandidateMin;
    else if (out.eig_max <= tol * scale) out.classification = StationarityClass::CandidateMax;
    else out.classification = StationarityClass::Saddle;
  }
  return out;
}

/// L_K L_{K polar} s(K)^{1/n} - 1/(n+2), all factors exact, barycenter at the
/// origin.  Zero for the simplex.
inline double theorem11_gap(const VPolytope& k) {
  const int n = k.dim;
  MomentData mk = body_moments(k);
  VPolytope kc = translate(k, -mk.barycenter);
  MomentData m = body_moments(kc);
  VPolytope kp = vertices_of(polar(kc));
  MomentData mp = body_moments(kp);
  double lk = isotropic_constant(m, n);
  double lp = isotropic_constant(mp, n);
  double s = m.volume * mp.volume;
  return lk * lp * std::pow(s, 1.0 / n) - 1.0 / (n + 2.0);
}

}  // namespace mahlerlab
