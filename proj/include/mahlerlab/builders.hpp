#pragma once

#include <cmath>

#include "mahlerlab/bodies.hpp"

namespace mahlerlab {

/// Simplex with vertices e_1..e_n and -(1,..,1): spans R^n, vertices sum to
/// zero.
inline VPolytope simplex_body(int n) {
  Mat v = Mat::Zero(n + 1, n);
  v.topRows(n) = Mat::Identity(n, n);
  v.row(n).setConstant(-1.0);
  return make_vpolytope(v);
}

inline VPolytope cube_body(int n, double half_side = 1.0) {
  Mat v(1 << n, n);
  for (int mask = 0; mask < (1 << n); ++mask)
    for (int j = 0; j < n; ++j)
      v(mask, j) = (mask >> j & 1) ? half_side : -half_side;
  return make_vpolytope(v);
}

inline VPolytope cross_body(int n, double radius = 1.0) {
  Mat v = Mat::Zero(2 * n, n);
  for (int j = 0; j < n; ++j) {
    v(2 * j, j) = radius;
    v(2 * j + 1, j) = -radius;
  }
  return make_vpolytope(v);
}

/// Reduced hull of m seeded unit-sphere points with the origin well interior.
inline VPolytope random_polytope(int n, int m, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0x706f6c79);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Mat v(m, n);
    for (int i = 0; i < m; ++i) v.row(i) = random_direction(n, rng).transpose();
    VPolytope p = make_vpolytope(v);
    if (origin_depth(p) > 0.05) return reduce(p);
  }
  throw Degenerate("random_polytope: could not place origin interior");
}

struct ApproxBody {
  HPolytope hull;
  bool approximate = true;
};

/// Outer halfspace approximation of the l_p unit ball from seeded directions
/// plus the coordinate axes.
inline ApproxBody lp_ball_approx(int n, double p, int facets, std::uint64_t seed = 17) {
  double q = (p <= 1.0) ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
  Rng rng = make_stream(seed, 0x6c706261);
  Mat normals(facets + 2 * n, n);
  for (int i = 0; i < facets; ++i) normals.row(i) = random_direction(n, rng).transpose();
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e[j] = 1.0;
    normals.row(facets + 2 * j) = e.transpose();
    normals.row(facets + 2 * j + 1) = -e.transpose();
  }
  Vec offs(normals.rows());
  for (int i = 0; i < normals.rows(); ++i) {
    Vec u = normals.row(i).transpose();
    double dual;
    if (std::isinf(q)) dual = u.cwiseAbs().maxCoeff();
    else if (q == 1.0) dual = u.cwiseAbs().sum();
    else dual = std::pow(u.cwiseAbs().array().pow(q).sum(), 1.0 / q);
    offs[i] = dual;
  }
  ApproxBody b;
  b.hull = HPolytope{n, normals, offs};
  return b;
}

// --- Euclidean projections used by the split solver -------------------------

inline Vec project_box(const Vec& x, double a) {
  return x.cwiseMax(-a).cwiseMin(a);
}

inline Vec project_ball(const Vec& x, double r) {
  double nx = x.norm();
  return nx <= r ? x : Vec(x * (r / nx));
}

/// Projection onto the l1 ball of radius r (sort-based soft threshold).
inline Vec project_l1(const Vec& x, double r) {
  if (x.cwiseAbs().sum() <= r) return x;
  Vec a = x.cwiseAbs();
  std::vector<double> s(a.data(), a.data() + a.size());
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (size_t k = 0; k < s.size(); ++k) {
    cum += s[k];
    double t = (cum - r) / double(k + 1);
    if (k + 1 == s.size() || t >= s[k + 1]) { theta = t; break; }
  }
  Vec out(x.size());
  for (int i = 0; i < x.size(); ++i) {
    double m = std::max(std::abs(x[i]) - theta, 0.0);
    out[i] = x[i] >= 0 ? m : -m;
  }
  return out;
}

inline Vec dykstra(const Vec& x, const std::function<Vec(const Vec&)>& pa,
                   const std::function<Vec(const Vec&)>& pb, int iters = 60) {
  Vec z = x, p = Vec::Zero(x.size()), q = Vec::Zero(x.size());
  for (int i = 0; i < iters; ++i) {
    Vec y = pa(z + p);
    p = z + p - y;
    z = pb(y + q);
    q = y + q - z;
  }
  return z;
}

// --- Standard oracle bodies ---------------------------------------------------

inline ConvexOracle ball_oracle(int n, double r = 1.0) {
  ConvexOracle o;
  o.dim = n;
  o.interior_point = Vec::Zero(n);
  o.inner_radius = r;
  o.outer_radius = r;
  o.contains = [r](const Vec& x, double tol) { return x.norm() <= r + tol; };
  o.gauge_fn = [r](const Vec& x) { return x.norm() / r; };
  o.project = [r](const Vec& x) { return project_ball(x, r); };
  return o;
}

inline ConvexOracle box_oracle(int n, double a = 1.0) {
  ConvexOracle o;
  o.dim = n;
  o.interior_point = Vec::Zero(n);
  o.inner_radius = a;
  o.outer_radius = a * std::sqrt(double(n));
  o.contains = [a](const Vec& x, double tol) {
    return x.cwiseAbs().maxCoeff() <= a + tol;
  };
  o.gauge_fn = [a](const Vec& x) { return x.cwiseAbs().maxCoeff() / a; };
  o.project = [a](const Vec& x) { return project_box(x, a); };
  return o;
}

inline ConvexOracle l1_ball_oracle(int n, double r = 1.0) {
  ConvexOracle o;
  o.dim = n;
  o.interior_point = Vec::Zero(n);
  o.inner_radius = r / std::sqrt(double(n));
  o.outer_radius = r;
  o.contains = [r](const Vec& x, double tol) { return x.cwiseAbs().sum() <= r + tol; };
  o.gauge_fn = [r](const Vec& x) { return x.cwiseAbs().sum() / r; };
  o.project = [r](const Vec& x) { return project_l1(x, r); };
  return o;
}

/// B_1^n intersected with rho B_2^n (the section body K_1 of the
/// counterexample construction).
inline ConvexOracle l1_cap_ball_oracle(int n, double rho) {
  ConvexOracle o;
  o.dim = n;
  o.interior_point = Vec::Zero(n);
  o.inner_radius = std::min(1.0 / std::sqrt(double(n)), rho);
  o.outer_radius = std::min(1.0, rho);
  o.contains = [rho](const Vec& x, double tol) {
    return x.cwiseAbs().sum() <= 1.0 + tol && x.norm() <= rho + tol;
  };
  o.gauge_fn = [rho](const Vec& x) {
    return std::max(x.cwiseAbs().sum(), x.norm() / rho);
  };
  o.project = [rho](const Vec& x) {
    return dykstra(
        x, [](const Vec& z) { return project_l1(z, 1.0); },
        [rho](const Vec& z) { return project_ball(z, rho); });
  };
  return o;
}

/// Gauge of conv(B_inf, R B_2) as the infimal convolution
/// min_{alpha >= 0} [alpha + ||(|x| - alpha)_+||_2 / R], solved exactly on the
/// sorted segments (the objective is convex and piecewise smooth in alpha).
inline double linf_l2_hull_gauge(const Vec& x, double R) {
  const int m = static_cast<int>(x.size());
  std::vector<double> a(m);
  for (int i = 0; i < m; ++i) a[i] = std::abs(x[i]);
  std::sort(a.begin(), a.end());
  if (a.back() <= 0.0) return 0.0;
  if (R <= 1.0) return a.back();  // the ball lies inside the cube
  // suffix sums: active set for alpha in [a[j-1], a[j]] is {i >= j}
  std::vector<double> s1(m + 1, 0.0), s2(m + 1, 0.0);
  for (int j = m - 1; j >= 0; --j) {
    s1[j] = s1[j + 1] + a[j];
    s2[j] = s2[j + 1] + a[j] * a[j];
  }
  auto value = [&](double alpha) {
    double d2 = 0.0;
    for (int i = 0; i < m; ++i) {
      double t = a[i] - alpha;
      if (t > 0) d2 += t * t;
    }
    return alpha + std::sqrt(d2) / R;
  };
  // derivative sign: g(alpha) = R d(alpha) - (S1 - k alpha), increasing
  auto gsign = [&](double alpha, int j) {
    double k = m - j;
    double d2 = s2[j] - 2 * alpha * s1[j] + k * alpha * alpha;
    return R * std::sqrt(std::max(d2, 0.0)) - (s1[j] - k * alpha);
  };
  if (gsign(0.0, 0) >= 0.0) return value(0.0);
  double lo = 0.0;
  for (int j = 0; j < m; ++j) {
    double hi = a[j];
    if (hi <= lo) { lo = hi; continue; }
    if (gsign(hi, j) >= 0.0) {
      // root of R^2 d^2 = (S1 - k alpha)^2 inside [lo, hi]
      double k = m - j, S1 = s1[j], S2 = s2[j];
      double qa = k * (R * R - k);
      double qb = -2.0 * S1 * (R * R - k);
      double qc = R * R * S2 - S1 * S1;
      double root = hi;
      if (std::abs(qa) > 1e-300) {
        double disc = qb * qb - 4 * qa * qc;
        if (disc >= 0) {
          double sq = std::sqrt(disc);
          for (double cand : {(-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)}) {
            if (cand >= lo - 1e-12 && cand <= hi + 1e-12 && S1 - k * cand >= -1e-12) {
              root = std::clamp(cand, lo, hi);
              break;
            }
          }
        }
      }
      return value(root);
    }
    lo = hi;
  }
  return value(a.back());
}

/// conv(B_inf^n, R B_2^n), the polar of B_1 cap (1/R) B_2 up to scaling.
inline ConvexOracle linf_l2_hull_oracle(int n, double R) {
  ConvexOracle o;
  o.dim = n;
  o.interior_point = Vec::Zero(n);
  o.inner_radius = std::max(1.0, R);
  o.outer_radius = std::max(std::sqrt(double(n)), R);
  o.gauge_fn = [R](const Vec& x) { return linf_l2_hull_gauge(x, R); };
  o.contains = [R](const Vec& x, double tol) {
    return linf_l2_hull_gauge(x, R) <= 1.0 + tol;
  };
  return o;
}

inline ConvexOracle oracle_from_hpolytope(const HPolytope& h, double inner,
                                          double outer) {
  ConvexOracle o;
  o.dim = h.dim;
  o.interior_point = Vec::Zero(h.dim);
  o.inner_radius = inner;
  o.outer_radius = outer;
  HPolytope hh = h;
  o.contains = [hh](const Vec& x, double tol) {
    return ((hh.normals * x - hh.offsets).array() <= tol).all();
  };
  o.gauge_fn = [hh](const Vec& x) { return gauge(hh, x); };
  return o;
}

}  // namespace mahlerlab
