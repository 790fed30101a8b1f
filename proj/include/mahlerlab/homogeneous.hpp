#pragma once

#include "mahlerlab/builders.hpp"
#include "mahlerlab/legendre.hpp"
#include "mahlerlab/montecarlo.hpp"

namespace mahlerlab {

/// Closed-form model of a symmetric cone: value/gradient/hessian of the
/// log-Laplace transform, its Legendre transform, and the constant value of
/// J = Phi_{V*} - Phi_V^* (all three kinds are self-dual, V* = -V).
struct AnalyticCone {
  enum class Kind { Orthant, Lorentz, Psd };
  Kind kind = Kind::Orthant;
  int ambient = 0;        // n+1
  int matrix_dim = 0;     // PSD only
  double c_n = 0.0;       // additive constant where applicable
  std::function<double(const Vec&)> phi;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
  std::function<double(const Vec&)> phi_star;  // at interior points of V
  double j_const = 0.0;
};

inline AnalyticCone orthant_model(int ambient) {
  AnalyticCone m;
  m.kind = AnalyticCone::Kind::Orthant;
  m.ambient = ambient;
  m.c_n = 0.0;
  m.phi = [ambient](const Vec& y) {
    if ((y.array() >= 0).any()) throw OutsideCone("orthant phi: need y < 0");
    return -y.array().abs().log().sum();
  };
  m.grad = [](const Vec& y) { return Vec(-y.cwiseInverse()); };
  m.hess = [](const Vec& y) { return Mat(y.cwiseProduct(y).cwiseInverse().asDiagonal()); };
  m.phi_star = [ambient](const Vec& x) {
    if ((x.array() <= 0).any()) throw OutsideCone("orthant phi*: need x > 0");
    return -double(ambient) - x.array().log().sum();
  };
  m.j_const = double(ambient);
  return m;
}

/// C_n = log(pi^{n/2} Gamma(n+1) / Gamma(1 + n/2)) for the Lorentz cone in
/// R^{n+1}.
inline double lorentz_cn(int n) {
  return 0.5 * n * std::log(M_PI) + std::lgamma(n + 1.0) - std::lgamma(1.0 + 0.5 * n);
}

inline double lorentz_quadratic(const Vec& y) {
  return y[0] * y[0] - y.tail(y.size() - 1).squaredNorm();
}

inline AnalyticCone lorentz_model(int n) {
  AnalyticCone m;
  m.kind = AnalyticCone::Kind::Lorentz;
  m.ambient = n + 1;
  m.c_n = lorentz_cn(n);
  auto check = [n](const Vec& y) {
    if (y[0] >= 0 || lorentz_quadratic(y) <= 0)
      throw OutsideCone("lorentz phi: y must lie in -int(V)");
  };
  m.phi = [m, check, n](const Vec& y) {
    check(y);
    return -0.5 * (n + 1.0) * std::log(lorentz_quadratic(y)) + m.c_n;
  };
  m.grad = [check, n](const Vec& y) {
    check(y);
    double q = lorentz_quadratic(y);
    Vec jy = y;
    jy.tail(y.size() - 1) *= -1.0;
    return Vec(-(n + 1.0) * jy / q);
  };
  m.hess = [check, n](const Vec& y) {
    check(y);
    const int d = static_cast<int>(y.size());
    double q = lorentz_quadratic(y);
    Vec jy = y;
    jy.tail(d - 1) *= -1.0;
    Mat jmat = -Mat::Identity(d, d);
    jmat(0, 0) = 1.0;
    return Mat(-(n + 1.0) * jmat / q + 2.0 * (n + 1.0) * jy * jy.transpose() / (q * q));
  };
  m.phi_star = [m, n](const Vec& x) {
    if (x[0] <= 0 || lorentz_quadratic(x) <= 0)
      throw OutsideCone("lorentz phi*: x must lie in int(V)");
    return -(n + 1.0) + (n + 1.0) * std::log(n + 1.0) -
           0.5 * (n + 1.0) * std::log(lorentz_quadratic(x)) - m.c_n;
  };
  m.j_const = 2.0 * m.c_n - (n + 1.0) * std::log((n + 1.0) / std::exp(1.0));
  return m;
}

// ---------------------------------------------------------------------------
// PSD cone of l x l symmetric matrices in the trace inner product
// ---------------------------------------------------------------------------

/// Orthonormal chart of symmetric matrices: diagonal entries as-is,
/// off-diagonal entries scaled by sqrt(2).  The induced volume form is the
/// one the trace inner product defines.
inline Mat sym_from_chart(const Vec& x, int l) {
  Mat a(l, l);
  int k = 0;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < l; ++i) a(i, i) = x[k++];
  for (int i = 0; i < l; ++i)
    for (int j = i + 1; j < l; ++j) {
      a(i, j) = a(j, i) = s * x[k++];
    }
  return a;
}

inline Vec chart_from_sym(const Mat& a) {
  const int l = static_cast<int>(a.rows());
  Vec x(l * (l + 1) / 2);
  int k = 0;
  const double s = std::sqrt(2.0);
  for (int i = 0; i < l; ++i) x[k++] = a(i, i);
  for (int i = 0; i < l; ++i)
    for (int j = i + 1; j < l; ++j) x[k++] = s * a(i, j);
  return x;
}

/// C_n for the PSD cone: n(n-1)/4 log(2 pi) + sum_{k<=n} log Gamma((k+1)/2).
inline double psd_cn(int l) {
  double c = 0.25 * l * (l - 1.0) * std::log(2.0 * M_PI);
  for (int k = 1; k <= l; ++k) c += std::lgamma(0.5 * (k + 1.0));
  return c;
}

/// One-step recursion C_l = C_{l-1} + (l-1)/2 log(2 pi) + log Gamma((l+1)/2).
inline double psd_cn_recursive(int l) {
  if (l <= 1) return 0.0;
  return psd_cn_recursive(l - 1) + 0.5 * (l - 1.0) * std::log(2.0 * M_PI) +
         std::lgamma(0.5 * (l + 1.0));
}

inline AnalyticCone psd_model(int l) {
  AnalyticCone m;
  m.kind = AnalyticCone::Kind::Psd;
  m.matrix_dim = l;
  m.ambient = l * (l + 1) / 2;
  m.c_n = psd_cn(l);
  const double p = 0.5 * (l + 1.0);
  auto neg_def = [l](const Vec& y) {
    Mat a = -sym_from_chart(y, l);
    Eigen::SelfAdjointEigenSolver<Mat> eig(a);
    if (eig.eigenvalues().minCoeff() <= 0)
      throw OutsideCone("psd phi: -y must be positive definite");
    return a;
  };
  m.phi = [m, neg_def, p](const Vec& y) {
    Mat a = neg_def(y);
    return -p * std::log(a.determinant()) + m.c_n;
  };
  m.grad = [neg_def, p, l](const Vec& y) {
    Mat a = neg_def(y);
    return Vec(p * chart_from_sym(a.inverse()));
  };
  m.hess = [neg_def, p, l](const Vec& y) {
    Mat a = neg_def(y);
    Mat ainv = a.inverse();
    const int d = l * (l + 1) / 2;
    Mat h(d, d);
    for (int j = 0; j < d; ++j) {
      Vec ej = Vec::Zero(d);
      ej[j] = 1.0;
      Mat hj = sym_from_chart(ej, l);
      h.col(j) = p * chart_from_sym(ainv * hj * ainv);
    }
    return h;
  };
  m.phi_star = [m, p, l](const Vec& x) {
    Mat a = sym_from_chart(x, l);
    Eigen::SelfAdjointEigenSolver<Mat> eig(a);
    if (eig.eigenvalues().minCoeff() <= 0)
      throw OutsideCone("psd phi*: x must be positive definite");
    const double bign = 0.5 * l * (l + 1.0);
    return bign * std::log(bign / std::exp(1.0)) - bign * std::log(double(l)) -
           p * std::log(a.determinant()) - m.c_n;
  };
  const double bign = 0.5 * l * (l + 1.0);
  m.j_const = 2.0 * m.c_n - bign * std::log(0.5 * (l + 1.0) / std::exp(1.0));
  return m;
}

/// Trace-one slice of the PSD cone as an oracle body in the traceless chart
/// around I/l; n = l(l+1)/2 - 1.
inline ConvexOracle psd_slice_oracle(int l) {
  const int n = l * (l + 1) / 2 - 1;
  // orthonormal basis of traceless symmetric matrices: the off-diagonal part
  // of the chart plus an orthonormalized diagonal complement of I/sqrt(l).
  Mat diag_basis(l, l - 1);
  for (int j = 0; j < l - 1; ++j) {
    Vec v = Vec::Zero(l);
    for (int i = 0; i <= j; ++i) v[i] = 1.0;
    v[j + 1] = -(j + 1.0);
    diag_basis.col(j) = v / v.norm();
  }
  auto to_matrix = [l, diag_basis](const Vec& x) {
    Mat a = Mat::Identity(l, l) / double(l);
    Vec d = diag_basis * x.head(l - 1);
    for (int i = 0; i < l; ++i) a(i, i) += d[i];
    int k = l - 1;
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < l; ++i)
      for (int j = i + 1; j < l; ++j) {
        double off = s * x[k++];
        a(i, j) += off;
        a(j, i) += off;
      }
    return a;
  };
  ConvexOracle o;
  o.dim = n;
  o.interior_point = Vec::Zero(n);
  o.inner_radius = 1.0 / std::sqrt(double(l) * (l - 1.0));
  o.outer_radius = std::sqrt(1.0 - 1.0 / l);
  o.contains = [to_matrix](const Vec& x, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(to_matrix(x));
    return eig.eigenvalues().minCoeff() >= -tol;
  };
  o.project = nullptr;
  return o;
}

/// Polar of the centered trace-one slice: {u : lambda_max(mat(u)) <= 1} in
/// the same traceless chart.
inline ConvexOracle psd_slice_polar_oracle(int l) {
  const int n = l * (l + 1) / 2 - 1;
  Mat diag_basis(l, l - 1);
  for (int j = 0; j < l - 1; ++j) {
    Vec v = Vec::Zero(l);
    for (int i = 0; i <= j; ++i) v[i] = 1.0;
    v[j + 1] = -(j + 1.0);
    diag_basis.col(j) = v / v.norm();
  }
  auto to_matrix = [l, diag_basis](const Vec& x) {
    Mat a = Mat::Zero(l, l);
    Vec d = diag_basis * x.head(l - 1);
    for (int i = 0; i < l; ++i) a(i, i) = d[i];
    int k = l - 1;
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < l; ++i)
      for (int j = i + 1; j < l; ++j) {
        double off = s * x[k++];
        a(i, j) += off;
        a(j, i) += off;
      }
    return a;
  };
  ConvexOracle o;
  o.dim = n;
  o.interior_point = Vec::Zero(n);
  o.inner_radius = std::sqrt(double(l) / (l - 1.0));
  o.outer_radius = std::sqrt(double(l) * (l - 1.0));
  o.contains = [to_matrix](const Vec& x, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(to_matrix(x));
    return eig.eigenvalues().maxCoeff() <= 1.0 + tol;
  };
  o.gauge_fn = [to_matrix](const Vec& x) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(to_matrix(x));
    return std::max(eig.eigenvalues().maxCoeff(), 0.0);
  };
  return o;
}

// ---------------------------------------------------------------------------
// Duality identities for sections of homogeneous cones
// ---------------------------------------------------------------------------

struct HomogeneousDualityReport {
  double cov_identity_err = 0.0;    // ||(n+2)^2 cov(K polar) cov(K) - I||_inf
  double polar_barycenter = 0.0;    // ||b(K polar)||
  double theorem_value = 0.0;       // L_K L_{K polar} s(K)^{1/n}
  double theorem_target = 0.0;      // 1/(n+2)
  bool exact = false;
  double mc_relative_error = 0.0;   // rough scale of MC uncertainty
};

/// Exact route for polytope sections (simplex and friends).
inline HomogeneousDualityReport verify_homogeneous_duality(const VPolytope& body) {
  const int n = body.dim;
  MomentData mb = body_moments(body);
  VPolytope kc = translate(body, -mb.barycenter);
  MomentData mk = body_moments(kc);
  VPolytope kp = vertices_of(polar(kc));
  MomentData mp = body_moments(kp);
  HomogeneousDualityReport r;
  r.exact = true;
  r.cov_identity_err =
      (std::pow(n + 2.0, 2.0) * mp.covariance * mk.covariance - Mat::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  r.polar_barycenter = mp.barycenter.norm();
  r.theorem_value = isotropic_constant(mk, n) * isotropic_constant(mp, n) *
                    std::pow(mk.volume * mp.volume, 1.0 / n);
  r.theorem_target = 1.0 / (n + 2.0);
  return r;
}

/// Monte Carlo route for oracle bodies (ball and PSD slices): rejection
/// sampling gives volumes and covariances for both the body and its polar.
inline HomogeneousDualityReport verify_homogeneous_duality(const ConvexOracle& body,
                                                           const ConvexOracle& polar_body,
                                                           long samples,
                                                           std::uint64_t seed) {
  const int n = body.dim;
  MCMoments mk = mc_moments(body, samples, seed);
  MCMoments mp = mc_moments(polar_body, samples, seed + 1);
  HomogeneousDualityReport r;
  r.exact = false;
  r.cov_identity_err = (std::pow(n + 2.0, 2.0) * mp.mean.covariance * mk.mean.covariance -
                        Mat::Identity(n, n))
                           .cwiseAbs()
                           .maxCoeff();
  r.polar_barycenter = mp.mean.barycenter.norm();
  r.theorem_value = isotropic_constant(mk.mean, n) * isotropic_constant(mp.mean, n) *
                    std::pow(mk.mean.volume * mp.mean.volume, 1.0 / n);
  r.theorem_target = 1.0 / (n + 2.0);
  r.mc_relative_error =
      std::max(mk.volume_error / mk.mean.volume, mp.volume_error / mp.mean.volume);
  return r;
}

/// Exact closed-form moments of a ball (the Lorentz-cone section).
inline MomentData ball_moments(int n, double radius = 1.0) {
  MomentData m;
  m.volume = std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0) * std::pow(radius, n);
  m.barycenter = Vec::Zero(n);
  m.second_moment = radius * radius / (n + 2.0) * Mat::Identity(n, n);
  m.covariance = m.second_moment;
  return m;
}

}  // namespace mahlerlab
