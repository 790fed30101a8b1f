#pragma once

#include "mahlerlab/laplace.hpp"

namespace mahlerlab {

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

/// kappa in J(x) = kappa + log sbar(T_x):  2 log n! - (n+1) log((n+1)/e).
inline double kappa_mahler(int n) {
  return 2.0 * log_factorial(n) - (n + 1.0) * std::log((n + 1.0) / std::exp(1.0));
}

/// kappa in the floating-body sublevel description of V_delta.
inline double kappa_float(int n) {
  return (n + 1.0) * std::log((n + 1.0) / std::exp(1.0)) - log_factorial(n + 1);
}

/// kappa in the self-convolution lower bound Psi >= Phi* + kappa.
inline double kappa_conv(int n) {
  return n * std::log(2.0) + log_factorial(n + 1) -
         (n + 1.0) * std::log((n + 1.0) / std::exp(1.0));
}

/// log of (n+1)^{n+1} (n+2)^n / (n!)^2, the constant linking det Hess Phi_V
/// to the section's isotropic constant.
inline double log_kappa_slice(int n) {
  return (n + 1.0) * std::log(n + 1.0) + n * std::log(n + 2.0) - 2.0 * log_factorial(n);
}

/// Legendre transform solve: the maximizer of <x,y> - Phi_V(y) over the open
/// dual cone, with certificates of optimality.
struct LegendreResult {
  double value = 0.0;           // Phi_V^*(x)
  Vec argmax;                   // y* with grad Phi_V(y*) = x
  int iterations = 0;
  double final_gradient_norm = 0.0;
  bool converged = false;
};

/// Damped Newton ascent of g(y) = <x,y> - Phi_V(y): Armijo backtracking
/// (c = 1e-4, shrink 0.5) under a 0.95 fraction-to-boundary rule on the ray
/// products.  Start point is the analytic optimum for the triangulation cell
/// containing x when that point is dual-feasible, else the cone's dual seed;
/// either way it is rescaled to the optimal radial position first.
inline LegendreResult legendre(const PolyhedralCone& v, const Vec& x, double tol = 1e-10) {
  const int d = v.ambient;
  const int n = d - 1;
  if (cone_membership_margin(v, x) < -1e-9 * std::max(1.0, x.norm()))
    throw NotInteriorPrimal("legendre: x outside the cone");

  // candidate start from the cell containing x
  Vec y;
  {
    Mat g(d, d);
    double best_margin = -1.0;
    Vec best_y;
    for (const auto& cell : v.cells) {
      for (int i = 0; i < d; ++i) g.col(i) = v.rays.row(cell[i]).transpose();
      Vec a = g.partialPivLu().solve(x);
      if (a.minCoeff() <= 1e-12) continue;
      Vec cand = g.transpose().partialPivLu().solve(Vec(-a.cwiseInverse()));
      Vec prods = v.rays * cand;
      double margin = -prods.maxCoeff();
      if (margin > best_margin) { best_margin = margin; best_y = cand; }
    }
    if (best_margin > 1e-10) y = best_y;
    else y = v.interior_dual;
  }
  // optimal radial rescale: s* = -(n+1)/<x,y>
  double xy = x.dot(y);
  if (xy >= 0) y = v.interior_dual, xy = x.dot(y);
  y *= -(n + 1.0) / xy;

  LegendreResult res;
  LaplaceEval ev = laplace_eval(v, y);
  double gval = x.dot(y) - ev.value;
  const double armijo = 1e-4;
  for (int it = 0; it < 200; ++it) {
    Vec grad = x - ev.gradient;
    res.final_gradient_norm = grad.norm();
    res.iterations = it;
    if (res.final_gradient_norm <= tol * std::max(1.0, x.norm())) {
      res.converged = true;
      break;
    }
    Vec step = ev.hessian.llt().solve(grad);
    // fraction to boundary on p_i = -<y,g_i>
    Vec prods = -(v.rays * y);
    Vec dstep = -(v.rays * step);
    double tmax = 1.0;
    for (int i = 0; i < prods.size(); ++i) {
      if (dstep[i] < 0) tmax = std::min(tmax, -0.95 * prods[i] / dstep[i]);
    }
    double t = tmax;
    double slope = grad.dot(step);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vec ytrial = y + t * step;
      if (in_dual_interior(v, ytrial)) {
        LaplaceEval etrial = laplace_eval(v, ytrial);
        double gtrial = x.dot(ytrial) - etrial.value;
        if (gtrial >= gval + armijo * t * slope) {
          y = ytrial;
          ev = etrial;
          gval = gtrial;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;  // stalled; report best iterate
  }
  res.value = gval;
  res.argmax = y;
  return res;
}

/// J = Phi_{V*} - Phi_V^* evaluated with a supplied (triangulated) dual cone.
struct JEval {
  double j = 0.0;
  double laplace_dual = 0.0;     // Phi_{V*}(x)
  double legendre_value = 0.0;   // Phi_V^*(x)
  double sbar = 0.0;             // exp(J - kappa_mahler(n)) = sbar(T_x)
  LegendreResult legendre_detail;
};

inline JEval j_functional(const PolyhedralCone& v, const PolyhedralCone& vdual,
                          const Vec& x) {
  JEval out;
  out.laplace_dual = laplace_value(vdual, x);
  out.legendre_detail = legendre(v, x);
  out.legendre_value = out.legendre_detail.value;
  out.j = out.laplace_dual - out.legendre_value;
  out.sbar = std::exp(out.j - kappa_mahler(v.ambient - 1));
  return out;
}

inline JEval j_functional(const PolyhedralCone& v, const Vec& x) {
  return j_functional(v, dual_cone(v), x);
}

}  // namespace mahlerlab
