#include <catch2/catch_amalgamated.hpp>

#include "mahlerlab/builders.hpp"
#include "mahlerlab/legendre.hpp"

using namespace mahlerlab;

namespace {

Vec random_dual_point(const PolyhedralCone& v, Rng& rng, double spread = 1.0) {
  std::uniform_real_distribution<double> unif(0.2, 1.8);
  Vec y = v.interior_dual;
  Mat basis = orthonormal_complement(v.interior_dual);
  for (int attempt = 0; attempt < 200; ++attempt) {
    Vec cand = y * unif(rng) + spread * 0.3 * (basis * random_direction(v.ambient - 1, rng));
    if (in_dual_interior(v, cand, 0.02 * cand.norm())) return cand;
  }
  return y;
}

Vec random_primal_point(const PolyhedralCone& v, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Vec x = Vec::Zero(v.ambient);
  for (int i = 0; i < v.rays.rows(); ++i) x += unif(rng) * v.rays.row(i).transpose();
  return x;
}

}  // namespace

TEST_CASE("orthant log-Laplace transform is -sum log|y_i|") {
  Rng rng = make_stream(2, 0);
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  for (int n : {1, 2, 4}) {
    PolyhedralCone v = orthant_cone(n + 1);
    Vec y(n + 1);
    for (int i = 0; i <= n; ++i) y[i] = -unif(rng);
    double expect = -y.cwiseAbs().array().log().sum();
    CHECK(laplace_value(v, y) == Catch::Approx(expect).margin(1e-12));
  }
}

TEST_CASE("laplace_eval refuses points outside the open dual cone") {
  PolyhedralCone v = orthant_cone(2);
  Vec y(2);
  y << -1.0, 0.5;
  CHECK_THROWS_AS(laplace_value(v, y), OutsideDualInterior);
}

TEST_CASE("homogeneity Phi(t y) = Phi(y) - (n+1) log t") {
  Rng rng = make_stream(3, 0);
  std::uniform_real_distribution<double> unif(0.3, 2.5);
  for (std::uint64_t seed : {1u, 2u}) {
    PolyhedralCone v = random_simplicial_cone(4, seed);
    Vec y = random_dual_point(v, rng);
    double base = laplace_value(v, y);
    for (int k = 0; k < 3; ++k) {
      double t = unif(rng);
      CHECK(laplace_value(v, t * y) ==
            Catch::Approx(base - 4.0 * std::log(t)).margin(1e-9));
    }
  }
}

TEST_CASE("Euler relation <grad Phi, y> = -(n+1)") {
  Rng rng = make_stream(4, 0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    PolyhedralCone v = seed == 3 ? cone_over(cube_body(3)) : random_simplicial_cone(4, seed);
    for (int k = 0; k < 5; ++k) {
      Vec y = random_dual_point(v, rng);
      LaplaceEval ev = laplace_eval(v, y);
      CHECK(ev.gradient.dot(y) == Catch::Approx(-double(v.ambient)).margin(1e-9));
    }
  }
}

TEST_CASE("gradient and hessian match central finite differences") {
  Rng rng = make_stream(5, 0);
  const double h = 1e-5;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    PolyhedralCone v = random_simplicial_cone(4, seed);
    Vec y = random_dual_point(v, rng);
    LaplaceEval ev = laplace_eval(v, y);
    double scale_g = ev.gradient.norm();
    for (int j = 0; j < 4; ++j) {
      Vec e = Vec::Zero(4);
      e[j] = h * std::max(1.0, y.norm());
      double fd = (laplace_value(v, y + e) - laplace_value(v, y - e)) / (2.0 * e[j]);
      CHECK(std::abs(ev.gradient[j] - fd) <= 1e-5 * std::max(1.0, scale_g));
      Vec fd_row = (laplace_eval(v, y + e).gradient - laplace_eval(v, y - e).gradient) / (2.0 * e[j]);
      CHECK((ev.hessian.col(j) - fd_row).norm() <=
            1e-5 * std::max(1.0, ev.hessian.norm()));
    }
  }
}

TEST_CASE("third derivative matches finite differences of the hessian") {
  Rng rng = make_stream(6, 0);
  PolyhedralCone v = random_simplicial_cone(3, 21);
  Vec y = random_dual_point(v, rng);
  std::vector<Mat> third = laplace_third(v, y);
  const double h = 1e-5 * std::max(1.0, y.norm());
  for (int k = 0; k < 3; ++k) {
    Vec e = Vec::Zero(3);
    e[k] = h;
    Mat fd = (laplace_eval(v, y + e).hessian - laplace_eval(v, y - e).hessian) / (2.0 * h);
    CHECK((third[k] - fd).cwiseAbs().maxCoeff() <=
          1e-4 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("sections of cone_over(K) at y = -e recover {1} x K") {
  VPolytope k = random_polytope(2, 7, 9);
  PolyhedralCone v = cone_over(k);
  Vec y = Vec::Zero(3);
  y[0] = -1.0;
  SectionBody s = section(v, y);
  CHECK((s.vertices_ambient.col(0).array() - 1.0).abs().maxCoeff() < 1e-12);
  // remaining coordinates are exactly the vertices of K
  CHECK((s.vertices_ambient.rightCols(2) - k.vertices).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("orthant section at y = -(1,..,1) is the standard simplex") {
  const int d = 4;
  PolyhedralCone v = orthant_cone(d);
  Vec y = -Vec::Ones(d);
  SectionMoments sm = section_moments(v, y);
  CHECK((sm.barycenter_ambient - Vec::Constant(d, 1.0 / d)).norm() < 1e-12);
}

TEST_CASE("gradient equals (n+1) times the section barycenter") {
  Rng rng = make_stream(7, 0);
  for (std::uint64_t seed : {31u, 32u}) {
    PolyhedralCone v = seed == 32 ? cone_over(cross_body(3)) : random_simplicial_cone(4, seed);
    for (int k = 0; k < 3; ++k) {
      Vec y = random_dual_point(v, rng);
      LaplaceEval ev = laplace_eval(v, y);
      SectionMoments sm = section_moments(v, y);
      CHECK((ev.gradient - double(v.ambient) * sm.barycenter_ambient).norm() <=
            1e-8 * ev.gradient.norm());
    }
  }
}

TEST_CASE("exp(Phi) equals n! Vol(K_y) / |y|") {
  Rng rng = make_stream(8, 0);
  PolyhedralCone v = cone_over(cube_body(2));
  for (int k = 0; k < 4; ++k) {
    Vec y = random_dual_point(v, rng);
    SectionMoments sm = section_moments(v, y);
    double expect = log_factorial(2) + std::log(sm.chart.volume) - std::log(y.norm());
    CHECK(laplace_value(v, y) == Catch::Approx(expect).margin(1e-10));
  }
}

TEST_CASE("legendre transform on the orthant has the closed form") {
  Rng rng = make_stream(9, 0);
  std::uniform_real_distribution<double> unif(0.3, 2.0);
  for (int n : {1, 2, 4}) {
    PolyhedralCone v = orthant_cone(n + 1);
    Vec x(n + 1);
    for (int i = 0; i <= n; ++i) x[i] = unif(rng);
    LegendreResult r = legendre(v, x);
    double expect = -(n + 1.0) - x.array().log().sum();
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(expect).margin(1e-9));
    // argmax is y_i = -1/x_i
    CHECK((r.argmax + x.cwiseInverse()).norm() < 1e-8);
  }
}

TEST_CASE("legendre rejects points outside the primal cone") {
  PolyhedralCone v = orthant_cone(3);
  Vec x(3);
  x << 1.0, -0.5, 1.0;
  CHECK_THROWS_AS(legendre(v, x), NotInteriorPrimal);
}

TEST_CASE("gradient maps are mutually inverse") {
  Rng rng = make_stream(10, 0);
  for (std::uint64_t seed : {41u, 42u}) {
    PolyhedralCone v = random_simplicial_cone(4, seed);
    for (int k = 0; k < 5; ++k) {
      Vec x = random_primal_point(v, rng);
      LegendreResult r = legendre(v, x);
      REQUIRE(r.converged);
      LaplaceEval ev = laplace_eval(v, r.argmax);
      CHECK((ev.gradient - x).norm() <= 1e-7 * x.norm());
      // Fenchel identity at the maximizer
      CHECK(r.value + ev.value == Catch::Approx(x.dot(r.argmax)).margin(1e-9));
      // hessian of Phi* is the inverse hessian of Phi
      Mat prod = ev.hessian * ev.hessian.inverse();
      CHECK((prod - Mat::Identity(4, 4)).norm() < 1e-8);
    }
  }
}

TEST_CASE("legendre homogeneity Phi*(t x) = Phi*(x) - (n+1) log t") {
  Rng rng = make_stream(11, 0);
  std::uniform_real_distribution<double> unif(0.4, 2.2);
  PolyhedralCone v = random_simplicial_cone(4, 77);
  Vec x = random_primal_point(v, rng);
  double base = legendre(v, x).value;
  for (int k = 0; k < 3; ++k) {
    double t = unif(rng);
    CHECK(legendre(v, t * x).value == Catch::Approx(base - 4.0 * std::log(t)).margin(1e-8));
  }
}

TEST_CASE("J on the orthant equals n+1") {
  Rng rng = make_stream(12, 0);
  std::uniform_real_distribution<double> unif(0.2, 2.5);
  for (int n : {1, 2, 3, 5}) {
    PolyhedralCone v = orthant_cone(n + 1);
    PolyhedralCone w = dual_cone(v);
    for (int k = 0; k < 4; ++k) {
      Vec x(n + 1);
      for (int i = 0; i <= n; ++i) x[i] = unif(rng);
      JEval j = j_functional(v, w, x);
      CHECK(j.j == Catch::Approx(n + 1.0).margin(1e-8));
    }
  }
}

TEST_CASE("sbar from J at n=1 recovers the segment's Mahler volume 4") {
  Mat seg(2, 1);
  seg << -1, 1;
  PolyhedralCone v = cone_over(make_vpolytope(seg));
  PolyhedralCone w = dual_cone(v);
  Vec e(2);
  e << 1.0, 0.0;
  JEval j = j_functional(v, w, e);
  CHECK(j.sbar == Catch::Approx(4.0).margin(1e-8));
}

TEST_CASE("J is additive under cartesian products") {
  PolyhedralCone v1 = cone_over(cube_body(1));
  PolyhedralCone v2 = random_simplicial_cone(3, 5);
  PolyhedralCone prod = cartesian_product(v1, v2);
  PolyhedralCone v1d = dual_cone(v1), v2d = dual_cone(v2), prodd = dual_cone(prod);
  Rng rng = make_stream(13, 0);
  for (int k = 0; k < 3; ++k) {
    Vec x1 = random_primal_point(v1, rng);
    Vec x2 = random_primal_point(v2, rng);
    Vec x(5);
    x << x1, x2;
    double lhs = j_functional(prod, prodd, x).j;
    double rhs = j_functional(v1, v1d, x1).j + j_functional(v2, v2d, x2).j;
    CHECK(lhs == Catch::Approx(rhs).margin(1e-7));
  }
}

TEST_CASE("diagonal automorphisms shift Phi by -log|det T| on the orthant") {
  Rng rng = make_stream(14, 0);
  std::uniform_real_distribution<double> unif(0.4, 2.0);
  const int d = 4;
  PolyhedralCone v = orthant_cone(d);
  Vec y(d);
  for (int i = 0; i < d; ++i) y[i] = -unif(rng);
  for (int k = 0; k < 3; ++k) {
    Vec diag(d);
    double logdet = 0.0;
    for (int i = 0; i < d; ++i) {
      diag[i] = unif(rng);
      logdet += std::log(diag[i]);
    }
    CHECK(laplace_value(v, Vec(diag.cwiseProduct(y))) ==
          Catch::Approx(laplace_value(v, y) - logdet).margin(1e-9));
  }
}
