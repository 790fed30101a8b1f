#include <catch2/catch_amalgamated.hpp>

#include "mahlerlab/builders.hpp"
#include "mahlerlab/mahler.hpp"

using namespace mahlerlab;

namespace {

Vec dual_pt(const PolyhedralCone& v, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.4, 1.6);
  Mat basis = orthonormal_complement(v.interior_dual);
  for (int attempt = 0; attempt < 200; ++attempt) {
    Vec cand = v.interior_dual * unif(rng) +
               0.25 * (basis * random_direction(v.ambient - 1, rng));
    if (in_dual_interior(v, cand, 0.02 * cand.norm())) return cand;
  }
  return v.interior_dual;
}

double simplex_mahler(int n) {
  return std::pow(n + 1.0, n + 1.0) / std::pow(std::tgamma(n + 1.0), 2.0);
}

}  // namespace

TEST_CASE("Mahler volume of the centered simplex is (n+1)^{n+1}/(n!)^2") {
  CHECK(mahler_at(simplex_body(2), Vec::Zero(2)) == Catch::Approx(27.0 / 4).epsilon(1e-10));
  CHECK(mahler_at(simplex_body(3), Vec::Zero(3)) == Catch::Approx(simplex_mahler(3)).epsilon(1e-10));
}

TEST_CASE("Mahler volume of the cube is 4^n/n!") {
  for (int n : {2, 3, 4}) {
    double expect = std::pow(4.0, n) / std::tgamma(n + 1.0);
    CHECK(mahler_at(cube_body(n), Vec::Zero(n)) == Catch::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("mahler_at rejects exterior base points") {
  Vec p(2);
  p << 2.0, 0.0;
  CHECK_THROWS_AS(mahler_at(cube_body(2), p), PointNotInterior);
}

TEST_CASE("Santalo point of a centrally symmetric body is its center") {
  Vec shift(2);
  shift << 0.3, -0.2;
  VPolytope moved = translate(cube_body(2), shift);
  SantaloResult r = mahler_santalo(moved);
  CHECK((r.point - shift).norm() < 1e-6);
  CHECK(r.sbar == Catch::Approx(8.0).epsilon(1e-8));
  CHECK(r.route_gap < 1e-6);
}

TEST_CASE("Santalo solver on the simplex") {
  SantaloResult r = mahler_santalo(simplex_body(2));
  CHECK(r.point.norm() < 1e-7);
  CHECK(r.sbar == Catch::Approx(27.0 / 4).epsilon(1e-8));
  CHECK(r.sbar_direct == Catch::Approx(r.sbar).epsilon(1e-8));
  CHECK(r.route_gap < 1e-6);
}

TEST_CASE("Santalo solver on a random polytope agrees across routes") {
  VPolytope p = random_polytope(3, 9, 23);
  SantaloResult r = mahler_santalo(p);
  CHECK(r.route_gap < 1e-6);
  CHECK(r.sbar_direct == Catch::Approx(r.sbar).epsilon(1e-6));
  // the found point is a local minimum: nudges increase s_p
  Rng rng = make_stream(24, 0);
  for (int k = 0; k < 6; ++k) {
    Vec d = 1e-3 * random_direction(3, rng);
    CHECK(mahler_at(p, Vec(r.point + d)) >= r.sbar_direct - 1e-10);
  }
}

TEST_CASE("product identity on the orthant at x0 = 1, y0 = -1") {
  for (int d : {2, 3, 4}) {
    PolyhedralCone v = orthant_cone(d);
    PolyhedralCone w = dual_cone(v);
    ProductIdentity pi = product_identity_check(v, w, Vec::Ones(d), Vec(-Vec::Ones(d)));
    CHECK(pi.residual <= 1e-8);
    CHECK(pi.transform_product == Catch::Approx(simplex_mahler(d - 1)).epsilon(1e-8));
  }
}

TEST_CASE("unit-vector case reduces to the two-section identity") {
  VPolytope k = random_polytope(2, 6, 31);
  PolyhedralCone v = cone_over(k);
  PolyhedralCone w = dual_cone(v);
  Vec e = Vec::Zero(3);
  e[0] = 1.0;
  ProductIdentity pi = product_identity_check(v, w, e, Vec(-e));
  CHECK(pi.residual <= 1e-8);
  CHECK(pi.section_primal == Catch::Approx(pi.section_dual).epsilon(1e-9));
}

TEST_CASE("product identity on random simplicial cones") {
  Rng rng = make_stream(37, 0);
  for (int d : {3, 4, 5}) {
    for (std::uint64_t seed : {1u, 2u}) {
      PolyhedralCone v = random_simplicial_cone(d, 100 * d + seed);
      PolyhedralCone w = dual_cone(v);
      Vec y0 = dual_pt(v, rng);
      Vec x0 = dual_pt(w, rng);  // interior of V
      ProductIdentity pi = product_identity_check(v, w, x0, y0);
      CHECK(pi.residual <= 1e-6);
    }
  }
}

TEST_CASE("tilde polarity for the cone over the cube at the canonical pair") {
  PolyhedralCone v = cone_over(cube_body(2));
  PolyhedralCone w = dual_cone(v);
  Vec e = Vec::Zero(3);
  e[0] = 1.0;
  TildePolarity tp = tilde_polarity_check(v, w, e, Vec(-e));
  CHECK(tp.polar);
  CHECK(tp.vertex_residual <= 1e-9);
}

TEST_CASE("tilde polarity for a random cone at a matched pair") {
  Rng rng = make_stream(41, 0);
  for (std::uint64_t seed : {4u, 9u}) {
    PolyhedralCone v = random_simplicial_cone(4, seed);
    PolyhedralCone w = dual_cone(v);
    Vec y = dual_pt(v, rng);
    Vec x = laplace_eval(v, y).gradient / 4.0;  // <x,y> = -1 by the Euler relation
    REQUIRE(std::abs(x.dot(y) + 1.0) < 1e-10);
    TildePolarity tp = tilde_polarity_check(v, w, x, y);
    CHECK(tp.polar);
  }
}

TEST_CASE("projective stationarity of the simplex: flat hessian") {
  Stationarity s = projective_stationarity(simplex_body(3));
  CHECK(s.grad_j.norm() < 1e-9);
  CHECK(std::max(std::abs(s.eig_min), std::abs(s.eig_max)) < 1e-8);
  CHECK(s.classification == StationarityClass::CandidateMin);
}

TEST_CASE("projective stationarity of the cube: zero gradient by symmetry") {
  Stationarity s = projective_stationarity(cube_body(2));
  CHECK(s.grad_j.norm() < 1e-10);
  // D = 2/(n+1) - 3/(n+2) at n=2: -1/12 on the diagonal
  CHECK(s.eig_max == Catch::Approx(-1.0 / 12).margin(1e-9));
  CHECK(s.classification == StationarityClass::CandidateMax);
}

TEST_CASE("gradient of J matches finite differences on a perturbed simplex") {
  Rng rng = make_stream(47, 0);
  std::uniform_real_distribution<double> unif(-0.15, 0.15);
  VPolytope k = simplex_body(3);
  for (int i = 0; i < k.vertices.rows(); ++i)
    for (int j = 0; j < 3; ++j) k.vertices(i, j) += unif(rng);
  MomentData m = body_moments(k);
  VPolytope kc = translate(k, -m.barycenter);
  Stationarity st = projective_stationarity(kc);
  PolyhedralCone v = cone_over(kc);
  PolyhedralCone w = dual_of_cone_over(vertices_of(polar(kc)), v);
  Vec e = Vec::Zero(4);
  e[0] = 1.0;
  const double h = 1e-4;
  for (int rep = 0; rep < 4; ++rep) {
    Vec dir = random_direction(4, rng);
    double jp = j_functional(v, w, Vec(e + h * dir)).j;
    double jm = j_functional(v, w, Vec(e - h * dir)).j;
    double fd = (jp - jm) / (2.0 * h);
    CHECK(std::abs(fd - st.grad_j.dot(dir)) <= 1e-4 * std::max(1.0, st.grad_j.norm()));
  }
}

TEST_CASE("theorem 1.1 gap vanishes for simplices") {
  for (int n = 2; n <= 5; ++n)
    CHECK(std::abs(theorem11_gap(simplex_body(n))) < 1e-9);
}

TEST_CASE("theorem 1.1 gap is affine invariant") {
  VPolytope k = random_polytope(3, 7, 53);
  double base = theorem11_gap(k);
  Rng rng = make_stream(59, 0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Mat A(3, 3);
  do {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = unif(rng);
  } while (std::abs(A.determinant()) < 0.2);
  VPolytope q = k;
  q.vertices = k.vertices * A.transpose();
  CHECK(theorem11_gap(q) == Catch::Approx(base).margin(1e-8));
}

TEST_CASE("cube gap values are reported and finite") {
  for (int n : {2, 3}) {
    double gap = theorem11_gap(cube_body(n));
    CHECK(std::isfinite(gap));
  }
}
