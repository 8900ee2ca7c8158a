#include <doctest.h>

#include "chase/norms.hpp"

using namespace chase;

TEST_CASE("norm values") {
  Vector v(2);
  v << 3.0, 4.0;
  CHECK(norm(v, NormTag::Euclidean) == doctest::Approx(5.0));
  CHECK(norm(v, NormTag::LInf) == doctest::Approx(4.0));
  CHECK(norm(v, NormTag::L1) == doctest::Approx(7.0));
  CHECK(dual_norm(v, NormTag::LInf) == doctest::Approx(7.0));
  CHECK(dual_norm(v, NormTag::L1) == doctest::Approx(4.0));
  CHECK(dual_norm(v, NormTag::Euclidean) == doctest::Approx(5.0));
}

TEST_CASE("dual pairing is an involution") {
  for (NormTag t : {NormTag::Euclidean, NormTag::LInf, NormTag::L1}) CHECK(dual(dual(t)) == t);
  CHECK(dual(NormTag::LInf) == NormTag::L1);
  CHECK(dual(NormTag::Euclidean) == NormTag::Euclidean);
}

TEST_CASE("norm parsing round-trips") {
  for (NormTag t : {NormTag::Euclidean, NormTag::LInf, NormTag::L1})
    CHECK(parse_norm(to_string(t)) == t);
  CHECK_THROWS_AS(parse_norm("l3"), ParseError);
}

TEST_CASE("subgradient identities") {
  // A subgradient g of a norm at x =/= 0 satisfies g . x = ||x|| and
  // ||g||_dual <= 1.
  std::vector<Vector> points;
  Vector a(3);
  a << 1.0, -2.0, 0.0;
  points.push_back(a);
  a << -1.5, 3.0, 3.0;  // LInf tie between two coordinates
  points.push_back(a);
  a << 0.0, 0.0, 0.0;
  points.push_back(a);
  for (NormTag t : {NormTag::Euclidean, NormTag::LInf, NormTag::L1}) {
    for (const Vector& x : points) {
      Vector g = norm_subgradient(x, t);
      CHECK(g.dot(x) == doctest::Approx(norm(x, t)).epsilon(1e-12));
      CHECK(dual_norm(g, t) <= 1.0 + 1e-12);
    }
  }
  // LInf tie rule: lowest coordinate attaining the max magnitude.
  Vector tie(3);
  tie << -2.0, 2.0, 1.0;
  Vector g = norm_subgradient(tie, NormTag::LInf);
  CHECK(g[0] == -1.0);
  CHECK(g[1] == 0.0);
}

TEST_CASE("unit ball support points") {
  // The support function of the unit ball of ||.||_X is the dual norm.
  std::vector<Vector> thetas;
  Vector a(3);
  a << 1.0, 2.0, -0.5;
  thetas.push_back(a);
  a << -1.0, 0.0, 0.0;
  thetas.push_back(a);
  a << 2.0, -2.0, 2.0;  // ties for L1 ball
  thetas.push_back(a);
  for (NormTag t : {NormTag::Euclidean, NormTag::LInf, NormTag::L1}) {
    for (const Vector& th : thetas) {
      Vector x = unit_ball_support_point(th, t);
      CHECK(norm(x, t) <= 1.0 + 1e-12);
      CHECK(th.dot(x) == doctest::Approx(dual_norm(th, t)).epsilon(1e-12));
    }
  }
}
