#include <doctest.h>

#include <cmath>

#include "chase/rng.hpp"

using namespace chase;

TEST_CASE("streams are deterministic and distinct") {
  SampleStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  double va = a.next_unit();
  CHECK(va == b.next_unit());
  CHECK(va != c.next_unit());
  CHECK(va != d.next_unit());
  for (int i = 0; i < 1000; ++i) {
    double u = a.next_unit();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.next_unit());
  }
}

TEST_CASE("dual sphere draws satisfy the boundary identities exactly") {
  for (NormTag t : {NormTag::Euclidean, NormTag::LInf, NormTag::L1}) {
    for (Index d : {1, 2, 3, 5}) {
      SampleStream s(1234, static_cast<std::uint64_t>(d));
      for (int k = 0; k < 2500; ++k) {
        DualSphereDraw dr = sample_dual_sphere(s, d, t);
        // theta lies on the dual unit sphere ...
        CHECK(std::abs(dual_norm(dr.theta, t) - 1.0) <= 1e-12);
        // ... the normal has unit ambient norm ...
        CHECK(std::abs(norm(dr.normal, t) - 1.0) <= 1e-12);
        // ... and pairs with theta to exactly 1.
        CHECK(std::abs(dr.normal.dot(dr.theta) - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("dual ball draws stay inside the ball") {
  for (NormTag t : {NormTag::Euclidean, NormTag::LInf, NormTag::L1}) {
    SampleStream s(99, 0);
    for (int k = 0; k < 5000; ++k) {
      Vector v = sample_dual_ball(s, 3, t);
      CHECK(dual_norm(v, t) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("sphere sampler means vanish at CLT scale") {
  // Frozen-seed moment check: the cone measure is symmetric, so the mean of
  // theta (and of the normals) over 1e6 draws is zero up to ~d/sqrt(M).
  const int M = 1000000;
  for (NormTag t : {NormTag::Euclidean, NormTag::LInf, NormTag::L1}) {
    Vector mean_theta = Vector::Zero(2);
    Vector mean_normal = Vector::Zero(2);
    for (int j = 0; j < M; ++j) {
      SampleStream s(2024, static_cast<std::uint64_t>(j));
      DualSphereDraw dr = sample_dual_sphere(s, 2, t);
      mean_theta += dr.theta;
      mean_normal += dr.normal;
    }
    mean_theta /= double(M);
    mean_normal /= double(M);
    CHECK(mean_theta.norm() <= 3e-3);
    CHECK(mean_normal.norm() <= 3e-3);
  }
}

TEST_CASE("ball sampler matches known first moments") {
  // Uniform draws from the dual ball have mean zero; the mean of |v|_dual is
  // d/(d+1) for every norm pair (radial cdf r^d).
  const int M = 200000;
  for (NormTag t : {NormTag::Euclidean, NormTag::LInf, NormTag::L1}) {
    Vector mean = Vector::Zero(3);
    double mean_r = 0.0;
    SampleStream s(7, 1);
    for (int j = 0; j < M; ++j) {
      Vector v = sample_dual_ball(s, 3, t);
      mean += v;
      mean_r += dual_norm(v, t);
    }
    mean /= double(M);
    mean_r /= double(M);
    CHECK(mean.norm() <= 6e-3);
    CHECK(mean_r == doctest::Approx(3.0 / 4.0).epsilon(5e-3));
  }
}
