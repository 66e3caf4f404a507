#include <catch2/catch.hpp>

#include "lsqdae/lagrange.hpp"

using namespace lsqdae;

TEST_CASE("gauss-legendre nodes and weights on (0,1)", "[lagrange]") {
  const auto q1 = gauss_legendre_01(1);
  CHECK(q1.nodes[0] == Approx(0.5));
  CHECK(q1.weights[0] == Approx(1.0));

  const auto q2 = gauss_legendre_01(2);
  const double d = 0.5 / std::sqrt(3.0);
  CHECK(q2.nodes[0] == Approx(0.5 - d).epsilon(1e-14));
  CHECK(q2.nodes[1] == Approx(0.5 + d).epsilon(1e-14));
  CHECK(q2.weights[0] == Approx(0.5));
  CHECK(q2.weights[1] == Approx(0.5));

  // degree-(2n-1) exactness: integrate t^9 with 5 nodes
  const auto q5 = gauss_legendre_01(5);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += q5.weights[i] * std::pow(q5.nodes[i], 9);
  CHECK(acc == Approx(0.1).epsilon(1e-13));
}

TEST_CASE("gauss-lobatto nodes include endpoints", "[lagrange]") {
  const Vector n2 = gauss_lobatto_01(2);
  CHECK(n2[0] == 0.0);
  CHECK(n2[1] == 1.0);

  const Vector n4 = gauss_lobatto_01(4);  // interior at (1 +- 1/sqrt(5))/2
  CHECK(n4[1] == Approx(0.5 - 0.5 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(n4[2] == Approx(0.5 + 0.5 / std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("lagrange basis: cardinal values and partition of unity",
          "[lagrange]") {
  const auto b = make_lagrange_basis(gauss_lobatto_01(5));
  for (int i = 0; i < b.size(); ++i) {
    const Vector v = b.values_at(b.nodes[i]);
    for (int j = 0; j < b.size(); ++j)
      CHECK(v[j] == Approx(i == j ? 1.0 : 0.0).margin(1e-14));
  }
  for (double s : {0.0, 0.123, 0.5, 0.987, 1.0})
    CHECK(b.values_at(s).sum() == Approx(1.0).epsilon(1e-13));
}

TEST_CASE("differentiation matrix is exact on polynomials", "[lagrange]") {
  const auto b = make_lagrange_basis(gauss_lobatto_01(4));  // degree 3
  Vector c(4);
  for (int i = 0; i < 4; ++i) {
    const double t = b.nodes[i];
    c[i] = 1.0 - 2.0 * t + 3.0 * t * t - 0.5 * t * t * t;
  }
  const Vector dc = b.diff * c;
  for (int i = 0; i < 4; ++i) {
    const double t = b.nodes[i];
    CHECK(dc[i] == Approx(-2.0 + 6.0 * t - 1.5 * t * t).margin(1e-12));
  }
  for (double s : {0.1, 0.37, 0.92}) {
    const Vector dv = b.derivative_values_at(s);
    CHECK(dv.dot(c) == Approx(-2.0 + 6.0 * s - 1.5 * s * s).margin(1e-12));
  }
}
