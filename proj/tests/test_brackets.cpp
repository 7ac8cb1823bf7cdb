#include <doctest.h>

#include <random>

#include "hypocone/compiled_field.hpp"
#include "hypocone/model.hpp"
#include "hypocone/vector_field.hpp"
#include "support.hpp"

using namespace hypocone;
using testing_support::random_field;
using testing_support::random_rational_vector;

TEST_CASE("jacobian entries are partial derivatives") {
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  const PolyVectorField v({x * y, x * x * x - y});
  const auto j = jacobian(v);
  CHECK(j[0][0] == y);
  CHECK(j[0][1] == x);
  CHECK(j[1][0] == x * x * Rational(3));
  CHECK(j[1][1] == Polynomial::constant(2, -1));
}

TEST_CASE("bracket of coordinate fields") {
  // [x d/dy, y d/dx] = x d/dx - y d/dy.
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  const PolyVectorField v({Polynomial(2), x});
  const PolyVectorField w({y, Polynomial(2)});
  CHECK(lie_bracket(v, w) == PolyVectorField({-x, y}) * Rational(-1));
  CHECK(ad_power(v, w, 0) == w);
  CHECK(ad_power(v, w, 1) == lie_bracket(v, w));
}

TEST_CASE("bracket properties hold exactly on random fields") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_field(rng, 3, 2, 3);
    const auto b = random_field(rng, 3, 2, 3);
    const auto c = random_field(rng, 3, 2, 3);
    const Rational s = testing_support::small_rational(rng);
    CHECK(lie_bracket(a, b) == lie_bracket(b, a) * Rational(-1));
    CHECK(lie_bracket(a, a).is_zero());
    CHECK(lie_bracket(a * s + b, c) == lie_bracket(a, c) * s + lie_bracket(b, c));
    const auto jacobi = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) +
                        lie_bracket(c, lie_bracket(a, b));
    CHECK(jacobi.is_zero());
  }
}

TEST_CASE("constant-field fast path agrees with the general bracket") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_field(rng, 3, 4, 5);
    const auto v = random_rational_vector(rng, 3);
    const auto vf = PolyVectorField::constant(v);
    CHECK(directional_derivative(v, w) == lie_bracket(vf, w));
    PolyVectorField iter = w;
    for (unsigned m = 1; m <= 4; ++m) {
      iter = lie_bracket(vf, iter);
      CHECK(ad_power(vf, w, m) == iter);
    }
  }
}

TEST_CASE("relative degree: examples and undefined case") {
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  // BHW drift with a1 = a2 = 0, alpha1 = 1, alpha2 = 2 along (0, 1).
  const PolyVectorField x0({-(x * x) + y * y, -(x * y) * Rational(2)});
  const auto n = relative_degree({0, 1}, x0);
  REQUIRE(n.has_value());
  CHECK(n->n == 2);
  CHECK_FALSE(n->odd());
  // Along (1, 0) only -x^2 survives: degree 2.
  CHECK(relative_degree({1, 0}, x0)->n == 2);
  // W(lambda v) identically zero.
  const PolyVectorField w({x * y, Polynomial(2)});
  CHECK_FALSE(relative_degree({1, 0}, w).has_value());
  // Constant nonzero field has relative degree 0.
  CHECK(relative_degree({1, 0}, PolyVectorField::constant({3, 0}))->n == 0);
}

TEST_CASE("ad^n V (W) at the origin is n! times the top lambda coefficient of W(lambda v)") {
  // ad^m V (W)(x) = D^m W(x)[v, ..., v]; at x = 0 this is m! [lambda^m] W(lambda v).
  std::mt19937_64 rng(99);
  const Rational origin[] = {0, 0};
  for (int trial = 0; trial < 15; ++trial) {
    const auto w = random_field(rng, 2, 3, 4);
    const auto v = random_rational_vector(rng, 2);
    const auto n = relative_degree(v, w);
    if (!n) continue;
    const auto vf = PolyVectorField::constant(v);
    Rational fact = 1;
    for (unsigned k = 2; k <= n->n; ++k) fact *= k;
    RationalVector expected;
    for (std::size_t i = 0; i < 2; ++i) {
      const auto c = w[i].restrict_to_line(v);
      expected.push_back(c.size() > n->n ? c[n->n] * fact : Rational(0));
    }
    CHECK(ad_power(vf, w, n->n).eval_exact(origin) == expected);
    CHECK(is_zero_vector(ad_power(vf, w, n->n + 1).eval_exact(origin)));
  }
}

TEST_CASE("ad^n need not be constant: x1^2 x2 d/dx1 along e1") {
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  const PolyVectorField w({x * x * y + x, Polynomial(2)});
  // W(lambda e1) = (lambda, 0), so n = 1, but [e1, W] = (2 x y + 1, 0).
  const auto n = relative_degree({1, 0}, w);
  REQUIRE(n.has_value());
  CHECK(n->n == 1);
  const auto br = ad_power(PolyVectorField::constant({1, 0}), w, 1);
  CHECK_FALSE(br.is_constant());
  CHECK(br == PolyVectorField({x * y * Rational(2) + Polynomial::constant(2, 1), Polynomial(2)}));
}

TEST_CASE("Langevin bracket [X_j, X0] = (-gamma sigma_j, sigma_j)") {
  for (int d : {1, 2}) {
    for (const char* gamma : {"0", "1", "5/2"}) {
      const auto m = make_builtin("langevin", {{"d", std::to_string(d)}, {"gamma", gamma}});
      const Rational g = parse_rational(gamma);
      for (std::size_t j = 0; j < m.r(); ++j) {
        RationalVector expected(2 * d, Rational(0));
        expected[j] = -g;
        expected[d + j] = 1;
        const auto br = lie_bracket(PolyVectorField::constant(m.noise[j]), m.drift);
        REQUIRE(br.is_constant());
        CHECK(br.constant_value() == expected);
      }
    }
  }
}

TEST_CASE("BHW: ad^2 X1 (X0) = 2 d/dx for eps = 1") {
  const auto m = make_builtin("bhw", {});
  const auto x1 = PolyVectorField::constant(m.noise[0]);
  CHECK(ad_power(x1, m.drift, 2) == PolyVectorField::constant({2, 0}));
  CHECK(ad_power(x1, m.drift, 3).is_zero());
}

TEST_CASE("registered closed-form brackets are reproduced exactly") {
  for (const auto& info : builtin_models()) {
    const auto m = make_builtin(info.name, {});
    CAPTURE(info.name);
    for (const auto& kb : m.facts.brackets) {
      CAPTURE(kb.expression);
      CHECK(evaluate_bracket_expression(m, kb.expression) == kb.expected);
    }
  }
}

TEST_CASE("bracket expression parser") {
  const auto m = make_builtin("bhw", {});
  CHECK(evaluate_bracket_expression(m, "ad^2(X1)(X0)") == evaluate_bracket_expression(m, "[X1,[X1,X0]]"));
  CHECK(evaluate_bracket_expression(m, " [ X1 , X0 ] ") == evaluate_bracket_expression(m, "[X1,X0]"));
  CHECK_THROWS_AS(evaluate_bracket_expression(m, "[X1,X9]"), ModelError);
  CHECK_THROWS_AS(evaluate_bracket_expression(m, "[X1,X0"), ModelError);
}

TEST_CASE("compiled field and Jacobian agree with exact evaluation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_field(rng, 3, 3, 5);
    const CompiledField cf(f);
    const auto jac = jacobian(f);
    for (int k = 0; k < 5; ++k) {
      std::vector<double> x{u(rng), u(rng), u(rng)};
      const Eigen::VectorXd xv = Eigen::Map<Eigen::VectorXd>(x.data(), 3);
      const auto exact = f.eval(x);
      const Eigen::VectorXd got = cf(xv);
      const Eigen::MatrixXd jg = cf.jacobian(xv);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(got(static_cast<Eigen::Index>(i)) == doctest::Approx(exact[i]).epsilon(1e-12));
        for (std::size_t j = 0; j < 3; ++j)
          CHECK(jg(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
                doctest::Approx(jac[i][j].eval(x)).epsilon(1e-12));
      }
    }
  }
}
