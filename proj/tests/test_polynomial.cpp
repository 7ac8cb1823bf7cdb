#include <doctest.h>

#include <cmath>
#include <random>

#include "hypocone/poly_json.hpp"
#include "hypocone/polynomial.hpp"
#include "hypocone/rational.hpp"
#include "hypocone/rational_span.hpp"
#include "support.hpp"

using namespace hypocone;
using testing_support::random_polynomial;

TEST_CASE("rational parsing and formatting round-trip") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-6/8") == Rational(-3, 4));
  CHECK(parse_rational("-0.25") == Rational(-1, 4));
  CHECK(parse_rational("1e-2") == Rational(1, 100));
  CHECK(parse_rational("7") == Rational(7));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  for (const char* s : {"0", "-17/3", "5", "1/1024"}) CHECK(format_rational(parse_rational(s)) == s);
  CHECK(rational_from_double(0.375) == Rational(3, 8));
}

TEST_CASE("evaluation of 2*x1^2 - 1/3*x2 at (3, 6)") {
  Polynomial p = Polynomial::monomial(2, {2, 0}) + Polynomial::monomial(Rational(-1, 3), {0, 1});
  const double x[] = {3.0, 6.0};
  CHECK(p.eval(x) == doctest::Approx(16.0));
  const Rational xq[] = {3, 6};
  CHECK(p.eval_exact(xq) == 16);
  CHECK(p.to_string() == "2*x1^2 - 1/3*x2");
}

TEST_CASE("degree and zero polynomial sentinel") {
  Polynomial z(3);
  CHECK(z.degree().is_zero_polynomial());
  CHECK(Polynomial::constant(3, 5).degree() == Degree::finite(0));
  Polynomial p = Polynomial::monomial(1, {1, 2, 0}) + Polynomial::monomial(4, {0, 0, 1});
  CHECK(p.degree() == Degree::finite(3));
  p.add_term({1, 2, 0}, -1);
  CHECK(p.degree() == Degree::finite(1));
  CHECK(p.term_count() == 1);
}

TEST_CASE("add_term rejects mismatched exponent length") {
  Polynomial p(2);
  CHECK_THROWS(p.add_term({1, 0, 0}, 1));
}

TEST_CASE("derivative matches the power rule term by term") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Polynomial p = random_polynomial(rng, 3, 4, 6);
    for (std::size_t v = 0; v < 3; ++v) {
      Polynomial expected(3);
      for (const auto& [e, c] : p.terms()) {
        if (e[v] == 0) continue;
        Exponent f = e;
        f[v] -= 1;
        expected.add_term(f, c * e[v]);
      }
      CHECK(p.derivative(v) == expected);
    }
  }
}

TEST_CASE("ring identities hold exactly on random polynomials") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const auto a = random_polynomial(rng, 2, 3, 4);
    const auto b = random_polynomial(rng, 2, 3, 4);
    const auto c = random_polynomial(rng, 2, 3, 4);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK((a - a).is_zero());
    // Product rule.
    CHECK((a * b).derivative(0) == a.derivative(0) * b + a * b.derivative(0));
    const Rational x[] = {Rational(1, 2), Rational(-3)};
    CHECK((a * b).eval_exact(x) == a.eval_exact(x) * b.eval_exact(x));
  }
}

TEST_CASE("restrict_to_line gives lambda coefficients") {
  // p = x1^2 x2 - x1 + 3; along v = (2, 1): 4 lambda^3 - 2 lambda + 3.
  Polynomial p = Polynomial::monomial(1, {2, 1}) + Polynomial::monomial(-1, {1, 0}) + Polynomial::constant(2, 3);
  const Rational v[] = {2, 1};
  const RationalVector coeffs = p.restrict_to_line(v);
  REQUIRE(coeffs.size() == 4);
  CHECK(coeffs[0] == 3);
  CHECK(coeffs[1] == -2);
  CHECK(coeffs[2] == 0);
  CHECK(coeffs[3] == 4);
  const Rational e2[] = {0, 1};
  CHECK(Polynomial::monomial(1, {1, 1}).restrict_to_line(e2).empty());
}

TEST_CASE("polynomial JSON round-trip and diagnostics") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_polynomial(rng, 3, 3, 5);
    CHECK(polynomial_from_json(to_json(p), 3, "p") == p);
  }
  const auto bad = nlohmann::json::parse(R"([{"coeff":"1","exps":[1,0,0]}])");
  try {
    polynomial_from_json(bad, 2, "drift[1]");
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("drift[1]") != std::string::npos);
  }
  const auto dup = nlohmann::json::parse(R"([{"coeff":"1","exps":[1,0]},{"coeff":"2","exps":[1,0]}])");
  CHECK_THROWS(polynomial_from_json(dup, 2, "p"));
}

TEST_CASE("exact span bookkeeping") {
  RationalSpan s(3);
  CHECK(s.insert({1, 1, 0}));
  CHECK(s.insert({0, 1, 0}));
  CHECK_FALSE(s.insert({2, 5, 0}));
  CHECK(s.contains({Rational(1, 3), 7, 0}));
  CHECK_FALSE(s.contains({0, 0, 1}));
  CHECK(s.rank() == 2);
  const RationalVector r = s.residual({4, 5, 6});
  CHECK(r == RationalVector{0, 0, 6});
  CHECK(exact_rank({{1, 2}, {2, 4}, {0, 0}}, 2) == 1);
  CHECK(primitive_direction({Rational(2, 3), Rational(4, 9)}) == RationalVector{3, 2});
  CHECK(primitive_direction({-4, 6}) == RationalVector{-2, 3});
}
