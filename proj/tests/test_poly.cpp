#include <doctest.h>

#include <random>

#include "pbntune/error.hpp"
#include "pbntune/poly.hpp"

using namespace pbntune;

namespace {

Polynomial x(ParamId id) { return Polynomial::variable(id); }
Polynomial c(long num, long den = 1) { return Polynomial(mpq_class(num, den)); }

Polynomial random_multi_affine(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> coef(-9, 9);
  Polynomial f = c(coef(rng), 4);
  for (unsigned mask = 1; mask < (1U << n); ++mask) {
    Polynomial term = c(coef(rng), 4);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1U << i)) term = term * x(static_cast<ParamId>(i));
    }
    f += term;
  }
  return f;
}

}  // namespace

TEST_CASE("eval substitutes values") {
  const Polynomial f = c(2) * x(0) * x(0) + x(1);
  const std::vector<double> u{3.0, 2.0};
  CHECK(f.eval(u) == doctest::Approx(20.0));
  CHECK(Polynomial(1).eval(u) == 1.0);
  const std::vector<double> p{0.72};
  CHECK((Polynomial(1) - x(0)).eval(p) == doctest::Approx(0.28).epsilon(1e-15));
}

TEST_CASE("eval rejects unbound parameters") {
  const Polynomial f = x(0) + x(2);
  const std::vector<double> short_u{0.5, 0.5};
  CHECK_THROWS_AS(f.eval(short_u), Error);
  const std::vector<double> nan_u{0.5, 0.5, std::nan("")};
  try {
    f.eval(nan_u);
    FAIL("expected UnboundParameter");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnboundParameter);
  }
}

TEST_CASE("bounds over boxes") {
  const Polynomial f = c(3, 10) + c(4, 10) * x(0);
  Interval b = f.bounds(Region({{0.5, 1.0}}));
  CHECK(b.lo == doctest::Approx(0.5));
  CHECK(b.hi == doctest::Approx(0.7));

  b = (x(0) * x(1)).bounds(Region({{0.2, 0.5}, {0.1, 0.3}}));
  CHECK(b.lo == doctest::Approx(0.02));
  CHECK(b.hi == doctest::Approx(0.15));

  b = (Polynomial(1) - x(0)).bounds(Region({{0.0075, 0.0125}}));
  CHECK(b.lo == doctest::Approx(0.9875));
  CHECK(b.hi == doctest::Approx(0.9925));

  try {
    (x(0) * x(0)).bounds(Region({{0.0, 1.0}}));
    FAIL("expected UnsupportedDegree");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedDegree);
  }
}

TEST_CASE("canonical form and rendering") {
  CHECK((x(0) - x(0)).is_zero());
  CHECK(x(0) * x(1) == x(1) * x(0));
  const std::vector<std::string> names{"p", "q"};
  const Polynomial g = c(34900) * x(0) * x(1) + c(8758) * x(1) + c(361);
  CHECK(g.to_string(names) == "34900*p*q + 8758*q + 361");
  CHECK(g.is_multi_affine());
  CHECK_FALSE((x(0) * x(0)).is_multi_affine());
}

TEST_CASE("rational function normalization gives coprime integers") {
  RationalFunction f{c(361, 1000), c(349, 10) * x(0) * x(1) + c(8758, 1000) * x(1) + c(361, 1000)};
  f.normalize();
  const std::vector<std::string> names{"p", "q"};
  CHECK(f.numerator.to_string(names) == "361");
  CHECK(f.denominator.to_string(names) == "34900*p*q + 8758*q + 361");
}

TEST_CASE("parse_decimal is exact") {
  CHECK(parse_decimal("0.72") == mpq_class(18, 25));
  CHECK(parse_decimal("1e-3") == mpq_class(1, 1000));
  CHECK(parse_decimal("-2") == mpq_class(-2));
  CHECK(parse_decimal("2.5E+1") == mpq_class(25));
  CHECK_THROWS_AS(parse_decimal("0.7.2"), Error);
  CHECK_THROWS_AS(parse_decimal(""), Error);
}

TEST_CASE("to_double rounds to nearest") {
  CHECK(to_double(parse_decimal("0.97475")) == 0.97475);
  CHECK(to_double(parse_decimal("0.1")) == 0.1);
  CHECK(to_double(mpq_class(1, 3)) == 1.0 / 3.0);
}

TEST_CASE("region geometry") {
  const Region r({{0.0, 1.0}, {0.2, 0.4}});
  const auto [a, b] = r.bisect(1);
  CHECK(a[1].hi == doctest::Approx(0.3));
  CHECK(b[1].lo == doctest::Approx(0.3));
  CHECK(a.normalized_volume(r) + b.normalized_volume(r) == doctest::Approx(1.0));
  CHECK(a < b);
  const Region degenerate({{0.5, 0.5}, {0.2, 0.4}});
  CHECK(b.normalized_volume(degenerate) == doctest::Approx(0.5));
  CHECK_THROWS_AS(Region({{0.6, 0.5}}), Error);
}

TEST_CASE("property: bounds sandwich evaluation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Polynomial f = random_multi_affine(rng, n);
    std::vector<Interval> axes;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      double lo = unit(rng), hi = unit(rng);
      if (lo > hi) std::swap(lo, hi);
      axes.push_back({lo, hi});
    }
    const Region box(axes);
    const Interval b = f.bounds(box);
    for (int s = 0; s < 100; ++s) {
      std::vector<double> u;
      for (const auto& a : axes) u.push_back(std::uniform_real_distribution<double>(a.lo, a.hi)(rng));
      const double v = f.eval(u);
      REQUIRE(v >= b.lo - 1e-12);
      REQUIRE(v <= b.hi + 1e-12);
    }
  }
}

TEST_CASE("property: arithmetic agrees with evaluation") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Polynomial f = random_multi_affine(rng, 2);
    const Polynomial g = random_multi_affine(rng, 3);
    const std::vector<double> u{unit(rng), unit(rng), unit(rng)};
    CHECK((f * g).eval(u) == doctest::Approx(f.eval(u) * g.eval(u)).epsilon(1e-12));
    CHECK((f + g).eval(u) == doctest::Approx(f.eval(u) + g.eval(u)).epsilon(1e-12));
    CHECK((f * mpq_class(3, 7)).eval(u) == doctest::Approx(f.eval(u) * 3.0 / 7.0).epsilon(1e-12));
  }
}
