#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "pbntune/error.hpp"
#include "pbntune/tune.hpp"

using namespace pbntune;

namespace {

BayesNet two_node(const std::string& root_row) {
  return parse_network("var X { values: a, b; }\ncpt X { " + root_row +
                       "; }\nvar Y { values: y, n; parents: X; }\ncpt Y { (a): 0.3, 0.7; (b): 0.6, 0.4; }\n");
}

}  // namespace

TEST_CASE("infer") {
  const auto k = fixtures::covid();
  CHECK(oracle::infer(k.bn, k.c) == doctest::Approx(0.011089).epsilon(1e-5 / 0.011089));
  const BayesNet single = parse_network(read_file(fixtures::data_path("single.bn")));
  CHECK(oracle::infer(single, Constraint{{{0, 0}}, {}, Direction::LessEq, 0.5}) == doctest::Approx(0.3));
  Constraint h_is_e{{k.c.evidence[0]}, {}, Direction::LessEq, 1.0};
  const double pe = oracle::infer(k.bn, h_is_e);
  CHECK(pe > 0.0);

  const BayesNet det = parse_network(R"(
    var a { values: y, n; }
    var b { values: y, n; parents: a; }
    var c { values: y, n; }
    cpt a { 0.4, 0.6; }
    cpt b { (y): 1, 0; (n): 0, 1; }
    cpt c { 0.5, 0.5; }
  )");
  try {
    oracle::infer(det, Constraint{{{2, 0}}, {{0, 0}, {1, 1}}, Direction::LessEq, 0.5});
    FAIL("expected EvidenceImpossible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EvidenceImpossible);
  }
  // H equal to E (on different variables that are copies) gives 1
  CHECK(oracle::infer(det, Constraint{{{1, 0}}, {{0, 0}}, Direction::LessEq, 1.0}) == 1.0);
}

TEST_CASE("infer guard") {
  std::string text;
  for (int i = 0; i < 23; ++i) text += "var v" + std::to_string(i) + " { values: a, b; }\ncpt v" + std::to_string(i) + " { 0.5, 0.5; }\n";
  const BayesNet big = parse_network(text);
  try {
    oracle::infer(big, Constraint{{{0, 0}}, {}, Direction::LessEq, 0.5});
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
}

TEST_CASE("cd_exact") {
  const BayesNet half = two_node("0.5, 0.5");
  CHECK(oracle::cd_exact(half, half) == 0.0);
  CHECK(oracle::cd_exact(half, two_node("0.6, 0.4")) == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  const BayesNet zero = two_node("1, 0");
  CHECK(oracle::cd_exact(zero, two_node("0.9, 0.1")) == std::numeric_limits<double>::infinity());
  CHECK(oracle::cd_exact(zero, zero) == 0.0);
}

TEST_CASE("cd_exact agrees with the closed form") {
  const BayesNet bn = two_node("0.72, 0.28");
  const std::vector<ParamSpec> spec{{{0, 0, 0}, "x", std::nullopt}};
  const ParamBN pbn = parametrize(bn, spec);
  std::mt19937_64 rng(61);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> u{std::uniform_real_distribution<double>(0.01, 0.99)(rng)};
    const double closed = distance_cd(u, pbn.original_values(), pbn);
    CHECK(oracle::cd_exact(bn, instantiate(pbn, u)) == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("grid_min_distance") {
  SUBCASE("toy chain") {
    const ParamBN pbn = fixtures::toy_chain();
    const auto g = oracle::grid_min_distance(pbn, fixtures::toy_constraint(0.5), Measure::EC, 1e-3);
    REQUIRE(g.found);
    CHECK(g.u[0] == doctest::Approx(0.5));
    CHECK(g.distance == doctest::Approx(0.1));
  }
  SUBCASE("satisfied at u0") {
    const ParamBN pbn = fixtures::toy_chain();
    const auto g = oracle::grid_min_distance(pbn, fixtures::toy_constraint(0.7), Measure::EC, 1e-2);
    REQUIRE(g.found);
    CHECK(g.u == pbn.original_values());
    CHECK(g.distance == 0.0);
  }
  SUBCASE("nothing satisfies") {
    const ParamBN pbn = fixtures::toy_chain();
    const auto g = oracle::grid_min_distance(pbn, fixtures::toy_constraint(0.0), Measure::EC, 1e-2);
    CHECK_FALSE(g.found);
  }
  SUBCASE("COVID") {
    const auto k = fixtures::covid();
    const auto g = oracle::grid_min_distance(k.pbn, k.c, Measure::EC, 1e-3);
    REQUIRE(g.found);
    // the paper's instantiation is feasible but not the closest one
    CHECK(g.squared <= 0.040913125);
    CHECK(g.squared == doctest::Approx(0.0308).epsilon(0.01));
    CHECK(k.c.holds(oracle::infer(instantiate(k.pbn, g.u), k.c)));
  }
  SUBCASE("guard") {
    const auto rc = [] {
      std::mt19937_64 rng(62);
      while (true) {
        auto c = fixtures::random_case(rng, 5, 3);
        if (c.pbn.param_count() == 3) return c;
      }
    }();
    CHECK_THROWS_AS(oracle::grid_min_distance(rc.pbn, rc.c, Measure::EC, 1e-4), Error);
  }
}
