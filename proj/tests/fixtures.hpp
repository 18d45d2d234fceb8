#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "pbntune/bn.hpp"
#include "pbntune/io.hpp"
#include "pbntune/oracle.hpp"

namespace fixtures {

using namespace pbntune;

inline std::string data_path(const std::string& name) { return std::string(PBNTUNE_DATA_DIR) + "/" + name; }

struct Covid {
  BayesNet bn;
  ParamBN pbn;
  Constraint c;  // Pr(C=no | A=pos & P=pos) <= 0.009
};

inline Covid covid() {
  BayesNet bn = parse_network(read_file(data_path("covid.bn")));
  ParamBN pbn = parse_params(read_file(data_path("covid.params")), bn);
  Constraint c = parse_constraint(read_file(data_path("covid.constraint")), bn.network());
  return {std::move(bn), std::move(pbn), c};
}

inline Covid covid_with(double threshold, Direction dir = Direction::LessEq) {
  Covid k = covid();
  k.c.threshold = threshold;
  k.c.direction = dir;
  return k;
}

/// x -> T with T a deterministic copy of X, so Pr(T=yes) = x.
inline ParamBN toy_chain() {
  BayesNet bn = parse_network(read_file(data_path("toy_chain.bn")));
  return parse_params(read_file(data_path("toy_chain.params")), bn);
}

/// Pr(T=yes) ~ threshold on toy_chain().
inline Constraint toy_constraint(double threshold, Direction dir = Direction::LessEq) {
  return Constraint{{{1, 0}}, {}, dir, threshold};
}

/// Row of positive rationals w_i / sum(w).
inline CptRow random_row(std::mt19937_64& rng, std::size_t width) {
  std::uniform_int_distribution<int> weight(1, 20);
  std::vector<int> w(width);
  int sum = 0;
  for (auto& x : w) sum += (x = weight(rng));
  CptRow row;
  for (int x : w) row.emplace_back(mpq_class(x, sum));
  return row;
}

struct RandomCase {
  BayesNet bn;
  ParamBN pbn;
  Constraint c;
};

/// Small random pBN (2..max_nodes variables, domains of 2 or 3 values,
/// up to two parents) with 1..max_params parameters in distinct rows, and a
/// constraint whose threshold sits near the value at u0.
inline RandomCase random_case(std::mt19937_64& rng, std::size_t max_nodes = 5, std::size_t max_params = 3) {
  std::uniform_int_distribution<std::size_t> nodes_dist(2, max_nodes);
  std::bernoulli_distribution coin(0.4);
  const std::size_t n = nodes_dist(rng);
  std::vector<Variable> vars;
  std::vector<Cpt> cpts;
  for (std::size_t v = 0; v < n; ++v) {
    Variable var{"v" + std::to_string(v), {}, {}};
    const std::size_t width = std::bernoulli_distribution(0.7)(rng) ? 2 : 3;
    for (std::size_t d = 0; d < width; ++d) var.values.push_back("d" + std::to_string(d));
    for (std::size_t u = 0; u < v && var.parents.size() < 2; ++u) {
      if (coin(rng)) var.parents.push_back(u);
    }
    std::size_t rows = 1;
    for (std::size_t p : var.parents) rows *= vars[p].values.size();
    Cpt cpt;
    for (std::size_t r = 0; r < rows; ++r) cpt.rows.push_back(random_row(rng, width));
    vars.push_back(std::move(var));
    cpts.push_back(std::move(cpt));
  }
  BayesNet bn(Network(vars, cpts));

  std::vector<EntryCoord> rows;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t r = 0; r < cpts[v].rows.size(); ++r) rows.push_back({v, r, 0});
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min(max_params, rows.size()))(rng);
  std::vector<ParamSpec> specs;
  for (std::size_t i = 0; i < k; ++i) {
    EntryCoord e = rows[i];
    e.value = std::uniform_int_distribution<std::size_t>(0, vars[e.var].values.size() - 1)(rng);
    specs.push_back({e, "x" + std::to_string(i), std::nullopt});
  }
  ParamBN pbn = parametrize(bn, specs);

  Constraint c;
  const std::size_t h = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  c.hypothesis.push_back({h, std::uniform_int_distribution<std::size_t>(0, vars[h].values.size() - 1)(rng)});
  if (std::bernoulli_distribution(0.6)(rng)) {
    std::size_t e = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
    if (e >= h) ++e;
    c.evidence.push_back({e, std::uniform_int_distribution<std::size_t>(0, vars[e].values.size() - 1)(rng)});
  }
  c.direction = coin(rng) ? Direction::GreaterEq : Direction::LessEq;
  const double at_u0 = oracle::infer(bn, c);
  c.threshold = std::clamp(at_u0 + std::uniform_real_distribution<double>(-0.1, 0.1)(rng), 0.0, 1.0);
  return {std::move(bn), std::move(pbn), c};
}

/// Random sub-box of [lo, hi]^n.
inline Region random_box(std::mt19937_64& rng, std::size_t n, double lo = 0.02, double hi = 0.98) {
  std::uniform_real_distribution<double> unit(lo, hi);
  std::vector<Interval> axes;
  for (std::size_t i = 0; i < n; ++i) {
    double a = unit(rng);
    double b = unit(rng);
    if (a > b) std::swap(a, b);
    axes.push_back({a, b});
  }
  return Region(std::move(axes));
}

inline std::vector<double> sample(std::mt19937_64& rng, const Region& box) {
  std::vector<double> u;
  for (const auto& a : box.axes()) u.push_back(std::uniform_real_distribution<double>(a.lo, a.hi)(rng));
  return u;
}

}  // namespace fixtures
