#pragma once

#include <cstddef>
#include <vector>

#include "pbntune/bn.hpp"

// Brute-force references. Nothing here goes through chains, lifting or the
// tuning loop, so tests can hold those against plain enumeration.
namespace pbntune::oracle {

inline constexpr std::size_t kMaxJointStates = std::size_t{1} << 22;

/// Pr(H | E) by full joint enumeration.
double infer(const BayesNet& bn, const Constraint& c);

/// ln max_w Pr2(w)/Pr1(w) - ln min_w Pr2(w)/Pr1(w) over all joint
/// assignments w, with 0/0 = 1. +inf when exactly one side is 0 somewhere.
double cd_exact(const BayesNet& bn1, const BayesNet& bn2);

struct GridResult {
  bool found = false;
  std::vector<double> u;
  double distance = 0.0;  // EC value or CD
  double squared = 0.0;
};

/// Exhaustive search over the points k*resolution inside the parameter
/// intervals (plus u0 itself) for the satisfying point closest to u0.
GridResult grid_min_distance(const ParamBN& pbn, const Constraint& c, Measure m, double resolution);

}  // namespace pbntune::oracle
