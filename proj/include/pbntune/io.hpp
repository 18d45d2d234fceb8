#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pbntune/bn.hpp"

namespace pbntune {

/// Network file:
///
///   var Antigen { values: pos, neg; parents: COVID-19, Symptoms; }
///   cpt Antigen { (yes, yes): 0.72, 0.28; (yes, no): 0.58, 0.42; ... }
///
/// Root CPTs may write `(): 0.05, 0.95;` or just `0.05, 0.95;`. Comments
/// start with `#` or `//`. Rows must sum to 1 within 1e-9; the last entry
/// absorbs the residual so the stored row is exact.
BayesNet parse_network(const std::string& text);

/// Parameter file, one directive per line:
///
///   covariation linear-proportional
///   param p Antigen (yes, yes) pos
///   interval p 0.001 0.999
///
/// Entries naming the same parameter share it. Intervals default to
/// [delta, 1 - delta].
ParamBN parse_params(const std::string& text, const BayesNet& bn, double delta = kDefaultDelta);

/// `P(H | E) <= 0.009` with H, E conjunctions `Var=val & Var=val`; the
/// evidence part is optional.
Constraint parse_constraint(const std::string& text, const Network& net);

/// Comma separated variable names.
std::vector<std::size_t> parse_order(const std::string& text, const Network& net);

std::string read_file(const std::string& path);

}  // namespace pbntune
