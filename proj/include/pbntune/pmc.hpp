#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbntune/bn.hpp"
#include "pbntune/poly.hpp"

namespace pbntune {

using StateId = std::uint32_t;

struct Transition {
  StateId target = 0;
  Polynomial probability;
};

/// Truth of the hypothesis/evidence conjunctions along the path into a leaf.
struct LeafClass {
  bool hypothesis = true;
  bool evidence = true;
};

struct PmcState {
  std::string label;
  std::size_t level = 0;
  std::optional<LeafClass> leaf;  // set on classified final-level states
};

/// Parametric Markov chain with polynomial transition labels.
class PMC {
 public:
  StateId add_state(std::string label, std::size_t level = 0);
  /// Adds `p` to the (source, target) label, creating the edge if needed.
  void add_transition(StateId source, StateId target, const Polynomial& p);

  std::size_t state_count() const { return states_.size(); }
  std::size_t transition_count() const;
  StateId initial() const { return 0; }
  const PmcState& state(StateId s) const { return states_[s]; }
  PmcState& state(StateId s) { return states_[s]; }
  const std::vector<Transition>& transitions(StateId s) const { return transitions_[s]; }

  std::vector<Parameter> params;
  /// Constraint used to classify leaves, if any.
  std::optional<Constraint> query;

  std::vector<std::string> param_names() const;
  Region parameter_space() const;

  /// Outgoing labels of every state sum to exactly 1.
  bool is_stochastic() const;
  bool is_absorbing(StateId s) const;

 private:
  std::vector<PmcState> states_;
  std::vector<std::vector<Transition>> transitions_;
};

/// Reachability constraint Pr(<> targets) ~ threshold.
struct ReachSpec {
  std::vector<StateId> targets;
  Direction direction = Direction::LessEq;
  double threshold = 0.0;
};

struct CompileOptions {
  /// Drop variable values no later CPT needs. Off only for cross-checks.
  bool forget = true;
};

/// Level-structured chain for `order` (must be topological); final-level
/// states are absorbing and keep only the last variable.
PMC compile(const ParamBN& pbn, std::span<const std::size_t> order, CompileOptions options = {});

/// As above, but final-level states are merged by the truth of the
/// hypothesis and evidence of `query`.
PMC compile(const ParamBN& pbn, std::span<const std::size_t> order, const Constraint& query,
            CompileOptions options = {});

struct TailoredChain {
  PMC chain;
  ReachSpec spec;
};

/// Evidence-tailored chain: any step that contradicts the evidence restarts
/// at the initial state, so Pr(<> targets) equals Pr(H | E).
TailoredChain compile_tailored(const ParamBN& pbn, std::span<const std::size_t> order, const Constraint& c,
                               CompileOptions options = {});

/// Exact reachability probability of the instantiated chain via a sparse LU
/// solve. Throws NotWellFormed if u does not yield a Markov chain.
double reach_prob(const PMC& pmc, std::span<const double> u, std::span<const StateId> targets);

/// Pr(<> targets) as a ratio of polynomials by eliminating the acyclic part
/// of the chain first and the restart loop through the initial state last.
RationalFunction sensitivity_function(const PMC& pmc, std::span<const StateId> targets,
                                      std::size_t max_states = 10000);

/// (1 - Pr(<> not(H and E))) / (1 - Pr(<> not E)) on a chain compiled with
/// `c` as its query.
double conditional_via_ratio(const PMC& plain, const Constraint& c, std::span<const double> u);

std::string to_dot(const PMC& pmc);

}  // namespace pbntune
