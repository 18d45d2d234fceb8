#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pbntune/pmc.hpp"
#include "pbntune/poly.hpp"

namespace pbntune {

/// Chain in which no parameter occurs in the outgoing distributions of two
/// distinct states. `origin[f]` is the original parameter of fresh id f.
struct RelaxedPMC {
  PMC chain;
  std::vector<ParamId> origin;
  std::size_t original_param_count = 0;
};

RelaxedPMC relax(const PMC& pmc);

struct MdpAction {
  std::vector<std::pair<StateId, double>> distribution;
};

/// Non-parametric MDP whose actions are the vertex substitutions of each
/// state's local sub-box.
struct BoundMDP {
  std::vector<std::vector<MdpAction>> actions;  // per state
  StateId initial = 0;

  std::size_t state_count() const { return actions.size(); }
};

/// Throws BadRegion if `region` leaves the declared parameter intervals.
BoundMDP substitute(const RelaxedPMC& relaxed, const Region& region);

enum class Optimize { Min, Max };

struct ValueIterationOptions {
  double tolerance = 1e-10;
  std::size_t max_sweeps = 5'000'000;
};

/// Optimal reachability probability from the initial state over all
/// memoryless deterministic schedulers (Gauss-Seidel value iteration).
double extremal_reach(const BoundMDP& mdp, std::span<const StateId> targets, Optimize mode,
                      ValueIterationOptions options = {});

enum class Verdict { Accepting, Rejecting, Inconclusive };

std::string_view to_string(Verdict v);

/// Safety margin between a bound and the threshold before a region counts
/// as conclusive.
constexpr double kVerdictMargin = 1e-8;

struct VerifierOptions {
  ValueIterationOptions value_iteration;
  double margin = kVerdictMargin;
};

/// Holds the relaxed chain for repeated region checks. All member functions
/// are const and safe to call concurrently.
class RegionVerifier {
 public:
  RegionVerifier(const PMC& pmc, ReachSpec spec, VerifierOptions options = {});

  Verdict verify(const Region& region) const;
  /// [min, max] reachability over the region's bound MDP.
  Interval reach_bounds(const Region& region) const;

  const ReachSpec& spec() const { return spec_; }
  const RelaxedPMC& relaxed() const { return relaxed_; }
  Region parameter_space() const { return space_; }

 private:
  RelaxedPMC relaxed_;
  ReachSpec spec_;
  VerifierOptions options_;
  Region space_;
};

Verdict verify_region(const PMC& pmc, const Region& region, const ReachSpec& spec, VerifierOptions options = {});

}  // namespace pbntune
