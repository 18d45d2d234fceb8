#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pbntune/bn.hpp"
#include "pbntune/pla.hpp"
#include "pbntune/refine.hpp"

namespace pbntune {

/// Tuning hyper-parameters. gamma = 1/2 and K = 6 are the recommended
/// balance between the first region's size and the number of expansions.
struct Hyper {
  double eta = 0.99;
  double gamma = 0.5;
  unsigned max_iterations = 6;  // K
  Measure measure = Measure::EC;
  double delta = kDefaultDelta;
  VerifierOptions verifier;
  PartitionOptions partition;
  /// Variable order for chain compilation; empty means topological default.
  std::vector<std::size_t> order;

  void check() const;
};

struct DistanceReport {
  Measure measure = Measure::EC;
  double value = 0.0;
  double squared = 0.0;
};

/// Euclidean distance; `squared` is the plain sum of squared deviations.
DistanceReport distance_ec(std::span<const double> u, std::span<const double> u0);

/// Chan-Darwiche distance via the single-CPT closed form. Throws
/// UnsupportedForCD when the parameters span more than one CPT.
double distance_cd(std::span<const double> u, std::span<const double> u0, const ParamBN& pbn);

DistanceReport distance(Measure m, std::span<const double> u, std::span<const double> u0, const ParamBN& pbn);

/// Upper bound on the distance from u0 to any point of the parameter space.
double d0_upper(Measure m, const ParamBN& pbn);

/// Box of half-width eps/sqrt(n) around u0, clamped to `space`.
Region expand_region_ec(std::span<const double> u0, double eps, const Region& space);
Region expand_region_ec(std::span<const double> u0, double eps, double delta = kDefaultDelta);

/// [u0/alpha, u0*alpha] per axis with alpha = exp(eps/2), clamped to `space`.
Region cd_ratio_box(std::span<const double> u0, double eps, const Region& space);

/// cd_ratio_box further restricted so that every co-varied entry of the
/// CPT also stays within a factor alpha of its original value; every point
/// is then within CD distance eps of u0.
Region expand_region_cd(std::span<const double> u0, double eps, const Region& space, const ParamBN& pbn);

/// Per box, clamp u0 into the box; return the candidate closest to u0.
std::vector<double> minimal_instantiation(std::span<const Region> boxes, std::span<const double> u0, Measure m,
                                          const ParamBN& pbn);

enum class TuneStatus { Satisfied, Tuned, Infeasible, Unknown };

std::string_view to_string(TuneStatus s);

struct IterationStats {
  double epsilon = 0.0;
  Region region;
  std::size_t accepting = 0;
  std::size_t rejecting = 0;
  std::size_t unknown = 0;
  std::size_t verifications = 0;
  double coverage = 0.0;
  bool guard_tripped = false;
};

struct TuneResult {
  TuneStatus status = TuneStatus::Unknown;
  std::vector<double> instantiation;  // set when Satisfied or Tuned
  DistanceReport distance;
  /// Exact Pr(H | E) at the returned instantiation (or at u0 otherwise).
  double probability = 0.0;
  double epsilon_final = 0.0;
  std::size_t iterations = 0;
  double coverage = 0.0;
  std::vector<IterationStats> stats;
  PartitionResult last_partition;
};

/// Region-based minimal change tuning: expand boxes around u0 until some
/// sub-box is accepting, then extract the closest accepting point.
TuneResult tune(const ParamBN& pbn, std::span<const double> u0, const Constraint& c, const Hyper& h);
TuneResult tune(const ParamBN& pbn, const Constraint& c, const Hyper& h);

}  // namespace pbntune
