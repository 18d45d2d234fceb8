#include "pbntune/tune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "pbntune/error.hpp"
#include "pbntune/pmc.hpp"

namespace pbntune {

void Hyper::check() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "eta must lie in [0,1]");
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorKind::InvalidArgument, "gamma must lie in (0,1)");
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "K must be at least 1");
  if (!(delta > 0.0 && delta < 0.5)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0,0.5)");
}

std::string_view to_string(TuneStatus s) {
  switch (s) {
    case TuneStatus::Satisfied: return "Satisfied";
    case TuneStatus::Tuned: return "Tuned";
    case TuneStatus::Infeasible: return "Infeasible";
    case TuneStatus::Unknown: return "Unknown";
  }
  return "?";
}

// -------------------------------------------------------------- distances

namespace {

void check_same_size(std::span<const double> u, std::span<const double> u0) {
  if (u.size() != u0.size()) throw Error(ErrorKind::UnboundParameter, "instantiations cover different parameter sets");
}

/// The one variable whose CPT holds every parameter.
std::size_t single_cpt_owner(const ParamBN& pbn) {
  std::optional<std::size_t> owner;
  for (ParamId id = 0; id < pbn.param_count(); ++id) {
    for (std::size_t v : pbn.owners(id)) {
      if (owner && *owner != v) {
        throw Error(ErrorKind::UnsupportedForCD, "CD distance needs all parameters in a single CPT");
      }
      owner = v;
    }
  }
  if (!owner) throw Error(ErrorKind::UnsupportedForCD, "no parametrized CPT");
  return *owner;
}

}  // namespace

DistanceReport distance_ec(std::span<const double> u, std::span<const double> u0) {
  check_same_size(u, u0);
  double sq = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sq += (u[i] - u0[i]) * (u[i] - u0[i]);
  return {Measure::EC, std::sqrt(sq), sq};
}

double distance_cd(std::span<const double> u, std::span<const double> u0, const ParamBN& pbn) {
  check_same_size(u, u0);
  if (u.size() != pbn.param_count()) throw Error(ErrorKind::UnboundParameter, "instantiation size mismatch");
  const std::size_t var = single_cpt_owner(pbn);
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  for (const auto& row : pbn.network().cpt(var).rows) {
    for (const auto& e : row) {
      const double before = e.eval(u0);
      const double after = e.eval(u);
      if (before == 0.0 && after == 0.0) continue;
      if (before == 0.0 || after == 0.0) return std::numeric_limits<double>::infinity();
      const double r = after / before;
      max_ratio = std::max(max_ratio, r);
      min_ratio = std::min(min_ratio, r);
    }
  }
  return std::log(max_ratio) - std::log(min_ratio);
}

DistanceReport distance(Measure m, std::span<const double> u, std::span<const double> u0, const ParamBN& pbn) {
  if (m == Measure::EC) return distance_ec(u, u0);
  const double d = distance_cd(u, u0, pbn);
  return {Measure::CD, d, d * d};
}

double d0_upper(Measure m, const ParamBN& pbn) {
  if (m == Measure::EC) return std::sqrt(static_cast<double>(pbn.param_count()));
  const std::size_t var = single_cpt_owner(pbn);
  const Region space = pbn.parameter_space();
  for (const auto& axis : space.axes()) {
    if (axis.lo <= 0.0 || axis.hi >= 1.0) throw Error(ErrorKind::UnsupportedForCD, "parameter bounds must avoid 0 and 1");
  }
  const std::vector<double> u0 = pbn.original_values();
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  for (const auto& row : pbn.network().cpt(var).rows) {
    for (const auto& e : row) {
      const double theta = e.eval(u0);
      if (theta == 0.0) continue;
      const Interval b = e.bounds(space);
      if (b.lo <= 0.0) throw Error(ErrorKind::UnsupportedForCD, "an entry reaches probability 0 in the parameter space");
      max_ratio = std::max(max_ratio, b.hi / theta);
      min_ratio = std::min(min_ratio, b.lo / theta);
    }
  }
  return std::log(max_ratio) - std::log(min_ratio);
}

// -------------------------------------------------------------- expansion

Region expand_region_ec(std::span<const double> u0, double eps, const Region& space) {
  if (space.dimension() != u0.size()) throw Error(ErrorKind::BadRegion, "space dimension mismatch");
  const double half = u0.empty() ? 0.0 : eps / std::sqrt(static_cast<double>(u0.size()));
  std::vector<Interval> axes;
  axes.reserve(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    axes.push_back({std::max(space[i].lo, u0[i] - half), std::min(space[i].hi, u0[i] + half)});
  }
  return Region(std::move(axes));
}

Region expand_region_ec(std::span<const double> u0, double eps, double delta) {
  return expand_region_ec(u0, eps, Region(std::vector<Interval>(u0.size(), Interval{delta, 1.0 - delta})));
}

Region cd_ratio_box(std::span<const double> u0, double eps, const Region& space) {
  if (space.dimension() != u0.size()) throw Error(ErrorKind::BadRegion, "space dimension mismatch");
  const double alpha = std::exp(eps / 2.0);
  std::vector<Interval> axes;
  axes.reserve(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    axes.push_back({std::max(space[i].lo, u0[i] / alpha), std::min(space[i].hi, u0[i] * alpha)});
  }
  return Region(std::move(axes));
}

Region expand_region_cd(std::span<const double> u0, double eps, const Region& space, const ParamBN& pbn) {
  Region box = cd_ratio_box(u0, eps, space);
  const std::size_t var = single_cpt_owner(pbn);
  const double alpha = std::exp(eps / 2.0);
  std::vector<Interval> axes = box.axes();
  for (const auto& row : pbn.network().cpt(var).rows) {
    for (const auto& e : row) {
      const auto ids = e.params();
      if (ids.empty()) continue;
      if (ids.size() > 1) throw Error(ErrorKind::UnsupportedForCD, "entry depends on several parameters");
      const ParamId x = ids[0];
      // e(x) = a + b x
      const double a = to_double(e.constant_value());
      const double b = to_double((e - Polynomial(e.constant_value())).terms().begin()->second);
      const double theta = a + b * u0[x];
      if (theta <= 0.0 || b == 0.0) continue;
      double lo = (theta / alpha - a) / b;
      double hi = (theta * alpha - a) / b;
      if (b < 0.0) std::swap(lo, hi);
      axes[x].lo = std::max(axes[x].lo, lo);
      axes[x].hi = std::min(axes[x].hi, hi);
      // rounding may push the bounds past u0 for tiny eps
      axes[x].lo = std::min(axes[x].lo, u0[x]);
      axes[x].hi = std::max(axes[x].hi, u0[x]);
    }
  }
  return Region(std::move(axes));
}

// ------------------------------------------------- minimal instantiation

namespace {

std::vector<double> clamp_into(const Region& box, std::span<const double> u0) {
  std::vector<double> u(u0.begin(), u0.end());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(u[i], box[i].lo, box[i].hi);
  return u;
}

}  // namespace

std::vector<double> minimal_instantiation(std::span<const Region> boxes, std::span<const double> u0, Measure m,
                                          const ParamBN& pbn) {
  if (boxes.empty()) throw Error(ErrorKind::EmptyInput, "no accepting region");
  std::vector<double> best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& box : boxes) {
    auto candidate = clamp_into(box, u0);
    const double d = distance(m, candidate, u0, pbn).value;
    if (best.empty() || d < best_distance) {
      best_distance = d;
      best = std::move(candidate);
    }
  }
  return best;
}

// ------------------------------------------------------------------- tune

TuneResult tune(const ParamBN& pbn, const Constraint& c, const Hyper& h) {
  return tune(pbn, pbn.original_values(), c, h);
}

TuneResult tune(const ParamBN& pbn, std::span<const double> u0_span, const Constraint& c, const Hyper& h) {
  h.check();
  const std::vector<double> u0(u0_span.begin(), u0_span.end());
  const Region space = pbn.parameter_space();
  if (!space.contains(u0)) throw Error(ErrorKind::BadRegion, "u0 lies outside the parameter space");
  if (h.measure == Measure::CD) single_cpt_owner(pbn);

  const std::vector<std::size_t> order = h.order.empty() ? pbn.network().topological_order() : h.order;
  const TailoredChain tailored = compile_tailored(pbn, order, c);
  const PMC& chain = tailored.chain;
  const auto& targets = tailored.spec.targets;

  TuneResult result;
  result.probability = reach_prob(chain, u0, targets);
  if (c.holds(result.probability)) {
    result.status = TuneStatus::Satisfied;
    result.instantiation = u0;
    result.distance = {h.measure, 0.0, 0.0};
    result.coverage = 1.0;
    return result;
  }

  const RegionVerifier verifier(chain, tailored.spec, h.verifier);
  const double d0 = d0_upper(h.measure, pbn);
  const unsigned k_max = h.max_iterations;
  bool final_region_is_space = false;

  for (unsigned k = 0; k < k_max; ++k) {
    const double eps = d0 * std::pow(h.gamma, static_cast<double>(k_max - 1 - k));
    const Region region = h.measure == Measure::EC ? expand_region_ec(u0, eps, space)
                                                   : expand_region_cd(u0, eps, space, pbn);
    IterationStats stats;
    stats.epsilon = eps;
    stats.region = region;
    PartitionResult part;
    try {
      part = partition(verifier, region, h.eta, h.partition);
    } catch (const CoverageUnreachable& e) {
      part = e.partial();
      stats.guard_tripped = true;
    }
    stats.accepting = part.accepting.size();
    stats.rejecting = part.rejecting.size();
    stats.unknown = part.unknown.size();
    stats.verifications = part.verifications;
    stats.coverage = part.coverage;
    result.stats.push_back(std::move(stats));
    result.iterations = k + 1;
    result.epsilon_final = eps;
    result.coverage = part.coverage;
    final_region_is_space = region == space;

    if (!part.accepting.empty()) {
      // Candidates in order of distance; the first one must re-check.
      std::vector<std::pair<double, std::vector<double>>> candidates;
      for (const auto& box : part.accepting) {
        auto u = clamp_into(box, u0);
        candidates.emplace_back(distance(h.measure, u, u0, pbn).value, std::move(u));
      }
      std::stable_sort(candidates.begin(), candidates.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [d, u] : candidates) {
        const double prob = reach_prob(chain, u, targets);
        if (!c.holds(prob)) continue;
        result.status = TuneStatus::Tuned;
        result.distance = distance(h.measure, u, u0, pbn);
        result.instantiation = std::move(u);
        result.probability = prob;
        result.last_partition = std::move(part);
        return result;
      }
    }
    result.last_partition = std::move(part);
  }
  result.status = final_region_is_space && result.coverage >= 1.0 ? TuneStatus::Infeasible : TuneStatus::Unknown;
  return result;
}

}  // namespace pbntune
