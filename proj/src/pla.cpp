#include "pbntune/pla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbntune/error.hpp"

namespace pbntune {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Accepting: return "Accepting";
    case Verdict::Rejecting: return "Rejecting";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

// ------------------------------------------------------------------ relax

RelaxedPMC relax(const PMC& pmc) {
  RelaxedPMC out;
  out.original_param_count = pmc.params.size();
  out.chain.query = pmc.query;
  std::vector<std::size_t> copies(pmc.params.size(), 0);
  std::vector<ParamId> mapping(pmc.params.size(), 0);

  for (StateId s = 0; s < pmc.state_count(); ++s) {
    const StateId copy = out.chain.add_state(pmc.state(s).label, pmc.state(s).level);
    out.chain.state(copy).leaf = pmc.state(s).leaf;
  }
  for (StateId s = 0; s < pmc.state_count(); ++s) {
    std::vector<ParamId> local;
    for (const auto& t : pmc.transitions(s)) {
      for (ParamId id : t.probability.params()) local.push_back(id);
    }
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
    for (ParamId id : local) {
      Parameter fresh = pmc.params[id];
      fresh.name += std::string(copies[id]++, '\'');
      mapping[id] = static_cast<ParamId>(out.chain.params.size());
      out.chain.params.push_back(std::move(fresh));
      out.origin.push_back(id);
    }
    for (const auto& t : pmc.transitions(s)) {
      out.chain.add_transition(s, t.target, local.empty() ? t.probability : t.probability.rename(mapping));
    }
  }
  return out;
}

// ------------------------------------------------------------- substitute

BoundMDP substitute(const RelaxedPMC& relaxed, const Region& region) {
  const PMC& chain = relaxed.chain;
  if (region.dimension() != relaxed.original_param_count) {
    throw Error(ErrorKind::BadRegion, "region dimension does not match the parameter count");
  }
  for (std::size_t f = 0; f < chain.params.size(); ++f) {
    const Interval& declared = chain.params[f].range;
    const Interval& axis = region[relaxed.origin[f]];
    if (axis.lo < declared.lo - 1e-12 || axis.hi > declared.hi + 1e-12) {
      throw Error(ErrorKind::BadRegion, "region leaves the declared interval of " + chain.params[f].name);
    }
  }

  BoundMDP mdp;
  mdp.initial = chain.initial();
  mdp.actions.resize(chain.state_count());
  std::vector<double> u(chain.params.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<ParamId> local;
  for (StateId s = 0; s < chain.state_count(); ++s) {
    const auto& out = chain.transitions(s);
    local.clear();
    for (const auto& t : out) {
      for (ParamId id : t.probability.params()) local.push_back(id);
    }
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
    // degenerate axes contribute a single value
    std::vector<ParamId> free;
    for (ParamId id : local) {
      const Interval& axis = region[relaxed.origin[id]];
      u[id] = axis.lo;
      if (axis.hi > axis.lo) free.push_back(id);
    }
    if (free.size() > 20) throw Error(ErrorKind::TooLarge, "state has too many local parameters");
    const std::size_t n_vertices = std::size_t{1} << free.size();
    auto& actions = mdp.actions[s];
    actions.reserve(n_vertices);
    for (std::size_t v = 0; v < n_vertices; ++v) {
      for (std::size_t k = 0; k < free.size(); ++k) {
        const Interval& axis = region[relaxed.origin[free[k]]];
        u[free[k]] = (v >> k) & 1U ? axis.hi : axis.lo;
      }
      MdpAction action;
      action.distribution.reserve(out.size());
      for (const auto& t : out) action.distribution.emplace_back(t.target, t.probability.eval(u));
      actions.push_back(std::move(action));
    }
  }
  return mdp;
}

// --------------------------------------------------------- extremal_reach

namespace {

/// States with positive optimal reachability: any scheduler (max) or all
/// schedulers (min).
std::vector<char> positive_states(const BoundMDP& mdp, const std::vector<char>& is_target, Optimize mode) {
  const std::size_t n = mdp.state_count();
  std::vector<char> positive = is_target;
  if (mode == Optimize::Max) {
    std::vector<std::vector<StateId>> pred(n);
    for (StateId s = 0; s < n; ++s) {
      for (const auto& a : mdp.actions[s]) {
        for (const auto& [t, p] : a.distribution) {
          if (p > 0.0) pred[t].push_back(s);
        }
      }
    }
    std::vector<StateId> stack;
    for (StateId s = 0; s < n; ++s) {
      if (positive[s]) stack.push_back(s);
    }
    while (!stack.empty()) {
      const StateId s = stack.back();
      stack.pop_back();
      for (StateId p : pred[s]) {
        if (!positive[p]) {
          positive[p] = 1;
          stack.push_back(p);
        }
      }
    }
    return positive;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (StateId s = 0; s < n; ++s) {
      if (positive[s] || mdp.actions[s].empty()) continue;
      bool all = true;
      for (const auto& a : mdp.actions[s]) {
        bool some = false;
        for (const auto& [t, p] : a.distribution) {
          if (p > 0.0 && positive[t] && t != s) some = true;
        }
        if (!some) {
          all = false;
          break;
        }
      }
      if (all) {
        positive[s] = 1;
        changed = true;
      }
    }
  }
  return positive;
}

/// Post-order from the initial state, so successors precede predecessors
/// except along back edges.
std::vector<StateId> sweep_order(const BoundMDP& mdp, const std::vector<char>& active) {
  const std::size_t n = mdp.state_count();
  std::vector<char> seen(n, 0);
  std::vector<StateId> order;
  std::vector<std::vector<StateId>> succ(n);
  for (StateId s = 0; s < n; ++s) {
    for (const auto& a : mdp.actions[s]) {
      for (const auto& [t, p] : a.distribution) {
        if (p > 0.0) succ[s].push_back(t);
      }
    }
    std::sort(succ[s].begin(), succ[s].end());
    succ[s].erase(std::unique(succ[s].begin(), succ[s].end()), succ[s].end());
  }
  std::vector<std::pair<StateId, std::size_t>> stack{{mdp.initial, 0}};
  seen[mdp.initial] = 1;
  while (!stack.empty()) {
    auto& [s, next] = stack.back();
    if (next < succ[s].size()) {
      const StateId t = succ[s][next++];
      if (!seen[t]) {
        seen[t] = 1;
        stack.emplace_back(t, 0);
      }
      continue;
    }
    if (active[s]) order.push_back(s);
    stack.pop_back();
  }
  return order;
}

}  // namespace

double extremal_reach(const BoundMDP& mdp, std::span<const StateId> targets, Optimize mode,
                      ValueIterationOptions options) {
  const std::size_t n = mdp.state_count();
  std::vector<char> is_target(n, 0);
  for (StateId t : targets) is_target.at(t) = 1;
  if (is_target[mdp.initial]) return 1.0;

  const std::vector<char> positive = positive_states(mdp, is_target, mode);
  if (!positive[mdp.initial]) return 0.0;

  std::vector<char> active(n, 0);
  for (StateId s = 0; s < n; ++s) active[s] = positive[s] && !is_target[s];
  const std::vector<StateId> order = sweep_order(mdp, active);

  std::vector<double> x(n, 0.0);
  for (StateId s = 0; s < n; ++s) {
    if (is_target[s]) x[s] = 1.0;
  }
  double previous_diff = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double diff = 0.0;
    for (StateId s : order) {
      double best = mode == Optimize::Max ? 0.0 : 1.0;
      for (const auto& a : mdp.actions[s]) {
        double v = 0.0;
        for (const auto& [t, p] : a.distribution) v += p * x[t];
        best = mode == Optimize::Max ? std::max(best, v) : std::min(best, v);
      }
      diff = std::max(diff, std::abs(best - x[s]));
      x[s] = best;
    }
    if (diff < options.tolerance) {
      // geometric tail estimate guards against slow contraction
      const double rate = previous_diff > 0.0 ? diff / previous_diff : 0.0;
      if (diff < 1e-3 * options.tolerance || (rate < 1.0 && diff * rate / (1.0 - rate) < options.tolerance)) break;
    }
    previous_diff = diff;
  }
  return x[mdp.initial];
}

// --------------------------------------------------------- RegionVerifier

RegionVerifier::RegionVerifier(const PMC& pmc, ReachSpec spec, VerifierOptions options)
    : relaxed_(relax(pmc)), spec_(std::move(spec)), options_(options), space_(pmc.parameter_space()) {}

Interval RegionVerifier::reach_bounds(const Region& region) const {
  const BoundMDP mdp = substitute(relaxed_, region);
  return {extremal_reach(mdp, spec_.targets, Optimize::Min, options_.value_iteration),
          extremal_reach(mdp, spec_.targets, Optimize::Max, options_.value_iteration)};
}

Verdict RegionVerifier::verify(const Region& region) const {
  const BoundMDP mdp = substitute(relaxed_, region);
  const double lambda = spec_.threshold;
  const double m = options_.margin;
  if (spec_.direction == Direction::LessEq) {
    if (extremal_reach(mdp, spec_.targets, Optimize::Max, options_.value_iteration) <= lambda - m) return Verdict::Accepting;
    if (extremal_reach(mdp, spec_.targets, Optimize::Min, options_.value_iteration) > lambda + m) return Verdict::Rejecting;
  } else {
    if (extremal_reach(mdp, spec_.targets, Optimize::Min, options_.value_iteration) >= lambda + m) return Verdict::Accepting;
    if (extremal_reach(mdp, spec_.targets, Optimize::Max, options_.value_iteration) < lambda - m) return Verdict::Rejecting;
  }
  return Verdict::Inconclusive;
}

Verdict verify_region(const PMC& pmc, const Region& region, const ReachSpec& spec, VerifierOptions options) {
  return RegionVerifier(pmc, spec, options).verify(region);
}

}  // namespace pbntune
