// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run everything
//   acceptance ac03 ac10  run a selection

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "pbntune/pla.hpp"
#include "pbntune/pmc.hpp"
#include "pbntune/refine.hpp"
#include "pbntune/tune.hpp"

using namespace pbntune;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

TailoredChain tailored(const ParamBN& pbn, const Constraint& c) {
  return compile_tailored(pbn, pbn.network().topological_order(), c);
}

/// The corpus shared by the soundness and sandwich criteria.
struct CorpusCase {
  fixtures::RandomCase rc;
  std::vector<Region> regions;
};

std::vector<CorpusCase> corpus() {
  std::mt19937_64 rng(2024);
  std::vector<CorpusCase> out;
  for (int i = 0; i < 50; ++i) {
    CorpusCase cc{fixtures::random_case(rng, 5, 3), {}};
    for (int r = 0; r < 6; ++r) {
      // mix of wide and narrow boxes so every verdict shows up
      const double w = r < 3 ? 0.96 : 0.15;
      const double lo = std::uniform_real_distribution<double>(0.02, 0.98 - w)(rng);
      cc.regions.push_back(fixtures::random_box(rng, cc.rc.pbn.param_count(), lo, lo + w));
    }
    out.push_back(std::move(cc));
  }
  return out;
}

// ---------------------------------------------------------------- criteria

Outcome ac01() {
  const auto t0 = Clock::now();
  const auto k = fixtures::covid();
  const double p = oracle::infer(k.bn, k.c);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(p - 0.011089) <= 1e-5 && secs < 1.0;
  return {ok, fmt("Pr(C=no | A=pos, P=pos) = %.8f (target 0.011089 +- 1e-5), %.3f s", p, secs)};
}

Outcome ac02() {
  const auto t0 = Clock::now();
  const auto k = fixtures::covid();
  const auto t = tailored(k.pbn, k.c);
  const RationalFunction f = sensitivity_function(t.chain, t.spec.targets);
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto u = fixtures::sample(rng, k.pbn.parameter_space());
    const double expected = 361.0 / (34900.0 * u[0] * u[1] + 8758.0 * u[1] + 361.0);
    worst = std::max(worst, std::abs(f.eval(u) - expected));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 1.0, fmt("max deviation %.3g over 100 points (tol 1e-9), %.3f s", worst, secs)};
}

Outcome ac03() {
  const auto t0 = Clock::now();
  const auto k = fixtures::covid();
  Hyper h;
  h.eta = 0.99;
  h.gamma = 0.5;
  h.measure = Measure::EC;
  const TuneResult r = tune(k.pbn, k.c, h);
  const double secs = seconds_since(t0);
  if (r.status != TuneStatus::Tuned) return {false, std::string("status ") + std::string(to_string(r.status))};
  const double exact = oracle::infer(instantiate(k.pbn, r.instantiation), k.c);
  const double bound = 0.040913125 + (1.0 - h.eta) * 2.0;
  const bool ok = k.c.holds(exact) && r.distance.squared <= bound && secs < 60.0;
  return {ok, fmt("Tuned at (%.6f, %.6f), Pr = %.6f, squared EC %.6f <= %.6f, %.3f s", r.instantiation[0],
                  r.instantiation[1], exact, r.distance.squared, bound, secs)};
}

Outcome ac04() {
  const auto k = fixtures::covid();
  const auto t = tailored(k.pbn, k.c);
  const std::vector<double> u{0.92075, 0.97475};
  const double p = reach_prob(t.chain, u, t.spec.targets);
  const double enumerated = oracle::infer(instantiate(k.pbn, u), k.c);
  return {std::abs(p - 0.008798) <= 1e-5,
          fmt("reach probability %.7f, enumeration %.7f, target 0.008798 +- 1e-5", p, enumerated)};
}

Outcome ac05() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(5);
  std::size_t accepting = 0, rejecting = 0, inconclusive = 0, bad = 0;
  for (const auto& cc : corpus()) {
    const auto t = tailored(cc.rc.pbn, cc.rc.c);
    const RegionVerifier verifier(t.chain, t.spec);
    for (const auto& region : cc.regions) {
      const Verdict v = verifier.verify(region);
      if (v == Verdict::Inconclusive) {
        ++inconclusive;
        continue;
      }
      (v == Verdict::Accepting ? accepting : rejecting)++;
      for (int s = 0; s < 1000; ++s) {
        const auto u = fixtures::sample(rng, region);
        const bool holds = cc.rc.c.holds(oracle::infer(instantiate(cc.rc.pbn, u), cc.rc.c));
        if (holds != (v == Verdict::Accepting)) ++bad;
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = bad == 0 && accepting > 0 && rejecting > 0 && secs < 300.0;
  return {ok, fmt("%zu accepting, %zu rejecting, %zu inconclusive regions; %zu violating samples; %.1f s", accepting,
                  rejecting, inconclusive, bad, secs)};
}

Outcome ac06() {
  std::mt19937_64 rng(6);
  std::size_t checked = 0, outside = 0;
  double worst = 0.0;
  for (const auto& cc : corpus()) {
    const auto t = tailored(cc.rc.pbn, cc.rc.c);
    const RegionVerifier verifier(t.chain, t.spec);
    for (const auto& region : cc.regions) {
      const Interval b = verifier.reach_bounds(region);
      for (int s = 0; s < 100; ++s) {
        const double exact = reach_prob(t.chain, fixtures::sample(rng, region), t.spec.targets);
        const double excess = std::max(b.lo - exact, exact - b.hi);
        worst = std::max(worst, excess);
        if (excess > 1e-8) ++outside;
        ++checked;
      }
    }
  }
  return {outside == 0, fmt("%zu samples, %zu outside [min-1e-8, max+1e-8], worst excess %.3g", checked, outside,
                            worst)};
}

Outcome ac07() {
  std::vector<std::pair<TailoredChain, Region>> cases;
  const auto k = fixtures::covid();
  cases.emplace_back(tailored(k.pbn, k.c), k.pbn.parameter_space());
  std::mt19937_64 rng(7);
  while (cases.size() < 11) {
    auto rc = fixtures::random_case(rng, 5, 2);
    cases.emplace_back(tailored(rc.pbn, rc.c), fixtures::random_box(rng, rc.pbn.param_count()));
  }
  std::size_t runs = 0, failures = 0;
  double worst_unknown = 0.0, worst_tiling = 0.0;
  for (const auto& [t, region] : cases) {
    const RegionVerifier verifier(t.chain, t.spec);
    for (double eta : {0.9, 0.99, 0.999}) {
      ++runs;
      PartitionResult r;
      try {
        r = partition(verifier, region, eta);
      } catch (const CoverageUnreachable& e) {
        ++failures;
        continue;
      }
      double unknown = 0.0, total = 0.0;
      for (const auto& b : r.unknown) unknown += b.normalized_volume(region);
      for (const auto* list : {&r.accepting, &r.rejecting, &r.unknown}) {
        for (const auto& b : *list) total += b.normalized_volume(region);
      }
      worst_unknown = std::max(worst_unknown, unknown - (1.0 - eta));
      worst_tiling = std::max(worst_tiling, std::abs(total - 1.0));
      if (unknown > (1.0 - eta) + 1e-9 || std::abs(total - 1.0) > 1e-12) ++failures;
    }
  }
  return {failures == 0, fmt("%zu partitions, %zu failures; max unknown excess %.3g, max tiling error %.3g", runs,
                             failures, worst_unknown, worst_tiling)};
}

/// Root R and child X; x and y sit in two rows of X's CPT.
ParamBN single_cpt_two_params(std::mt19937_64& rng) {
  Variable r{"R", {"a", "b"}, {}};
  Variable x{"X", {"d0", "d1", "d2"}, {0}};
  const Cpt root{{fixtures::random_row(rng, 2)}};
  const Cpt child{{fixtures::random_row(rng, 3), fixtures::random_row(rng, 3)}};
  const BayesNet bn(Network({r, x}, {root, child}));
  const std::size_t v0 = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
  const std::size_t v1 = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
  const std::vector<ParamSpec> spec{{{1, 0, v0}, "x", std::nullopt}, {{1, 1, v1}, "y", std::nullopt}};
  return parametrize(bn, spec);
}

Outcome ac08() {
  std::mt19937_64 rng(8);
  const auto k = fixtures::covid();
  std::size_t violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool cd = trial % 2 == 1;
    const ParamBN pbn = cd ? single_cpt_two_params(rng) : k.pbn;
    const Measure m = cd ? Measure::CD : Measure::EC;
    const Region box = fixtures::random_box(rng, 2);
    const auto u0 = cd ? pbn.original_values() : fixtures::sample(rng, Region({{0.02, 0.98}, {0.02, 0.98}}));
    const std::vector<Region> boxes{box};
    const double best = distance(m, minimal_instantiation(boxes, u0, m, pbn), u0, pbn).value;
    for (int i = 0; i < 100; ++i) {
      for (int j = 0; j < 100; ++j) {
        const std::vector<double> g{box[0].lo + box[0].width() * i / 99.0, box[1].lo + box[1].width() * j / 99.0};
        if (best > distance(m, g, u0, pbn).value + 1e-12) ++violations;
      }
    }
  }
  return {violations == 0, fmt("1000 boxes (500 EC, 500 CD) x 10^4 grid points, %zu grid points closer", violations)};
}

Outcome ac09() {
  std::mt19937_64 rng(9);
  std::size_t vertices = 0, over = 0, mismatches = 0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const ParamBN pbn = single_cpt_two_params(rng);
    const auto u0 = pbn.original_values();
    const double eps = std::uniform_real_distribution<double>(0.01, 4.0)(rng);
    const Region r = expand_region_cd(u0, eps, pbn.parameter_space(), pbn);
    const BayesNet base = instantiate(pbn, u0);
    for (int mask = 0; mask < 4; ++mask) {
      const std::vector<double> v{mask & 1 ? r[0].hi : r[0].lo, mask & 2 ? r[1].hi : r[1].lo};
      const double closed = distance_cd(v, u0, pbn);
      const double exact = oracle::cd_exact(base, instantiate(pbn, v));
      ++vertices;
      if (closed > eps + 1e-9) ++over;
      worst_gap = std::max(worst_gap, std::abs(closed - exact));
      if (std::abs(closed - exact) > 1e-9) ++mismatches;
    }
  }
  return {over == 0 && mismatches == 0,
          fmt("%zu vertices: %zu exceed eps + 1e-9, %zu closed-form/enumeration mismatches (max gap %.3g)", vertices,
              over, mismatches, worst_gap)};
}

Outcome ac10() {
  auto k = fixtures::covid_with(0.001);
  Hyper h;
  h.eta = 1.0;
  const TuneResult r = tune(k.pbn, k.c, h);
  const auto& last = r.stats.back();
  const bool full = last.region == k.pbn.parameter_space();
  const bool ok = r.status == TuneStatus::Infeasible && full && last.verifications == 1;
  return {ok, fmt("status %s after %zu iterations; final region is the full space: %s; verifications there: %zu",
                  std::string(to_string(r.status)).c_str(), r.iterations, full ? "yes" : "no", last.verifications)};
}

/// 30 binary variables in a chain with occasional skip edges; the two
/// parameters sit in the CPTs of the hypothesis node's ancestors.
Outcome smoke() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(30);
  constexpr std::size_t n = 30;
  std::vector<Variable> vars;
  std::vector<Cpt> cpts;
  for (std::size_t v = 0; v < n; ++v) {
    Variable var{"n" + std::to_string(v), {"t", "f"}, {}};
    if (v > 0) var.parents.push_back(v - 1);
    if (v > 1 && std::bernoulli_distribution(0.3)(rng)) var.parents.insert(var.parents.begin(), v - 2);
    Cpt cpt;
    const std::size_t rows = std::size_t{1} << var.parents.size();
    for (std::size_t r = 0; r < rows; ++r) cpt.rows.push_back(fixtures::random_row(rng, 2));
    vars.push_back(std::move(var));
    cpts.push_back(std::move(cpt));
  }
  const BayesNet bn(Network(vars, cpts));
  const std::vector<ParamSpec> spec{{{n - 2, 0, 0}, "a", std::nullopt}, {{n - 1, 0, 0}, "b", std::nullopt}};
  const ParamBN pbn = parametrize(bn, spec);
  Constraint c{{{n - 1, 0}}, {{10, 0}}, Direction::LessEq, 0.0};
  const auto t = tailored(pbn, c);
  const auto u0 = pbn.original_values();
  const double at_u0 = reach_prob(t.chain, u0, t.spec.targets);
  const RegionVerifier verifier(t.chain, t.spec);
  const double floor = verifier.reach_bounds(pbn.parameter_space()).lo;
  c.threshold = floor + 0.5 * (at_u0 - floor);  // feasible, not met at u0
  const TuneResult r = tune(pbn, c, Hyper{});
  const double secs = seconds_since(t0);
  const bool ok = r.status == TuneStatus::Tuned && c.holds(reach_prob(t.chain, r.instantiation, t.spec.targets)) &&
                  secs < 300.0;
  return {ok, fmt("%zu nodes, chain of %zu states; status %s, distance %.4f; %.2f s", n, t.chain.state_count(),
                  std::string(to_string(r.status)).c_str(), r.distance.value, secs)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<std::string, std::function<Outcome()>>> criteria{
      {"ac01", {"COVID baseline inference", ac01}},
      {"ac02", {"sensitivity function matches 361/(34900pq+8758q+361)", ac02}},
      {"ac03", {"worked-example tuning", ac03}},
      {"ac04", {"spot value at (0.92075, 0.97475)", ac04}},
      {"ac05", {"verdict soundness on random pBNs", ac05}},
      {"ac06", {"parameter-lifting sandwich", ac06}},
      {"ac07", {"coverage contract and tiling", ac07}},
      {"ac08", {"clamped candidate vs grid", ac08}},
      {"ac09", {"CD expansion closeness and closed form", ac09}},
      {"ac10", {"infeasibility in one verification", ac10}},
      {"smoke", {"30-node synthetic tune", smoke}},
  };
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) selected.emplace_back(argv[i]);
  if (selected.empty()) {
    for (const auto& [id, _] : criteria) selected.push_back(id);
  }
  int failed = 0;
  for (const auto& id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::printf("FAIL %s: unknown criterion\n", id.c_str());
      ++failed;
      continue;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s %s: %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), it->second.first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
