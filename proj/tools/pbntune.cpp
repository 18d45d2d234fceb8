// Command-line front end: infer, compile, verify, partition, tune.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "pbntune/error.hpp"
#include "pbntune/io.hpp"
#include "pbntune/oracle.hpp"
#include "pbntune/pla.hpp"
#include "pbntune/pmc.hpp"
#include "pbntune/refine.hpp"
#include "pbntune/tune.hpp"

using namespace pbntune;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUnknown = 3;

struct RunConfig {
  std::string network;
  std::string params;
  std::string constraint;
  std::string constraint_file;
  std::string output;
  std::string region;
  std::string at;
  std::string order;
  std::string emit_boxes;
  std::string emit_dot;
  double eta = 0.99;
  double gamma = 0.5;
  unsigned max_iters = 6;
  std::string distance = "ec";
  double delta = kDefaultDelta;
  double vi_tol = 1e-10;
  unsigned threads = 1;
  std::size_t self_check = 0;
  std::uint64_t seed = 1;
  bool sensitivity = false;
};

class Clock {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Model {
  BayesNet bn;
  std::optional<ParamBN> pbn;
  std::optional<Constraint> constraint;
};

Model load(const RunConfig& cfg, bool need_params, bool need_constraint) {
  Model m{parse_network(read_file(cfg.network)), std::nullopt, std::nullopt};
  if (!cfg.params.empty()) {
    m.pbn = parse_params(read_file(cfg.params), m.bn, cfg.delta);
  } else if (need_params) {
    throw Error(ErrorKind::InvalidArgument, "--params is required for this command");
  }
  std::string text = cfg.constraint;
  if (text.empty() && !cfg.constraint_file.empty()) text = read_file(cfg.constraint_file);
  if (!text.empty()) {
    m.constraint = parse_constraint(text, m.bn.network());
  } else if (need_constraint) {
    throw Error(ErrorKind::InvalidArgument, "--constraint or --constraint-file is required");
  }
  return m;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

double parse_real(const std::string& s) {
  return to_double(parse_decimal(s));
}

/// "lo:hi,lo:hi" in declared parameter order; empty means the whole space.
Region parse_region(const std::string& text, const ParamBN& pbn) {
  if (text.empty()) return pbn.parameter_space();
  std::vector<Interval> axes;
  for (const auto& axis : split(text, ',')) {
    const auto bounds = split(axis, ':');
    if (bounds.size() != 2) throw Error(ErrorKind::BadRegion, "axis '" + axis + "' is not lo:hi");
    axes.push_back({parse_real(bounds[0]), parse_real(bounds[1])});
    if (!(axes.back().lo <= axes.back().hi)) throw Error(ErrorKind::BadRegion, "axis '" + axis + "' has lo > hi");
  }
  if (axes.size() != pbn.param_count()) {
    throw Error(ErrorKind::BadRegion, "region has " + std::to_string(axes.size()) + " axes, model has " +
                                          std::to_string(pbn.param_count()) + " parameters");
  }
  return Region(std::move(axes));
}

/// "p=0.9,q=0.97"; unnamed parameters keep u0.
std::vector<double> parse_instantiation(const std::string& text, const ParamBN& pbn) {
  std::vector<double> u = pbn.original_values();
  if (text.empty()) return u;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "expected name=value, got '" + item + "'");
    u[pbn.param_id(item.substr(0, eq))] = parse_real(item.substr(eq + 1));
  }
  return u;
}

std::vector<std::size_t> order_of(const RunConfig& cfg, const Network& net) {
  return cfg.order.empty() ? net.topological_order() : parse_order(cfg.order, net);
}

Hyper hyper_of(const RunConfig& cfg, const Network& net) {
  Hyper h;
  h.eta = cfg.eta;
  h.gamma = cfg.gamma;
  h.max_iterations = cfg.max_iters;
  if (cfg.distance == "ec") {
    h.measure = Measure::EC;
  } else if (cfg.distance == "cd") {
    h.measure = Measure::CD;
  } else {
    throw Error(ErrorKind::InvalidArgument, "--distance must be ec or cd");
  }
  h.delta = cfg.delta;
  h.verifier.value_iteration.tolerance = cfg.vi_tol;
  h.partition.threads = cfg.threads;
  h.order = order_of(cfg, net);
  h.check();
  return h;
}

json instantiation_json(const std::vector<double>& u, const ParamBN& pbn) {
  json out = json::object();
  for (std::size_t i = 0; i < u.size(); ++i) out[pbn.params()[i].name] = u[i];
  return out;
}

json region_json(const Region& r, const ParamBN& pbn) {
  json out = json::object();
  for (std::size_t i = 0; i < r.dimension(); ++i) out[pbn.params()[i].name] = {r[i].lo, r[i].hi};
  return out;
}

json boxes_json(const PartitionResult& p) {
  return {{"accepting", p.accepting.size()}, {"rejecting", p.rejecting.size()}, {"unknown", p.unknown.size()}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

void emit(const RunConfig& cfg, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (cfg.output.empty()) {
    std::cout << text;
  } else {
    write_text(cfg.output, text);
  }
}

void emit_boxes(const RunConfig& cfg, const PartitionResult& p, const ParamBN& pbn) {
  if (cfg.emit_boxes.empty()) return;
  std::ostringstream out;
  const auto names = pbn.param_names();
  write_boxes_csv(out, p, names);
  write_text(cfg.emit_boxes, out.str());
}

// ---------------------------------------------------------------- commands

int run_infer(const RunConfig& cfg) {
  Clock clock;
  const Model m = load(cfg, false, true);
  const BayesNet bn = m.pbn ? instantiate(*m.pbn, parse_instantiation(cfg.at, *m.pbn)) : m.bn;
  const double p = oracle::infer(bn, *m.constraint);
  json doc;
  doc["constraint"] = to_string(*m.constraint, bn.network());
  doc["probability"] = p;
  doc["holds"] = m.constraint->holds(p);
  if (m.pbn) doc["instantiation"] = instantiation_json(parse_instantiation(cfg.at, *m.pbn), *m.pbn);
  doc["timings_ms"] = {{"total", clock.lap_ms()}};
  emit(cfg, doc);
  return kExitOk;
}

int run_compile(const RunConfig& cfg) {
  Clock clock;
  const Model m = load(cfg, true, false);
  const auto order = order_of(cfg, m.bn.network());
  json doc;
  PMC chain;
  std::vector<StateId> targets;
  if (m.constraint) {
    auto tailored = compile_tailored(*m.pbn, order, *m.constraint);
    chain = std::move(tailored.chain);
    targets = tailored.spec.targets;
    doc["kind"] = "evidence-tailored";
  } else {
    chain = compile(*m.pbn, order);
    doc["kind"] = "plain";
  }
  doc["states"] = chain.state_count();
  doc["transitions"] = chain.transition_count();
  doc["parameters"] = chain.param_names();
  if (m.constraint) doc["targets"] = targets;
  if (cfg.sensitivity && m.constraint) {
    const auto f = sensitivity_function(chain, targets);
    const auto names = chain.param_names();
    doc["sensitivity_function"] = f.to_string(names);
  }
  if (!cfg.emit_dot.empty()) write_text(cfg.emit_dot, to_dot(chain));
  doc["timings_ms"] = {{"total", clock.lap_ms()}};
  emit(cfg, doc);
  return kExitOk;
}

int run_verify(const RunConfig& cfg) {
  Clock clock;
  const Model m = load(cfg, true, true);
  const Hyper h = hyper_of(cfg, m.bn.network());
  const auto tailored = compile_tailored(*m.pbn, h.order, *m.constraint);
  const Region region = parse_region(cfg.region, *m.pbn);
  const RegionVerifier verifier(tailored.chain, tailored.spec, h.verifier);
  const Interval bounds = verifier.reach_bounds(region);
  json doc;
  doc["verdict"] = to_string(verifier.verify(region));
  doc["region"] = region_json(region, *m.pbn);
  doc["reach_bounds"] = {bounds.lo, bounds.hi};
  doc["timings_ms"] = {{"total", clock.lap_ms()}};
  emit(cfg, doc);
  return kExitOk;
}

int run_partition(const RunConfig& cfg) {
  Clock clock;
  const Model m = load(cfg, true, true);
  const Hyper h = hyper_of(cfg, m.bn.network());
  const auto tailored = compile_tailored(*m.pbn, h.order, *m.constraint);
  const double compile_ms = clock.lap_ms();
  const Region region = parse_region(cfg.region, *m.pbn);
  const RegionVerifier verifier(tailored.chain, tailored.spec, h.verifier);
  PartitionResult result;
  bool reached = true;
  try {
    result = partition(verifier, region, h.eta, h.partition);
  } catch (const CoverageUnreachable& e) {
    result = e.partial();
    reached = false;
  }
  emit_boxes(cfg, result, *m.pbn);
  json doc;
  doc["status"] = reached ? "Complete" : "CoverageUnreachable";
  doc["coverage"] = result.coverage;
  doc["verifications"] = result.verifications;
  doc["boxes"] = boxes_json(result);
  doc["timings_ms"] = {{"compile", compile_ms}, {"partition", clock.lap_ms()}};
  emit(cfg, doc);
  return reached ? kExitOk : kExitUnknown;
}

/// Samples points from accepting boxes and checks each by exact inference.
json self_check(const RunConfig& cfg, const ParamBN& pbn, const Constraint& c, const PartitionResult& p) {
  std::mt19937_64 rng(cfg.seed);
  std::size_t violations = 0;
  std::size_t samples = 0;
  for (std::size_t i = 0; i < cfg.self_check && !p.accepting.empty(); ++i) {
    const Region& box = p.accepting[std::uniform_int_distribution<std::size_t>(0, p.accepting.size() - 1)(rng)];
    std::vector<double> u;
    for (const auto& axis : box.axes()) u.push_back(std::uniform_real_distribution<double>(axis.lo, axis.hi)(rng));
    ++samples;
    if (!c.holds(oracle::infer(instantiate(pbn, u), c))) ++violations;
  }
  return {{"samples", samples}, {"violations", violations}, {"seed", cfg.seed}};
}

int run_tune(const RunConfig& cfg) {
  Clock clock;
  const Model m = load(cfg, true, true);
  const Hyper h = hyper_of(cfg, m.bn.network());
  const ParamBN& pbn = *m.pbn;
  const TuneResult r = tune(pbn, *m.constraint, h);
  const double tune_ms = clock.lap_ms();

  json doc;
  doc["status"] = to_string(r.status);
  doc["instantiation"] = r.instantiation.empty() ? json(nullptr) : instantiation_json(r.instantiation, pbn);
  if (r.status == TuneStatus::Satisfied || r.status == TuneStatus::Tuned) {
    doc["distance"] = {{"measure", h.measure == Measure::EC ? "ec" : "cd"},
                       {"value", r.distance.value},
                       {"squared", r.distance.squared}};
  } else {
    doc["distance"] = nullptr;
  }
  doc["probability"] = r.probability;
  doc["epsilon_final"] = r.epsilon_final;
  doc["iterations"] = r.iterations;
  doc["coverage"] = r.coverage;
  doc["boxes"] = boxes_json(r.last_partition);
  json history = json::array();
  for (const auto& s : r.stats) {
    history.push_back({{"epsilon", s.epsilon},
                       {"region", region_json(s.region, pbn)},
                       {"accepting", s.accepting},
                       {"rejecting", s.rejecting},
                       {"unknown", s.unknown},
                       {"verifications", s.verifications},
                       {"coverage", s.coverage},
                       {"guard_tripped", s.guard_tripped}});
  }
  doc["history"] = std::move(history);
  if (cfg.self_check > 0) doc["self_check"] = self_check(cfg, pbn, *m.constraint, r.last_partition);
  emit_boxes(cfg, r.last_partition, pbn);
  if (!cfg.emit_dot.empty()) write_text(cfg.emit_dot, to_dot(compile_tailored(pbn, h.order, *m.constraint).chain));
  doc["timings_ms"] = {{"tune", tune_ms}, {"output", clock.lap_ms()}};
  emit(cfg, doc);

  switch (r.status) {
    case TuneStatus::Satisfied:
    case TuneStatus::Tuned: return kExitOk;
    case TuneStatus::Infeasible: return kExitInfeasible;
    case TuneStatus::Unknown: return kExitUnknown;
  }
  return kExitError;
}

void add_model_options(CLI::App* sub, RunConfig& cfg, bool constraint) {
  sub->add_option("-n,--network", cfg.network, "Network file")->required()->check(CLI::ExistingFile);
  sub->add_option("-p,--params", cfg.params, "Parameter file")->check(CLI::ExistingFile);
  if (constraint) {
    sub->add_option("-c,--constraint", cfg.constraint, "Constraint, e.g. \"P(A=pos | B=neg) <= 0.1\"");
    sub->add_option("--constraint-file", cfg.constraint_file, "File holding the constraint")
        ->check(CLI::ExistingFile);
  }
  sub->add_option("--delta", cfg.delta, "Default parameter bound margin")->capture_default_str();
  sub->add_option("-o,--output", cfg.output, "Write JSON here instead of stdout");
}

void add_analysis_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--order", cfg.order, "Variable order v1,v2,... for chain compilation");
  sub->add_option("--vi-tol", cfg.vi_tol, "Value-iteration tolerance")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "Worker threads for region checks")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal-change parameter tuning for Bayesian networks"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* infer = app.add_subcommand("infer", "Exact Pr(H | E) by enumeration");
  add_model_options(infer, cfg, true);
  infer->add_option("--at", cfg.at, "Instantiation p=0.9,q=0.97 (default: original values)");

  auto* comp = app.add_subcommand("compile", "Compile to a parametric Markov chain and report its size");
  add_model_options(comp, cfg, true);
  comp->add_option("--order", cfg.order, "Variable order v1,v2,...");
  comp->add_option("--emit-dot", cfg.emit_dot, "Write the chain in DOT format");
  comp->add_flag("--sensitivity", cfg.sensitivity, "Also compute the sensitivity function");

  auto* verify = app.add_subcommand("verify", "Check one region by parameter lifting");
  add_model_options(verify, cfg, true);
  add_analysis_options(verify, cfg);
  verify->add_option("--region", cfg.region, "lo:hi,lo:hi per parameter (default: full space)");

  auto* part = app.add_subcommand("partition", "Split a region until coverage eta is reached");
  add_model_options(part, cfg, true);
  add_analysis_options(part, cfg);
  part->add_option("--region", cfg.region, "lo:hi,lo:hi per parameter (default: full space)");
  part->add_option("--eta", cfg.eta, "Coverage factor")->capture_default_str();
  part->add_option("--emit-boxes", cfg.emit_boxes, "Write boxes as CSV");

  auto* tn = app.add_subcommand("tune", "Find a close instantiation satisfying the constraint");
  add_model_options(tn, cfg, true);
  add_analysis_options(tn, cfg);
  tn->add_option("--eta", cfg.eta, "Coverage factor")->capture_default_str();
  tn->add_option("--gamma", cfg.gamma, "Region expansion factor")->capture_default_str();
  tn->add_option("--max-iters", cfg.max_iters, "Number of expansions K")->capture_default_str();
  tn->add_option("--distance", cfg.distance, "ec or cd")->check(CLI::IsMember({"ec", "cd"}))->capture_default_str();
  tn->add_option("--emit-boxes", cfg.emit_boxes, "Write the final partition as CSV");
  tn->add_option("--emit-dot", cfg.emit_dot, "Write the evidence-tailored chain in DOT format");
  tn->add_option("--self-check", cfg.self_check, "Sample this many points from accepting boxes and re-check");
  tn->add_option("--seed", cfg.seed, "Seed for --self-check")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*infer) return run_infer(cfg);
    if (*comp) return run_compile(cfg);
    if (*verify) return run_verify(cfg);
    if (*part) return run_partition(cfg);
    if (*tn) return run_tune(cfg);
  } catch (const Error& e) {
    std::cerr << "pbntune: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "pbntune: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
