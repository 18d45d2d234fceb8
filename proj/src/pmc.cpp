#include "pbntune/pmc.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pbntune/error.hpp"

namespace pbntune {

// -------------------------------------------------------------------- PMC

StateId PMC::add_state(std::string label, std::size_t level) {
  states_.push_back({std::move(label), level, std::nullopt});
  transitions_.emplace_back();
  return static_cast<StateId>(states_.size() - 1);
}

void PMC::add_transition(StateId source, StateId target, const Polynomial& p) {
  if (p.is_zero()) return;
  auto& out = transitions_.at(source);
  for (auto& t : out) {
    if (t.target == target) {
      t.probability += p;
      return;
    }
  }
  out.push_back({target, p});
}

std::size_t PMC::transition_count() const {
  std::size_t n = 0;
  for (const auto& t : transitions_) n += t.size();
  return n;
}

std::vector<std::string> PMC::param_names() const {
  std::vector<std::string> out;
  for (const auto& p : params) out.push_back(p.name);
  return out;
}

Region PMC::parameter_space() const {
  std::vector<Interval> axes;
  for (const auto& p : params) axes.push_back(p.range);
  return Region(std::move(axes));
}

bool PMC::is_stochastic() const {
  for (const auto& out : transitions_) {
    Polynomial sum;
    for (const auto& t : out) sum += t.probability;
    if (!(sum == Polynomial(1))) return false;
  }
  return true;
}

bool PMC::is_absorbing(StateId s) const {
  const auto& out = transitions_[s];
  return out.size() == 1 && out[0].target == s && out[0].probability == Polynomial(1);
}

// ---------------------------------------------------------------- compile

namespace {

enum class LeafMode { KeepLast, Classified, Tailored };

struct Builder {
  const ParamBN& pbn;
  std::span<const std::size_t> order;
  const Constraint* query;
  LeafMode mode;
  CompileOptions options;

  bool literals_hold(const std::vector<Literal>& lits, std::size_t var, std::size_t value) const {
    for (const auto& l : lits) {
      if (l.var == var && l.value != value) return false;
    }
    return true;
  }

  std::string label(const std::vector<int>& assignment) const {
    const Network& net = pbn.network();
    std::string s;
    for (std::size_t v : order) {
      if (assignment[v] < 0) continue;
      if (!s.empty()) s += ",";
      s += net.variable(v).name + "=" + net.variable(v).values[static_cast<std::size_t>(assignment[v])];
    }
    return s;
  }

  PMC run() {
    const Network& net = pbn.network();
    if (!net.is_topological(order)) throw Error(ErrorKind::BadOrder, "variable order is not topological");
    if (query) check_constraint(net, *query);
    const std::size_t n = order.size();

    // last level at which a variable's value is still read by some CPT
    std::vector<std::size_t> position(net.size());
    for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;
    std::vector<long> last_use(net.size(), -1);
    for (std::size_t v = 0; v < net.size(); ++v) {
      for (std::size_t p : net.variable(v).parents) {
        last_use[p] = std::max(last_use[p], static_cast<long>(position[v]));
      }
    }

    PMC pmc;
    pmc.params = pbn.params();
    if (query) pmc.query = *query;
    pmc.add_state("init", 0);

    struct Pending {
      StateId id;
      std::vector<int> assignment;
      bool hyp;
      bool evid;
    };
    std::vector<Pending> frontier{{0, std::vector<int>(net.size(), -1), true, true}};

    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t var = order[i];
      const auto& parents = net.variable(var).parents;
      const bool leaf_level = i + 1 == n;
      std::map<std::vector<int>, std::size_t> index;  // key -> position in next
      std::vector<Pending> next;

      for (const auto& src : frontier) {
        std::vector<std::size_t> pvals;
        pvals.reserve(parents.size());
        for (std::size_t p : parents) pvals.push_back(static_cast<std::size_t>(src.assignment[p]));
        const CptRow& row = net.cpt(var).rows[net.row_index(var, pvals)];

        for (std::size_t d = 0; d < row.size(); ++d) {
          if (row[d].is_zero()) continue;
          const bool hyp = src.hyp && (!query || literals_hold(query->hypothesis, var, d));
          const bool evid = src.evid && (!query || literals_hold(query->evidence, var, d));
          if (mode == LeafMode::Tailored && !evid) {
            pmc.add_transition(src.id, pmc.initial(), row[d]);
            continue;
          }
          std::vector<int> assignment = src.assignment;
          assignment[var] = static_cast<int>(d);
          for (std::size_t j = 0; j <= i; ++j) {
            const std::size_t w = order[j];
            const bool keep = j == i || !options.forget || last_use[w] > static_cast<long>(i);
            if (!keep) assignment[w] = -1;
          }
          std::vector<int> key;
          if (leaf_level && mode != LeafMode::KeepLast) {
            key = {hyp ? 1 : 0, evid ? 1 : 0};
          } else {
            key = assignment;
            if (query) {
              key.push_back(hyp ? 1 : 0);
              key.push_back(evid ? 1 : 0);
            }
          }
          auto [it, fresh] = index.emplace(key, next.size());
          if (fresh) {
            std::string name;
            if (leaf_level && mode == LeafMode::Tailored) {
              name = hyp ? "H" : "!H";
            } else if (leaf_level && mode == LeafMode::Classified) {
              name = std::string(hyp ? "H" : "!H") + "," + (evid ? "E" : "!E");
            } else {
              name = label(assignment);
            }
            const StateId id = pmc.add_state(std::move(name), i + 1);
            if (leaf_level && mode != LeafMode::KeepLast) pmc.state(id).leaf = LeafClass{hyp, evid};
            next.push_back({id, std::move(assignment), hyp, evid});
          }
          pmc.add_transition(src.id, next[it->second].id, row[d]);
        }
      }
      frontier = std::move(next);
    }
    for (const auto& leaf : frontier) pmc.add_transition(leaf.id, leaf.id, Polynomial(1));
    return pmc;
  }
};

}  // namespace

PMC compile(const ParamBN& pbn, std::span<const std::size_t> order, CompileOptions options) {
  return Builder{pbn, order, nullptr, LeafMode::KeepLast, options}.run();
}

PMC compile(const ParamBN& pbn, std::span<const std::size_t> order, const Constraint& query,
            CompileOptions options) {
  return Builder{pbn, order, &query, LeafMode::Classified, options}.run();
}

namespace {

/// Probability of reaching a leaf before restarting, evaluated at u. Only
/// meaningful on tailored chains (acyclic apart from edges into the initial
/// state).
double evidence_mass(const PMC& pmc, std::span<const double> u) {
  std::vector<double> mass(pmc.state_count(), 0.0);
  // states are created level by level, so reverse index order is a valid
  // reverse topological order of the acyclic part
  for (StateId s = static_cast<StateId>(pmc.state_count()); s-- > 0;) {
    if (pmc.state(s).leaf) {
      mass[s] = 1.0;
      continue;
    }
    double m = 0.0;
    for (const auto& t : pmc.transitions(s)) {
      if (t.target != pmc.initial()) m += t.probability.eval(u) * mass[t.target];
    }
    mass[s] = m;
  }
  return mass[pmc.initial()];
}

}  // namespace

TailoredChain compile_tailored(const ParamBN& pbn, std::span<const std::size_t> order, const Constraint& c,
                               CompileOptions options) {
  TailoredChain out;
  out.chain = Builder{pbn, order, &c, LeafMode::Tailored, options}.run();
  bool has_originals = std::all_of(pbn.params().begin(), pbn.params().end(),
                                   [](const Parameter& p) { return p.original.has_value(); });
  const std::vector<double> u0 = has_originals ? pbn.original_values() : pbn.parameter_space().center();
  if (!(evidence_mass(out.chain, u0) > 0.0)) {
    throw Error(ErrorKind::EvidenceImpossible, "evidence has probability 0 at the original instantiation");
  }
  for (StateId s = 0; s < out.chain.state_count(); ++s) {
    const auto& leaf = out.chain.state(s).leaf;
    if (leaf && leaf->hypothesis) out.spec.targets.push_back(s);
  }
  out.spec.direction = c.direction;
  out.spec.threshold = c.threshold;
  return out;
}

// ------------------------------------------------------------- reach_prob

double reach_prob(const PMC& pmc, std::span<const double> u, std::span<const StateId> targets) {
  const std::size_t n = pmc.state_count();
  std::vector<std::vector<std::pair<StateId, double>>> probs(n);
  std::vector<std::vector<StateId>> predecessors(n);
  for (StateId s = 0; s < n; ++s) {
    double sum = 0.0;
    for (const auto& t : pmc.transitions(s)) {
      const double p = t.probability.eval(u);
      if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) {
        throw Error(ErrorKind::NotWellFormed, "transition out of '" + pmc.state(s).label + "' evaluates to " + std::to_string(p));
      }
      sum += p;
      if (p > 0.0) {
        probs[s].emplace_back(t.target, p);
        predecessors[t.target].push_back(s);
      }
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorKind::NotWellFormed, "outgoing probabilities of '" + pmc.state(s).label + "' sum to " + std::to_string(sum));
    }
  }

  std::vector<char> is_target(n, 0);
  for (StateId t : targets) is_target.at(t) = 1;
  if (is_target[pmc.initial()]) return 1.0;

  // forward reachable from the initial state
  std::vector<char> forward(n, 0);
  std::vector<StateId> stack{pmc.initial()};
  forward[pmc.initial()] = 1;
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    if (is_target[s]) continue;
    for (const auto& [t, p] : probs[s]) {
      if (!forward[t]) {
        forward[t] = 1;
        stack.push_back(t);
      }
    }
  }
  // backward reachable from targets
  std::vector<char> backward(n, 0);
  for (StateId t : targets) {
    if (!backward[t]) {
      backward[t] = 1;
      stack.push_back(t);
    }
  }
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (StateId p : predecessors[s]) {
      if (!backward[p]) {
        backward[p] = 1;
        stack.push_back(p);
      }
    }
  }
  if (!backward[pmc.initial()]) return 0.0;

  std::vector<long> unknown(n, -1);
  long m = 0;
  for (StateId s = 0; s < n; ++s) {
    if (forward[s] && backward[s] && !is_target[s]) unknown[s] = m++;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (StateId s = 0; s < n; ++s) {
    if (unknown[s] < 0) continue;
    triplets.emplace_back(unknown[s], unknown[s], 1.0);
    for (const auto& [t, p] : probs[s]) {
      if (is_target[t]) {
        rhs[unknown[s]] += p;
      } else if (unknown[t] >= 0) {
        triplets.emplace_back(unknown[s], unknown[t], -p);
      }
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(a);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::NotWellFormed, "reachability system is singular");
  const Eigen::VectorXd x = solver.solve(rhs);
  return x[unknown[pmc.initial()]];
}

// ---------------------------------------------------- sensitivity_function

RationalFunction sensitivity_function(const PMC& pmc, std::span<const StateId> targets, std::size_t max_states) {
  const std::size_t n = pmc.state_count();
  if (n > max_states) throw Error(ErrorKind::TooLarge, "chain has " + std::to_string(n) + " states");
  std::vector<char> is_target(n, 0);
  for (StateId t : targets) is_target.at(t) = 1;
  const StateId init = pmc.initial();
  if (is_target[init]) return {Polynomial(1), Polynomial(1)};

  // DFS post-order over the graph without edges into the initial state;
  // any other cycle is unsupported.
  std::vector<int> mark(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<StateId> post;
  post.reserve(n);
  std::vector<std::pair<StateId, std::size_t>> stack{{init, 0}};
  mark[init] = 1;
  while (!stack.empty()) {
    auto& [s, next] = stack.back();
    const auto& out = pmc.transitions(s);
    const bool stop = is_target[s] || pmc.is_absorbing(s);
    if (!stop && next < out.size()) {
      const StateId t = out[next++].target;
      if (t == init) continue;
      if (mark[t] == 1) throw Error(ErrorKind::UnsupportedStructure, "cycle not passing through the initial state");
      if (mark[t] == 0) {
        mark[t] = 1;
        stack.emplace_back(t, 0);
      }
      continue;
    }
    mark[s] = 2;
    post.push_back(s);
    stack.pop_back();
  }

  std::vector<Polynomial> reach(n);    // reach target before any restart
  std::vector<Polynomial> restart(n);  // return to the initial state first
  for (StateId s : post) {
    if (is_target[s]) {
      reach[s] = Polynomial(1);
      continue;
    }
    if (pmc.is_absorbing(s)) continue;
    Polynomial r;
    Polynomial z;
    for (const auto& t : pmc.transitions(s)) {
      if (t.target == init) {
        z += t.probability;
      } else {
        if (!reach[t.target].is_zero()) r += t.probability * reach[t.target];
        if (!restart[t.target].is_zero()) z += t.probability * restart[t.target];
      }
    }
    reach[s] = std::move(r);
    restart[s] = std::move(z);
  }
  RationalFunction f{reach[init], Polynomial(1) - restart[init]};
  if (f.numerator.is_zero()) f.denominator = Polynomial(1);
  f.normalize();
  return f;
}

// -------------------------------------------------- conditional_via_ratio

double conditional_via_ratio(const PMC& plain, const Constraint& c, std::span<const double> u) {
  if (!plain.query || !(*plain.query == c)) {
    throw Error(ErrorKind::InvalidArgument, "chain was not compiled for this constraint");
  }
  std::vector<StateId> not_h_or_not_e;
  std::vector<StateId> not_e;
  for (StateId s = 0; s < plain.state_count(); ++s) {
    const auto& leaf = plain.state(s).leaf;
    if (!leaf) continue;
    if (!(leaf->hypothesis && leaf->evidence)) not_h_or_not_e.push_back(s);
    if (!leaf->evidence) not_e.push_back(s);
  }
  const double denominator = 1.0 - reach_prob(plain, u, not_e);
  if (!(denominator > 0.0)) throw Error(ErrorKind::EvidenceImpossible, "evidence has probability 0");
  return (1.0 - reach_prob(plain, u, not_h_or_not_e)) / denominator;
}

// ------------------------------------------------------------------ DOT

std::string to_dot(const PMC& pmc) {
  const auto names = pmc.param_names();
  std::ostringstream out;
  out << "digraph pmc {\n";
  for (StateId s = 0; s < pmc.state_count(); ++s) {
    out << "  s" << s << " [label=\"s" << s << "\\n" << pmc.state(s).label << "\"";
    if (pmc.state(s).leaf && pmc.state(s).leaf->hypothesis && pmc.state(s).leaf->evidence) out << ", peripheries=2";
    out << "];\n";
  }
  for (StateId s = 0; s < pmc.state_count(); ++s) {
    for (const auto& t : pmc.transitions(s)) {
      out << "  s" << s << " -> s" << t.target << " [label=\"" << t.probability.to_string(names) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace pbntune
