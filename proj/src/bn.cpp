#include "pbntune/bn.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "pbntune/error.hpp"

namespace pbntune {

// --------------------------------------------------------------- Network

Network::Network(std::vector<Variable> variables, std::vector<Cpt> cpts)
    : variables_(std::move(variables)), cpts_(std::move(cpts)) {
  if (cpts_.size() != variables_.size()) {
    throw Error(ErrorKind::InvalidArgument, "one CPT per variable required");
  }
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    const auto& var = variables_[v];
    if (var.values.size() < 2) throw Error(ErrorKind::InvalidArgument, var.name + ": domain needs at least two values");
    std::set<std::string> labels(var.values.begin(), var.values.end());
    if (labels.size() != var.values.size()) throw Error(ErrorKind::InvalidArgument, var.name + ": duplicate value label");
    if (!index_.emplace(var.name, v).second) throw Error(ErrorKind::InvalidArgument, "duplicate variable " + var.name);
    std::set<std::size_t> seen;
    for (std::size_t p : var.parents) {
      if (p >= variables_.size()) throw Error(ErrorKind::UnknownVariable, var.name + ": parent index out of range");
      if (p == v || !seen.insert(p).second) throw Error(ErrorKind::InvalidArgument, var.name + ": duplicate or self parent");
    }
  }
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    std::size_t expected_rows = 1;
    for (std::size_t p : variables_[v].parents) expected_rows *= variables_[p].values.size();
    if (cpts_[v].rows.size() != expected_rows) {
      throw Error(ErrorKind::InvalidArgument, variables_[v].name + ": expected " + std::to_string(expected_rows) + " CPT rows");
    }
    for (const auto& row : cpts_[v].rows) {
      if (row.size() != variables_[v].values.size()) {
        throw Error(ErrorKind::InvalidArgument, variables_[v].name + ": CPT row length differs from domain size");
      }
    }
  }
  if (topological_order().size() != variables_.size()) {
    throw Error(ErrorKind::InvalidArgument, "network graph has a cycle");
  }
}

std::size_t Network::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorKind::UnknownVariable, "unknown variable '" + name + "'");
  return it->second;
}

std::size_t Network::value_index(std::size_t var, const std::string& label) const {
  const auto& values = variables_.at(var).values;
  auto it = std::find(values.begin(), values.end(), label);
  if (it == values.end()) {
    throw Error(ErrorKind::UnknownValue, "variable '" + variables_[var].name + "' has no value '" + label + "'");
  }
  return static_cast<std::size_t>(it - values.begin());
}

std::size_t Network::row_index(std::size_t var, std::span<const std::size_t> parent_values) const {
  const auto& parents = variables_[var].parents;
  if (parent_values.size() != parents.size()) throw Error(ErrorKind::InvalidArgument, "parent evaluation arity mismatch");
  std::size_t row = 0;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const std::size_t radix = variables_[parents[i]].values.size();
    if (parent_values[i] >= radix) throw Error(ErrorKind::UnknownValue, "parent value out of range");
    row = row * radix + parent_values[i];
  }
  return row;
}

std::vector<std::size_t> Network::parent_values(std::size_t var, std::size_t row) const {
  const auto& parents = variables_[var].parents;
  std::vector<std::size_t> out(parents.size());
  for (std::size_t i = parents.size(); i-- > 0;) {
    const std::size_t radix = variables_[parents[i]].values.size();
    out[i] = row % radix;
    row /= radix;
  }
  return out;
}

std::string Network::row_label(std::size_t var, std::size_t row) const {
  const auto vals = parent_values(var, row);
  std::string out = "(";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ", ";
    out += variables_[variables_[var].parents[i]].values[vals[i]];
  }
  return out + ")";
}

std::vector<std::size_t> Network::topological_order() const {
  const std::size_t n = variables_.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t v = 0; v < n; ++v) {
    indegree[v] = variables_[v].parents.size();
    for (std::size_t p : variables_[v].parents) children[p].push_back(v);
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t c : children[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  return order;
}

bool Network::is_topological(std::span<const std::size_t> order) const {
  if (order.size() != variables_.size()) return false;
  std::vector<std::size_t> position(variables_.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] >= variables_.size() || position[order[i]] != std::numeric_limits<std::size_t>::max()) return false;
    position[order[i]] = i;
  }
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    for (std::size_t p : variables_[v].parents) {
      if (position[p] > position[v]) return false;
    }
  }
  return true;
}

std::size_t Network::joint_size() const {
  std::size_t total = 1;
  for (const auto& v : variables_) {
    if (total > std::numeric_limits<std::size_t>::max() / v.values.size()) return std::numeric_limits<std::size_t>::max();
    total *= v.values.size();
  }
  return total;
}

// -------------------------------------------------------------- BayesNet

BayesNet::BayesNet(Network net, double row_tolerance) : net_(std::move(net)) {
  exact_.resize(net_.size());
  probs_.resize(net_.size());
  for (std::size_t v = 0; v < net_.size(); ++v) {
    const auto& rows = net_.cpt(v).rows;
    exact_[v].resize(rows.size());
    probs_[v].resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double sum = 0.0;
      for (const auto& e : rows[r]) {
        if (!e.is_constant()) {
          throw Error(ErrorKind::InvalidArgument, net_.variable(v).name + ": BN entries must be constant");
        }
        mpq_class c = e.constant_value();
        if (c < 0 || c > 1) {
          throw Error(ErrorKind::NotWellFormed, net_.variable(v).name + " row " + net_.row_label(v, r) + ": entry outside [0,1]");
        }
        sum += to_double(c);
        probs_[v][r].push_back(to_double(c));
        exact_[v][r].push_back(std::move(c));
      }
      if (std::abs(sum - 1.0) > row_tolerance) {
        throw Error(ErrorKind::RowSum, net_.variable(v).name + " row " + net_.row_label(v, r) + " sums to " + std::to_string(sum));
      }
    }
  }
}

// --------------------------------------------------------------- ParamBN

ParamBN::ParamBN(Network net, std::vector<Parameter> params, std::vector<EntryCoord> modif)
    : net_(std::move(net)), params_(std::move(params)), modif_(std::move(modif)) {
  std::set<std::string> names;
  for (const auto& p : params_) {
    if (!names.insert(p.name).second) throw Error(ErrorKind::InvalidArgument, "duplicate parameter " + p.name);
    if (!(p.range.lo <= p.range.hi) || p.range.lo <= 0.0 || p.range.hi >= 1.0) {
      throw Error(ErrorKind::BadRegion, "parameter " + p.name + ": interval must lie within (0,1)");
    }
  }
  for (std::size_t v = 0; v < net_.size(); ++v) {
    for (const auto& row : net_.cpt(v).rows) {
      for (const auto& e : row) {
        if (!e.is_multi_affine()) {
          throw Error(ErrorKind::UnsupportedDegree, net_.variable(v).name + ": CPT entries must be multi-affine");
        }
        for (ParamId id : e.params()) {
          if (id >= params_.size()) throw Error(ErrorKind::UnboundParameter, net_.variable(v).name + ": undeclared parameter");
        }
      }
    }
  }
}

std::vector<std::string> ParamBN::param_names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.name);
  return out;
}

ParamId ParamBN::param_id(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return static_cast<ParamId>(i);
  }
  throw Error(ErrorKind::UnboundParameter, "unknown parameter '" + name + "'");
}

Region ParamBN::parameter_space() const {
  std::vector<Interval> axes;
  axes.reserve(params_.size());
  for (const auto& p : params_) axes.push_back(p.range);
  return Region(std::move(axes));
}

std::vector<double> ParamBN::original_values() const {
  std::vector<double> u;
  u.reserve(params_.size());
  for (const auto& p : params_) {
    if (!p.original) throw Error(ErrorKind::InvalidArgument, "parameter " + p.name + " has no original value");
    u.push_back(to_double(*p.original));
  }
  return u;
}

std::vector<std::size_t> ParamBN::owners(ParamId id) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < net_.size(); ++v) {
    bool found = false;
    for (const auto& row : net_.cpt(v).rows) {
      for (const auto& e : row) {
        const auto ids = e.params();
        if (std::binary_search(ids.begin(), ids.end(), id)) found = true;
      }
    }
    if (found) out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------- parametrize

ParamBN parametrize(const BayesNet& bn, std::span<const ParamSpec> modif, double delta) {
  const Network& net = bn.network();
  std::vector<Parameter> params;
  std::map<std::string, ParamId> ids;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, ParamId>> pivots;  // row -> (value, id)
  std::vector<EntryCoord> coords;

  for (const auto& spec : modif) {
    const auto& c = spec.entry;
    if (c.var >= net.size() || c.row >= net.row_count(c.var) || c.value >= net.variable(c.var).values.size()) {
      throw Error(ErrorKind::InvalidArgument, "entry coordinate out of range");
    }
    const mpq_class& theta = bn.exact(c.var, c.row, c.value);
    if (theta == 0 || theta == 1) {
      throw Error(ErrorKind::ZeroEntry, net.variable(c.var).name + " row " + net.row_label(c.var, c.row) +
                                            ": entries with probability 0 or 1 cannot be modified");
    }
    auto [it, fresh] = ids.emplace(spec.name, static_cast<ParamId>(params.size()));
    if (fresh) {
      Parameter p;
      p.name = spec.name;
      p.range = spec.range.value_or(Interval{delta, 1.0 - delta});
      p.original = theta;
      params.push_back(std::move(p));
    } else if (*params[it->second].original != theta) {
      throw Error(ErrorKind::InvalidArgument, "parameter " + spec.name + " shared by entries with different original values");
    } else if (spec.range && !(params[it->second].range == *spec.range)) {
      throw Error(ErrorKind::InvalidArgument, "parameter " + spec.name + " given conflicting intervals");
    }
    if (!pivots.emplace(std::pair(c.var, c.row), std::pair(c.value, it->second)).second) {
      throw Error(ErrorKind::UnsupportedMultiEntryRow,
                  net.variable(c.var).name + " row " + net.row_label(c.var, c.row) + ": only one modified entry per row");
    }
    coords.push_back(c);
  }

  std::vector<Cpt> cpts;
  cpts.reserve(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) cpts.push_back(net.cpt(v));
  for (const auto& [row_key, pivot] : pivots) {
    const auto [var, row] = row_key;
    const auto [k, id] = pivot;
    const mpq_class& theta_k = bn.exact(var, row, k);
    CptRow& target = cpts[var].rows[row];
    const Polynomial x = Polynomial::variable(id);
    const Polynomial one_minus_x = Polynomial(1) - x;
    for (std::size_t j = 0; j < target.size(); ++j) {
      if (j == k) {
        target[j] = x;
      } else {
        const mpq_class scale = bn.exact(var, row, j) / (1 - theta_k);
        target[j] = one_minus_x * scale;
      }
    }
  }
  std::sort(coords.begin(), coords.end());
  return ParamBN(net.with_cpts(std::move(cpts)), std::move(params), std::move(coords));
}

// ---------------------------------------------------------- instantiate

BayesNet instantiate(const ParamBN& pbn, std::span<const double> u) {
  if (u.size() != pbn.param_count()) {
    throw Error(ErrorKind::UnboundParameter, "instantiation does not cover the parameter set");
  }
  std::vector<mpq_class> exact_u;
  exact_u.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i])) throw Error(ErrorKind::UnboundParameter, "non-finite value for " + pbn.params()[i].name);
    const auto& orig = pbn.params()[i].original;
    exact_u.push_back(orig && to_double(*orig) == u[i] ? *orig : mpq_class(u[i]));
  }
  const Network& net = pbn.network();
  std::vector<Cpt> cpts(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) {
    for (std::size_t r = 0; r < net.row_count(v); ++r) {
      CptRow row;
      for (const auto& e : net.cpt(v).rows[r]) {
        mpq_class val = e.eval_exact(exact_u);
        if (val < 0 || val > 1) {
          throw Error(ErrorKind::NotWellFormed, net.variable(v).name + " row " + net.row_label(v, r) +
                                                    ": entry evaluates to " + std::to_string(val.get_d()));
        }
        row.emplace_back(val);
      }
      cpts[v].rows.push_back(std::move(row));
    }
  }
  return BayesNet(net.with_cpts(std::move(cpts)), 1e-12);
}

// ------------------------------------------------------------- validate

std::vector<Diagnostic> validate(const ParamBN& pbn, const Region& region) {
  std::vector<Diagnostic> out;
  const Network& net = pbn.network();
  constexpr double tol = 1e-12;
  for (std::size_t v = 0; v < net.size(); ++v) {
    for (std::size_t r = 0; r < net.row_count(v); ++r) {
      const auto& row = net.cpt(v).rows[r];
      Polynomial sum;
      for (std::size_t d = 0; d < row.size(); ++d) {
        sum += row[d];
        const Interval b = row[d].bounds(region);
        if (b.lo < -tol || b.hi > 1.0 + tol) {
          std::ostringstream msg;
          msg << net.variable(v).name << " row " << net.row_label(v, r) << " value " << net.variable(v).values[d]
              << " ranges over [" << b.lo << ", " << b.hi << "]";
          out.push_back({Diagnostic::Kind::EntryOutOfRange, {v, r, d}, msg.str()});
        }
      }
      if (!(sum == Polynomial(1))) {
        out.push_back({Diagnostic::Kind::RowSumNotOne,
                       {v, r, 0},
                       net.variable(v).name + " row " + net.row_label(v, r) + " sums to " + sum.to_string(pbn.param_names())});
      }
    }
  }
  return out;
}

// ----------------------------------------------------------- constraints

void check_constraint(const Network& net, const Constraint& c) {
  auto check = [&](const Literal& l) {
    if (l.var >= net.size()) throw Error(ErrorKind::UnknownVariable, "literal references unknown variable");
    if (l.value >= net.variable(l.var).values.size()) throw Error(ErrorKind::UnknownValue, "literal references unknown value");
  };
  for (const auto& l : c.hypothesis) check(l);
  for (const auto& l : c.evidence) check(l);
  if (c.hypothesis.empty()) throw Error(ErrorKind::InvalidArgument, "constraint needs a hypothesis");
  for (const auto& h : c.hypothesis) {
    for (const auto& e : c.evidence) {
      if (h.var == e.var) {
        throw Error(ErrorKind::InvalidArgument, "variable " + net.variable(h.var).name + " occurs in hypothesis and evidence");
      }
    }
  }
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw Error(ErrorKind::InvalidArgument, "threshold must lie in [0,1]");
}

std::string to_string(const Constraint& c, const Network& net) {
  auto lits = [&](const std::vector<Literal>& ls) {
    std::string s;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (i) s += " & ";
      s += net.variable(ls[i].var).name + "=" + net.variable(ls[i].var).values[ls[i].value];
    }
    return s;
  };
  std::array<char, 32> buf{};
  const auto end = std::to_chars(buf.data(), buf.data() + buf.size(), c.threshold).ptr;
  std::ostringstream out;
  out << "P(" << lits(c.hypothesis);
  if (!c.evidence.empty()) out << " | " << lits(c.evidence);
  out << ") " << (c.direction == Direction::LessEq ? "<=" : ">=") << " " << std::string(buf.data(), end);
  return out.str();
}

}  // namespace pbntune
