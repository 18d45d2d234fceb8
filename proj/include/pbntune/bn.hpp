#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pbntune/poly.hpp"

namespace pbntune {

struct Variable {
  std::string name;
  std::vector<std::string> values;
  std::vector<std::size_t> parents;  // indices into the owning network
};

using CptRow = std::vector<Polynomial>;

/// Rows are indexed by the mixed-radix code of the parent evaluation, first
/// parent most significant.
struct Cpt {
  std::vector<CptRow> rows;
};

struct EntryCoord {
  std::size_t var = 0;
  std::size_t row = 0;
  std::size_t value = 0;
  friend auto operator<=>(const EntryCoord&, const EntryCoord&) = default;
};

/// DAG over discrete variables whose CPT entries are polynomials. Checks
/// structure only; probability semantics are enforced by BayesNet and
/// reported by validate() for parametric networks.
class Network {
 public:
  Network() = default;
  Network(std::vector<Variable> variables, std::vector<Cpt> cpts);

  std::size_t size() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(std::size_t v) const { return variables_[v]; }
  const Cpt& cpt(std::size_t v) const { return cpts_[v]; }
  const Polynomial& entry(const EntryCoord& c) const { return cpts_[c.var].rows[c.row][c.value]; }

  std::size_t index_of(const std::string& name) const;  // throws UnknownVariable
  std::size_t value_index(std::size_t var, const std::string& label) const;  // throws UnknownValue

  std::size_t row_count(std::size_t var) const { return cpts_[var].rows.size(); }
  std::size_t row_index(std::size_t var, std::span<const std::size_t> parent_values) const;
  std::vector<std::size_t> parent_values(std::size_t var, std::size_t row) const;
  std::string row_label(std::size_t var, std::size_t row) const;

  /// Input order filtered to a topological order (Kahn, lowest index first).
  std::vector<std::size_t> topological_order() const;
  bool is_topological(std::span<const std::size_t> order) const;

  /// Product of domain sizes, saturating at SIZE_MAX.
  std::size_t joint_size() const;

  Network with_cpts(std::vector<Cpt> cpts) const { return Network(variables_, std::move(cpts)); }

 private:
  std::vector<Variable> variables_;
  std::vector<Cpt> cpts_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Network with constant CPT entries forming probability distributions.
class BayesNet {
 public:
  BayesNet() = default;
  /// Row sums must equal 1 within `row_tolerance`.
  explicit BayesNet(Network net, double row_tolerance = 1e-9);

  const Network& network() const { return net_; }
  std::size_t size() const { return net_.size(); }
  double probability(std::size_t var, std::size_t row, std::size_t value) const {
    return probs_[var][row][value];
  }
  const mpq_class& exact(std::size_t var, std::size_t row, std::size_t value) const {
    return exact_[var][row][value];
  }

 private:
  Network net_;
  std::vector<std::vector<std::vector<mpq_class>>> exact_;
  std::vector<std::vector<std::vector<double>>> probs_;
};

constexpr double kDefaultDelta = 1e-6;

struct Parameter {
  std::string name;
  Interval range{kDefaultDelta, 1.0 - kDefaultDelta};
  std::optional<mpq_class> original;  // u0, when derived from a BN
};

/// Bayesian network with multi-affine polynomial CPT entries.
class ParamBN {
 public:
  ParamBN() = default;
  ParamBN(Network net, std::vector<Parameter> params, std::vector<EntryCoord> modif = {});

  const Network& network() const { return net_; }
  const std::vector<Parameter>& params() const { return params_; }
  const std::vector<EntryCoord>& modif() const { return modif_; }
  std::size_t param_count() const { return params_.size(); }
  std::vector<std::string> param_names() const;
  ParamId param_id(const std::string& name) const;  // throws UnboundParameter

  /// Declared intervals as a region.
  Region parameter_space() const;
  /// u0 as doubles; throws InvalidArgument if some parameter lacks one.
  std::vector<double> original_values() const;

  /// Variables whose CPT mentions parameter `id`.
  std::vector<std::size_t> owners(ParamId id) const;

 private:
  Network net_;
  std::vector<Parameter> params_;
  std::vector<EntryCoord> modif_;
};

/// Names one explicitly modified CPT entry. Entries given the same name
/// share a single parameter.
struct ParamSpec {
  EntryCoord entry;
  std::string name;
  std::optional<Interval> range;
};

/// Linear proportional co-variation: the modified entry becomes x and every
/// other entry theta_j of the row becomes theta_j * (1 - x) / (1 - theta_k).
ParamBN parametrize(const BayesNet& bn, std::span<const ParamSpec> modif, double delta = kDefaultDelta);

/// Evaluates every entry at u. Values equal to a parameter's recorded
/// original are substituted exactly, so instantiating at u0 reproduces the
/// source network bit for bit.
BayesNet instantiate(const ParamBN& pbn, std::span<const double> u);

struct Diagnostic {
  enum class Kind { EntryOutOfRange, RowSumNotOne };
  Kind kind;
  EntryCoord where;  // value index is meaningless for RowSumNotOne
  std::string message;
};

/// Empty result means every row is a distribution everywhere on `region`.
std::vector<Diagnostic> validate(const ParamBN& pbn, const Region& region);

// ------------------------------------------------------------ constraints

struct Literal {
  std::size_t var = 0;
  std::size_t value = 0;
  friend bool operator==(const Literal&, const Literal&) = default;
};

enum class Direction { LessEq, GreaterEq };

/// Distance between instantiations: Euclidean or Chan-Darwiche.
enum class Measure { EC, CD };

/// Pr(hypothesis | evidence) ~ threshold.
struct Constraint {
  std::vector<Literal> hypothesis;
  std::vector<Literal> evidence;
  Direction direction = Direction::LessEq;
  double threshold = 0.0;

  bool holds(double probability) const {
    return direction == Direction::LessEq ? probability <= threshold : probability >= threshold;
  }
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Literals reference existing variables/values; hypothesis and evidence
/// variable sets are disjoint; threshold in [0,1].
void check_constraint(const Network& net, const Constraint& c);

std::string to_string(const Constraint& c, const Network& net);

}  // namespace pbntune
