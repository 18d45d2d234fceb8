#include "pbntune/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbntune/error.hpp"

namespace pbntune::oracle {

namespace {

using Tables = std::vector<std::vector<std::vector<double>>>;  // var, row, value

void check_size(const Network& net) {
  if (net.joint_size() > kMaxJointStates) throw Error(ErrorKind::TooLarge, "joint distribution too large to enumerate");
}

std::size_t row_of(const Network& net, std::size_t v, const std::vector<std::size_t>& w) {
  std::size_t row = 0;
  for (std::size_t p : net.variable(v).parents) row = row * net.variable(p).values.size() + w[p];
  return row;
}

/// Calls f(w, Pr(w)) for every joint assignment w.
template <class F>
void for_each_world(const Network& net, const Tables& t, F&& f) {
  const std::size_t n = net.size();
  std::vector<std::size_t> w(n, 0);
  while (true) {
    double pr = 1.0;
    for (std::size_t v = 0; v < n && pr != 0.0; ++v) pr *= t[v][row_of(net, v, w)][w[v]];
    f(w, pr);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++w[i] < net.variable(i).values.size()) break;
      w[i] = 0;
    }
    if (i == n) return;
  }
}

bool satisfies(const std::vector<std::size_t>& w, const std::vector<Literal>& lits) {
  return std::all_of(lits.begin(), lits.end(), [&](const Literal& l) { return w[l.var] == l.value; });
}

Tables tables_of(const BayesNet& bn) {
  const Network& net = bn.network();
  Tables t(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) {
    t[v].resize(net.row_count(v));
    for (std::size_t r = 0; r < net.row_count(v); ++r) {
      for (std::size_t d = 0; d < net.variable(v).values.size(); ++d) t[v][r].push_back(bn.probability(v, r, d));
    }
  }
  return t;
}

Tables tables_at(const ParamBN& pbn, const std::vector<double>& u) {
  const Network& net = pbn.network();
  Tables t(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) {
    t[v].resize(net.row_count(v));
    for (std::size_t r = 0; r < net.row_count(v); ++r) {
      for (const auto& e : net.cpt(v).rows[r]) t[v][r].push_back(e.eval(u));
    }
  }
  return t;
}

/// Pr(H|E); NaN when Pr(E) = 0.
double conditional(const Network& net, const Tables& t, const Constraint& c) {
  double joint = 0.0;
  double evidence = 0.0;
  for_each_world(net, t, [&](const std::vector<std::size_t>& w, double pr) {
    if (!satisfies(w, c.evidence)) return;
    evidence += pr;
    if (satisfies(w, c.hypothesis)) joint += pr;
  });
  if (evidence <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return joint / evidence;
}

std::vector<double> joint_table(const Network& net, const Tables& t) {
  std::vector<double> out;
  out.reserve(net.joint_size());
  for_each_world(net, t, [&](const std::vector<std::size_t>&, double pr) { out.push_back(pr); });
  return out;
}

double cd_of(const std::vector<double>& p1, const std::vector<double>& p2) {
  double hi = 1.0;
  double lo = 1.0;
  bool any = false;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (p1[i] == 0.0 && p2[i] == 0.0) continue;
    if (p1[i] == 0.0 || p2[i] == 0.0) return std::numeric_limits<double>::infinity();
    const double r = p2[i] / p1[i];
    if (!any) {
      hi = lo = r;
      any = true;
    } else {
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
  }
  return std::log(hi) - std::log(lo);
}

}  // namespace

double infer(const BayesNet& bn, const Constraint& c) {
  const Network& net = bn.network();
  check_constraint(net, c);
  check_size(net);
  const double p = conditional(net, tables_of(bn), c);
  if (std::isnan(p)) throw Error(ErrorKind::EvidenceImpossible, "Pr(E) = 0");
  return p;
}

double cd_exact(const BayesNet& bn1, const BayesNet& bn2) {
  const Network& n1 = bn1.network();
  const Network& n2 = bn2.network();
  if (n1.size() != n2.size()) throw Error(ErrorKind::InvalidArgument, "networks differ in structure");
  for (std::size_t v = 0; v < n1.size(); ++v) {
    if (n1.variable(v).values.size() != n2.variable(v).values.size() ||
        n1.variable(v).parents != n2.variable(v).parents) {
      throw Error(ErrorKind::InvalidArgument, "networks differ in structure");
    }
  }
  check_size(n1);
  return cd_of(joint_table(n1, tables_of(bn1)), joint_table(n2, tables_of(bn2)));
}

GridResult grid_min_distance(const ParamBN& pbn, const Constraint& c, Measure m, double resolution) {
  const Network& net = pbn.network();
  check_constraint(net, c);
  check_size(net);
  const std::size_t n = pbn.param_count();
  if (n > 3) throw Error(ErrorKind::TooLarge, "grid oracle supports at most 3 parameters");
  if (!(resolution > 0.0 && resolution <= 0.5)) throw Error(ErrorKind::InvalidArgument, "resolution must lie in (0, 0.5]");

  const Region space = pbn.parameter_space();
  const std::vector<double> u0 = pbn.original_values();
  const auto steps = static_cast<long long>(std::llround(1.0 / resolution));
  std::vector<std::vector<double>> axis_points(n);
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (long long k = 0; k <= steps; ++k) {
      const double x = static_cast<double>(k) / static_cast<double>(steps);
      if (space[i].contains(x)) axis_points[i].push_back(x);
    }
    total *= static_cast<double>(axis_points[i].size());
  }
  if (total * static_cast<double>(net.joint_size()) > 4e10) throw Error(ErrorKind::TooLarge, "grid too fine");

  const std::vector<double> joint0 = m == Measure::CD ? joint_table(net, tables_at(pbn, u0)) : std::vector<double>{};
  GridResult best;
  auto consider = [&](const std::vector<double>& u) {
    const Tables t = tables_at(pbn, u);
    const double p = conditional(net, t, c);
    if (std::isnan(p) || !c.holds(p)) return;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += (u[i] - u0[i]) * (u[i] - u0[i]);
    double d = std::sqrt(sq);
    if (m == Measure::CD) {
      d = cd_of(joint0, joint_table(net, t));
      sq = d * d;
    }
    if (!best.found || d < best.distance) best = {true, u, d, sq};
  };

  consider(u0);
  if (best.found) return best;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> u(n);
  if (std::any_of(axis_points.begin(), axis_points.end(), [](const auto& a) { return a.empty(); })) return best;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) u[i] = axis_points[i][idx[i]];
    consider(u);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < axis_points[i].size()) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  return best;
}

}  // namespace pbntune::oracle
