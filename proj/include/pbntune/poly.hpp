#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pbntune {

using ParamId = std::uint32_t;

/// Sorted (parameter, exponent) pairs; exponents are always positive.
using Monomial = std::vector<std::pair<ParamId, unsigned>>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned box over parameter space. Axis i belongs to parameter id i
/// of the owning model.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Interval> axes);

  std::size_t dimension() const { return axes_.size(); }
  const Interval& operator[](std::size_t i) const { return axes_[i]; }
  const std::vector<Interval>& axes() const { return axes_; }

  bool contains(std::span<const double> u) const;
  bool within(const Region& outer, double tol = 0.0) const;
  std::vector<double> center() const;

  /// Volume in coordinates normalized to `reference`; axes that are
  /// degenerate in `reference` are skipped.
  double normalized_volume(const Region& reference) const;

  /// Bisects axis `axis` at its midpoint.
  std::pair<Region, Region> bisect(std::size_t axis) const;

  friend bool operator==(const Region&, const Region&) = default;
  friend bool operator<(const Region& a, const Region& b);

 private:
  std::vector<Interval> axes_;
};

/// Multivariate polynomial with exact rational coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int c);  // NOLINT: implicit so literals read naturally
  explicit Polynomial(const mpq_class& c);

  static Polynomial constant(const mpq_class& c) { return Polynomial(c); }
  static Polynomial variable(ParamId id);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  mpq_class constant_value() const;  // coefficient of the empty monomial
  bool is_multi_affine() const;
  std::vector<ParamId> params() const;
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Monomial, mpq_class>& terms() const { return terms_; }

  /// Substitutes u[id] for every parameter. Throws UnboundParameter when an
  /// occurring id is outside `u` or mapped to NaN.
  double eval(std::span<const double> u) const;
  mpq_class eval_exact(std::span<const mpq_class> u) const;

  /// Min/max over `box`; multi-affine polynomials attain both at vertices.
  Interval bounds(const Region& box) const;

  Polynomial rename(std::span<const ParamId> mapping) const;

  /// "34900*p*q + 8758*q + 361"
  std::string to_string(std::span<const std::string> names) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const mpq_class& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const mpq_class& c) { return a *= c; }
  friend Polynomial operator*(const mpq_class& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

 private:
  void add_term(const Monomial& m, const mpq_class& c);
  void refresh_cache();

  std::map<Monomial, mpq_class> terms_;
  // double-precision copy of terms_ for fast evaluation
  std::vector<std::pair<Monomial, double>> approx_;
};

/// Numerator/denominator pair produced by state elimination.
struct RationalFunction {
  Polynomial numerator;
  Polynomial denominator;

  double eval(std::span<const double> u) const;
  /// Scales numerator and denominator by a common rational so that all
  /// coefficients are coprime integers.
  void normalize();
  std::string to_string(std::span<const std::string> names) const;
};

/// Nearest double to q (mpq_get_d truncates instead).
double to_double(const mpq_class& q);

/// Parses a decimal literal ("0.72", "1e-3", "-2") into an exact rational.
mpq_class parse_decimal(const std::string& text);

}  // namespace pbntune
