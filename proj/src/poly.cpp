#include "pbntune/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "pbntune/error.hpp"

namespace pbntune {

// ---------------------------------------------------------------- Region

Region::Region(std::vector<Interval> axes) : axes_(std::move(axes)) {
  for (const auto& a : axes_) {
    if (!(a.lo <= a.hi)) throw Error(ErrorKind::BadRegion, "interval with lb > ub");
  }
}

bool Region::contains(std::span<const double> u) const {
  if (u.size() < axes_.size()) return false;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (!axes_[i].contains(u[i])) return false;
  }
  return true;
}

bool Region::within(const Region& outer, double tol) const {
  if (outer.dimension() != dimension()) return false;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].lo < outer[i].lo - tol || axes_[i].hi > outer[i].hi + tol) return false;
  }
  return true;
}

std::vector<double> Region::center() const {
  std::vector<double> c;
  c.reserve(axes_.size());
  for (const auto& a : axes_) c.push_back(0.5 * (a.lo + a.hi));
  return c;
}

double Region::normalized_volume(const Region& reference) const {
  double v = 1.0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const double w = reference[i].width();
    if (w <= 0.0) continue;
    v *= axes_[i].width() / w;
  }
  return v;
}

std::pair<Region, Region> Region::bisect(std::size_t axis) const {
  Region left = *this;
  Region right = *this;
  const double mid = 0.5 * (axes_[axis].lo + axes_[axis].hi);
  left.axes_[axis].hi = mid;
  right.axes_[axis].lo = mid;
  return {std::move(left), std::move(right)};
}

bool operator<(const Region& a, const Region& b) {
  return std::lexicographical_compare(
      a.axes_.begin(), a.axes_.end(), b.axes_.begin(), b.axes_.end(),
      [](const Interval& x, const Interval& y) {
        return std::pair(x.lo, x.hi) < std::pair(y.lo, y.hi);
      });
}

// ------------------------------------------------------------ Polynomial

namespace {

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      out.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  return out;
}

unsigned degree(const Monomial& m) {
  unsigned d = 0;
  for (const auto& [id, e] : m) d += e;
  return d;
}

std::string coefficient_string(const mpq_class& c) {
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_str();
}

}  // namespace

Polynomial::Polynomial(int c) : Polynomial(mpq_class(c)) {}

Polynomial::Polynomial(const mpq_class& c) {
  if (c != 0) {
    mpq_class v = c;
    v.canonicalize();
    terms_.emplace(Monomial{}, std::move(v));
  }
  refresh_cache();
}

Polynomial Polynomial::variable(ParamId id) {
  Polynomial p;
  p.terms_.emplace(Monomial{{id, 1}}, mpq_class(1));
  p.refresh_cache();
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

mpq_class Polynomial::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? mpq_class(0) : it->second;
}

bool Polynomial::is_multi_affine() const {
  for (const auto& [m, c] : terms_) {
    for (const auto& [id, e] : m) {
      if (e > 1) return false;
    }
  }
  return true;
}

std::vector<ParamId> Polynomial::params() const {
  std::vector<ParamId> ids;
  for (const auto& [m, c] : terms_) {
    for (const auto& [id, e] : m) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

double Polynomial::eval(std::span<const double> u) const {
  double sum = 0.0;
  for (const auto& [m, c] : approx_) {
    double t = c;
    for (const auto& [id, e] : m) {
      if (id >= u.size() || std::isnan(u[id])) {
        throw Error(ErrorKind::UnboundParameter, "parameter #" + std::to_string(id) + " has no value");
      }
      for (unsigned k = 0; k < e; ++k) t *= u[id];
    }
    sum += t;
  }
  return sum;
}

mpq_class Polynomial::eval_exact(std::span<const mpq_class> u) const {
  mpq_class sum = 0;
  for (const auto& [m, c] : terms_) {
    mpq_class t = c;
    for (const auto& [id, e] : m) {
      if (id >= u.size()) {
        throw Error(ErrorKind::UnboundParameter, "parameter #" + std::to_string(id) + " has no value");
      }
      for (unsigned k = 0; k < e; ++k) t *= u[id];
    }
    sum += t;
  }
  return sum;
}

Interval Polynomial::bounds(const Region& box) const {
  if (!is_multi_affine()) {
    throw Error(ErrorKind::UnsupportedDegree, "vertex bounds need a multi-affine polynomial");
  }
  const auto ids = params();
  if (ids.size() > 24) throw Error(ErrorKind::TooLarge, "too many parameters for vertex enumeration");
  for (ParamId id : ids) {
    if (id >= box.dimension()) {
      throw Error(ErrorKind::UnboundParameter, "region does not cover parameter #" + std::to_string(id));
    }
  }
  std::vector<double> u = box.center();
  Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  const std::size_t n_vertices = std::size_t{1} << ids.size();
  for (std::size_t v = 0; v < n_vertices; ++v) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const auto& axis = box[ids[k]];
      u[ids[k]] = (v >> k) & 1U ? axis.hi : axis.lo;
    }
    const double val = eval(u);
    out.lo = std::min(out.lo, val);
    out.hi = std::max(out.hi, val);
  }
  return out;
}

Polynomial Polynomial::rename(std::span<const ParamId> mapping) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    Monomial renamed;
    renamed.reserve(m.size());
    for (const auto& [id, e] : m) renamed.emplace_back(mapping[id], e);
    std::sort(renamed.begin(), renamed.end());
    // merge ids mapped onto the same target
    Monomial merged;
    for (const auto& t : renamed) {
      if (!merged.empty() && merged.back().first == t.first) {
        merged.back().second += t.second;
      } else {
        merged.push_back(t);
      }
    }
    out.add_term(merged, c);
  }
  out.refresh_cache();
  return out;
}

std::string Polynomial::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<Monomial, mpq_class>> ordered(terms_.begin(), terms_.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return degree(a.first) > degree(b.first);
  });
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : ordered) {
    mpq_class mag = abs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool need_star = false;
    if (m.empty() || mag != 1) {
      out << coefficient_string(mag);
      need_star = true;
    }
    for (const auto& [id, e] : m) {
      for (unsigned k = 0; k < e; ++k) {
        if (need_star) out << "*";
        out << (id < names.size() ? names[id] : "x" + std::to_string(id));
        need_star = true;
      }
    }
  }
  return out.str();
}

void Polynomial::add_term(const Monomial& m, const mpq_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::refresh_cache() {
  approx_.clear();
  approx_.reserve(terms_.size());
  for (const auto& [m, c] : terms_) approx_.emplace_back(m, to_double(c));
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  refresh_cache();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  refresh_cache();
  return *this;
}

Polynomial& Polynomial::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& [m, coeff] : terms_) coeff *= c;
  }
  refresh_cache();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
  }
  out.refresh_cache();
  return out;
}

// ------------------------------------------------------ RationalFunction

double RationalFunction::eval(std::span<const double> u) const {
  return numerator.eval(u) / denominator.eval(u);
}

void RationalFunction::normalize() {
  if (denominator.is_zero()) return;
  mpz_class lcm_den = 1;
  for (const auto* p : {&numerator, &denominator}) {
    for (const auto& [m, c] : p->terms()) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
  }
  mpz_class gcd_num = 0;
  for (const auto* p : {&numerator, &denominator}) {
    for (const auto& [m, c] : p->terms()) {
      mpz_class scaled = c.get_num() * (lcm_den / c.get_den());
      mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), scaled.get_mpz_t());
    }
  }
  mpq_class factor(lcm_den, gcd_num);
  factor.canonicalize();
  // keep the constant (or any) term of the denominator positive
  if (!denominator.terms().empty() && denominator.terms().begin()->second < 0) factor = -factor;
  numerator *= factor;
  denominator *= factor;
}

std::string RationalFunction::to_string(std::span<const std::string> names) const {
  return "(" + numerator.to_string(names) + ") / (" + denominator.to_string(names) + ")";
}

// ------------------------------------------------------------- decimals

mpq_class parse_decimal(const std::string& text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  bool negative = false;
  if (i < n && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  std::string digits;
  long exponent = 0;
  bool any_digit = false;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits += text[i++];
    any_digit = true;
  }
  if (i < n && text[i] == '.') {
    ++i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits += text[i++];
      --exponent;
      any_digit = true;
    }
  }
  if (!any_digit) throw Error(ErrorKind::Parse, "malformed number '" + text + "'");
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(text.substr(i), &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "malformed exponent in '" + text + "'");
    }
    if (used == 0 || e > 400 || e < -400) throw Error(ErrorKind::Parse, "malformed exponent in '" + text + "'");
    exponent += e;
    i += used;
  }
  if (i != n) throw Error(ErrorKind::Parse, "malformed number '" + text + "'");
  mpz_class mantissa(digits.empty() ? "0" : digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  mpq_class value = exponent < 0 ? mpq_class(mantissa, scale) : mpq_class(mantissa * scale);
  value.canonicalize();
  return negative ? mpq_class(-value) : value;
}

double to_double(const mpq_class& q) {
  const double d = q.get_d();
  if (!std::isfinite(d)) return d;
  double best = d;
  mpq_class best_err = abs(mpq_class(d) - q);
  for (double n : {std::nextafter(d, -HUGE_VAL), std::nextafter(d, HUGE_VAL)}) {
    if (!std::isfinite(n)) continue;
    mpq_class err = abs(mpq_class(n) - q);
    if (err < best_err) {
      best_err = err;
      best = n;
    }
  }
  return best;
}

}  // namespace pbntune
