#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "arcert/interval.hpp"

namespace arcert {

/// Polynomial in the state variables x1..xn and the family parameter lambda,
/// with interval coefficients. Stored expanded in a canonical monomial map so
/// that structural equality is semantic equality.
class Polynomial {
 public:
  static constexpr std::size_t kMaxStateDim = 8;
  static constexpr unsigned kMaxDegree = 16;

  /// exponents[0..n-1] for x1..xn, exponents[n] for lambda.
  using Exponents = std::vector<std::uint8_t>;

  explicit Polynomial(std::size_t state_dim = 1);

  static Polynomial constant(std::size_t state_dim, Interval c);
  static Polynomial variable(std::size_t state_dim, std::size_t index);
  static Polynomial lambda(std::size_t state_dim);

  std::size_t state_dim() const { return n_; }
  const std::map<Exponents, Interval>& terms() const { return terms_; }

  unsigned degree() const;
  bool is_affine_in_state() const;
  bool depends_on_lambda() const;
  /// True when some coefficient is a genuine (non-degenerate) interval.
  bool has_interval_coefficients() const;

  /// Coefficients of x1..xn and the constant term of an affine, lambda-free
  /// polynomial with point coefficients.
  bool affine_coefficients(std::vector<double>& linear, double& constant) const;

  Interval evaluate(const IntervalVector& x, const Interval& lambda) const;
  double evaluate_point(const std::vector<double>& x, double lambda) const;

  Polynomial pow(unsigned k) const;
  /// Partial derivative with respect to x_{index+1}.
  Polynomial derivative(std::size_t index) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a);
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  /// Canonical text accepted back by parse_polynomial; coefficients are
  /// printed with round-trip precision.
  std::string to_string() const;

 private:
  void add_term(const Exponents& e, const Interval& c);
  void rebuild_flat();

  std::size_t n_;
  std::map<Exponents, Interval> terms_;
  // Flat copy of terms_ for evaluation: coefficients and (n+1) exponents per term.
  std::vector<Interval> flat_coef_;
  std::vector<std::uint8_t> flat_exp_;
  std::vector<unsigned> var_degree_;
  std::vector<std::size_t> power_offset_;  // start of each variable's powers in the scratch table
  std::size_t power_count_ = 0;
};

/// Parses +, -, *, ^ (non-negative integer exponent), parentheses, numbers,
/// interval constants "[lo, hi]", variables x1..xn (x, y, z alias x1..x3) and
/// "lambda". Errors carry the 1-based column within `text`.
Polynomial parse_polynomial(std::string_view text, std::size_t state_dim);

/// Round-trip formatting of a double.
std::string format_double(double v);

}  // namespace arcert
