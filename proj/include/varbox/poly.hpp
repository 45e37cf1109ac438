#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace varbox {

/// Exponent vector of a monomial, one entry per variable.
using ExponentVector = std::vector<unsigned>;

unsigned total_degree(const ExponentVector& e);

/// Graded-lex order: lower total degree first, then descending lexicographic
/// on the exponents, so that for (x, y) the order is 1, x, y, x^2, xy, y^2.
struct GradedLexLess {
  bool operator()(const ExponentVector& a, const ExponentVector& b) const;
};

/// Sparse multivariate polynomial with double coefficients.
///
/// Values are immutable; every operation returns a new polynomial. No stored
/// coefficient is exactly zero and every key has length dimension().
class Polynomial {
 public:
  using TermMap = std::map<ExponentVector, double, GradedLexLess>;

  explicit Polynomial(std::size_t n = 0) : n_(n) {}
  Polynomial(std::size_t n, TermMap terms);

  static Polynomial constant(std::size_t n, double c);
  /// The coordinate function x_i (0-based).
  static Polynomial variable(std::size_t n, std::size_t i);
  static Polynomial monomial(const ExponentVector& e, double c = 1.0);

  std::size_t dimension() const { return n_; }
  unsigned degree() const;
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  double coefficient(const ExponentVector& e) const;
  double max_abs_coefficient() const;

  /// Monomial sum in graded-lex order; deterministic for a given polynomial.
  double evaluate(std::span<const double> x) const;

  Polynomial partial_derivative(std::size_t i) const;
  Polynomial pow(unsigned k) const;
  Polynomial scaled(double c) const;

  /// Fix x_var = value and drop that variable: result has dimension n-1.
  Polynomial restrict(std::size_t var, double value) const;
  /// p(center + half .* t) as a polynomial in t.
  Polynomial affine_substitute(std::span<const double> center,
                               std::span<const double> half) const;
  /// Lift to a larger space by inserting `count` unused variables before index `at`.
  Polynomial embed(std::size_t at, std::size_t count) const;

  std::string to_string(const std::vector<std::string>& vars = {}) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double c, const Polynomial& p) { return p.scaled(c); }
  friend Polynomial operator-(const Polynomial& p) { return p.scaled(-1.0); }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  std::size_t n_;
  TermMap terms_;
};

/// All exponent vectors of total degree <= d in graded-lex order.
/// Size is C(n+d, d); entry 0 is the zero vector.
std::vector<ExponentVector> monomial_basis(std::size_t n, unsigned d);

/// Sum of squares f_1^2 + ... + f_k^2.
Polynomial sum_of_squares_combine(const std::vector<Polynomial>& fs);

/// Parse an expression over the named variables into an expanded polynomial.
///
/// Grammar (whitespace ignored):
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := ('-'|'+')? base ('^' uint)?
///   base   := number | var | '(' expr ')'
/// Throws ParseError carrying the 0-based character offset.
Polynomial parse_expression(const std::string& text,
                            const std::vector<std::string>& vars);

}  // namespace varbox
