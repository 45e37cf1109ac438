#include "varbox/poly.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "varbox/error.hpp"

namespace varbox {

unsigned total_degree(const ExponentVector& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

bool GradedLexLess::operator()(const ExponentVector& a,
                               const ExponentVector& b) const {
  const unsigned da = total_degree(a);
  const unsigned db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

namespace {

void add_term(Polynomial::TermMap& terms, const ExponentVector& e, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms.erase(it);
  }
}

void require_same_dimension(const Polynomial& a, const Polynomial& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionError("polynomial dimension mismatch: " +
                         std::to_string(a.dimension()) + " vs " +
                         std::to_string(b.dimension()));
  }
}

}  // namespace

Polynomial::Polynomial(std::size_t n, TermMap terms) : n_(n) {
  for (auto& [e, c] : terms) {
    if (e.size() != n) throw DimensionError("exponent vector length differs from dimension");
    if (c != 0.0) terms_.emplace(e, c);
  }
}

Polynomial Polynomial::constant(std::size_t n, double c) {
  Polynomial p(n);
  add_term(p.terms_, ExponentVector(n, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t n, std::size_t i) {
  if (i >= n) throw DimensionError("variable index out of range");
  ExponentVector e(n, 0);
  e[i] = 1;
  Polynomial p(n);
  p.terms_.emplace(std::move(e), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const ExponentVector& e, double c) {
  Polynomial p(e.size());
  add_term(p.terms_, e, c);
  return p;
}

unsigned Polynomial::degree() const {
  // graded order: the last key has maximal total degree
  return terms_.empty() ? 0u : total_degree(terms_.rbegin()->first);
}

double Polynomial::coefficient(const ExponentVector& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (x.size() != n_) {
    throw DimensionError("evaluation point has " + std::to_string(x.size()) +
                         " coordinates, polynomial has " + std::to_string(n_));
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (std::size_t j = 0; j < n_; ++j) {
      for (unsigned k = 0; k < e[j]; ++k) t *= x[j];
    }
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::partial_derivative(std::size_t i) const {
  if (i >= n_) throw DimensionError("derivative index out of range");
  Polynomial d(n_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    ExponentVector f = e;
    f[i] -= 1;
    add_term(d.terms_, f, c * e[i]);
  }
  return d;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result = constant(n_, 1.0);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::scaled(double c) const {
  Polynomial p(n_);
  if (c == 0.0) return p;
  for (const auto& [e, v] : terms_) add_term(p.terms_, e, v * c);
  return p;
}

Polynomial Polynomial::restrict(std::size_t var, double value) const {
  if (var >= n_) throw DimensionError("restricted variable out of range");
  Polynomial p(n_ - 1);
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (unsigned k = 0; k < e[var]; ++k) t *= value;
    ExponentVector f;
    f.reserve(n_ - 1);
    for (std::size_t j = 0; j < n_; ++j) {
      if (j != var) f.push_back(e[j]);
    }
    add_term(p.terms_, f, t);
  }
  return p;
}

Polynomial Polynomial::affine_substitute(std::span<const double> center,
                                         std::span<const double> half) const {
  if (center.size() != n_ || half.size() != n_) {
    throw DimensionError("affine substitution size mismatch");
  }
  // powers of (c_j + h_j t_j), cached per variable
  std::vector<std::vector<Polynomial>> powers(n_);
  const unsigned deg = degree();
  for (std::size_t j = 0; j < n_; ++j) {
    Polynomial lin = constant(n_, center[j]) + variable(n_, j).scaled(half[j]);
    powers[j].push_back(constant(n_, 1.0));
    for (unsigned k = 1; k <= deg; ++k) powers[j].push_back(powers[j].back() * lin);
  }
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) {
    Polynomial t = constant(n_, c);
    for (std::size_t j = 0; j < n_; ++j) {
      if (e[j] > 0) t = t * powers[j][e[j]];
    }
    out = out + t;
  }
  return out;
}

Polynomial Polynomial::embed(std::size_t at, std::size_t count) const {
  if (at > n_) throw DimensionError("embed position out of range");
  Polynomial p(n_ + count);
  for (const auto& [e, c] : terms_) {
    ExponentVector f(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(at));
    f.insert(f.end(), count, 0u);
    f.insert(f.end(), e.begin() + static_cast<std::ptrdiff_t>(at), e.end());
    p.terms_.emplace(std::move(f), c);
  }
  return p;
}

std::string Polynomial::to_string(const std::vector<std::string>& vars) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  // highest degree first reads more naturally
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    double mag = c;
    if (first) {
      if (c < 0) { os << "-"; mag = -c; }
    } else {
      os << (c < 0 ? " - " : " + ");
      mag = std::abs(c);
    }
    first = false;
    bool any_var = total_degree(e) > 0;
    bool wrote = false;
    if (!any_var || mag != 1.0) {
      os << mag;
      wrote = true;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (e[j] == 0) continue;
      if (wrote) os << "*";
      os << (j < vars.size() ? vars[j] : "x" + std::to_string(j + 1));
      if (e[j] > 1) os << "^" << e[j];
      wrote = true;
    }
  }
  return os.str();
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  require_same_dimension(a, b);
  Polynomial::TermMap t = a.terms();
  for (const auto& [e, c] : b.terms()) add_term(t, e, c);
  return Polynomial(a.dimension(), std::move(t));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  require_same_dimension(a, b);
  Polynomial::TermMap t = a.terms();
  for (const auto& [e, c] : b.terms()) add_term(t, e, -c);
  return Polynomial(a.dimension(), std::move(t));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  require_same_dimension(a, b);
  const std::size_t n = a.dimension();
  Polynomial::TermMap t;
  ExponentVector e(n);
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      for (std::size_t j = 0; j < n; ++j) e[j] = ea[j] + eb[j];
      add_term(t, e, ca * cb);
    }
  }
  return Polynomial(n, std::move(t));
}

std::vector<ExponentVector> monomial_basis(std::size_t n, unsigned d) {
  std::vector<ExponentVector> out;
  ExponentVector e(n, 0);
  // enumerate each grade in descending lex order
  for (unsigned g = 0; g <= d; ++g) {
    if (n == 0) {
      if (g == 0) out.emplace_back();
      continue;
    }
    // recursive fill: first coordinate takes the largest share first
    std::vector<unsigned> cur(n, 0);
    auto fill = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
      if (pos + 1 == n) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
      }
      for (unsigned k = remaining + 1; k-- > 0;) {
        cur[pos] = k;
        self(self, pos + 1, remaining - k);
      }
    };
    fill(fill, 0, g);
  }
  return out;
}

Polynomial sum_of_squares_combine(const std::vector<Polynomial>& fs) {
  if (fs.empty()) throw Error("sum_of_squares_combine needs at least one polynomial");
  Polynomial g(fs.front().dimension());
  for (const auto& f : fs) g = g + f * f;
  return g;
}

// ---------------------------------------------------------------------------
// Expression parser

namespace {

class ExpressionParser {
 public:
  ExpressionParser(const std::string& text, const std::vector<std::string>& vars)
      : s_(text), vars_(vars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial p = term();
    for (;;) {
      if (accept('+')) {
        p = p + term();
      } else if (accept('-')) {
        p = p - term();
      } else {
        return p;
      }
    }
  }

  Polynomial term() {
    Polynomial p = factor();
    while (accept('*')) p = p * factor();
    return p;
  }

  Polynomial factor() {
    bool negate = false;
    if (accept('-')) {
      negate = true;
    } else {
      accept('+');
    }
    Polynomial b = base();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_ ||
          (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))) {
        pos_ = start;
        fail("exponent must be a non-negative integer");
      }
      unsigned k = 0;
      auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, k);
      if (ec != std::errc() || k > 64) {
        pos_ = start;
        fail("exponent out of range");
      }
      b = b.pow(k);
    }
    return negate ? -b : b;
  }

  Polynomial base() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return variable();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Polynomial number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Polynomial::constant(vars_.size(), v);
  }

  Polynomial variable() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = s_.substr(start, pos_ - start);
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) {
      pos_ = start;
      fail("unknown variable '" + name + "'");
    }
    return Polynomial::variable(vars_.size(),
                                static_cast<std::size_t>(it - vars_.begin()));
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_expression(const std::string& text,
                            const std::vector<std::string>& vars) {
  return ExpressionParser(text, vars).parse();
}

}  // namespace varbox
