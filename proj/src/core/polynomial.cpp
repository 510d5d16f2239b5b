#include "arcert/polynomial.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>

namespace arcert {

Polynomial::Polynomial(std::size_t state_dim) : n_(state_dim) {
  if (state_dim == 0 || state_dim > kMaxStateDim) {
    throw Error(ErrorCode::InvalidArgument,
                "state dimension must be in 1.." + std::to_string(kMaxStateDim));
  }
  rebuild_flat();
}

Polynomial Polynomial::constant(std::size_t state_dim, Interval c) {
  Polynomial p(state_dim);
  p.add_term(Exponents(state_dim + 1, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t state_dim, std::size_t index) {
  Polynomial p(state_dim);
  if (index >= state_dim) throw Error(ErrorCode::InvalidArgument, "variable index out of range");
  Exponents e(state_dim + 1, 0);
  e[index] = 1;
  p.add_term(e, Interval(1.0));
  return p;
}

Polynomial Polynomial::lambda(std::size_t state_dim) {
  Polynomial p(state_dim);
  Exponents e(state_dim + 1, 0);
  e[state_dim] = 1;
  p.add_term(e, Interval(1.0));
  return p;
}

void Polynomial::add_term(const Exponents& e, const Interval& c) {
  auto it = terms_.find(e);
  Interval sum = it == terms_.end() ? c : it->second + c;
  if (sum == Interval(0.0)) {
    if (it != terms_.end()) terms_.erase(it);
  } else if (it == terms_.end()) {
    terms_.emplace(e, sum);
  } else {
    it->second = sum;
  }
  for (auto k : e) {
    if (k > kMaxDegree) throw Error(ErrorCode::InvalidArgument, "polynomial degree too large");
  }
  rebuild_flat();
}

void Polynomial::rebuild_flat() {
  flat_coef_.clear();
  flat_exp_.clear();
  var_degree_.assign(n_ + 1, 0);
  for (const auto& [e, c] : terms_) {
    flat_coef_.push_back(c);
    for (std::size_t v = 0; v <= n_; ++v) {
      flat_exp_.push_back(e[v]);
      var_degree_[v] = std::max<unsigned>(var_degree_[v], e[v]);
    }
  }
  power_offset_.assign(n_ + 1, 0);
  power_count_ = 0;
  for (std::size_t v = 0; v <= n_; ++v) {
    power_offset_[v] = power_count_ - 1;  // exponent k >= 1 lives at offset + k
    power_count_ += var_degree_[v];
  }
}

unsigned Polynomial::degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (std::size_t i = 0; i < n_; ++i) s += e[i];
    d = std::max(d, s);
  }
  return d;
}

bool Polynomial::is_affine_in_state() const { return degree() <= 1; }

bool Polynomial::depends_on_lambda() const {
  for (const auto& [e, c] : terms_) {
    if (e[n_] != 0) return true;
  }
  return false;
}

bool Polynomial::has_interval_coefficients() const {
  for (const auto& [e, c] : terms_) {
    if (!c.is_point()) return true;
  }
  return false;
}

bool Polynomial::affine_coefficients(std::vector<double>& linear, double& constant) const {
  if (!is_affine_in_state() || depends_on_lambda() || has_interval_coefficients()) return false;
  linear.assign(n_, 0.0);
  constant = 0.0;
  for (const auto& [e, c] : terms_) {
    bool is_const = true;
    for (std::size_t i = 0; i < n_; ++i) {
      if (e[i] == 1) {
        linear[i] = c.lo();
        is_const = false;
      }
    }
    if (is_const) constant = c.lo();
  }
  return true;
}

Interval Polynomial::evaluate(const IntervalVector& x, const Interval& lambda) const {
  if (x.dim() != n_) throw Error(ErrorCode::InvalidArgument, "evaluation box has wrong dimension");
  if (terms_.empty()) return Interval(0.0);
  if (x.is_empty() || lambda.is_empty()) return Interval::empty();

  thread_local std::vector<Interval> powers;
  if (powers.size() < power_count_) powers.resize(power_count_);
  for (std::size_t v = 0; v <= n_; ++v) {
    const Interval& base = v < n_ ? x[v] : lambda;
    for (unsigned k = 1; k <= var_degree_[v]; ++k) powers[power_offset_[v] + k] = base.pow(k);
  }

  Interval sum(0.0);
  const std::uint8_t* e = flat_exp_.data();
  for (const Interval& c : flat_coef_) {
    Interval t = c;
    for (std::size_t v = 0; v <= n_; ++v) {
      if (e[v] != 0) t *= powers[power_offset_[v] + e[v]];
    }
    e += n_ + 1;
    sum += t;
  }
  return sum;
}

double Polynomial::evaluate_point(const std::vector<double>& x, double lambda) const {
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c.mid();
    for (std::size_t v = 0; v <= n_; ++v) {
      const double base = v < n_ ? x[v] : lambda;
      for (unsigned k = 0; k < e[v]; ++k) t *= base;
    }
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::derivative(std::size_t index) const {
  if (index >= n_) throw Error(ErrorCode::InvalidArgument, "derivative index out of range");
  Polynomial r(n_);
  for (const auto& [e, c] : terms_) {
    if (e[index] == 0) continue;
    Exponents d = e;
    --d[index];
    r.add_term(d, c * Interval(static_cast<double>(e[index])));
  }
  return r;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial r = constant(n_, Interval(1.0));
  for (unsigned i = 0; i < k; ++i) r = r * *this;
  return r;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  if (a.n_ != b.n_) throw Error(ErrorCode::InvalidArgument, "polynomial dimension mismatch");
  Polynomial r = a;
  for (const auto& [e, c] : b.terms_) r.add_term(e, c);
  return r;
}

Polynomial operator-(const Polynomial& a) {
  Polynomial r(a.n_);
  for (const auto& [e, c] : a.terms_) r.add_term(e, -c);
  return r;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.n_ != b.n_) throw Error(ErrorCode::InvalidArgument, "polynomial dimension mismatch");
  Polynomial r(a.n_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Polynomial::Exponents e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        const unsigned s = unsigned(ea[i]) + unsigned(eb[i]);
        if (s > Polynomial::kMaxDegree) throw Error(ErrorCode::InvalidArgument, "polynomial degree too large");
        e[i] = static_cast<std::uint8_t>(s);
      }
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    std::string mono;
    for (std::size_t v = 0; v <= n_; ++v) {
      if (e[v] == 0) continue;
      if (!mono.empty()) mono += '*';
      mono += v < n_ ? "x" + std::to_string(v + 1) : std::string("lambda");
      if (e[v] > 1) mono += "^" + std::to_string(e[v]);
    }
    std::string coef;
    bool negative = false;
    if (c.is_point()) {
      negative = c.lo() < 0;
      const double mag = negative ? -c.lo() : c.lo();
      if (mag != 1.0 || mono.empty()) coef = format_double(mag);
    } else {
      coef = "[" + format_double(c.lo()) + ", " + format_double(c.hi()) + "]";
    }
    std::string term = coef;
    if (!mono.empty()) term = coef.empty() ? mono : coef + "*" + mono;
    if (first) {
      out = negative ? "-" + term : term;
    } else {
      out += negative ? " - " : " + ";
      out += term;
    }
    first = false;
  }
  return out;
}

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view s, std::size_t n) : s_(s), n_(n) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(1, static_cast<int>(pos_) + 1, msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
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
    Polynomial p = unary();
    while (accept('*')) p = p * unary();
    return p;
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (accept('^')) {
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      const unsigned k = static_cast<unsigned>(std::strtoul(std::string(s_.substr(start, pos_ - start)).c_str(), nullptr, 10));
      if (k > Polynomial::kMaxDegree) fail("exponent too large");
      return base.pow(k);
    }
    return base;
  }

  double number() {
    skip();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' || s_[pos_] == 'e' ||
            s_[pos_] == 'E' ||
            ((s_[pos_] == '-' || s_[pos_] == '+') && pos_ > start &&
             (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    const std::string tok(s_.substr(start, pos_ - start));
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      pos_ = start;
      fail("expected a number");
    }
    return v;
  }

  Polynomial atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (c == '[') {
      ++pos_;
      const double lo = number();
      if (!accept(',')) fail("expected ',' in interval constant");
      const double hi = number();
      if (!accept(']')) fail("expected ']'");
      if (!(lo <= hi)) fail("interval constant with lo > hi");
      return Polynomial::constant(n_, Interval(lo, hi));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return Polynomial::constant(n_, Interval(number()));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id(s_.substr(start, pos_ - start));
      if (id == "lambda") return Polynomial::lambda(n_);
      std::size_t index = 0;
      if (id == "x" || id == "y" || id == "z") {
        index = id == "x" ? 0 : id == "y" ? 1 : 2;
      } else if (id.size() >= 2 && id[0] == 'x' &&
                 id.find_first_not_of("0123456789", 1) == std::string::npos) {
        index = std::strtoul(id.c_str() + 1, nullptr, 10);
        if (index == 0) {
          pos_ = start;
          fail("variables are numbered from x1");
        }
        index -= 1;
      } else {
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
      if (index >= n_) {
        pos_ = start;
        fail("variable '" + id + "' exceeds state dimension " + std::to_string(n_));
      }
      return Polynomial::variable(n_, index);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, std::size_t state_dim) {
  return ExprParser(text, state_dim).parse();
}

}  // namespace arcert
