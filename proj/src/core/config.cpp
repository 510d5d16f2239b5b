#include "arcert/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "arcert/error.hpp"

namespace arcert {

namespace {

/// Cursor over one line of configuration text; columns reported 1-based.
class LineScanner {
 public:
  LineScanner(std::string_view text, int line) : text_(text), line_(line) {}

  int line() const { return line_; }
  std::size_t pos() const { return pos_; }
  int column() const { return static_cast<int>(pos_) + 1; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, column(), msg); }
  [[noreturn]] void fail_at(std::size_t pos, const std::string& msg) const {
    throw ParseError(line_, static_cast<int>(pos) + 1, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  void expect_end() {
    if (!at_end()) fail("unexpected text '" + std::string(text_.substr(pos_)) + "'");
  }

  bool next_is_word() {
    const char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  std::string word() {
    if (!next_is_word()) fail("expected a name");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    const std::size_t start = pos_;
    std::size_t p = pos_;
    bool negative = false;
    if (p < text_.size() && (text_[p] == '-' || text_[p] == '+')) negative = text_[p++] == '-';
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + p, text_.data() + text_.size(), v);
    if (res.ec != std::errc() || std::isnan(v)) fail_at(start, "expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return negative ? -v : v;
  }
  std::uint64_t integer() {
    skip_ws();
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    const auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (res.ec != std::errc()) fail_at(start, "expected a non-negative integer");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return v;
  }
  /// "[lo, hi]" or a bare number (a point interval).
  Interval interval() {
    skip_ws();
    const std::size_t start = pos_;
    if (!accept('[')) return Interval(number());
    const double lo = number();
    expect(',');
    const double hi = number();
    expect(']');
    if (!(lo <= hi)) fail_at(start, "interval with lower bound above upper bound");
    return Interval(lo, hi);
  }
  std::string_view rest() {
    skip_ws();
    return text_.substr(pos_);
  }
  void advance_to_end() { pos_ = text_.size(); }

 private:
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

Polynomial parse_expression(const LineScanner& s, std::string_view text, std::size_t offset, std::size_t dim) {
  if (text.find_first_not_of(" \t") == std::string_view::npos) s.fail_at(offset, "missing expression");
  try {
    return parse_polynomial(text, dim);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError(s.line(), static_cast<int>(offset) + e.column(), msg);
  } catch (const Error& e) {
    s.fail_at(offset, e.what());
  }
}

std::string interval_text(const Interval& x) {
  return "[" + format_double(x.lo()) + ", " + format_double(x.hi()) + "]";
}

const char* integrator_name(Integrator m) { return m == Integrator::Ball ? "ball" : "box"; }

Integrator parse_integrator(LineScanner& s) {
  const std::size_t at = s.pos();
  const std::string w = s.word();
  if (w == "box") return Integrator::Box;
  if (w == "ball") return Integrator::Ball;
  s.fail_at(at, "integrator must be 'box' or 'ball'");
}

struct PieceDraft {
  RegionPiece piece;
  std::vector<std::optional<Polynomial>> rhs;
  int line = 0;
};

class Parser {
 public:
  SystemConfig run(std::string_view text) {
    int line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
      std::size_t end = text.find('\n', begin);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(begin, end - begin);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      LineScanner s(line, line_no);
      if (!s.at_end()) statement(s);
      begin = end + 1;
    }
    if (piece_) throw ParseError(piece_->line, 1, "piece '" + piece_->piece.name + "' is not closed by 'end'");
    if (cfg_.dim == 0) throw Error(ErrorCode::ValidationError, "missing 'dim' or 'domain'");
    if (cfg_.domain.dim() == 0) throw Error(ErrorCode::ValidationError, "missing 'domain'");
    if (cfg_.grid.empty()) throw Error(ErrorCode::ValidationError, "missing 'grid'");
    validate_config(cfg_);
    return std::move(cfg_);
  }

 private:
  void need_dim(const LineScanner& s, std::size_t at) const {
    if (cfg_.dim == 0) s.fail_at(at, "dimension unknown: declare 'dim' or 'domain' first");
  }

  void set_dim(LineScanner& s, std::size_t at, std::size_t n) {
    if (n == 0 || n > Polynomial::kMaxStateDim) {
      s.fail_at(at, "dimension must be between 1 and " + std::to_string(Polynomial::kMaxStateDim));
    }
    if (cfg_.dim != 0 && cfg_.dim != n) s.fail_at(at, "dimension conflicts with an earlier declaration");
    cfg_.dim = n;
  }

  IntervalVector intervals(LineScanner& s, std::size_t at) {
    need_dim(s, at);
    std::vector<Interval> xs;
    for (std::size_t i = 0; i < cfg_.dim; ++i) xs.push_back(s.interval());
    return IntervalVector(std::move(xs));
  }

  void statement(LineScanner& s) {
    const std::size_t at = s.pos();
    if (!s.next_is_word()) s.fail("expected a keyword");
    const std::string kw = s.word();
    if (piece_) return piece_statement(s, kw, at);

    if (kw == "dim") {
      set_dim(s, at, s.integer());
    } else if (kw == "domain") {
      std::vector<Interval> xs;
      while (!s.at_end()) xs.push_back(s.interval());
      set_dim(s, at, xs.size());
      cfg_.domain = IntervalVector(std::move(xs));
      return;
    } else if (kw == "grid") {
      need_dim(s, at);
      std::vector<std::uint64_t> g;
      while (!s.at_end()) g.push_back(s.integer());
      if (g.size() == 1) g.assign(cfg_.dim, g[0]);
      if (g.size() != cfg_.dim) s.fail_at(at, "grid needs one subdivision count per axis");
      cfg_.grid = std::move(g);
      return;
    } else if (kw == "tau") {
      cfg_.tau = s.number();
    } else if (kw == "lambda") {
      cfg_.lambda = s.interval();
    } else if (kw == "lambda_range") {
      cfg_.lambda_range = s.interval();
    } else if (kw == "substeps") {
      cfg_.integration.substeps = static_cast<unsigned>(s.integer());
    } else if (kw == "subdivide") {
      cfg_.integration.subdivide = static_cast<unsigned>(s.integer());
    } else if (kw == "integrator") {
      cfg_.integration.method = parse_integrator(s);
    } else if (kw == "threads") {
      cfg_.integration.threads = static_cast<unsigned>(s.integer());
    } else if (kw == "piece") {
      need_dim(s, at);
      piece_.emplace();
      piece_->piece.name = s.word();
      piece_->rhs.resize(cfg_.dim);
      piece_->line = s.line();
    } else if (kw == "override") {
      Override o;
      o.region = intervals(s, at);
      s.expect('=');
      o.value = intervals(s, at);
      cfg_.overrides.push_back(std::move(o));
    } else if (kw == "set") {
      set_statement(s);
      return;
    } else if (kw == "k_max") {
      cfg_.k_max = s.integer();
    } else if (kw == "slack") {
      cfg_.slack = s.integer();
    } else if (kw == "samples") {
      cfg_.samples.clear();
      while (!s.at_end()) cfg_.samples.push_back(s.number());
      if (cfg_.samples.empty()) s.fail("expected at least one sample");
      return;
    } else if (kw == "anchor") {
      cfg_.anchor = s.number();
    } else if (kw == "mode") {
      const std::size_t m = s.pos();
      const std::string w = s.word();
      if (w == "sampled") {
        cfg_.mode = SweepMode::Sampled;
      } else if (w == "interval") {
        cfg_.mode = SweepMode::Interval;
      } else {
        s.fail_at(m, "mode must be 'sampled' or 'interval'");
      }
    } else if (kw == "slope") {
      cfg_.slope = s.number();
    } else if (kw == "sharpen") {
      cfg_.sharpen.horizon = s.number();
    } else if (kw == "sharpen_stage") {
      if (!custom_stages_) cfg_.sharpen.stages.clear();
      custom_stages_ = true;
      IntegrationOptions st{};
      st.method = Integrator::Ball;
      st.substeps = static_cast<unsigned>(s.integer());
      st.subdivide = static_cast<unsigned>(s.integer());
      if (!s.at_end()) st.method = parse_integrator(s);
      cfg_.sharpen.stages.push_back(st);
    } else if (kw == "sharpen_rounds") {
      cfg_.sharpen.max_rounds = static_cast<unsigned>(s.integer());
    } else if (kw == "sharpen_sides") {
      const std::size_t m = s.pos();
      const std::string w = s.word();
      if (w == "both") {
        cfg_.sharpen.forward = cfg_.sharpen.backward = true;
      } else if (w == "attractor") {
        cfg_.sharpen.forward = true;
        cfg_.sharpen.backward = false;
      } else if (w == "repeller") {
        cfg_.sharpen.forward = false;
        cfg_.sharpen.backward = true;
      } else if (w == "none") {
        cfg_.sharpen.forward = cfg_.sharpen.backward = false;
      } else {
        s.fail_at(m, "sharpen_sides must be 'both', 'attractor', 'repeller' or 'none'");
      }
    } else if (kw == "end") {
      s.fail_at(at, "'end' outside a piece");
    } else {
      s.fail_at(at, "unknown keyword '" + kw + "'");
    }
    s.expect_end();
  }

  void piece_statement(LineScanner& s, const std::string& kw, std::size_t at) {
    if (kw == "end") {
      s.expect_end();
      for (std::size_t i = 0; i < cfg_.dim; ++i) {
        if (!piece_->rhs[i]) {
          s.fail_at(at, "piece '" + piece_->piece.name + "' has no right-hand side dx" + std::to_string(i + 1));
        }
        piece_->piece.rhs.push_back(std::move(*piece_->rhs[i]));
      }
      cfg_.pieces.push_back(std::move(piece_->piece));
      piece_.reset();
      return;
    }
    if (kw == "guard") {
      const std::size_t start = s.pos();
      const std::string_view text = s.rest();
      const std::size_t text_at = s.pos();
      std::size_t op = text.find_first_of("<>");
      if (op == std::string_view::npos) s.fail_at(start, "guard needs '<=' or '>='");
      const bool less = text[op] == '<';
      const std::size_t op_len = (op + 1 < text.size() && text[op + 1] == '=') ? 2 : 1;
      const Polynomial lhs = parse_expression(s, text.substr(0, op), text_at, cfg_.dim);
      const Polynomial rhs = parse_expression(s, text.substr(op + op_len), text_at + op + op_len, cfg_.dim);
      const Polynomial diff = less ? lhs - rhs : rhs - lhs;
      AffineGuard g;
      if (!diff.affine_coefficients(g.normal, g.offset)) {
        s.fail_at(text_at, "guard must be affine in the state, free of lambda, with point coefficients");
      }
      piece_->piece.guards.push_back(std::move(g));
      s.advance_to_end();
      return;
    }
    if (kw.size() > 2 && kw.rfind("dx", 0) == 0) {
      std::size_t index = 0;
      const auto res = std::from_chars(kw.data() + 2, kw.data() + kw.size(), index);
      if (res.ec != std::errc() || res.ptr != kw.data() + kw.size() || index == 0 || index > cfg_.dim) {
        s.fail_at(at, "'" + kw + "' is not a state derivative of this system");
      }
      if (piece_->rhs[index - 1]) s.fail_at(at, "duplicate right-hand side " + kw);
      s.expect('=');
      const std::string_view text = s.rest();
      piece_->rhs[index - 1] = parse_expression(s, text, s.pos(), cfg_.dim);
      s.advance_to_end();
      return;
    }
    s.fail_at(at, "expected 'guard', 'dxK = ...' or 'end' inside a piece");
  }

  void set_statement(LineScanner& s) {
    SetDefinition def;
    const std::size_t name_at = s.pos();
    def.name = s.word();
    for (const auto& other : cfg_.sets) {
      if (other.name == def.name) s.fail_at(name_at, "set '" + def.name + "' defined twice");
    }
    s.expect('=');
    bool subtract = false;
    while (true) {
      const std::size_t at = s.pos();
      SetTerm t;
      t.subtract = subtract;
      const std::string kind = s.word();
      if (kind == "all") {
        t.kind = SetTerm::Kind::All;
      } else if (kind == "box") {
        t.kind = SetTerm::Kind::Box;
        t.box = intervals(s, at);
      } else if (kind == "cells") {
        t.kind = SetTerm::Kind::Cells;
        while (std::isdigit(static_cast<unsigned char>(s.peek()))) t.cells.push_back(s.integer());
      } else if (kind == "ring") {
        need_dim(s, at);
        t.kind = SetTerm::Kind::Ring;
        for (std::size_t i = 0; i < cfg_.dim; ++i) t.centre.push_back(s.number());
        t.r_lo = s.number();
        t.r_hi = s.number();
      } else {
        s.fail_at(at, "set term must be 'all', 'box', 'cells' or 'ring'");
      }
      def.terms.push_back(std::move(t));
      if (s.accept('+')) {
        subtract = false;
      } else if (s.accept('-')) {
        subtract = true;
      } else {
        break;
      }
    }
    s.expect_end();
    cfg_.sets.push_back(std::move(def));
  }

  SystemConfig cfg_;
  std::optional<PieceDraft> piece_;
  bool custom_stages_ = false;
};

void check(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::ValidationError, msg);
}

Polynomial guard_polynomial(const AffineGuard& g, std::size_t dim) {
  Polynomial p = Polynomial::constant(dim, Interval(g.offset));
  for (std::size_t i = 0; i < g.normal.size(); ++i) {
    if (g.normal[i] != 0.0) p = p + Polynomial::constant(dim, Interval(g.normal[i])) * Polynomial::variable(dim, i);
  }
  return p;
}

}  // namespace

const SetDefinition* SystemConfig::find_set(std::string_view name) const {
  for (const auto& s : sets) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

SystemConfig parse_config(std::string_view text) { return Parser().run(text); }

void validate_config(const SystemConfig& c) {
  check(c.dim >= 1 && c.dim <= Polynomial::kMaxStateDim, "dimension out of range");
  check(c.domain.dim() == c.dim, "domain needs one interval per axis");
  for (std::size_t i = 0; i < c.dim; ++i) {
    check(std::isfinite(c.domain[i].lo()) && std::isfinite(c.domain[i].hi()) && c.domain[i].width() > 0.0,
          "domain axis " + std::to_string(i + 1) + " must be a finite interval of positive width");
  }
  check(c.grid.size() == c.dim, "grid needs one subdivision count per axis");
  for (auto g : c.grid) check(g >= 1, "grid subdivisions must be positive");
  if (c.tau) check(*c.tau > 0.0 && std::isfinite(*c.tau), "tau must be positive");
  check(c.lambda_range.lo() <= c.lambda.lo() && c.lambda.hi() <= c.lambda_range.hi(),
        "lambda " + interval_text(c.lambda) + " lies outside lambda_range " + interval_text(c.lambda_range));
  check(c.integration.substeps >= 1 && c.integration.subdivide >= 1, "substeps and subdivide must be positive");
  check(!c.pieces.empty(), "at least one piece is required");
  std::set<std::string> names;
  for (const auto& p : c.pieces) {
    check(names.insert(p.name).second, "piece '" + p.name + "' defined twice");
    check(p.rhs.size() == c.dim, "piece '" + p.name + "' needs one right-hand side per axis");
    for (const auto& r : p.rhs) check(r.state_dim() == c.dim, "piece '" + p.name + "' has a mismatched expression");
    for (const auto& g : p.guards) check(g.normal.size() == c.dim, "piece '" + p.name + "' has a mismatched guard");
  }
  for (const auto& o : c.overrides) {
    check(o.region.dim() == c.dim && o.value.dim() == c.dim, "override needs one interval per axis");
    check(o.region.intersects(c.domain), "override region lies outside the domain");
  }
  try {
    PiecewiseInclusion(c.domain, c.pieces, c.overrides, c.lambda_range).validate_coverage();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UncoveredRegion) throw;
    throw Error(ErrorCode::ValidationError, std::string("uncovered region: ") + e.what());
  }

  std::uint64_t cell_count = 1;
  for (auto g : c.grid) cell_count *= g;
  for (const auto& s : c.sets) {
    check(!s.terms.empty(), "set '" + s.name + "' is empty");
    for (const auto& t : s.terms) {
      switch (t.kind) {
        case SetTerm::Kind::All:
          break;
        case SetTerm::Kind::Box:
          check(t.box.dim() == c.dim, "set '" + s.name + "': box needs one interval per axis");
          for (std::size_t i = 0; i < c.dim; ++i) {
            check(c.domain[i].lo() <= t.box[i].lo() && t.box[i].hi() <= c.domain[i].hi(),
                  "set '" + s.name + "': sub-box outside the domain");
          }
          break;
        case SetTerm::Kind::Cells:
          for (auto id : t.cells) {
            check(id < cell_count, "set '" + s.name + "': cell id " + std::to_string(id) + " outside the grid");
          }
          break;
        case SetTerm::Kind::Ring:
          check(t.centre.size() == c.dim, "set '" + s.name + "': ring centre needs one coordinate per axis");
          check(0.0 <= t.r_lo && t.r_lo <= t.r_hi, "set '" + s.name + "': ring radii must satisfy 0 <= r_lo <= r_hi");
          break;
      }
    }
  }

  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    check(c.lambda_range.contains(c.samples[i]),
          "sample " + format_double(c.samples[i]) + " lies outside lambda_range " + interval_text(c.lambda_range));
    check(i == 0 || c.samples[i] > c.samples[i - 1], "samples must be strictly increasing");
  }
  if (c.anchor) {
    bool found = false;
    for (double v : c.samples) found = found || v == *c.anchor;
    check(found, "anchor " + format_double(*c.anchor) + " is not one of the samples");
  }
  check(c.slope >= 0.0 && std::isfinite(c.slope), "slope must be non-negative");
  check(c.sharpen.horizon >= 0.0 && std::isfinite(c.sharpen.horizon), "sharpen horizon must be non-negative");
  check(!c.sharpen.stages.empty(), "at least one sharpen stage is required");
  for (const auto& st : c.sharpen.stages) {
    check(st.substeps >= 1 && st.subdivide >= 1, "sharpen stages need positive substeps and subdivide");
  }
}

std::string print_config(const SystemConfig& c) {
  std::ostringstream os;
  os << "dim " << c.dim << '\n';
  os << "domain";
  for (std::size_t i = 0; i < c.domain.dim(); ++i) os << ' ' << interval_text(c.domain[i]);
  os << "\ngrid";
  for (auto g : c.grid) os << ' ' << g;
  os << '\n';
  if (c.tau) os << "tau " << format_double(*c.tau) << '\n';
  os << "lambda " << (c.lambda.is_point() ? format_double(c.lambda.lo()) : interval_text(c.lambda)) << '\n';
  os << "lambda_range " << interval_text(c.lambda_range) << '\n';
  os << "substeps " << c.integration.substeps << '\n';
  os << "subdivide " << c.integration.subdivide << '\n';
  os << "integrator " << integrator_name(c.integration.method) << '\n';
  os << "threads " << c.integration.threads << '\n';
  for (const auto& p : c.pieces) {
    os << "\npiece " << p.name << '\n';
    for (const auto& g : p.guards) os << "  guard " << guard_polynomial(g, c.dim).to_string() << " <= 0\n";
    for (std::size_t i = 0; i < p.rhs.size(); ++i) os << "  dx" << i + 1 << " = " << p.rhs[i].to_string() << '\n';
    os << "end\n";
  }
  if (!c.overrides.empty()) os << '\n';
  for (const auto& o : c.overrides) {
    os << "override";
    for (std::size_t i = 0; i < o.region.dim(); ++i) os << ' ' << interval_text(o.region[i]);
    os << " =";
    for (std::size_t i = 0; i < o.value.dim(); ++i) os << ' ' << interval_text(o.value[i]);
    os << '\n';
  }
  if (!c.sets.empty()) os << '\n';
  for (const auto& s : c.sets) {
    os << "set " << s.name << " =";
    for (std::size_t k = 0; k < s.terms.size(); ++k) {
      const SetTerm& t = s.terms[k];
      if (k > 0) os << (t.subtract ? " -" : " +");
      switch (t.kind) {
        case SetTerm::Kind::All:
          os << " all";
          break;
        case SetTerm::Kind::Box:
          os << " box";
          for (std::size_t i = 0; i < t.box.dim(); ++i) os << ' ' << interval_text(t.box[i]);
          break;
        case SetTerm::Kind::Cells:
          os << " cells";
          for (auto id : t.cells) os << ' ' << id;
          break;
        case SetTerm::Kind::Ring:
          os << " ring";
          for (double x : t.centre) os << ' ' << format_double(x);
          os << ' ' << format_double(t.r_lo) << ' ' << format_double(t.r_hi);
          break;
      }
    }
    os << '\n';
  }
  os << "\nk_max " << c.k_max << '\n';
  os << "slack " << c.slack << '\n';
  if (!c.samples.empty()) {
    os << "samples";
    for (double v : c.samples) os << ' ' << format_double(v);
    os << '\n';
  }
  if (c.anchor) os << "anchor " << format_double(*c.anchor) << '\n';
  os << "mode " << (c.mode == SweepMode::Interval ? "interval" : "sampled") << '\n';
  os << "slope " << format_double(c.slope) << '\n';
  os << "sharpen " << format_double(c.sharpen.horizon) << '\n';
  for (const auto& st : c.sharpen.stages) {
    os << "sharpen_stage " << st.substeps << ' ' << st.subdivide << ' ' << integrator_name(st.method) << '\n';
  }
  os << "sharpen_rounds " << c.sharpen.max_rounds << '\n';
  os << "sharpen_sides "
     << (c.sharpen.forward ? (c.sharpen.backward ? "both" : "attractor") : (c.sharpen.backward ? "repeller" : "none"))
     << '\n';
  return os.str();
}

BoxSet evaluate_set(const SetDefinition& def, const std::shared_ptr<const Grid>& grid) {
  BoxSet out(grid);
  for (const auto& t : def.terms) {
    BoxSet term(grid);
    switch (t.kind) {
      case SetTerm::Kind::All:
        term = BoxSet::all(grid);
        break;
      case SetTerm::Kind::Box:
        term = BoxSet::covering(grid, t.box);
        break;
      case SetTerm::Kind::Cells:
        term = BoxSet(grid, t.cells);
        break;
      case SetTerm::Kind::Ring: {
        std::vector<CellId> ids;
        for (CellId id = 0; id < grid->cell_count(); ++id) {
          const std::vector<double> m = grid->cell_box(id).midpoint();
          double r2 = 0.0;
          for (std::size_t i = 0; i < m.size(); ++i) r2 += (m[i] - t.centre[i]) * (m[i] - t.centre[i]);
          const double r = std::sqrt(r2);
          if (t.r_lo <= r && r <= t.r_hi) ids.push_back(id);
        }
        term = BoxSet(grid, std::move(ids));
        break;
      }
    }
    out = t.subtract ? out.minus(term) : out.unite(term);
  }
  return out;
}

ResolvedSystem resolve(const SystemConfig& config) {
  ResolvedSystem r;
  r.grid = std::make_shared<const Grid>(config.domain, config.grid);
  r.inclusion = std::make_shared<const PiecewiseInclusion>(config.domain, config.pieces, config.overrides,
                                                           config.lambda_range);
  r.tau = config.tau ? *config.tau : default_tau(*r.grid, *r.inclusion, Params{config.lambda});
  return r;
}

BoxSet ResolvedSystem::set(const SystemConfig& config, std::string_view name) const {
  if (const SetDefinition* def = config.find_set(name)) return evaluate_set(*def, grid);
  throw Error(ErrorCode::ValidationError, "set '" + std::string(name) + "' is not defined");
}

std::optional<BoxSet> ResolvedSystem::optional_set(const SystemConfig& config, std::string_view name) const {
  if (const SetDefinition* def = config.find_set(name)) return evaluate_set(*def, grid);
  return std::nullopt;
}

MapConfig ResolvedSystem::map_config(const SystemConfig& config) const {
  return MapConfig{grid, inclusion, Params{config.lambda}, tau, config.integration};
}

SweepPlan ResolvedSystem::plan(const SystemConfig& config) const {
  std::vector<double> samples = config.samples;
  if (samples.empty()) {
    check(config.lambda.is_point(), "a sweep needs 'samples' (or a point 'lambda')");
    samples.push_back(config.lambda.lo());
  }
  double anchor = samples.front();
  if (config.anchor) {
    anchor = *config.anchor;
  } else {
    for (double v : samples) {
      if (v == 0.0) anchor = 0.0;
    }
  }
  SweepPlan p{grid,
              inclusion,
              tau,
              config.integration,
              samples,
              config.find_set("N") ? set(config, "N") : BoxSet::all(grid),
              optional_set(config, "N_A"),
              optional_set(config, "N_R"),
              anchor,
              config.mode,
              DecomposeOptions{config.k_max, config.slack},
              config.sharpen,
              config.slope};
  return p;
}

}  // namespace arcert
