#include "arnold/timefn.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <system_error>

#include "arnold/error.hpp"

namespace arnold {

namespace detail {

enum class Op {
  number,
  var,
  pi,
  e,
  neg,
  add,
  sub,
  mul,
  div,
  pow,
  sin,
  cos,
  tan,
  sinh,
  cosh,
  tanh,
  exp,
  log,
  sqrt,
};

using Node = std::shared_ptr<const Expr>;

struct Expr {
  Op op;
  double value = 0.0;
  Node lhs;
  Node rhs;
};

}  // namespace detail

namespace {

using detail::Expr;
using detail::Node;
using detail::Op;

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr std::array<FunctionName, 9> kFunctions{{
    {"sin", Op::sin},
    {"cos", Op::cos},
    {"tan", Op::tan},
    {"sinh", Op::sinh},
    {"cosh", Op::cosh},
    {"tanh", Op::tanh},
    {"exp", Op::exp},
    {"log", Op::log},
    {"sqrt", Op::sqrt},
}};

std::string_view function_name(Op op) {
  for (const auto& f : kFunctions) {
    if (f.op == op) return f.name;
  }
  return "?";
}

Node make(Op op, double value = 0.0, Node lhs = nullptr, Node rhs = nullptr) {
  return std::make_shared<const Expr>(Expr{op, value, std::move(lhs), std::move(rhs)});
}

Node number(double v) { return make(Op::number, v == 0.0 ? 0.0 : v); }

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Node parse() {
    Node n = expr();
    skip_ws();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return n;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "', found end of input", pos_);
    if (text_[pos_] != c) throw ParseError(std::string("expected '") + c + "', found '" + text_[pos_] + "'", pos_);
    ++pos_;
  }

  Node expr() {
    Node lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::add, 0.0, lhs, term());
      } else if (accept('-')) {
        lhs = make(Op::sub, 0.0, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Node term() {
    Node lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::mul, 0.0, lhs, factor());
      } else if (accept('/')) {
        lhs = make(Op::div, 0.0, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  Node factor() {
    Node base = unary();
    if (accept('^')) return make(Op::pow, 0.0, base, factor());
    return base;
  }

  Node unary() {
    if (accept('-')) return make(Op::neg, 0.0, unary());
    return atom();
  }

  Node atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Node inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Node number_literal() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) throw ParseError("malformed number", start);
    return number(v);
  }

  Node identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "t") return make(Op::var);
    if (name == "pi") return make(Op::pi);
    if (name == "e") return make(Op::e);
    for (const auto& f : kFunctions) {
      if (f.name == name) return call(f.op, name, start);
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  Node call(Op op, std::string_view name, std::size_t start) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '(') {
      throw ParseError("function '" + std::string(name) + "' takes 1 argument", start);
    }
    ++pos_;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ')') {
      throw ParseError("function '" + std::string(name) + "' takes 1 argument, got 0", pos_);
    }
    Node arg = expr();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ',') {
      throw ParseError("function '" + std::string(name) + "' takes 1 argument, got more", pos_);
    }
    expect(')');
    return make(op, 0.0, arg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

[[noreturn]] void domain_error(std::string_view what, double t) {
  throw DomainError(std::string(what) + " at t=" + std::to_string(t));
}

double checked(double v, std::string_view what, double t) {
  if (!std::isfinite(v)) domain_error(std::string(what) + " produced a non-finite value", t);
  return v;
}

double evaluate(const Expr& n, double t) {
  switch (n.op) {
    case Op::number:
      return n.value;
    case Op::var:
      return t;
    case Op::pi:
      return std::numbers::pi;
    case Op::e:
      return std::numbers::e;
    case Op::neg:
      return -evaluate(*n.lhs, t);
    case Op::add:
      return checked(evaluate(*n.lhs, t) + evaluate(*n.rhs, t), "addition", t);
    case Op::sub:
      return checked(evaluate(*n.lhs, t) - evaluate(*n.rhs, t), "subtraction", t);
    case Op::mul:
      return checked(evaluate(*n.lhs, t) * evaluate(*n.rhs, t), "multiplication", t);
    case Op::div: {
      const double d = evaluate(*n.rhs, t);
      if (d == 0.0) domain_error("division by zero", t);
      return checked(evaluate(*n.lhs, t) / d, "division", t);
    }
    case Op::pow: {
      const double b = evaluate(*n.lhs, t);
      const double x = evaluate(*n.rhs, t);
      if (b < 0.0 && x != std::trunc(x)) domain_error("negative base with non-integer exponent", t);
      if (b == 0.0 && x < 0.0) domain_error("zero base with negative exponent", t);
      return checked(std::pow(b, x), "power", t);
    }
    case Op::sin:
      return std::sin(evaluate(*n.lhs, t));
    case Op::cos:
      return std::cos(evaluate(*n.lhs, t));
    case Op::tan:
      return checked(std::tan(evaluate(*n.lhs, t)), "tan", t);
    case Op::sinh:
      return checked(std::sinh(evaluate(*n.lhs, t)), "sinh", t);
    case Op::cosh:
      return checked(std::cosh(evaluate(*n.lhs, t)), "cosh", t);
    case Op::tanh:
      return std::tanh(evaluate(*n.lhs, t));
    case Op::exp:
      return checked(std::exp(evaluate(*n.lhs, t)), "exp", t);
    case Op::log: {
      const double a = evaluate(*n.lhs, t);
      if (!(a > 0.0)) domain_error("log of non-positive argument", t);
      return std::log(a);
    }
    case Op::sqrt: {
      const double a = evaluate(*n.lhs, t);
      if (a < 0.0) domain_error("sqrt of negative argument", t);
      return std::sqrt(a);
    }
  }
  return 0.0;
}

bool depends_on_t(const Expr& n) {
  if (n.op == Op::var) return true;
  if (n.lhs && depends_on_t(*n.lhs)) return true;
  if (n.rhs && depends_on_t(*n.rhs)) return true;
  return false;
}

bool equal(const Node& a, const Node& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  if (a->op == Op::number && a->value != b->value) return false;
  return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

// ---------------------------------------------------------------------------
// Simplifying constructors used by the differentiator

std::optional<double> as_number(const Node& n) {
  if (n->op == Op::number) return n->value;
  if (n->op == Op::neg && n->lhs->op == Op::number) return -n->lhs->value;
  return std::nullopt;
}

Node fold(double v, Node fallback) { return std::isfinite(v) ? number(v) : std::move(fallback); }

Node s_neg(Node a) {
  if (auto x = as_number(a)) return number(-*x);
  if (a->op == Op::neg) return a->lhs;
  return make(Op::neg, 0.0, std::move(a));
}

Node s_add(Node a, Node b) {
  auto x = as_number(a);
  auto y = as_number(b);
  if (x && y) return fold(*x + *y, make(Op::add, 0.0, a, b));
  if (x && *x == 0.0) return b;
  if (y && *y == 0.0) return a;
  if (equal(a, b)) return make(Op::mul, 0.0, number(2.0), a);
  return make(Op::add, 0.0, std::move(a), std::move(b));
}

Node s_sub(Node a, Node b) {
  auto x = as_number(a);
  auto y = as_number(b);
  if (x && y) return fold(*x - *y, make(Op::sub, 0.0, a, b));
  if (y && *y == 0.0) return a;
  if (x && *x == 0.0) return s_neg(std::move(b));
  if (equal(a, b)) return number(0.0);
  return make(Op::sub, 0.0, std::move(a), std::move(b));
}

Node s_mul(Node a, Node b) {
  auto x = as_number(a);
  auto y = as_number(b);
  if (x && y) return fold(*x * *y, make(Op::mul, 0.0, a, b));
  if ((x && *x == 0.0) || (y && *y == 0.0)) return number(0.0);
  if (x && *x == 1.0) return b;
  if (y && *y == 1.0) return a;
  if (x && *x == -1.0) return s_neg(std::move(b));
  if (y && *y == -1.0) return s_neg(std::move(a));
  if (y && !x) return s_mul(std::move(b), std::move(a));
  // c1 * (c2 * u) -> (c1*c2) * u
  if (x && b->op == Op::mul) {
    if (auto z = as_number(b->lhs)) return s_mul(number(*x * *z), b->rhs);
  }
  return make(Op::mul, 0.0, std::move(a), std::move(b));
}

Node s_div(Node a, Node b) {
  auto x = as_number(a);
  auto y = as_number(b);
  if (x && *x == 0.0) return number(0.0);
  if (y && *y == 1.0) return a;
  if (x && y && *y != 0.0) return fold(*x / *y, make(Op::div, 0.0, a, b));
  return make(Op::div, 0.0, std::move(a), std::move(b));
}

Node s_pow(Node a, Node b) {
  auto y = as_number(b);
  if (y && *y == 0.0) return number(1.0);
  if (y && *y == 1.0) return a;
  auto x = as_number(a);
  if (x && y && *x > 0.0) return fold(std::pow(*x, *y), make(Op::pow, 0.0, a, b));
  return make(Op::pow, 0.0, std::move(a), std::move(b));
}

Node s_fn(Op op, Node a) { return make(op, 0.0, std::move(a)); }

Node diff(const Node& n) {
  switch (n->op) {
    case Op::number:
    case Op::pi:
    case Op::e:
      return number(0.0);
    case Op::var:
      return number(1.0);
    case Op::neg:
      return s_neg(diff(n->lhs));
    case Op::add:
      return s_add(diff(n->lhs), diff(n->rhs));
    case Op::sub:
      return s_sub(diff(n->lhs), diff(n->rhs));
    case Op::mul:
      return s_add(s_mul(diff(n->lhs), n->rhs), s_mul(n->lhs, diff(n->rhs)));
    case Op::div: {
      const Node& u = n->lhs;
      const Node& v = n->rhs;
      if (!depends_on_t(*v)) return s_div(diff(u), v);
      return s_div(s_sub(s_mul(diff(u), v), s_mul(u, diff(v))), s_pow(v, number(2.0)));
    }
    case Op::pow: {
      const Node& u = n->lhs;
      const Node& v = n->rhs;
      const bool base_t = depends_on_t(*u);
      const bool exp_t = depends_on_t(*v);
      if (!base_t && !exp_t) return number(0.0);
      if (!exp_t) {
        // v * u^(v-1) * u'
        Node vm1 = s_sub(v, number(1.0));
        return s_mul(s_mul(v, s_pow(u, vm1)), diff(u));
      }
      if (!base_t) return s_mul(s_mul(n, s_fn(Op::log, u)), diff(v));
      // u^v * (v' log u + v u'/u)
      return s_mul(n, s_add(s_mul(diff(v), s_fn(Op::log, u)), s_div(s_mul(v, diff(u)), u)));
    }
    case Op::sin:
      return s_mul(s_fn(Op::cos, n->lhs), diff(n->lhs));
    case Op::cos:
      return s_mul(s_neg(s_fn(Op::sin, n->lhs)), diff(n->lhs));
    case Op::tan:
      return s_div(diff(n->lhs), s_pow(s_fn(Op::cos, n->lhs), number(2.0)));
    case Op::sinh:
      return s_mul(s_fn(Op::cosh, n->lhs), diff(n->lhs));
    case Op::cosh:
      return s_mul(s_fn(Op::sinh, n->lhs), diff(n->lhs));
    case Op::tanh:
      return s_div(diff(n->lhs), s_pow(s_fn(Op::cosh, n->lhs), number(2.0)));
    case Op::exp:
      return s_mul(n, diff(n->lhs));
    case Op::log:
      return s_div(diff(n->lhs), n->lhs);
    case Op::sqrt:
      return s_div(diff(n->lhs), s_mul(number(2.0), n));
  }
  return number(0.0);
}

// ---------------------------------------------------------------------------
// Serialization

// Binding levels: 1 sum, 2 product, 3 power, 4 unary, 5 atom.
int level(const Expr& n) {
  switch (n.op) {
    case Op::add:
    case Op::sub:
      return 1;
    case Op::mul:
    case Op::div:
      return 2;
    case Op::pow:
      return 3;
    case Op::neg:
      return 4;
    case Op::number:
      return n.value < 0.0 ? 4 : 5;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void write(const Expr& n, std::string& out);

void write_child(const Expr& n, int min_level, std::string& out) {
  if (level(n) < min_level) {
    out += '(';
    write(n, out);
    out += ')';
  } else {
    write(n, out);
  }
}

void write(const Expr& n, std::string& out) {
  switch (n.op) {
    case Op::number:
      out += format_number(n.value);
      return;
    case Op::var:
      out += 't';
      return;
    case Op::pi:
      out += "pi";
      return;
    case Op::e:
      out += 'e';
      return;
    case Op::neg:
      out += '-';
      write_child(*n.lhs, 4, out);
      return;
    case Op::add:
    case Op::sub:
      write_child(*n.lhs, 1, out);
      out += n.op == Op::add ? '+' : '-';
      write_child(*n.rhs, 2, out);
      return;
    case Op::mul:
    case Op::div:
      write_child(*n.lhs, 2, out);
      out += n.op == Op::mul ? '*' : '/';
      write_child(*n.rhs, 3, out);
      return;
    case Op::pow:
      write_child(*n.lhs, 4, out);
      out += '^';
      write_child(*n.rhs, 3, out);
      return;
    default:
      out += function_name(n.op);
      out += '(';
      write(*n.lhs, out);
      out += ')';
      return;
  }
}

std::string serialize(const Node& n) {
  std::string out;
  write(*n, out);
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

TimeFn::TimeFn() : tree_(number(0.0)), source_("0") {}

TimeFn::TimeFn(std::shared_ptr<const detail::Expr> tree, std::string source, Kind kind)
    : tree_(std::move(tree)), source_(std::move(source)), kind_(kind) {}

TimeFn parse_expr(std::string_view text) {
  Parser p(text);
  Node tree = p.parse();
  return TimeFn(std::move(tree), std::string(text), TimeFn::Kind::expression);
}

TimeFn TimeFn::parse(std::string_view text) {
  const std::string_view s = trim(text);
  for (std::string_view name : {"const", "harmonic", "caldirola"}) {
    if (s.size() > name.size() + 1 && s.substr(0, name.size()) == name && s[name.size()] == '(' &&
        s.back() == ')') {
      const auto inner = trim(s.substr(name.size() + 1, s.size() - name.size() - 2));
      // The preset argument is a constant expression; reuse the grammar.
      TimeFn arg = parse_expr(inner);
      if (!arg.is_constant()) {
        throw ParseError("preset '" + std::string(name) + "' needs a constant argument", name.size() + 1);
      }
      return preset(name, {arg(0.0)});
    }
  }
  return parse_expr(text);
}

TimeFn TimeFn::constant(double c) {
  if (!std::isfinite(c)) throw InvalidArgument("TimeFn::constant: non-finite value");
  return TimeFn(number(c), format_number(c), Kind::expression);
}

TimeFn TimeFn::preset(std::string_view name, const std::vector<double>& params) {
  if (params.size() != 1) {
    throw InvalidArgument("preset '" + std::string(name) + "' takes exactly one parameter");
  }
  const double p = params[0];
  Node tree;
  if (name == "const") {
    tree = number(p);
  } else if (name == "harmonic") {
    tree = number(p * p);
  } else if (name == "caldirola") {
    tree = s_mul(number(p), make(Op::var));
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
  }
  TimeFn fn(std::move(tree), std::string(name) + "(" + format_number(p) + ")", Kind::preset);
  fn.preset_name_ = std::string(name);
  fn.preset_params_ = params;
  return fn;
}

double TimeFn::operator()(double t) const {
  if (!std::isfinite(t)) throw DomainError("TimeFn evaluated at non-finite t");
  return evaluate(*tree_, t);
}

TimeFn TimeFn::derivative() const {
  Node d = diff(tree_);
  std::string text = serialize(d);
  return TimeFn(std::move(d), std::move(text), Kind::expression);
}

std::string TimeFn::to_string() const { return serialize(tree_); }

bool TimeFn::is_constant() const { return !depends_on_t(*tree_); }

bool TimeFn::is_zero() const { return is_constant() && evaluate(*tree_, 0.0) == 0.0; }

bool operator==(const TimeFn& a, const TimeFn& b) { return equal(a.tree_, b.tree_); }

std::string_view grammar_text() {
  return "expr   := term ((\"+\"|\"-\") term)* ;\n"
         "term   := factor ((\"*\"|\"/\") factor)* ;\n"
         "factor := unary (\"^\" factor)? ;\n"
         "unary  := \"-\" unary | atom ;\n"
         "atom   := NUMBER | \"t\" | \"pi\" | \"e\" | IDENT \"(\" expr \")\" | \"(\" expr \")\" ;\n"
         "IDENT  := sin|cos|tan|sinh|cosh|tanh|exp|log|sqrt ;\n"
         "NUMBER := decimal with optional exponent, e.g. 2, 0.5, 1e-3\n"
         "\"^\" is right-associative; unary minus binds tighter than the base of \"^\" (-2^2 = 4).\n"
         "presets: const(c), harmonic(w0) = w0^2, caldirola(g) = g*t\n";
}

}  // namespace arnold
