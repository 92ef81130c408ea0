#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace arnold {

namespace detail {
struct Expr;
}

/// A real-valued function of time built from a small expression grammar.
///
/// Grammar (whitespace ignored):
///
///     expr   := term (("+"|"-") term)* ;
///     term   := factor (("*"|"/") factor)* ;
///     factor := unary ("^" factor)? ;
///     unary  := "-" unary | atom ;
///     atom   := NUMBER | "t" | "pi" | "e" | IDENT "(" expr ")" | "(" expr ")" ;
///     IDENT  := sin|cos|tan|sinh|cosh|tanh|exp|log|sqrt ;
///
/// Only differentiable primitives are allowed, so `derivative()` is total.
/// Values are immutable and can be evaluated concurrently.
class TimeFn {
 public:
  enum class Kind { expression, preset };

  /// Zero function.
  TimeFn();

  /// Parses either a preset (`const(c)`, `harmonic(w0)`, `caldirola(g)`) or a
  /// grammar expression.
  static TimeFn parse(std::string_view text);
  static TimeFn constant(double c);

  /// Named presets:
  ///   const(c)       -> c
  ///   harmonic(w0)   -> w0^2      (a squared frequency)
  ///   caldirola(g)   -> g*t       (a damping integral f(t); derivative is g)
  static TimeFn preset(std::string_view name, const std::vector<double>& params);

  /// Throws DomainError instead of producing NaN or infinity.
  double operator()(double t) const;
  double eval(double t) const { return (*this)(t); }

  /// Exact symbolic derivative with light algebraic simplification.
  TimeFn derivative() const;

  /// Canonical text; parses back to a structurally equal tree.
  std::string to_string() const;

  const std::string& source() const noexcept { return source_; }
  Kind kind() const noexcept { return kind_; }
  const std::string& preset_name() const noexcept { return preset_name_; }
  const std::vector<double>& preset_params() const noexcept { return preset_params_; }

  /// True when the tree does not reference `t`.
  bool is_constant() const;
  /// True when the function is identically zero (constant tree evaluating to 0).
  bool is_zero() const;

  /// Structural equality of the expression trees.
  friend bool operator==(const TimeFn& a, const TimeFn& b);

 private:
  explicit TimeFn(std::shared_ptr<const detail::Expr> tree, std::string source, Kind kind);

  std::shared_ptr<const detail::Expr> tree_;
  std::string source_;
  Kind kind_ = Kind::expression;
  std::string preset_name_;
  std::vector<double> preset_params_;

  friend TimeFn parse_expr(std::string_view text);
};

/// Parses grammar text only (no presets).
TimeFn parse_expr(std::string_view text);

inline double eval(const TimeFn& fn, double t) { return fn(t); }
inline TimeFn differentiate(const TimeFn& fn) { return fn.derivative(); }

/// The grammar as printed by `arnold print-grammar`.
std::string_view grammar_text();

}  // namespace arnold
