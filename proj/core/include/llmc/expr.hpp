#pragma once

// A small expression language for densities in one variable `x`.
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := '-' unary | power
//   power   := primary [ '^' unary ]            (right-associative)
//   primary := number | 'x' | '(' expr ')'
//            | ('exp' | 'ln' | 'sqrt' | 'abs') '(' expr ')'
//            | 'indicator' '(' literal ',' literal ')'
//   literal := ['-'] number
//
// indicator(a, b) is 1 on the open interval (a, b) and 0 elsewhere; its
// endpoints must be literals so that they can be extracted as breakpoints.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "llmc/error.hpp"

namespace llmc::dsl {

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message);
  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  UnknownIdentifier(std::size_t offset, const std::string& name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// ln/sqrt outside their domain, 0 raised to a negative power, or a
/// non-finite result.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

enum class Op : std::uint8_t {
  Number,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Exp,
  Ln,
  Sqrt,
  Abs,
  Indicator,
};

struct Node {
  Op op = Op::Number;
  double value = 0.0;  // Number literal, or indicator lower bound
  double upper = 0.0;  // indicator upper bound
  std::int32_t lhs = -1;
  std::int32_t rhs = -1;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Immutable AST stored as a flat node array; `root` indexes into `nodes`.
class Expr {
 public:
  Expr() = default;
  Expr(std::vector<Node> nodes, std::int32_t root);

  double operator()(double x) const { return evaluate_checked(x); }

  std::span<const Node> nodes() const { return nodes_; }
  std::int32_t root() const { return root_; }
  bool empty() const { return nodes_.empty(); }

  /// Structural equality: same tree shape, operators and literal values.
  bool same_structure(const Expr& other) const;

  std::string to_string() const;

 private:
  double evaluate_checked(double x) const;

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

Expr parse(std::string_view source);

double evaluate(const Expr& e, double x);

/// Sorted, deduplicated indicator endpoints.
std::vector<double> breakpoints_of(const Expr& e);

/// Tree-building helpers, mainly for generators in tests.
class Builder {
 public:
  std::int32_t number(double v);
  std::int32_t variable();
  std::int32_t binary(Op op, std::int32_t lhs, std::int32_t rhs);
  std::int32_t unary(Op op, std::int32_t arg);
  std::int32_t indicator(double lo, double hi);
  Expr finish(std::int32_t root) &&;

 private:
  std::vector<Node> nodes_;
};

}  // namespace llmc::dsl
