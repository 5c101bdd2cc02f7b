#include "llmc/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

namespace llmc::dsl {

SyntaxError::SyntaxError(std::size_t offset, const std::string& message)
    : Error("syntax error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset),
      message_(message) {}

UnknownIdentifier::UnknownIdentifier(std::size_t offset, const std::string& name)
    : SyntaxError(offset, "unknown identifier '" + name + "'"), name_(name) {}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "token";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  Expr run() {
    const auto root = expr();
    if (tok_.kind != Tok::End) {
      throw SyntaxError(tok_.offset, std::string("expected operator or end of input, found ") +
                                         describe(tok_.kind));
    }
    return std::move(builder_).finish(root);
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    switch (c) {
      case '+': tok_.kind = Tok::Plus; break;
      case '-': tok_.kind = Tok::Minus; break;
      case '*': tok_.kind = Tok::Star; break;
      case '/': tok_.kind = Tok::Slash; break;
      case '^': tok_.kind = Tok::Caret; break;
      case '(': tok_.kind = Tok::LParen; break;
      case ')': tok_.kind = Tok::RParen; break;
      case ',': tok_.kind = Tok::Comma; break;
      default:
        throw SyntaxError(pos_, std::string("unexpected character '") + c + "'");
    }
    tok_.text = src_.substr(pos_, 1);
    ++pos_;
  }

  void lex_number() {
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    };
    digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      digits();
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp = end + 1;
      if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
      if (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) {
        end = exp;
        digits();
      }
    }
    double value = 0.0;
    const auto* first = src_.data() + pos_;
    const auto* last = src_.data() + end;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      throw SyntaxError(pos_, "malformed number '" + std::string(first, last) + "'");
    }
    tok_.kind = Tok::Number;
    tok_.text = src_.substr(pos_, end - pos_);
    tok_.number = value;
    pos_ = end;
  }

  void expect(Tok kind) {
    if (tok_.kind != kind) {
      throw SyntaxError(tok_.offset, std::string("expected ") + describe(kind) + ", found " +
                                         describe(tok_.kind));
    }
    advance();
  }

  std::int32_t expr() {
    auto lhs = term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const Op op = tok_.kind == Tok::Plus ? Op::Add : Op::Sub;
      advance();
      lhs = builder_.binary(op, lhs, term());
    }
    return lhs;
  }

  std::int32_t term() {
    auto lhs = unary();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const Op op = tok_.kind == Tok::Star ? Op::Mul : Op::Div;
      advance();
      lhs = builder_.binary(op, lhs, unary());
    }
    return lhs;
  }

  std::int32_t unary() {
    if (tok_.kind == Tok::Minus) {
      advance();
      return builder_.unary(Op::Neg, unary());
    }
    return power();
  }

  std::int32_t power() {
    const auto base = primary();
    if (tok_.kind == Tok::Caret) {
      advance();
      return builder_.binary(Op::Pow, base, unary());
    }
    return base;
  }

  double literal() {
    bool negative = false;
    if (tok_.kind == Tok::Minus) {
      negative = true;
      advance();
    }
    if (tok_.kind != Tok::Number) {
      throw SyntaxError(tok_.offset, std::string("expected numeric literal, found ") +
                                         describe(tok_.kind));
    }
    const double v = tok_.number;
    advance();
    return negative ? -v : v;
  }

  std::int32_t primary() {
    switch (tok_.kind) {
      case Tok::Number: {
        const double v = tok_.number;
        advance();
        return builder_.number(v);
      }
      case Tok::LParen: {
        advance();
        const auto inner = expr();
        expect(Tok::RParen);
        return inner;
      }
      case Tok::Ident: return identifier();
      default:
        throw SyntaxError(tok_.offset,
                          std::string("expected expression, found ") + describe(tok_.kind));
    }
  }

  std::int32_t identifier() {
    const std::string name(tok_.text);
    const std::size_t at = tok_.offset;
    if (name == "x") {
      advance();
      return builder_.variable();
    }
    static constexpr std::array<std::pair<std::string_view, Op>, 4> functions{{
        {"exp", Op::Exp},
        {"ln", Op::Ln},
        {"sqrt", Op::Sqrt},
        {"abs", Op::Abs},
    }};
    for (const auto& [fname, op] : functions) {
      if (name == fname) {
        advance();
        expect(Tok::LParen);
        const auto arg = expr();
        expect(Tok::RParen);
        return builder_.unary(op, arg);
      }
    }
    if (name == "indicator") {
      advance();
      expect(Tok::LParen);
      const double lo = literal();
      expect(Tok::Comma);
      const std::size_t hi_at = tok_.offset;
      const double hi = literal();
      expect(Tok::RParen);
      if (!(lo < hi)) {
        throw SyntaxError(hi_at, "indicator bounds must satisfy a < b");
      }
      return builder_.indicator(lo, hi);
    }
    throw UnknownIdentifier(at, name);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
  Builder builder_;
};

double eval_node(std::span<const Node> nodes, std::int32_t i, double x) {
  const Node& n = nodes[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::Variable: return x;
    case Op::Add: return eval_node(nodes, n.lhs, x) + eval_node(nodes, n.rhs, x);
    case Op::Sub: return eval_node(nodes, n.lhs, x) - eval_node(nodes, n.rhs, x);
    case Op::Mul: return eval_node(nodes, n.lhs, x) * eval_node(nodes, n.rhs, x);
    case Op::Div: return eval_node(nodes, n.lhs, x) / eval_node(nodes, n.rhs, x);
    case Op::Pow: {
      const double base = eval_node(nodes, n.lhs, x);
      const double expo = eval_node(nodes, n.rhs, x);
      if (base == 0.0 && expo < 0.0) throw EvaluationError("0 raised to a negative power");
      return std::pow(base, expo);
    }
    case Op::Neg: return -eval_node(nodes, n.lhs, x);
    case Op::Exp: return std::exp(eval_node(nodes, n.lhs, x));
    case Op::Ln: {
      const double a = eval_node(nodes, n.lhs, x);
      if (!(a > 0.0)) throw EvaluationError("ln of non-positive argument");
      return std::log(a);
    }
    case Op::Sqrt: {
      const double a = eval_node(nodes, n.lhs, x);
      if (a < 0.0) throw EvaluationError("sqrt of negative argument");
      return std::sqrt(a);
    }
    case Op::Abs: return std::abs(eval_node(nodes, n.lhs, x));
    case Op::Indicator: return (x > n.value && x < n.upper) ? 1.0 : 0.0;
  }
  return 0.0;
}

int level(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void append_number(std::string& out, double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

void print_node(std::span<const Node> nodes, std::int32_t i, std::string& out) {
  const Node& n = nodes[static_cast<std::size_t>(i)];
  auto child = [&](std::int32_t c, bool paren) {
    if (paren) out += '(';
    print_node(nodes, c, out);
    if (paren) out += ')';
  };
  auto lvl = [&](std::int32_t c) { return level(nodes[static_cast<std::size_t>(c)].op); };
  switch (n.op) {
    case Op::Number: append_number(out, n.value); return;
    case Op::Variable: out += 'x'; return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = level(n.op);
      child(n.lhs, lvl(n.lhs) < p);
      out += n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? " * " : " / ";
      child(n.rhs, lvl(n.rhs) <= p);
      return;
    }
    case Op::Pow:
      child(n.lhs, lvl(n.lhs) <= level(Op::Pow));
      out += '^';
      child(n.rhs, lvl(n.rhs) < level(Op::Neg));
      return;
    case Op::Neg:
      out += '-';
      child(n.lhs, lvl(n.lhs) < level(Op::Neg));
      return;
    case Op::Exp: out += "exp("; break;
    case Op::Ln: out += "ln("; break;
    case Op::Sqrt: out += "sqrt("; break;
    case Op::Abs: out += "abs("; break;
    case Op::Indicator:
      out += "indicator(";
      append_number(out, n.value);
      out += ", ";
      append_number(out, n.upper);
      out += ')';
      return;
  }
  print_node(nodes, n.lhs, out);
  out += ')';
}

bool same_node(std::span<const Node> a, std::int32_t i, std::span<const Node> b, std::int32_t j) {
  if ((i < 0) != (j < 0)) return false;
  if (i < 0) return true;
  const Node& p = a[static_cast<std::size_t>(i)];
  const Node& q = b[static_cast<std::size_t>(j)];
  if (p.op != q.op || p.value != q.value || p.upper != q.upper) return false;
  return same_node(a, p.lhs, b, q.lhs) && same_node(a, p.rhs, b, q.rhs);
}

}  // namespace

Expr::Expr(std::vector<Node> nodes, std::int32_t root) : nodes_(std::move(nodes)), root_(root) {}

double Expr::evaluate_checked(double x) const {
  if (root_ < 0) throw EvaluationError("empty expression");
  const double v = eval_node(nodes_, root_, x);
  if (!std::isfinite(v)) throw EvaluationError("non-finite result");
  return v;
}

bool Expr::same_structure(const Expr& other) const {
  return same_node(nodes_, root_, other.nodes_, other.root_);
}

std::string Expr::to_string() const {
  std::string out;
  if (root_ >= 0) print_node(nodes_, root_, out);
  return out;
}

Expr parse(std::string_view source) { return Parser(source).run(); }

double evaluate(const Expr& e, double x) { return e(x); }

std::vector<double> breakpoints_of(const Expr& e) {
  std::vector<double> out;
  for (const auto& n : e.nodes()) {
    if (n.op == Op::Indicator) {
      out.push_back(n.value);
      out.push_back(n.upper);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::int32_t Builder::number(double v) {
  nodes_.push_back(Node{Op::Number, v, 0.0, -1, -1});
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

std::int32_t Builder::variable() {
  nodes_.push_back(Node{Op::Variable, 0.0, 0.0, -1, -1});
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

std::int32_t Builder::binary(Op op, std::int32_t lhs, std::int32_t rhs) {
  nodes_.push_back(Node{op, 0.0, 0.0, lhs, rhs});
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

std::int32_t Builder::unary(Op op, std::int32_t arg) {
  nodes_.push_back(Node{op, 0.0, 0.0, arg, -1});
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

std::int32_t Builder::indicator(double lo, double hi) {
  nodes_.push_back(Node{Op::Indicator, lo, hi, -1, -1});
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

Expr Builder::finish(std::int32_t root) && { return Expr(std::move(nodes_), root); }

}  // namespace llmc::dsl
