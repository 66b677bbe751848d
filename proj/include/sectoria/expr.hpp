#pragma once

// Expression language for interpolating functions phi(z1, ..., zN).
//
// Grammar (standard precedence, '^' binds tighter than unary minus and is
// right-associative, no implicit multiplication):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'i' | 'pi' | 'e' | 'z'<k>
//            | fn '(' expr ')' | '(' expr ')'
//   fn      := exp | sin | cos | sinh | cosh | log
//
// `log` and non-integer powers use the principal branch, Im log in (-pi, pi].

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "sectoria/error.hpp"

namespace sectoria {

using cplx = std::complex<double>;

enum class Op : std::uint8_t {
  literal,
  variable,
  add,
  sub,
  mul,
  div,
  pow,
  neg,
  exp,
  sin,
  cos,
  sinh,
  cosh,
  log,
};

inline bool is_function(Op op) { return op >= Op::exp; }
inline bool is_binary(Op op) { return op >= Op::add && op <= Op::pow; }

/// One node of the expression arena. Children always precede their parent.
struct ExprNode {
  Op op = Op::literal;
  cplx value{};   // literal
  int var = 0;    // variable, 0-based
  int lhs = -1;   // unary operand / left child
  int rhs = -1;   // right child
};

namespace detail {

inline std::string format_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Principal logarithm with the branch cut approached from above, so the
// argument lies in (-pi, pi] even for a signed-zero imaginary part.
inline cplx principal_log(cplx w) {
  if (w.imag() == 0.0) w = cplx(w.real(), 0.0);
  return std::log(w);
}

inline cplx int_power(cplx base, long long n) {
  if (n < 0) {
    if (base == cplx(0.0, 0.0))
      throw Error(ErrorKind::singularity, "singularity: zero raised to a negative power");
    return 1.0 / int_power(base, -n);
  }
  cplx result(1.0, 0.0);
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

inline cplx principal_power(cplx base, cplx expo) {
  if (expo.imag() == 0.0 && std::abs(expo.real()) <= 1024.0 &&
      expo.real() == std::nearbyint(expo.real())) {
    return int_power(base, static_cast<long long>(expo.real()));
  }
  if (base == cplx(0.0, 0.0)) {
    if (expo.real() > 0.0) return cplx(0.0, 0.0);
    throw Error(ErrorKind::singularity, "singularity: zero raised to a power with Re <= 0");
  }
  return std::exp(expo * principal_log(base));
}

}  // namespace detail

/// Immutable parsed expression over `nvars` complex variables.
class InterpolantExpr {
 public:
  /// The constant 0 in one variable.
  InterpolantExpr() : nodes_{ExprNode{}} {}

  static InterpolantExpr parse(std::string_view src, int nvars);

  /// Builds an expression from an arena; validates topology and variable range.
  static InterpolantExpr from_nodes(std::vector<ExprNode> nodes, int nvars) {
    if (nvars < 1) throw Error(ErrorKind::input, "nvars must be at least 1");
    if (nodes.empty()) throw Error(ErrorKind::input, "empty expression");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& nd = nodes[i];
      const int idx = static_cast<int>(i);
      if (nd.op == Op::variable && (nd.var < 0 || nd.var >= nvars))
        throw Error(ErrorKind::variable_range,
                    "variable z" + std::to_string(nd.var + 1) + " out of range", nd.var + 1);
      const bool unary = nd.op == Op::neg || is_function(nd.op);
      if ((unary || is_binary(nd.op)) && (nd.lhs < 0 || nd.lhs >= idx))
        throw Error(ErrorKind::input, "malformed expression arena");
      if (is_binary(nd.op) && (nd.rhs < 0 || nd.rhs >= idx))
        throw Error(ErrorKind::input, "malformed expression arena");
    }
    InterpolantExpr e;
    e.nodes_ = std::move(nodes);
    e.nvars_ = nvars;
    return e;
  }

  int nvars() const noexcept { return nvars_; }
  const std::vector<ExprNode>& nodes() const noexcept { return nodes_; }
  int root() const noexcept { return static_cast<int>(nodes_.size()) - 1; }

  cplx eval(std::span<const cplx> zeta) const {
    if (static_cast<int>(zeta.size()) != nvars_)
      throw Error(ErrorKind::dimension, "argument length does not match nvars");
    const cplx v = eval_node(root(), zeta);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorKind::singularity, "singularity: non-finite value");
    return v;
  }

  cplx eval(std::initializer_list<cplx> zeta) const {
    return eval(std::span<const cplx>(zeta.begin(), zeta.size()));
  }

  /// Fully parenthesised canonical form; re-parses to an equal tree.
  std::string print() const { return print_node(root()); }

  /// Replaces each variable j by `mapping[j]`: a new 0-based index, or the
  /// literal 0 when empty. Used to restrict phi to coordinate subspaces.
  InterpolantExpr substitute(const std::vector<std::optional<int>>& mapping, int new_nvars) const {
    std::vector<ExprNode> out = nodes_;
    for (auto& nd : out) {
      if (nd.op != Op::variable) continue;
      const auto& target = mapping.at(static_cast<std::size_t>(nd.var));
      if (target) {
        nd.var = *target;
      } else {
        nd = ExprNode{};
      }
    }
    return from_nodes(std::move(out), new_nvars);
  }

  friend bool operator==(const InterpolantExpr& a, const InterpolantExpr& b) {
    return a.nvars_ == b.nvars_ && same_tree(a, a.root(), b, b.root());
  }

 private:
  static bool same_tree(const InterpolantExpr& a, int i, const InterpolantExpr& b, int j) {
    const auto& x = a.nodes_[static_cast<std::size_t>(i)];
    const auto& y = b.nodes_[static_cast<std::size_t>(j)];
    if (x.op != y.op) return false;
    switch (x.op) {
      case Op::literal: return x.value == y.value;
      case Op::variable: return x.var == y.var;
      default: break;
    }
    if (!same_tree(a, x.lhs, b, y.lhs)) return false;
    return !is_binary(x.op) || same_tree(a, x.rhs, b, y.rhs);
  }

  cplx eval_node(int i, std::span<const cplx> zeta) const {
    const auto& nd = nodes_[static_cast<std::size_t>(i)];
    switch (nd.op) {
      case Op::literal: return nd.value;
      case Op::variable: return zeta[static_cast<std::size_t>(nd.var)];
      case Op::add: return eval_node(nd.lhs, zeta) + eval_node(nd.rhs, zeta);
      case Op::sub: return eval_node(nd.lhs, zeta) - eval_node(nd.rhs, zeta);
      case Op::mul: return eval_node(nd.lhs, zeta) * eval_node(nd.rhs, zeta);
      case Op::div: {
        const cplx num = eval_node(nd.lhs, zeta);
        const cplx den = eval_node(nd.rhs, zeta);
        if (den == cplx(0.0, 0.0)) throw Error(ErrorKind::singularity, "singularity: division by zero");
        return num / den;
      }
      case Op::pow: return detail::principal_power(eval_node(nd.lhs, zeta), eval_node(nd.rhs, zeta));
      case Op::neg: return -eval_node(nd.lhs, zeta);
      case Op::exp: return std::exp(eval_node(nd.lhs, zeta));
      case Op::sin: return std::sin(eval_node(nd.lhs, zeta));
      case Op::cos: return std::cos(eval_node(nd.lhs, zeta));
      case Op::sinh: return std::sinh(eval_node(nd.lhs, zeta));
      case Op::cosh: return std::cosh(eval_node(nd.lhs, zeta));
      case Op::log: {
        const cplx w = eval_node(nd.lhs, zeta);
        if (w == cplx(0.0, 0.0)) throw Error(ErrorKind::singularity, "singularity: log of zero");
        return detail::principal_log(w);
      }
    }
    return {};
  }

  static std::string print_real(double x) {
    if (std::signbit(x)) return "(-" + detail::format_real(-x) + ")";
    return detail::format_real(x);
  }

  std::string print_node(int i) const {
    const auto& nd = nodes_[static_cast<std::size_t>(i)];
    switch (nd.op) {
      case Op::literal: {
        const double re = nd.value.real(), im = nd.value.imag();
        if (im == 0.0) return print_real(re);
        const std::string imag_part = im == 1.0 ? "i" : "(" + print_real(im) + "*i)";
        if (re == 0.0 && !std::signbit(re)) return imag_part;
        return "(" + print_real(re) + "+" + imag_part + ")";
      }
      case Op::variable: return "z" + std::to_string(nd.var + 1);
      case Op::neg: return "(-" + print_node(nd.lhs) + ")";
      case Op::exp: return "exp(" + print_node(nd.lhs) + ")";
      case Op::sin: return "sin(" + print_node(nd.lhs) + ")";
      case Op::cos: return "cos(" + print_node(nd.lhs) + ")";
      case Op::sinh: return "sinh(" + print_node(nd.lhs) + ")";
      case Op::cosh: return "cosh(" + print_node(nd.lhs) + ")";
      case Op::log: return "log(" + print_node(nd.lhs) + ")";
      default: break;
    }
    static constexpr char symbols[] = {'+', '-', '*', '/', '^'};
    const char sym = symbols[static_cast<int>(nd.op) - static_cast<int>(Op::add)];
    return "(" + print_node(nd.lhs) + sym + print_node(nd.rhs) + ")";
  }

  std::vector<ExprNode> nodes_;
  int nvars_ = 1;

  friend class ExprParser;
};

/// Recursive-descent parser producing the node arena in post-order.
class ExprParser {
 public:
  ExprParser(std::string_view src, int nvars) : src_(src), nvars_(nvars) {}

  InterpolantExpr run() {
    if (nvars_ < 1) throw Error(ErrorKind::input, "nvars must be at least 1");
    skip_space();
    parse_expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected input");
    return InterpolantExpr::from_nodes(std::move(nodes_), nvars_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw Error(ErrorKind::syntax, "syntax error at offset " + std::to_string(at + 1) + ": " + msg,
                at + 1);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }

  void skip_space() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r'))
      ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  int push(ExprNode nd) {
    nodes_.push_back(nd);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    while (peek('+') || peek('-')) {
      const Op op = src_[pos_] == '+' ? Op::add : Op::sub;
      ++pos_;
      const int rhs = parse_term();
      lhs = push({op, {}, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_term() {
    int lhs = parse_unary();
    while (peek('*') || peek('/')) {
      const Op op = src_[pos_] == '*' ? Op::mul : Op::div;
      ++pos_;
      const int rhs = parse_unary();
      lhs = push({op, {}, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_unary() {
    if (peek('-')) {
      ++pos_;
      const int operand = parse_unary();
      return push({Op::neg, {}, 0, operand, -1});
    }
    if (peek('+')) {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (peek('^')) {
      ++pos_;
      const int expo = parse_unary();
      return push({Op::pow, {}, 0, base, expo});
    }
    return base;
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  int parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ - start == 1 && src_[start] == '.') fail("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && is_digit(src_[look])) {
        pos_ = look;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) fail("malformed number", start);
    return push({Op::literal, cplx(value, 0.0), 0, -1, -1});
  }

  int parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = parse_expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (!is_alpha(c)) fail(std::string("unexpected character '") + c + "'");

    const std::size_t start = pos_;
    while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, Op> functions[] = {
        {"exp", Op::exp}, {"sin", Op::sin},   {"cos", Op::cos},
        {"sinh", Op::sinh}, {"cosh", Op::cosh}, {"log", Op::log},
    };
    for (const auto& [fname, op] : functions) {
      if (name != fname) continue;
      if (!peek('(')) fail("expected '(' after function name");
      ++pos_;
      const int arg = parse_expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return push({op, {}, 0, arg, -1});
    }
    if (name == "i") return push({Op::literal, cplx(0.0, 1.0), 0, -1, -1});
    if (name == "pi") return push({Op::literal, cplx(std::numbers::pi, 0.0), 0, -1, -1});
    if (name == "e") return push({Op::literal, cplx(std::numbers::e, 0.0), 0, -1, -1});
    if (name.size() >= 2 && name[0] == 'z' &&
        name.substr(1).find_first_not_of("0123456789") == std::string_view::npos) {
      long index = 0;
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (res.ec != std::errc() || index < 1 || index > nvars_)
        throw Error(ErrorKind::variable_range,
                    "variable " + std::string(name) + " out of range 1.." + std::to_string(nvars_),
                    start + 1);
      return push({Op::variable, {}, static_cast<int>(index - 1), -1, -1});
    }
    throw Error(ErrorKind::unknown_identifier,
                "unknown identifier '" + std::string(name) + "' at offset " + std::to_string(start + 1),
                start + 1);
  }

  std::string_view src_;
  int nvars_;
  std::size_t pos_ = 0;
  std::vector<ExprNode> nodes_;
};

inline InterpolantExpr InterpolantExpr::parse(std::string_view src, int nvars) {
  return ExprParser(src, nvars).run();
}

}  // namespace sectoria
