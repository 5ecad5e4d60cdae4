#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace nlfb {

/// Compiled arithmetic expression over state variables u1..um and named
/// parameters. Grammar: + - * / ^ (right-associative), unary minus,
/// parentheses, ln(.) and exp(.), numeric literals. Parameters are folded
/// to constants at compile time.
class Expr {
 public:
  /// Throws Error{ParseError} with the offending position.
  static Expr compile(const std::string& source, int state_dim, const std::map<std::string, double>& params);

  double eval(std::span<const double> u) const { return eval_node(root_, u); }
  const std::string& source() const noexcept { return source_; }

 private:
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Ln, Exp };
  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int var = -1;
    int lhs = -1, rhs = -1;
  };
  friend class ExprParser;

  double eval_node(int idx, std::span<const double> u) const;

  std::string source_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace nlfb
