#include "nlfb/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "nlfb/errors.hpp"

namespace nlfb {

class ExprParser {
 public:
  ExprParser(Expr& out, const std::string& src, int dim, const std::map<std::string, double>& params)
      : out_(out), src_(src), dim_(dim), params_(params) {}

  int parse() {
    const int root = expression();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  using Op = Expr::Op;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::ParseError, "'" + src_ + "' at " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int push(Expr::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int binary(Op op, int a, int b) {
    Expr::Node n;
    n.op = op;
    n.lhs = a;
    n.rhs = b;
    return push(n);
  }

  int expression() {
    int lhs = term();
    for (;;) {
      if (accept('+')) lhs = binary(Op::Add, lhs, term());
      else if (accept('-')) lhs = binary(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      if (accept('*')) lhs = binary(Op::Mul, lhs, unary());
      else if (accept('/')) lhs = binary(Op::Div, lhs, unary());
      else return lhs;
    }
  }

  int unary() {
    if (accept('-')) return binary(Op::Neg, unary(), -1);
    if (accept('+')) return unary();
    return power();
  }

  int power() {
    const int base = primary();
    if (accept('^')) return binary(Op::Pow, base, unary());
    return base;
  }

  int primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (accept('(')) {
      const int inner = expression();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<size_t>(end - begin);
      Expr::Node n;
      n.value = v;
      return push(n);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      const std::string name = src_.substr(start, pos_ - start);
      if (name == "ln" || name == "exp") {
        if (!accept('(')) fail("expected '(' after " + name);
        const int arg = expression();
        if (!accept(')')) fail("expected ')'");
        return binary(name == "ln" ? Op::Ln : Op::Exp, arg, -1);
      }
      if (auto it = params_.find(name); it != params_.end()) {
        Expr::Node n;
        n.value = it->second;
        return push(n);
      }
      if (name.size() > 1 && name[0] == 'u' &&
          name.find_first_not_of("0123456789", 1) == std::string::npos) {
        const int idx = std::stoi(name.substr(1));
        if (idx < 1 || idx > dim_) fail("state variable " + name + " out of range");
        Expr::Node n;
        n.op = Op::Var;
        n.var = idx - 1;
        return push(n);
      }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr& out_;
  const std::string& src_;
  int dim_;
  const std::map<std::string, double>& params_;
  size_t pos_ = 0;
};

Expr Expr::compile(const std::string& source, int state_dim, const std::map<std::string, double>& params) {
  Expr e;
  e.source_ = source;
  ExprParser parser(e, e.source_, state_dim, params);
  e.root_ = parser.parse();
  return e;
}

double Expr::eval_node(int idx, std::span<const double> u) const {
  const Node& n = nodes_[static_cast<size_t>(idx)];
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return u[static_cast<size_t>(n.var)];
    case Op::Neg: return -eval_node(n.lhs, u);
    case Op::Add: return eval_node(n.lhs, u) + eval_node(n.rhs, u);
    case Op::Sub: return eval_node(n.lhs, u) - eval_node(n.rhs, u);
    case Op::Mul: return eval_node(n.lhs, u) * eval_node(n.rhs, u);
    case Op::Div: return eval_node(n.lhs, u) / eval_node(n.rhs, u);
    case Op::Pow: return std::pow(eval_node(n.lhs, u), eval_node(n.rhs, u));
    case Op::Ln: return std::log(eval_node(n.lhs, u));
    case Op::Exp: return std::exp(eval_node(n.lhs, u));
  }
  return 0.0;
}

}  // namespace nlfb
