#include "monodtn/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace monodtn {

struct Expression::Node {
  enum class Op { Num, X, Y, R, Theta, Neg, Add, Sub, Mul, Div, Pow, Call } op = Op::Num;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(double x, double y) const {
    switch (op) {
      case Op::Num: return value;
      case Op::X: return x;
      case Op::Y: return y;
      case Op::R: return std::hypot(x, y);
      case Op::Theta: return std::atan2(y, x);
      case Op::Neg: return -a->eval(x, y);
      case Op::Add: return a->eval(x, y) + b->eval(x, y);
      case Op::Sub: return a->eval(x, y) - b->eval(x, y);
      case Op::Mul: return a->eval(x, y) * b->eval(x, y);
      case Op::Div: return a->eval(x, y) / b->eval(x, y);
      case Op::Pow: {
        const double base = a->eval(x, y);
        // integer powers through multiplication so x^2 is exact
        if (b->op == Op::Num && b->value == 2.0) return base * base;
        return std::pow(base, b->eval(x, y));
      }
      case Op::Call: return fn(a->eval(x, y));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("bad expression \"" + s_ + "\": " + what + " at offset " +
                                std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool starts(const char* lit) {
    skip();
    return s_.compare(pos_, std::char_traits<char>::length(lit), lit) == 0;
  }

  bool eat(const char* lit) {
    if (!starts(lit)) return false;
    pos_ += std::char_traits<char>::length(lit);
    return true;
  }

  // Can the next token begin a primary? Drives implicit multiplication.
  bool primary_ahead() {
    skip();
    if (pos_ >= s_.size()) return false;
    const unsigned char c = s_[pos_];
    return std::isalpha(c) || c == '(' || std::isdigit(c) || c == '.' || starts("\xce\xb8") ||
           starts("\xcf\x80");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat("+")) lhs = make(Op::Add, lhs, term());
      else if (eat("-")) lhs = make(Op::Sub, lhs, term());
      else if (eat("\xe2\x88\x92")) lhs = make(Op::Sub, lhs, term());  // unicode minus
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat("*") || eat("\xc2\xb7")) lhs = make(Op::Mul, lhs, unary());
      else if (eat("/")) lhs = make(Op::Div, lhs, unary());
      else if (primary_ahead()) lhs = make(Op::Mul, lhs, power());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat("-") || eat("\xe2\x88\x92")) return make(Op::Neg, unary());
    if (eat("+")) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat("^")) return make(Op::Pow, base, unary());
    if (eat("\xc2\xb2")) return make(Op::Pow, base, number(2.0));
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat("(")) {
      NodePtr e = expr();
      if (!eat(")")) fail("missing ')'");
      return e;
    }
    const unsigned char c = s_[pos_];
    if (std::isdigit(c) || c == '.') return parse_number();
    if (eat("\xce\xb8")) return make(Op::Theta);
    if (eat("\xcf\x80")) return number(std::numbers::pi);
    if (std::isalpha(c)) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return make(Op::X);
      if (id == "y") return make(Op::Y);
      if (id == "r") return make(Op::R);
      if (id == "theta") return make(Op::Theta);
      if (id == "pi") return number(std::numbers::pi);
      double (*fn)(double) = nullptr;
      if (id == "sin") fn = [](double v) { return std::sin(v); };
      else if (id == "cos") fn = [](double v) { return std::cos(v); };
      else if (id == "tan") fn = [](double v) { return std::tan(v); };
      else if (id == "exp") fn = [](double v) { return std::exp(v); };
      else if (id == "log") fn = [](double v) { return std::log(v); };
      else if (id == "sqrt") fn = [](double v) { return std::sqrt(v); };
      else if (id == "abs") fn = [](double v) { return std::abs(v); };
      if (!fn) {
        pos_ = start;
        fail("unknown identifier \"" + id + "\"");
      }
      if (!eat("(")) fail("expected '(' after " + id);
      NodePtr arg = expr();
      if (!eat(")")) fail("missing ')'");
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Call;
      n->fn = fn;
      n->a = std::move(arg);
      return n;
    }
    fail("unexpected character");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    // Exponent only when digits follow, so "2exp(y)" stays 2*exp(y).
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        digits();
      }
    }
    const std::string tok = s_.substr(start, pos_ - start);
    if (tok == ".") fail("bad number");
    return number(std::stod(tok));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text).run();
  return e;
}

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

}  // namespace monodtn
