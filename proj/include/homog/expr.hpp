#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace homog {

// Tiny arithmetic grammar for analytic load expressions over (x, y, z, t):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?
//   unary  := '-' unary | primary
//   primary:= number | ident | ident '(' expr ')' | '(' expr ')'
// Identifiers: x y z t pi, functions sin cos exp sqrt abs.
class Expr {
 public:
  using Fn = std::function<double(const Eigen::VectorXd&, double)>;

  static Expr parse(const std::string& text) {
    Parser p{text, 0};
    Expr e;
    e.fn_ = p.expr();
    p.skip_ws();
    if (p.pos != text.size())
      throw std::invalid_argument("expression: trailing input at column " +
                                  std::to_string(p.pos + 1));
    e.text_ = text;
    return e;
  }

  double operator()(const Eigen::VectorXd& x, double t) const { return fn_(x, t); }
  const std::string& text() const { return text_; }

 private:
  struct Parser {
    const std::string& s;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) { ++pos; return true; }
      return false;
    }

    [[noreturn]] void fail(const std::string& what) {
      throw std::invalid_argument("expression: " + what + " at column " + std::to_string(pos + 1));
    }

    Fn expr() {
      Fn lhs = term();
      for (;;) {
        if (eat('+')) {
          Fn rhs = term();
          lhs = [lhs, rhs](const Eigen::VectorXd& x, double t) { return lhs(x, t) + rhs(x, t); };
        } else if (eat('-')) {
          Fn rhs = term();
          lhs = [lhs, rhs](const Eigen::VectorXd& x, double t) { return lhs(x, t) - rhs(x, t); };
        } else {
          return lhs;
        }
      }
    }

    Fn term() {
      Fn lhs = factor();
      for (;;) {
        if (eat('*')) {
          Fn rhs = factor();
          lhs = [lhs, rhs](const Eigen::VectorXd& x, double t) { return lhs(x, t) * rhs(x, t); };
        } else if (eat('/')) {
          Fn rhs = factor();
          lhs = [lhs, rhs](const Eigen::VectorXd& x, double t) { return lhs(x, t) / rhs(x, t); };
        } else {
          return lhs;
        }
      }
    }

    Fn factor() {
      Fn base = unary();
      if (eat('^')) {
        Fn exp = factor();  // right-associative
        return [base, exp](const Eigen::VectorXd& x, double t) {
          return std::pow(base(x, t), exp(x, t));
        };
      }
      return base;
    }

    Fn unary() {
      if (eat('-')) {
        Fn inner = unary();
        return [inner](const Eigen::VectorXd& x, double t) { return -inner(x, t); };
      }
      return primary();
    }

    Fn primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of input");
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double v;
        try {
          v = std::stod(s.substr(pos), &used);
        } catch (const std::exception&) {
          fail("malformed number");
        }
        pos += used;
        return [v](const Eigen::VectorXd&, double) { return v; };
      }
      if (c == '(') {
        ++pos;
        Fn inner = expr();
        if (!eat(')')) fail("expected ')'");
        return inner;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
        const std::string name = s.substr(start, pos - start);
        if (name == "x") return [](const Eigen::VectorXd& x, double) { return x[0]; };
        if (name == "y")
          return [](const Eigen::VectorXd& x, double) { return x.size() > 1 ? x[1] : 0.0; };
        if (name == "z")
          return [](const Eigen::VectorXd& x, double) { return x.size() > 2 ? x[2] : 0.0; };
        if (name == "t") return [](const Eigen::VectorXd&, double t) { return t; };
        if (name == "pi") return [](const Eigen::VectorXd&, double) { return M_PI; };
        if (eat('(')) {
          Fn arg = expr();
          if (!eat(')')) fail("expected ')'");
          double (*f)(double) = nullptr;
          if (name == "sin") f = std::sin;
          else if (name == "cos") f = std::cos;
          else if (name == "exp") f = std::exp;
          else if (name == "sqrt") f = std::sqrt;
          else if (name == "abs") f = std::fabs;
          else fail("unknown function '" + name + "'");
          return [f, arg](const Eigen::VectorXd& x, double t) { return f(arg(x, t)); };
        }
        pos = start;
        fail("unknown identifier '" + name + "'");
      }
      fail(std::string("unexpected character '") + c + "'");
    }
  };

  Fn fn_;
  std::string text_;
};

}  // namespace homog
