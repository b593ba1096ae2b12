#pragma once

// A small arithmetic-expression language for user-supplied generators L(s, t)
// and profiles phi(r):  + - * / ^, unary minus, parentheses, numbers, the
// variables s, t, r and the functions sqrt, exp, log, sin, cos.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/scalar.hpp"

namespace finsler::metrics {

class ExpressionError : public std::runtime_error {
 public:
  ExpressionError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at column " + std::to_string(position + 1)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class Expression {
 public:
  enum class Op { number, var_s, var_t, var_r, add, sub, mul, div, pow, neg, sqrt, exp, log, sin, cos };

  struct Node {
    Op op = Op::number;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

  static Expression parse(const std::string& text);

  const std::string& text() const noexcept { return text_; }
  bool uses(Op variable) const;

  template <class T>
  T evaluate(const T& s, const T& t, const T& r = T(0.0)) const {
    return eval<T>(root_, s, t, r);
  }

 private:
  template <class T>
  T eval(int i, const T& s, const T& t, const T& r) const {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::number: return T(n.value);
      case Op::var_s: return s;
      case Op::var_t: return t;
      case Op::var_r: return r;
      case Op::add: return eval<T>(n.lhs, s, t, r) + eval<T>(n.rhs, s, t, r);
      case Op::sub: return eval<T>(n.lhs, s, t, r) - eval<T>(n.rhs, s, t, r);
      case Op::mul: return eval<T>(n.lhs, s, t, r) * eval<T>(n.rhs, s, t, r);
      case Op::div: return eval<T>(n.lhs, s, t, r) / eval<T>(n.rhs, s, t, r);
      case Op::neg: return -eval<T>(n.lhs, s, t, r);
      case Op::sqrt: return math::sqrt(eval<T>(n.lhs, s, t, r));
      case Op::exp: return math::exp(eval<T>(n.lhs, s, t, r));
      case Op::log: return math::log(eval<T>(n.lhs, s, t, r));
      case Op::sin: return math::sin(eval<T>(n.lhs, s, t, r));
      case Op::cos: return math::cos(eval<T>(n.lhs, s, t, r));
      case Op::pow: {
        const Node& e = nodes_[static_cast<std::size_t>(n.rhs)];
        const T base = eval<T>(n.lhs, s, t, r);
        if (e.op == Op::number) {
          const double p = e.value;
          if (p == std::floor(p) && p >= 0 && p <= 16) return math::ipow(base, static_cast<int>(p));
          return math::pow(base, p);
        }
        return math::exp(eval<T>(n.rhs, s, t, r) * math::log(base));
      }
    }
    return T(0.0);
  }

  friend class ExpressionParser;
  std::string text_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace finsler::metrics
