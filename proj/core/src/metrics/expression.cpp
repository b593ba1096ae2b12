#include "finsler/metrics/expression.hpp"

#include <cctype>
#include <cstdlib>

namespace finsler::metrics {

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := '-' unary | power
// power  := atom ('^' unary)?
// atom   := number | variable | function '(' expr ')' | '(' expr ')'
class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& text) : src_(text) { out_.text_ = text; }

  Expression run() {
    out_.root_ = expr();
    skip();
    if (pos_ != src_.size()) throw ExpressionError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
    return std::move(out_);
  }

 private:
  using Op = Expression::Op;

  int add(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
    out_.nodes_.push_back({op, value, lhs, rhs});
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int expr() {
    int lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = add(Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = add(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = add(Op::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = add(Op::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  int unary() {
    if (accept('-')) return add(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  int power() {
    const int base = atom();
    if (accept('^')) return add(Op::pow, base, unary());
    return base;
  }

  int atom() {
    skip();
    if (pos_ >= src_.size()) throw ExpressionError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      const int e = expr();
      if (!accept(')')) throw ExpressionError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) throw ExpressionError("malformed number", pos_);
      pos_ += static_cast<std::size_t>(end - begin);
      return add(Op::number, -1, -1, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string name = src_.substr(start, pos_ - start);
      if (name == "s") return add(Op::var_s);
      if (name == "t") return add(Op::var_t);
      if (name == "r") return add(Op::var_r);
      Op fn;
      if (name == "sqrt") {
        fn = Op::sqrt;
      } else if (name == "exp") {
        fn = Op::exp;
      } else if (name == "log") {
        fn = Op::log;
      } else if (name == "sin") {
        fn = Op::sin;
      } else if (name == "cos") {
        fn = Op::cos;
      } else {
        throw ExpressionError("unknown identifier '" + name + "'", start);
      }
      if (!accept('(')) throw ExpressionError("expected '(' after " + name, pos_);
      const int arg = expr();
      if (!accept(')')) throw ExpressionError("expected ')'", pos_);
      return add(fn, arg);
    }
    throw ExpressionError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  Expression out_;
};

Expression Expression::parse(const std::string& text) { return ExpressionParser(text).run(); }

bool Expression::uses(Op variable) const {
  for (const auto& n : nodes_)
    if (n.op == variable) return true;
  return false;
}

}  // namespace finsler::metrics
