#pragma once

#include "gspr/graded.hpp"

#include <cctype>
#include <string>

namespace gspr {

struct parse_error : std::runtime_error {
  parse_error(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at column " + std::to_string(pos + 1)), position(pos) {}
  std::size_t position;
};

namespace parsing {

// Grammar:  expr   := ['-'] term (('+'|'-') term)*
//           term   := factor ('*' factor)*
//           factor := rational | symbol ['^' integer] | '(' expr ')'
//           symbol := even coordinate name | 'th' index
// Whitespace-insensitive; rationals are 'p' or 'p/q'.
class ExprParser {
 public:
  ExprParser(std::string text, ContextPtr ctx) : text_(std::move(text)), ctx_(std::move(ctx)) {}

  GradedFunction parse() {
    GradedFunction f = expr();
    skip_ws();
    if (pos_ != text_.size()) throw parse_error("unexpected trailing input", pos_);
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  GradedFunction expr() {
    skip_ws();
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    GradedFunction acc = term();
    if (neg) acc = -acc;
    while (true) {
      skip_ws();
      if (eat('+'))
        acc += term();
      else if (eat('-'))
        acc -= term();
      else
        break;
    }
    return acc;
  }

  GradedFunction term() {
    GradedFunction acc = factor();
    while (true) {
      skip_ws();
      if (eat('*'))
        acc = graded_mul(acc, factor());
      else
        break;
    }
    return acc;
  }

  GradedFunction factor() {
    skip_ws();
    if (pos_ >= text_.size()) throw parse_error("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      GradedFunction inner = expr();
      if (!eat(')')) throw parse_error("expected ')'", pos_);
      return maybe_power_of(inner);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return rational_factor();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return symbol_factor();
    throw parse_error(std::string("unexpected character '") + c + "'", pos_);
  }

  GradedFunction rational_factor() {
    Integer num = integer();
    Integer den = 1;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      skip_ws();
      std::size_t at = pos_;
      den = integer();
      if (den == 0) throw parse_error("zero denominator", at);
    }
    return GradedFunction::constant(ctx_, Rational(num, den));
  }

  Integer integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw parse_error("expected an integer", pos_);
    return Integer(text_.substr(start, pos_ - start));
  }

  GradedFunction symbol_factor() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    GradedFunction base(ctx_);
    if (name.size() > 2 && name.rfind("th", 0) == 0 &&
        std::isdigit(static_cast<unsigned char>(name[2]))) {
      std::size_t idx = std::stoul(name.substr(2));
      if (idx == 0 || idx > ctx_->size())
        throw parse_error("odd coordinate " + name + " out of range", start);
      base = GradedFunction::theta(ctx_, idx - 1);
      // odd symbols square to zero; powers are rejected
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '^')
        throw parse_error("powers of odd coordinates are not allowed", pos_);
      return base;
    }
    int vi = ctx_->index_of(name);
    if (vi < 0) throw parse_error("unknown variable " + name, start);
    unsigned power = 1;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      Integer e = integer();
      if (e < 0 || e > 64) throw parse_error("unsupported exponent", pos_);
      power = e.convert_to<unsigned>();
    }
    return GradedFunction::from_polynomial(
        Polynomial::variable(ctx_, static_cast<std::size_t>(vi), power));
  }

  GradedFunction maybe_power_of(GradedFunction base) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      Integer e = integer();
      if (e < 0 || e > 64) throw parse_error("unsupported exponent", pos_);
      GradedFunction acc = GradedFunction::constant(ctx_, Rational(1));
      for (Integer k = 0; k < e; ++k) acc = graded_mul(acc, base);
      return acc;
    }
    return base;
  }

  std::string text_;
  ContextPtr ctx_;
  std::size_t pos_ = 0;
};

}  // namespace parsing

inline GradedFunction parse_graded(const std::string& text, const ContextPtr& ctx) {
  return parsing::ExprParser(text, ctx).parse();
}

inline Polynomial parse_polynomial(const std::string& text, const ContextPtr& ctx) {
  GradedFunction f = parse_graded(text, ctx);
  if (!f.is_homogeneous(0) && !f.is_zero())
    throw parse_error("expression contains odd coordinates where a polynomial is required", 0);
  return f.coefficient(0);
}

}  // namespace gspr
