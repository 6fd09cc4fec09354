#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "zollfrei/util.hpp"

namespace zollfrei::expr {

// Compiled infix expression over named variables.  Supports + - * / ^,
// parentheses, unary minus, numeric literals, and the functions
// sin cos tan exp log sqrt abs.  '^' binds tighter than unary minus on the
// left (so -x^2 == -(x^2)) and is right associative.
class Expression {
 public:
  static Expression parse(const std::string& text,
                          const std::vector<std::string>& variables);

  double eval(const double* values) const;
  std::size_t arity() const { return nvars_; }

 private:
  // Stack program: op codes with inline operands; avoids an AST walk per eval.
  enum class Op : unsigned char {
    kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg,
    kSin, kCos, kTan, kExp, kLog, kSqrt, kAbs
  };
  struct Instr {
    Op op;
    int slot = 0;
    double value = 0.0;
  };
  std::vector<Instr> code_;
  std::size_t nvars_ = 0;
  friend class Parser;
};

}  // namespace zollfrei::expr
