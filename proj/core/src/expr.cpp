#include "zollfrei/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "zollfrei/util.hpp"

namespace zollfrei::expr {

namespace {

struct Token {
  enum Kind { kNumber, kName, kPunct, kEnd } kind;
  double number = 0.0;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ >= s_.size()) {
      tok_ = {Token::kEnd, 0.0, ""};
      return;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      tok_ = {Token::kNumber, std::strtod(s_.c_str() + pos_, &end), ""};
      pos_ = end - s_.c_str();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      tok_ = {Token::kName, 0.0, s_.substr(start, pos_ - start)};
      return;
    }
    tok_ = {Token::kPunct, 0.0, std::string(1, c)};
    ++pos_;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  Token tok_;
};

}  // namespace

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars)
      : lex_(text) {
    for (std::size_t i = 0; i < vars.size(); ++i) var_slot_[vars[i]] = static_cast<int>(i);
    out_.nvars_ = vars.size();
  }

  Expression run() {
    sum();
    if (lex_.peek().kind != Token::kEnd)
      throw domain_error("expression: trailing input at '" + lex_.peek().text + "'");
    return std::move(out_);
  }

 private:
  using Op = Expression::Op;

  void emit(Op op, int slot = 0, double v = 0.0) { out_.code_.push_back({op, slot, v}); }

  void sum() {
    product();
    for (;;) {
      if (punct("+")) {
        product();
        emit(Op::kAdd);
      } else if (punct("-")) {
        product();
        emit(Op::kSub);
      } else {
        return;
      }
    }
  }

  void product() {
    unary();
    for (;;) {
      if (punct("*")) {
        unary();
        emit(Op::kMul);
      } else if (punct("/")) {
        unary();
        emit(Op::kDiv);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (punct("-")) {
      unary();
      emit(Op::kNeg);
      return;
    }
    if (punct("+")) {
      unary();
      return;
    }
    power();
  }

  void power() {
    atom();
    if (punct("^")) {
      unary();  // right associative, allows 2^-3
      emit(Op::kPow);
    }
  }

  void atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Token::kNumber:
        emit(Op::kConst, 0, t.number);
        return;
      case Token::kName: {
        if (lex_.peek().kind == Token::kPunct && lex_.peek().text == "(") {
          lex_.take();
          sum();
          expect(")");
          emit(function_op(t.text));
          return;
        }
        auto it = var_slot_.find(t.text);
        if (it == var_slot_.end())
          throw domain_error("expression: unknown variable '" + t.text + "'");
        emit(Op::kVar, it->second);
        return;
      }
      case Token::kPunct:
        if (t.text == "(") {
          sum();
          expect(")");
          return;
        }
        throw domain_error("expression: unexpected '" + t.text + "'");
      case Token::kEnd:
        throw domain_error("expression: unexpected end of input");
    }
  }

  Op function_op(const std::string& name) {
    if (name == "sin") return Op::kSin;
    if (name == "cos") return Op::kCos;
    if (name == "tan") return Op::kTan;
    if (name == "exp") return Op::kExp;
    if (name == "log") return Op::kLog;
    if (name == "sqrt") return Op::kSqrt;
    if (name == "abs") return Op::kAbs;
    throw domain_error("expression: unknown function '" + name + "'");
  }

  bool punct(const char* p) {
    if (lex_.peek().kind == Token::kPunct && lex_.peek().text == p) {
      lex_.take();
      return true;
    }
    return false;
  }

  void expect(const char* p) {
    if (!punct(p)) throw domain_error(std::string("expression: expected '") + p + "'");
  }

  Lexer lex_;
  std::map<std::string, int> var_slot_;
  Expression out_;
};

Expression Expression::parse(const std::string& text,
                             const std::vector<std::string>& variables) {
  return Parser(text, variables).run();
}

double Expression::eval(const double* values) const {
  double stack[64];
  int top = -1;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::kConst: stack[++top] = in.value; break;
      case Op::kVar: stack[++top] = values[in.slot]; break;
      case Op::kAdd: --top; stack[top] += stack[top + 1]; break;
      case Op::kSub: --top; stack[top] -= stack[top + 1]; break;
      case Op::kMul: --top; stack[top] *= stack[top + 1]; break;
      case Op::kDiv: --top; stack[top] /= stack[top + 1]; break;
      case Op::kPow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
      case Op::kNeg: stack[top] = -stack[top]; break;
      case Op::kSin: stack[top] = std::sin(stack[top]); break;
      case Op::kCos: stack[top] = std::cos(stack[top]); break;
      case Op::kTan: stack[top] = std::tan(stack[top]); break;
      case Op::kExp: stack[top] = std::exp(stack[top]); break;
      case Op::kLog: stack[top] = std::log(stack[top]); break;
      case Op::kSqrt: stack[top] = std::sqrt(stack[top]); break;
      case Op::kAbs: stack[top] = std::fabs(stack[top]); break;
    }
    if (top >= 63) throw domain_error("expression: nesting too deep");
  }
  return stack[0];
}

}  // namespace zollfrei::expr
