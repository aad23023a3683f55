#include "contactdyn/expr.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

namespace contactdyn {

class ExprParser {
 public:
  ExprParser(std::string_view text, const std::vector<std::string>& vars) : s_(text) {
    out_.vars_ = vars;
  }

  Expr run() {
    out_.root_ = parse_expr();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return std::move(out_);
  }

 private:
  using Op = Expr::Op;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(ErrorKind::ParseError, msg, pos_);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  int push(Expr::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }
  int binary(Op op, int a, int b) { return push({op, 0.0, -1, a, b}); }
  int unary_node(Op op, int a) { return push({op, 0.0, -1, a, -1}); }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = binary(Op::Add, lhs, parse_term());
      else if (accept('-')) lhs = binary(Op::Sub, lhs, parse_term());
      else return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = binary(Op::Mul, lhs, parse_unary());
      else if (accept('/')) lhs = binary(Op::Div, lhs, parse_unary());
      else return lhs;
    }
  }

  int parse_unary() {
    if (accept('-')) return unary_node(Op::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (accept('^')) return binary(Op::Pow, base, parse_unary());
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      int e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  int parse_number() {
    const std::size_t start = pos_;
    std::string buf(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    const std::size_t used = static_cast<std::size_t>(end - buf.c_str());
    if (used == 0) fail("malformed number");
    // strtod accepts hex and inf/nan; the grammar does not
    for (std::size_t i = 0; i < used; ++i) {
      const char d = buf[i];
      if (!(std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' ||
            d == '+' || d == '-')) {
        pos_ = start + i;
        fail("malformed number");
      }
    }
    pos_ += used;
    return push({Op::Const, v, -1, -1, -1});
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name(s_.substr(start, pos_ - start));

    static const std::unordered_map<std::string, Op> unary_fns = {
        {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},
        {"exp", Op::Exp},   {"log", Op::Log},   {"tanh", Op::Tanh},
        {"sqrt", Op::Sqrt}, {"bump", Op::Bump}, {"sigmoid", Op::Sigmoid},
    };

    skip_ws();
    const bool call = pos_ < s_.size() && s_[pos_] == '(';
    if (call) {
      ++pos_;
      if (name == "pow") {
        int a = parse_expr();
        expect(',');
        int b = parse_expr();
        expect(')');
        return binary(Op::Pow, a, b);
      }
      auto it = unary_fns.find(name);
      if (it == unary_fns.end()) {
        pos_ = start;
        throw ParseError(ErrorKind::UnknownIdentifier, "unknown function '" + name + "'", start);
      }
      int a = parse_expr();
      if (accept(',')) fail("function '" + name + "' takes one argument");
      expect(')');
      return unary_node(it->second, a);
    }

    for (std::size_t i = 0; i < out_.vars_.size(); ++i)
      if (out_.vars_[i] == name) return push({Op::Var, 0.0, static_cast<int>(i), -1, -1});
    if (name == "pi") return push({Op::Const, std::numbers::pi, -1, -1, -1});
    if (name == "e") return push({Op::Const, std::numbers::e, -1, -1, -1});
    throw ParseError(ErrorKind::UnknownIdentifier, "unknown identifier '" + name + "'", start);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  Expr out_;
};

Expr Expr::parse(std::string_view text, const std::vector<std::string>& variables) {
  return ExprParser(text, variables).run();
}

bool Expr::uses(int var) const {
  for (const Node& n : nodes_)
    if (n.op == Op::Var && n.var == var) return true;
  return false;
}

std::string Expr::print() const { return print_node(root_); }

std::string Expr::print_node(int i) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  auto bin = [&](const char* op) {
    return "(" + print_node(n.a) + " " + op + " " + print_node(n.b) + ")";
  };
  auto fn = [&](const char* name) { return std::string(name) + "(" + print_node(n.a) + ")"; };
  switch (n.op) {
    case Op::Const: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return buf;
    }
    case Op::Var: return vars_[static_cast<std::size_t>(n.var)];
    case Op::Add: return bin("+");
    case Op::Sub: return bin("-");
    case Op::Mul: return bin("*");
    case Op::Div: return bin("/");
    case Op::Pow: return bin("^");
    case Op::Neg: return "(-" + print_node(n.a) + ")";
    case Op::Sin: return fn("sin");
    case Op::Cos: return fn("cos");
    case Op::Tan: return fn("tan");
    case Op::Exp: return fn("exp");
    case Op::Log: return fn("log");
    case Op::Tanh: return fn("tanh");
    case Op::Sqrt: return fn("sqrt");
    case Op::Bump: return fn("bump");
    case Op::Sigmoid: return fn("sigmoid");
  }
  return "";
}

}  // namespace contactdyn
