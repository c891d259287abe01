#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"

namespace qlab {

/// Arithmetic expression in one variable `phi`:
///   numbers, phi, pi, + - * / ^, parentheses, unary minus,
///   sin cos tan ln log exp sqrt abs, pow(a, b).
class Expression {
 public:
  static Expression parse(const std::string& text) {
    Parser p{text, 0};
    Expression e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    e.text_ = text;
    return e;
  }

  double operator()(double phi) const { return root_->eval(phi); }
  bool depends_on_phi() const { return root_->uses_phi(); }
  const std::string& text() const { return text_; }

 private:
  struct Node {
    enum Kind { num, var, add, sub, mul, div, pow, neg, call } kind = num;
    double value = 0.0;
    std::string fn;
    std::vector<std::shared_ptr<Node>> args;

    double eval(double phi) const {
      switch (kind) {
        case num: return value;
        case var: return phi;
        case add: return args[0]->eval(phi) + args[1]->eval(phi);
        case sub: return args[0]->eval(phi) - args[1]->eval(phi);
        case mul: return args[0]->eval(phi) * args[1]->eval(phi);
        case div: return args[0]->eval(phi) / args[1]->eval(phi);
        case pow: return std::pow(args[0]->eval(phi), args[1]->eval(phi));
        case neg: return -args[0]->eval(phi);
        case call: {
          const double a = args[0]->eval(phi);
          if (fn == "sin") return std::sin(a);
          if (fn == "cos") return std::cos(a);
          if (fn == "tan") return std::tan(a);
          if (fn == "ln" || fn == "log") return std::log(a);
          if (fn == "exp") return std::exp(a);
          if (fn == "sqrt") return std::sqrt(a);
          if (fn == "abs") return std::abs(a);
          return std::pow(a, args[1]->eval(phi));  // pow
        }
      }
      return 0.0;
    }
    bool uses_phi() const {
      if (kind == var) return true;
      for (const auto& a : args)
        if (a->uses_phi()) return true;
      return false;
    }
  };
  using NodePtr = std::shared_ptr<Node>;

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      detail::raise(ErrorKind::config, "potentials",
                    "bad expression '" + s + "' at column " + std::to_string(pos + 1) + ": " + what);
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    static NodePtr make(Node::Kind k, std::vector<NodePtr> args) {
      auto n = std::make_shared<Node>();
      n->kind = k;
      n->args = std::move(args);
      return n;
    }
    NodePtr expr() {
      NodePtr lhs = term();
      for (;;) {
        if (eat('+'))
          lhs = make(Node::add, {lhs, term()});
        else if (eat('-'))
          lhs = make(Node::sub, {lhs, term()});
        else
          return lhs;
      }
    }
    NodePtr term() {
      NodePtr lhs = unary();
      for (;;) {
        if (eat('*'))
          lhs = make(Node::mul, {lhs, unary()});
        else if (eat('/'))
          lhs = make(Node::div, {lhs, unary()});
        else
          return lhs;
      }
    }
    NodePtr unary() {
      if (eat('-')) return make(Node::neg, {unary()});
      if (eat('+')) return unary();
      return power();
    }
    NodePtr power() {
      NodePtr base = primary();
      if (eat('^')) return make(Node::pow, {base, unary()});  // right associative
      return base;
    }
    NodePtr primary() {
      skip();
      if (pos >= s.size()) fail("unexpected end");
      if (eat('(')) {
        NodePtr e = expr();
        if (!eat(')')) fail("expected ')'");
        return e;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(s.substr(pos), &used);
        } catch (...) {
          fail("bad number");
        }
        pos += used;
        auto n = std::make_shared<Node>();
        n->value = v;
        return n;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
        const std::string id = s.substr(start, pos - start);
        if (id == "phi") {
          auto n = std::make_shared<Node>();
          n->kind = Node::var;
          return n;
        }
        if (id == "pi") {
          auto n = std::make_shared<Node>();
          n->value = std::numbers::pi;
          return n;
        }
        static const char* fns[] = {"sin", "cos", "tan", "ln", "log", "exp", "sqrt", "abs", "pow"};
        bool known = false;
        for (const char* f : fns) known = known || id == f;
        if (!known) {
          pos = start;
          fail("unknown identifier '" + id + "'");
        }
        if (!eat('(')) fail("expected '(' after " + id);
        auto n = std::make_shared<Node>();
        n->kind = Node::call;
        n->fn = id;
        n->args.push_back(expr());
        if (id == "pow") {
          if (!eat(',')) fail("pow takes two arguments");
          n->args.push_back(expr());
        }
        if (!eat(')')) fail("expected ')'");
        return n;
      }
      fail("unexpected '" + std::string(1, c) + "'");
    }
  };

  NodePtr root_;
  std::string text_;
};

}  // namespace qlab
