#include "becoct/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>

#include "becoct/errors.hpp"

namespace becoct {

struct Expression::Node {
  enum Kind { number, variable, unary, binary, call } kind;
  double value = 0.0;
  int index = 0;
  char op = 0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(const std::vector<double>& v) const {
    switch (kind) {
      case number: return value;
      case variable: return v[index];
      case unary: return -args[0]->eval(v);
      case binary: {
        const double a = args[0]->eval(v), b = args[1]->eval(v);
        switch (op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          case '/': return a / b;
          default: return std::pow(a, b);
        }
      }
      case call: {
        const double a = args[0]->eval(v);
        if (fn == "min") return std::min(a, args[1]->eval(v));
        if (fn == "max") return std::max(a, args[1]->eval(v));
        if (fn == "sqrt") return std::sqrt(a);
        if (fn == "exp") return std::exp(a);
        if (fn == "log") return std::log(a);
        if (fn == "sin") return std::sin(a);
        if (fn == "cos") return std::cos(a);
        if (fn == "tan") return std::tan(a);
        if (fn == "tanh") return std::tanh(a);
        return std::abs(a);
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidArgument("expression '" + s_ + "': " + why + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr make_binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::binary;
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr sum() {
    NodePtr a = product();
    for (;;) {
      if (eat('+'))
        a = make_binary('+', a, product());
      else if (eat('-'))
        a = make_binary('-', a, product());
      else
        return a;
    }
  }
  NodePtr product() {
    NodePtr a = signed_factor();
    for (;;) {
      if (eat('*'))
        a = make_binary('*', a, signed_factor());
      else if (eat('/'))
        a = make_binary('/', a, signed_factor());
      else
        return a;
    }
  }
  NodePtr signed_factor() {
    if (eat('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::unary;
      n->args = {signed_factor()};
      return n;
    }
    if (eat('+')) return signed_factor();
    return power();
  }
  // Right associative; binds tighter than unary minus on its left: -x^2 = -(x^2).
  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make_binary('^', base, signed_factor());
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (eat('(')) {
      NodePtr n = sum();
      if (!eat(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Node>();
      n->kind = Node::number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (eat('(')) return call(name);
      for (size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) {
          auto n = std::make_shared<Node>();
          n->kind = Node::variable;
          n->index = static_cast<int>(i);
          return n;
        }
      if (name == "pi") {
        auto n = std::make_shared<Node>();
        n->kind = Node::number;
        n->value = std::numbers::pi;
        return n;
      }
      pos_ = start;
      fail("unknown variable '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  NodePtr call(const std::string& name) {
    static const std::map<std::string, int> arity = {{"sqrt", 1}, {"exp", 1}, {"log", 1}, {"sin", 1},
                                                     {"cos", 1},  {"tan", 1}, {"tanh", 1}, {"abs", 1},
                                                     {"min", 2},  {"max", 2}};
    const auto it = arity.find(name);
    if (it == arity.end()) fail("unknown function '" + name + "'");
    auto n = std::make_shared<Node>();
    n->kind = Node::call;
    n->fn = name;
    n->args.push_back(sum());
    for (int k = 1; k < it->second; ++k) {
      if (!eat(',')) fail("function '" + name + "' takes " + std::to_string(it->second) + " arguments");
      n->args.push_back(sum());
    }
    if (!eat(')')) fail("missing ')' after arguments of '" + name + "'");
    return n;
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text, std::vector<std::string> variables)
    : text_(text), vars_(std::move(variables)) {
  root_ = Parser(text_, vars_).parse();
}

double Expression::operator()(const std::vector<double>& values) const {
  if (values.size() != vars_.size()) throw InvalidArgument("expression '" + text_ + "': wrong number of values");
  return root_->eval(values);
}

}  // namespace becoct
