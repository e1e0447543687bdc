#pragma once
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace becoct {

// Small arithmetic language for initial guesses and potentials:
// numbers, named variables, + - * / ^, unary minus, parentheses and
// sqrt exp log sin cos tan tanh abs min max. The constant pi is predefined.
class Expression {
 public:
  Expression(const std::string& text, std::vector<std::string> variables);
  double operator()(const std::vector<double>& values) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::vector<std::string> vars_;
  std::shared_ptr<const Node> root_;
};

}  // namespace becoct
